//! Acceptance battery: ten numbered criteria covering the full pipeline, each
//! checked at a fixed tolerance and reported as one `acceptance NN <name>:
//! PASS/FAIL (...)` line (visible under `--nocapture`).
//!
//! The criteria exercise, in order: metric construction across a random
//! ensemble and the PT parameter grid, constancy of the metric and of the
//! Hermitian partner along stationary flows, the closed-form map against its
//! integrated ODE (including fourth-order self-convergence), the paired
//! operator equations on a driven schedule, cross-picture expectation
//! equivalence, the metric identity against independent map integration,
//! conserved Heisenberg expectations, broken-phase rejection, and the CLI's
//! byte-level determinism and runtime envelope.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;

use nhh_core::synth;
use nhh_core::tol;
use nhh_core::{
    asym_chain, coupling_residual, cross_picture_expectation, driven_pt, dyson_from_metric,
    evolve_metric, integrate_dyson, integrate_heisenberg_pair, make_compatible_initial, mat_exp,
    pt_two_level, rel_fro_gap, to_p_space, ComplexMatrix, DysonMap, DysonMode, Error, Hamiltonian,
    HamiltonianSchedule, MatrixSchedule, MetricOperator, Observable, Space, StateVector,
    StationaryScenario, TimeGrid,
};

fn report(label: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {label}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {label} failed: {detail}");
}

/// Metric + positive-root map for a static Hamiltonian, unwrapped — every
/// model used below lies in the unbroken phase by construction.
fn statics(h: &Hamiltonian) -> (MetricOperator, DysonMap) {
    let theta = solve(h);
    let omega = dyson_from_metric(&theta, DysonMode::PositiveRoot).expect("factorizable metric");
    (theta, omega)
}

fn solve(h: &Hamiltonian) -> MetricOperator {
    nhh_core::solve_metric(h, None, tol::REAL_SPECTRUM_REL).expect("unbroken-phase model")
}

/// Stationary scenarios shared by the constancy criteria: two-level systems
/// at weak and strong gain/loss, a six-site chain, and a random
/// quasi-Hermitian model. Each paired with a horizon T = 20/‖H‖_F so every
/// flow spans the same dimensionless length ‖H‖·T = 20.
fn stationary_zoo() -> Vec<(StationaryScenario, f64)> {
    let mut models = vec![
        pt_two_level(0.5, 1.0),
        pt_two_level(0.8, 1.0),
        asym_chain(6, 1.0, 0.3).expect("valid chain parameters").0,
    ];
    let (random, _) = synth::random_quasi_hermitian(&mut synth::rng(41), 4, 41)
        .expect("well-conditioned synthesis");
    models.push(random);
    models
        .into_iter()
        .map(|h| {
            let horizon = 20.0 / h.matrix().norm_fro();
            let (_, omega0) = statics(&h);
            let scen = StationaryScenario::new(h, omega0, 0.0).expect("observable initial data");
            (scen, horizon)
        })
        .collect()
}

fn quadratic_form(m: &ComplexMatrix, v: &StateVector) -> Complex64 {
    let image = StateVector::new(m.apply(v.as_array()), v.space()).expect("finite image");
    v.inner(&image).expect("matching spaces")
}

#[test]
fn criterion_01_metric_construction() {
    let start = Instant::now();
    let mut worst_residual = 0.0f64;
    let mut worst_min_eig = f64::INFINITY;
    let mut count = 0u32;

    // 100 random quasi-Hermitian models cycling through dimensions 2–16.
    for i in 0..100u64 {
        let dim = 2 + (i as usize % 15);
        let mut rng = synth::rng(1000 + i);
        let (h, _) = synth::random_quasi_hermitian(&mut rng, dim, i).expect("synthesis");
        let theta = solve(&h);
        let r = coupling_residual(h.matrix(), &h.matrix().dagger(), theta.theta())
            .expect("matching dimensions");
        worst_residual = worst_residual.max(r);
        worst_min_eig = worst_min_eig.min(theta.min_eig());
        count += 1;
    }

    // Unbroken-phase two-level grid: γ strictly below both couplings.
    for step in 0..10 {
        let gamma = 0.09 * f64::from(step);
        for s in [1.0, 1.5] {
            let h = pt_two_level(gamma, s);
            let theta = solve(&h);
            let r = coupling_residual(h.matrix(), &h.matrix().dagger(), theta.theta())
                .expect("matching dimensions");
            worst_residual = worst_residual.max(r);
            worst_min_eig = worst_min_eig.min(theta.min_eig());
            count += 1;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_residual < 1e-10 && worst_min_eig > 0.0 && elapsed < 10.0;
    report(
        "01 metric_construction",
        pass,
        &format!(
            "{count} models, max intertwining {worst_residual:.2e} < 1e-10, \
             min Θ eigenvalue {worst_min_eig:.2e} > 0, {elapsed:.2}s < 10s"
        ),
    );
}

#[test]
fn criterion_02_stationary_metric_constancy() {
    let start = Instant::now();
    let mut sup = 0.0f64;
    for (scen, horizon) in stationary_zoo() {
        let grid = TimeGrid::uniform(0.0, horizon, horizon / 400.0).expect("valid grid");
        for &t in grid.points() {
            let theta_t = scen.theta_at(t).expect("closed-form metric");
            sup = sup.max(rel_fro_gap(theta_t.theta(), scen.theta0().theta()));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = sup < 1e-8 && elapsed < 5.0;
    report(
        "02 metric_constancy",
        pass,
        &format!("sup ‖Θ(t)−θ₀‖/‖θ₀‖ = {sup:.2e} < 1e-8 over ‖H‖T = 20, {elapsed:.2}s < 5s"),
    );
}

#[test]
fn criterion_03_partner_constancy() {
    let mut drift = 0.0f64;
    let mut herm = 0.0f64;
    for (scen, horizon) in stationary_zoo() {
        let grid = TimeGrid::uniform(0.0, horizon, horizon / 400.0).expect("valid grid");
        let partner0 = scen.partner_h_at(0.0).expect("hermitizable");
        for &t in grid.points() {
            let partner = scen.partner_h_at(t).expect("hermitizable");
            drift = drift.max(rel_fro_gap(partner.matrix(), partner0.matrix()));
            herm = herm.max(partner.matrix().herm_residual());
        }
    }
    let pass = drift < 1e-8 && herm < 1e-9;
    report(
        "03 partner_constancy",
        pass,
        &format!("sup ‖𝔥(t)−𝔥(t₀)‖/‖𝔥(t₀)‖ = {drift:.2e} < 1e-8, Hermiticity {herm:.2e} < 1e-9"),
    );
}

#[test]
fn criterion_04_closed_form_vs_integrated_map() {
    let h = pt_two_level(0.5, 1.0);
    let (_, omega0) = statics(&h);
    let scen =
        StationaryScenario::new(h.clone(), omega0.clone(), 0.0).expect("observable initial data");
    let schedule = HamiltonianSchedule::constant(&h);

    let grid = TimeGrid::uniform(0.0, 2.0, 0.01).expect("valid grid");
    let traj = integrate_dyson(&omega0, &schedule, &grid, 1e-3).expect("integrable");
    let mut gap = 0.0f64;
    for state in &traj {
        let ode = state
            .omega
            .as_ref()
            .expect("map trajectory carries the map");
        let closed = scen.omega_at(state.t).expect("closed form");
        gap = gap.max(rel_fro_gap(ode, closed.omega()));
    }

    // Fourth-order self-convergence oracle: the end-point defect against the
    // closed form must shrink ≈16× when the step is halved.
    let endpoint_err = |dt: f64| {
        let ends = TimeGrid::uniform(0.0, 2.0, 2.0).expect("two-point grid");
        let traj = integrate_dyson(&omega0, &schedule, &ends, dt).expect("integrable");
        let last = traj.last().expect("nonempty trajectory");
        let closed = scen.omega_at(last.t).expect("closed form");
        rel_fro_gap(last.omega.as_ref().expect("map"), closed.omega())
    };
    let coarse = endpoint_err(0.05);
    let fine = endpoint_err(0.025);
    let ratio = coarse / fine;

    let pass = gap < 1e-7 && (8.0..32.0).contains(&ratio);
    report(
        "04 closed_form_vs_ode",
        pass,
        &format!(
            "max ‖Ω_ode−Ω_closed‖/‖Ω_closed‖ = {gap:.2e} < 1e-7 at dt=1e-3; \
             halving dt=0.05 shrinks the defect {ratio:.1}× (expect ≈16×)"
        ),
    );
}

#[test]
fn criterion_05_driven_operator_pair() {
    let schedule = driven_pt(0.5, 0.1, 1.0, 1.0).expect("unbroken drive");
    let h0 = Hamiltonian::new(schedule.at(0.0), "driven at t0");
    let (theta0, omega0) = statics(&h0);
    let a_p = nhh_core::preset_observable("sigma_z", 2).expect("preset");
    let a0 = make_compatible_initial(&a_p, &omega0).expect("compatible image");

    let grid = TimeGrid::uniform(0.0, 2.0, 0.01).expect("valid grid");
    let pair =
        integrate_heisenberg_pair(&a0, &theta0, &schedule, &grid, 1e-3, None).expect("integrable");
    let mut r1 = 0.0f64;
    let mut r2 = 0.0f64;
    for state in &pair {
        r1 = r1.max(
            state
                .coupling_residual()
                .expect("pair carries operators")
                .expect("matching dimensions"),
        );
        r2 = r2.max(
            state
                .conjugation_residual()
                .expect("pair carries operators"),
        );
    }
    let pass = pair.len() == grid.len() && r1 < 1e-6 && r2 < 1e-6;
    report(
        "05 driven_operator_pair",
        pass,
        &format!(
            "{} grid points, max r₁ = {r1:.2e} < 1e-6, max r₂ = {r2:.2e} < 1e-6",
            pair.len()
        ),
    );
}

#[test]
fn criterion_06_cross_picture_equivalence() {
    let mut models = vec![
        pt_two_level(0.5, 1.0),
        asym_chain(5, 1.0, 0.3).expect("chain").0,
    ];
    let (random, _) = synth::random_quasi_hermitian(&mut synth::rng(6), 7, 6).expect("synthesis");
    models.push(random);

    let mut worst_gap = 0.0f64;
    let mut worst_im = 0.0f64;
    let mut pairs = 0u32;
    for (m, h) in models.iter().enumerate() {
        let (theta0, omega0) = statics(h);
        let mut rng = synth::rng(9000 + m as u64);
        for _ in 0..100 {
            let psi = synth::random_state(&mut rng, h.dim(), Space::F);
            let a_p = Observable::p_space(synth::random_hermitian(&mut rng, h.dim()))
                .expect("Hermitian by construction");
            let a_f = make_compatible_initial(&a_p, &omega0).expect("compatible image");
            let (v_s, v_p) = cross_picture_expectation(&psi, &a_f, &a_p, &theta0, &omega0)
                .expect("consistent quadruple");
            worst_gap = worst_gap.max((v_s - v_p).norm());
            worst_im = worst_im.max(v_s.im.abs()).max(v_p.im.abs());
            pairs += 1;
        }
    }
    let pass = worst_gap < 1e-9 && worst_im < 1e-9;
    report(
        "06 cross_picture_equivalence",
        pass,
        &format!(
            "{pairs} (ψ, 𝔞) pairs, max |value_S−value_P| = {worst_gap:.2e} < 1e-9, \
             max imaginary part {worst_im:.2e} < 1e-9"
        ),
    );
}

#[test]
fn criterion_07_metric_identity_vs_map_factorization() {
    let mut worst = 0.0f64;
    let schedules = [
        HamiltonianSchedule::constant(&pt_two_level(0.5, 1.0)),
        driven_pt(0.5, 0.1, 1.0, 1.0).expect("unbroken drive"),
    ];
    for schedule in &schedules {
        let h0 = Hamiltonian::new(schedule.at(0.0), "schedule at t0");
        let (theta0, omega0) = statics(&h0);
        let grid = TimeGrid::uniform(0.0, 2.0, 0.02).expect("valid grid");
        let metric_path = evolve_metric(&theta0, schedule, &grid, 1e-3).expect("integrable");
        let map_path = integrate_dyson(&omega0, schedule, &grid, 1e-3).expect("integrable");
        for ((t_th, theta), state) in metric_path.iter().zip(&map_path) {
            assert_eq!(*t_th, state.t, "shared reporting grid");
            let omega = state
                .omega
                .as_ref()
                .expect("map trajectory carries the map");
            let factored = &omega.dagger() * omega;
            worst = worst.max(rel_fro_gap(&factored, theta.theta()));
        }
    }
    let pass = worst < 1e-6;
    report(
        "07 metric_identity",
        pass,
        &format!("max ‖Ω†Ω − Θ_co‖/‖Θ_co‖ = {worst:.2e} < 1e-6 on shared grids"),
    );
}

#[test]
fn criterion_08_heisenberg_expectation_constancy() {
    let h = pt_two_level(0.5, 1.0);
    let (theta0, omega0) = statics(&h);
    let scen =
        StationaryScenario::new(h.clone(), omega0.clone(), 0.0).expect("observable initial data");
    let horizon = 20.0 / h.matrix().norm_fro();
    let grid = TimeGrid::uniform(0.0, horizon, horizon / 200.0).expect("valid grid");

    // A time-independent observable commuting with the Hermitian partner:
    // its Heisenberg image is constant, so the expectation must freeze.
    let partner = scen.partner_h_at(0.0).expect("hermitizable");
    let hp = partner.matrix();
    let a_c = {
        let poly = &(&ComplexMatrix::identity(2).mul_scalar(Complex64::new(0.7, 0.0))
            + &hp.mul_scalar(Complex64::new(-0.4, 0.0)))
            + &(hp * hp).mul_scalar(Complex64::new(0.25, 0.0));
        Observable::p_space(poly.hermitian_part()).expect("Hermitian polynomial")
    };
    let a_sched = MatrixSchedule::constant(a_c.matrix().clone(), "conserved observable");

    let psi = synth::random_state(&mut synth::rng(17), 2, Space::F);
    let phi0 = to_p_space(&psi, &omega0).expect("map application");
    let reference = quadratic_form(a_c.matrix(), &phi0);

    let h_dag = h.matrix().dagger();
    let mut deviation = 0.0f64;
    for &t in grid.points() {
        let image = scen.observable_at(&a_sched, t).expect("closed-form image");
        // Θ(t) from the same closed form as the image, not assumed constant.
        let fwd = mat_exp(&h_dag, Complex64::new(0.0, t)).expect("propagator");
        let bwd = mat_exp(h.matrix(), Complex64::new(0.0, -t)).expect("propagator");
        let theta_t = &(&fwd * theta0.theta()) * &bwd;
        let moving = quadratic_form(&(&theta_t * image.matrix()), &psi);
        deviation = deviation.max((moving - reference).norm() / (1.0 + reference.norm()));
    }
    let pass = deviation < 1e-6;
    report(
        "08 expectation_constancy",
        pass,
        &format!("max |⟨ψ|Θ(t)A(t)|ψ⟩ − ⟨φ₀|𝔞|φ₀⟩| = {deviation:.2e} < 1e-6 over ‖H‖T = 20"),
    );
}

#[test]
fn criterion_09_broken_phase_rejection() {
    let err = nhh_core::solve_metric(&pt_two_level(1.0, 0.5), None, tol::REAL_SPECTRUM_REL)
        .expect_err("broken phase must be rejected");
    let (pass, detail) = match &err {
        Error::ComplexSpectrum { eigenvalues } => {
            // Eigenvalues of [[iγ, s], [s, −iγ]] square to s²−γ²; at
            // (γ, s) = (1, 0.5) that is −0.75, so the pair is ±i√0.75.
            let want = 0.75f64.sqrt();
            let mut ims: Vec<f64> = eigenvalues.iter().map(|z| z.im).collect();
            ims.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
            let ok = eigenvalues.len() == 2
                && ims.len() == 2
                && (ims[0] + want).abs() < 1e-9
                && (ims[1] - want).abs() < 1e-9
                && eigenvalues.iter().all(|z| z.re.abs() < 1e-9);
            (
                ok,
                format!("ComplexSpectrum with eigenvalues ±i{want:.9} matched within 1e-9"),
            )
        }
        other => (false, format!("unexpected error kind {}", other.kind())),
    };
    report("09 broken_phase_rejection", pass, &detail);
}

#[test]
fn criterion_10_cli_determinism_and_runtime() {
    let configs_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let suite = ["verify_pt.json", "verify_driven.json", "verify_chain.json"];
    let start = Instant::now();
    let mut first_pass: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    let mut identical = true;

    for round in 0..2 {
        for (k, name) in suite.iter().enumerate() {
            let out_dir = tempfile::TempDir::new().expect("tempdir");
            let config: PathBuf = configs_dir.join(name);
            let output = std::process::Command::new(env!("CARGO_BIN_EXE_nhh"))
                .env("NHH_OUTPUT_DIR", out_dir.path())
                .args(["--quiet", "verify"])
                .arg(&config)
                .output()
                .expect("binary runs");
            assert_eq!(
                output.status.code(),
                Some(0),
                "{name}: {}",
                String::from_utf8_lossy(&output.stderr)
            );
            let stem = name.trim_end_matches(".json");
            let csv = std::fs::read(out_dir.path().join(format!("{stem}.csv"))).expect("csv");
            let summary = std::fs::read(out_dir.path().join(format!("{stem}.summary.json")))
                .expect("summary");
            if round == 0 {
                first_pass.push((csv, summary));
            } else {
                identical &= first_pass[k] == (csv, summary);
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = identical && elapsed < 60.0;
    report(
        "10 cli_determinism",
        pass,
        &format!(
            "{} verify configs run twice, byte-identical CSV+JSON = {identical}, \
             total {elapsed:.2}s < 60s",
            suite.len()
        ),
    );
}
