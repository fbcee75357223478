//! The `verify` scenario: every invariant the formalism guarantees for the
//! configured model, checked in one run.
//!
//! On top of the regular time-series columns this adds the battery checks —
//! closed-form agreement of the integrated map, cross-picture expectation
//! agreement over a seeded batch, conservation of expectations of operators
//! commuting with the Hermitian partner, isospectrality of the moving
//! observable, finite-difference recovery of the Coriolis term, and
//! conservation of the bilinear bracket. Static models get the full set;
//! driven models get the subset whose identities survive a moving H(t)
//! (there is no closed form, no constant partner, and no per-observable
//! conservation law to check against).

use std::collections::BTreeMap;

use num_complex::Complex64;

use rand::Rng;

use nhh_core::synth;
use nhh_core::{
    coriolis_from_map, cross_picture_expectation, generator, integrate_dyson,
    make_compatible_initial, mat_exp, rel_fro_gap, schrodinger_f_space, sorted_eigenvalues,
    to_p_space, ComplexMatrix, CoriolisMode, DysonMap, Hamiltonian, HamiltonianSchedule,
    MatrixSchedule, MetricOperator, Observable, Space, TimeGrid,
};

use crate::config::RunConfig;
use crate::error::{physics_err, CliResult};
use crate::report::{InvariantReport, Monitored};
use crate::runner::{
    fold_rows, general_rows, grid_from, p_numerator, push_check, push_t0_invariants, s_numerator,
    stationary_rows, summarize, GeneralRun, RunOutput, StationaryRun,
};

pub(crate) struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub command: &'a str,
    pub label: &'a str,
    pub driven: bool,
    pub schedule: &'a HamiltonianSchedule,
    pub h_t0: &'a Hamiltonian,
    pub theta0: &'a MetricOperator,
    pub omega0: &'a DysonMap,
    pub a_p: &'a Observable,
    pub eigenvalues_t0: Vec<[f64; 2]>,
}

pub(crate) fn run(ctx: Context<'_>) -> CliResult<RunOutput> {
    let cfg = ctx.cfg;
    let thresholds = cfg.thresholds(ctx.driven);
    let grid = grid_from(cfg)?;
    let mut invariants = Vec::new();
    let mut monitored = Vec::new();
    push_t0_invariants(
        ctx.h_t0,
        ctx.theta0,
        ctx.omega0,
        &thresholds,
        &mut invariants,
        &mut monitored,
    )?;

    let rows = if ctx.driven {
        let run = general_rows(
            ctx.schedule,
            ctx.theta0,
            ctx.omega0,
            ctx.a_p,
            &grid,
            cfg.integrator_dt,
            cfg.seed,
        )?;
        fold_rows(&run.rows, &thresholds, &mut invariants, &mut monitored);
        driven_battery(
            &ctx,
            &run,
            &grid,
            &thresholds,
            &mut invariants,
            &mut monitored,
        )?;
        run.rows
    } else {
        let run = stationary_rows(ctx.h_t0, ctx.theta0, ctx.omega0, ctx.a_p, &grid, cfg.seed)?;
        fold_rows(&run.rows, &thresholds, &mut invariants, &mut monitored);
        static_battery(
            &ctx,
            &run,
            &grid,
            &thresholds,
            &mut invariants,
            &mut monitored,
        )?;
        run.rows
    };
    let rows_written = rows.len();
    let summary = summarize(
        cfg,
        ctx.command,
        ctx.label,
        ctx.eigenvalues_t0,
        None,
        invariants,
        monitored,
        rows_written,
    );
    Ok(RunOutput { rows, summary })
}

/// Evenly spread sample positions over a trajectory, endpoints included.
fn sample_indices(len: usize, want: usize) -> Vec<usize> {
    if len <= want || want < 2 {
        return (0..len).collect();
    }
    let mut idx: Vec<usize> = (0..want).map(|k| k * (len - 1) / (want - 1)).collect();
    idx.dedup();
    idx
}

fn max_row_tracking(rows: &[crate::report::Row]) -> f64 {
    rows.iter().fold(f64::NEG_INFINITY, |acc, r| {
        let gap = (r.expectation_s - r.expectation_p).abs();
        if gap.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(gap)
        }
    })
}

fn static_battery(
    ctx: &Context<'_>,
    run: &StationaryRun,
    grid: &TimeGrid,
    thresholds: &BTreeMap<String, f64>,
    invariants: &mut Vec<InvariantReport>,
    monitored: &mut Vec<Monitored>,
) -> CliResult<()> {
    let cfg = ctx.cfg;
    // Battery draws live on their own stream so adding a check never
    // perturbs the time-series state ψ.
    let mut rng = synth::rng(cfg.seed.wrapping_add(1));
    let samples = sample_indices(grid.len(), 9);

    // Hermiticity of the partner 𝔥(t) = Ω(t)·H·Ω(t)⁻¹ along the flow.
    let mut partner_herm = 0.0f64;
    for &i in &samples {
        let partner = run
            .scen
            .partner_h_at(grid.points()[i])
            .map_err(|e| physics_err("hermitization", e))?;
        partner_herm = partner_herm.max(partner.matrix().herm_residual());
    }
    push_check(
        "partner_hermiticity",
        partner_herm,
        thresholds,
        invariants,
        monitored,
    );

    // The integrated map equation against the closed form Ω₀e^{−iτH}.
    let dyson = integrate_dyson(ctx.omega0, ctx.schedule, grid, cfg.integrator_dt)
        .map_err(|e| physics_err("map integration", e))?;
    let mut closed_form = 0.0f64;
    for state in &dyson {
        let omega_ode = state
            .omega
            .as_ref()
            .expect("map trajectory carries the map");
        let omega_cf = run
            .scen
            .omega_at(state.t)
            .map_err(|e| physics_err("map evolution", e))?;
        closed_form = closed_form.max(rel_fro_gap(omega_ode, omega_cf.omega()));
    }
    push_check(
        "closed_form",
        closed_form,
        thresholds,
        invariants,
        monitored,
    );

    let cross = cross_picture_batch(ctx, &mut rng, 100)?;
    push_check("cross_picture", cross, thresholds, invariants, monitored);

    push_check(
        "expectation_tracking",
        max_row_tracking(&run.rows),
        thresholds,
        invariants,
        monitored,
    );

    // Conserved expectation: an operator commuting with the Hermitian
    // partner, 𝔞_c = c₀·1 + c₁𝔥 + c₂𝔥², has a constant image, so the
    // unnormalized S-frame element ⟨ψ|Θ(t)A_c(t)|ψ⟩ must sit on its t₀
    // value ⟨φ₀|𝔞_c|φ₀⟩ for all t.
    let partner0 = run
        .scen
        .partner_h_at(grid.t0())
        .map_err(|e| physics_err("hermitization", e))?;
    let h_p = partner0.matrix();
    let c: [f64; 3] = [
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    ];
    let a_c = {
        let dim = h_p.dim();
        let mut m = ComplexMatrix::identity(dim).mul_scalar(Complex64::new(c[0], 0.0));
        m = &m + &h_p.mul_scalar(Complex64::new(c[1], 0.0));
        m = &m + &(h_p * h_p).mul_scalar(Complex64::new(c[2], 0.0));
        m.hermitian_part()
    };
    let a_c_obs = Observable::p_space(a_c).map_err(|e| physics_err("commuting observable", e))?;
    let a_c_sched = MatrixSchedule::constant(a_c_obs.matrix().clone(), "commuting observable");
    let phi0 = to_p_space(&run.psi, ctx.omega0).map_err(|e| physics_err("map application", e))?;
    let m0 = p_numerator(a_c_obs.matrix(), &phi0)?;
    let h_dag = ctx.h_t0.matrix().dagger();
    let mut constancy = 0.0f64;
    for &i in &samples {
        let t = grid.points()[i];
        let tau = t - grid.t0();
        let a_img = run
            .scen
            .observable_at(&a_c_sched, t)
            .map_err(|e| physics_err("observable image", e))?;
        let fwd_dag =
            mat_exp(&h_dag, Complex64::new(0.0, tau)).map_err(|e| physics_err("propagator", e))?;
        let bwd = mat_exp(ctx.h_t0.matrix(), Complex64::new(0.0, -tau))
            .map_err(|e| physics_err("propagator", e))?;
        let theta_cong = &(&fwd_dag * ctx.theta0.theta()) * &bwd;
        let m_t = s_numerator(&theta_cong, a_img.matrix(), &run.psi)?;
        constancy = constancy.max((m_t - m0).norm() / (1.0 + m0.norm()));
    }
    push_check(
        "expectation_constancy",
        constancy,
        thresholds,
        invariants,
        monitored,
    );

    // The moving image of the configured observable stays isospectral.
    let a_sched = MatrixSchedule::constant(ctx.a_p.matrix().clone(), "observable");
    let img0 = run
        .scen
        .observable_at(&a_sched, grid.t0())
        .map_err(|e| physics_err("observable image", e))?;
    let eigs0 =
        sorted_eigenvalues(img0.matrix()).map_err(|e| physics_err("eigenvalue solve", e))?;
    let radius = eigs0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut spectrum = 0.0f64;
    for &i in &samples {
        let img = run
            .scen
            .observable_at(&a_sched, grid.points()[i])
            .map_err(|e| physics_err("observable image", e))?;
        let eigs =
            sorted_eigenvalues(img.matrix()).map_err(|e| physics_err("eigenvalue solve", e))?;
        let gap = eigs
            .iter()
            .zip(eigs0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        spectrum = spectrum.max(gap / (1.0 + radius));
    }
    push_check(
        "spectrum_constancy",
        spectrum,
        thresholds,
        invariants,
        monitored,
    );

    let (coriolis, gen_norm) = coriolis_checks(ctx.schedule, ctx.omega0, grid.t0())?;
    push_check(
        "coriolis_consistency",
        coriolis,
        thresholds,
        invariants,
        monitored,
    );
    push_check(
        "generator_norm",
        gen_norm,
        thresholds,
        invariants,
        monitored,
    );

    let bracket = bracket_check(ctx.schedule, grid, cfg.integrator_dt, &mut rng)?;
    push_check(
        "bracket_conservation",
        bracket,
        thresholds,
        invariants,
        monitored,
    );
    Ok(())
}

fn driven_battery(
    ctx: &Context<'_>,
    run: &GeneralRun,
    grid: &TimeGrid,
    thresholds: &BTreeMap<String, f64>,
    invariants: &mut Vec<InvariantReport>,
    monitored: &mut Vec<Monitored>,
) -> CliResult<()> {
    let cfg = ctx.cfg;
    let mut rng = synth::rng(cfg.seed.wrapping_add(1));
    let samples = sample_indices(grid.len(), 9);

    let cross = cross_picture_batch(ctx, &mut rng, 100)?;
    push_check("cross_picture", cross, thresholds, invariants, monitored);

    push_check(
        "expectation_tracking",
        max_row_tracking(&run.rows),
        thresholds,
        invariants,
        monitored,
    );

    // A(t) from the pair equations stays similar to 𝔞 even when H(t)
    // moves, so its spectrum is pinned to the t₀ one.
    let a0 = run.pair[0]
        .a_op
        .as_ref()
        .expect("pair trajectory carries both operators");
    let eigs0 = sorted_eigenvalues(a0).map_err(|e| physics_err("eigenvalue solve", e))?;
    let radius = eigs0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut spectrum = 0.0f64;
    for &i in &samples {
        let a_t = run.pair[i]
            .a_op
            .as_ref()
            .expect("pair trajectory carries both operators");
        let eigs = sorted_eigenvalues(a_t).map_err(|e| physics_err("eigenvalue solve", e))?;
        let gap = eigs
            .iter()
            .zip(eigs0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        spectrum = spectrum.max(gap / (1.0 + radius));
    }
    push_check(
        "spectrum_constancy",
        spectrum,
        thresholds,
        invariants,
        monitored,
    );

    let (coriolis, gen_norm) = coriolis_checks(ctx.schedule, ctx.omega0, grid.t0())?;
    push_check(
        "coriolis_consistency",
        coriolis,
        thresholds,
        invariants,
        monitored,
    );
    push_check(
        "generator_norm",
        gen_norm,
        thresholds,
        invariants,
        monitored,
    );

    let bracket = bracket_check(ctx.schedule, grid, cfg.integrator_dt, &mut rng)?;
    push_check(
        "bracket_conservation",
        bracket,
        thresholds,
        invariants,
        monitored,
    );
    Ok(())
}

/// Worst disagreement — value gap or stray imaginary part — between the
/// S-frame and P-frame expectations over a seeded batch of (state,
/// observable) pairs at t₀.
fn cross_picture_batch(ctx: &Context<'_>, rng: &mut impl Rng, count: usize) -> CliResult<f64> {
    let dim = ctx.h_t0.dim();
    let mut worst = 0.0f64;
    for _ in 0..count {
        let psi = synth::random_state(rng, dim, Space::F);
        let a_p = Observable::p_space(synth::random_hermitian(rng, dim))
            .map_err(|e| physics_err("random observable", e))?;
        let a_f = make_compatible_initial(&a_p, ctx.omega0)
            .map_err(|e| physics_err("observable image", e))?;
        let (v_s, v_p) = cross_picture_expectation(&psi, &a_f, &a_p, ctx.theta0, ctx.omega0)
            .map_err(|e| physics_err("cross-picture expectation", e))?;
        worst = worst
            .max((v_s - v_p).norm())
            .max(v_s.im.abs())
            .max(v_p.im.abs());
    }
    Ok(worst)
}

/// Finite-difference recovery of the Coriolis term on a short auxiliary
/// trajectory: Σ_fd = iΩ⁻¹Ω̇ from a three-point stencil must reproduce H(t),
/// and the resulting generator G = H − Σ_fd must be numerically zero.
fn coriolis_checks(
    schedule: &HamiltonianSchedule,
    omega0: &DysonMap,
    t0: f64,
) -> CliResult<(f64, f64)> {
    let fine = TimeGrid::uniform(t0, t0 + 0.02, 1e-3).map_err(|e| physics_err("probe grid", e))?;
    let traj = integrate_dyson(omega0, schedule, &fine, 1e-4)
        .map_err(|e| physics_err("map integration", e))?;
    let n = traj.len();
    let mut worst_coriolis = 0.0f64;
    let mut worst_generator = 0.0f64;
    for &i in &[0, 1, n / 2, n - 2, n - 1] {
        let sigma_fd = coriolis_from_map(&traj, i, CoriolisMode::CentralDifference)
            .map_err(|e| physics_err("Coriolis reconstruction", e))?;
        let h_t = schedule.at(traj[i].t);
        worst_coriolis = worst_coriolis.max(rel_fro_gap(&sigma_fd, &h_t));
        let g = generator(&h_t, &sigma_fd).map_err(|e| physics_err("generator", e))?;
        worst_generator = worst_generator.max(g.norm_fro() / (1.0 + h_t.norm_fro()));
    }
    Ok((worst_coriolis, worst_generator))
}

/// Conservation of the bilinear bracket ⟨ψ̃|ψ⟩ under the doublet
/// i∂ₜψ = Gψ, i∂ₜψ̃ = G†ψ̃ with G = H(t) (the static-map limit of the
/// decomposition).
fn bracket_check(
    schedule: &HamiltonianSchedule,
    grid: &TimeGrid,
    dt: f64,
    rng: &mut impl Rng,
) -> CliResult<f64> {
    let g_sched = {
        let s = schedule.clone();
        MatrixSchedule::from_fn(
            move |t| s.at(t),
            "generator",
            schedule.smoothness(),
            grid.t0(),
        )
        .map_err(|e| physics_err("generator schedule", e))?
    };
    let dim = schedule.dim();
    let psi0 = synth::random_state(rng, dim, Space::F);
    let psi_tilde0 = synth::random_state(rng, dim, Space::F);
    let traj = schrodinger_f_space(&psi0, &psi_tilde0, &g_sched, grid, dt, None)
        .map_err(|e| physics_err("doublet integration", e))?;
    let bracket0 = traj[0]
        .2
        .inner(&traj[0].1)
        .map_err(|e| physics_err("bracket", e))?;
    // Both initial states are unit vectors, so the bracket's natural scale
    // is 1; normalize explicitly anyway to stay honest about it.
    let scale = (psi_tilde0.norm() * psi0.norm()).max(nhh_core::tol::NORM_GUARD);
    let mut worst = 0.0f64;
    for (_, psi, psi_tilde) in &traj {
        let bracket = psi_tilde
            .inner(psi)
            .map_err(|e| physics_err("bracket", e))?;
        worst = worst.max((bracket - bracket0).norm() / scale);
    }
    Ok(worst)
}
