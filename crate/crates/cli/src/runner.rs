//! Scenario execution: builds the configured model and metric, runs the
//! requested computation, and folds the time series into the invariant
//! report.
//!
//! The residual-to-column mapping is fixed (see [`crate::report::CSV_HEADER`]);
//! which columns are *checked* against thresholds and which are merely
//! monitored depends on the scenario, because a residual is only enforceable
//! where the underlying identity is a theorem. The metric is a constant of
//! stationary flows but not of driven ones; the instantaneous Hamiltonian is
//! guaranteed to be an observable at t₀ only, so the `h_observability`
//! threshold always refers to t₀ and the per-row values stay diagnostic.

use std::collections::BTreeMap;

use num_complex::Complex64;

use nhh_core::synth;
use nhh_core::{
    coupling_residual, dyson_from_metric, evolve_metric, integrate_dyson,
    integrate_heisenberg_pair, make_compatible_initial, mat_exp, pd_min_eig, quasi_herm_residual,
    rel_fro_gap, solve_metric, sorted_eigenvalues, to_p_space, ComplexMatrix, DysonMap,
    EvolutionState, Hamiltonian, HamiltonianSchedule, MatrixSchedule, MetricOperator,
    ModelInstance, Observable, Space, StateVector, StationaryScenario, TimeGrid,
};

use crate::config::{matrix_to_literal, MatrixLiteral, RunConfig, Scenario};
use crate::error::{config_err, physics_err, CliError, CliResult};
use crate::report::{InvariantReport, Monitored, Row, Summary};
use crate::verify;

/// Everything a single run produces before anything touches the filesystem.
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

/// Closed-form stationary computation plus the inputs a verify battery
/// reuses.
pub(crate) struct StationaryRun {
    pub rows: Vec<Row>,
    pub scen: StationaryScenario,
    pub psi: StateVector,
}

/// ODE-based general computation with the operator-pair trajectory the
/// verify battery samples again.
pub(crate) struct GeneralRun {
    pub rows: Vec<Row>,
    pub pair: Vec<EvolutionState>,
}

pub fn execute(cfg: &RunConfig, command: &str) -> CliResult<RunOutput> {
    let model = cfg.build_model()?;
    let driven = matches!(model, ModelInstance::Driven { .. });
    let label = model.label();
    let dim = model.dim();
    let schedule = match &model {
        ModelInstance::Static { hamiltonian, .. } => HamiltonianSchedule::constant(hamiltonian),
        ModelInstance::Driven { schedule } => schedule.clone(),
    };
    let h_t0 = Hamiltonian::new(schedule.at(cfg.t0), label.clone());
    let eigs = sorted_eigenvalues(h_t0.matrix()).map_err(|e| physics_err("eigenvalue solve", e))?;
    let eigenvalues_t0: Vec<[f64; 2]> = eigs.iter().map(|z| [z.re, z.im]).collect();

    if cfg.scenario == Scenario::Spectrum {
        let summary = summarize(
            cfg,
            command,
            &label,
            eigenvalues_t0,
            None,
            Vec::new(),
            Vec::new(),
            0,
        );
        return Ok(RunOutput {
            rows: Vec::new(),
            summary,
        });
    }
    if cfg.scenario == Scenario::Stationary && driven {
        return Err(CliError::Config(
            "scenario `stationary` requires a time-independent model; \
             use scenario `general` for driven schedules"
                .into(),
        ));
    }

    // Everything past this point needs the metric of H(t₀). A complex
    // spectrum or lost positivity surfaces here as a physics failure.
    let theta0 = solve_metric(&h_t0, cfg.weights(), nhh_core::tol::REAL_SPECTRUM_REL)
        .map_err(|e| physics_err("metric construction", e))?;
    let omega0 = dyson_from_metric(&theta0, cfg.dyson_mode.to_core())
        .map_err(|e| physics_err("Dyson factorization", e))?;
    let a_p = cfg.observable(dim)?;
    let thresholds = cfg.thresholds(driven);

    let mut invariants = Vec::new();
    let mut monitored = Vec::new();
    match cfg.scenario {
        Scenario::Spectrum => unreachable!("handled above"),
        Scenario::Metric => {
            // Degenerate time series: the single reporting point t₀.
            let grid = TimeGrid::new(vec![cfg.t0]).map_err(|e| config_err("time grid", e))?;
            let run = stationary_rows(&h_t0, &theta0, &omega0, &a_p, &grid, cfg.seed)?;
            push_t0_invariants(
                &h_t0,
                &theta0,
                &omega0,
                &thresholds,
                &mut invariants,
                &mut monitored,
            )?;
            fold_rows(&run.rows, &thresholds, &mut invariants, &mut monitored);
            let theta_lit: Option<MatrixLiteral> = Some(matrix_to_literal(theta0.theta()));
            let rows_written = run.rows.len();
            let summary = summarize(
                cfg,
                command,
                &label,
                eigenvalues_t0,
                theta_lit,
                invariants,
                monitored,
                rows_written,
            );
            Ok(RunOutput {
                rows: run.rows,
                summary,
            })
        }
        Scenario::Stationary => {
            let grid = grid_from(cfg)?;
            let run = stationary_rows(&h_t0, &theta0, &omega0, &a_p, &grid, cfg.seed)?;
            push_t0_invariants(
                &h_t0,
                &theta0,
                &omega0,
                &thresholds,
                &mut invariants,
                &mut monitored,
            )?;
            fold_rows(&run.rows, &thresholds, &mut invariants, &mut monitored);
            let rows_written = run.rows.len();
            let summary = summarize(
                cfg,
                command,
                &label,
                eigenvalues_t0,
                None,
                invariants,
                monitored,
                rows_written,
            );
            Ok(RunOutput {
                rows: run.rows,
                summary,
            })
        }
        Scenario::General => {
            let grid = grid_from(cfg)?;
            let run = general_rows(
                &schedule,
                &theta0,
                &omega0,
                &a_p,
                &grid,
                cfg.integrator_dt,
                cfg.seed,
            )?;
            push_t0_invariants(
                &h_t0,
                &theta0,
                &omega0,
                &thresholds,
                &mut invariants,
                &mut monitored,
            )?;
            fold_rows(&run.rows, &thresholds, &mut invariants, &mut monitored);
            let rows_written = run.rows.len();
            let summary = summarize(
                cfg,
                command,
                &label,
                eigenvalues_t0,
                None,
                invariants,
                monitored,
                rows_written,
            );
            Ok(RunOutput {
                rows: run.rows,
                summary,
            })
        }
        Scenario::Verify => verify::run(verify::Context {
            cfg,
            command,
            label: &label,
            driven,
            schedule: &schedule,
            h_t0: &h_t0,
            theta0: &theta0,
            omega0: &omega0,
            a_p: &a_p,
            eigenvalues_t0,
        }),
    }
}

pub(crate) fn grid_from(cfg: &RunConfig) -> CliResult<TimeGrid> {
    TimeGrid::uniform(cfg.t0, cfg.t_end, cfg.output_grid_step)
        .map_err(|e| config_err("time grid", e))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn summarize(
    cfg: &RunConfig,
    command: &str,
    label: &str,
    eigenvalues_t0: Vec<[f64; 2]>,
    theta_matrix: Option<MatrixLiteral>,
    invariants: Vec<InvariantReport>,
    monitored: Vec<Monitored>,
    rows_written: usize,
) -> Summary {
    let overall_pass = invariants.iter().all(|inv| inv.pass);
    Summary {
        command: command.to_string(),
        scenario: cfg.scenario.name().to_string(),
        model_label: label.to_string(),
        config: cfg.clone(),
        eigenvalues_t0,
        theta_matrix,
        invariants,
        monitored,
        rows_written,
        overall_pass,
    }
}

/// Appends a named check as an invariant when it carries a threshold and as
/// a monitored value otherwise.
pub(crate) fn push_check(
    name: &str,
    value: f64,
    thresholds: &BTreeMap<String, f64>,
    invariants: &mut Vec<InvariantReport>,
    monitored: &mut Vec<Monitored>,
) {
    match thresholds.get(name) {
        Some(&tol) => invariants.push(InvariantReport::new(name, value, tol)),
        None => monitored.push(Monitored {
            name: name.to_string(),
            value,
        }),
    }
}

/// The construction guarantees at t₀: Hermiticity and positivity of the
/// fresh metric, observability of H(t₀), and the factorization Θ = Ω†Ω.
pub(crate) fn push_t0_invariants(
    h_t0: &Hamiltonian,
    theta0: &MetricOperator,
    omega0: &DysonMap,
    thresholds: &BTreeMap<String, f64>,
    invariants: &mut Vec<InvariantReport>,
    monitored: &mut Vec<Monitored>,
) -> CliResult<()> {
    let herm = theta0.theta().herm_residual();
    let min_eig = theta0.min_eig();
    // Positivity as a residual: zero while the smallest eigenvalue is
    // positive, its magnitude once it is not — checked against threshold 0.
    let positivity = if min_eig > 0.0 {
        0.0
    } else {
        (-min_eig).max(f64::MIN_POSITIVE)
    };
    let observability = coupling_residual(h_t0.matrix(), &h_t0.matrix().dagger(), theta0.theta())
        .map_err(|e| physics_err("observability residual", e))?;
    let factorization = rel_fro_gap(&(&omega0.omega().dagger() * omega0.omega()), theta0.theta());
    for (name, value) in [
        ("metric_hermiticity", herm),
        ("metric_positivity", positivity),
        ("h_observability", observability),
        ("factorization", factorization),
    ] {
        push_check(name, value, thresholds, invariants, monitored);
    }
    Ok(())
}

/// NaN-propagating maximum: any NaN poisons the fold so a corrupt residual
/// fails its check instead of vanishing under `f64::max`'s NaN-ignoring.
fn strict_max(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, |acc, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v)
        }
    })
}

fn strict_min(values: impl Iterator<Item = f64>) -> f64 {
    -strict_max(values.map(|v| -v))
}

/// Folds per-row residuals into their maxima. Columns named in `thresholds`
/// become checked invariants; the rest are reported as monitored `_max`
/// values. `h_observability` is always monitored here — its threshold is
/// owned by the t₀ block. The smallest metric eigenvalue over the run is
/// monitored as well.
pub(crate) fn fold_rows(
    rows: &[Row],
    thresholds: &BTreeMap<String, f64>,
    invariants: &mut Vec<InvariantReport>,
    monitored: &mut Vec<Monitored>,
) {
    if rows.is_empty() {
        return;
    }
    type Pick = fn(&Row) -> f64;
    let columns: [(&str, Pick); 6] = [
        ("quasi_herm", |r| r.r_quasi_herm),
        ("conj_consistency", |r| r.r_conj_consistency),
        ("metric_const", |r| r.r_metric_const),
        ("partner_const", |r| r.r_partner_const),
        ("metric_factorization", |r| r.r_metric_factorization),
        ("h_observability", |r| r.r_h_observability),
    ];
    for (name, pick) in columns {
        let max = strict_max(rows.iter().map(pick));
        // h_observability's threshold is owned by the t₀ block, so the row
        // maximum never becomes an invariant here.
        match thresholds.get(name).filter(|_| name != "h_observability") {
            Some(&tol) => invariants.push(InvariantReport::new(name, max, tol)),
            None => monitored.push(Monitored {
                name: format!("{name}_max"),
                value: max,
            }),
        }
    }
    monitored.push(Monitored {
        name: "theta_min_eig_min".to_string(),
        value: strict_min(rows.iter().map(|r| r.theta_min_eig)),
    });
}

fn state_in(v: ndarray::Array1<Complex64>, space: Space) -> CliResult<StateVector> {
    StateVector::new(v, space).map_err(|e| physics_err("state assembly", e))
}

/// Unnormalized S-frame matrix element ⟨ψ|Θ·A|ψ⟩.
pub(crate) fn s_numerator(
    theta: &ComplexMatrix,
    a: &ComplexMatrix,
    psi: &StateVector,
) -> CliResult<Complex64> {
    let image = state_in((theta * a).apply(psi.as_array()), psi.space())?;
    psi.inner(&image).map_err(|e| physics_err("expectation", e))
}

/// Unnormalized S-frame normalizer ⟨ψ|Θ|ψ⟩.
pub(crate) fn s_normalizer(theta: &ComplexMatrix, psi: &StateVector) -> CliResult<Complex64> {
    let image = state_in(theta.apply(psi.as_array()), psi.space())?;
    psi.inner(&image).map_err(|e| physics_err("expectation", e))
}

/// Unnormalized P-frame matrix element ⟨φ|𝔞|φ⟩.
pub(crate) fn p_numerator(a_p: &ComplexMatrix, phi: &StateVector) -> CliResult<Complex64> {
    let image = state_in(a_p.apply(phi.as_array()), phi.space())?;
    phi.inner(&image).map_err(|e| physics_err("expectation", e))
}

/// Normalized P-frame expectation Re⟨φ|𝔞|φ⟩ / ⟨φ|φ⟩.
pub(crate) fn p_expectation(a_p: &ComplexMatrix, phi: &StateVector) -> CliResult<f64> {
    let num = p_numerator(a_p, phi)?;
    let den = phi.inner(phi).map_err(|e| physics_err("expectation", e))?;
    Ok((num / den).re)
}

/// Time series for a constant Hamiltonian via the closed-form propagators.
///
/// Every column is computed from at least two independent routes where the
/// formalism offers them: the observable image versus the †-transported
/// conjugate (conjugation consistency), the congruence-evolved metric versus
/// θ₀ (metric constancy), and the explicitly evolved map factorization
/// versus θ₀.
pub(crate) fn stationary_rows(
    h: &Hamiltonian,
    theta0: &MetricOperator,
    omega0: &DysonMap,
    a_p: &Observable,
    grid: &TimeGrid,
    seed: u64,
) -> CliResult<StationaryRun> {
    let scen = StationaryScenario::new(h.clone(), omega0.clone(), grid.t0())
        .map_err(|e| physics_err("stationary setup", e))?;
    let a_sched = MatrixSchedule::constant(a_p.matrix().clone(), "observable");
    let mut rng = synth::rng(seed);
    let psi = synth::random_state(&mut rng, h.dim(), Space::F);

    let h_dag = h.matrix().dagger();
    let omega0_inv = omega0
        .inverse()
        .map_err(|e| physics_err("map inversion", e))?;
    // A(t)† transported independently: e^{iτH†}·(Ω₀†𝔞Ω₀⁻†)·e^{−iτH†}.
    let conj_core = &(&omega0.omega().dagger() * a_p.matrix()) * &omega0_inv.dagger();
    let partner0 = scen
        .partner_h_at(grid.t0())
        .map_err(|e| physics_err("hermitization", e))?;

    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid.points() {
        let tau = t - grid.t0();
        let a_t = scen
            .observable_at(&a_sched, t)
            .map_err(|e| physics_err("observable image", e))?;
        let omega_t = scen
            .omega_at(t)
            .map_err(|e| physics_err("map evolution", e))?;
        let fwd_dag =
            mat_exp(&h_dag, Complex64::new(0.0, tau)).map_err(|e| physics_err("propagator", e))?;
        let bwd_dag =
            mat_exp(&h_dag, Complex64::new(0.0, -tau)).map_err(|e| physics_err("propagator", e))?;
        let bwd = mat_exp(h.matrix(), Complex64::new(0.0, -tau))
            .map_err(|e| physics_err("propagator", e))?;

        let a_dag_route = &(&fwd_dag * &conj_core) * &bwd_dag;
        let r_conj_consistency = rel_fro_gap(&a_dag_route, &a_t.matrix().dagger());

        // Θ(t) by the congruence e^{iτH†}·θ₀·e^{−iτH}; constancy is the claim.
        let theta_cong = &(&fwd_dag * theta0.theta()) * &bwd;
        let r_metric_const = rel_fro_gap(&theta_cong, theta0.theta());
        let r_h_observability = coupling_residual(h.matrix(), &h_dag, &theta_cong)
            .map_err(|e| physics_err("observability residual", e))?;
        let theta_min_eig =
            pd_min_eig(&theta_cong).map_err(|e| physics_err("metric eigenvalue", e))?;

        let partner_t = scen
            .partner_h_at(t)
            .map_err(|e| physics_err("hermitization", e))?;
        let r_partner_const = rel_fro_gap(partner_t.matrix(), partner0.matrix());

        let r_metric_factorization = rel_fro_gap(
            &(&omega_t.omega().dagger() * omega_t.omega()),
            theta0.theta(),
        );
        let r_quasi_herm =
            quasi_herm_residual(&a_t, theta0).map_err(|e| physics_err("coupling residual", e))?;

        let num_s = s_numerator(theta0.theta(), a_t.matrix(), &psi)?;
        let den_s = s_normalizer(theta0.theta(), &psi)?;
        let expectation_s = (num_s / den_s).re;
        let phi = to_p_space(&psi, &omega_t).map_err(|e| physics_err("map application", e))?;
        let expectation_p = p_expectation(a_p.matrix(), &phi)?;

        rows.push(Row {
            t,
            expectation_s,
            expectation_p,
            r_quasi_herm,
            r_conj_consistency,
            r_metric_const,
            r_partner_const,
            r_metric_factorization,
            r_h_observability,
            theta_min_eig,
        });
    }
    Ok(StationaryRun { rows, scen, psi })
}

/// Time series for a (possibly driven) Hamiltonian schedule via three
/// concurrently integrated equations: the map i∂ₜΩ = ΩH, the metric
/// i∂ₜΘ = ΘH − H†Θ, and the operator pair (A, A†). The columns measure the
/// redundancies between them: the pair's coupling (`r_quasi_herm`) and
/// conjugation (`r_conj_consistency`) theorems, and the factorization gap
/// between the independently evolved Θ and Ω†Ω (`r_metric_factorization`).
/// Metric and partner drift are reported for context — neither is conserved
/// once H(t) moves.
pub(crate) fn general_rows(
    schedule: &HamiltonianSchedule,
    theta0: &MetricOperator,
    omega0: &DysonMap,
    a_p: &Observable,
    grid: &TimeGrid,
    dt: f64,
    seed: u64,
) -> CliResult<GeneralRun> {
    let a0_f = make_compatible_initial(a_p, omega0)
        .map_err(|e| physics_err("initial observable image", e))?;
    let dyson = integrate_dyson(omega0, schedule, grid, dt)
        .map_err(|e| physics_err("map integration", e))?;
    let metric = evolve_metric(theta0, schedule, grid, dt)
        .map_err(|e| physics_err("metric evolution", e))?;
    let pair = integrate_heisenberg_pair(&a0_f, theta0, schedule, grid, dt, None)
        .map_err(|e| physics_err("operator-pair integration", e))?;
    let mut rng = synth::rng(seed);
    let psi = synth::random_state(&mut rng, schedule.dim(), Space::F);

    let omega0_inv = omega0
        .inverse()
        .map_err(|e| physics_err("map inversion", e))?;
    let partner0 = &(omega0.omega() * &schedule.at(grid.t0())) * &omega0_inv;

    let mut rows = Vec::with_capacity(grid.len());
    for (i, &t) in grid.points().iter().enumerate() {
        let map_state = &dyson[i];
        let theta_co = &metric[i].1;
        let pair_state = &pair[i];
        let omega_t = map_state
            .omega
            .as_ref()
            .expect("map trajectory carries the Dyson map");

        let r_quasi_herm = pair_state
            .coupling_residual()
            .expect("pair trajectory carries both operators")
            .map_err(|e| physics_err("coupling residual", e))?;
        let r_conj_consistency = pair_state
            .conjugation_residual()
            .expect("pair trajectory carries both operators");

        let r_metric_const = rel_fro_gap(theta_co.theta(), theta0.theta());
        let omega_t_inv = omega_t
            .checked_inv(nhh_core::tol::SINGULAR_COND)
            .map_err(|e| physics_err("map inversion", e))?;
        let partner_t = &(omega_t * &schedule.at(t)) * &omega_t_inv;
        let r_partner_const = rel_fro_gap(&partner_t, &partner0);

        let r_metric_factorization = rel_fro_gap(&(&omega_t.dagger() * omega_t), theta_co.theta());
        let r_h_observability = pair_state.observability_residual();
        let theta_min_eig = theta_co.min_eig();

        let a_t = pair_state
            .a_op
            .as_ref()
            .expect("pair trajectory carries both operators");
        let num_s = s_numerator(&pair_state.theta, a_t, &psi)?;
        let den_s = s_normalizer(&pair_state.theta, &psi)?;
        let expectation_s = (num_s / den_s).re;
        let phi = state_in(omega_t.apply(psi.as_array()), Space::P)?;
        let expectation_p = p_expectation(a_p.matrix(), &phi)?;

        rows.push(Row {
            t,
            expectation_s,
            expectation_p,
            r_quasi_herm,
            r_conj_consistency,
            r_metric_const,
            r_partner_const,
            r_metric_factorization,
            r_h_observability,
            theta_min_eig,
        });
    }
    Ok(GeneralRun { rows, pair })
}
