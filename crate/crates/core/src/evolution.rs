//! Non-stationary evolution: the Dyson-map ODE, the Coriolis term, the
//! generator decomposition, paired Heisenberg operator equations, and the
//! metric-evolution identity as a live residual.
//!
//! The working frame is the one in which wave functions are frozen and all
//! dynamics sits in operators: the state-evolution generator G = H − Σ is
//! constrained to vanish, which forces the Coriolis term Σ = iΩ⁻¹Ω̇ to equal
//! H(t) and turns the Dyson-map equation into i∂ₜΩ = ΩH. Observables then
//! obey the paired equations i∂ₜA = AH − HA and i∂ₜA† = A†H† − H†A†,
//! coupled only through their initial data A₀†θ₀ = θ₀A₀, while the metric
//! rides along via i∂ₜΘ = ΘH − H†Θ. Every redundancy in that system —
//! conjugation consistency, metric factorization, quasi-Hermiticity — is
//! exposed here as a measurable residual rather than assumed.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrate::rk4_path;
use crate::matrix::{pd_min_eig, rel_fro_gap, ComplexMatrix, Space, StateVector};
use crate::metric::{coupling_residual, DysonMap, MetricOperator, Observable};
use crate::schedule::{HamiltonianSchedule, MatrixSchedule, TimeGrid};
use crate::stationary::intertwining_residual;
use crate::tol;

/// Snapshot of the operator-side dynamics at one reporting time.
///
/// Different integrations fill different subsets: the Dyson-map ODE carries
/// the map (and derives the metric from it), the Heisenberg pair carries the
/// operator pair (and co-evolves the metric); `sigma` is the Coriolis term,
/// which in this frame is H(t) itself, and `generator_g` is the wave-function
/// generator G = H − Σ, identically zero here by construction.
#[derive(Clone, Debug)]
pub struct EvolutionState {
    pub t: f64,
    pub omega: Option<ComplexMatrix>,
    pub theta: ComplexMatrix,
    pub sigma: ComplexMatrix,
    pub generator_g: ComplexMatrix,
    pub a_op: Option<ComplexMatrix>,
    pub a_dag_op: Option<ComplexMatrix>,
}

impl EvolutionState {
    /// r₁(t): relative residual of A†Θ = ΘA using the independently evolved
    /// conjugate. `None` when the state carries no operator pair.
    pub fn coupling_residual(&self) -> Option<Result<f64>> {
        match (&self.a_op, &self.a_dag_op) {
            (Some(a), Some(ad)) => Some(coupling_residual(a, ad, &self.theta)),
            _ => None,
        }
    }

    /// r₂(t): relative gap ‖(A)† − A†‖ between the conjugate of the evolved
    /// A and the independently evolved A†.
    pub fn conjugation_residual(&self) -> Option<f64> {
        match (&self.a_op, &self.a_dag_op) {
            (Some(a), Some(ad)) => {
                let gap = (&a.dagger() - ad).norm_fro();
                Some(gap / ad.norm_fro().max(tol::NORM_GUARD))
            }
            _ => None,
        }
    }

    /// Residual of H†(t)Θ(t) = Θ(t)H(t): whether the instantaneous
    /// Hamiltonian is still an observable of the evolved metric. Monitored,
    /// never enforced — the theory requires it only at t₀.
    pub fn observability_residual(&self) -> f64 {
        intertwining_residual(&self.sigma, &self.theta)
    }

    /// ‖Ω†Ω − Θ‖/‖Θ‖ when the state carries a map.
    pub fn factorization_residual(&self) -> Option<f64> {
        self.omega
            .as_ref()
            .map(|om| rel_fro_gap(&(&om.dagger() * om), &self.theta))
    }

    /// Smallest eigenvalue of the (Hermitian part of the) metric.
    pub fn theta_min_eig(&self) -> Result<f64> {
        pd_min_eig(&self.theta)
    }
}

/// Integrates the Dyson-map equation i∂ₜΩ = ΩH(t) from `omega0` across
/// `grid` with RK4 substeps of at most `dt`.
///
/// The initial metric θ₀ = Ω₀†Ω₀ must make H(t₀) an observable (intertwining
/// residual below 1e−9), else [`Error::InitialObservabilityViolated`]. The
/// map's condition number is checked at every reporting point;
/// [`Error::SingularMap`] signals breakdown of the representation, not of the
/// integrator.
pub fn integrate_dyson(
    omega0: &DysonMap,
    h: &HamiltonianSchedule,
    grid: &TimeGrid,
    dt: f64,
) -> Result<Vec<EvolutionState>> {
    if h.dim() != omega0.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega0.dim(),
            got: h.dim(),
        });
    }
    let theta0 = omega0.metric()?;
    let h_t0 = h.at(grid.t0());
    let residual = intertwining_residual(&h_t0, theta0.theta());
    if residual > tol::INITIAL_GATE {
        return Err(Error::InitialObservabilityViolated {
            residual,
            tol: tol::INITIAL_GATE,
        });
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let path = rk4_path(
        vec![omega0.omega().as_array().clone()],
        grid,
        dt,
        None,
        |t, y| {
            let h_t = h.at(t);
            vec![y[0].dot(h_t.as_array()).mapv(|z| minus_i * z)]
        },
    )?;
    let n = omega0.dim();
    let mut out = Vec::with_capacity(path.len());
    for (t, mut state) in path {
        let omega = ComplexMatrix::new(state.pop().unwrap())?;
        let (smin, smax) = omega.singular_extremes()?;
        let cond = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(cond < tol::SINGULAR_COND) {
            return Err(Error::SingularMap { cond });
        }
        let theta = (&omega.dagger() * &omega).hermitian_part();
        let sigma = h.at(t);
        out.push(EvolutionState {
            t,
            omega: Some(omega),
            theta,
            sigma,
            generator_g: ComplexMatrix::zeros(n),
            a_op: None,
            a_dag_op: None,
        });
    }
    Ok(out)
}

/// How to reconstruct the Coriolis term Σ = iΩ⁻¹Ω̇ from a map trajectory.
#[derive(Clone, Copy)]
pub enum CoriolisMode<'a> {
    /// Use the map equation itself: Ω̇ = −iΩH makes Σ = H(t) identically.
    Exact(&'a HamiltonianSchedule),
    /// Differentiate the stored trajectory with a three-point stencil
    /// (central in the interior, one-sided at the ends) — an independent
    /// measurement of Σ, accurate to O(step²).
    CentralDifference,
}

impl std::fmt::Debug for CoriolisMode<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoriolisMode::Exact(_) => f.write_str("Exact"),
            CoriolisMode::CentralDifference => f.write_str("CentralDifference"),
        }
    }
}

/// Three-point Lagrange derivative weights at `x` for nodes `(x0, x1, x2)`.
fn stencil_weights(x: f64, x0: f64, x1: f64, x2: f64) -> [f64; 3] {
    let w0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    let w1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    let w2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    [w0, w1, w2]
}

/// Coriolis term Σ at one grid position of a Dyson-map trajectory.
pub fn coriolis_from_map(
    traj: &[EvolutionState],
    index: usize,
    mode: CoriolisMode<'_>,
) -> Result<ComplexMatrix> {
    let state = traj.get(index).ok_or_else(|| Error::BadParams {
        reason: format!("index {index} outside trajectory of length {}", traj.len()),
    })?;
    match mode {
        CoriolisMode::Exact(h) => Ok(h.at(state.t)),
        CoriolisMode::CentralDifference => {
            if traj.len() < 3 {
                return Err(Error::InsufficientPoints {
                    needed: 3,
                    got: traj.len(),
                });
            }
            // pick the stencil: centered where possible, shifted at the ends
            let lo = index.saturating_sub(1).min(traj.len() - 3);
            let nodes = [&traj[lo], &traj[lo + 1], &traj[lo + 2]];
            let omegas: Vec<&ComplexMatrix> = nodes
                .iter()
                .map(|s| {
                    s.omega.as_ref().ok_or_else(|| Error::BadParams {
                        reason: "trajectory carries no Dyson maps to differentiate".into(),
                    })
                })
                .collect::<Result<_>>()?;
            let w = stencil_weights(state.t, nodes[0].t, nodes[1].t, nodes[2].t);
            let mut deriv = omegas[0].mul_scalar(Complex64::new(w[0], 0.0));
            deriv = &deriv + &omegas[1].mul_scalar(Complex64::new(w[1], 0.0));
            deriv = &deriv + &omegas[2].mul_scalar(Complex64::new(w[2], 0.0));
            let omega_inv = state
                .omega
                .as_ref()
                .ok_or_else(|| Error::BadParams {
                    reason: "trajectory carries no Dyson maps to differentiate".into(),
                })?
                .checked_inv(tol::SINGULAR_COND)?;
            Ok((&omega_inv * &deriv).mul_scalar(Complex64::new(0.0, 1.0)))
        }
    }
}

/// Wave-function generator G = H − Σ. Zero in this frame by construction;
/// computing it from a finite-difference Σ measures how well the trajectory
/// satisfies the constraint.
pub fn generator(h_t: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    if h_t.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_t.dim(),
            got: sigma.dim(),
        });
    }
    Ok(h_t - sigma)
}

/// Integrates the paired Heisenberg equations
/// i∂ₜA = AH − HA and i∂ₜA† = A†H† − H†A†
/// as two independent unknowns, co-evolving the metric via
/// i∂ₜΘ = ΘH − H†Θ. The pair is coupled only through its initial data: the
/// gate quasi-Hermiticity A₀†θ₀ = θ₀A₀ must hold within 1e−9
/// ([`Error::InitialCouplingViolated`] otherwise). Everything the equations
/// are supposed to preserve — coupling r₁, conjugation consistency r₂ —
/// is left observable on the returned states.
pub fn integrate_heisenberg_pair(
    a0: &Observable,
    theta0: &MetricOperator,
    h: &HamiltonianSchedule,
    grid: &TimeGrid,
    dt: f64,
    budget: Option<f64>,
) -> Result<Vec<EvolutionState>> {
    if a0.picture() != Space::F {
        return Err(Error::InconsistentTriple {
            reason: "the Heisenberg pair evolves F-picture operators; got a P-picture observable"
                .into(),
        });
    }
    if a0.dim() != theta0.dim() || h.dim() != theta0.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta0.dim(),
            got: if a0.dim() != theta0.dim() {
                a0.dim()
            } else {
                h.dim()
            },
        });
    }
    let residual = coupling_residual(a0.matrix(), &a0.matrix().dagger(), theta0.theta())?;
    if residual > tol::INITIAL_GATE {
        return Err(Error::InitialCouplingViolated {
            residual,
            tol: tol::INITIAL_GATE,
        });
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let path = rk4_path(
        vec![
            a0.matrix().as_array().clone(),
            a0.matrix().dagger().as_array().clone(),
            theta0.theta().as_array().clone(),
        ],
        grid,
        dt,
        budget,
        |t, y| {
            let h_t = h.at(t);
            let h_arr = h_t.as_array();
            let h_dag = h_t.dagger();
            let h_dag_arr = h_dag.as_array();
            let (a, ad, th) = (&y[0], &y[1], &y[2]);
            vec![
                (a.dot(h_arr) - h_arr.dot(a)).mapv(|z| minus_i * z),
                (ad.dot(h_dag_arr) - h_dag_arr.dot(ad)).mapv(|z| minus_i * z),
                (th.dot(h_arr) - h_dag_arr.dot(th)).mapv(|z| minus_i * z),
            ]
        },
    )?;
    let n = theta0.dim();
    path.into_iter()
        .map(|(t, state)| {
            let [a, ad, th]: [_; 3] = state.try_into().expect("three-component state");
            Ok(EvolutionState {
                t,
                omega: None,
                theta: ComplexMatrix::new(th)?,
                sigma: h.at(t),
                generator_g: ComplexMatrix::zeros(n),
                a_op: Some(ComplexMatrix::new(a)?),
                a_dag_op: Some(ComplexMatrix::new(ad)?),
            })
        })
        .collect()
}

/// Integrates the metric-evolution identity i∂ₜΘ = ΘH − H†Θ on its own.
///
/// The exact flow is a congruence Θ(t) = V†θ₀V, so positivity is conserved;
/// a computed metric whose smallest eigenvalue reaches zero therefore means
/// the *numerical* representation has left the physical regime (exponential
/// condition growth, coarse steps), and that is reported as
/// [`Error::PositivityLost`] with the first offending grid time.
pub fn evolve_metric(
    theta0: &MetricOperator,
    h: &HamiltonianSchedule,
    grid: &TimeGrid,
    dt: f64,
) -> Result<Vec<(f64, MetricOperator)>> {
    if h.dim() != theta0.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta0.dim(),
            got: h.dim(),
        });
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let path = rk4_path(
        vec![theta0.theta().as_array().clone()],
        grid,
        dt,
        None,
        |t, y| {
            let h_t = h.at(t);
            let h_arr = h_t.as_array();
            let h_dag = h_t.dagger();
            vec![(y[0].dot(h_arr) - h_dag.as_array().dot(&y[0])).mapv(|z| minus_i * z)]
        },
    )?;
    path.into_iter()
        .map(|(t, mut state)| {
            let theta = ComplexMatrix::new(state.pop().unwrap())?;
            let min_eig = pd_min_eig(&theta)?;
            if !(min_eig > 0.0) {
                return Err(Error::PositivityLost { t, min_eig });
            }
            // the flow preserves Hermiticity structurally; symmetrizing here
            // only removes roundoff skew before re-certifying
            Ok((t, MetricOperator::new(theta.hermitian_part())?))
        })
        .collect()
}

/// Manufactures initial data for the Heisenberg pair: the F-space image
/// A₀ = Ω₀⁻¹·𝔞·Ω₀ of a Hermitian P-space observable, which satisfies the
/// initial coupling with θ₀ = Ω₀†Ω₀ by construction (certified to 1e−10).
pub fn make_compatible_initial(a: &Observable, omega0: &DysonMap) -> Result<Observable> {
    if a.picture() != Space::P {
        return Err(Error::InconsistentTriple {
            reason: "make_compatible_initial expects a P-picture (Hermitian) observable".into(),
        });
    }
    if a.dim() != omega0.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega0.dim(),
            got: a.dim(),
        });
    }
    let omega0_inv = omega0.inverse()?;
    let image = &(&omega0_inv * a.matrix()) * omega0.omega();
    let theta0 = omega0.metric()?;
    Observable::f_space(image, &theta0, tol::FACTORIZATION_REL)
}

/// Integrates the doublet of F-space Schrödinger equations
/// i∂ₜψ = Gψ and i∂ₜψ̃ = G†ψ̃ for a given generator schedule. In this frame
/// G ≡ 0 and both states are constant; the op exists to exercise the general
/// decomposition (e.g. the static-map limit Σ = 0, G = H), where the
/// bilinear bracket ⟨ψ̃|ψ⟩ is the conserved quantity.
pub fn schrodinger_f_space(
    psi0: &StateVector,
    psi_tilde0: &StateVector,
    g: &MatrixSchedule,
    grid: &TimeGrid,
    dt: f64,
    budget: Option<f64>,
) -> Result<Vec<(f64, StateVector, StateVector)>> {
    if psi0.space() != Space::F || psi_tilde0.space() != Space::F {
        return Err(Error::InconsistentTriple {
            reason: "Schrödinger doublet evolves F-space states".into(),
        });
    }
    if psi0.dim() != g.dim() || psi_tilde0.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: psi0.dim().max(psi_tilde0.dim()),
        });
    }
    let n = g.dim();
    let col = |v: &StateVector| {
        let mut m = ndarray::Array2::zeros((n, 1));
        for (i, z) in v.as_array().iter().enumerate() {
            m[(i, 0)] = *z;
        }
        m
    };
    let minus_i = Complex64::new(0.0, -1.0);
    let path = rk4_path(
        vec![col(psi0), col(psi_tilde0)],
        grid,
        dt,
        budget,
        |t, y| {
            let g_t = g.at(t);
            let g_arr = g_t.as_array();
            let g_dag = g_t.dagger();
            vec![
                g_arr.dot(&y[0]).mapv(|z| minus_i * z),
                g_dag.as_array().dot(&y[1]).mapv(|z| minus_i * z),
            ]
        },
    )?;
    path.into_iter()
        .map(|(t, state)| {
            let [psi, psi_tilde]: [_; 2] = state.try_into().expect("two-component state");
            let unpack =
                |m: ndarray::Array2<Complex64>| StateVector::new(m.column(0).to_owned(), Space::F);
            Ok((t, unpack(psi)?, unpack(psi_tilde)?))
        })
        .collect()
}
