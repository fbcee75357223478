//! Default tolerances, centralized so every module and the CLI agree on what
//! "numerically zero" means at desk scale (dims ≲ 64, ‖H‖·T ≲ 20, f64).
//!
//! All residuals are Frobenius-norm based and relative unless a constant says
//! otherwise. The values separate three regimes: machine-precision identities
//! (1e−12…1e−10), closed-form evaluations compounded over a trajectory
//! (1e−9…1e−8), and fixed-step RK4 trajectories at dt ≤ 1e−3 (1e−7…1e−6).

/// Relative bound on |Im λ| (scaled by spectral radius + 1) below which a
/// spectrum counts as real. Separates the unbroken from the broken phase
/// decisively: genuine breakings produce imaginary parts of order ‖H‖, while
/// roundoff on a diagonalizable real-spectrum matrix stays near 1e−14.
pub const REAL_SPECTRUM_REL: f64 = 1e-9;

/// Relative conditioning floor σ_min/σ_max for the right-eigenvector matrix;
/// below it a matrix is treated as numerically defective. 1e−9 sits well
/// between physical near-degeneracy and eigensolver noise at dims ≤ 64.
pub const EIG_CONDITION_REL: f64 = 1e-9;

/// Hermiticity demanded of metrics and P-space observables, ‖M−M†‖/‖M‖.
pub const HERMITICITY_STRICT: f64 = 1e-12;

/// Intertwining residual ‖H†Θ − ΘH‖_F/‖Θ‖_F accepted for a freshly built
/// metric: the construction satisfies it algebraically, so only roundoff
/// (weighted by eigenvector conditioning) remains.
pub const INTERTWINING_REL: f64 = 1e-10;

/// Factorization residual ‖Ω†Ω − Θ‖_F/‖Θ‖_F for Dyson maps built directly
/// from a metric.
pub const FACTORIZATION_REL: f64 = 1e-10;

/// Hermiticity residual beyond which a similarity transform is declared
/// inconsistent with the Hamiltonian (hermitization failure).
pub const HERMITIZE_REL: f64 = 1e-9;

/// Sorted-eigenvalue agreement between a Hamiltonian and its Hermitian
/// partner, scaled by (spectral radius + 1).
pub const ISOSPECTRAL_REL: f64 = 1e-9;

/// Drift allowed in the metric along a stationary flow (closed-form
/// exponentials compound roundoff over ‖H‖·T ≤ 20).
pub const METRIC_CONSTANCY_REL: f64 = 1e-8;

/// Drift allowed in the partner Hamiltonian along a stationary flow.
pub const PARTNER_CONSTANCY_REL: f64 = 1e-8;

/// Residual budget for RK4-integrated operator identities (coupling and
/// conjugation consistency) at dt ≤ 1e−3 over ‖H‖·T ≤ 20.
pub const THEOREM_RESIDUAL: f64 = 1e-6;

/// Agreement demanded between the two sides of a cross-picture expectation
/// and on their imaginary parts.
pub const CROSS_PICTURE: f64 = 1e-9;

/// Gate on the intertwining/coupling residual at t₀ before an integration is
/// allowed to start.
pub const INITIAL_GATE: f64 = 1e-9;

/// Condition number at which a map counts as singular (σ_max/σ_min).
pub const SINGULAR_COND: f64 = 1e12;

/// Above this right-eigenvector condition number the matrix exponential
/// abandons the eigendecomposition route (accuracy ~ κ·ε would exceed 1e−12)
/// and falls back to scaling-and-squaring.
pub const EXP_EIG_MAX_COND: f64 = 1e4;

/// Denominator guard for relative residuals of possibly tiny operators.
pub const NORM_GUARD: f64 = 1e-300;
