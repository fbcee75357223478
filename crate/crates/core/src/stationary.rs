//! Closed-form evolution for stationary generators.
//!
//! When the F-space Hamiltonian H is time-independent and the Dyson map is
//! required to obey i∂ₜΩ = ΩH, the map integrates in closed form,
//! Ω(t) = Ω(t₀)·e^{−i(t−t₀)H}, and everything downstream inherits explicit
//! formulas: the metric Θ(t) = Ω†(t)Ω(t) and the Hermitian partner
//! 𝔥(t) = Ω(t)HΩ(t)⁻¹ are constants of the motion, while a P-space
//! observable 𝔞(t) maps to the F-space image
//! A(t) = e^{i(t−t₀)H}·Ω(t₀)⁻¹·𝔞(t)·Ω(t₀)·e^{−i(t−t₀)H}.
//! The same image also solves the operator equation
//! i∂ₜA = AH − HA + K with the drive K(t) = Ω(t)⁻¹·(i𝔞̇(t))·Ω(t), which this
//! module integrates numerically so the closed form can be checked against
//! an independent path.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrate::rk4_path;
use crate::matrix::ComplexMatrix;
use crate::metric::{
    dyson_from_metric, hermitize, quasi_herm_residual, solve_metric, DysonMap, DysonMode,
    Hamiltonian, MetricOperator, Observable, PartnerHamiltonian,
};
use crate::schedule::{MatrixSchedule, Smoothness, TimeGrid};
use crate::tol;

/// Drive term K(t) = Ω(t)⁻¹·(i𝔞̇(t))·Ω(t): the price of a P-space observable
/// with explicit time dependence. Carries its evaluation time.
#[derive(Clone, Debug)]
pub struct DriveTerm {
    matrix: ComplexMatrix,
    t: f64,
}

impl DriveTerm {
    pub fn new(matrix: ComplexMatrix, t: f64) -> Result<Self> {
        if !matrix.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite { what: "drive term" });
        }
        Ok(Self { matrix, t })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Stationary-generator scenario: constant H, an initial Dyson map Ω(t₀),
/// the metric θ₀ = Ω(t₀)†Ω(t₀) it factorizes, and the reference time t₀.
///
/// Construction certifies the intertwining relation H†θ₀ = θ₀H (relative
/// residual below 1e−10) — the statement that H itself is an observable of
/// the metric theory. Everything else in the module assumes it.
#[derive(Clone, Debug)]
pub struct StationaryScenario {
    h: Hamiltonian,
    omega0: DysonMap,
    theta0: MetricOperator,
    t0: f64,
}

impl StationaryScenario {
    pub fn new(h: Hamiltonian, omega0: DysonMap, t0: f64) -> Result<Self> {
        if h.dim() != omega0.dim() {
            return Err(Error::DimensionMismatch {
                expected: omega0.dim(),
                got: h.dim(),
            });
        }
        if !t0.is_finite() {
            return Err(Error::NonFinite { what: "t0" });
        }
        let theta0 = omega0.metric()?;
        let residual = intertwining_residual(h.matrix(), theta0.theta());
        if residual > tol::INTERTWINING_REL {
            return Err(Error::InitialObservabilityViolated {
                residual,
                tol: tol::INTERTWINING_REL,
            });
        }
        Ok(Self {
            h,
            omega0,
            theta0,
            t0,
        })
    }

    /// Builds the scenario directly from a quasi-Hermitian Hamiltonian:
    /// metric from the spectral decomposition (optional weights), Dyson map
    /// in the requested factorization gauge.
    pub fn from_hamiltonian(
        h: Hamiltonian,
        weights: Option<&[f64]>,
        mode: DysonMode,
        t0: f64,
    ) -> Result<Self> {
        let theta = solve_metric(&h, weights, tol::REAL_SPECTRUM_REL)?;
        let omega = dyson_from_metric(&theta, mode)?;
        Self::new(h, omega, t0)
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }

    pub fn omega0(&self) -> &DysonMap {
        &self.omega0
    }

    pub fn theta0(&self) -> &MetricOperator {
        &self.theta0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// e^{−i(t−t₀)H} — the F-space propagator factor of the closed form.
    fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        crate::matrix::mat_exp(self.h.matrix(), Complex64::new(0.0, -(t - self.t0)))
    }

    /// Inverse propagator e^{+i(t−t₀)H}, evaluated directly rather than by
    /// matrix inversion.
    fn propagator_inv(&self, t: f64) -> Result<ComplexMatrix> {
        crate::matrix::mat_exp(self.h.matrix(), Complex64::new(0.0, t - self.t0))
    }

    /// Closed-form Dyson map Ω(t) = Ω(t₀)·e^{−i(t−t₀)H}.
    pub fn omega_at(&self, t: f64) -> Result<DysonMap> {
        let omega = self.omega0.omega() * &self.propagator(t)?;
        DysonMap::new(omega, DysonMode::General)
    }

    /// Metric at time t by the explicit product Θ(t) = Ω†(t)Ω(t). Equal to
    /// θ₀ up to roundoff — computed honestly so constancy can be *checked*
    /// rather than assumed.
    pub fn theta_at(&self, t: f64) -> Result<MetricOperator> {
        self.omega_at(t)?.metric()
    }

    /// Hermitian partner 𝔥(t) = Ω(t)·H·Ω(t)⁻¹, also a constant of the
    /// motion; evaluated freshly from Ω(t).
    pub fn partner_h_at(&self, t: f64) -> Result<PartnerHamiltonian> {
        hermitize(&self.h, &self.omega_at(t)?)
    }

    /// F-space image of a (possibly time-dependent) Hermitian P-space
    /// observable:
    /// A(t) = e^{i(t−t₀)H}·Ω(t₀)⁻¹·𝔞(t)·Ω(t₀)·e^{−i(t−t₀)H}.
    /// The result is certified quasi-Hermitian with respect to θ₀.
    pub fn observable_at(&self, a: &MatrixSchedule, t: f64) -> Result<Observable> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        let a_t = a.at(t);
        let residual = a_t.herm_residual();
        if residual > tol::HERMITICITY_STRICT {
            return Err(Error::NotHermitian {
                residual,
                tol: tol::HERMITICITY_STRICT,
            });
        }
        let omega0_inv = self.omega0.inverse()?;
        let core = &(&omega0_inv * &a_t) * self.omega0.omega();
        let image = &(&self.propagator_inv(t)? * &core) * &self.propagator(t)?;
        Observable::f_space(image, &self.theta0, tol::INITIAL_GATE)
    }

    /// Drive term K(t) = Ω(t)⁻¹·(i𝔞̇(t))·Ω(t). Pass the plain derivative
    /// 𝔞̇(t); the factor i is applied here.
    pub fn drive_term(&self, a_dot: &MatrixSchedule, t: f64) -> Result<DriveTerm> {
        if a_dot.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a_dot.dim(),
            });
        }
        let rate = a_dot.at(t).mul_scalar(Complex64::new(0.0, 1.0));
        let omega0_inv = self.omega0.inverse()?;
        // Ω(t)⁻¹·X·Ω(t) with Ω(t) = Ω₀e^{−iτH} expands to
        // e^{iτH}·Ω₀⁻¹·X·Ω₀·e^{−iτH}: no fresh inversion per call.
        let core = &(&omega0_inv * &rate) * self.omega0.omega();
        let k = &(&self.propagator_inv(t)? * &core) * &self.propagator(t)?;
        DriveTerm::new(k, t)
    }

    /// Packages [`Self::drive_term`] as a schedule for the operator-equation
    /// integrator.
    pub fn drive_schedule(&self, a_dot: &MatrixSchedule) -> Result<MatrixSchedule> {
        if a_dot.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a_dot.dim(),
            });
        }
        let scenario = self.clone();
        let a_dot = a_dot.clone();
        let label = format!("K[{}]", a_dot.label());
        MatrixSchedule::from_fn(
            move |t| {
                scenario
                    .drive_term(&a_dot, t)
                    // the scenario and schedule were validated at
                    // construction; only nonfinite blow-up can fail here, and
                    // the integrator's own finiteness guard is the backstop
                    .map(DriveTerm::into_matrix)
                    .unwrap_or_else(|_| {
                        ComplexMatrix::diag(&vec![Complex64::new(f64::NAN, 0.0); scenario.dim()])
                    })
            },
            label,
            Smoothness::Smooth,
            self.t0,
        )
    }

    /// Integrates the generalized operator equation
    /// i∂ₜA = AH − HA + K(t) from `a0` across `grid` with RK4 substeps of at
    /// most `dt`. `drive` supplies K(t) directly (e.g. from
    /// [`Self::drive_schedule`]); `None` means K ≡ 0. With K derived from the
    /// same 𝔞(t) that produced `a0`, the trajectory reproduces
    /// [`Self::observable_at`] pointwise up to integration error.
    pub fn integrate_eom(
        &self,
        a0: &Observable,
        drive: Option<&MatrixSchedule>,
        grid: &TimeGrid,
        dt: f64,
        budget: Option<f64>,
    ) -> Result<Vec<(f64, ComplexMatrix)>> {
        if a0.picture() != crate::matrix::Space::F {
            return Err(Error::InconsistentTriple {
                reason:
                    "the operator equation evolves the F-picture image; got a P-picture observable"
                        .into(),
            });
        }
        if a0.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a0.dim(),
            });
        }
        if let Some(k) = drive {
            if k.dim() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: k.dim(),
                });
            }
        }
        if (grid.t0() - self.t0).abs() > 1e-12 {
            return Err(Error::BadParams {
                reason: format!(
                    "operator-equation grid must start at the scenario time t0 = {}, got {}",
                    self.t0,
                    grid.t0()
                ),
            });
        }
        let residual = quasi_herm_residual(a0, &self.theta0)?;
        if residual > tol::INITIAL_GATE {
            return Err(Error::InitialCouplingViolated {
                residual,
                tol: tol::INITIAL_GATE,
            });
        }
        let h = self.h.matrix().as_array().clone();
        let minus_i = Complex64::new(0.0, -1.0);
        let path = rk4_path(
            vec![a0.matrix().as_array().clone()],
            grid,
            dt,
            budget,
            move |t, y| {
                let a = &y[0];
                let mut rate = a.dot(&h) - h.dot(a);
                if let Some(k) = drive {
                    rate += k.at(t).as_array();
                }
                vec![rate.mapv(|z| minus_i * z)]
            },
        )?;
        path.into_iter()
            .map(|(t, mut state)| Ok((t, ComplexMatrix::new(state.pop().unwrap())?)))
            .collect()
    }
}

/// Relative residual of H†Θ = ΘH.
pub(crate) fn intertwining_residual(h: &ComplexMatrix, theta: &ComplexMatrix) -> f64 {
    let gap = (&(&h.dagger() * theta) - &(theta * h)).norm_fro();
    gap / (theta.norm_fro() * h.norm_fro() + tol::NORM_GUARD)
}
