//! Time grids and time-dependent operator schedules.
//!
//! Integrators in this crate advance between *reporting points* of a
//! [`TimeGrid`] using internal fixed sub-steps, so the grid controls where
//! results are recorded, not the integration accuracy. Operator-valued
//! time dependence (a Hamiltonian H(t), an observable 𝔞(t), its rate 𝔞̇(t),
//! a drive term K(t)) is carried by closure-backed schedules that evaluate
//! to a matrix at any requested time.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::metric::Hamiltonian;

/// Strictly increasing sequence of reporting times.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Validates finiteness and strict monotonicity. A single point is legal
    /// (a "grid" that only reports the initial condition).
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientPoints { needed: 1, got: 0 });
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite { what: "time grid" });
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadParams {
                reason: "time grid must be strictly increasing".into(),
            });
        }
        Ok(Self { points })
    }

    /// Uniform grid from `t0` to `t_end` with spacing as close to `step` as
    /// an integer subdivision allows. Both endpoints are hit exactly.
    pub fn uniform(t0: f64, t_end: f64, step: f64) -> Result<Self> {
        if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
            return Err(Error::BadParams {
                reason: format!("need t_end > t0, got t0 = {t0}, t_end = {t_end}"),
            });
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::BadParams {
                reason: format!("grid step must be positive, got {step}"),
            });
        }
        let span = t_end - t0;
        let n = (span / step).round().max(1.0) as usize;
        let mut points = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = if k == n {
                t_end
            } else {
                t0 + span * (k as f64) / (n as f64)
            };
            points.push(t);
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.points[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Declared regularity of a schedule. `Constant` lets integrators reuse one
/// evaluation everywhere; `Smooth` promises enough derivatives for
/// fourth-order stepping and finite-difference probes to make sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Constant,
    Smooth,
}

/// Matrix-valued function of time with a fixed dimension and a label.
///
/// Cloning is cheap (the evaluator is shared). Evaluation itself is
/// infallible by construction — builders must validate shape up front — but
/// integrators re-check finiteness of the values they consume.
#[derive(Clone)]
pub struct MatrixSchedule {
    eval: Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>,
    label: String,
    smoothness: Smoothness,
    dim: usize,
}

impl fmt::Debug for MatrixSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixSchedule")
            .field("label", &self.label)
            .field("smoothness", &self.smoothness)
            .field("dim", &self.dim)
            .finish()
    }
}

impl MatrixSchedule {
    /// Wraps an arbitrary evaluator. The closure must return a `dim`-square
    /// matrix for every time it is called with; the value at `probe_t` is
    /// checked once here to catch shape mistakes early.
    pub fn from_fn(
        eval: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
        label: impl Into<String>,
        smoothness: Smoothness,
        probe_t: f64,
    ) -> Result<Self> {
        let probe = eval(probe_t);
        let dim = probe.dim();
        if !probe.is_finite() {
            return Err(Error::NonFinite {
                what: "schedule probe value",
            });
        }
        Ok(Self {
            eval: Arc::new(eval),
            label: label.into(),
            smoothness,
            dim,
        })
    }

    /// Time-independent schedule pinned to one matrix.
    pub fn constant(value: ComplexMatrix, label: impl Into<String>) -> Self {
        let dim = value.dim();
        Self {
            eval: Arc::new(move |_| value.clone()),
            label: label.into(),
            smoothness: Smoothness::Constant,
            dim,
        }
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        (self.eval)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Hamiltonian-valued schedule H(t): a [`MatrixSchedule`] whose values are
/// meant to generate time evolution. The wrapper exists so signatures say
/// what the operator is for.
#[derive(Clone, Debug)]
pub struct HamiltonianSchedule {
    inner: MatrixSchedule,
}

impl HamiltonianSchedule {
    pub fn from_fn(
        eval: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
        label: impl Into<String>,
        smoothness: Smoothness,
        probe_t: f64,
    ) -> Result<Self> {
        Ok(Self {
            inner: MatrixSchedule::from_fn(eval, label, smoothness, probe_t)?,
        })
    }

    /// Freezes a fixed Hamiltonian into a constant schedule.
    pub fn constant(h: &Hamiltonian) -> Self {
        Self {
            inner: MatrixSchedule::constant(h.matrix().clone(), h.label()),
        }
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        self.inner.at(t)
    }

    pub fn label(&self) -> &str {
        self.inner.label()
    }

    pub fn smoothness(&self) -> Smoothness {
        self.inner.smoothness()
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }
}
