//! Ready-made Hamiltonians, schedules, and observables used by tests and the
//! CLI: a PT-symmetric two-level system (closed-form spectrum, auditable by
//! hand), an asymmetric-hopping chain with a known diagonal Dyson map (for
//! dimensions beyond 2), a smoothly driven two-level schedule, and the usual
//! Pauli/occupation observables.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::metric::{DysonMap, DysonMode, Hamiltonian, Observable};
use crate::schedule::{HamiltonianSchedule, Smoothness};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Balanced gain–loss two-level Hamiltonian
/// H = [[iγ, s], [s, −iγ]], eigenvalues ±√(s²−γ²): real iff |s| ≥ |γ|.
///
/// Broken-phase parameters are legal here — metric construction is the stage
/// that rejects a complex spectrum. Parameters must be finite.
pub fn pt_two_level(gamma: f64, s: f64) -> Hamiltonian {
    Hamiltonian::new(
        ComplexMatrix::from_rows(&[
            vec![c(0.0, gamma), c(s, 0.0)],
            vec![c(s, 0.0), c(0.0, -gamma)],
        ])
        .expect("finite parameters"),
        format!("pt_two_level(gamma={gamma}, s={s})"),
    )
}

/// Asymmetric-hopping open chain: N×N tridiagonal with upper hopping
/// hop·(1+g), lower hopping hop·(1−g), zero diagonal. For |g| < 1 it is
/// similar to a Hermitian chain with hopping hop·√(1−g²) via the positive
/// diagonal map D = diag(r⁰, r¹, …), r = √((1+g)/(1−g)), which is returned
/// alongside as a reference Dyson map.
pub fn asym_chain(n: usize, hop: f64, g: f64) -> Result<(Hamiltonian, DysonMap)> {
    if n < 2 {
        return Err(Error::BadParams {
            reason: format!("chain needs at least 2 sites, got {n}"),
        });
    }
    if !(g.abs() < 1.0) || !hop.is_finite() {
        return Err(Error::BadParams {
            reason: format!("chain requires |g| < 1 and finite hop, got g = {g}, hop = {hop}"),
        });
    }
    let mut m = ndarray::Array2::zeros((n, n));
    for k in 0..n - 1 {
        m[(k, k + 1)] = c(hop * (1.0 + g), 0.0);
        m[(k + 1, k)] = c(hop * (1.0 - g), 0.0);
    }
    let h = Hamiltonian::new(
        ComplexMatrix::new(m)?,
        format!("asym_chain(n={n}, hop={hop}, g={g})"),
    );
    let r = ((1.0 + g) / (1.0 - g)).sqrt();
    let diag: Vec<Complex64> = (0..n).map(|k| c(r.powi(k as i32), 0.0)).collect();
    let map = DysonMap::new(ComplexMatrix::diag(&diag), DysonMode::General)?;
    Ok((h, map))
}

/// Smoothly driven two-level schedule H(t) = [[iγ(t), s], [s, −iγ(t)]] with
/// γ(t) = gamma0 + eps·sin(omega_drive·t). The precondition
/// |gamma0| + |eps| < |s| keeps the spectrum real for every t.
pub fn driven_pt(gamma0: f64, eps: f64, omega_drive: f64, s: f64) -> Result<HamiltonianSchedule> {
    for (name, v) in [
        ("gamma0", gamma0),
        ("eps", eps),
        ("omega_drive", omega_drive),
        ("s", s),
    ] {
        if !v.is_finite() {
            return Err(Error::BadParams {
                reason: format!("driven_pt parameter {name} must be finite, got {v}"),
            });
        }
    }
    if !(gamma0.abs() + eps.abs() < s.abs()) {
        return Err(Error::BadParams {
            reason: format!(
                "driven_pt needs |gamma0| + |eps| < |s| to stay in the unbroken phase; \
                 got |{gamma0}| + |{eps}| >= |{s}|"
            ),
        });
    }
    let smoothness = if eps == 0.0 {
        Smoothness::Constant
    } else {
        Smoothness::Smooth
    };
    HamiltonianSchedule::from_fn(
        move |t| {
            let gamma = gamma0 + eps * (omega_drive * t).sin();
            ComplexMatrix::from_rows(&[
                vec![c(0.0, gamma), c(s, 0.0)],
                vec![c(s, 0.0), c(0.0, -gamma)],
            ])
            .expect("finite parameters")
        },
        format!("driven_pt(gamma0={gamma0}, eps={eps}, omega_drive={omega_drive}, s={s})"),
        smoothness,
        0.0,
    )
}

/// Named Hermitian P-space observable at the given dimension. Presets:
/// `sigma_x`, `sigma_z` (dimension 2), and `site_occupation(k)` with 1-based
/// site index k.
pub fn preset_observable(name: &str, dim: usize) -> Result<Observable> {
    match name {
        "sigma_x" => {
            if dim != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: dim,
                });
            }
            Observable::p_space(
                ComplexMatrix::from_rows(&[
                    vec![c(0.0, 0.0), c(1.0, 0.0)],
                    vec![c(1.0, 0.0), c(0.0, 0.0)],
                ])
                .expect("fixed literal"),
            )
        }
        "sigma_z" => {
            if dim != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: dim,
                });
            }
            Observable::p_space(ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]))
        }
        _ => {
            let site = name
                .strip_prefix("site_occupation(")
                .and_then(|rest| rest.strip_suffix(')'))
                .and_then(|k| k.trim().parse::<usize>().ok())
                .ok_or_else(|| Error::UnknownPreset {
                    name: name.to_string(),
                })?;
            if site == 0 || site > dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: site,
                });
            }
            let mut diag = vec![c(0.0, 0.0); dim];
            diag[site - 1] = c(1.0, 0.0);
            Observable::p_space(ComplexMatrix::diag(&diag))
        }
    }
}

/// Model family selector for declarative construction (CLI configs, sweeps).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    PtTwoLevel,
    AsymChain,
    DrivenPt,
    CustomMatrix,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::PtTwoLevel => "pt_two_level",
            ModelKind::AsymChain => "asym_chain",
            ModelKind::DrivenPt => "driven_pt",
            ModelKind::CustomMatrix => "custom_matrix",
        }
    }
}

/// Declarative model description: a kind, its named real parameters, the
/// dimension, and (for `custom_matrix` only) an explicit matrix.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: BTreeMap<String, f64>,
    pub dim: usize,
    pub custom: Option<ComplexMatrix>,
}

/// A built model: either a fixed Hamiltonian (with a reference Dyson map
/// when the family carries a closed-form one) or a time-dependent schedule.
#[derive(Clone, Debug)]
pub enum ModelInstance {
    Static {
        hamiltonian: Hamiltonian,
        reference_dyson: Option<DysonMap>,
    },
    Driven {
        schedule: HamiltonianSchedule,
    },
}

impl ModelInstance {
    pub fn label(&self) -> String {
        match self {
            ModelInstance::Static { hamiltonian, .. } => hamiltonian.label().to_string(),
            ModelInstance::Driven { schedule } => schedule.label().to_string(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelInstance::Static { hamiltonian, .. } => hamiltonian.dim(),
            ModelInstance::Driven { schedule } => schedule.dim(),
        }
    }
}

impl ModelSpec {
    /// Validates the parameter map strictly — every required name present,
    /// nothing extra, all values finite — and builds the instance.
    pub fn build(&self) -> Result<ModelInstance> {
        let required: &[&str] = match self.kind {
            ModelKind::PtTwoLevel => &["gamma", "s"],
            ModelKind::AsymChain => &["hop", "g"],
            ModelKind::DrivenPt => &["gamma0", "eps", "omega_drive", "s"],
            ModelKind::CustomMatrix => &[],
        };
        for key in self.params.keys() {
            if !required.contains(&key.as_str()) {
                return Err(Error::BadParams {
                    reason: format!("unknown parameter `{key}` for {}", self.kind.name()),
                });
            }
        }
        let get = |name: &str| -> Result<f64> {
            let v = *self.params.get(name).ok_or_else(|| Error::BadParams {
                reason: format!("missing parameter `{name}` for {}", self.kind.name()),
            })?;
            if !v.is_finite() {
                return Err(Error::BadParams {
                    reason: format!("parameter `{name}` must be finite, got {v}"),
                });
            }
            Ok(v)
        };
        if self.kind != ModelKind::CustomMatrix && self.custom.is_some() {
            return Err(Error::BadParams {
                reason: format!("{} does not take an explicit matrix", self.kind.name()),
            });
        }
        match self.kind {
            ModelKind::PtTwoLevel => {
                if self.dim != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        got: self.dim,
                    });
                }
                Ok(ModelInstance::Static {
                    hamiltonian: pt_two_level(get("gamma")?, get("s")?),
                    reference_dyson: None,
                })
            }
            ModelKind::AsymChain => {
                let (hamiltonian, map) = asym_chain(self.dim, get("hop")?, get("g")?)?;
                Ok(ModelInstance::Static {
                    hamiltonian,
                    reference_dyson: Some(map),
                })
            }
            ModelKind::DrivenPt => {
                if self.dim != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        got: self.dim,
                    });
                }
                Ok(ModelInstance::Driven {
                    schedule: driven_pt(
                        get("gamma0")?,
                        get("eps")?,
                        get("omega_drive")?,
                        get("s")?,
                    )?,
                })
            }
            ModelKind::CustomMatrix => {
                let m = self.custom.clone().ok_or_else(|| Error::BadParams {
                    reason: "custom_matrix requires an explicit matrix".into(),
                })?;
                if m.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: m.dim(),
                    });
                }
                Ok(ModelInstance::Static {
                    hamiltonian: Hamiltonian::new(m, format!("custom_matrix(dim={})", self.dim)),
                    reference_dyson: None,
                })
            }
        }
    }
}
