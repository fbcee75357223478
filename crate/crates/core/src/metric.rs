//! Metric construction and the three-Hilbert-space machinery.
//!
//! A non-Hermitian Hamiltonian H with a purely real spectrum can be made
//! self-adjoint by upgrading the inner product with a Hermitian positive
//! metric Θ satisfying the intertwining relation H†Θ = ΘH. Factorizing
//! Θ = Ω†Ω yields the (non-unitary) Dyson map Ω between the friendly space F
//! where H acts and the physical space P where 𝔥 = ΩHΩ⁻¹ is Hermitian.
//! This module builds Θ and Ω, hermitizes H into its isospectral partner,
//! and provides the metric inner product plus the cross-picture expectation
//! identities that make the F- and P-descriptions physically equivalent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{
    eig_bi, herm_sqrt, pd_min_eig, rel_fro_gap, ComplexMatrix, Space, StateVector,
};
use crate::tol;

/// F-space generator H, possibly non-Hermitian. Energy units (ħ = 1).
///
/// Construction accepts any finite square matrix — broken-phase Hamiltonians
/// are legal data; metric construction is where a complex spectrum gets
/// rejected.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    label: String,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Self {
        Self {
            matrix,
            label: label.into(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Hermitian positive-definite metric Θ with its cached positivity
/// certificate (the minimal eigenvalue found at construction).
#[derive(Clone, Debug)]
pub struct MetricOperator {
    theta: ComplexMatrix,
    min_eig: f64,
}

impl MetricOperator {
    /// Validates Hermiticity (relative defect ≤ 1e−12), symmetrizes the
    /// roundoff-level skew part away, and certifies positive definiteness.
    pub fn new(theta: ComplexMatrix) -> Result<Self> {
        let residual = theta.herm_residual();
        if residual > tol::HERMITICITY_STRICT {
            return Err(Error::NotHermitian {
                residual,
                tol: tol::HERMITICITY_STRICT,
            });
        }
        let theta = theta.hermitian_part();
        let min_eig = pd_min_eig(&theta)?;
        if !(min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        Ok(Self { theta, min_eig })
    }

    pub fn theta(&self) -> &ComplexMatrix {
        &self.theta
    }

    /// Positivity certificate: minimal eigenvalue at construction time.
    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }
}

/// How a Dyson map was produced. `PositiveRoot` and `Triangular` are the two
/// factorization gauges of [`dyson_from_metric`]; `General` marks maps that
/// arrive from elsewhere (closed-form evolution, reference constructions,
/// synthetic generators) and are neither Hermitian nor triangular.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DysonMode {
    PositiveRoot,
    Triangular,
    General,
}

/// Invertible, generally non-unitary map Ω with Θ = Ω†Ω.
#[derive(Clone, Debug)]
pub struct DysonMap {
    omega: ComplexMatrix,
    mode: DysonMode,
}

impl DysonMap {
    /// Validates invertibility: σ_max/σ_min must stay below 1e12.
    pub fn new(omega: ComplexMatrix, mode: DysonMode) -> Result<Self> {
        let (smin, smax) = omega.singular_extremes()?;
        let cond = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(cond < tol::SINGULAR_COND) {
            return Err(Error::SingularMap { cond });
        }
        Ok(Self { omega, mode })
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn mode(&self) -> DysonMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    /// Ω⁻¹, guarded by the same condition ceiling as construction.
    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.omega.checked_inv(tol::SINGULAR_COND)
    }

    /// The metric this map factorizes: Θ = Ω†Ω.
    pub fn metric(&self) -> Result<MetricOperator> {
        MetricOperator::new(&self.omega.dagger() * &self.omega)
    }
}

/// Hermitian P-space partner 𝔥 = ΩHΩ⁻¹, isospectral with its source.
#[derive(Clone, Debug)]
pub struct PartnerHamiltonian {
    h: ComplexMatrix,
}

impl PartnerHamiltonian {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }
}

/// Observable in either picture: Hermitian 𝔞 in P, or its quasi-Hermitian
/// F-space image A = Ω⁻¹𝔞Ω satisfying A†Θ = ΘA.
#[derive(Clone, Debug)]
pub struct Observable {
    matrix: ComplexMatrix,
    picture: Space,
}

impl Observable {
    /// P-space observable: must be Hermitian (relative defect ≤ 1e−12).
    pub fn p_space(matrix: ComplexMatrix) -> Result<Self> {
        let residual = matrix.herm_residual();
        if residual > tol::HERMITICITY_STRICT {
            return Err(Error::NotHermitian {
                residual,
                tol: tol::HERMITICITY_STRICT,
            });
        }
        Ok(Self {
            matrix,
            picture: Space::P,
        })
    }

    /// F-space observable: must be quasi-Hermitian with respect to the stated
    /// metric within `tol`.
    pub fn f_space(matrix: ComplexMatrix, theta: &MetricOperator, tol: f64) -> Result<Self> {
        if matrix.dim() != theta.dim() {
            return Err(Error::DimensionMismatch {
                expected: theta.dim(),
                got: matrix.dim(),
            });
        }
        let r = coupling_residual(&matrix, &matrix.dagger(), theta.theta())?;
        if r > tol {
            return Err(Error::InconsistentTriple {
                reason: format!(
                    "observable is not quasi-Hermitian w.r.t. the metric (residual {r:.3e} > {tol:.1e})"
                ),
            });
        }
        Ok(Self {
            matrix,
            picture: Space::F,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn picture(&self) -> Space {
        self.picture
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Builds the metric Θ = Σₙ cₙ|Lₙ⟩⟨Lₙ| from the left eigenvectors of H.
///
/// The weight freedom cₙ > 0 is physical: the intertwining relation fixes Θ
/// only up to it. `None` means all-ones, which reproduces the identity metric
/// in the Hermitian limit. `tol` is the reality tolerance on the spectrum:
/// any |Im λ| above `tol·(spectral radius + 1)` aborts with
/// [`Error::ComplexSpectrum`] carrying the offending eigenvalues — that is
/// the broken-phase signal, and no positive metric exists there.
pub fn solve_metric(h: &Hamiltonian, weights: Option<&[f64]>, tol: f64) -> Result<MetricOperator> {
    let (vals, _right, left) = eig_bi(h.matrix(), crate::tol::EIG_CONDITION_REL)?;
    let radius = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let offending: Vec<Complex64> = vals
        .iter()
        .copied()
        .filter(|z| z.im.abs() > tol * (radius + 1.0))
        .collect();
    if !offending.is_empty() {
        return Err(Error::ComplexSpectrum {
            eigenvalues: offending,
        });
    }
    let n = h.dim();
    let weights: Vec<f64> = match weights {
        None => vec![1.0; n],
        Some(w) => {
            if w.len() != n {
                return Err(Error::BadWeights {
                    reason: format!("expected {n} weights, got {}", w.len()),
                });
            }
            if let Some(&bad) = w.iter().find(|&&c| !(c > 0.0) || !c.is_finite()) {
                return Err(Error::BadWeights {
                    reason: format!("weights must be positive and finite, found {bad}"),
                });
            }
            w.to_vec()
        }
    };
    // Θ = L · diag(c) · L†, with the columns of L biorthonormal against the
    // right eigenvectors; unit weights then give exactly the inverse Gram
    // matrix of R, i.e. the identity in the Hermitian limit.
    let c: Vec<Complex64> = weights.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let theta = &(&left * &ComplexMatrix::diag(&c)) * &left.dagger();
    MetricOperator::new(theta.hermitian_part())
}

/// Factorizes Θ = Ω†Ω in the requested gauge: the Hermitian positive square
/// root (unique, the canonical choice), or the upper-triangular Cholesky
/// factor with positive real diagonal.
pub fn dyson_from_metric(theta: &MetricOperator, mode: DysonMode) -> Result<DysonMap> {
    let omega =
        match mode {
            DysonMode::PositiveRoot => herm_sqrt(theta.theta(), tol::HERMITICITY_STRICT)?,
            DysonMode::Triangular => theta.theta().cholesky_upper()?,
            DysonMode::General => return Err(Error::BadParams {
                reason:
                    "dyson_from_metric requires a factorization mode (positive-root or triangular)"
                        .into(),
            }),
        };
    DysonMap::new(omega, mode)
}

/// Similarity-transforms H into its Hermitian partner 𝔥 = ΩHΩ⁻¹.
///
/// Fails with [`Error::HermitizationFailed`] when the result is not Hermitian
/// within 1e−9 — the signature of a map that does not factorize a metric of
/// this Hamiltonian.
pub fn hermitize(h: &Hamiltonian, omega: &DysonMap) -> Result<PartnerHamiltonian> {
    if h.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            got: h.dim(),
        });
    }
    let omega_inv = omega.inverse()?;
    let partner = &(omega.omega() * h.matrix()) * &omega_inv;
    let residual = partner.herm_residual();
    if residual > tol::HERMITIZE_REL {
        return Err(Error::HermitizationFailed {
            residual,
            tol: tol::HERMITIZE_REL,
        });
    }
    Ok(PartnerHamiltonian { h: partner })
}

/// Metric inner product ⟨ψ₁|Θ|ψ₂⟩ — the physical product on F-space vectors.
pub fn s_inner(
    psi1: &StateVector,
    psi2: &StateVector,
    theta: &MetricOperator,
) -> Result<Complex64> {
    if psi1.dim() != psi2.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi1.dim(),
            got: psi2.dim(),
        });
    }
    if psi1.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            got: psi1.dim(),
        });
    }
    let weighted = theta.theta().apply(psi2.as_array());
    Ok(psi1
        .as_array()
        .iter()
        .zip(weighted.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Residual of the quasi-Hermiticity relation A†Θ = ΘA, normalized as
/// ‖A†Θ − ΘA‖_F / (‖Θ‖_F·‖A‖_F + guard).
pub fn quasi_herm_residual(a: &Observable, theta: &MetricOperator) -> Result<f64> {
    if a.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            got: a.dim(),
        });
    }
    coupling_residual(a.matrix(), &a.matrix().dagger(), theta.theta())
}

/// Generalized coupling residual ‖A‡Θ − ΘA‖_F / (‖Θ‖_F·‖A‖_F + guard) where
/// the conjugate A‡ is supplied independently — the live residual of paired
/// operator integrations, where A and A† evolve as separate unknowns.
pub fn coupling_residual(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    theta: &ComplexMatrix,
) -> Result<f64> {
    if a.dim() != theta.dim() || a_dag.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            got: if a.dim() != theta.dim() {
                a.dim()
            } else {
                a_dag.dim()
            },
        });
    }
    let gap = (&(a_dag * theta) - &(theta * a)).norm_fro();
    Ok(gap / (theta.norm_fro() * a.norm_fro() + tol::NORM_GUARD))
}

/// Evaluates the same expectation value in both pictures:
/// `value_S` = ⟨ψ|ΘA|ψ⟩/⟨ψ|Θ|ψ⟩ in the metric-weighted F-space description,
/// `value_P` = ⟨φ|𝔞|φ⟩/⟨φ|φ⟩ with φ = Ωψ in the physical space. For a
/// consistent (A, 𝔞, Θ, Ω) quadruple the two agree and are real — that is the
/// unitary equivalence of the two descriptions. Inconsistent inputs are
/// rejected rather than silently averaged over.
pub fn cross_picture_expectation(
    psi: &StateVector,
    a_f: &Observable,
    a_p: &Observable,
    theta: &MetricOperator,
    omega: &DysonMap,
) -> Result<(Complex64, Complex64)> {
    let n = theta.dim();
    if psi.dim() != n || a_f.dim() != n || a_p.dim() != n || omega.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: psi.dim(),
        });
    }
    if psi.space() != Space::F {
        return Err(Error::InconsistentTriple {
            reason: "expectation state must carry the F-space tag".into(),
        });
    }
    if a_f.picture() != Space::F || a_p.picture() != Space::P {
        return Err(Error::InconsistentTriple {
            reason: "observables must be (F-picture, P-picture) in that order".into(),
        });
    }
    let factorization = rel_fro_gap(&(&omega.omega().dagger() * omega.omega()), theta.theta());
    if factorization > tol::FACTORIZATION_REL {
        return Err(Error::InconsistentTriple {
            reason: format!(
                "metric does not factorize through the map: ‖Ω†Ω − Θ‖ residual {factorization:.3e}"
            ),
        });
    }
    // Image consistency A = Ω⁻¹𝔞Ω, checked multiplication-free as ΩA = 𝔞Ω.
    let image_gap = (&(omega.omega() * a_f.matrix()) - &(a_p.matrix() * omega.omega())).norm_fro()
        / (a_p.matrix().norm_fro() * omega.omega().norm_fro() + tol::NORM_GUARD);
    if image_gap > tol::CROSS_PICTURE {
        return Err(Error::InconsistentTriple {
            reason: format!(
                "F-picture observable is not the image of the P-picture one (residual {image_gap:.3e})"
            ),
        });
    }

    let theta_psi = theta.theta().apply(psi.as_array());
    let a_psi = a_f.matrix().apply(psi.as_array());
    let theta_a_psi = theta.theta().apply(&a_psi);
    let dot = |u: &ndarray::Array1<Complex64>, v: &ndarray::Array1<Complex64>| -> Complex64 {
        u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
    };
    let value_s = dot(psi.as_array(), &theta_a_psi) / dot(psi.as_array(), &theta_psi);

    let phi = omega.omega().apply(psi.as_array());
    let a_phi = a_p.matrix().apply(&phi);
    let value_p = dot(&phi, &a_phi) / dot(&phi, &phi);
    Ok((value_s, value_p))
}

/// Maps an F-space state to its physical image φ = Ωψ. The physical norm² of
/// the image equals the metric norm ⟨ψ|Θ|ψ⟩ of the source.
pub fn to_p_space(psi: &StateVector, omega: &DysonMap) -> Result<StateVector> {
    if psi.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            got: psi.dim(),
        });
    }
    if psi.space() != Space::F {
        return Err(Error::InconsistentTriple {
            reason: "to_p_space expects an F-space state".into(),
        });
    }
    let phi = omega.omega().apply(psi.as_array());
    StateVector::new(phi, Space::P)
}
