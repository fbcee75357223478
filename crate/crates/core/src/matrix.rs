//! Dense complex linear algebra: the operator carrier, state vectors, matrix
//! exponentials, biorthogonal eigendecompositions, and Hermitian square roots.
//!
//! Every operator in this crate (Hamiltonians, metrics, maps, observables) is
//! a [`ComplexMatrix`]; this module is the only place LAPACK is touched. All
//! kernels are pure functions of their inputs and safe to call concurrently.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array1, Array2};
use ndarray_linalg::{Cholesky, Eig, EigVals, Eigh, Inverse, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Which Hilbert space a vector or observable lives in: the physical textbook
/// space `P`, or the computationally friendly space `F` whose kets are shared
/// with the metric-weighted standard space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    P,
    F,
}

/// Dense square complex matrix, the universal operator carrier.
///
/// Invariants (enforced by [`ComplexMatrix::new`] and preserved by all
/// operations): square, dimension ≥ 1, all entries finite.
///
/// Arithmetic between matrices is provided on references (`&a + &b`,
/// `&a * &b`, …) and panics on dimension mismatch — public API entry points
/// validate dimensions and return [`Error::DimensionMismatch`] before any
/// arithmetic runs.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    m: Array2<Complex64>,
}

impl ComplexMatrix {
    /// Validates the carrier invariants: square, nonempty, finite.
    pub fn new(m: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = m.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::BadParams {
                reason: "matrix dimension must be at least 1".into(),
            });
        }
        let out = Self { m };
        if !out.is_finite() {
            return Err(Error::NonFinite {
                what: "matrix entries",
            });
        }
        Ok(out)
    }

    /// Builds from row data; every row must have the same length as there are
    /// rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Self::new(m)
    }

    /// Internal wrapper for values produced by arithmetic on already-valid
    /// matrices (stays square and, absent overflow, finite).
    fn wrap(m: Array2<Complex64>) -> Self {
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self::wrap(Array2::eye(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self::wrap(Array2::zeros((dim, dim)))
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        assert!(!entries.is_empty(), "matrix dimension must be at least 1");
        let mut m = Array2::zeros((entries.len(), entries.len()));
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        Self::wrap(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.m
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::wrap(self.m.t().mapv(|z| z.conj()))
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Self::wrap(self.m.mapv(|z| z.conj()))
    }

    pub fn mul_scalar(&self, s: Complex64) -> Self {
        Self::wrap(self.m.mapv(|z| z * s))
    }

    /// Frobenius norm — the crate-wide norm convention wherever a norm is
    /// left unqualified.
    pub fn norm_fro(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Relative Hermiticity defect ‖M − M†‖_F / max(‖M‖_F, guard).
    pub fn herm_residual(&self) -> f64 {
        let gap = (self - &self.dagger()).norm_fro();
        gap / self.norm_fro().max(tol::NORM_GUARD)
    }

    /// Symmetrized part (M + M†)/2.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.dagger()).mul_scalar(Complex64::new(0.5, 0.0))
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        assert_eq!(self.dim(), v.len(), "operator/vector dimension mismatch");
        self.m.dot(v)
    }

    /// Extreme singular values (σ_min, σ_max).
    pub fn singular_extremes(&self) -> Result<(f64, f64)> {
        let (_, sv, _) = self.m.svd(false, false)?;
        // LAPACK returns singular values in descending order.
        Ok((sv[sv.len() - 1], sv[0]))
    }

    /// Inverse via LU. Callers that must distinguish "singular as physics"
    /// should gate on [`ComplexMatrix::singular_extremes`] first; this maps
    /// backend failures to [`Error::Linalg`].
    pub fn inv(&self) -> Result<Self> {
        Ok(Self::wrap(self.m.inv()?))
    }

    /// Inverse guarded by a condition-number ceiling; exceeding it (or a
    /// backend failure) reports the map as singular.
    pub fn checked_inv(&self, max_cond: f64) -> Result<Self> {
        let (smin, smax) = self.singular_extremes()?;
        let cond = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(cond <= max_cond) {
            return Err(Error::SingularMap { cond });
        }
        self.m
            .inv()
            .map(Self::wrap)
            .map_err(|_| Error::SingularMap { cond })
    }

    /// Upper-triangular Cholesky factor U with M = U†·U (positive diagonal).
    pub(crate) fn cholesky_upper(&self) -> Result<Self> {
        match self.m.cholesky(UPLO::Upper) {
            Ok(u) => Ok(Self::wrap(u)),
            Err(_) => {
                let min_eig = pd_min_eig(self)?;
                Err(Error::NotPositiveDefinite { min_eig })
            }
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix(dim={})", self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.m[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        ComplexMatrix::wrap(&self.m + &rhs.m)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        ComplexMatrix::wrap(&self.m - &rhs.m)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        ComplexMatrix::wrap(self.m.dot(&rhs.m))
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::wrap(self.m.mapv(|z| -z))
    }
}

/// Relative Frobenius gap ‖a − b‖_F / max(‖b‖_F, guard).
pub fn rel_fro_gap(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm_fro() / b.norm_fro().max(tol::NORM_GUARD)
}

/// Complex column vector with its Hilbert-space tag. The physical P-space
/// vector |φ⟩ carries tag `P`; |ψ⟩ and |ψ̃⟩ live in `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    v: Array1<Complex64>,
    space: Space,
}

impl StateVector {
    pub fn new(v: Array1<Complex64>, space: Space) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::BadParams {
                reason: "state dimension must be at least 1".into(),
            });
        }
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                what: "state entries",
            });
        }
        Ok(Self { v, space })
    }

    pub fn from_slice(entries: &[Complex64], space: Space) -> Result<Self> {
        Self::new(Array1::from(entries.to_vec()), space)
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn as_array(&self) -> &Array1<Complex64> {
        &self.v
    }

    pub fn norm(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Plain (unweighted) inner product ⟨self|other⟩, conjugate-linear in the
    /// left slot.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .v
            .iter()
            .zip(other.v.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Unit-normalized copy; rejects zero-norm states.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= tol::NORM_GUARD {
            return Err(Error::BadParams {
                reason: "cannot normalize a zero-norm state".into(),
            });
        }
        Ok(Self {
            v: self.v.mapv(|z| z / n),
            space: self.space,
        })
    }
}

/// Matrix exponential e^{s·M}.
///
/// Uses the eigendecomposition route while the eigenvector basis is well
/// conditioned (all models in the unbroken phase are diagonalizable) and
/// falls back to Taylor scaling-and-squaring otherwise, which covers
/// neighborhoods of exceptional points. Relative accuracy ≤ 1e−12 for
/// well-conditioned inputs; the group property e^{sM}e^{uM} = e^{(s+u)M}
/// holds to 1e−10 at desk scale.
pub fn mat_exp(m: &ComplexMatrix, s: Complex64) -> Result<ComplexMatrix> {
    if !m.is_finite() || !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::NonFinite {
            what: "mat_exp input",
        });
    }
    let b = m.mul_scalar(s);
    if b.norm_fro() == 0.0 {
        return Ok(ComplexMatrix::identity(m.dim()));
    }
    if let Ok((vals, right, left, cond)) = eig_bi_with_cond(m, tol::EIG_CONDITION_REL) {
        if cond <= tol::EXP_EIG_MAX_COND {
            // e^{sM} = R · diag(e^{sλ}) · L†, and L† is the computed R⁻¹.
            let phases: Vec<Complex64> = vals.iter().map(|&l| (s * l).exp()).collect();
            let d = ComplexMatrix::diag(&phases);
            return Ok(&(&right * &d) * &left.dagger());
        }
    }
    Ok(exp_taylor(&b))
}

/// Scaling-and-squaring with a Taylor core: scale ‖B‖_F below 1/4, sum the
/// series to machine precision, square back up.
fn exp_taylor(b: &ComplexMatrix) -> ComplexMatrix {
    let norm = b.norm_fro();
    let k: u32 = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let c = b.mul_scalar(Complex64::new(0.5f64.powi(k as i32), 0.0));
    let mut sum = ComplexMatrix::identity(b.dim());
    let mut term = ComplexMatrix::identity(b.dim());
    for n in 1..=48u32 {
        term = (&term * &c).mul_scalar(Complex64::new(1.0 / f64::from(n), 0.0));
        sum = &sum + &term;
        if term.norm_fro() <= 1e-18 * sum.norm_fro() {
            break;
        }
    }
    let mut e = sum;
    for _ in 0..k {
        e = &e * &e;
    }
    e
}

/// Biorthogonal eigendecomposition.
///
/// Returns eigenvalues sorted by (Re, Im) together with matched right
/// eigenvectors (columns of `right`) and left eigenvectors (columns of
/// `left`, eigenvectors of M†), normalized so that left† · right = 1.
///
/// `tol` is the relative conditioning floor: the decomposition is rejected as
/// numerically defective when σ_min/σ_max of the right-eigenvector matrix is
/// not above it. Eigenvector phases are fixed deterministically (the
/// largest-modulus entry of each right column is rotated to the positive real
/// axis), so repeated calls and different LAPACK builds agree on the gauge.
pub fn eig_bi(
    m: &ComplexMatrix,
    tol: f64,
) -> Result<(Vec<Complex64>, ComplexMatrix, ComplexMatrix)> {
    let (vals, right, left, _) = eig_bi_with_cond(m, tol)?;
    Ok((vals, right, left))
}

pub(crate) fn eig_bi_with_cond(
    m: &ComplexMatrix,
    tol: f64,
) -> Result<(Vec<Complex64>, ComplexMatrix, ComplexMatrix, f64)> {
    if !m.is_finite() {
        return Err(Error::NonFinite {
            what: "eig_bi input",
        });
    }
    let (vals, vecs) = m.as_array().eig()?;
    let (_, sv, _) = vecs.svd(false, false)?;
    let smax = sv[0];
    let smin = sv[sv.len() - 1];
    if !(smin / smax > tol) {
        return Err(Error::DefectiveMatrix {
            cond: if smin > 0.0 {
                smax / smin
            } else {
                f64::INFINITY
            },
            tol,
        });
    }
    let n = m.dim();
    // Deterministic eigenpair order: sort by (Re λ, Im λ).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        (vals[a].re, vals[a].im)
            .partial_cmp(&(vals[b].re, vals[b].im))
            .expect("finite eigenvalues")
    });
    let mut sorted_vals = Vec::with_capacity(n);
    let mut right = Array2::<Complex64>::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        sorted_vals.push(vals[src]);
        // Phase gauge: rotate the largest-modulus entry (lowest index on
        // ties) onto the positive real axis.
        let mut pivot = 0usize;
        let mut best = -1.0f64;
        for i in 0..n {
            let a = vecs[(i, src)].norm();
            if a > best {
                best = a;
                pivot = i;
            }
        }
        let p = vecs[(pivot, src)];
        let phase = if p.norm() > 0.0 {
            p.conj() / p.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            right[(i, col)] = vecs[(i, src)] * phase;
        }
    }
    let right = ComplexMatrix::wrap(right);
    // Left eigenvectors as (R⁻¹)†: exactly biorthonormal against R by
    // construction, and genuine eigenvectors of M† when the spectrum pairs
    // off (M† R⁻†  = R⁻† diag(conj λ)).
    let rinv = right.inv()?;
    let left = rinv.dagger();
    Ok((sorted_vals, right, left, smax / smin))
}

/// Eigenvalues only, sorted by (Re, Im).
pub fn sorted_eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite {
            what: "eigenvalue input",
        });
    }
    let vals = m.as_array().eigvals()?;
    let mut out: Vec<Complex64> = vals.to_vec();
    out.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite eigenvalues")
    });
    Ok(out)
}

/// Unique Hermitian positive-definite square root S of P (S·S = P).
///
/// `tol` bounds both the accepted relative Hermiticity defect of `P` and the
/// absolute floor its minimal eigenvalue must clear.
pub fn herm_sqrt(p: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !p.is_finite() {
        return Err(Error::NonFinite {
            what: "herm_sqrt input",
        });
    }
    let residual = p.herm_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    let ph = p.hermitian_part();
    let (w, u) = ph.as_array().eigh(UPLO::Lower)?;
    let min_eig = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_eig > tol) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    // The LAPACK binding hands zheev the transposed buffer, which for a
    // Hermitian matrix is its conjugate, and returns the eigenvectors of that
    // conjugate. Conjugate them back so U·diag(w)·U† reproduces `ph` (the
    // eigenvalues are real and unaffected); `herm_sqrt_squares_back` guards
    // this convention against backend changes.
    let u = ComplexMatrix::wrap(u.mapv(|z| z.conj()));
    let roots: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x.sqrt(), 0.0)).collect();
    let d = ComplexMatrix::diag(&roots);
    Ok(&(&u * &d) * &u.dagger())
}

/// Minimal eigenvalue of the Hermitian part (M + M†)/2 — the positivity
/// certificate used for metrics.
pub fn pd_min_eig(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::NonFinite {
            what: "pd_min_eig input",
        });
    }
    let mh = m.hermitian_part();
    let w = mh.as_array().eigh(UPLO::Lower)?.0;
    Ok(w.iter().cloned().fold(f64::INFINITY, f64::min))
}
