//! Seeded generators for synthetic test fixtures: random states, Hermitian
//! matrices, Haar-ish unitaries, well-conditioned Dyson maps, and
//! quasi-Hermitian Hamiltonians built as H = Ω⁻¹𝔥Ω so the exact metric is
//! known by construction.
//!
//! Everything is driven by an explicit seed through a fixed-algorithm stream
//! cipher, so randomized suites are reproducible bit for bit across runs and
//! platforms.

use ndarray::{Array1, Array2};
use ndarray_linalg::QR;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::matrix::{ComplexMatrix, Space, StateVector};
use crate::metric::{DysonMap, DysonMode, Hamiltonian};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized random state with complex-Gaussian entries.
pub fn random_state(rng: &mut impl Rng, dim: usize, space: Space) -> StateVector {
    let v: Array1<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    StateVector::new(v, space)
        .and_then(|s| s.normalized())
        .expect("Gaussian state is finite and nonzero")
}

fn gaussian_matrix(rng: &mut impl Rng, dim: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((dim, dim), |_| gaussian(rng))
}

/// Random Hermitian matrix (A + A†)/2 with complex-Gaussian A.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::new(gaussian_matrix(rng, dim))
        .expect("Gaussian matrix is finite")
        .hermitian_part()
}

/// Random unitary: QR of a complex Gaussian matrix with the phase gauge
/// fixed so R's diagonal is positive — the standard Haar construction, and
/// deterministic for a deterministic generator.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> Result<ComplexMatrix> {
    let (q, r) = gaussian_matrix(rng, dim).qr()?;
    let mut q = q;
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix::new(q)
}

/// Random invertible map with singular values drawn uniformly from
/// [0.6, 1.6]: condition number at most 8/3, far from both unitarity and
/// breakdown.
pub fn random_well_conditioned_map(rng: &mut impl Rng, dim: usize) -> Result<DysonMap> {
    let u = random_unitary(rng, dim)?;
    let v = random_unitary(rng, dim)?;
    let sigma: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(0.6..1.6), 0.0))
        .collect();
    let omega = &(&u * &ComplexMatrix::diag(&sigma)) * &v.dagger();
    DysonMap::new(omega, DysonMode::General)
}

/// Quasi-Hermitian Hamiltonian with a known exact metric: H = Ω⁻¹𝔥Ω for a
/// random Hermitian 𝔥 and a random well-conditioned Ω, returned together.
/// By construction H has a real spectrum and H†(Ω†Ω) = (Ω†Ω)H.
pub fn random_quasi_hermitian(
    rng: &mut impl Rng,
    dim: usize,
    seed_label: u64,
) -> Result<(Hamiltonian, DysonMap)> {
    let h_p = random_hermitian(rng, dim);
    let omega = random_well_conditioned_map(rng, dim)?;
    let omega_inv = omega.inverse()?;
    let h = &(&omega_inv * &h_p) * omega.omega();
    Ok((
        Hamiltonian::new(h, format!("synthetic(dim={dim}, seed={seed_label})")),
        omega,
    ))
}
