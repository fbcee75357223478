//! Numerical toolkit for quasi-Hermitian quantum mechanics on
//! finite-dimensional Hilbert spaces, built around the Heisenberg
//! representation of non-Hermitian Hamiltonians.
//!
//! A Hamiltonian H that is non-Hermitian in the working ("friendly") space F
//! can still generate unitary physics when a Hermitian positive-definite
//! metric Θ exists with H†Θ = ΘH. Factorizing Θ = Ω†Ω produces the Dyson map
//! Ω onto the physical space P, where 𝔥 = ΩHΩ⁻¹ is an ordinary Hermitian
//! Hamiltonian. This crate implements that dictionary and the dynamical
//! frame in which wave functions are frozen and operators move:
//!
//! * **Kernels** ([`matrix`]): dense complex matrices, the exponential,
//!   biorthogonal eigendecomposition, Hermitian square root.
//! * **Statics** ([`metric`]): metric construction from the spectral
//!   decomposition, Dyson factorization in two gauges, hermitization,
//!   the metric inner product, and cross-picture expectation values.
//! * **Stationary dynamics** ([`stationary`]): for constant H the map
//!   evolves in closed form, Ω(t) = Ω₀e^{−i(t−t₀)H}; the metric and the
//!   Hermitian partner are constants of the motion, and observables carry
//!   the explicit image A(t) = e^{i(t−t₀)H}Ω₀⁻¹𝔞(t)Ω₀e^{−i(t−t₀)H}.
//! * **General dynamics** ([`evolution`]): the Dyson-map ODE i∂ₜΩ = ΩH(t),
//!   the Coriolis term Σ = iΩ⁻¹Ω̇ (equal to H here), paired Heisenberg
//!   equations for (A, A†) coupled only through their initial data, and the
//!   metric identity i∂ₜΘ = ΘH − H†Θ — each redundancy exposed as a
//!   measurable residual.
//! * **Fixtures** ([`models`], [`synth`]): PT-symmetric two-level system,
//!   asymmetric hopping chain with a closed-form diagonal map, driven
//!   schedules, and seeded random quasi-Hermitian ensembles.
//!
//! Conventions: ħ = 1; matrices are dense, row-major, `Complex64`; all
//! integrators are fixed-step classical RK4 recording snapshots on the
//! reporting grid only, so every run is deterministic.

// Negated comparisons like `!(x > 0.0)` are NaN-rejecting guards throughout
// this crate: the error branch must trigger for NaN, which the "simplified"
// `x <= 0.0` would silently let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
mod integrate;
pub mod matrix;
pub mod metric;
pub mod models;
pub mod schedule;
pub mod stationary;
pub mod synth;
pub mod tol;

pub use error::{Error, Result};
pub use evolution::{
    coriolis_from_map, evolve_metric, generator, integrate_dyson, integrate_heisenberg_pair,
    make_compatible_initial, schrodinger_f_space, CoriolisMode, EvolutionState,
};
pub use matrix::{
    eig_bi, herm_sqrt, mat_exp, pd_min_eig, rel_fro_gap, sorted_eigenvalues, ComplexMatrix, Space,
    StateVector,
};
pub use metric::{
    coupling_residual, cross_picture_expectation, dyson_from_metric, hermitize,
    quasi_herm_residual, s_inner, solve_metric, to_p_space, DysonMap, DysonMode, Hamiltonian,
    MetricOperator, Observable, PartnerHamiltonian,
};
pub use models::{
    asym_chain, driven_pt, preset_observable, pt_two_level, ModelInstance, ModelKind, ModelSpec,
};
pub use schedule::{HamiltonianSchedule, MatrixSchedule, Smoothness, TimeGrid};
pub use stationary::{DriveTerm, StationaryScenario};
