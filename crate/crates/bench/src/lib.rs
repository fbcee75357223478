//! Shared fixtures for the kernel benchmarks: deterministic models at the
//! benchmarked dimensions, built once per run so the timed sections measure
//! the kernels and not the setup.

use nhh_core::synth;
use nhh_core::{
    dyson_from_metric, make_compatible_initial, preset_observable, solve_metric, tol, DysonMap,
    DysonMode, Hamiltonian, MetricOperator, Observable,
};

/// A static quasi-Hermitian model with its metric, positive-root map, and a
/// compatible F-picture observable — everything the integrator benchmarks
/// consume.
pub struct Fixture {
    pub hamiltonian: Hamiltonian,
    pub theta: MetricOperator,
    pub omega: DysonMap,
    pub observable_f: Observable,
}

/// Deterministic fixture at the given dimension: the two-level gain–loss
/// model where it fits, a seeded random quasi-Hermitian model elsewhere.
pub fn fixture(dim: usize) -> Fixture {
    let hamiltonian = static_model(dim);
    let theta =
        solve_metric(&hamiltonian, None, tol::REAL_SPECTRUM_REL).expect("unbroken-phase fixture");
    let omega = dyson_from_metric(&theta, DysonMode::PositiveRoot).expect("factorizable metric");
    let a_p = if dim == 2 {
        preset_observable("sigma_z", 2).expect("preset")
    } else {
        preset_observable(&format!("site_occupation({})", dim / 2), dim).expect("preset")
    };
    let observable_f = make_compatible_initial(&a_p, &omega).expect("compatible image");
    Fixture {
        hamiltonian,
        theta,
        omega,
        observable_f,
    }
}

/// The raw Hamiltonian used by `fixture`, also benchmarked on its own for
/// the matrix-exponential and metric-construction kernels.
pub fn static_model(dim: usize) -> Hamiltonian {
    if dim == 2 {
        nhh_core::pt_two_level(0.5, 1.0)
    } else {
        synth::random_quasi_hermitian(&mut synth::rng(dim as u64), dim, dim as u64)
            .expect("well-conditioned synthesis")
            .0
    }
}
