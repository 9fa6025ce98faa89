//! Fixtures shared by the benchmarks.

use ncqm_core::{ParticlePair, Potential, RadialProblem};

/// Coulomb ground-state problem for a hydrogen-like ion at β = 1.
pub fn coulomb_problem(alpha_z: f64) -> RadialProblem {
    RadialProblem::new(Potential::coulomb(alpha_z).expect("positive coupling"), 0, 1.0)
        .expect("valid problem")
}

pub fn screened_potentials() -> [(&'static str, Potential); 2] {
    [
        ("yukawa", Potential::yukawa(0.5, 10.0).expect("valid")),
        ("hulthen", Potential::hulthen(0.5, 10.0).expect("valid")),
    ]
}

pub fn static_pair() -> ParticlePair {
    ParticlePair::infinite_partner(1.0).expect("unit mass")
}

pub fn equal_pair() -> ParticlePair {
    ParticlePair::new(1.0, 1.0).expect("unit masses")
}
