#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod error;
pub mod hydrogenic;
pub mod physical;
pub mod polynomial;
pub mod potential;
pub mod radial;
pub mod selfconsistent;
pub mod nbody;
pub mod report;

pub use algebra::{eps_from_xi, NoncommParams};
pub use error::{Error, Result};
pub use hydrogenic::{HydrogenicState, RadialWavefunction, OMEGA_STATIC};
pub use nbody::NBodySystem;
pub use physical::{Constants, ParticlePair};
pub use potential::Potential;
pub use radial::{GridSpec, RadialProblem, RadialSolution};
pub use report::{DataTable, ExperimentalRecord, Figure, Quantity, ReportRow};
pub use selfconsistent::{OmegaCalibration, SelfConsistentOptions, SelfConsistentResult};
