//! Functionals of the weak two-phase formulation.

pub mod flow;
pub mod functionals;
pub mod params;
pub mod testfield;

pub use flow::{Flow, PhaseState, QuadratureSettings, Support, Trajectory};
pub use functionals::*;
pub use params::{MaterialParams, Phase};
pub use testfield::{BumpScalar, DivFreeField2, DivFreeField3, TestFieldSpec, TimeVariant, TimeWindow};
