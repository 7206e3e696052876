//! Numerical verification of the two-phase incompressible Navier–Stokes system
//! with surface tension.
//!
//! The crate evaluates interface geometry, moving-domain identities, the weak
//! momentum/energy/transport functionals and a constructive pressure
//! reconstruction on analytic scenarios. Numerics are generic over [`Real`]
//! (`f32`, `f64`); the aliases below fix `f64`, which is what the tolerances in
//! the check catalog assume.

pub mod error;
pub mod evolving;
pub mod fields;
pub mod harness;
pub mod linalg;
pub mod pressure;
pub mod quadrature;
pub mod scalar;
pub mod surface;
pub mod weak_form;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` instantiations of the generic building blocks.
pub type Curve = surface::ClosedCurve<f64>;
pub type Ellipsoid = surface::Ellipsoid<f64>;
pub type Shape = surface::Shape2<f64>;
pub type Motion = evolving::Diffeo<f64>;
pub type Domain = evolving::EvolvingDomain<f64>;
pub type Material = weak_form::MaterialParams<f64>;
pub type Velocity = weak_form::Flow<f64>;
pub type Flowing = weak_form::Trajectory<f64>;
pub type TestField = weak_form::DivFreeField2<f64>;
pub type Pressure = pressure::Reconstruction<f64>;
pub type Vec2 = linalg::Vec2<f64>;
pub type Vec3 = linalg::Vec3<f64>;
