//! Moving domains driven by volume-preserving diffeomorphisms: normal velocity,
//! the Piola-type transform `Φ★`, transport theorems and space-time
//! integration by parts.

pub mod checks;
pub mod diffeo;

pub use checks::*;
pub use diffeo::Diffeo;

use crate::linalg::Vec2;
use crate::surface::{ClosedCurve, Hypersurface, PolarRule, Shape2};
use crate::{Error, Real, Result};

/// `Ω⁻(t) = Φ(Ω⁻(0); t)` for `t ∈ [0, T]`, with the initial boundary sampled at
/// `M` nodes and a polar bulk rule on `Ω⁻(0)` that is pushed forward on demand.
#[derive(Clone, Debug)]
pub struct EvolvingDomain<T: Real> {
    pub shape: Shape2<T>,
    pub diffeo: Diffeo<T>,
    pub t_end: T,
    curve0: ClosedCurve<T>,
    bulk0: PolarRule<T>,
}

impl<T: Real> EvolvingDomain<T> {
    pub fn new(shape: Shape2<T>, diffeo: Diffeo<T>, t_end: T, nodes: usize, n_radial: usize) -> Result<Self> {
        let curve0 = shape.curve(nodes, false)?;
        let bulk0 = PolarRule::star(&curve0, shape.center(), n_radial);
        Ok(Self { shape, diffeo, t_end, curve0, bulk0 })
    }

    pub fn initial_surface(&self) -> &ClosedCurve<T> {
        &self.curve0
    }

    pub fn initial_rule(&self) -> &PolarRule<T> {
        &self.bulk0
    }

    fn check_time(&self, t: T) -> Result<()> {
        if t < T::zero() || t > self.t_end {
            return Err(Error::TimeOutOfRange { t: t.to_f64_lossy(), lo: 0.0, hi: self.t_end.to_f64_lossy() });
        }
        Ok(())
    }

    /// `Γ(t)`.
    pub fn surface(&self, t: T) -> Result<ClosedCurve<T>> {
        self.check_time(t)?;
        self.curve0.map(|xi| self.diffeo.map(xi, t))
    }

    /// Membership in `Ω⁻(t)` through the initial shape's level function.
    pub fn contains(&self, x: &Vec2<T>, t: T) -> bool {
        self.shape.contains(&self.diffeo.inverse(x, t))
    }

    /// `ξ ↦ Φ(ξ; t)` level value `ℓ(Φ⁻¹(x; t))`.
    pub fn level(&self, x: &Vec2<T>, t: T) -> T {
        self.shape.level(&self.diffeo.inverse(x, t))
    }

    /// `∫_{Ω⁻(t)} f = ∫_{Ω⁻(0)} f(Φ(ξ; t)) det ∇Φ dξ`.
    pub fn integrate_inside(&self, t: T, f: impl Fn(&Vec2<T>) -> T) -> T {
        let vp = self.diffeo.is_volume_preserving();
        self.bulk0.integrate(|xi| {
            let x = self.diffeo.map(xi, t);
            let det = if vp { T::one() } else { self.diffeo.jacobian_det(xi, t) };
            f(&x) * det
        })
    }

    /// `(Γ(t), V)` with `V = ∂ₜΦ(ξ_q; t)·ν⁻` at the advected nodes.
    pub fn surface_with_velocity(&self, t: T) -> Result<(ClosedCurve<T>, Vec<T>)> {
        let gamma = self.surface(t)?;
        let v = self
            .curve0
            .nodes()
            .iter()
            .zip(gamma.normals())
            .map(|(xi, nu)| self.diffeo.time_derivative(xi, t).dot(nu))
            .collect();
        Ok((gamma, v))
    }
}
