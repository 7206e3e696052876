//! Closed-form velocity fields and the trajectory/phase-state containers that
//! pair them with an evolving interface.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::params::{MaterialParams, Phase};
use crate::evolving::EvolvingDomain;
use crate::fields::SpaceTimeVector;
use crate::linalg::{Matrix, Vec2};
use crate::surface::PolarRule;
use crate::{Error, Real, Result};

/// Registry of closed-form velocities. All are divergence free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Flow<T> {
    Zero,
    Uniform { velocity: [T; 2] },
    /// `ω J (x − c)`.
    RigidRotation { omega: T, center: [T; 2] },
    /// `(rate·x₂, 0)`.
    Shear { rate: T },
    /// `(sin x cos y, −cos x sin y)·e^{−2νt}`.
    TaylorGreen { nu: T },
    /// `A (sin k x₂, sin k x₁)(1 + t)`: smooth, strained, not a solution of anything.
    Cellular { amplitude: T, wavenumber: T },
}

impl<T: Real> Flow<T> {
    fn decay(nu: T, t: T) -> T {
        (-T::lit(2.0) * nu * t).exp()
    }

    /// `Δv`.
    pub fn laplacian(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        match self {
            Flow::TaylorGreen { .. } => SpaceTimeVector::value(self, x, t) * (-T::lit(2.0)),
            Flow::Cellular { wavenumber, .. } => SpaceTimeVector::value(self, x, t) * (-*wavenumber * *wavenumber),
            _ => Vec2::zero(),
        }
    }

    /// Closed-form kinematic pressure `p/ρ` where the flow solves the
    /// single-phase Navier–Stokes equations.
    pub fn kinematic_pressure(&self, x: &Vec2<T>, t: T) -> Option<(T, Vec2<T>)> {
        match self {
            Flow::TaylorGreen { nu } => {
                let f2 = Self::decay(*nu, t).powi(2);
                let q = T::lit(0.25);
                let p = q * ((T::lit(2.0) * x[0]).cos() + (T::lit(2.0) * x[1]).cos()) * f2;
                let g = Vec2::new(-(T::lit(2.0) * x[0]).sin(), -(T::lit(2.0) * x[1]).sin()) * (T::lit(0.5) * f2);
                Some((p, g))
            }
            Flow::RigidRotation { omega, center } => {
                // (v·∇)v = −ω²(x − c) is balanced by p/ρ = ω²|x − c|²/2
                let d = *x - Vec2::new(center[0], center[1]);
                let w2 = *omega * *omega;
                Some((T::lit(0.5) * w2 * d.norm_sq(), d * w2))
            }
            Flow::Zero | Flow::Uniform { .. } | Flow::Shear { .. } => Some((T::zero(), Vec2::zero())),
            _ => None,
        }
    }

    /// `(v·∇)v`.
    pub fn convection(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        let v = SpaceTimeVector::value(self, x, t);
        SpaceTimeVector::jacobian(self, x, t).mul_vec(&v)
    }

    /// `∂ₜv + (v·∇)v`.
    pub fn material_acceleration(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        SpaceTimeVector::time_derivative(self, x, t) + self.convection(x, t)
    }
}

impl<T: Real> SpaceTimeVector<T, 2> for Flow<T> {
    fn value(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        match self {
            Flow::Zero => Vec2::zero(),
            Flow::Uniform { velocity } => Vec2::new(velocity[0], velocity[1]),
            Flow::RigidRotation { omega, center } => {
                Vec2::new(-(x[1] - center[1]), x[0] - center[0]) * *omega
            }
            Flow::Shear { rate } => Vec2::new(*rate * x[1], T::zero()),
            Flow::TaylorGreen { nu } => {
                let (s0, c0) = x[0].sin_cos();
                let (s1, c1) = x[1].sin_cos();
                Vec2::new(s0 * c1, -c0 * s1) * Self::decay(*nu, t)
            }
            Flow::Cellular { amplitude, wavenumber } => {
                let k = *wavenumber;
                Vec2::new((k * x[1]).sin(), (k * x[0]).sin()) * (*amplitude * (T::one() + t))
            }
        }
    }

    fn jacobian(&self, x: &Vec2<T>, t: T) -> Matrix<T, 2> {
        let z = T::zero();
        match self {
            Flow::Zero | Flow::Uniform { .. } => Matrix::zero(),
            Flow::RigidRotation { omega, .. } => Matrix([[z, -*omega], [*omega, z]]),
            Flow::Shear { rate } => Matrix([[z, *rate], [z, z]]),
            Flow::TaylorGreen { nu } => {
                let (s0, c0) = x[0].sin_cos();
                let (s1, c1) = x[1].sin_cos();
                Matrix([[c0 * c1, -s0 * s1], [s0 * s1, -c0 * c1]]).scale(Self::decay(*nu, t))
            }
            Flow::Cellular { amplitude, wavenumber } => {
                let k = *wavenumber;
                let a = *amplitude * (T::one() + t) * k;
                Matrix([[z, a * (k * x[1]).cos()], [a * (k * x[0]).cos(), z]])
            }
        }
    }

    fn time_derivative(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        match self {
            Flow::TaylorGreen { nu } => SpaceTimeVector::value(self, x, t) * (-T::lit(2.0) * *nu),
            Flow::Cellular { amplitude, wavenumber } => {
                let k = *wavenumber;
                Vec2::new((k * x[1]).sin(), (k * x[0]).sin()) * *amplitude
            }
            _ => Vec2::zero(),
        }
    }
}

/// Quadrature resolution for bulk and time integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSettings {
    /// Composite Gauss slabs in time (4 nodes each).
    pub time_slabs: usize,
    /// Radial Gauss nodes of the polar rules.
    pub radial: usize,
    /// Angular trapezoid nodes of disk rules.
    pub angular: usize,
    /// Composite Gauss slabs per axis for whole-box integrals (4 nodes each).
    pub box_slabs: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { time_slabs: 8, radial: 32, angular: 96, box_slabs: 24 }
    }
}

/// Region carrying the integrand of a bulk integral.
#[derive(Clone, Copy, Debug)]
pub enum Support<T: Real> {
    /// Integrand vanishes outside this disk.
    Disk(Vec2<T>, T),
    /// Whole computational box.
    Box,
}

/// Interface motion, materials and velocity over `[0, T]` on the box `Ω`.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub domain: EvolvingDomain<T>,
    pub params: MaterialParams<T>,
    pub flow: Flow<T>,
    pub lo: Vec2<T>,
    pub hi: Vec2<T>,
    pub quad: QuadratureSettings,
}

impl<T: Real> Trajectory<T> {
    pub fn new(
        domain: EvolvingDomain<T>,
        params: MaterialParams<T>,
        flow: Flow<T>,
        lo: Vec2<T>,
        hi: Vec2<T>,
        quad: QuadratureSettings,
    ) -> Result<Self> {
        params.validate()?;
        let traj = Self { domain, params, flow, lo, hi, quad };
        // Ω⁻(t) ⊂⊂ Ω at a few sampled times
        for k in 0..=8 {
            let t = traj.domain.t_end * T::lit(k as f64 / 8.0);
            let (blo, bhi) = traj.domain.surface(t)?.bounding_box();
            if (0..2).any(|i| blo[i] <= lo[i] || bhi[i] >= hi[i]) {
                return Err(Error::Config {
                    path: "/geometry".into(),
                    message: format!("interface leaves the box at t = {t}"),
                });
            }
        }
        Ok(traj)
    }

    pub fn t_end(&self) -> T {
        self.domain.t_end
    }

    pub fn state(&self, t: T) -> PhaseState<'_, T> {
        PhaseState { traj: self, t }
    }

    /// `∫_Ω g(x, phase(x))` as `∫_S g(·, +) + ∫_{Ω⁻(t)} (g(·, −) − g(·, +))`.
    pub fn integrate_two_phase(&self, t: T, support: Support<T>, g: impl Fn(&Vec2<T>, Phase) -> T) -> T {
        let outer = match support {
            Support::Disk(c, r) => PolarRule::disk(c, r, self.quad.radial, self.quad.angular),
            Support::Box => PolarRule::boxed(self.lo, self.hi, self.quad.box_slabs, 4),
        };
        let base = outer.integrate(|x| g(x, Phase::Plus));
        let jump = self.domain.integrate_inside(t, |x| g(x, Phase::Minus) - g(x, Phase::Plus));
        base + jump
    }

    /// Bounding box volume `|Ω|`.
    pub fn box_volume(&self) -> T {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }
}

/// Bulk fields at one instant.
#[derive(Clone, Copy, Debug)]
pub struct PhaseState<'a, T: Real> {
    pub traj: &'a Trajectory<T>,
    pub t: T,
}

impl<T: Real> PhaseState<'_, T> {
    pub fn phase(&self, x: &Vec2<T>) -> Phase {
        if self.traj.domain.contains(x, self.t) {
            Phase::Minus
        } else {
            Phase::Plus
        }
    }

    /// `χ_{Ω⁻(t)}`.
    pub fn indicator(&self, x: &Vec2<T>) -> T {
        match self.phase(x) {
            Phase::Minus => T::one(),
            Phase::Plus => T::zero(),
        }
    }

    pub fn density(&self, x: &Vec2<T>) -> T {
        self.traj.params.density_from_indicator(self.indicator(x))
    }

    pub fn viscosity(&self, x: &Vec2<T>) -> T {
        self.traj.params.viscosity_of_density(self.density(x))
    }

    pub fn velocity(&self, x: &Vec2<T>) -> Vec2<T> {
        SpaceTimeVector::value(&self.traj.flow, x, self.t)
    }

    /// `Dv = (∇v + ∇vᵀ)/2`.
    pub fn strain(&self, x: &Vec2<T>) -> Matrix<T, 2> {
        self.traj.flow.sym_grad(x, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{fd_jacobian, SpaceTimeVector};

    #[test]
    fn taylor_green_derivatives() {
        let f = Flow::<f64>::TaylorGreen { nu: 0.1 };
        let x = Vec2::new(0.7, 2.1);
        let t = 0.4;
        let fd = fd_jacobian(|y| f.value(y, t), &x, 1e-3);
        assert!(fd.sub(&f.jacobian(&x, t)).max_abs() < 1e-10);
        assert!(f.divergence(&x, t).abs() < 1e-15);
        let h = 1e-3;
        let lap = (f.value(&(x + Vec2::new(h, 0.0)), t) + f.value(&(x - Vec2::new(h, 0.0)), t)
            + f.value(&(x + Vec2::new(0.0, h)), t)
            + f.value(&(x - Vec2::new(0.0, h)), t)
            - f.value(&x, t) * 4.0)
            * (1.0 / (h * h));
        assert!((lap - f.laplacian(&x, t)).max_abs() < 1e-6);
    }

    #[test]
    fn taylor_green_solves_navier_stokes() {
        // ∂ₜv + (v·∇)v = −∇(p/ρ) + νΔv
        let nu = 0.05;
        let f = Flow::TaylorGreen { nu };
        for &(x, y) in &[(0.3, 1.2), (2.5, 4.0), (5.1, 0.2)] {
            let p = Vec2::new(x, y);
            let (_, gp) = f.kinematic_pressure(&p, 0.6).unwrap();
            let r = f.material_acceleration(&p, 0.6) + gp - f.laplacian(&p, 0.6) * nu;
            assert!(r.max_abs() < 1e-14);
        }
    }

    #[test]
    fn rigid_rotation_pressure_balances_centripetal_acceleration() {
        let f = Flow::RigidRotation { omega: 0.7, center: [0.2, -0.1] };
        let p = Vec2::new(1.1, 0.4);
        let (_, gp) = f.kinematic_pressure(&p, 0.3).unwrap();
        assert!((f.material_acceleration(&p, 0.3) + gp).max_abs() < 1e-15);
    }
}
