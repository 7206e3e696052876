//! Compactly supported, exactly divergence-free test fields built from a
//! smooth bump: `ψ = (∂₂φ, −∂₁φ)` in 2D and `ψ = ∇φ × a` in 3D with
//! `φ(x, t) = A·B(|x − c|²/r²)·τ(t)`.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::fields::{SpaceTimeScalar, SpaceTimeVector};
use crate::linalg::{Matrix, Vec2, Vec3, Vector};
use crate::quadrature::Rule1d;
use crate::{Error, Real, Result};

/// Steepness `s` of the bump. Larger `s` narrows the core and flattens the
/// edge; `s = 4` keeps edge-crossing surface integrals spectrally resolved at
/// a few hundred nodes per unit length.
pub const BUMP_STEEPNESS: f64 = 4.0;

/// `B(q) = exp(s(1 − 1/(1 − q)))` on `q < 1`, zero beyond; returns `(B, B', B'')`.
pub fn bump<T: Real>(q: T) -> (T, T, T) {
    if q >= T::one() {
        return (T::zero(), T::zero(), T::zero());
    }
    let a = T::lit(BUMP_STEEPNESS);
    let u = T::one() - q;
    let b = (a * (T::one() - u.recip())).exp();
    let u2 = u * u;
    (b, -a * b / u2, a * b * (a - T::lit(2.0) * u) / (u2 * u2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum TimeVariant {
    /// Vanishes near both ends of `(t_a, t_b)`.
    Open,
    /// `τ(t) = B((t/t_b)²)` on `[0, t_b)`: nonzero at `t = 0`.
    ClosedAtZero,
}

/// Time profile `τ` with its derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeWindow<T> {
    pub start: T,
    pub end: T,
    pub variant: TimeVariant,
}

impl<T: Real> TimeWindow<T> {
    pub fn new(start: T, end: T, variant: TimeVariant) -> Result<Self> {
        let start = if variant == TimeVariant::ClosedAtZero { T::zero() } else { start };
        if !(end > start) || start < T::zero() {
            return Err(Error::Support { detail: format!("time window [{start}, {end}] is empty or negative") });
        }
        Ok(Self { start, end, variant })
    }

    /// `(τ, τ')`.
    pub fn eval(&self, t: T) -> (T, T) {
        match self.variant {
            TimeVariant::Open => {
                let mid = (self.start + self.end) * T::lit(0.5);
                let half = (self.end - self.start) * T::lit(0.5);
                let s = (t - mid) / half;
                let (b, db, _) = bump(s * s);
                (b, db * T::lit(2.0) * s / half)
            }
            TimeVariant::ClosedAtZero => {
                if t < T::zero() {
                    return (T::zero(), T::zero());
                }
                let s = t / self.end;
                let (b, db, _) = bump(s * s);
                (b, db * T::lit(2.0) * s / self.end)
            }
        }
    }

    /// Composite Gauss rule over the support, `slabs × 4` nodes.
    pub fn rule(&self, slabs: usize) -> Rule1d<T> {
        Rule1d::composite_gauss(self.start, self.end, slabs, 4)
    }
}

/// Spatial-temporal scalar bump `φ(x, t) = A·B(|x − c|²/r²)·τ(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpScalar<T: Real, const D: usize> {
    pub center: Vector<T, D>,
    pub radius: T,
    pub amplitude: T,
    pub time: TimeWindow<T>,
}

impl<T: Real, const D: usize> BumpScalar<T, D> {
    /// `(S, ∇S, ∇²S)` of the spatial factor `A·B(q)`.
    pub fn spatial(&self, x: &Vector<T, D>) -> (T, Vector<T, D>, Matrix<T, D>) {
        let d = *x - self.center;
        let r2 = self.radius * self.radius;
        let (b, db, d2b) = bump(d.norm_sq() / r2);
        let a = self.amplitude;
        let two = T::lit(2.0);
        let grad = d * (a * db * two / r2);
        let hess = Matrix::from_fn(|i, j| {
            let diag = if i == j { db * two / r2 } else { T::zero() };
            a * (d2b * T::lit(4.0) * d[i] * d[j] / (r2 * r2) + diag)
        });
        (a * b, grad, hess)
    }

    pub fn support_contains(&self, x: &Vector<T, D>) -> bool {
        (*x - self.center).norm_sq() < self.radius * self.radius
    }
}

impl<T: Real, const D: usize> SpaceTimeScalar<T, D> for BumpScalar<T, D> {
    fn value(&self, x: &Vector<T, D>, t: T) -> T {
        self.spatial(x).0 * self.time.eval(t).0
    }
    fn gradient(&self, x: &Vector<T, D>, t: T) -> Vector<T, D> {
        self.spatial(x).1 * self.time.eval(t).0
    }
    fn time_derivative(&self, x: &Vector<T, D>, t: T) -> T {
        self.spatial(x).0 * self.time.eval(t).1
    }
}

/// Construction data shared by 2D and 3D fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TestFieldSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub amplitude: f64,
    pub variant: TimeVariant,
    /// Direction `a` of the 3D vector potential; ignored in 2D.
    #[serde(default)]
    pub axis: Option<[f64; 3]>,
}

/// Divergence-free 2D test field `ψ = (∂₂φ, −∂₁φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivFreeField2<T: Real> {
    pub potential: BumpScalar<T, 2>,
}

/// Divergence-free 3D test field `ψ = ∇φ × a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivFreeField3<T: Real> {
    pub potential: BumpScalar<T, 3>,
    pub axis: Vec3<T>,
}

fn check_box<T: Real, const D: usize>(center: &Vector<T, D>, radius: T, lo: &Vector<T, D>, hi: &Vector<T, D>) -> Result<()> {
    if !(radius > T::zero()) {
        return Err(Error::Support { detail: format!("radius {radius} must be positive") });
    }
    for k in 0..D {
        if center[k] - radius <= lo[k] || center[k] + radius >= hi[k] {
            return Err(Error::Support {
                detail: format!("ball of radius {radius} around {center:?} leaves the domain along axis {k}"),
            });
        }
    }
    Ok(())
}

impl<T: Real> DivFreeField2<T> {
    /// Validates that the support ball lies strictly inside `[lo, hi]`.
    pub fn build(spec: &TestFieldSpec, lo: Vec2<T>, hi: Vec2<T>) -> Result<Self> {
        if spec.center.len() != 2 {
            return Err(Error::Support { detail: "2D field needs a 2-component center".into() });
        }
        let center = Vec2::new(T::lit(spec.center[0]), T::lit(spec.center[1]));
        let radius = T::lit(spec.radius);
        check_box(&center, radius, &lo, &hi)?;
        let time = TimeWindow::new(T::lit(spec.t_start), T::lit(spec.t_end), spec.variant)?;
        Ok(Self { potential: BumpScalar { center, radius, amplitude: T::lit(spec.amplitude), time } })
    }

    pub fn center(&self) -> Vec2<T> {
        self.potential.center
    }

    pub fn radius(&self) -> T {
        self.potential.radius
    }

    pub fn time(&self) -> &TimeWindow<T> {
        &self.potential.time
    }

    /// Same construction with every amplitude scaled.
    pub fn scaled(&self, s: T) -> Self {
        let mut out = *self;
        out.potential.amplitude = out.potential.amplitude * s;
        out
    }
}

impl<T: Real> SpaceTimeVector<T, 2> for DivFreeField2<T> {
    fn value(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        let (_, g, _) = self.potential.spatial(x);
        Vec2::new(g[1], -g[0]) * self.potential.time.eval(t).0
    }
    fn jacobian(&self, x: &Vec2<T>, t: T) -> Matrix<T, 2> {
        let (_, _, h) = self.potential.spatial(x);
        let tau = self.potential.time.eval(t).0;
        Matrix([[h[(1, 0)], h[(1, 1)]], [-h[(0, 0)], -h[(0, 1)]]]).scale(tau)
    }
    fn time_derivative(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        let (_, g, _) = self.potential.spatial(x);
        Vec2::new(g[1], -g[0]) * self.potential.time.eval(t).1
    }
    fn divergence(&self, _x: &Vec2<T>, _t: T) -> T {
        // ∂₁∂₂φ − ∂₂∂₁φ with a symmetric Hessian
        T::zero()
    }
}

impl<T: Real> DivFreeField3<T> {
    pub fn build(spec: &TestFieldSpec, lo: Vec3<T>, hi: Vec3<T>) -> Result<Self> {
        if spec.center.len() != 3 {
            return Err(Error::Support { detail: "3D field needs a 3-component center".into() });
        }
        let center = Vec3::new(T::lit(spec.center[0]), T::lit(spec.center[1]), T::lit(spec.center[2]));
        let radius = T::lit(spec.radius);
        check_box(&center, radius, &lo, &hi)?;
        let time = TimeWindow::new(T::lit(spec.t_start), T::lit(spec.t_end), spec.variant)?;
        let a = spec.axis.unwrap_or([0.0, 0.0, 1.0]);
        Ok(Self {
            potential: BumpScalar { center, radius, amplitude: T::lit(spec.amplitude), time },
            axis: Vec3::new(T::lit(a[0]), T::lit(a[1]), T::lit(a[2])),
        })
    }
}

impl<T: Real> SpaceTimeVector<T, 3> for DivFreeField3<T> {
    fn value(&self, x: &Vec3<T>, t: T) -> Vec3<T> {
        let (_, g, _) = self.potential.spatial(x);
        g.cross(&self.axis) * self.potential.time.eval(t).0
    }
    fn jacobian(&self, x: &Vec3<T>, t: T) -> Matrix<T, 3> {
        let (_, _, h) = self.potential.spatial(x);
        let tau = self.potential.time.eval(t).0;
        // ∂_j (∇φ × a)_i = (∂_j∇φ × a)_i
        let mut m = Matrix::zero();
        for j in 0..3 {
            let col = Vec3::new(h[(0, j)], h[(1, j)], h[(2, j)]).cross(&self.axis);
            for i in 0..3 {
                m[(i, j)] = col[i] * tau;
            }
        }
        m
    }
    fn time_derivative(&self, x: &Vec3<T>, t: T) -> Vec3<T> {
        let (_, g, _) = self.potential.spatial(x);
        g.cross(&self.axis) * self.potential.time.eval(t).1
    }
}
