//! Closed-form space-time diffeomorphisms `Φ(ξ; t)` of the plane.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::linalg::{Matrix, Vec2};
use crate::Real;

/// Built-in maps. All except `Dilation` have `det ∇Φ ≡ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Diffeo<T> {
    Identity,
    /// `ξ + t c`.
    Translation { velocity: [T; 2] },
    /// Rigid rotation by angle `ω t` about `center`.
    Rotation { omega: T, center: [T; 2] },
    /// `(ξ₁ + rate·t·ξ₂, ξ₂)`.
    Shear { rate: T },
    /// Differential rotation by `ω t exp(−|ξ − c|²/w²)` about `center`;
    /// nonlinear but volume preserving since radii are kept.
    Swirl { omega: T, center: [T; 2], width: T },
    /// `c + (1 + rate·t)(ξ − c)`; not volume preserving.
    Dilation { rate: T, center: [T; 2] },
    /// `Φ_n ∘ … ∘ Φ_1` in list order.
    Composite { parts: Vec<Diffeo<T>> },
}

fn rot<T: Real>(angle: T) -> Matrix<T, 2> {
    let (s, c) = angle.sin_cos();
    Matrix([[c, -s], [s, c]])
}

/// Quarter turn `J = [[0, −1], [1, 0]]`.
fn quarter<T: Real>() -> Matrix<T, 2> {
    Matrix([[T::zero(), -T::one()], [T::one(), T::zero()]])
}

fn v2<T: Real>(a: &[T; 2]) -> Vec2<T> {
    Vec2::new(a[0], a[1])
}

impl<T: Real> Diffeo<T> {
    pub fn is_volume_preserving(&self) -> bool {
        match self {
            Diffeo::Dilation { rate, .. } => *rate == T::zero(),
            Diffeo::Composite { parts } => parts.iter().all(Diffeo::is_volume_preserving),
            _ => true,
        }
    }

    fn swirl_angle(omega: T, width: T, r2: T, t: T) -> (T, T) {
        // angle and its derivative with respect to r²
        let g = (-r2 / (width * width)).exp();
        (omega * t * g, -omega * t * g / (width * width))
    }

    pub fn map(&self, xi: &Vec2<T>, t: T) -> Vec2<T> {
        match self {
            Diffeo::Identity => *xi,
            Diffeo::Translation { velocity } => *xi + v2(velocity) * t,
            Diffeo::Rotation { omega, center } => {
                let c = v2(center);
                c + rot(*omega * t).mul_vec(&(*xi - c))
            }
            Diffeo::Shear { rate } => Vec2::new(xi[0] + *rate * t * xi[1], xi[1]),
            Diffeo::Swirl { omega, center, width } => {
                let c = v2(center);
                let d = *xi - c;
                let (a, _) = Self::swirl_angle(*omega, *width, d.norm_sq(), t);
                c + rot(a).mul_vec(&d)
            }
            Diffeo::Dilation { rate, center } => {
                let c = v2(center);
                c + (*xi - c) * (T::one() + *rate * t)
            }
            Diffeo::Composite { parts } => parts.iter().fold(*xi, |x, p| p.map(&x, t)),
        }
    }

    /// `∇Φ(ξ; t)` with `[i][j] = ∂Φ_i/∂ξ_j`.
    pub fn gradient(&self, xi: &Vec2<T>, t: T) -> Matrix<T, 2> {
        match self {
            Diffeo::Identity | Diffeo::Translation { .. } => Matrix::identity(),
            Diffeo::Rotation { omega, .. } => rot(*omega * t),
            Diffeo::Shear { rate } => Matrix([[T::one(), *rate * t], [T::zero(), T::one()]]),
            Diffeo::Swirl { omega, center, width } => {
                let d = *xi - v2(center);
                let (a, da) = Self::swirl_angle(*omega, *width, d.norm_sq(), t);
                let q = rot(a);
                // ∇(Q(a) d) = Q + Q J d ⊗ ∇a, ∇a = 2 da d
                let qjd = q.mul_mat(&quarter()).mul_vec(&d);
                q.add(&qjd.outer(&(d * (T::lit(2.0) * da))))
            }
            Diffeo::Dilation { rate, .. } => Matrix::identity().scale(T::one() + *rate * t),
            Diffeo::Composite { parts } => {
                let mut x = *xi;
                let mut g = Matrix::identity();
                for p in parts {
                    g = p.gradient(&x, t).mul_mat(&g);
                    x = p.map(&x, t);
                }
                g
            }
        }
    }

    /// `∂ₜΦ(ξ; t)`.
    pub fn time_derivative(&self, xi: &Vec2<T>, t: T) -> Vec2<T> {
        match self {
            Diffeo::Identity => Vec2::zero(),
            Diffeo::Translation { velocity } => v2(velocity),
            Diffeo::Rotation { omega, center } => {
                let d = *xi - v2(center);
                rot(*omega * t).mul_mat(&quarter()).mul_vec(&d) * *omega
            }
            Diffeo::Shear { rate } => Vec2::new(*rate * xi[1], T::zero()),
            Diffeo::Swirl { omega, center, width } => {
                let d = *xi - v2(center);
                let r2 = d.norm_sq();
                let (a, _) = Self::swirl_angle(*omega, *width, r2, t);
                let rate = *omega * (-r2 / (*width * *width)).exp();
                rot(a).mul_mat(&quarter()).mul_vec(&d) * rate
            }
            Diffeo::Dilation { rate, center } => (*xi - v2(center)) * *rate,
            Diffeo::Composite { parts } => {
                // d/dt Φ_k(y_{k−1}(t), t) = ∂ₜΦ_k + ∇Φ_k · y'_{k−1}
                let mut x = *xi;
                let mut dx = Vec2::zero();
                for p in parts {
                    dx = p.time_derivative(&x, t) + p.gradient(&x, t).mul_vec(&dx);
                    x = p.map(&x, t);
                }
                dx
            }
        }
    }

    /// `Φ⁻¹(x; t)`, closed form for every built-in kind.
    pub fn inverse(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        match self {
            Diffeo::Identity => *x,
            Diffeo::Translation { velocity } => *x - v2(velocity) * t,
            Diffeo::Rotation { omega, center } => {
                let c = v2(center);
                c + rot(-*omega * t).mul_vec(&(*x - c))
            }
            Diffeo::Shear { rate } => Vec2::new(x[0] - *rate * t * x[1], x[1]),
            Diffeo::Swirl { omega, center, width } => {
                let c = v2(center);
                let d = *x - c;
                let (a, _) = Self::swirl_angle(*omega, *width, d.norm_sq(), t);
                c + rot(-a).mul_vec(&d)
            }
            Diffeo::Dilation { rate, center } => {
                let c = v2(center);
                c + (*x - c) * (T::one() + *rate * t).recip()
            }
            Diffeo::Composite { parts } => parts.iter().rev().fold(*x, |y, p| p.inverse(&y, t)),
        }
    }

    pub fn jacobian_det(&self, xi: &Vec2<T>, t: T) -> T {
        self.gradient(xi, t).det()
    }

    /// Eulerian velocity `∂ₜΦ(Φ⁻¹(x; t); t)`.
    pub fn velocity(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        self.time_derivative(&self.inverse(x, t), t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::fd_jacobian;

    fn catalog() -> Vec<Diffeo<f64>> {
        vec![
            Diffeo::Translation { velocity: [1.0, -0.5] },
            Diffeo::Rotation { omega: 0.7, center: [0.1, 0.2] },
            Diffeo::Shear { rate: 1.0 },
            Diffeo::Swirl { omega: 1.3, center: [0.0, 0.1], width: 0.8 },
            Diffeo::Composite {
                parts: vec![Diffeo::Shear { rate: 0.5 }, Diffeo::Swirl { omega: 1.0, center: [0.0, 0.0], width: 1.0 }],
            },
        ]
    }

    #[test]
    fn analytic_gradient_matches_fd() {
        let xi = Vec2::new(0.4, -0.3);
        for d in catalog() {
            let fd = fd_jacobian(|y| d.map(y, 0.8), &xi, 1e-3);
            assert!(fd.sub(&d.gradient(&xi, 0.8)).max_abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn analytic_time_derivative_matches_fd() {
        let xi = Vec2::new(0.4, -0.3);
        for d in catalog() {
            let h = 1e-4;
            let fd = (d.map(&xi, 0.5 + h) - d.map(&xi, 0.5 - h)) * (0.5 / h);
            assert!((fd - d.time_derivative(&xi, 0.5)).max_abs() < 1e-7, "{d:?}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let x = Vec2::new(-0.2, 0.9);
        for d in catalog() {
            assert!((d.map(&d.inverse(&x, 1.1), 1.1) - x).max_abs() < 1e-13);
        }
    }
}
