//! Closed-form star-shaped planar regions used to seed curves.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::curve::ClosedCurve;
use crate::linalg::Vec2;
use crate::{Real, Result};

/// Star-shaped region in the plane, boundary parametrised counter-clockwise
/// over `θ ∈ [0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape2<T> {
    Circle { center: [T; 2], radius: T },
    Ellipse { center: [T; 2], a: T, b: T },
    /// `r(θ) = r0 + Σ_k (cos_k cos kθ + sin_k sin kθ)`, `k = 1, 2, …`.
    FourierCurve { center: [T; 2], r0: T, cos: Vec<T>, sin: Vec<T> },
}

impl<T: Real> Shape2<T> {
    pub fn center(&self) -> Vec2<T> {
        match self {
            Shape2::Circle { center, .. }
            | Shape2::Ellipse { center, .. }
            | Shape2::FourierCurve { center, .. } => Vec2::new(center[0], center[1]),
        }
    }

    pub fn point(&self, theta: T) -> Vec2<T> {
        let c = self.center();
        match self {
            Shape2::Circle { radius, .. } => c + Vec2::new(theta.cos(), theta.sin()) * *radius,
            Shape2::Ellipse { a, b, .. } => c + Vec2::new(*a * theta.cos(), *b * theta.sin()),
            Shape2::FourierCurve { .. } => {
                c + Vec2::new(theta.cos(), theta.sin()) * self.polar_radius(theta)
            }
        }
    }

    fn polar_radius(&self, theta: T) -> T {
        match self {
            Shape2::Circle { radius, .. } => *radius,
            Shape2::Ellipse { a, b, .. } => {
                let (s, c) = theta.sin_cos();
                *a * *b / ((*b * c).powi(2) + (*a * s).powi(2)).sqrt()
            }
            Shape2::FourierCurve { r0, cos, sin, .. } => {
                let mut r = *r0;
                for (k, ck) in cos.iter().enumerate() {
                    r = r + *ck * (T::from_usize_lossy(k + 1) * theta).cos();
                }
                for (k, sk) in sin.iter().enumerate() {
                    r = r + *sk * (T::from_usize_lossy(k + 1) * theta).sin();
                }
                r
            }
        }
    }

    /// Level function negative inside, zero on the boundary, positive outside.
    pub fn level(&self, x: &Vec2<T>) -> T {
        let d = *x - self.center();
        match self {
            Shape2::Circle { radius, .. } => d.norm() - *radius,
            Shape2::Ellipse { a, b, .. } => (d[0] / *a).powi(2) + (d[1] / *b).powi(2) - T::one(),
            Shape2::FourierCurve { .. } => d.norm() - self.polar_radius(d[1].atan2(d[0])),
        }
    }

    pub fn contains(&self, x: &Vec2<T>) -> bool {
        self.level(x) < T::zero()
    }

    /// Largest distance from the center to the boundary, sampled.
    pub fn max_radius(&self) -> T {
        (0..512)
            .map(|j| self.polar_radius(T::TAU() * T::from_usize_lossy(j) / T::lit(512.0)))
            .fold(T::zero(), T::max)
    }

    /// Smallest distance from the center to the boundary, sampled.
    pub fn min_radius(&self) -> T {
        (0..512)
            .map(|j| self.polar_radius(T::TAU() * T::from_usize_lossy(j) / T::lit(512.0)))
            .fold(T::infinity(), T::min)
    }

    /// Exact enclosed area.
    pub fn area(&self) -> T {
        match self {
            Shape2::Circle { radius, .. } => T::PI() * *radius * *radius,
            Shape2::Ellipse { a, b, .. } => T::PI() * *a * *b,
            Shape2::FourierCurve { r0, cos, sin, .. } => {
                // ½∫r² dθ with Parseval
                let modes: T = cos.iter().chain(sin.iter()).map(|&c| c * c).sum();
                T::PI() * (*r0 * *r0 + modes * T::lit(0.5))
            }
        }
    }

    /// Samples the boundary at `m` equispaced parameters.
    pub fn curve(&self, m: usize, reversed: bool) -> Result<ClosedCurve<T>> {
        let pts = (0..m)
            .map(|j| self.point(T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(m)))
            .collect();
        ClosedCurve::from_samples(pts, reversed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_area_matches_curve_quadrature() {
        let s = Shape2::<f64>::FourierCurve { center: [0.1, 0.0], r0: 1.0, cos: vec![0.0, 0.1], sin: vec![0.05] };
        let c = s.curve(256, false).unwrap();
        assert!((c.enclosed_area() - s.area()).abs() < 1e-12);
        assert!(s.contains(&Vec2::new(0.1, 0.0)));
        assert!(!s.contains(&Vec2::new(2.0, 0.0)));
    }
}
