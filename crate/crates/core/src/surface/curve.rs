//! Closed planar curves sampled at equispaced parameters; derivatives are
//! taken from the trigonometric interpolant.

use super::Hypersurface;
use crate::linalg::{Matrix, Vec2};
use crate::{Error, Real, Result};

/// Closed curve `γ: [0, 2π) → ℝ²` stored by node samples.
///
/// Invariants: every node has `|γ'| > 0`; normals have unit length and point
/// out of the enclosed region unless `reversed` is set.
#[derive(Clone, Debug)]
pub struct ClosedCurve<T: Real> {
    nodes: Vec<Vec2<T>>,
    d1: Vec<Vec2<T>>,
    d2: Vec<Vec2<T>>,
    speed: Vec<T>,
    tangents: Vec<Vec2<T>>,
    normals: Vec<Vec2<T>>,
    weights: Vec<T>,
    curvature: Vec<Matrix<T, 2>>,
    reversed: bool,
}

fn derivative_xy<T: Real>(pts: &[Vec2<T>], order: u32) -> Vec<Vec2<T>> {
    let xs: Vec<T> = pts.iter().map(|p| p[0]).collect();
    let ys: Vec<T> = pts.iter().map(|p| p[1]).collect();
    let dx = T::periodic_derivative(&xs, order);
    let dy = T::periodic_derivative(&ys, order);
    dx.into_iter().zip(dy).map(|(a, b)| Vec2::new(a, b)).collect()
}

impl<T: Real> ClosedCurve<T> {
    /// Builds a curve from samples at `θ_j = 2πj/M`. The parametrisation may
    /// run either way round; the outward normal is chosen from the signed area.
    pub fn from_samples(nodes: Vec<Vec2<T>>, reversed: bool) -> Result<Self> {
        let m = nodes.len();
        if m < 8 {
            return Err(Error::Unsupported(format!("closed curve needs at least 8 nodes, got {m}")));
        }
        if nodes.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite { what: "curve nodes" });
        }
        let d1 = derivative_xy(&nodes, 1);
        let d2 = derivative_xy(&nodes, 2);
        let speed: Vec<T> = d1.iter().map(|d| d.norm()).collect();
        let scale = nodes.iter().fold(T::zero(), |s, p| s.max(p.max_abs())).max(T::one());
        let floor = scale * T::epsilon().sqrt();
        if let Some((node, &s)) = speed.iter().enumerate().find(|(_, &s)| !(s > floor)) {
            return Err(Error::DegenerateChart { node, min_speed: s.to_f64_lossy() });
        }
        let h = T::TAU() / T::from_usize_lossy(m);
        let signed_area = nodes
            .iter()
            .zip(&d1)
            .map(|(p, d)| p.cross(d))
            .fold(T::zero(), |s, v| s + v)
            * h
            * T::lit(0.5);
        // counter-clockwise: outward normal is the tangent rotated clockwise
        let mut sign = if signed_area >= T::zero() { T::one() } else { -T::one() };
        if reversed {
            sign = -sign;
        }
        let tangents: Vec<Vec2<T>> = d1.iter().zip(&speed).map(|(d, &s)| *d * s.recip()).collect();
        let normals: Vec<Vec2<T>> = tangents.iter().map(|t| t.perp_cw() * sign).collect();
        let weights: Vec<T> = speed.iter().map(|&s| s * h).collect();

        // K = −τ ⊗ ∂_s ν with ∂_s differentiated spectrally from nodal ν
        let dnu = derivative_xy(&normals, 1);
        let curvature = tangents
            .iter()
            .zip(&dnu)
            .zip(&speed)
            .map(|((t, dn), &s)| t.outer(&(*dn * s.recip())).scale(-T::one()))
            .collect();

        Ok(Self { nodes, d1, d2, speed, tangents, normals, weights, curvature, reversed })
    }

    pub fn circle(center: Vec2<T>, radius: T, m: usize, reversed: bool) -> Result<Self> {
        super::Shape2::Circle { center: center.0, radius }.curve(m, reversed)
    }

    pub fn ellipse(center: Vec2<T>, a: T, b: T, m: usize, reversed: bool) -> Result<Self> {
        super::Shape2::Ellipse { center: center.0, a, b }.curve(m, reversed)
    }

    pub fn reversed(&self) -> bool {
        self.reversed
    }

    /// Same samples with the opposite orientation flag.
    pub fn flipped(&self) -> Self {
        Self::from_samples(self.nodes.clone(), !self.reversed).expect("already validated")
    }

    pub fn tangents(&self) -> &[Vec2<T>] {
        &self.tangents
    }

    /// `|γ'(θ_j)|`.
    pub fn speed(&self) -> &[T] {
        &self.speed
    }

    /// `γ'(θ_j)`.
    pub fn parameter_derivative(&self) -> &[Vec2<T>] {
        &self.d1
    }

    /// Arclength derivative `f'(θ)/|γ'|` of nodal data.
    pub fn arclength_derivative(&self, f: &[T]) -> Result<Vec<T>> {
        self.check_len(f.len())?;
        Ok(T::periodic_derivative(f, 1).into_iter().zip(&self.speed).map(|(d, &s)| d / s).collect())
    }

    /// `∇_Γ f = (∂_s f) τ` for purely nodal data.
    pub fn tangential_gradient_nodal(&self, f: &[T]) -> Result<Vec<Vec2<T>>> {
        let ds = self.arclength_derivative(f)?;
        Ok(ds.iter().zip(&self.tangents).map(|(&d, t)| *t * d).collect())
    }

    /// `div_Γ u = τ · ∂_s u` for nodal vector data.
    pub fn tangential_divergence_nodal(&self, u: &[Vec2<T>]) -> Result<Vec<T>> {
        self.check_len(u.len())?;
        let du = derivative_xy(u, 1);
        Ok(du
            .iter()
            .zip(&self.tangents)
            .zip(&self.speed)
            .map(|((d, t), &s)| t.dot(d) / s)
            .collect())
    }

    /// Mean curvature from the classical formula `∓(x'y'' − y'x'')/|γ'|³`,
    /// independent of the curvature-matrix route.
    pub fn curvature_classic(&self) -> Vec<T> {
        let orient = self.normals[0].dot(&self.tangents[0].perp_cw());
        self.d1
            .iter()
            .zip(&self.d2)
            .zip(&self.speed)
            .map(|((d1, d2), &s)| -orient * d1.cross(d2) / (s * s * s))
            .collect()
    }

    /// Area enclosed by the curve, `½∮ x × dx`, always non-negative.
    pub fn enclosed_area(&self) -> T {
        let h = T::TAU() / T::from_usize_lossy(self.nodes.len());
        let a: T = self.nodes.iter().zip(&self.d1).map(|(p, d)| p.cross(d)).sum::<T>() * h * T::lit(0.5);
        a.abs()
    }

    /// Maps every node by `f` and rebuilds the chart.
    pub fn map(&self, f: impl Fn(&Vec2<T>) -> Vec2<T>) -> Result<Self> {
        Self::from_samples(self.nodes.iter().map(f).collect(), self.reversed)
    }

    /// Approximate signed distance: nearest-node distance, negative inside.
    /// Accurate to `O(h²)` for node spacing `h`, enough to keep evaluations off Γ.
    pub fn signed_distance(&self, x: &Vec2<T>) -> T {
        let (mut best, mut q) = (T::infinity(), 0);
        for (j, p) in self.nodes.iter().enumerate() {
            let d = (*x - *p).norm_sq();
            if d < best {
                best = d;
                q = j;
            }
        }
        let outward = if self.reversed { -self.normals[q] } else { self.normals[q] };
        let d = best.sqrt();
        if (*x - self.nodes[q]).dot(&outward) < T::zero() {
            -d
        } else {
            d
        }
    }

    /// Even–odd point-in-polygon test against the node polygon.
    pub fn contains(&self, x: &Vec2<T>) -> bool {
        let n = self.nodes.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.nodes[i];
            let b = self.nodes[(i + 1) % n];
            if (a[1] > x[1]) != (b[1] > x[1]) {
                let xc = a[0] + (x[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if x[0] < xc {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Scanline crossings of the node polygon at height `y`, sorted.
    pub fn crossings(&self, y: T) -> Vec<T> {
        let n = self.nodes.len();
        let mut out = Vec::new();
        for i in 0..n {
            let a = self.nodes[i];
            let b = self.nodes[(i + 1) % n];
            if (a[1] > y) != (b[1] > y) {
                out.push(a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
            }
        }
        out.sort_by(|p, q| p.partial_cmp(q).expect("finite crossings"));
        out
    }

    /// Axis-aligned bounding box `(lo, hi)` of the nodes.
    pub fn bounding_box(&self) -> (Vec2<T>, Vec2<T>) {
        let mut lo = self.nodes[0];
        let mut hi = self.nodes[0];
        for p in &self.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.nodes.len() {
            return Err(Error::NodeMismatch { expected: self.nodes.len(), got });
        }
        Ok(())
    }
}

impl<T: Real> Hypersurface<T, 2> for ClosedCurve<T> {
    fn nodes(&self) -> &[Vec2<T>] {
        &self.nodes
    }
    fn weights(&self) -> &[T] {
        &self.weights
    }
    fn normals(&self) -> &[Vec2<T>] {
        &self.normals
    }
    fn curvature_matrices(&self) -> &[Matrix<T, 2>] {
        &self.curvature
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::curvature_structure;

    #[test]
    fn unit_circle_geometry() {
        let c = ClosedCurve::<f64>::circle(Vec2::new(0.0, 0.0), 1.0, 64, false).unwrap();
        assert!((c.measure() - std::f64::consts::TAU).abs() < 1e-12);
        for (x, n) in c.nodes().iter().zip(c.normals()) {
            assert!((*x - *n).max_abs() < 1e-14);
        }
        for k in c.mean_curvature() {
            assert!((k + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clockwise_samples_still_give_outward_normals() {
        let pts: Vec<Vec2<f64>> = (0..64)
            .map(|j| {
                let t = -std::f64::consts::TAU * j as f64 / 64.0;
                Vec2::new(2.0 * t.cos(), 2.0 * t.sin())
            })
            .collect();
        let c = ClosedCurve::from_samples(pts, false).unwrap();
        assert!(c.normals()[0].dot(&c.nodes()[0]) > 0.0);
        assert!((c.mean_curvature()[3] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_chart_rejected() {
        let pts = vec![Vec2::new(1.0, 1.0); 32];
        assert!(matches!(ClosedCurve::<f64>::from_samples(pts, false), Err(Error::DegenerateChart { .. })));
    }

    #[test]
    fn ellipse_curvature_structure_and_classic_formula() {
        let c = ClosedCurve::<f64>::ellipse(Vec2::new(0.3, 0.0), 1.5, 0.7, 256, false).unwrap();
        let (asym, ker) = curvature_structure(&c);
        assert!(asym < 1e-10 && ker < 1e-10);
        for (a, b) in c.mean_curvature().iter().zip(c.curvature_classic()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn contains_and_signed_distance_agree() {
        let c = ClosedCurve::<f64>::circle(Vec2::new(0.0, 0.0), 1.0, 128, false).unwrap();
        assert!(c.contains(&Vec2::new(0.5, 0.2)));
        assert!(!c.contains(&Vec2::new(1.1, 0.0)));
        assert!((c.signed_distance(&Vec2::new(0.5, 0.0)) + 0.5).abs() < 1e-3);
        assert!(c.signed_distance(&Vec2::new(1.5, 0.0)) > 0.0);
    }
}
