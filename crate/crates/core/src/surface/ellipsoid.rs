//! Axis-aligned ellipsoids in ℝ³ with closed-form normals and curvature and a
//! product quadrature (Gauss in `cos θ`, trapezoid in `φ`).

use super::Hypersurface;
use crate::linalg::{Matrix, Vec3};
use crate::quadrature::gauss_legendre;
use crate::{Error, Real, Result};

#[derive(Clone, Debug)]
pub struct Ellipsoid<T: Real> {
    center: Vec3<T>,
    axes: [T; 3],
    nodes: Vec<Vec3<T>>,
    weights: Vec<T>,
    normals: Vec<Vec3<T>>,
    curvature: Vec<Matrix<T, 3>>,
    reversed: bool,
}

impl<T: Real> Ellipsoid<T> {
    /// `n_polar` Gauss nodes in `cos θ` times `n_azimuth` trapezoid nodes in `φ`.
    pub fn new(center: Vec3<T>, axes: [T; 3], n_polar: usize, n_azimuth: usize, reversed: bool) -> Result<Self> {
        if axes.iter().any(|&a| !(a > T::zero())) {
            return Err(Error::DegenerateChart { node: 0, min_speed: 0.0 });
        }
        if n_polar == 0 || n_azimuth < 3 {
            return Err(Error::Unsupported("ellipsoid quadrature needs n_polar ≥ 1, n_azimuth ≥ 3".into()));
        }
        let (us, wu) = gauss_legendre::<T>(n_polar);
        let hphi = T::TAU() / T::from_usize_lossy(n_azimuth);
        let [a, b, c] = axes;
        let sign = if reversed { -T::one() } else { T::one() };
        let cap = n_polar * n_azimuth;
        let mut nodes = Vec::with_capacity(cap);
        let mut weights = Vec::with_capacity(cap);
        let mut normals = Vec::with_capacity(cap);
        let mut curvature = Vec::with_capacity(cap);
        let hess = Matrix::from_fn(|i, j| if i == j { T::lit(2.0) / (axes[i] * axes[i]) } else { T::zero() });
        for (&u, &w) in us.iter().zip(&wu) {
            let s = (T::one() - u * u).sqrt();
            for k in 0..n_azimuth {
                let phi = hphi * T::from_usize_lossy(k);
                let (sp, cp) = phi.sin_cos();
                let d = Vec3::new(a * s * cp, b * s * sp, c * u);
                // x_u × x_φ scaled by s removes the 1/s of x_u
                let xu_s = Vec3::new(-a * u * cp, -b * u * sp, c * s);
                let xphi = Vec3::new(-a * s * sp, b * s * cp, T::zero());
                let area = xu_s.cross(&xphi).norm() / s;
                let grad = Vec3::new(d[0] / (a * a), d[1] / (b * b), d[2] / (c * c)) * T::lit(2.0);
                let gn = grad.norm();
                let nu = grad * gn.recip();
                let p = Matrix::identity().sub(&nu.outer(&nu));
                // K = −P ∇²g P / |∇g|; flipping ν flips K
                let k = p.mul_mat(&hess).mul_mat(&p).scale(-sign / gn);
                nodes.push(center + d);
                weights.push(w * hphi * area);
                normals.push(nu * sign);
                curvature.push(k);
            }
        }
        Ok(Self { center, axes, nodes, weights, normals, curvature, reversed })
    }

    pub fn sphere(center: Vec3<T>, radius: T, n_polar: usize, n_azimuth: usize) -> Result<Self> {
        Self::new(center, [radius; 3], n_polar, n_azimuth, false)
    }

    pub fn center(&self) -> Vec3<T> {
        self.center
    }

    pub fn axes(&self) -> [T; 3] {
        self.axes
    }

    pub fn reversed(&self) -> bool {
        self.reversed
    }

    /// Level function `Σ (x_i − c_i)²/a_i² − 1`.
    pub fn level(&self, x: &Vec3<T>) -> T {
        let d = *x - self.center;
        (0..3).map(|i| (d[i] / self.axes[i]).powi(2)).sum::<T>() - T::one()
    }

    pub fn volume(&self) -> T {
        T::lit(4.0 / 3.0) * T::PI() * self.axes[0] * self.axes[1] * self.axes[2]
    }

    /// Principal curvatures per node: the two tangential eigenvalues of `K`,
    /// recovered from its trace and Frobenius norm.
    pub fn principal_curvatures(&self) -> Vec<(T, T)> {
        self.curvature
            .iter()
            .map(|k| {
                let tr = k.trace();
                let fro = k.contract(k);
                let disc = (fro * T::lit(2.0) - tr * tr).max(T::zero()).sqrt();
                ((tr - disc) * T::lit(0.5), (tr + disc) * T::lit(0.5))
            })
            .collect()
    }
}

impl<T: Real> Hypersurface<T, 3> for Ellipsoid<T> {
    fn nodes(&self) -> &[Vec3<T>] {
        &self.nodes
    }
    fn weights(&self) -> &[T] {
        &self.weights
    }
    fn normals(&self) -> &[Vec3<T>] {
        &self.normals
    }
    fn curvature_matrices(&self) -> &[Matrix<T, 3>] {
        &self.curvature
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_area_and_curvature() {
        let r = 1.7;
        let s = Ellipsoid::<f64>::sphere(Vec3::new(0.1, 0.2, 0.3), r, 64, 128).unwrap();
        assert!((s.measure() - 4.0 * std::f64::consts::PI * r * r).abs() < 1e-10);
        for k in s.mean_curvature() {
            assert!((k + 2.0 / r).abs() < 1e-12);
        }
        for (k1, k2) in s.principal_curvatures() {
            assert!((k1 + 1.0 / r).abs() < 1e-6 && (k2 + 1.0 / r).abs() < 1e-6);
        }
    }

    #[test]
    fn ellipsoid_normals_are_unit_and_outward() {
        let e = Ellipsoid::<f64>::new(Vec3::new(0.0, 0.0, 0.0), [1.2, 0.8, 0.6], 16, 32, false).unwrap();
        for (x, n) in e.nodes().iter().zip(e.normals()) {
            assert!((n.norm() - 1.0).abs() < 1e-14);
            assert!(x.dot(n) > 0.0);
        }
    }
}
