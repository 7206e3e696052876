//! Oriented closed hypersurfaces: normals, tangential calculus, curvature and
//! surface quadrature.
//!
//! Orientation: the stored normal `ν⁻` points out of the enclosed region `Ω⁻`.
//! With `K_ij = −δ_i ν_j` the mean curvature `κ = tr K = −div_Γ ν` is negative
//! for a convex inner region (`−1/R` for a circle, `−2/R` for a sphere).

pub mod bulk;
pub mod curve;
pub mod ellipsoid;
pub mod shape;

use crate::fields::{ScalarField, VectorField};
use crate::linalg::{Matrix, Vector};
use crate::quadrature::pairwise_sum;
use crate::{Error, Real, Result};

pub use bulk::{gauss_green, GaussGreenReport, PolarRule, SubcellGrid};
pub use curve::ClosedCurve;
pub use ellipsoid::Ellipsoid;
pub use shape::Shape2;

/// Common interface of 2D curves and 3D ellipsoids.
pub trait Hypersurface<T: Real, const D: usize>: Sync {
    fn nodes(&self) -> &[Vector<T, D>];
    fn weights(&self) -> &[T];
    /// Unit normals pointing out of `Ω⁻`.
    fn normals(&self) -> &[Vector<T, D>];
    /// `K_ij = −δ_i ν_j` per node.
    fn curvature_matrices(&self) -> &[Matrix<T, D>];

    fn len(&self) -> usize {
        self.nodes().len()
    }

    fn is_empty(&self) -> bool {
        self.nodes().is_empty()
    }

    /// Quadrature realisation of the surface measure.
    fn measure(&self) -> T {
        pairwise_sum(self.weights())
    }

    /// `κ = tr K` per node.
    fn mean_curvature(&self) -> Vec<T> {
        self.curvature_matrices().iter().map(|k| k.trace()).collect()
    }

    /// `Σ w_q f_q`; rejects mismatched lengths and non-finite data.
    fn integrate(&self, values: &[T]) -> Result<T> {
        if values.len() != self.len() {
            return Err(Error::NodeMismatch { expected: self.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "surface field" });
        }
        Ok(crate::quadrature::weighted_sum(self.weights(), values))
    }

    /// `Σ w_q f(q, x_q)`.
    fn integrate_with(&self, f: &dyn Fn(usize, &Vector<T, D>) -> T) -> T {
        let terms: Vec<T> = self
            .nodes()
            .iter()
            .enumerate()
            .zip(self.weights())
            .map(|((q, x), &w)| w * f(q, x))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Tangential projector `I − ν⊗ν`.
pub fn tangential_projector<T: Real, const D: usize>(nu: &Vector<T, D>) -> Matrix<T, D> {
    Matrix::identity().sub(&nu.outer(nu))
}

/// `∇_Γ f = (I − ν⊗ν)∇f` at every node, from an ambient extension.
pub fn tangential_gradient<T: Real, const D: usize, S, F>(surface: &S, f: &F) -> Vec<Vector<T, D>>
where
    S: Hypersurface<T, D> + ?Sized,
    F: ScalarField<T, D> + ?Sized,
{
    surface
        .nodes()
        .iter()
        .zip(surface.normals())
        .map(|(x, nu)| tangential_projector(nu).mul_vec(&f.gradient(x)))
        .collect()
}

/// `div_Γ u = Σ_i δ_i u_i = P : ∇u` at every node, from an ambient extension.
pub fn tangential_divergence<T: Real, const D: usize, S, F>(surface: &S, u: &F) -> Vec<T>
where
    S: Hypersurface<T, D> + ?Sized,
    F: VectorField<T, D> + ?Sized,
{
    surface
        .nodes()
        .iter()
        .zip(surface.normals())
        .map(|(x, nu)| tangential_projector(nu).contract(&u.jacobian(x)))
        .collect()
}

/// `|∫_Γ δ_i f + ∫_Γ f κ ν_i|`.
pub fn check_surface_ibp<T: Real, const D: usize, S, F>(surface: &S, f: &F, axis: usize) -> T
where
    S: Hypersurface<T, D> + ?Sized,
    F: ScalarField<T, D> + ?Sized,
{
    let grad = tangential_gradient(surface, f);
    let kappa = surface.mean_curvature();
    let nu = surface.normals();
    let lhs = surface.integrate_with(&|q, _| grad[q][axis]);
    let rhs = surface.integrate_with(&|q, x| f.value(x) * kappa[q] * nu[q][axis]);
    (lhs + rhs).abs()
}

/// Structural residuals of the curvature matrix: `(max|K − Kᵀ|, max|Kν|)`.
pub fn curvature_structure<T: Real, const D: usize, S>(surface: &S) -> (T, T)
where
    S: Hypersurface<T, D> + ?Sized,
{
    let mut asym = T::zero();
    let mut kernel = T::zero();
    for (k, nu) in surface.curvature_matrices().iter().zip(surface.normals()) {
        asym = asym.max(k.sub(&k.transpose()).max_abs());
        kernel = kernel.max(k.mul_vec(nu).max_abs());
    }
    (asym, kernel)
}

/// `max_q ||ν_q| − 1|`.
pub fn normal_defect<T: Real, const D: usize, S>(surface: &S) -> T
where
    S: Hypersurface<T, D> + ?Sized,
{
    surface.normals().iter().fold(T::zero(), |m, n| m.max((n.norm() - T::one()).abs()))
}
