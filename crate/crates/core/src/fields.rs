//! Closed-form ambient fields, stationary and space-time.
//!
//! Every field carries its analytic derivatives; identities are checked
//! against these rather than against finite differences.

use crate::linalg::{Matrix, Vector};
use crate::Real;

pub trait ScalarField<T: Real, const D: usize>: Sync {
    fn value(&self, x: &Vector<T, D>) -> T;
    fn gradient(&self, x: &Vector<T, D>) -> Vector<T, D>;
}

pub trait VectorField<T: Real, const D: usize>: Sync {
    fn value(&self, x: &Vector<T, D>) -> Vector<T, D>;
    /// `J[i][j] = ∂_j f_i`.
    fn jacobian(&self, x: &Vector<T, D>) -> Matrix<T, D>;

    fn divergence(&self, x: &Vector<T, D>) -> T {
        self.jacobian(x).trace()
    }
}

pub trait SpaceTimeScalar<T: Real, const D: usize>: Sync {
    fn value(&self, x: &Vector<T, D>, t: T) -> T;
    fn gradient(&self, x: &Vector<T, D>, t: T) -> Vector<T, D>;
    fn time_derivative(&self, x: &Vector<T, D>, t: T) -> T;
}

pub trait SpaceTimeVector<T: Real, const D: usize>: Sync {
    fn value(&self, x: &Vector<T, D>, t: T) -> Vector<T, D>;
    /// `J[i][j] = ∂_j v_i`.
    fn jacobian(&self, x: &Vector<T, D>, t: T) -> Matrix<T, D>;
    fn time_derivative(&self, x: &Vector<T, D>, t: T) -> Vector<T, D>;

    fn divergence(&self, x: &Vector<T, D>, t: T) -> T {
        self.jacobian(x, t).trace()
    }

    /// Symmetric gradient `(∇v + ∇vᵀ)/2`.
    fn sym_grad(&self, x: &Vector<T, D>, t: T) -> Matrix<T, D> {
        self.jacobian(x, t).sym()
    }
}

/// Stationary scalar field given by a pair of closures.
pub struct FnScalar<F, G> {
    pub f: F,
    pub grad: G,
}

impl<T: Real, const D: usize, F, G> ScalarField<T, D> for FnScalar<F, G>
where
    F: Fn(&Vector<T, D>) -> T + Sync,
    G: Fn(&Vector<T, D>) -> Vector<T, D> + Sync,
{
    fn value(&self, x: &Vector<T, D>) -> T {
        (self.f)(x)
    }
    fn gradient(&self, x: &Vector<T, D>) -> Vector<T, D> {
        (self.grad)(x)
    }
}

/// Stationary vector field given by value and Jacobian closures.
pub struct FnVector<F, J> {
    pub f: F,
    pub jac: J,
}

impl<T: Real, const D: usize, F, J> VectorField<T, D> for FnVector<F, J>
where
    F: Fn(&Vector<T, D>) -> Vector<T, D> + Sync,
    J: Fn(&Vector<T, D>) -> Matrix<T, D> + Sync,
{
    fn value(&self, x: &Vector<T, D>) -> Vector<T, D> {
        (self.f)(x)
    }
    fn jacobian(&self, x: &Vector<T, D>) -> Matrix<T, D> {
        (self.jac)(x)
    }
}

/// Space-time scalar given by value, gradient and time-derivative closures.
pub struct FnSpaceTime<F, G, H> {
    pub f: F,
    pub grad: G,
    pub dt: H,
}

impl<T: Real, const D: usize, F, G, H> SpaceTimeScalar<T, D> for FnSpaceTime<F, G, H>
where
    F: Fn(&Vector<T, D>, T) -> T + Sync,
    G: Fn(&Vector<T, D>, T) -> Vector<T, D> + Sync,
    H: Fn(&Vector<T, D>, T) -> T + Sync,
{
    fn value(&self, x: &Vector<T, D>, t: T) -> T {
        (self.f)(x, t)
    }
    fn gradient(&self, x: &Vector<T, D>, t: T) -> Vector<T, D> {
        (self.grad)(x, t)
    }
    fn time_derivative(&self, x: &Vector<T, D>, t: T) -> T {
        (self.dt)(x, t)
    }
}

/// Freezes a space-time vector field at time `t`.
pub struct AtTime<'a, F: ?Sized, T> {
    pub field: &'a F,
    pub t: T,
}

impl<T: Real, const D: usize, F: SpaceTimeVector<T, D> + ?Sized> VectorField<T, D> for AtTime<'_, F, T> {
    fn value(&self, x: &Vector<T, D>) -> Vector<T, D> {
        self.field.value(x, self.t)
    }
    fn jacobian(&self, x: &Vector<T, D>) -> Matrix<T, D> {
        self.field.jacobian(x, self.t)
    }
    fn divergence(&self, x: &Vector<T, D>) -> T {
        self.field.divergence(x, self.t)
    }
}

/// Affine field `A x + b`.
#[derive(Clone, Copy, Debug)]
pub struct Affine<T: Real, const D: usize> {
    pub matrix: Matrix<T, D>,
    pub offset: Vector<T, D>,
}

impl<T: Real, const D: usize> Affine<T, D> {
    pub fn constant(c: Vector<T, D>) -> Self {
        Self { matrix: Matrix::zero(), offset: c }
    }

    /// `s · x`.
    pub fn scaled_position(s: T) -> Self {
        Self { matrix: Matrix::identity().scale(s), offset: Vector::zero() }
    }
}

impl<T: Real> Affine<T, 2> {
    /// Rigid rotation field `(-x₂, x₁)` about the origin.
    pub fn rotation() -> Self {
        Self {
            matrix: Matrix([[T::zero(), -T::one()], [T::one(), T::zero()]]),
            offset: Vector::zero(),
        }
    }
}

impl<T: Real, const D: usize> VectorField<T, D> for Affine<T, D> {
    fn value(&self, x: &Vector<T, D>) -> Vector<T, D> {
        self.matrix.mul_vec(x) + self.offset
    }
    fn jacobian(&self, _x: &Vector<T, D>) -> Matrix<T, D> {
        self.matrix
    }
}

impl<T: Real, const D: usize> SpaceTimeVector<T, D> for Affine<T, D> {
    fn value(&self, x: &Vector<T, D>, _t: T) -> Vector<T, D> {
        self.matrix.mul_vec(x) + self.offset
    }
    fn jacobian(&self, _x: &Vector<T, D>, _t: T) -> Matrix<T, D> {
        self.matrix
    }
    fn time_derivative(&self, _x: &Vector<T, D>, _t: T) -> Vector<T, D> {
        Vector::zero()
    }
}

/// Linear scalar `a · x + b`.
#[derive(Clone, Copy, Debug)]
pub struct LinearScalar<T: Real, const D: usize> {
    pub slope: Vector<T, D>,
    pub offset: T,
}

impl<T: Real, const D: usize> ScalarField<T, D> for LinearScalar<T, D> {
    fn value(&self, x: &Vector<T, D>) -> T {
        self.slope.dot(x) + self.offset
    }
    fn gradient(&self, _x: &Vector<T, D>) -> Vector<T, D> {
        self.slope
    }
}

/// Central finite-difference divergence with one Richardson step:
/// `(4 D(h/2) - D(h)) / 3`.
pub fn fd_divergence<T: Real, const D: usize>(
    f: impl Fn(&Vector<T, D>) -> Vector<T, D>,
    x: &Vector<T, D>,
    h: T,
) -> T {
    let central = |step: T| {
        let mut s = T::zero();
        for i in 0..D {
            let e = Vector::<T, D>::unit(i) * step;
            s = s + (f(&(*x + e))[i] - f(&(*x - e))[i]) / (T::lit(2.0) * step);
        }
        s
    };
    (T::lit(4.0) * central(h * T::lit(0.5)) - central(h)) / T::lit(3.0)
}

/// Central finite-difference Jacobian `J[i][j] = ∂_j f_i` with one Richardson step.
pub fn fd_jacobian<T: Real, const D: usize>(
    f: impl Fn(&Vector<T, D>) -> Vector<T, D>,
    x: &Vector<T, D>,
    h: T,
) -> Matrix<T, D> {
    let central = |step: T| {
        let mut m = Matrix::<T, D>::zero();
        for j in 0..D {
            let e = Vector::<T, D>::unit(j) * step;
            let d = (f(&(*x + e)) - f(&(*x - e))) * (T::lit(0.5) / step);
            for i in 0..D {
                m[(i, j)] = d[i];
            }
        }
        m
    };
    central(h * T::lit(0.5)).scale(T::lit(4.0 / 3.0)).sub(&central(h).scale(T::lit(1.0 / 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vec2;

    #[test]
    fn fd_divergence_of_rotation_is_zero() {
        let r = Affine::<f64, 2>::rotation();
        let d = fd_divergence(|x| VectorField::value(&r, x), &Vec2::new(0.3, -0.2), 1e-4);
        assert!(d.abs() < 1e-10);
    }

    #[test]
    fn fd_jacobian_matches_analytic() {
        let f = FnVector {
            f: |x: &Vector<f64, 2>| Vec2::new(x[0] * x[1], x[0].sin()),
            jac: |x: &Vector<f64, 2>| Matrix([[x[1], x[0]], [x[0].cos(), 0.0]]),
        };
        let x = Vec2::new(0.7, 1.3);
        let fd = fd_jacobian(|y| f.value(y), &x, 1e-3);
        assert!(fd.sub(&f.jacobian(&x)).max_abs() < 1e-10);
    }
}
