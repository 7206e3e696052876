//! Small fixed-size vectors/matrices and the two linear solvers the crate needs:
//! dense ridge least squares (Householder QR) and conjugate gradients.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<T, const D: usize>(pub [T; D]);

pub type Vec2<T> = Vector<T, 2>;
pub type Vec3<T> = Vector<T, 3>;

impl<T: Real, const D: usize> Default for Vector<T, D> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real, const D: usize> Vector<T, D> {
    pub fn zero() -> Self {
        Vector([T::zero(); D])
    }

    pub fn from_fn(f: impl FnMut(usize) -> T) -> Self {
        Vector(std::array::from_fn(f))
    }

    pub fn unit(axis: usize) -> Self {
        Self::from_fn(|i| if i == axis { T::one() } else { T::zero() })
    }

    pub fn dot(&self, other: &Self) -> T {
        let mut s = T::zero();
        for i in 0..D {
            s = s + self.0[i] * other.0[i];
        }
        s
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Self {
        *self * self.norm().recip()
    }

    pub fn outer(&self, other: &Self) -> Matrix<T, D> {
        Matrix::from_fn(|i, j| self.0[i] * other.0[j])
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl<T: Real> Vector<T, 2> {
    pub fn new(x: T, y: T) -> Self {
        Vector([x, y])
    }

    pub fn x(&self) -> T {
        self.0[0]
    }

    pub fn y(&self) -> T {
        self.0[1]
    }

    /// z-component of the planar cross product.
    pub fn cross(&self, other: &Self) -> T {
        self.0[0] * other.0[1] - self.0[1] * other.0[0]
    }

    /// Rotation by -90 degrees: (y, -x).
    pub fn perp_cw(&self) -> Self {
        Vector([self.0[1], -self.0[0]])
    }
}

impl<T: Real> Vector<T, 3> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vector([x, y, z])
    }

    pub fn cross(&self, o: &Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        Vector([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }
}

impl<T, const D: usize> Index<usize> for Vector<T, D> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T, const D: usize> IndexMut<usize> for Vector<T, D> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real, const D: usize> Add for Vector<T, D> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i| self.0[i] + o.0[i])
    }
}

impl<T: Real, const D: usize> AddAssign for Vector<T, D> {
    fn add_assign(&mut self, o: Self) {
        for i in 0..D {
            self.0[i] = self.0[i] + o.0[i];
        }
    }
}

impl<T: Real, const D: usize> Sub for Vector<T, D> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i| self.0[i] - o.0[i])
    }
}

impl<T: Real, const D: usize> SubAssign for Vector<T, D> {
    fn sub_assign(&mut self, o: Self) {
        for i in 0..D {
            self.0[i] = self.0[i] - o.0[i];
        }
    }
}

impl<T: Real, const D: usize> Mul<T> for Vector<T, D> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::from_fn(|i| self.0[i] * s)
    }
}

impl<T: Real, const D: usize> Neg for Vector<T, D> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i| -self.0[i])
    }
}

/// Square matrix stored row-major; `m[(i, j)]` is row `i`, column `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<T, const D: usize>(pub [[T; D]; D]);

pub type Mat2<T> = Matrix<T, 2>;
pub type Mat3<T> = Matrix<T, 3>;

impl<T: Real, const D: usize> Matrix<T, D> {
    pub fn zero() -> Self {
        Matrix([[T::zero(); D]; D])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Matrix(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> T {
        (0..D).fold(T::zero(), |s, i| s + self.0[i][i])
    }

    pub fn mul_vec(&self, v: &Vector<T, D>) -> Vector<T, D> {
        Vector::from_fn(|i| (0..D).fold(T::zero(), |s, j| s + self.0[i][j] * v.0[j]))
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| (0..D).fold(T::zero(), |s, k| s + self.0[i][k] * o.0[k][j]))
    }

    /// Frobenius inner product `A : B`.
    pub fn contract(&self, o: &Self) -> T {
        let mut s = T::zero();
        for i in 0..D {
            for j in 0..D {
                s = s + self.0[i][j] * o.0[i][j];
            }
        }
        s
    }

    pub fn sym(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(|i, j| half * (self.0[i][j] + self.0[j][i]))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in &self.0 {
            for x in row {
                m = m.max(x.abs());
            }
        }
        m
    }

    /// Determinant, for `D <= 3`.
    pub fn det(&self) -> T {
        let a = &self.0;
        match D {
            1 => a[0][0],
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            3 => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
            _ => unimplemented!("determinant only for D <= 3"),
        }
    }

    /// Inverse via the adjugate, for `D <= 3`. `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let a = &self.0;
        let inv_det = det.recip();
        let adj = match D {
            1 => Self::from_fn(|_, _| T::one()),
            2 => Self::from_fn(|i, j| match (i, j) {
                (0, 0) => a[1][1],
                (0, 1) => -a[0][1],
                (1, 0) => -a[1][0],
                _ => a[0][0],
            }),
            3 => Self::from_fn(|i, j| {
                // cofactor of (j, i)
                let (r0, r1) = others3(j);
                let (c0, c1) = others3(i);
                let m = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
                if (i + j) % 2 == 0 {
                    m
                } else {
                    -m
                }
            }),
            _ => return None,
        };
        Some(adj.scale(inv_det))
    }

    /// Singular values of a 2x2 matrix, largest first.
    pub fn singular_values_2x2(&self) -> (T, T) {
        assert_eq!(D, 2);
        let a = &self.0;
        let ata = [
            a[0][0] * a[0][0] + a[1][0] * a[1][0],
            a[0][0] * a[0][1] + a[1][0] * a[1][1],
            a[0][1] * a[0][1] + a[1][1] * a[1][1],
        ];
        let tr = ata[0] + ata[2];
        let det = ata[0] * ata[2] - ata[1] * ata[1];
        let disc = (tr * tr * T::lit(0.25) - det).max(T::zero()).sqrt();
        let l1 = tr * T::lit(0.5) + disc;
        let l2 = (tr * T::lit(0.5) - disc).max(T::zero());
        (l1.sqrt(), l2.sqrt())
    }
}

fn others3(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

impl<T, const D: usize> Index<(usize, usize)> for Matrix<T, D> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T, const D: usize> IndexMut<(usize, usize)> for Matrix<T, D> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

/// Dense row-major matrix used by the least-squares solver.
#[derive(Clone, Debug)]
pub struct DenseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |s, &x| s + x * x).sqrt()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).fold(T::zero(), |s, (&a, &b)| s + a * b)
            })
            .collect()
    }
}

/// Minimizes `|A x - b|^2 + ridge |x|^2` with Householder QR on the stacked
/// system `[A; sqrt(ridge) I]`. Returns `None` if the factorization breaks down.
pub fn ridge_least_squares<T: Real>(a: &DenseMatrix<T>, b: &[T], ridge: T) -> Option<Vec<T>> {
    let n = a.cols;
    let m = a.rows + if ridge > T::zero() { n } else { 0 };
    if m < n {
        return None;
    }
    // column-major copy for cache-friendly Householder sweeps
    let mut cols: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut c: Vec<T> = (0..a.rows).map(|i| a.get(i, j)).collect();
            if ridge > T::zero() {
                c.extend((0..n).map(|k| if k == j { ridge.sqrt() } else { T::zero() }));
            }
            c
        })
        .collect();
    let mut rhs: Vec<T> = b.to_vec();
    if ridge > T::zero() {
        rhs.extend(std::iter::repeat(T::zero()).take(n));
    }

    for k in 0..n {
        let norm = cols[k][k..].iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        if norm == T::zero() || !norm.is_finite() {
            return None;
        }
        let alpha = if cols[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = cols[k][k..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm_sq = v.iter().fold(T::zero(), |s, &x| s + x * x);
        if vnorm_sq == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for col in cols.iter_mut().skip(k) {
            let dot = v.iter().zip(&col[k..]).fold(T::zero(), |s, (&a, &b)| s + a * b);
            let f = two * dot / vnorm_sq;
            for (x, &vi) in col[k..].iter_mut().zip(&v) {
                *x = *x - f * vi;
            }
        }
        let dot = v.iter().zip(&rhs[k..]).fold(T::zero(), |s, (&a, &b)| s + a * b);
        let f = two * dot / vnorm_sq;
        for (x, &vi) in rhs[k..].iter_mut().zip(&v) {
            *x = *x - f * vi;
        }
    }

    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s = s - cols[j][i] * x[j];
        }
        let d = cols[i][i];
        if d == T::zero() {
            return None;
        }
        x[i] = s / d;
    }
    Some(x)
}

/// Outcome of a conjugate-gradient solve.
#[derive(Clone, Debug)]
pub struct CgOutcome<T> {
    pub iterations: usize,
    pub residual_norm: T,
    pub converged: bool,
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// semi-definite operator. `project` is applied to every residual and search
/// direction and is used to remove a known nullspace (e.g. constants).
pub fn conjugate_gradient<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    diag: &[T],
    rhs: &[T],
    x: &mut [T],
    project: impl Fn(&mut [T]),
    rel_tol: T,
    max_iter: usize,
) -> CgOutcome<T> {
    let n = rhs.len();
    let mut ax = vec![T::zero(); n];
    apply(x, &mut ax);
    let mut r: Vec<T> = rhs.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
    project(&mut r);
    let b_norm = rhs.iter().fold(T::zero(), |s, &v| s + v * v).sqrt().max(T::min_positive_value());
    let inv_diag: Vec<T> = diag
        .iter()
        .map(|&d| if d > T::zero() { d.recip() } else { T::one() })
        .collect();
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&a, &b)| a * b).collect();
    project(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt();
    let mut it = 0;
    while it < max_iter && res > rel_tol * b_norm {
        apply(&p, &mut ax);
        let pap = dot(&p, &ax);
        if pap <= T::zero() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ax[i];
        }
        project(&mut r);
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        project(&mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        res = dot(&r, &r).sqrt();
        it += 1;
    }
    CgOutcome { iterations: it, residual_norm: res, converged: res <= rel_tol * b_norm }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_3x3_round_trip() {
        let m = Matrix::<f64, 3>([[2.0, 1.0, 0.5], [0.0, 3.0, -1.0], [1.0, 0.0, 4.0]]);
        let inv = m.inverse().unwrap();
        let id = m.mul_mat(&inv);
        assert!(id.sub(&Mat3::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn singular_values_of_shear() {
        let m = Matrix::<f64, 2>([[1.0, 1.0], [0.0, 1.0]]);
        let (s1, s2) = m.singular_values_2x2();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((s1 - golden).abs() < 1e-14);
        assert!((s2 - 1.0 / golden).abs() < 1e-14);
    }

    #[test]
    fn least_squares_recovers_line_fit() {
        // y = 1 + 2x sampled exactly
        let xs: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];
        let mut a = DenseMatrix::zeros(5, 2);
        let mut b = Vec::new();
        for (i, &x) in xs.iter().enumerate() {
            a.set(i, 0, 1.0);
            a.set(i, 1, x);
            b.push(1.0 + 2.0 * x);
        }
        let sol = ridge_least_squares(&a, &b, 0.0).unwrap();
        assert!((sol[0] - 1.0).abs() < 1e-13 && (sol[1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn cg_solves_spd_tridiagonal() {
        let n = 50;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut v = 3.0 * x[i];
                if i > 0 {
                    v -= x[i - 1];
                }
                if i + 1 < n {
                    v -= x[i + 1];
                }
                y[i] = v;
            }
        };
        let rhs = vec![1.0; n];
        let mut x = vec![0.0; n];
        let out = conjugate_gradient(apply, &vec![3.0; n], &rhs, &mut x, |_| {}, 1e-13, 500);
        assert!(out.converged);
        let mut y = vec![0.0; n];
        apply(&x, &mut y);
        assert!(y.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }
}
