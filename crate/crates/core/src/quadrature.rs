//! Quadrature rules and deterministic reductions.

use crate::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n in f64 first
        let mut x = ((i as f64 + 0.75) / (nf + 0.5) * std::f64::consts::PI).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_f64(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        // polish in the target precision
        let mut xt = T::lit(x);
        for _ in 0..2 {
            let (p, dp) = legendre::<T>(n, xt);
            xt = xt - p / dp;
        }
        let (_, dp) = legendre::<T>(n, xt);
        let w = T::lit(2.0) / ((T::one() - xt * xt) * dp * dp);
        nodes[i] = -xt;
        nodes[n - 1 - i] = xt;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_f64(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let (mut p0, mut p1) = (T::one(), x);
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = T::from_usize_lossy(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// A one-dimensional quadrature rule: nodes and weights.
#[derive(Clone, Debug)]
pub struct Rule1d<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule1d<T> {
    /// Gauss–Legendre mapped to `[a, b]`.
    pub fn gauss(a: T, b: T, n: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(n);
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        Self {
            nodes: x.iter().map(|&xi| mid + half * xi).collect(),
            weights: w.iter().map(|&wi| wi * half).collect(),
        }
    }

    /// Composite Gauss–Legendre with `slabs` equal panels of `per_slab` nodes.
    pub fn composite_gauss(a: T, b: T, slabs: usize, per_slab: usize) -> Self {
        let (x, w) = gauss_legendre::<T>(per_slab);
        let width = (b - a) / T::from_usize_lossy(slabs);
        let half = width * T::lit(0.5);
        let mut nodes = Vec::with_capacity(slabs * per_slab);
        let mut weights = Vec::with_capacity(slabs * per_slab);
        for s in 0..slabs {
            let mid = a + width * (T::from_usize_lossy(s) + T::lit(0.5));
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * *xi);
                weights.push(*wi * half);
            }
        }
        Self { nodes, weights }
    }

    /// Composite midpoint rule with `cells` panels.
    pub fn midpoint(a: T, b: T, cells: usize) -> Self {
        let h = (b - a) / T::from_usize_lossy(cells);
        Self {
            nodes: (0..cells).map(|i| a + h * (T::from_usize_lossy(i) + T::lit(0.5))).collect(),
            weights: vec![h; cells],
        }
    }

    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        let terms: Vec<T> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Pairwise summation; the reduction order depends only on the length.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().fold(T::zero(), |s, &x| s + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Weighted sum `Σ w_i f_i` with pairwise reduction.
pub fn weighted_sum<T: Real>(weights: &[T], values: &[T]) -> T {
    let terms: Vec<T> = weights.iter().zip(values).map(|(&w, &v)| w * v).collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        let rule = Rule1d::<f64>::gauss(0.0, 2.0, 5);
        // degree 9 is exact for 5 nodes
        let val = rule.integrate(|x| x.powi(9));
        assert!((val - 2f64.powi(10) / 10.0).abs() < 1e-11);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_gauss_handles_oscillation() {
        let rule = Rule1d::<f64>::composite_gauss(0.0, std::f64::consts::PI, 8, 4);
        assert!((rule.integrate(|x| x.sin()) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn pairwise_sum_matches_naive_for_small_input() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499500.0);
    }

    #[test]
    fn f32_gauss_rule() {
        let rule = Rule1d::<f32>::gauss(-1.0, 1.0, 4);
        assert!((rule.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-6);
    }
}
