//! Per-phase pressure recovery by least-squares matching of a target gradient
//! on a node grid, plus one-sided evaluation by local quadratic fits.

use std::collections::VecDeque;

use serde::Serialize;

use crate::linalg::{conjugate_gradient, ridge_least_squares, DenseMatrix, Vec2};
use crate::weak_form::Phase;
use crate::{Error, Real, Result};

/// Fewest same-phase nodes accepted for a phase or a fitting stencil.
pub const MIN_PHASE_POINTS: usize = 10;

/// Uniform node grid `x_ij = lo + h(i, j)`, `i < nx`, `j < ny`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeGrid<T> {
    pub lo: Vec2<T>,
    pub h: T,
    pub nx: usize,
    pub ny: usize,
}

impl<T: Real> NodeGrid<T> {
    /// Grid on `[lo, hi]` with spacing at most `h` (rounded so nodes hit `hi`).
    pub fn covering(lo: Vec2<T>, hi: Vec2<T>, h: T) -> Self {
        let cells = |k: usize| ((hi[k] - lo[k]) / h).round().to_usize().unwrap_or(1).max(1);
        let (cx, cy) = (cells(0), cells(1));
        let h = (hi[0] - lo[0]) / T::from_usize_lossy(cx);
        Self { lo, h, nx: cx + 1, ny: cy + 1 }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn point(&self, i: usize, j: usize) -> Vec2<T> {
        self.lo + Vec2::new(T::from_usize_lossy(i), T::from_usize_lossy(j)) * self.h
    }

    fn point_of(&self, k: usize) -> Vec2<T> {
        self.point(k % self.nx, k / self.nx)
    }

    /// Trapezoid weight of node `(i, j)`.
    fn weight(&self, i: usize, j: usize) -> T {
        let half = |k: usize, n: usize| if k == 0 || k + 1 == n { T::lit(0.5) } else { T::one() };
        half(i, self.nx) * half(j, self.ny) * self.h * self.h
    }
}

/// Nodal pressure values, each belonging to the phase of its node.
#[derive(Clone, Debug)]
pub struct PressureField<T> {
    pub grid: NodeGrid<T>,
    pub phase: Vec<Phase>,
    pub values: Vec<T>,
}

impl<T: Real> PressureField<T> {
    pub fn count(&self, phase: Phase) -> usize {
        self.phase.iter().filter(|&&p| p == phase).count()
    }

    /// Value at `x` of the quadratic least-squares fit to the same-phase
    /// nodes in the 5×5 block around the nearest node.
    pub fn eval(&self, x: &Vec2<T>, phase: Phase) -> Result<T> {
        let g = &self.grid;
        let rel = (*x - g.lo) * g.h.recip();
        let clamp = |v: T, n: usize| v.round().to_i64().unwrap_or(0).clamp(0, n as i64 - 1);
        let (i0, j0) = (clamp(rel[0], g.nx), clamp(rel[1], g.ny));
        let mut rows = Vec::with_capacity(25);
        for j in (j0 - 2).max(0)..=(j0 + 2).min(g.ny as i64 - 1) {
            for i in (i0 - 2).max(0)..=(i0 + 2).min(g.nx as i64 - 1) {
                let k = g.index(i as usize, j as usize);
                if self.phase[k] == phase {
                    let d = (g.point(i as usize, j as usize) - *x) * g.h.recip();
                    rows.push(([T::one(), d[0], d[1], d[0] * d[0], d[0] * d[1], d[1] * d[1]], self.values[k]));
                }
            }
        }
        let node = g.index(i0 as usize, j0 as usize);
        if rows.len() < MIN_PHASE_POINTS {
            return Err(Error::Stencil { node });
        }
        let mut a = DenseMatrix::zeros(rows.len(), 6);
        let mut b = Vec::with_capacity(rows.len());
        for (r, (basis, v)) in rows.iter().enumerate() {
            for (c, &e) in basis.iter().enumerate() {
                a.set(r, c, e);
            }
            b.push(*v);
        }
        ridge_least_squares(&a, &b, T::zero()).map(|c| c[0]).ok_or(Error::Stencil { node })
    }

    /// `p(0) = 3p(h) − 3p(2h) + p(3h)` from samples at `x + k h dir`.
    pub fn one_sided_trace(
        &self,
        x: &Vec2<T>,
        dir: &Vec2<T>,
        phase: Phase,
        classify: &dyn Fn(&Vec2<T>) -> Phase,
        node: usize,
    ) -> Result<T> {
        let mut s = [T::zero(); 3];
        for (k, v) in s.iter_mut().enumerate() {
            let y = *x + *dir * (self.grid.h * T::from_usize_lossy(k + 1));
            // a sample in the wrong phase means the ray re-crosses the interface
            if classify(&y) != phase {
                return Err(Error::Stencil { node });
            }
            *v = self.eval(&y, phase)?;
        }
        Ok(T::lit(3.0) * s[0] - T::lit(3.0) * s[1] + s[2])
    }

    pub fn add_constant(&mut self, phase: Option<Phase>, c: T) {
        for (v, p) in self.values.iter_mut().zip(&self.phase) {
            if phase.is_none_or(|q| q == *p) {
                *v = *v + c;
            }
        }
    }

    /// `∫_Ω p` by trapezoid weights rescaled per phase so that each phase's
    /// weights sum to its exact area; exact for phase-wise constants.
    pub fn integral(&self, area_minus: T) -> T {
        let g = &self.grid;
        let mut sums = [T::zero(); 2];
        let mut weights = [T::zero(); 2];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.index(i, j);
                let s = usize::from(self.phase[k] == Phase::Plus);
                let w = g.weight(i, j);
                sums[s] = sums[s] + w * self.values[k];
                weights[s] = weights[s] + w;
            }
        }
        let total = g.h * g.h * T::from_usize_lossy((g.nx - 1) * (g.ny - 1));
        let areas = [area_minus, total - area_minus];
        (0..2).filter(|&s| weights[s] > T::zero()).map(|s| sums[s] * areas[s] / weights[s]).sum()
    }
}

/// Consistency and convergence data of the least-squares solve.
#[derive(Clone, Debug, Serialize)]
pub struct LsqDiagnostics<T> {
    /// `max |∮F·dl| / h²` over cells with all corners in one phase.
    pub curl_max: T,
    /// RMS over edges of `(p_b − p_a − ∫F·dl)/h`.
    pub lsq_residual: T,
    pub cg_iterations: usize,
    pub cg_converged: bool,
    pub points_minus: usize,
    pub points_plus: usize,
    pub warning: Option<String>,
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::Minus => "minus",
        Phase::Plus => "plus",
    }
}

/// Nodal `p` per phase minimizing `Σ_e (p_b − p_a − ∫_e F·dl)²` over grid edges
/// whose endpoints and midpoint share a phase. Edge integrals use Simpson's rule.
/// The nullspace is one constant per connected component, fixed at mean zero.
pub fn associated_pressure<T: Real>(
    grid: NodeGrid<T>,
    classify: &(dyn Fn(&Vec2<T>) -> Phase + Sync),
    target: &(dyn Fn(&Vec2<T>, Phase) -> Vec2<T> + Sync),
    curl_tolerance: T,
) -> Result<(PressureField<T>, LsqDiagnostics<T>)> {
    let n = grid.len();
    let phase: Vec<Phase> = (0..n).map(|k| classify(&grid.point_of(k))).collect();
    for ph in [Phase::Minus, Phase::Plus] {
        let points = phase.iter().filter(|&&p| p == ph).count();
        if points < MIN_PHASE_POINTS {
            return Err(Error::Resolution { phase: phase_name(ph), points, needed: MIN_PHASE_POINTS });
        }
    }
    let h = grid.h;
    let six = T::lit(6.0);
    let node_f: Vec<Vec2<T>> = (0..n).map(|k| target(&grid.point_of(k), phase[k])).collect();
    // gx[k]: edge k → k+1 (x direction), gy[k]: edge k → k+nx; NaN when absent
    let edge = |a: usize, b: usize, axis: usize| -> T {
        if phase[a] != phase[b] {
            return T::nan();
        }
        let mid = (grid.point_of(a) + grid.point_of(b)) * T::lit(0.5);
        if classify(&mid) != phase[a] {
            return T::nan();
        }
        let fm = target(&mid, phase[a]);
        h * (node_f[a][axis] + fm[axis] * T::lit(4.0) + node_f[b][axis]) / six
    };
    let mut gx = vec![T::nan(); n];
    let mut gy = vec![T::nan(); n];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = grid.index(i, j);
            if i + 1 < grid.nx {
                gx[k] = edge(k, k + 1, 0);
            }
            if j + 1 < grid.ny {
                gy[k] = edge(k, k + grid.nx, 1);
            }
        }
    }
    let edges: Vec<(usize, usize, T)> = (0..n)
        .flat_map(|k| {
            let a = (!gx[k].is_nan()).then(|| (k, k + 1, gx[k]));
            let b = (!gy[k].is_nan()).then(|| (k, k + grid.nx, gy[k]));
            a.into_iter().chain(b)
        })
        .collect();

    let mut adj: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    for &(a, b, g) in &edges {
        adj[a].push((b, g));
        adj[b].push((a, -g));
    }
    // spanning-tree integration gives the initial guess and the components
    let mut comp = vec![usize::MAX; n];
    let mut p = vec![T::zero(); n];
    let mut ncomp = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = ncomp;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &(b, g) in &adj[a] {
                if comp[b] == usize::MAX {
                    comp[b] = ncomp;
                    p[b] = p[a] + g;
                    queue.push_back(b);
                }
            }
        }
        ncomp += 1;
    }
    let mut comp_size = vec![0usize; ncomp];
    for &c in &comp {
        comp_size[c] += 1;
    }
    let project = |x: &mut [T]| {
        let mut sums = vec![T::zero(); ncomp];
        for (v, &c) in x.iter().zip(&comp) {
            sums[c] = sums[c] + *v;
        }
        for (v, &c) in x.iter_mut().zip(&comp) {
            *v = *v - sums[c] / T::from_usize_lossy(comp_size[c]);
        }
    };
    let apply = |x: &[T], out: &mut [T]| {
        for (k, o) in out.iter_mut().enumerate() {
            *o = adj[k].iter().fold(T::zero(), |s, &(b, _)| s + x[k] - x[b]);
        }
    };
    let diag: Vec<T> = adj.iter().map(|a| T::from_usize_lossy(a.len())).collect();
    let mut rhs = vec![T::zero(); n];
    for &(a, b, g) in &edges {
        rhs[a] = rhs[a] - g;
        rhs[b] = rhs[b] + g;
    }
    project(&mut p);
    let cg = conjugate_gradient(apply, &diag, &rhs, &mut p, project, T::lit(1e-12), 20 * (grid.nx + grid.ny));

    let mut curl_max = T::zero();
    for j in 0..grid.ny.saturating_sub(1) {
        for i in 0..grid.nx.saturating_sub(1) {
            let k = grid.index(i, j);
            let (bottom, left, top, right) = (gx[k], gy[k], gx[k + grid.nx], gy[k + 1]);
            if [bottom, left, top, right].iter().any(|v| v.is_nan()) {
                continue;
            }
            curl_max = curl_max.max(((bottom + right - top - left) / (h * h)).abs());
        }
    }
    let sq = edges.iter().fold(T::zero(), |s, &(a, b, g)| {
        let r = (p[b] - p[a] - g) / h;
        s + r * r
    });
    let lsq_residual = (sq / T::from_usize_lossy(edges.len().max(1))).sqrt();
    let warning = (curl_max > curl_tolerance).then(|| {
        format!(
            "target field is not a gradient: max cell curl {:.3e} exceeds {:.1e}",
            curl_max.to_f64_lossy(),
            curl_tolerance.to_f64_lossy()
        )
    });
    let field = PressureField { grid, phase, values: p };
    let diagnostics = LsqDiagnostics {
        curl_max,
        lsq_residual,
        cg_iterations: cg.iterations,
        cg_converged: cg.converged,
        points_minus: field.count(Phase::Minus),
        points_plus: field.count(Phase::Plus),
        warning,
    };
    Ok((field, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(x: &Vec2<f64>) -> Phase {
        if x.norm() < 1.0 {
            Phase::Minus
        } else {
            Phase::Plus
        }
    }

    #[test]
    fn manufactured_bilinear_pressure() {
        let grid = NodeGrid::covering(Vec2::new(-1.5, -1.5), Vec2::new(1.5, 1.5), 1.0 / 32.0);
        let target = |x: &Vec2<f64>, p: Phase| match p {
            Phase::Minus => Vec2::new(x[1], x[0]),
            Phase::Plus => Vec2::new(1.0, 0.0),
        };
        let (field, diag) = associated_pressure(grid, &disk, &target, 1e-6).unwrap();
        assert!(diag.curl_max < 1e-10 && diag.warning.is_none());
        // p⁻ − x₁x₂ is one constant
        let off: Vec<f64> = (0..grid.len())
            .filter(|&k| field.phase[k] == Phase::Minus)
            .map(|k| {
                let x = grid.point_of(k);
                field.values[k] - x[0] * x[1]
            })
            .collect();
        let spread = off.iter().cloned().fold(f64::MIN, f64::max) - off.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-10, "{spread}");
        let x = Vec2::new(0.31, -0.47);
        assert!((field.eval(&x, Phase::Minus).unwrap() - x[0] * x[1] - off[0]).abs() < 1e-10);
    }

    #[test]
    fn rotation_target_has_curl_two() {
        let grid = NodeGrid::covering(Vec2::new(-1.5, -1.5), Vec2::new(1.5, 1.5), 1.0 / 16.0);
        let target = |x: &Vec2<f64>, _: Phase| Vec2::new(-x[1], x[0]);
        let (_, diag) = associated_pressure(grid, &disk, &target, 1e-6).unwrap();
        assert!((diag.curl_max - 2.0).abs() < 1e-10);
        assert!(diag.warning.is_some());
    }

    #[test]
    fn tiny_phase_is_a_resolution_error() {
        let grid = NodeGrid::covering(Vec2::new(-1.5, -1.5), Vec2::new(1.5, 1.5), 0.5);
        let small = |x: &Vec2<f64>| if x.norm() < 0.6 { Phase::Minus } else { Phase::Plus };
        let r = associated_pressure(grid, &small, &|_, _| Vec2::zero(), 1e-6);
        assert!(matches!(r, Err(Error::Resolution { phase: "minus", .. })));
    }
}
