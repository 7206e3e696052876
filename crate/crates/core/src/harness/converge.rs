//! Refinement studies along one resolution axis with least-squares observed orders.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::catalog::{exact_curvature, ibp_residual, ExpSin, Probe};
use super::config::ScenarioConfig;
use super::report::{fmt_f64, sha256_hex};
use super::scenario::{stream_rng, Scenario};
use crate::evolving::{transport_check_bulk, transport_check_surface};
use crate::pressure::{extend_mean_curvature, reconstruct_pressure, MfsSettings};
use crate::surface::Hypersurface;
use crate::weak_form::{transport_residual, TransportQuadrature};
use crate::{Error, Result};

/// Errors at or below this level are treated as converged to round-off.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Pressure-grid spacing (and the grid transport quadrature, with `dt = h`).
    GridH,
    /// Interface nodes `M`.
    SurfaceM,
    /// Finite-difference time step.
    TimeDt,
    /// Number of fundamental-solution sources.
    MfsSources,
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid_h" => Ok(Axis::GridH),
            "surface_M" | "surface_m" => Ok(Axis::SurfaceM),
            "time_dt" => Ok(Axis::TimeDt),
            "mfs_sources" => Ok(Axis::MfsSources),
            other => Err(Error::Config {
                path: "--axis".into(),
                message: format!("unknown axis `{other}` (grid_h, surface_M, time_dt, mfs_sources)"),
            }),
        }
    }
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::GridH => "grid_h",
            Axis::SurfaceM => "surface_M",
            Axis::TimeDt => "time_dt",
            Axis::MfsSources => "mfs_sources",
        }
    }
}

/// One check's error sequence along the axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub check: String,
    /// Step size per level (`h`, `1/M`, `dt`, `1/sources`); decreasing.
    pub step: Vec<f64>,
    pub error: Vec<f64>,
    /// Least-squares slope of `log error` against `log step` over levels above round-off.
    pub observed_order: Option<f64>,
    /// `error[k] / error[k+1]`.
    pub ratios: Vec<f64>,
    /// Set when the error grows between levels above round-off.
    pub non_monotone: bool,
    pub reached_roundoff: bool,
}

impl Series {
    pub fn new(check: &str, step: Vec<f64>, error: Vec<f64>) -> Self {
        let ratios = error.windows(2).map(|w| w[0] / w[1]).collect();
        let above: Vec<(f64, f64)> =
            step.iter().zip(&error).filter(|(_, &e)| e > ROUNDOFF_FLOOR).map(|(&h, &e)| (h, e)).collect();
        let non_monotone = above.windows(2).any(|w| w[1].1 > w[0].1);
        let reached_roundoff = error.iter().any(|&e| e <= ROUNDOFF_FLOOR);
        let observed_order = least_squares_order(&above);
        Self { check: check.to_string(), step, error, observed_order, ratios, non_monotone, reached_roundoff }
    }
}

/// Slope of the least-squares line through `(log h, log e)`; `None` with fewer than two points.
pub fn least_squares_order(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub config_digest: String,
    pub axis: Axis,
    pub levels: usize,
    pub series: Vec<Series>,
}

impl ConvergenceReport {
    pub fn series(&self, check: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.check == check)
    }

    /// `check,level,step,error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,level,step,error\n");
        for s in &self.series {
            for (k, (h, e)) in s.step.iter().zip(&s.error).enumerate() {
                let _ = writeln!(out, "{},{},{},{}", s.check, k, fmt_f64(*h), fmt_f64(*e));
            }
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir.join("tables"))?;
        let name = self.axis.name();
        std::fs::write(dir.join("tables").join(format!("convergence_{name}.csv")), self.to_csv())?;
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        std::fs::write(dir.join(format!("convergence_{name}.json")), json)?;
        Ok(())
    }
}

fn halvings(base: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|k| base / f64::from(1u32 << k)).collect()
}

/// Refines `axis` over `levels ≥ 3` levels starting from the config's coarse values.
pub fn convergence_study(config: ScenarioConfig, axis: Axis, levels: usize, seed: Option<u64>) -> Result<ConvergenceReport> {
    if levels < 3 {
        return Err(Error::Config { path: "--levels".into(), message: format!("need at least 3 levels, got {levels}") });
    }
    if levels > 12 {
        return Err(Error::Config { path: "--levels".into(), message: format!("at most 12 levels, got {levels}") });
    }
    let config_digest = sha256_hex(config.canonical_json().as_bytes());
    let s = Scenario::build(config, seed)?;
    let base = s.config.convergence;
    let t = s.probe_time();
    let series = match axis {
        Axis::GridH => {
            let hs = halvings(base.grid_h, levels);
            let mut out = Vec::new();
            let defects = hs
                .iter()
                .map(|&h| Ok(reconstruct_pressure(&s.traj, t, &s.reconstruction_settings(h))?.young_laplace.max_defect))
                .collect::<Result<Vec<_>>>()?;
            out.push(Series::new("young_laplace_jump", hs.clone(), defects));
            if s.config.expect.advected {
                // simultaneous refinement in space and time
                let errs = hs
                    .iter()
                    .map(|&h| {
                        let quad = TransportQuadrature::Grid { h, dt: h, subsamples: 1 };
                        let worst = s
                            .battery
                            .iter()
                            .take(3)
                            .map(|psi| Ok(transport_residual(&s.traj, &psi.potential, quad)?.residual))
                            .collect::<Result<Vec<f64>>>()?;
                        Ok(worst.into_iter().fold(0.0, f64::max))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(Series::new("transport_weak_form", hs, errs));
            }
            out
        }
        Axis::SurfaceM => {
            let ms: Vec<usize> = (0..levels).map(|k| base.surface_m << k).collect();
            let steps: Vec<f64> = ms.iter().map(|&m| 1.0 / m as f64).collect();
            let mut rng = stream_rng(s.seed, "surface_integration_by_parts");
            let fs: Vec<ExpSin<2>> = (0..5).map(|_| ExpSin::random(&mut rng)).collect();
            let shape = &s.traj.domain.shape;
            let (mut ibp, mut kappa) = (vec![], vec![]);
            for &m in &ms {
                let c = shape.curve(m, false)?;
                ibp.push(ibp_residual(&c, &fs));
                let k = c.mean_curvature();
                let e = k
                    .iter()
                    .enumerate()
                    .map(|(q, v)| (v - exact_curvature(shape, std::f64::consts::TAU * q as f64 / m as f64)).abs())
                    .fold(0.0, f64::max);
                kappa.push(e);
            }
            vec![Series::new("surface_integration_by_parts", steps.clone(), ibp), Series::new("curvature_ground_truth", steps, kappa)]
        }
        Axis::TimeDt => {
            let dts = halvings(base.time_dt, levels);
            if dts[0] >= t || t + dts[0] > s.traj.t_end() {
                return Err(Error::Config {
                    path: "/convergence/time_dt".into(),
                    message: "probe_time ± time_dt must stay inside (0, t_end)".into(),
                });
            }
            let f = Probe::random(&s, &mut stream_rng(s.seed, "transport_theorem_bulk")).field();
            let g = Probe::random(&s, &mut stream_rng(s.seed, "transport_theorem_surface")).field();
            let bulk = dts
                .iter()
                .map(|&dt| Ok(transport_check_bulk(&s.traj.domain, &f, t, dt, false)?.residual))
                .collect::<Result<Vec<_>>>()?;
            let surf = dts
                .iter()
                .map(|&dt| Ok(transport_check_surface(&s.traj.domain, &g, t, dt, false)?.general.residual))
                .collect::<Result<Vec<_>>>()?;
            vec![Series::new("transport_theorem_bulk", dts.clone(), bulk), Series::new("transport_theorem_surface", dts, surf)]
        }
        Axis::MfsSources => {
            let gamma = s.traj.domain.surface(t)?;
            let strides: Vec<usize> = (0..levels).map(|k| base.mfs_stride >> k).collect();
            if strides.iter().any(|&k| k == 0) {
                return Err(Error::Config {
                    path: "/convergence/mfs_stride".into(),
                    message: format!("stride {} cannot be halved {} times", base.mfs_stride, levels - 1),
                });
            }
            let mut steps = vec![];
            let mut errs = vec![];
            for &stride in &strides {
                // accept any fit so the error itself is reported
                let settings = MfsSettings { offsets: vec![1.5], stride, tolerance: f64::INFINITY, ..MfsSettings::default() };
                let ext = extend_mean_curvature(&gamma, &settings)?;
                steps.push(1.0 / ext.sources.len() as f64);
                errs.push(ext.trace_error);
            }
            vec![Series::new("harmonic_extension", steps, errs)]
        }
    };
    Ok(ConvergenceReport {
        schema_version: super::report::REPORT_SCHEMA_VERSION,
        scenario: s.config.name.clone(),
        seed: s.seed,
        config_digest,
        axis,
        levels,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h: &f64| (h, 3.0 * h * h)).collect();
        assert!((least_squares_order(&pts).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn growth_is_flagged() {
        let s = Series::new("x", vec![0.1, 0.05, 0.025], vec![1e-3, 2e-3, 1e-4]);
        assert!(s.non_monotone);
        let s = Series::new("x", vec![0.1, 0.05, 0.025], vec![1e-3, 1e-6, 1e-16]);
        assert!(!s.non_monotone && s.reached_roundoff);
    }
}
