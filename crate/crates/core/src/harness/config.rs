//! Scenario configuration: JSON document, published schema and semantic
//! validation with JSON-pointer error paths.

use std::collections::BTreeMap;
use std::path::Path;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::evolving::Diffeo;
use crate::surface::Shape2;
use crate::weak_form::{Flow, MaterialParams, QuadratureSettings, TimeVariant};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// One runnable scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Root seed; `--seed` overrides it.
    pub seed: u64,
    #[serde(rename = "box")]
    pub bounds: BoxSpec,
    /// Initial inner phase `Ω⁻(0)`.
    pub interface: Shape2<f64>,
    /// Optional closed surface in 3D for the curvature and integration-by-parts checks.
    #[serde(default)]
    pub surface_3d: Option<EllipsoidSpec>,
    /// Interface motion `Φ(·; t)`.
    pub motion: Diffeo<f64>,
    pub t_end: f64,
    /// Instant at which single-time checks run.
    pub probe_time: f64,
    pub material: MaterialParams<f64>,
    pub flow: Flow<f64>,
    pub resolution: Resolution,
    pub battery: Battery,
    #[serde(default)]
    pub expect: Expectations,
    #[serde(default)]
    pub checks: CheckSelection,
    #[serde(default)]
    pub convergence: ConvergenceBase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EllipsoidSpec {
    pub center: [f64; 3],
    pub axes: [f64; 3],
    pub n_polar: usize,
    pub n_azimuth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    /// Interface nodes `M`.
    pub surface_nodes: usize,
    /// Radial nodes of the star-shaped bulk rule on `Ω⁻(t)`.
    pub radial_nodes: usize,
    pub quadrature: QuadratureSettings,
    /// Node spacing of the pressure grid and of grid-based bulk checks.
    pub grid_h: f64,
    /// Finite-difference step for time derivatives and weak transport.
    pub dt: f64,
    /// Every `mfs_stride`-th interface node carries a source.
    pub mfs_stride: usize,
}

/// Random divergence-free test fields `ψ = ∇^⊥φ` with bump potentials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Battery {
    pub count: usize,
    /// Support radii drawn uniformly from `[min, max]`.
    pub radius: [f64; 2],
    /// Centers drawn uniformly from the disk of this radius around the interface centroid.
    pub spread: f64,
    /// Time window of open fields; closed-at-zero fields start at 0.
    pub window: [f64; 2],
    pub variant: TimeVariant,
}

/// What the scenario is known to satisfy. Checks whose identity needs an
/// unmet expectation run as diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// `(v, Γ)` is a weak solution of the two-phase system.
    #[serde(default)]
    pub weak_solution: bool,
    /// The interface moves with the fluid.
    #[serde(default)]
    pub advected: bool,
    /// Energy is conserved on `Ω` (no boundary flux).
    #[serde(default)]
    pub closed_energy: bool,
    /// Known mean of `p⁻ − p⁺` on `Γ` at the probe time.
    #[serde(default)]
    pub inner_pressure_excess: Option<f64>,
}

impl Default for Expectations {
    fn default() -> Self {
        Self { weak_solution: false, advected: false, closed_energy: false, inner_pressure_excess: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CheckSelection {
    /// Check ids to run; all applicable checks when absent.
    #[serde(default)]
    pub enabled: Option<Vec<String>>,
    /// Ids reported as diagnostics (values recorded, never pass/fail).
    #[serde(default)]
    pub diagnostic: Vec<String>,
    /// Per-id tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

/// Coarsest level of each convergence axis; levels refine by factors of 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceBase {
    pub grid_h: f64,
    pub surface_m: usize,
    pub time_dt: f64,
    pub mfs_stride: usize,
}

impl Default for ConvergenceBase {
    fn default() -> Self {
        Self { grid_h: 1.0 / 16.0, surface_m: 32, time_dt: 2e-2, mfs_stride: 16 }
    }
}

fn bad<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T> {
    Err(Error::Config { path: path.into(), message: message.into() })
}

/// `a.b[2].c` from serde_path_to_error becomes `/a/b/2/c`.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } | Segment::Enum { variant: key } => out.push_str(key),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl ScenarioConfig {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).or_else(|e| bad(pointer(e.path()), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Canonical serialization used for digests.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Semantic checks the schema cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return bad("/schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        if self.name.trim().is_empty() {
            return bad("/name", "must not be empty");
        }
        let b = &self.bounds;
        for k in 0..2 {
            if !(b.lo[k] < b.hi[k]) || !b.lo[k].is_finite() || !b.hi[k].is_finite() {
                return bad(format!("/box/hi/{k}"), format!("requires lo < hi, got {} >= {}", b.lo[k], b.hi[k]));
            }
        }
        self.validate_shape()?;
        if let Some(s) = &self.surface_3d {
            if s.axes.iter().any(|a| !(*a > 0.0)) {
                return bad("/surface_3d/axes", "semi-axes must be positive");
            }
            if s.n_polar < 4 || s.n_azimuth < 8 {
                return bad("/surface_3d/n_polar", "need at least 4 polar and 8 azimuthal nodes");
            }
        }
        if !(self.t_end > 0.0) {
            return bad("/t_end", format!("must be positive, got {}", self.t_end));
        }
        if !(self.probe_time > 0.0 && self.probe_time < self.t_end) {
            return bad("/probe_time", format!("must lie in (0, t_end), got {}", self.probe_time));
        }
        self.material.validate()?;
        self.validate_resolution()?;
        self.validate_battery()?;
        self.validate_checks()?;
        let c = &self.convergence;
        if !(c.grid_h > 0.0) || !(c.time_dt > 0.0) || c.surface_m < 8 || c.mfs_stride == 0 {
            return bad("/convergence", "coarse levels must be positive (surface_m >= 8)");
        }
        Ok(())
    }

    fn validate_shape(&self) -> Result<()> {
        match &self.interface {
            Shape2::Circle { radius, .. } if !(*radius > 0.0) => bad("/interface/radius", "must be positive"),
            Shape2::Ellipse { a, b, .. } if !(*a > 0.0 && *b > 0.0) => bad("/interface/a", "semi-axes must be positive"),
            Shape2::FourierCurve { r0, cos, sin, .. } => {
                let modes: f64 = cos.iter().chain(sin).map(|c| c.abs()).sum();
                if !(*r0 > modes) {
                    bad("/interface/r0", format!("r0 = {r0} must exceed the sum of mode amplitudes {modes}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn validate_resolution(&self) -> Result<()> {
        let r = &self.resolution;
        if r.surface_nodes < 16 {
            return bad("/resolution/surface_nodes", format!("need at least 16, got {}", r.surface_nodes));
        }
        if r.radial_nodes == 0 {
            return bad("/resolution/radial_nodes", "must be positive");
        }
        let q = &r.quadrature;
        if q.time_slabs == 0 || q.radial == 0 || q.angular == 0 || q.box_slabs == 0 {
            return bad("/resolution/quadrature", "all quadrature counts must be positive");
        }
        if !(r.grid_h > 0.0) {
            return bad("/resolution/grid_h", "must be positive");
        }
        if !(r.dt > 0.0 && r.dt < self.probe_time && self.probe_time + r.dt < self.t_end) {
            return bad("/resolution/dt", "must be positive and keep probe_time ± dt inside (0, t_end)");
        }
        if r.mfs_stride == 0 || r.mfs_stride * 4 > r.surface_nodes {
            return bad("/resolution/mfs_stride", "must be positive and leave at least 4 sources");
        }
        Ok(())
    }

    fn validate_battery(&self) -> Result<()> {
        let bt = &self.battery;
        if bt.count < 2 {
            return bad("/battery/count", "need at least two fields (linearity uses pairs)");
        }
        let [rmin, rmax] = bt.radius;
        if !(rmin > 0.0 && rmin <= rmax) {
            return bad("/battery/radius", format!("requires 0 < min <= max, got [{rmin}, {rmax}]"));
        }
        if !(bt.spread >= 0.0) {
            return bad("/battery/spread", "must be non-negative");
        }
        let [w0, w1] = bt.window;
        if !(w0 > 0.0 && w0 < w1 && w1 <= self.t_end) {
            return bad("/battery/window", format!("requires 0 < start < end <= t_end, got [{w0}, {w1}]"));
        }
        // Γ(0) ⊂⊂ Ω with a margin at least the largest support radius
        let (lo, hi) = self.interface_extent();
        let margin = (0..2)
            .map(|k| (lo[k] - self.bounds.lo[k]).min(self.bounds.hi[k] - hi[k]))
            .fold(f64::INFINITY, f64::min);
        if margin < rmax {
            return bad(
                "/battery/radius",
                format!("interface margin {margin:.4} to the box is below the largest support radius {rmax}"),
            );
        }
        // every admissible support stays inside the box
        let c = self.interface.center();
        for k in 0..2 {
            if c[k] - bt.spread - rmax <= self.bounds.lo[k] || c[k] + bt.spread + rmax >= self.bounds.hi[k] {
                return bad("/battery/spread", "supports around the interface centroid can leave the box");
            }
        }
        Ok(())
    }

    fn validate_checks(&self) -> Result<()> {
        let known = |id: &str| super::catalog::find(id).is_some();
        if let Some(list) = &self.checks.enabled {
            let mut seen = std::collections::BTreeSet::new();
            for (i, id) in list.iter().enumerate() {
                if !known(id) {
                    return bad(format!("/checks/enabled/{i}"), format!("unknown check id `{id}`"));
                }
                if !seen.insert(id) {
                    return bad(format!("/checks/enabled/{i}"), format!("duplicate check id `{id}`"));
                }
            }
        }
        for (i, id) in self.checks.diagnostic.iter().enumerate() {
            if !known(id) {
                return bad(format!("/checks/diagnostic/{i}"), format!("unknown check id `{id}`"));
            }
        }
        for (id, tol) in &self.checks.tolerances {
            if !known(id) {
                return bad(format!("/checks/tolerances/{id}"), format!("unknown check id `{id}`"));
            }
            if !(*tol >= 0.0) {
                return bad(format!("/checks/tolerances/{id}"), "tolerance must be non-negative");
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box of `Γ(0)` from a dense sample of the shape.
    pub fn interface_extent(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for j in 0..1024 {
            let p = self.interface.point(std::f64::consts::TAU * j as f64 / 1024.0);
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

/// JSON schema of [`ScenarioConfig`].
pub fn config_schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(ScenarioConfig)).expect("schema serializes")
}
