//! Built scenario: trajectory, optional 3D surface, test-field battery and a
//! shared pressure reconstruction.

use std::sync::OnceLock;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::config::ScenarioConfig;
use crate::evolving::EvolvingDomain;
use crate::linalg::{Vec2, Vec3};
use crate::pressure::{reconstruct_pressure, ExtensionCache, MfsSettings, Reconstruction, ReconstructionSettings};
use crate::surface::Ellipsoid;
use crate::weak_form::{DivFreeField2, TestFieldSpec, Trajectory};
use crate::{Error, Result};

/// Deterministic generator for the stream named `label`.
///
/// The root seed fixes the ChaCha key; the label hash selects the stream, so
/// streams are independent of evaluation order.
pub fn stream_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let digest = Sha256::digest(label.as_bytes());
    let mut id = [0u8; 8];
    id.copy_from_slice(&digest[..8]);
    rng.set_stream(u64::from_le_bytes(id));
    rng
}

pub struct Scenario {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub traj: Trajectory<f64>,
    pub surface_3d: Option<Ellipsoid<f64>>,
    pub battery: Vec<DivFreeField2<f64>>,
    pub battery_specs: Vec<TestFieldSpec>,
    /// Interface extensions at the configured MFS settings, shared by all checks.
    pub extensions: ExtensionCache<f64>,
    reconstruction: OnceLock<std::result::Result<Reconstruction<f64>, String>>,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario").field("name", &self.config.name).field("seed", &self.seed).finish()
    }
}

impl Scenario {
    /// Builds the scenario; `seed` overrides the config seed when given.
    pub fn build(config: ScenarioConfig, seed: Option<u64>) -> Result<Self> {
        config.validate()?;
        let seed = seed.unwrap_or(config.seed);
        let res = &config.resolution;
        let domain = EvolvingDomain::new(
            config.interface.clone(),
            config.motion.clone(),
            config.t_end,
            res.surface_nodes,
            res.radial_nodes,
        )?;
        let b = &config.bounds;
        let traj = Trajectory::new(
            domain,
            config.material,
            config.flow.clone(),
            Vec2::new(b.lo[0], b.lo[1]),
            Vec2::new(b.hi[0], b.hi[1]),
            res.quadrature,
        )
        .map_err(|e| match e {
            Error::Config { message, .. } => Error::Config { path: "/motion".into(), message },
            other => other,
        })?;
        let surface_3d = match &config.surface_3d {
            Some(s) => Some(Ellipsoid::new(
                Vec3::new(s.center[0], s.center[1], s.center[2]),
                s.axes,
                s.n_polar,
                s.n_azimuth,
                false,
            )?),
            None => None,
        };
        let battery_specs = battery_specs(&config, seed);
        let battery = battery_specs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                DivFreeField2::build(s, traj.lo, traj.hi)
                    .map_err(|e| Error::Config { path: format!("/battery (field {i})"), message: e.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { config, seed, traj, surface_3d, battery, battery_specs, extensions: ExtensionCache::new(), reconstruction: OnceLock::new() })
    }

    pub fn probe_time(&self) -> f64 {
        self.config.probe_time
    }

    pub fn mfs_settings(&self) -> MfsSettings<f64> {
        MfsSettings { stride: self.config.resolution.mfs_stride, ..MfsSettings::default() }
    }

    pub fn reconstruction_settings(&self, h: f64) -> ReconstructionSettings<f64> {
        ReconstructionSettings { mfs: self.mfs_settings(), ..ReconstructionSettings::with_h(h) }
    }

    /// Pressure at the probe time on the configured grid, computed once.
    pub fn reconstruction(&self) -> Result<&Reconstruction<f64>> {
        let r = self.reconstruction.get_or_init(|| {
            let s = self.reconstruction_settings(self.config.resolution.grid_h);
            reconstruct_pressure(&self.traj, self.probe_time(), &s).map_err(|e| e.to_string())
        });
        r.as_ref().map_err(|m| Error::Unsupported(format!("pressure reconstruction failed: {m}")))
    }
}

/// Random supports around the interface centroid, reproducible from the seed.
pub fn battery_specs(config: &ScenarioConfig, seed: u64) -> Vec<TestFieldSpec> {
    let mut rng = stream_rng(seed, "battery");
    let bt = &config.battery;
    let c = config.interface.center();
    (0..bt.count)
        .map(|_| {
            let r = bt.spread * rng.random::<f64>().sqrt();
            let a = std::f64::consts::TAU * rng.random::<f64>();
            let radius = if bt.radius[1] > bt.radius[0] {
                rng.random_range(bt.radius[0]..bt.radius[1])
            } else {
                bt.radius[0]
            };
            let amplitude = rng.random_range(0.5..1.5);
            TestFieldSpec {
                center: vec![c[0] + r * a.cos(), c[1] + r * a.sin()],
                radius,
                t_start: bt.window[0],
                t_end: bt.window[1],
                amplitude,
                variant: bt.variant,
                axis: None,
            }
        })
        .collect()
}
