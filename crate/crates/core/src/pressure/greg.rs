//! The regularized momentum functional `G_reg` and related bulk quantities.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use super::mfs::{extend_mean_curvature, CurvatureExtension, MfsSettings};
use crate::fields::{AtTime, SpaceTimeScalar, SpaceTimeVector};
use crate::linalg::{Matrix, Vec2};
use crate::quadrature::{pairwise_sum, Rule1d};
use crate::weak_form::{curvature_functional, BumpScalar, CompactTestField, CurvatureForm, Footprint, Phase, Support, Trajectory};
use crate::{Error, Real, Result};

/// `ψ = ∇φ` for a bump potential; not divergence free.
#[derive(Clone, Copy, Debug)]
pub struct GradientField<T: Real> {
    pub potential: BumpScalar<T, 2>,
}

impl<T: Real> SpaceTimeVector<T, 2> for GradientField<T> {
    fn value(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        self.potential.gradient(x, t)
    }
    fn jacobian(&self, x: &Vec2<T>, t: T) -> Matrix<T, 2> {
        self.potential.spatial(x).2.scale(self.potential.time.eval(t).0)
    }
    fn time_derivative(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        self.potential.spatial(x).1 * self.potential.time.eval(t).1
    }
}

impl<T: Real> CompactTestField<T> for GradientField<T> {
    fn footprint(&self) -> Footprint<T> {
        let p = &self.potential;
        Footprint { center: p.center, radius: p.radius, start: p.time.start, end: p.time.end }
    }
}

/// Terms of `G_reg(ψ) = −∫∫ρ∂ₜv·ψ − ∫∫ρ(v·∇)v·ψ − 2∫∫μDv:Dψ + 2σ∫∫K·ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GregReport<T> {
    pub time: T,
    pub convection: T,
    pub viscous: T,
    pub curvature: T,
    pub total: T,
}

fn time_rule<T: Real>(traj: &Trajectory<T>, fp: &Footprint<T>) -> Result<Rule1d<T>> {
    if fp.start < T::zero() || fp.end > traj.t_end() {
        return Err(Error::Support {
            detail: format!("test window [{}, {}] does not fit in [0, {}]", fp.start, fp.end, traj.t_end()),
        });
    }
    Ok(Rule1d::composite_gauss(fp.start, fp.end, traj.quad.time_slabs, 4))
}

/// Harmonic extensions of `κ(t)` keyed by `t`. Valid for one trajectory and
/// one set of MFS settings; failures are not stored.
#[derive(Debug, Default)]
pub struct ExtensionCache<T: Real> {
    map: Mutex<HashMap<u64, Arc<CurvatureExtension<T>>>>,
}

impl<T: Real> ExtensionCache<T> {
    pub fn new() -> Self {
        Self { map: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, traj: &Trajectory<T>, t: T, mfs: &MfsSettings<T>) -> Result<Arc<CurvatureExtension<T>>> {
        let key = t.to_f64_lossy().to_bits();
        if let Some(e) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(e));
        }
        // solved outside the lock; a concurrent duplicate solve gives the same result
        let ext = Arc::new(extend_mean_curvature(&traj.domain.surface(t)?, mfs)?);
        self.map.lock().expect("cache lock").insert(key, Arc::clone(&ext));
        Ok(ext)
    }
}

/// `G_reg(ψ)`; `K = ∇m` comes from a harmonic extension of `κ(t)` at each time node.
pub fn greg_apply<T: Real, F: CompactTestField<T>>(
    traj: &Trajectory<T>,
    psi: &F,
    mfs: &MfsSettings<T>,
) -> Result<GregReport<T>> {
    greg_apply_cached(traj, psi, mfs, &ExtensionCache::new())
}

/// [`greg_apply`] reusing extensions across test fields that share time nodes.
pub fn greg_apply_cached<T: Real, F: CompactTestField<T>>(
    traj: &Trajectory<T>,
    psi: &F,
    mfs: &MfsSettings<T>,
    cache: &ExtensionCache<T>,
) -> Result<GregReport<T>> {
    let fp = psi.footprint();
    let rule = time_rule(traj, &fp)?;
    let support = Support::Disk(fp.center, fp.radius);
    let (p, flow) = (&traj.params, &traj.flow);
    let two = T::lit(2.0);
    let (mut time, mut conv, mut visc, mut curv) = (vec![], vec![], vec![], vec![]);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let ext = cache.get(traj, t, mfs)?;
        time.push(-w * traj.integrate_two_phase(t, support, |x, ph| {
            p.density(ph) * flow.time_derivative(x, t).dot(&psi.value(x, t))
        }));
        conv.push(-w * traj.integrate_two_phase(t, support, |x, ph| {
            p.density(ph) * flow.convection(x, t).dot(&psi.value(x, t))
        }));
        visc.push(-w * traj.integrate_two_phase(t, support, |x, ph| {
            two * p.viscosity(ph) * flow.sym_grad(x, t).contract(&psi.sym_grad(x, t))
        }));
        curv.push(w * traj.domain.integrate_inside(t, |x| ext.gradient(x).dot(&psi.value(x, t))));
    }
    let time = pairwise_sum(&time);
    let convection = pairwise_sum(&conv);
    let viscous = pairwise_sum(&visc);
    let curvature = two * p.sigma * pairwise_sum(&curv);
    Ok(GregReport { time, convection, viscous, curvature, total: time + convection + viscous + curvature })
}

/// `∫∫ q·ψ` for a phase-wise field `q`, e.g. a closed-form pressure gradient.
pub fn bulk_pairing<T: Real, F: CompactTestField<T>>(
    traj: &Trajectory<T>,
    psi: &F,
    q: impl Fn(&Vec2<T>, T, Phase) -> Vec2<T>,
) -> Result<T> {
    let fp = psi.footprint();
    let rule = time_rule(traj, &fp)?;
    let support = Support::Disk(fp.center, fp.radius);
    let vals: Vec<T> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| w * traj.integrate_two_phase(t, support, |x, ph| q(x, t, ph).dot(&psi.value(x, t))))
        .collect();
    Ok(pairwise_sum(&vals))
}

/// The three equal forms `∫_{Ω⁻}K·ψ`, `∫_Γ κν·ψ`, `∫_Γ ν⊗ν:∇ψ` at one instant.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurvatureFormsReport<T> {
    pub bulk: T,
    pub kappa_form: T,
    pub nu_nu_form: T,
    /// Largest pairwise difference.
    pub max_gap: T,
}

pub fn curvature_forms<T: Real, F: SpaceTimeVector<T, 2>>(
    traj: &Trajectory<T>,
    t: T,
    ext: &CurvatureExtension<T>,
    psi: &F,
) -> Result<CurvatureFormsReport<T>> {
    let gamma = traj.domain.surface(t)?;
    let at = AtTime { field: psi, t };
    let bulk = traj.domain.integrate_inside(t, |x| ext.gradient(x).dot(&psi.value(x, t)));
    let kappa_form = curvature_functional(&gamma, &at, CurvatureForm::KappaForm);
    let nu_nu_form = curvature_functional(&gamma, &at, CurvatureForm::NuNuForm);
    let max_gap = (bulk - kappa_form).abs().max((bulk - nu_nu_form).abs()).max((kappa_form - nu_nu_form).abs());
    Ok(CurvatureFormsReport { bulk, kappa_form, nu_nu_form, max_gap })
}

/// `‖(v·∇)v‖_{L²(0,T; L³(Ω±(t)))}` per phase and over `Ω`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvectiveNorm<T> {
    pub minus: T,
    pub plus: T,
    pub total: T,
}

pub fn convective_norm<T: Real>(traj: &Trajectory<T>) -> Result<ConvectiveNorm<T>> {
    let rule = Rule1d::composite_gauss(T::zero(), traj.t_end(), traj.quad.time_slabs, 4);
    let cube = |x: &Vec2<T>, t: T| traj.flow.convection(x, t).norm().powi(3);
    let two_thirds = T::lit(2.0 / 3.0);
    let (mut m, mut p, mut all) = (vec![], vec![], vec![]);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let inner = traj.domain.integrate_inside(t, |x| cube(x, t));
        let whole = traj.integrate_two_phase(t, Support::Box, |x, _| cube(x, t));
        // clamp tiny negative differences from quadrature cancellation
        let outer = (whole - inner).max(T::zero());
        m.push(w * inner.powf(two_thirds));
        p.push(w * outer.powf(two_thirds));
        all.push(w * whole.powf(two_thirds));
    }
    Ok(ConvectiveNorm {
        minus: pairwise_sum(&m).sqrt(),
        plus: pairwise_sum(&p).sqrt(),
        total: pairwise_sum(&all).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolving::{Diffeo, EvolvingDomain};
    use crate::surface::Shape2;
    use crate::weak_form::{Flow, MaterialParams, QuadratureSettings, TestFieldSpec, TimeVariant, DivFreeField2};

    fn static_bubble(sigma: f64) -> Trajectory<f64> {
        let dom = EvolvingDomain::new(Shape2::Circle { center: [0.0, 0.0], radius: 1.0 }, Diffeo::Identity, 1.0, 256, 32)
            .unwrap();
        let p = MaterialParams { beta1: 1.0, beta2: 2.0, mu1: 0.1, mu2: 0.2, sigma };
        Trajectory::new(dom, p, Flow::Zero, Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0), QuadratureSettings::default())
            .unwrap()
    }

    #[test]
    fn static_bubble_greg_vanishes() {
        let tr = static_bubble(0.5);
        let spec = TestFieldSpec {
            center: vec![0.6, 0.3],
            radius: 1.0,
            t_start: 0.2,
            t_end: 0.7,
            amplitude: 1.0,
            variant: TimeVariant::Open,
            axis: None,
        };
        let psi = DivFreeField2::build(&spec, tr.lo, tr.hi).unwrap();
        let g = greg_apply(&tr, &psi, &MfsSettings::default()).unwrap();
        assert!(g.total.abs() < 1e-9, "{g:?}");
    }

    #[test]
    fn zero_flow_has_zero_convective_norm() {
        let n = convective_norm(&static_bubble(0.5)).unwrap();
        assert_eq!((n.minus, n.plus, n.total), (0.0, 0.0, 0.0));
    }
}
