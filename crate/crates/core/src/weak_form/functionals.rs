//! Space-time functionals of the weak two-phase formulation: the curvature
//! functional, the momentum residual, the energy audit, the weak transport
//! residual, the perimeter identity and the strong bulk residual.

use serde::Serialize;

use super::flow::{PhaseState, Support, Trajectory};
use super::params::Phase;
use super::testfield::{bump, BumpScalar, DivFreeField2, TimeVariant};
use crate::fields::{SpaceTimeScalar, SpaceTimeVector, VectorField};
use crate::linalg::{Matrix, Vec2, Vector};
use crate::quadrature::{pairwise_sum, Rule1d};
use crate::surface::{Hypersurface, SubcellGrid};
use crate::{Error, Real, Result};

/// Which side of the weak-curvature identity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureForm {
    /// `∫_Γ κ ν·ψ`.
    KappaForm,
    /// `∫_Γ ν⊗ν : ∇ψ`.
    NuNuForm,
}

/// `∫_Γ κ ν·ψ` or `∫_Γ ν⊗ν : ∇ψ`; the two agree for divergence-free `ψ`.
pub fn curvature_functional<T, const D: usize, S, F>(surface: &S, psi: &F, form: CurvatureForm) -> T
where
    T: Real,
    S: Hypersurface<T, D>,
    F: VectorField<T, D>,
{
    let nu = surface.normals();
    match form {
        CurvatureForm::KappaForm => {
            let kappa = surface.mean_curvature();
            surface.integrate_with(&|q, x| kappa[q] * nu[q].dot(&psi.value(x)))
        }
        CurvatureForm::NuNuForm => surface.integrate_with(&|q, x| nu_nu(&nu[q], &psi.jacobian(x))),
    }
}

/// `ν⊗ν : J = νᵀ J ν`.
fn nu_nu<T: Real, const D: usize>(nu: &Vector<T, D>, jac: &Matrix<T, D>) -> T {
    nu.dot(&jac.mul_vec(nu))
}

/// Space-time box carrying a test field: a disk in space times `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Footprint<T: Real> {
    pub center: Vec2<T>,
    pub radius: T,
    pub start: T,
    pub end: T,
}

impl<T: Real> Footprint<T> {
    /// Smallest footprint covering both.
    pub fn union(&self, other: &Self) -> Self {
        let d = (other.center - self.center).norm();
        let (center, radius) = if d + other.radius <= self.radius {
            (self.center, self.radius)
        } else if d + self.radius <= other.radius {
            (other.center, other.radius)
        } else {
            let radius = (d + self.radius + other.radius) * T::lit(0.5);
            let dir = (other.center - self.center) * (d.recip());
            (self.center + dir * (radius - self.radius), radius)
        };
        Self { center, radius, start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

/// A divergence-free test field with known compact support in space-time.
pub trait CompactTestField<T: Real>: SpaceTimeVector<T, 2> {
    fn footprint(&self) -> Footprint<T>;
}

impl<T: Real> CompactTestField<T> for DivFreeField2<T> {
    fn footprint(&self) -> Footprint<T> {
        let w = self.time();
        Footprint { center: self.center(), radius: self.radius(), start: w.start, end: w.end }
    }
}

/// `Σ aₖ ψₖ`.
#[derive(Clone, Debug)]
pub struct Combination<T: Real> {
    pub terms: Vec<(T, DivFreeField2<T>)>,
}

impl<T: Real> SpaceTimeVector<T, 2> for Combination<T> {
    fn value(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        self.terms.iter().fold(Vec2::zero(), |acc, (a, f)| acc + f.value(x, t) * *a)
    }
    fn jacobian(&self, x: &Vec2<T>, t: T) -> Matrix<T, 2> {
        self.terms.iter().fold(Matrix::zero(), |acc, (a, f)| acc.add(&f.jacobian(x, t).scale(*a)))
    }
    fn time_derivative(&self, x: &Vec2<T>, t: T) -> Vec2<T> {
        self.terms.iter().fold(Vec2::zero(), |acc, (a, f)| acc + f.time_derivative(x, t) * *a)
    }
    fn divergence(&self, _x: &Vec2<T>, _t: T) -> T {
        T::zero()
    }
}

impl<T: Real> CompactTestField<T> for Combination<T> {
    fn footprint(&self) -> Footprint<T> {
        let mut it = self.terms.iter().map(|(_, f)| f.footprint());
        let first = it.next().expect("combination needs at least one term");
        it.fold(first, |acc, f| acc.union(&f))
    }
}

/// Term breakdown of the weak momentum residual
/// `∫∫ρv·∂ₜψ + ρv⊗v:∇ψ − 2μDv:Dψ + ∫ρ⁰v⁰·ψ(0) + 2σ∫∫_Γ ν⊗ν:∇ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentumReport<T> {
    pub time: T,
    pub convection: T,
    pub viscous: T,
    pub initial: T,
    pub surface_tension: T,
    pub residual: T,
}

fn check_footprint<T: Real>(traj: &Trajectory<T>, fp: &Footprint<T>) -> Result<()> {
    if fp.end > traj.t_end() || fp.start < T::zero() {
        return Err(Error::Support {
            detail: format!("test window [{}, {}] does not fit in [0, {}]", fp.start, fp.end, traj.t_end()),
        });
    }
    let c = fp.center;
    if (0..2).any(|i| c[i] - fp.radius <= traj.lo[i] || c[i] + fp.radius >= traj.hi[i]) {
        return Err(Error::Support { detail: "test field support leaves the box".into() });
    }
    Ok(())
}

/// Weak momentum residual against `ψ` using `ψ`'s own footprint.
pub fn momentum_residual<T: Real, F: CompactTestField<T>>(traj: &Trajectory<T>, psi: &F) -> Result<MomentumReport<T>> {
    momentum_residual_over(traj, psi, &psi.footprint())
}

/// Weak momentum residual with quadrature laid out on `fp`, which must cover
/// the support of `ψ`. A fixed `fp` makes the discrete functional exactly linear.
pub fn momentum_residual_over<T: Real, F: SpaceTimeVector<T, 2>>(
    traj: &Trajectory<T>,
    psi: &F,
    fp: &Footprint<T>,
) -> Result<MomentumReport<T>> {
    check_footprint(traj, fp)?;
    let p = &traj.params;
    let support = Support::Disk(fp.center, fp.radius);
    let rule = Rule1d::composite_gauss(fp.start, fp.end, traj.quad.time_slabs, 4);
    let (mut time, mut conv, mut visc, mut surf) = (vec![], vec![], vec![], vec![]);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let flow = &traj.flow;
        time.push(w * traj.integrate_two_phase(t, support, |x, ph| {
            p.density(ph) * flow.value(x, t).dot(&psi.time_derivative(x, t))
        }));
        conv.push(w * traj.integrate_two_phase(t, support, |x, ph| {
            let v = flow.value(x, t);
            p.density(ph) * v.dot(&psi.jacobian(x, t).mul_vec(&v))
        }));
        visc.push(w * traj.integrate_two_phase(t, support, |x, ph| {
            -T::lit(2.0) * p.viscosity(ph) * flow.sym_grad(x, t).contract(&psi.sym_grad(x, t))
        }));
        let gamma = traj.domain.surface(t)?;
        let nu = gamma.normals();
        surf.push(w * gamma.integrate_with(&|q, x| nu_nu(&nu[q], &psi.jacobian(x, t))));
    }
    let zero = T::zero();
    let initial = if fp.start > zero {
        zero
    } else {
        traj.integrate_two_phase(zero, support, |x, ph| {
            p.density(ph) * traj.flow.value(x, zero).dot(&psi.value(x, zero))
        })
    };
    let time = pairwise_sum(&time);
    let convection = pairwise_sum(&conv);
    let viscous = pairwise_sum(&visc);
    let surface_tension = T::lit(2.0) * p.sigma * pairwise_sum(&surf);
    let residual = time + convection + viscous + initial + surface_tension;
    Ok(MomentumReport { time, convection, viscous, initial, surface_tension, residual })
}

/// Both sides of the energy balance between `τ₁ ≤ τ₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport<T> {
    pub surface_start: T,
    pub surface_end: T,
    pub kinetic_start: T,
    pub kinetic_end: T,
    /// `2∫∫μ|Dv|²` over `[τ₁, τ₂]`.
    pub dissipation: T,
    /// `2σ|Γ(τ₂)| + ½∫ρ|v(τ₂)|² + 2∫∫μ|Dv|²`.
    pub lhs: T,
    /// `2σ|Γ(τ₁)| + ½∫ρ|v(τ₁)|²`.
    pub rhs: T,
    pub gap: T,
    /// `|gap| / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub relative_gap: T,
}

pub fn energy_audit<T: Real>(traj: &Trajectory<T>, tau1: T, tau2: T) -> Result<EnergyReport<T>> {
    if tau1 < T::zero() || tau2 > traj.t_end() || tau1 > tau2 {
        return Err(Error::TimeOutOfRange {
            t: if tau1 < T::zero() || tau1 > tau2 { tau1 } else { tau2 }.to_f64_lossy(),
            lo: 0.0,
            hi: traj.t_end().to_f64_lossy(),
        });
    }
    let p = &traj.params;
    let two = T::lit(2.0);
    let kinetic = |t: T| {
        traj.integrate_two_phase(t, Support::Box, |x, ph| T::lit(0.5) * p.density(ph) * traj.flow.value(x, t).norm_sq())
    };
    let surface = |t: T| -> Result<T> { Ok(two * p.sigma * traj.domain.surface(t)?.measure()) };
    let dissipation = if tau2 > tau1 {
        let rule = Rule1d::composite_gauss(tau1, tau2, traj.quad.time_slabs, 4);
        let vals: Vec<T> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| {
                w * traj.integrate_two_phase(t, Support::Box, |x, ph| {
                    let d = traj.flow.sym_grad(x, t);
                    two * p.viscosity(ph) * d.contract(&d)
                })
            })
            .collect();
        pairwise_sum(&vals)
    } else {
        T::zero()
    };
    let (surface_start, surface_end) = (surface(tau1)?, surface(tau2)?);
    let (kinetic_start, kinetic_end) = (kinetic(tau1), kinetic(tau2));
    let lhs = surface_end + kinetic_end + dissipation;
    let rhs = surface_start + kinetic_start;
    let gap = lhs - rhs;
    let scale = lhs.abs().max(rhs.abs());
    let relative_gap = if scale > T::zero() { gap.abs() / scale } else { T::zero() };
    Ok(EnergyReport {
        surface_start,
        surface_end,
        kinetic_start,
        kinetic_end,
        dissipation,
        lhs,
        rhs,
        gap,
        relative_gap,
    })
}

/// Quadrature for the weak transport residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransportQuadrature<T> {
    /// Pulled-back polar rule on `Ω⁻(t)` and the time midpoint rule with step `dt`.
    Spectral { dt: T },
    /// Subsampled Cartesian indicator of spacing `h` and the time midpoint rule.
    Grid { h: T, dt: T, subsamples: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeakTransportReport<T> {
    /// `∫∫χ(∂ₜφ + v·∇φ)`.
    pub bulk: T,
    /// `∫χ⁰φ(0)`.
    pub initial: T,
    pub residual: T,
}

/// `|∫∫χ(∂ₜφ + v·∇φ) + ∫χ⁰φ(0)|` for the indicator `χ` of `Ω⁻(t)`.
pub fn transport_residual<T: Real>(
    traj: &Trajectory<T>,
    phi: &BumpScalar<T, 2>,
    quad: TransportQuadrature<T>,
) -> Result<WeakTransportReport<T>> {
    let w = phi.time;
    if w.end > traj.t_end() {
        return Err(Error::Support { detail: format!("test window ends at {} after T = {}", w.end, traj.t_end()) });
    }
    let integrand = |x: &Vec2<T>, t: T| {
        phi.time_derivative(x, t) + SpaceTimeVector::value(&traj.flow, x, t).dot(&phi.gradient(x, t))
    };
    let dt = match quad {
        TransportQuadrature::Spectral { dt } | TransportQuadrature::Grid { dt, .. } => dt,
    };
    let steps = ((w.end - w.start) / dt).ceil().to_usize().unwrap_or(1).max(1);
    let rule = Rule1d::midpoint(w.start, w.end, steps);
    let zero = T::zero();
    let (bulk, initial) = match quad {
        TransportQuadrature::Spectral { .. } => {
            let vals: Vec<T> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &wt)| wt * traj.domain.integrate_inside(t, |x| integrand(x, t)))
                .collect();
            (pairwise_sum(&vals), traj.domain.integrate_inside(zero, |x| phi.value(x, zero)))
        }
        TransportQuadrature::Grid { h, subsamples, .. } => {
            let r = Vec2::new(phi.radius, phi.radius);
            let grid = SubcellGrid { lo: phi.center - r, hi: phi.center + r, h, subsamples };
            let mut vals = Vec::with_capacity(rule.len());
            for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let gamma = traj.domain.surface(t)?;
                vals.push(wt * grid.integrate_inside(&gamma, |x| integrand(x, t)));
            }
            let initial = if w.variant == TimeVariant::ClosedAtZero {
                grid.integrate_inside(traj.domain.initial_surface(), |x| phi.value(x, zero))
            } else {
                zero
            };
            (pairwise_sum(&vals), initial)
        }
    };
    Ok(WeakTransportReport { bulk, initial, residual: (bulk + initial).abs() })
}

/// Dictionary lower bound on `‖∇ρ‖(Ω)` against the geometric value `(β₂−β₁)|Γ|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TotalVariationReport<T> {
    pub tv_estimate: T,
    pub geometric: T,
    /// `tv_estimate / geometric`; `None` when the phases have equal density.
    pub ratio: Option<T>,
}

/// Smoothing width of the dictionary's outer cut-off.
pub const TV_SMOOTHING: f64 = 0.01;

/// Smooth step `S(u) = F(u)/(F(u) + F(1 − u))`, `F(u) = e^{−1/u}`, with `S'`.
/// Flat to all orders at both ends.
fn smooth_step<T: Real>(u: T) -> (T, T) {
    if u <= T::zero() {
        return (T::zero(), T::zero());
    }
    if u >= T::one() {
        return (T::one(), T::zero());
    }
    let f = |s: T| (-s.recip()).exp();
    let (a, b) = (f(u), f(T::one() - u));
    let (da, db) = (a / (u * u), b / ((T::one() - u) * (T::one() - u)));
    let den = a + b;
    (a / den, (da * b + a * db) / (den * den))
}

/// Radial profile `g` with `g'`: a smooth step from 0 on `[0, r_in]`, equal to
/// one up to `r_out`, then a bump-shaped decay over `[r_out, r_out + w]`.
/// Flatness at `r = 0` keeps `g(r) e_r` smooth at the center.
fn radial_profile<T: Real>(r: T, r_in: T, r_out: T, w: T) -> (T, T) {
    let two = T::lit(2.0);
    if r < r_in {
        let (g, dg) = smooth_step(r / r_in);
        (g, dg / r_in)
    } else if r <= r_out {
        (T::one(), T::zero())
    } else {
        let s = (r - r_out) / w;
        let (b, db, _) = bump(s * s);
        (b, db * two * s / w)
    }
}

/// Sup of `∫ρ div ψ` over radial fields `ψ = −g(|x−c|)(x−c)/|x−c|`, `|ψ| ≤ 1`,
/// with centers near the interface's centroid and the plateau covering `Γ(t)`.
pub fn total_variation_identity<T: Real>(state: &PhaseState<'_, T>) -> Result<TotalVariationReport<T>> {
    let traj = state.traj;
    let p = &traj.params;
    let gamma = traj.domain.surface(state.t)?;
    let geometric = (p.beta2 - p.beta1) * gamma.measure();
    let w = T::lit(TV_SMOOTHING);
    let base = {
        let n = T::from_usize_lossy(gamma.len());
        gamma.nodes().iter().fold(Vec2::zero(), |a, x| a + *x) * n.recip()
    };
    let offsets = [(0.0, 0.0), (0.05, 0.0), (-0.05, 0.0), (0.0, 0.05), (0.0, -0.05)];
    let mut best = T::neg_infinity();
    for (dx, dy) in offsets {
        let c = base + Vec2::new(T::lit(dx), T::lit(dy));
        let (rmin, rmax) = gamma
            .nodes()
            .iter()
            .map(|x| (*x - c).norm())
            .fold((T::infinity(), T::zero()), |(a, b), r| (a.min(r), b.max(r)));
        // outer edge stays clear of the box walls
        let wall = (0..2)
            .map(|i| (c[i] - traj.lo[i]).min(traj.hi[i] - c[i]))
            .fold(T::infinity(), |a, b| a.min(b));
        let r_out = rmax * (T::one() + T::lit(1e-9));
        if r_out + w >= wall || rmin <= T::zero() {
            continue;
        }
        for frac in [0.5, 0.75] {
            let r_in = rmin * T::lit(frac);
            // div(g e_r) = g' + g/r; only Ω⁻ contributes, the plateau covers the rest
            let inner = traj.domain.integrate_inside(state.t, |x| {
                let r = (*x - c).norm();
                let (g, dg) = radial_profile(r, r_in, r_out, w);
                dg + g / r
            });
            best = best.max((p.beta2 - p.beta1) * inner);
        }
    }
    if best == T::neg_infinity() {
        return Err(Error::Support { detail: "no dictionary field fits inside the box".into() });
    }
    let ratio = (geometric != T::zero()).then(|| best / geometric);
    Ok(TotalVariationReport { tv_estimate: best, geometric, ratio })
}

/// Pointwise `ρ∂ₜv + ρ(v·∇)v − 2μ div(Dv) + ∇p` at points at least `h` away from `Γ(t)`.
pub fn strong_residual_bulk<T: Real>(
    state: &PhaseState<'_, T>,
    points: &[Vec2<T>],
    pressure_gradient: impl Fn(&Vec2<T>, Phase) -> Vec2<T>,
    h: T,
) -> Result<Vec<Vec2<T>>> {
    let traj = state.traj;
    let gamma = traj.domain.surface(state.t)?;
    let (p, flow, t) = (&traj.params, &traj.flow, state.t);
    points
        .iter()
        .map(|x| {
            let d = gamma.signed_distance(x);
            if d.abs() <= h {
                return Err(Error::OnInterface { distance: d.to_f64_lossy() });
            }
            let ph = if d < T::zero() { Phase::Minus } else { Phase::Plus };
            let rho = p.density(ph);
            // div(Dv) = Δv/2 for divergence-free v
            Ok(flow.material_acceleration(x, t) * rho - flow.laplacian(x, t) * p.viscosity(ph)
                + pressure_gradient(x, ph))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolving::{Diffeo, EvolvingDomain};
    use crate::fields::{Affine, AtTime};
    use crate::surface::{ClosedCurve, Shape2};
    use crate::weak_form::flow::{Flow, QuadratureSettings};
    use crate::weak_form::params::MaterialParams;
    use crate::weak_form::testfield::{TestFieldSpec, TimeWindow};

    fn params(sigma: f64) -> MaterialParams<f64> {
        MaterialParams { beta1: 1.0, beta2: 2.0, mu1: 0.1, mu2: 0.3, sigma }
    }

    fn traj(shape: Shape2<f64>, diffeo: Diffeo<f64>, flow: Flow<f64>, p: MaterialParams<f64>) -> Trajectory<f64> {
        let dom = EvolvingDomain::new(shape, diffeo, 1.0, 256, 32).unwrap();
        Trajectory::new(dom, p, flow, Vec2::new(-4.0, -4.0), Vec2::new(4.0, 4.0), QuadratureSettings::default())
            .unwrap()
    }

    fn field(c: [f64; 2], r: f64, variant: TimeVariant) -> DivFreeField2<f64> {
        let spec = TestFieldSpec {
            center: c.to_vec(),
            radius: r,
            t_start: 0.1,
            t_end: 0.8,
            amplitude: 1.0,
            variant,
            axis: None,
        };
        DivFreeField2::build(&spec, Vec2::new(-4.0, -4.0), Vec2::new(4.0, 4.0)).unwrap()
    }

    #[test]
    fn rotation_field_is_tangent_to_unit_circle() {
        let c = ClosedCurve::<f64>::circle(Vec2::new(0.0, 0.0), 1.0, 128, false).unwrap();
        let k: f64 = curvature_functional(&c, &Affine::rotation(), CurvatureForm::KappaForm);
        assert!(k.abs() < 1e-13);
    }

    #[test]
    fn curvature_forms_agree_on_ellipse() {
        let c = ClosedCurve::<f64>::ellipse(Vec2::new(0.0, 0.0), 1.5, 0.7, 256, false).unwrap();
        let psi = field([1.2, 0.3], 1.6, TimeVariant::Open);
        let at = AtTime { field: &psi, t: 0.45 };
        let a = curvature_functional(&c, &at, CurvatureForm::KappaForm);
        let b = curvature_functional(&c, &at, CurvatureForm::NuNuForm);
        assert!(a.abs() > 1e-3);
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn static_bubble_momentum_residual_vanishes() {
        let circle = Shape2::Circle { center: [0.0, 0.0], radius: 1.0 };
        let tr = traj(circle, Diffeo::Identity, Flow::Zero, params(0.5));
        let psi = field([0.8, 0.2], 1.6, TimeVariant::ClosedAtZero);
        let r = momentum_residual(&tr, &psi).unwrap();
        assert_eq!(r.time, 0.0);
        assert!(r.residual.abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn zero_state_without_tension_is_exact() {
        let circle = Shape2::Circle { center: [0.0, 0.0], radius: 1.0 };
        let tr = traj(circle, Diffeo::Identity, Flow::Zero, params(0.0));
        let r = momentum_residual(&tr, &field([0.8, 0.2], 0.7, TimeVariant::Open)).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn translating_bubble_is_a_weak_solution() {
        let circle = Shape2::Circle { center: [-0.5, 0.0], radius: 0.5 };
        let tr = traj(
            circle,
            Diffeo::Translation { velocity: [1.0, 0.2] },
            Flow::Uniform { velocity: [1.0, 0.2] },
            params(0.5),
        );
        let r = momentum_residual(&tr, &field([0.0, 0.0], 1.8, TimeVariant::ClosedAtZero)).unwrap();
        assert!(r.time.abs() > 1e-3);
        assert!(r.residual.abs() < 1e-7, "{r:?}");
        let e = energy_audit(&tr, 0.0, 1.0).unwrap();
        assert!(e.relative_gap < 1e-10, "{e:?}");
    }

    #[test]
    fn footprint_union_covers_both() {
        let a = Footprint { center: Vec2::new(0.0, 0.0), radius: 0.5, start: 0.1, end: 0.3 };
        let b = Footprint { center: Vec2::new(1.0, 0.0), radius: 0.2, start: 0.2, end: 0.6 };
        let u: Footprint<f64> = a.union(&b);
        assert!((u.radius - 0.85).abs() < 1e-15);
        assert!((u.center - Vec2::new(0.35, 0.0)).norm() < 1e-15);
        assert_eq!((u.start, u.end), (0.1, 0.6));
    }

    #[test]
    fn weak_transport_static_domain_is_exact_in_time() {
        let circle = Shape2::Circle { center: [0.0, 0.0], radius: 1.0 };
        let tr = traj(circle, Diffeo::Identity, Flow::Zero, params(0.5));
        let phi = BumpScalar {
            center: Vec2::new(0.7, 0.0),
            radius: 0.6,
            amplitude: 1.0,
            time: TimeWindow::new(0.0, 0.5, TimeVariant::ClosedAtZero).unwrap(),
        };
        let r = transport_residual(&tr, &phi, TransportQuadrature::Spectral { dt: 1e-3 }).unwrap();
        assert!(r.initial > 0.01);
        assert!(r.residual < 1e-6, "{r:?}");
    }

    #[test]
    fn smooth_step_derivative_matches_fd() {
        for u in [0.1, 0.37, 0.5, 0.81] {
            let h = 1e-6;
            let fd = (smooth_step::<f64>(u + h).0 - smooth_step::<f64>(u - h).0) / (2.0 * h);
            assert!((fd - smooth_step::<f64>(u).1).abs() < 1e-8);
        }
    }

    #[test]
    fn tv_dictionary_on_disk() {
        let circle = Shape2::Circle { center: [0.0, 0.0], radius: 1.0 };
        let tr = traj(circle, Diffeo::Identity, Flow::Zero, params(0.5));
        let r = total_variation_identity(&tr.state(0.3)).unwrap();
        assert!((r.geometric - std::f64::consts::TAU).abs() < 1e-12);
        let ratio = r.ratio.unwrap();
        // one-sided up to the bulk quadrature error
        assert!(ratio >= 0.95 && ratio <= 1.0 + 1e-4, "{ratio:e}");
    }

    #[test]
    fn strong_residual_refuses_interface_points() {
        let circle = Shape2::Circle { center: [0.0, 0.0], radius: 1.0 };
        let tr = traj(circle, Diffeo::Identity, Flow::Zero, params(0.5));
        let st = tr.state(0.0);
        let r = strong_residual_bulk(&st, &[Vec2::new(1.0, 0.0)], |_, _| Vec2::zero(), 0.01);
        assert!(matches!(r, Err(Error::OnInterface { .. })));
    }
}
