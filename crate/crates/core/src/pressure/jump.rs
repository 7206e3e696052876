//! Normal/tangential splitting on the interface and the pressure jump law.

use serde::Serialize;

use crate::linalg::Vec2;
use crate::surface::{ClosedCurve, Hypersurface};
use crate::{Error, Real, Result};

/// `P_τ b`, `P_ν b` and `C = |Γ|⁻¹ ∫_Γ b·ν⁻`.
#[derive(Clone, Debug, Serialize)]
pub struct Projection<T> {
    #[serde(skip)]
    pub tangential: Vec<Vec2<T>>,
    #[serde(skip)]
    pub normal: Vec<Vec2<T>>,
    pub constant: T,
}

pub fn projection_constants<T: Real>(curve: &ClosedCurve<T>, b: &[Vec2<T>]) -> Result<Projection<T>> {
    if b.len() != curve.len() {
        return Err(Error::NodeMismatch { expected: curve.len(), got: b.len() });
    }
    let nu = curve.normals();
    let normal: Vec<Vec2<T>> = b.iter().zip(nu).map(|(b, n)| *n * b.dot(n)).collect();
    let tangential = b.iter().zip(&normal).map(|(b, n)| *b - *n).collect();
    let flux: Vec<T> = b.iter().zip(nu).map(|(b, n)| b.dot(n)).collect();
    let constant = curve.integrate(&flux)? / curve.measure();
    Ok(Projection { tangential, normal, constant })
}

/// One-sided pressure traces at the interface nodes.
#[derive(Clone, Debug, Default)]
pub struct Traces<T> {
    pub minus: Vec<T>,
    pub plus: Vec<T>,
}

impl<T: Real> Traces<T> {
    /// `[p] = p⁺ − p⁻`.
    pub fn jump(&self) -> Vec<T> {
        self.plus.iter().zip(&self.minus).map(|(&a, &b)| a - b).collect()
    }

    pub fn shift(&mut self, minus: T, plus: T) {
        self.minus.iter_mut().for_each(|v| *v = *v + minus);
        self.plus.iter_mut().for_each(|v| *v = *v + plus);
    }
}

/// Nodewise `[p] − 2[μDvν]·ν − 2σκ`.
pub fn jump_defect<T: Real>(traces: &Traces<T>, viscous_jump: &[T], sigma: T, kappa: &[T]) -> Vec<T> {
    let two = T::lit(2.0);
    traces
        .jump()
        .iter()
        .zip(viscous_jump)
        .zip(kappa)
        .map(|((&j, &s), &k)| j - s - two * sigma * k)
        .collect()
}

/// Statistics of the jump defect on `Γ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct YoungLaplaceReport<T> {
    pub max_defect: T,
    /// `(∫_Γ defect²)^{1/2}`.
    pub l2_defect: T,
    /// `|Γ|⁻¹ ∫_Γ defect`: the constant absorbed by the jump adjustment.
    pub mean_defect: T,
    /// `|Γ|⁻¹ ∫_Γ (p⁻ − p⁺)`.
    pub mean_inner_excess: T,
}

pub fn young_laplace_check<T: Real>(
    curve: &ClosedCurve<T>,
    traces: &Traces<T>,
    viscous_jump: &[T],
    sigma: T,
) -> Result<YoungLaplaceReport<T>> {
    let defect = jump_defect(traces, viscous_jump, sigma, &curve.mean_curvature());
    let len = curve.measure();
    let sq: Vec<T> = defect.iter().map(|d| *d * *d).collect();
    let excess: Vec<T> = traces.jump().iter().map(|j| -*j).collect();
    Ok(YoungLaplaceReport {
        max_defect: defect.iter().fold(T::zero(), |m, d| m.max(d.abs())),
        l2_defect: curve.integrate(&sq)?.sqrt(),
        mean_defect: curve.integrate(&defect)? / len,
        mean_inner_excess: curve.integrate(&excess)? / len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_multiple_gives_its_constant() {
        let c = ClosedCurve::<f64>::ellipse(Vec2::new(0.0, 0.0), 1.5, 0.7, 128, false).unwrap();
        let b: Vec<Vec2<f64>> = c.normals().iter().map(|n| *n * 0.37).collect();
        let p = projection_constants(&c, &b).unwrap();
        assert!((p.constant - 0.37).abs() < 1e-12);
        assert!(p.tangential.iter().all(|t| t.norm() < 1e-15));
    }

    #[test]
    fn shifted_cosine_on_unit_circle() {
        let c = ClosedCurve::<f64>::circle(Vec2::new(0.0, 0.0), 1.0, 128, false).unwrap();
        let b: Vec<Vec2<f64>> = c.nodes().iter().zip(c.normals()).map(|(x, n)| *n * (1.0 + x[0])).collect();
        assert!((projection_constants(&c, &b).unwrap().constant - 1.0).abs() < 1e-13);
    }
}
