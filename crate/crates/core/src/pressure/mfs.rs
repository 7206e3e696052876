//! Harmonic extension of boundary data by the method of fundamental solutions.

use serde::Serialize;

use crate::linalg::{ridge_least_squares, DenseMatrix, Vec2};
use crate::surface::{ClosedCurve, Hypersurface};
use crate::{Error, Real, Result};

/// Source layout and acceptance threshold for the Dirichlet solve.
#[derive(Clone, Debug, PartialEq)]
pub struct MfsSettings<T> {
    /// Radial scale factors tried in order: sources sit at `c + f(γ − c)`.
    pub offsets: Vec<T>,
    /// Use every `stride`-th boundary node as a source location.
    pub stride: usize,
    /// Relative Tikhonov weight: the penalty rows carry `ridge · ‖A‖_F`, so the
    /// regularization acts at the scale of the collocation matrix, not of its coefficients.
    pub ridge: T,
    /// Maximum nodal trace error accepted.
    pub tolerance: T,
}

impl<T: Real> Default for MfsSettings<T> {
    fn default() -> Self {
        Self { offsets: vec![T::lit(1.5), T::lit(1.3), T::lit(2.0)], stride: 2, ridge: T::lit(1e-12), tolerance: T::lit(1e-8) }
    }
}

/// `m(x) = a₀ + Σⱼ aⱼ log|x − sⱼ|`, harmonic in the region enclosed by the curve.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureExtension<T> {
    #[serde(skip)]
    pub sources: Vec<Vec2<T>>,
    #[serde(skip)]
    pub coeffs: Vec<T>,
    pub constant: T,
    /// Offset factor that met the tolerance.
    pub offset: T,
    /// `max_q |m(γ_q) − data_q|`.
    pub trace_error: T,
}

impl<T: Real> CurvatureExtension<T> {
    pub fn value(&self, x: &Vec2<T>) -> T {
        self.sources
            .iter()
            .zip(&self.coeffs)
            .fold(self.constant, |acc, (s, &c)| acc + c * (*x - *s).norm().ln())
    }

    /// `∇m`; the extended curvature `K` inside the region.
    pub fn gradient(&self, x: &Vec2<T>) -> Vec2<T> {
        self.sources.iter().zip(&self.coeffs).fold(Vec2::zero(), |acc, (s, &c)| {
            let d = *x - *s;
            acc + d * (c / d.norm_sq())
        })
    }
}

/// Solves `Δm = 0` inside `curve` with `m = data` at the nodes.
///
/// Fails with [`Error::MfsFailed`] when no offset meets the tolerance.
pub fn harmonic_extension<T: Real>(
    curve: &ClosedCurve<T>,
    data: &[T],
    settings: &MfsSettings<T>,
) -> Result<CurvatureExtension<T>> {
    let nodes = curve.nodes();
    if data.len() != nodes.len() {
        return Err(Error::NodeMismatch { expected: nodes.len(), got: data.len() });
    }
    if data.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite { what: "boundary data" });
    }
    let n = T::from_usize_lossy(nodes.len());
    let center = nodes.iter().fold(Vec2::zero(), |a, x| a + *x) * n.recip();
    let mut best = T::infinity();
    for &f in &settings.offsets {
        let sources: Vec<Vec2<T>> =
            nodes.iter().step_by(settings.stride.max(1)).map(|g| center + (*g - center) * f).collect();
        let mut a = DenseMatrix::zeros(nodes.len(), sources.len() + 1);
        for (i, x) in nodes.iter().enumerate() {
            a.set(i, 0, T::one());
            for (j, s) in sources.iter().enumerate() {
                a.set(i, j + 1, (*x - *s).norm().ln());
            }
        }
        let scale = settings.ridge * a.frobenius_norm();
        let Some(sol) = ridge_least_squares(&a, data, scale * scale) else {
            continue;
        };
        let ext = CurvatureExtension {
            sources,
            constant: sol[0],
            coeffs: sol[1..].to_vec(),
            offset: f,
            trace_error: T::zero(),
        };
        let err = nodes.iter().zip(data).fold(T::zero(), |e, (x, &d)| e.max((ext.value(x) - d).abs()));
        if err <= settings.tolerance {
            return Ok(CurvatureExtension { trace_error: err, ..ext });
        }
        best = best.min(err);
    }
    Err(Error::MfsFailed {
        offsets: settings.offsets.iter().map(|f| f.to_f64_lossy()).collect(),
        trace_error: best.to_f64_lossy(),
    })
}

/// Harmonic extension of the interface's own mean curvature.
pub fn extend_mean_curvature<T: Real>(curve: &ClosedCurve<T>, settings: &MfsSettings<T>) -> Result<CurvatureExtension<T>> {
    harmonic_extension(curve, &curve.mean_curvature(), settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_reproduced() {
        let c = ClosedCurve::<f64>::ellipse(Vec2::new(0.1, 0.0), 1.5, 0.7, 256, false).unwrap();
        let ext = harmonic_extension(&c, &vec![-0.7; 256], &MfsSettings::default()).unwrap();
        assert!(ext.trace_error < 1e-10);
        assert!((ext.value(&Vec2::new(0.3, 0.2)) + 0.7).abs() < 1e-10);
        assert!(ext.gradient(&Vec2::new(0.3, 0.2)).norm() < 1e-9);
    }

    #[test]
    fn cosine_data_on_unit_circle() {
        let c = ClosedCurve::<f64>::circle(Vec2::new(0.0, 0.0), 1.0, 256, false).unwrap();
        let data: Vec<f64> = c.nodes().iter().map(|x| -1.0 + 0.1 * x[0]).collect();
        let ext = harmonic_extension(&c, &data, &MfsSettings::default()).unwrap();
        let x = Vec2::new(0.4, -0.3);
        assert!((ext.value(&x) - (-1.0 + 0.1 * 0.4)).abs() < 1e-9);
        assert!((ext.gradient(&x) - Vec2::new(0.1, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn impossible_tolerance_reports_failure() {
        let c = ClosedCurve::<f64>::circle(Vec2::new(0.0, 0.0), 1.0, 64, false).unwrap();
        let data: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s = MfsSettings { tolerance: 1e-14, ..MfsSettings::default() };
        assert!(matches!(harmonic_extension(&c, &data, &s), Err(Error::MfsFailed { .. })));
    }
}
