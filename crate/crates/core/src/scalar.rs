//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Floating point scalar the geometry, quadrature and solvers are written against.
///
/// Implemented for `f32` and `f64`. The tolerances quoted throughout the crate
/// assume `f64`; `f32` is supported for the algebra but will not meet them.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    /// Derivative of the trigonometric interpolant of equispaced periodic samples
    /// on `[0, 2π)`, evaluated back at the samples.
    fn periodic_derivative(samples: &[Self], order: u32) -> Vec<Self>;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn periodic_derivative(samples: &[Self], order: u32) -> Vec<Self> {
                let n = samples.len();
                if n == 0 {
                    return Vec::new();
                }
                let mut planner = FftPlanner::<$t>::new();
                let forward = planner.plan_fft_forward(n);
                let inverse = planner.plan_fft_inverse(n);
                let mut buf: Vec<Complex<$t>> =
                    samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
                forward.process(&mut buf);
                for (k, c) in buf.iter_mut().enumerate() {
                    let wave = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                    // Odd derivatives of the unpaired Nyquist mode are not real-valued.
                    if n % 2 == 0 && k == n / 2 && order % 2 == 1 {
                        *c = Complex::new(0.0, 0.0);
                        continue;
                    }
                    let ik = Complex::new(0.0, wave as $t);
                    let mut factor = Complex::new(1.0, 0.0);
                    for _ in 0..order {
                        factor *= ik;
                    }
                    *c *= factor;
                }
                inverse.process(&mut buf);
                let scale = 1.0 / n as $t;
                buf.iter().map(|c| c.re * scale).collect()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_trig_polynomial_is_exact() {
        let n = 32;
        let s: Vec<f64> = (0..n).map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64).collect();
        let f: Vec<f64> = s.iter().map(|&t| (3.0 * t).sin() + 0.5 * t.cos()).collect();
        let df = f64::periodic_derivative(&f, 1);
        let d2f = f64::periodic_derivative(&f, 2);
        for (j, &t) in s.iter().enumerate() {
            assert!((df[j] - (3.0 * (3.0 * t).cos() - 0.5 * t.sin())).abs() < 1e-12);
            assert!((d2f[j] - (-9.0 * (3.0 * t).sin() - 0.5 * t.cos())).abs() < 1e-11);
        }
    }

    #[test]
    fn f32_derivative_works() {
        let n = 16;
        let f: Vec<f32> = (0..n)
            .map(|j| (2.0 * std::f32::consts::PI * j as f32 / n as f32).cos())
            .collect();
        let df = f32::periodic_derivative(&f, 1);
        assert!((df[4] + 1.0).abs() < 1e-5);
    }
}
