//! Modified Cramér–von Mises distance between the LCD of `N(0, I)` and the
//! LCD of a Dirac mixture, with weight `w(b) = b^{1−d}`.
//!
//! With `u = 1/b²` the inner integral over kernel centres is
//!
//! ```text
//! ∫ (F̃ − F)² dm = (πb²)^{d/2} [ (1+u)^{-d/2}
//!                              − 2/N Σᵢ (1+u/2)^{-d/2} exp(−ρᵢ u / (2(2+u)))
//!                              + 1/N² Σᵢⱼ exp(−qᵢⱼ u / 4) ]
//! ```
//!
//! with `ρᵢ = ‖xᵢ‖²` and `qᵢⱼ = ‖xᵢ − xⱼ‖²`. The weighted prefactor
//! `b^{1−d} (πb²)^{d/2} = π^{d/2} b` is dimension free, which makes the
//! pairwise part integrable over `b` in closed form with `E1`. The leading
//! constant of all three brackets cancels, so each bracket is integrated
//! as `(· − 1)`. The Gaussian–Gaussian and Gaussian–Dirac parts are one
//! dimensional integrals over `t = ln b` done by adaptive quadrature.
//!
//! Without truncation the outer integral diverges logarithmically at large
//! `b` unless the sample mean is zero, so `b` is restricted to
//! [`CvmBounds`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::SampleSet;
use crate::quadrature::integrate;
use crate::special::exp_integral_e1;
use crate::{Error, Result};

const QUAD_ABS_TOL: f64 = 1e-14;
const QUAD_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvmBounds {
    pub b_min: f64,
    pub b_max: f64,
}

impl Default for CvmBounds {
    fn default() -> Self {
        Self { b_min: 1e-3, b_max: 50.0 }
    }
}

impl CvmBounds {
    fn validate(&self) -> Result<()> {
        if !(self.b_min > 0.0 && self.b_max > self.b_min && self.b_max.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "bandwidth bounds must satisfy 0 < b_min < b_max < inf, got [{}, {}]",
                self.b_min,
                self.b_max
            )));
        }
        Ok(())
    }
}

/// `∫ (F̃(m,b) − F(m,b))² dm` at a fixed bandwidth, unweighted.
pub fn cvm_inner(samples: &SampleSet, b: f64) -> f64 {
    let d = samples.dim() as f64;
    let n = samples.count();
    let pts = samples.points();
    let u = 1.0 / (b * b);
    let gg = libm::expm1(-0.5 * d * libm::log1p(u));
    let gd_pow = -0.5 * d * libm::log1p(0.5 * u);
    let mut gd = 0.0;
    for i in 0..n {
        let rho: f64 = pts.row(i).iter().map(|v| v * v).sum();
        gd += libm::expm1(gd_pow - rho * u / (2.0 * (2.0 + u)));
    }
    gd /= n as f64;
    let mut dd = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let q: f64 = pts.row(i).iter().zip(pts.row(j).iter()).map(|(a, c)| (a - c) * (a - c)).sum();
            dd += libm::expm1(-0.25 * q * u);
        }
    }
    dd *= 2.0 / (n * n) as f64;
    libm::pow(PI * b * b, 0.5 * d) * (gg - 2.0 * gd + dd)
}

/// Distance with the default bandwidth bounds.
pub fn cvm_distance(samples: &SampleSet) -> Result<f64> {
    cvm_distance_with(samples, CvmBounds::default())
}

pub fn cvm_distance_with(samples: &SampleSet, bounds: CvmBounds) -> Result<f64> {
    let objective = CvmObjective::new(samples.dim(), samples.count(), bounds)?;
    let rows = row_major(samples);
    Ok(objective.scale() * objective.reduced_value(&rows)?)
}

pub(crate) fn row_major(samples: &SampleSet) -> Vec<f64> {
    let pts = samples.points();
    let mut rows = Vec::with_capacity(samples.count() * samples.dim());
    for i in 0..samples.count() {
        rows.extend(pts.row(i).iter().copied());
    }
    rows
}

/// The distance divided by `π^{d/2}`, as a function of row-major points.
#[derive(Debug, Clone)]
pub struct CvmObjective {
    dim: usize,
    count: usize,
    bounds: CvmBounds,
    gaussian_term: f64,
}

impl CvmObjective {
    pub fn new(dim: usize, count: usize, bounds: CvmBounds) -> Result<Self> {
        if dim == 0 || count == 0 {
            return Err(Error::InvalidArgument("objective needs dim >= 1 and count >= 1".into()));
        }
        bounds.validate()?;
        let half_d = 0.5 * dim as f64;
        let gaussian_term = outer(bounds, |t| {
            let b = libm::exp(t);
            let b2 = b * b;
            b2 * libm::expm1(-half_d * libm::log1p(1.0 / b2))
        })?;
        Ok(Self { dim, count, bounds, gaussian_term })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `π^{d/2}`, the factor between reduced and true distance.
    pub fn scale(&self) -> f64 {
        libm::pow(PI, 0.5 * self.dim as f64)
    }

    fn check_len(&self, rows: &[f64]) -> Result<()> {
        if rows.len() != self.dim * self.count {
            return Err(Error::DimensionMismatch { expected: self.dim * self.count, actual: rows.len() });
        }
        Ok(())
    }

    pub fn reduced_value(&self, rows: &[f64]) -> Result<f64> {
        self.check_len(rows)?;
        self.evaluate(rows, None)
    }

    /// Reduced value; writes `∂/∂rows` into `grad`.
    pub fn reduced_value_and_gradient(&self, rows: &[f64], grad: &mut [f64]) -> Result<f64> {
        self.check_len(rows)?;
        if grad.len() != rows.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), actual: grad.len() });
        }
        self.evaluate(rows, Some(grad))
    }

    fn evaluate(&self, rows: &[f64], mut grad: Option<&mut [f64]>) -> Result<f64> {
        let d = self.dim;
        let n = self.count;
        let nf = n as f64;
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }

        let mut cross = 0.0;
        for i in 0..n {
            let x = &rows[i * d..(i + 1) * d];
            let rho: f64 = x.iter().map(|v| v * v).sum();
            cross += self.dirac_gaussian(rho)?;
            if let Some(g) = grad.as_deref_mut() {
                let slope = -4.0 / nf * self.dirac_gaussian_slope(rho)?;
                for (gk, xk) in g[i * d..(i + 1) * d].iter_mut().zip(x) {
                    *gk += slope * xk;
                }
            }
        }

        let mut pairs = 0.0;
        let mut diff = vec![0.0; d];
        for i in 0..n {
            for j in (i + 1)..n {
                let (xi, xj) = (&rows[i * d..(i + 1) * d], &rows[j * d..(j + 1) * d]);
                let mut q = 0.0;
                for k in 0..d {
                    diff[k] = xi[k] - xj[k];
                    q += diff[k] * diff[k];
                }
                let (value, slope) = pair_term(q, self.bounds);
                pairs += value;
                if let Some(g) = grad.as_deref_mut() {
                    let c = 4.0 / (nf * nf) * slope;
                    for k in 0..d {
                        g[i * d + k] += c * diff[k];
                        g[j * d + k] -= c * diff[k];
                    }
                }
            }
        }

        Ok(self.gaussian_term - 2.0 / nf * cross + 2.0 / (nf * nf) * pairs)
    }

    /// `∫ b [ (1+u/2)^{-d/2} exp(−ρu/(2(2+u))) − 1 ] db`
    fn dirac_gaussian(&self, rho: f64) -> Result<f64> {
        let half_d = 0.5 * self.dim as f64;
        outer(self.bounds, |t| {
            let b = libm::exp(t);
            let b2 = b * b;
            let u = 1.0 / b2;
            b2 * libm::expm1(-half_d * libm::log1p(0.5 * u) - rho * u / (2.0 * (2.0 + u)))
        })
    }

    /// Derivative of [`Self::dirac_gaussian`] with respect to `ρ`.
    fn dirac_gaussian_slope(&self, rho: f64) -> Result<f64> {
        let half_d = 0.5 * self.dim as f64;
        outer(self.bounds, |t| {
            let b = libm::exp(t);
            let u = 1.0 / (b * b);
            // b² · u = 1 cancels the measure factor.
            -libm::exp(-half_d * libm::log1p(0.5 * u) - rho * u / (2.0 * (2.0 + u))) / (2.0 * (2.0 + u))
        })
    }
}

/// Integral over `t = ln b` between the bounds.
fn outer<F: FnMut(f64) -> f64>(bounds: CvmBounds, f: F) -> Result<f64> {
    integrate(f, libm::log(bounds.b_min), libm::log(bounds.b_max), QUAD_ABS_TOL, QUAD_REL_TOL)
        .map_err(|e| Error::Quadrature(alloc::format!("divergent outer integral: {e}")))
}

/// `Φ(q) = ∫ b (exp(−q/(4b²)) − 1) db` and `dΦ/dq`, in closed form.
///
/// With `s = q/(4b²)`: `Φ = q/8 [A(s₀) − A(s₁)]`, `A(s) = (1 − e^{−s})/s + E1(s)`,
/// and `dΦ/dq = −[E1(s₁) − E1(s₀)]/8`, where `s₀, s₁` belong to `b_min, b_max`.
fn pair_term(q: f64, bounds: CvmBounds) -> (f64, f64) {
    if q <= 0.0 {
        return (0.0, -0.25 * libm::log(bounds.b_max / bounds.b_min));
    }
    let s0 = q / (4.0 * bounds.b_min * bounds.b_min);
    let s1 = q / (4.0 * bounds.b_max * bounds.b_max);
    let e0 = exp_integral_e1(s0);
    let e1 = exp_integral_e1(s1);
    let a = |s: f64, e: f64| -libm::expm1(-s) / s + e;
    let value = 0.125 * q * (a(s0, e0) - a(s1, e1));
    let slope = -0.125 * (e1 - e0);
    (value, slope)
}
