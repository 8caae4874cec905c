use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cvm::CvmObjective;
use super::{CvmBounds, SampleScheme, SampleSet};
use crate::special::normal_quantile;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeConfig {
    /// Stop once the Euclidean gradient norm of the reduced objective drops below this.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Lattice restarts plus one seeded random restart; at least 1.
    pub restarts: usize,
    /// Antithetic pairs `(x, −x)`, plus the origin for odd counts.
    pub symmetric: bool,
    pub seed: u64,
    pub memory: usize,
    pub bounds: CvmBounds,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iter: 5000,
            restarts: 3,
            symmetric: true,
            seed: 0x5eed_1cd0,
            memory: 10,
            bounds: CvmBounds::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeStatus {
    Converged,
    /// Iteration budget exhausted; best iterate returned.
    MaxIterations,
    /// Line search could not make progress; best iterate returned.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub status: OptimizeStatus,
    pub iterations: usize,
    pub grad_norm: f64,
    /// Index of the restart that produced the returned set.
    pub restart: usize,
}

impl OptimizeReport {
    pub fn converged(&self) -> bool {
        self.status == OptimizeStatus::Converged
    }
}

/// Minimizes the CvM distance over the locations of `count` points in `R^dim`.
pub fn optimize_samples(dim: usize, count: usize, config: &OptimizeConfig) -> Result<(SampleSet, OptimizeReport)> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidArgument("optimize_samples needs dim >= 1 and count >= 1".into()));
    }
    let objective = CvmObjective::new(dim, count, config.bounds)?;
    let layout = Layout { dim, count, symmetric: config.symmetric };
    let free = layout.free_points();

    let mut best: Option<(f64, Vec<f64>, OptimizeReport)> = None;
    if free == 0 {
        let params = Vec::new();
        let value = objective.reduced_value(&layout.expand(&params))?;
        let report = OptimizeReport { status: OptimizeStatus::Converged, iterations: 0, grad_norm: 0.0, restart: 0 };
        best = Some((value, params, report));
    } else {
        for restart in 0..config.restarts.max(1) {
            let start = initial_points(free, dim, restart, config);
            let (value, params, mut report) = lbfgs(&objective, &layout, start, config)?;
            report.restart = restart;
            if best.as_ref().map_or(true, |(v, _, _)| value < *v) {
                best = Some((value, params, report));
            }
        }
    }
    let (value, params, report) = best.expect("at least one restart");
    let rows = layout.expand(&params);
    let points = DMatrix::from_row_slice(count, dim, &rows);
    let score = (objective.scale() * value).max(0.0);
    Ok((SampleSet::new(points, SampleScheme::LcdOptimized, Some(score))?, report))
}

/// Maps free parameters to the full row-major point set.
struct Layout {
    dim: usize,
    count: usize,
    symmetric: bool,
}

impl Layout {
    fn free_points(&self) -> usize {
        if self.symmetric {
            self.count / 2
        } else {
            self.count
        }
    }

    fn has_origin(&self) -> bool {
        self.symmetric && self.count % 2 == 1
    }

    /// Rows are ordered `[0,] p₁, −p₁, p₂, −p₂, …` so every even-length
    /// prefix after the origin stays symmetric.
    fn expand(&self, params: &[f64]) -> Vec<f64> {
        if !self.symmetric {
            return params.to_vec();
        }
        let d = self.dim;
        let mut rows = Vec::with_capacity(self.count * d);
        if self.has_origin() {
            rows.extend(core::iter::repeat(0.0).take(d));
        }
        for p in params.chunks(d) {
            rows.extend_from_slice(p);
            rows.extend(p.iter().map(|v| -v));
        }
        rows
    }

    fn reduce_gradient(&self, full: &[f64], out: &mut [f64]) {
        if !self.symmetric {
            out.copy_from_slice(full);
            return;
        }
        let d = self.dim;
        let offset = if self.has_origin() { d } else { 0 };
        for (k, o) in out.chunks_mut(d).enumerate() {
            let plus = &full[offset + 2 * k * d..offset + (2 * k + 1) * d];
            let minus = &full[offset + (2 * k + 1) * d..offset + (2 * k + 2) * d];
            for j in 0..d {
                o[j] = plus[j] - minus[j];
            }
        }
    }
}

/// Kronecker lattice through the Gaussian quantile; the last restart is
/// i.i.d. Gaussian from a fixed seed.
///
/// The steps are `frac(√p)` over the first primes. The generalized golden
/// ratio steps of the R_d sequence crowd together as `d` grows, which makes
/// neighbouring coordinates nearly collinear when there are fewer points
/// than dimensions.
fn initial_points(free: usize, dim: usize, restart: usize, config: &OptimizeConfig) -> Vec<f64> {
    let restarts = config.restarts.max(1);
    if restarts > 1 && restart == restarts - 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        return (0..free * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    }
    let alphas: Vec<f64> = primes(dim).into_iter().map(|p| libm::sqrt(p as f64) % 1.0).collect();
    let shift = 0.5 + 0.5 * (restart as f64) / restarts as f64;
    let mut out = Vec::with_capacity(free * dim);
    for i in 0..free {
        for a in &alphas {
            let u = (shift + (i + 1) as f64 * a) % 1.0;
            // Points near the median would have antithetic twins on top of them.
            let u = u.clamp(1e-6, 1.0 - 1e-6);
            out.push(normal_quantile(u));
        }
    }
    out
}

fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut n = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= n).all(|p| n % p != 0) {
            out.push(n);
        }
        n += 1;
    }
    out
}

struct Eval {
    value: f64,
    grad: Vec<f64>,
}

fn evaluate(objective: &CvmObjective, layout: &Layout, params: &[f64], full_grad: &mut [f64]) -> Result<Eval> {
    let rows = layout.expand(params);
    let value = objective.reduced_value_and_gradient(&rows, full_grad)?;
    let mut grad = vec![0.0; params.len()];
    layout.reduce_gradient(full_grad, &mut grad);
    Ok(Eval { value, grad })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lbfgs(
    objective: &CvmObjective,
    layout: &Layout,
    mut x: Vec<f64>,
    config: &OptimizeConfig,
) -> Result<(f64, Vec<f64>, OptimizeReport)> {
    let n = x.len();
    let mut full_grad = vec![0.0; layout.count * layout.dim];
    let mut cur = evaluate(objective, layout, &x, &mut full_grad)?;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(config.memory);
    let mut status = OptimizeStatus::MaxIterations;
    let mut iterations = 0;

    while iterations < config.max_iter {
        let gnorm = libm::sqrt(dot(&cur.grad, &cur.grad));
        if gnorm <= config.grad_tol {
            status = OptimizeStatus::Converged;
            break;
        }
        iterations += 1;

        // Two-loop recursion.
        let mut dir: Vec<f64> = cur.grad.iter().map(|g| -g).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &dir);
            for i in 0..n {
                dir[i] -= a * y[i];
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            dir.iter_mut().for_each(|v| *v *= gamma);
        } else {
            let scale = 1.0 / gnorm.max(1.0);
            dir.iter_mut().for_each(|v| *v *= scale);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &dir);
            for i in 0..n {
                dir[i] += (a - b) * s[i];
            }
        }
        let mut slope = dot(&cur.grad, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir = cur.grad.iter().map(|g| -g / gnorm.max(1.0)).collect();
            slope = dot(&cur.grad, &dir);
        }

        let Some((step, next, next_x)) = line_search(objective, layout, &x, &cur, &dir, slope, &mut full_grad)? else {
            status = OptimizeStatus::Stalled;
            break;
        };
        let s: Vec<f64> = dir.iter().map(|v| v * step).collect();
        let y: Vec<f64> = next.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if history.len() == config.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = next_x;
        cur = next;
    }

    let grad_norm = libm::sqrt(dot(&cur.grad, &cur.grad));
    if grad_norm <= config.grad_tol {
        status = OptimizeStatus::Converged;
    }
    Ok((cur.value, x, OptimizeReport { status, iterations, grad_norm, restart: 0 }))
}

/// Weak-Wolfe bisection. When decreases fall below rounding noise the
/// Armijo test is replaced by the approximate-Wolfe slope bound.
fn line_search(
    objective: &CvmObjective,
    layout: &Layout,
    x: &[f64],
    cur: &Eval,
    dir: &[f64],
    slope0: f64,
    full_grad: &mut [f64],
) -> Result<Option<(f64, Eval, Vec<f64>)>> {
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let noise = 1e-12 * cur.value.abs().max(1e-3);
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    let mut step = 1.0;
    for _ in 0..60 {
        let trial: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + step * d).collect();
        let eval = evaluate(objective, layout, &trial, full_grad)?;
        let slope = dot(&eval.grad, dir);
        let armijo = eval.value <= cur.value + C1 * step * slope0;
        let approx = eval.value <= cur.value + noise && slope <= (2.0 * 0.1 - 1.0) * slope0;
        if !(eval.value.is_finite()) || !(armijo || approx) {
            hi = step;
        } else if slope < C2 * slope0 {
            lo = step;
        } else {
            return Ok(Some((step, eval, trial)));
        }
        step = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * step };
        if hi.is_finite() && (hi - lo) < 1e-14 * hi {
            break;
        }
    }
    if lo > 0.0 {
        let trial: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + lo * d).collect();
        let eval = evaluate(objective, layout, &trial, full_grad)?;
        if eval.value <= cur.value + noise {
            return Ok(Some((lo, eval, trial)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcd::cvm_distance;

    #[test]
    fn single_point_sits_at_origin() {
        let (set, report) = optimize_samples(1, 1, &OptimizeConfig::default()).unwrap();
        assert!(set.points()[(0, 0)].abs() < 1e-6);
        assert!(report.converged());
    }

    #[test]
    fn single_point_without_symmetry_converges_to_origin() {
        let cfg = OptimizeConfig { symmetric: false, ..OptimizeConfig::default() };
        let (set, report) = optimize_samples(1, 1, &cfg).unwrap();
        assert!(set.points()[(0, 0)].abs() < 1e-6, "{}", set.points()[(0, 0)]);
        assert!(report.grad_norm < 1e-6);
    }

    #[test]
    fn symmetric_layout_has_zero_mean() {
        let (set, _) = optimize_samples(2, 7, &OptimizeConfig { restarts: 1, ..Default::default() }).unwrap();
        assert_eq!(set.points().row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0]);
        for j in 0..2 {
            assert!(set.points().column(j).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn score_matches_recomputed_distance() {
        let (set, _) = optimize_samples(1, 4, &OptimizeConfig::default()).unwrap();
        let d = cvm_distance(&set).unwrap();
        assert!((set.cvm_score().unwrap() - d).abs() < 1e-12 * d.max(1e-12));
    }

    #[test]
    fn layout_gradient_reduction_is_chain_rule() {
        let layout = Layout { dim: 2, count: 5, symmetric: true };
        let full: Vec<f64> = (0..10).map(|v| v as f64).collect();
        let mut out = vec![0.0; 4];
        layout.reduce_gradient(&full, &mut out);
        // rows: origin (0,1), +p1 (2,3), -p1 (4,5), +p2 (6,7), -p2 (8,9)
        assert_eq!(out, vec![-2.0, -2.0, -2.0, -2.0]);
    }
}
