mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{gauss, median, optimized};
use dscem_core::lcd::*;
use dscem_core::proposal::random_rotation;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set(rows: &[&[f64]]) -> SampleSet {
    let d = rows[0].len();
    let pts = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    SampleSet::new(pts, SampleScheme::RandomGaussian, None).unwrap()
}

/// `∫ N(y; mean, cov) exp(−‖y−m‖²/(2b²)) dy` by tensor-product quadrature.
fn gaussian_lcd_quadrature(mean: &DVector<f64>, cov: &DMatrix<f64>, m: &[f64], b: f64) -> f64 {
    let d = mean.len();
    let inv = cov.clone().try_inverse().unwrap();
    let norm = ((2.0 * PI).powi(d as i32) * cov.determinant()).sqrt();
    let integrand = |y: &[f64]| {
        let r: Vec<f64> = (0..d).map(|i| y[i] - mean[i]).collect();
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += r[i] * inv[(i, j)] * r[j];
            }
        }
        let k: f64 = y.iter().zip(m).map(|(a, c)| (a - c) * (a - c)).sum();
        (-0.5 * q - k / (2.0 * b * b)).exp() / norm
    };
    let span = |i: usize| {
        let s = cov[(i, i)].sqrt();
        (mean[i] - 12.0 * s, mean[i] + 12.0 * s, (48.0 * s / (0.5 * b.min(s))).ceil() as usize)
    };
    match d {
        1 => {
            let (a, c, p) = span(0);
            gauss(|y| integrand(&[y]), a, c, p)
        }
        2 => {
            let ((a0, c0, p0), (a1, c1, p1)) = (span(0), span(1));
            gauss(|y0| gauss(|y1| integrand(&[y0, y1]), a1, c1, p1), a0, c0, p0)
        }
        _ => unreachable!(),
    }
}

/// LCD of `N(0, I)` in closed form.
fn standard_lcd(m: &[f64], b: f64) -> f64 {
    let d = m.len() as f64;
    let s = 1.0 + b * b;
    (b * b / s).powf(0.5 * d) * (-m.iter().map(|v| v * v).sum::<f64>() / (2.0 * s)).exp()
}

fn random_spd(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(d, d) * 0.3
}

#[test]
fn gaussian_lcd_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..12 {
        let d = 1 + case % 2;
        let mean = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let cov = random_spd(d, &mut rng);
        let m: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b = rng.random_range(0.3..3.0);
        let kernel = KernelParams::new(DVector::from_column_slice(&m), b).unwrap();
        let value = gaussian_lcd(&mean, &cov, &kernel).unwrap();
        let oracle = gaussian_lcd_quadrature(&mean, &cov, &m, b);
        assert!((value - oracle).abs() < 1e-10, "case {case}: {value} vs {oracle}");
        let standard = gaussian_lcd(&DVector::zeros(d), &DMatrix::identity(d, d), &kernel).unwrap();
        assert!((standard - standard_lcd(&m, b)).abs() < 1e-14);
        assert!((standard - gaussian_lcd_quadrature(&DVector::zeros(d), &DMatrix::identity(d, d), &m, b)).abs() < 1e-10);
    }
}

#[test]
fn dirac_lcd_matches_direct_summation() {
    let s = optimized(2, 25);
    let kernel = KernelParams::new(DVector::zeros(2), 1.0).unwrap();
    let mut sum = 0.0;
    for i in 0..25 {
        let r2 = s.points()[(i, 0)].powi(2) + s.points()[(i, 1)].powi(2);
        sum += (-r2 / 2.0).exp();
    }
    assert!((dirac_lcd(&s, &kernel).unwrap() - sum / 25.0).abs() < 1e-12);
}

/// `∫ (F̃ − F)² dm` with both LCDs evaluated pointwise and the `m`-integral
/// done numerically.
fn inner_quadrature(s: &SampleSet, b: f64) -> f64 {
    let d = s.dim();
    let pts = s.points();
    let sq = |m: &[f64]| {
        let dirac = (0..s.count())
            .map(|i| (-(0..d).map(|j| (pts[(i, j)] - m[j]).powi(2)).sum::<f64>() / (2.0 * b * b)).exp())
            .sum::<f64>()
            / s.count() as f64;
        (standard_lcd(m, b) - dirac).powi(2)
    };
    let reach = pts.amax() + 10.0 * (1.0 + b * b).sqrt();
    let panels = (2.0 * reach / (0.5 * b.min(1.0))).ceil() as usize;
    match d {
        1 => gauss(|m| sq(&[m]), -reach, reach, panels),
        2 => gauss(|m0| gauss(|m1| sq(&[m0, m1]), -reach, reach, panels), -reach, reach, panels),
        _ => unreachable!(),
    }
}

#[test]
fn cvm_inner_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..8 {
        let d = 1 + case % 2;
        let n = 1 + case % 4;
        let s = SampleSet::random_gaussian(d, n, &mut rng).unwrap();
        let b = rng.random_range(0.3..4.0);
        let value = cvm_inner(&s, b);
        let oracle = inner_quadrature(&s, b);
        assert!((value - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "case {case}: {value} vs {oracle}");
    }
}

#[test]
fn cvm_distance_matches_nested_quadrature_in_one_dimension() {
    let bounds = CvmBounds { b_min: 0.05, b_max: 20.0 };
    for rows in [vec![0.3], vec![-1.2, 0.4, 0.9], vec![-0.7, 0.7, 1.5, -2.0]] {
        let s = SampleSet::new(DMatrix::from_column_slice(rows.len(), 1, &rows), SampleScheme::RandomGaussian, None)
            .unwrap();
        let oracle = gauss(
            |t| {
                let b = t.exp();
                b * inner_quadrature(&s, b)
            },
            bounds.b_min.ln(),
            bounds.b_max.ln(),
            40,
        );
        let value = cvm_distance_with(&s, bounds).unwrap();
        assert!((value - oracle).abs() < 1e-8 * oracle, "{rows:?}: {value} vs {oracle}");
    }
}

#[test]
fn default_truncation_is_close_to_wider_bounds() {
    let s = optimized(2, 10);
    let narrow = cvm_distance(&s).unwrap();
    let wide = cvm_distance_with(&s, CvmBounds { b_min: 1e-5, b_max: 5e3 }).unwrap();
    assert!(wide >= narrow);
    assert!((wide - narrow) / wide < 1e-3, "{narrow} vs {wide}");
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..10 {
        let d = 1 + case % 3;
        let n = 2 + case % 5;
        let obj = CvmObjective::new(d, n, CvmBounds::default()).unwrap();
        let x: Vec<f64> = (0..d * n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let mut grad = vec![0.0; x.len()];
        obj.reduced_value_and_gradient(&x, &mut grad).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..x.len())
            .map(|k| {
                let (mut p, mut m) = (x.clone(), x.clone());
                p[k] += h;
                m[k] -= h;
                (obj.reduced_value(&p).unwrap() - obj.reduced_value(&m).unwrap()) / (2.0 * h)
            })
            .collect();
        let err = grad.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = fd.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err < 1e-5 * scale, "case {case}: {err} vs {scale}");
    }
}

/// Scans `a ↦ D(pattern(a))` over `(0, 3]` and refines around the best grid
/// point.
fn scan_minimizer(pattern: impl Fn(f64) -> SampleSet) -> (f64, Vec<f64>) {
    let dist = |a: f64| cvm_distance(&pattern(a)).unwrap();
    let coarse: Vec<f64> = (1..=300).map(|i| dist(i as f64 * 0.01)).collect();
    let i = (0..coarse.len()).min_by(|&a, &b| coarse[a].total_cmp(&coarse[b])).unwrap();
    let centre = (i + 1) as f64 * 0.01;
    let fine = (-1000..=1000).map(|k| centre + k as f64 * 1e-5);
    let best = fine.min_by(|&a, &b| dist(a).total_cmp(&dist(b))).unwrap();
    (best, coarse)
}

fn unimodal(values: &[f64]) -> bool {
    let turn = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    turn > 0
        && turn < values.len() - 1
        && values[..=turn].windows(2).all(|w| w[1] < w[0])
        && values[turn..].windows(2).all(|w| w[1] > w[0])
}

#[test]
fn symmetric_pair_matches_grid_scan() {
    let (a, scan) = scan_minimizer(|a| set(&[&[-a], &[a]]));
    assert!(unimodal(&scan));
    let s = optimized(1, 2);
    let pts = s.points();
    assert!((pts.amax() - a).abs() < 1e-3, "{} vs {a}", pts.amax());
    assert!((pts[(0, 0)] + pts[(1, 0)]).abs() < 1e-12);
}

#[test]
fn symmetric_triple_matches_grid_scan() {
    let (a, _) = scan_minimizer(|a| set(&[&[-a], &[0.0], &[a]]));
    let s = optimized(1, 3);
    let mut xs: Vec<f64> = s.points().iter().copied().collect();
    xs.sort_by(f64::total_cmp);
    assert!(xs[1].abs() < 1e-12);
    assert!((xs[2] - a).abs() < 1e-3 && (xs[0] + a).abs() < 1e-3, "{xs:?} vs {a}");
}

#[test]
fn optimized_sets_beat_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (d, n) in [(1, 5), (2, 25)] {
        let start = Instant::now();
        let s = optimized(d, n);
        assert!(start.elapsed().as_secs_f64() < 60.0);
        let random: Vec<f64> =
            (0..100).map(|_| cvm_distance(&SampleSet::random_gaussian(d, n, &mut rng).unwrap()).unwrap()).collect();
        assert!(cvm_distance(&s).unwrap() < median(random));
    }
}

#[test]
fn optimized_set_is_a_local_minimum() {
    let s = optimized(2, 25);
    let base = cvm_distance(&s).unwrap();
    for i in 0..25 {
        for j in 0..2 {
            for delta in [-1e-3, 1e-3] {
                let mut pts = s.points().clone();
                pts[(i, j)] += delta;
                let probe = SampleSet::new(pts, SampleScheme::LcdOptimized, None).unwrap();
                assert!(cvm_distance(&probe).unwrap() >= base - 1e-12, "row {i} col {j} delta {delta}");
            }
        }
    }
}

#[test]
fn optimized_set_has_near_identity_covariance() {
    let s = optimized(2, 25);
    let c = s.covariance();
    assert!(c[(0, 1)].abs() < 0.15 && c[(1, 0)].abs() < 0.15);
    for k in 0..2 {
        assert!((0.5..=1.5).contains(&c[(k, k)]), "{c}");
    }
    assert!(s.column_means().amax() < 1e-6);
}

fn random_set(d: usize, n: usize, seed: u64) -> SampleSet {
    SampleSet::random_gaussian(d, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn distance_ignores_row_order(d in 1usize..4, n in 2usize..9, seed: u64, perm_seed: u64) {
        let s = random_set(d, n, seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let permuted = DMatrix::from_fn(n, d, |i, j| s.points()[(order[i], j)]);
        let p = SampleSet::new(permuted, SampleScheme::RandomGaussian, None).unwrap();
        let (a, b) = (cvm_distance(&s).unwrap(), cvm_distance(&p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn distance_ignores_rotation(d in 2usize..5, n in 2usize..9, seed: u64, rot_seed: u64) {
        let s = random_set(d, n, seed);
        let r = random_rotation(d, &mut ChaCha8Rng::seed_from_u64(rot_seed));
        let rotated = s.points() * r.transpose();
        let p = SampleSet::new(rotated, SampleScheme::RandomGaussian, None).unwrap();
        prop_assert!((cvm_distance(&s).unwrap() - cvm_distance(&p).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn distance_is_finite_and_nonnegative(d in 1usize..4, n in 1usize..9, seed: u64) {
        let v = cvm_distance(&random_set(d, n, seed)).unwrap();
        prop_assert!(v.is_finite() && v >= 0.0);
    }
}
