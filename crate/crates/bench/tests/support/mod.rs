//! Reference numerics for the acceptance suite, independent of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    return (x, 2.0 / ((1.0 - x * x) * dp * dp));
                }
            }
        })
        .collect()
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    thread_local!(static RULE: Vec<(f64, f64)> = legendre_rule(10));
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    RULE.with(|rule| rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half)
}

fn refine<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (l, r) = (panel(f, a, m), panel(f, m, b));
    let diff = (l + r - whole).abs();
    if diff <= tol || diff <= 8.0 * f64::EPSILON * (l.abs() + r.abs()) || depth >= 30 {
        return l + r;
    }
    refine(f, a, m, l, 0.5 * tol, depth + 1) + refine(f, m, b, r, 0.5 * tol, depth + 1)
}

/// Adaptive bisection with a 10-point Gauss–Legendre panel, started from
/// `pieces` equal panels so narrow peaks are not stepped over.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|p| {
            let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
            let whole = panel(&mut f, lo, hi);
            refine(&mut f, lo, hi, whole, tol / pieces as f64, 0)
        })
        .sum()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
