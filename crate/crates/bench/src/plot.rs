//! Static SVG panels plus the CSV data behind each one.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::aggregate::{quantile, read_aggregate, AggregateRow, Metric};
use crate::error::{BenchError, Result};
use crate::plan::Method;
use crate::records::{fmt_f64, read_steps, StepRow};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

/// Fixed per-method colors shared by every panel.
pub fn method_color(m: Method) -> &'static str {
    match m {
        Method::Icem => "#d62728",
        Method::DscemVarV1 => "#1f77b4",
        Method::DscemVarV2 => "#2ca02c",
        Method::DscemVarV3 => "#9467bd",
        Method::DscemCovV3 => "#ff7f0e",
        Method::IcemBaseline => "#555555",
    }
}

/// A line with an optional interquartile band.
struct Series {
    method: Method,
    x: Vec<f64>,
    mid: Vec<f64>,
    band: Option<(Vec<f64>, Vec<f64>)>,
    /// Drawn as a dashed horizontal reference across the panel.
    reference: bool,
    opacity: f64,
    legend: bool,
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(series: &[Series]) -> Self {
        let xs = series.iter().filter(|s| !s.reference).flat_map(|s| s.x.iter().copied());
        let x = padded(span(xs.chain(series.iter().filter(|s| s.reference).flat_map(|s| s.x.iter().copied()))), 0.02);
        let ys = series.iter().flat_map(|s| {
            let band = s.band.iter().flat_map(|(lo, hi)| lo.iter().chain(hi.iter()));
            s.mid.iter().chain(band).copied()
        });
        Self { x, y: padded(span(ys), 0.05) }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn span(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn padded((lo, hi): (f64, f64), frac: f64) -> (f64, f64) {
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = frac * (hi - lo);
    (lo - pad, hi + pad)
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn render(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let f = Frame::fit(series);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{title}</text>"#, (LEFT + WIDTH - RIGHT) / 2.0);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    for t in ticks(f.y.0, f.y.1) {
        let y = f.py(t);
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#e5e5e5"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, y + 4.0, tick_label(t));
    }
    for t in ticks(f.x.0, f.x.1) {
        let x = f.px(t);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}" stroke="#333"/>"##, y1 + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y1 + 19.0, tick_label(t));
    }
    let _ = writeln!(s, r##"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="#333"/>"##, x1 - x0, y1 - y0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{ylabel}</text>"#,
        (y0 + y1) / 2.0
    );

    for se in series {
        let color = method_color(se.method);
        let (xs, mids, band) = if se.reference {
            let (lo, hi) = se.band.as_ref().map_or((se.mid[0], se.mid[0]), |(l, h)| (l[0], h[0]));
            (vec![f.x.0, f.x.1], vec![se.mid[0]; 2], Some((vec![lo; 2], vec![hi; 2])))
        } else {
            (se.x.clone(), se.mid.clone(), se.band.clone())
        };
        if let Some((lo, hi)) = &band {
            let mut pts = String::new();
            for (x, y) in xs.iter().zip(hi).chain(xs.iter().zip(lo).rev()) {
                let _ = write!(pts, "{:.2},{:.2} ", f.px(*x), f.py(*y));
            }
            let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#, pts.trim_end());
        }
        let pts: Vec<String> = xs.iter().zip(&mids).map(|(x, y)| format!("{:.2},{:.2}", f.px(*x), f.py(*y))).collect();
        let dash = if se.reference { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8" stroke-opacity="{}"{dash}/>"#,
            pts.join(" "),
            se.opacity
        );
        if !se.reference && xs.len() <= 40 {
            for (x, y) in xs.iter().zip(&mids) {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, f.px(*x), f.py(*y));
            }
        }
    }
    let mut seen = Vec::new();
    for se in series.iter().filter(|s| s.legend) {
        if seen.contains(&se.method) {
            continue;
        }
        let y = TOP + 12.0 + 20.0 * seen.len() as f64;
        let x = WIDTH - RIGHT + 14.0;
        let color = method_color(se.method);
        let _ = writeln!(s, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="3"/>"#, x + 22.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x + 28.0, y + 4.0, se.method.id());
        seen.push(se.method);
    }
    s.push_str("</svg>\n");
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(BenchError::io(path))
}

/// Median and IQR vs. sample size for one metric.
pub fn metric_panel(rows: &[AggregateRow], metric: Metric) -> (String, String) {
    let mut by_method: BTreeMap<Method, Vec<&AggregateRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.metric == metric) {
        by_method.entry(r.method).or_default().push(r);
    }
    let mut csv = String::from("method,n,median,q25,q75\n");
    let series: Vec<Series> = by_method
        .into_iter()
        .map(|(method, mut rs)| {
            rs.sort_by_key(|r| r.n);
            for r in &rs {
                let _ = writeln!(csv, "{},{},{},{},{}", method.id(), r.n, fmt_f64(r.median), fmt_f64(r.q25), fmt_f64(r.q75));
            }
            Series {
                method,
                x: rs.iter().map(|r| r.n as f64).collect(),
                mid: rs.iter().map(|r| r.median).collect(),
                band: Some((rs.iter().map(|r| r.q25).collect(), rs.iter().map(|r| r.q75).collect())),
                reference: method == Method::IcemBaseline,
                opacity: 1.0,
                legend: true,
            }
        })
        .collect();
    let (title, ylabel) = match metric {
        Metric::CumulativeCost => ("Cumulative cost", "cumulative cost"),
        Metric::Smoothness => ("Control input smoothness", "S"),
    };
    (render(title, "samples N", ylabel, &series), csv)
}

/// The sample size closest to `target` that `method` was run with.
fn nearest_n(steps: &[StepRow], method: Method, target: usize) -> Option<usize> {
    steps.iter().filter(|s| s.method == method).map(|s| s.n).min_by_key(|n| n.abs_diff(target))
}

fn methods_in(steps: &[StepRow]) -> Vec<Method> {
    let mut ms: Vec<Method> = steps.iter().map(|s| s.method).collect();
    ms.sort();
    ms.dedup();
    ms
}

/// Stage cost over time (median and IQR across runs).
pub fn convergence_panel(steps: &[StepRow], target_n: usize) -> (String, String) {
    let mut csv = String::from("method,n,k,median,q25,q75\n");
    let mut series = Vec::new();
    for method in methods_in(steps) {
        let Some(n) = nearest_n(steps, method, target_n) else { continue };
        let mut by_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for s in steps.iter().filter(|s| s.method == method && s.n == n && s.stage_cost.is_finite()) {
            by_k.entry(s.k).or_default().push(s.stage_cost);
        }
        let mut x = Vec::new();
        let (mut mid, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
        for (k, mut v) in by_k {
            v.sort_by(f64::total_cmp);
            let (m, a, b) = (quantile(&v, 0.5), quantile(&v, 0.25), quantile(&v, 0.75));
            let _ = writeln!(csv, "{},{n},{k},{},{},{}", method.id(), fmt_f64(m), fmt_f64(a), fmt_f64(b));
            x.push(k as f64);
            mid.push(m);
            lo.push(a);
            hi.push(b);
        }
        series.push(Series { method, x, mid, band: Some((lo, hi)), reference: false, opacity: 1.0, legend: true });
    }
    (render(&format!("Convergence (N ≈ {target_n})"), "time step k", "stage cost", &series), csv)
}

/// Applied first control input of every run of one method.
pub fn controls_panel(steps: &[StepRow], method: Method, target_n: usize) -> Option<(String, String)> {
    let n = nearest_n(steps, method, target_n)?;
    let mut runs: BTreeMap<usize, Vec<&StepRow>> = BTreeMap::new();
    for s in steps.iter().filter(|s| s.method == method && s.n == n) {
        runs.entry(s.run).or_default().push(s);
    }
    let mut csv = String::from("method,n,run,k,u0\n");
    let series: Vec<Series> = runs
        .into_iter()
        .enumerate()
        .map(|(i, (run, mut rs))| {
            rs.sort_by_key(|s| s.k);
            for s in &rs {
                let _ = writeln!(csv, "{},{n},{run},{},{}", method.id(), s.k, fmt_f64(s.control[0]));
            }
            Series {
                method,
                x: rs.iter().map(|s| s.k as f64).collect(),
                mid: rs.iter().map(|s| s.control[0]).collect(),
                band: None,
                reference: false,
                opacity: 0.35,
                legend: i == 0,
            }
        })
        .collect();
    Some((render(&format!("Applied controls, {} (N = {n})", method.id()), "time step k", "u", &series), csv))
}

/// Renders every panel for an output directory. Needs `aggregate.csv`;
/// the time-series panels are drawn when `steps.csv` exists.
pub fn plot_summary(dir: &Path, convergence_n: usize) -> Result<Vec<PathBuf>> {
    let rows = read_aggregate(&dir.join("aggregate.csv"))?;
    if rows.is_empty() {
        return Err(BenchError::Data { path: dir.join("aggregate.csv"), reason: "no aggregate rows to plot".into() });
    }
    let mut written = Vec::new();
    let mut emit = |stem: &str, (svg, csv): (String, String)| -> Result<()> {
        let svg_path = dir.join(format!("{stem}.svg"));
        write(&svg_path, &svg)?;
        write(&dir.join(format!("plot_{stem}.csv")), &csv)?;
        written.push(svg_path);
        Ok(())
    };
    emit("cost_vs_n", metric_panel(&rows, Metric::CumulativeCost))?;
    emit("smoothness_vs_n", metric_panel(&rows, Metric::Smoothness))?;
    let steps_path = dir.join("steps.csv");
    if steps_path.exists() {
        let steps = read_steps(&steps_path)?;
        emit("convergence", convergence_panel(&steps, convergence_n))?;
        for m in methods_in(&steps) {
            if let Some(p) = controls_panel(&steps, m, convergence_n) {
                emit(&format!("controls_{}", m.id()), p)?;
            }
        }
    }
    Ok(written)
}
