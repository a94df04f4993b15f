//! Median/IQR line plots rendered as standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use super::{ExperimentKind, ResultRow};
use crate::error::{Error, Result};
use crate::numeric::quantile;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 210.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// One curve: `(x, q25, median, q75)` per distinct x.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub series: Vec<PlotSeries>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    P,
    M,
    Snr,
    Theta,
}

impl Axis {
    fn value(&self, r: &ResultRow) -> Option<f64> {
        match self {
            Axis::P => Some(r.p as f64),
            Axis::M => Some(r.m as f64),
            Axis::Snr => Some(r.snr_db.unwrap_or(f64::INFINITY)),
            Axis::Theta => Some(r.theta),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Axis::P => "columns p",
            Axis::M => "reflectors m",
            Axis::Snr => "SNR (dB)",
            Axis::Theta => "theta",
        }
    }

    fn describe(&self, r: &ResultRow) -> String {
        match self {
            Axis::P => format!("p={}", r.p),
            Axis::M => format!("m={}", r.m),
            Axis::Snr => match r.snr_db {
                Some(s) => format!("SNR={s} dB"),
                None => "noiseless".to_owned(),
            },
            Axis::Theta => format!("θ={}", r.theta),
        }
    }
}

type Metric = (&'static str, fn(&ResultRow) -> Option<f64>);

const METRICS: [Metric; 4] = [
    ("l∞ error in u", |r| r.linf_u),
    ("‖V − V̂‖_F", |r| r.frob_v),
    ("per-entry error in X", |r| r.x_err_per_entry),
    ("support F1", |r| r.support_f1),
];

fn pick_metric(rows: &[ResultRow]) -> Metric {
    let kind = rows.first().and_then(|r| ExperimentKind::parse(&r.experiment_kind));
    match kind {
        Some(ExperimentKind::Fig3LinfVsP | ExperimentKind::Fig5Noise) => METRICS[0],
        Some(ExperimentKind::Fig1FrobVVsM | ExperimentKind::Fig2FrobVVsP) => METRICS[1],
        Some(ExperimentKind::Fig4XerrVsP) => METRICS[2],
        _ => METRICS
            .into_iter()
            .find(|(_, f)| rows.iter().any(|r| f(r).is_some()))
            .unwrap_or(METRICS[0]),
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v.len()
}

/// Groups rows into curves: x is the first of p, m, SNR, θ that varies;
/// one curve per method and combination of the other varying parameters.
pub fn build_plot(rows: &[ResultRow]) -> Plot {
    let axes = [Axis::P, Axis::M, Axis::Snr, Axis::Theta];
    let varying: Vec<Axis> = axes
        .into_iter()
        .filter(|a| distinct(rows.iter().filter_map(|r| a.value(r))) > 1)
        .collect();
    let x_axis = varying.first().copied().unwrap_or(Axis::P);
    let (y_label, metric) = pick_metric(rows);

    let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in rows {
        let (Some(x), Some(y)) = (x_axis.value(r), metric(r)) else {
            continue;
        };
        if !x.is_finite() || !y.is_finite() {
            continue;
        }
        let mut label = r.method.clone();
        for a in varying.iter().filter(|a| **a != x_axis) {
            label.push_str(", ");
            label.push_str(&a.describe(r));
        }
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, pts)) => pts.push((x, y)),
            None => groups.push((label, vec![(x, y)])),
        }
    }

    let series = groups
        .into_iter()
        .map(|(label, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut points = Vec::new();
            let mut i = 0;
            while i < pts.len() {
                let x = pts[i].0;
                let mut ys: Vec<f64> = pts[i..].iter().take_while(|p| p.0 == x).map(|p| p.1).collect();
                i += ys.len();
                let q25 = quantile(&mut ys, 0.25);
                let med = quantile(&mut ys, 0.5);
                let q75 = quantile(&mut ys, 0.75);
                points.push((x, q25, med, q75));
            }
            PlotSeries { label, points }
        })
        .collect();

    Plot {
        title: rows.first().map(|r| format!("{} (n={})", r.experiment_kind, r.n)).unwrap_or_default(),
        x_label: x_axis.label(),
        y_label,
        series,
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_step(range: f64, target: usize) -> f64 {
    let raw = range / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

/// Renders a plot to SVG text. Output depends only on the plot data.
pub fn render_svg(plot: &Plot) -> String {
    let pts = plot.series.iter().flat_map(|s| s.points.iter());
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, lo, _, hi) in pts {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(lo);
        y_max = y_max.max(hi);
    }
    if !x_min.is_finite() {
        (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    let log_y = y_min > 0.0 && y_max / y_min > 50.0;
    let (ty_min, ty_max) = if log_y {
        (y_min.log10().floor(), y_max.log10().ceil())
    } else {
        let lo = y_min.min(0.0);
        let hi = if y_max > lo { y_max * 1.05 } else { lo + 1.0 };
        (lo, hi)
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| {
        let t = if log_y { y.max(1e-300).log10() } else { y };
        TOP + plot_h - (t - ty_min) / (ty_max - ty_min) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&plot.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    // y ticks
    let y_ticks: Vec<f64> = if log_y {
        (ty_min as i32..=ty_max as i32).map(|e| 10f64.powi(e)).collect()
    } else {
        let step = nice_step(ty_max - ty_min, 5);
        let first = (ty_min / step).ceil() as i64;
        let last = (ty_max / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    };
    for t in y_ticks {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    // x ticks at the data's distinct x values when there are few of them
    let mut xs: Vec<f64> = plot.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    if xs.len() > 12 || xs.is_empty() {
        let step = nice_step(x_max - x_min, 6);
        let first = (x_min / step).ceil() as i64;
        let last = (x_max / step).floor() as i64;
        xs = (first..=last).map(|k| k as f64 * step).collect();
    }
    for t in xs {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 19.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(plot.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(plot.y_label),
        if log_y { " (log scale)" } else { "" }
    );

    for (i, s) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let upper: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.3))).collect();
        let lower: Vec<String> = s.points.iter().rev().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.2))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.join(" ")
        );
        for p in &s.points {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(p.0), sy(p.2));
        }
        let ly = TOP + 10.0 + i as f64 * 18.0;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_plot(rows: &[ResultRow], path: &Path) -> Result<()> {
    let svg = render_svg(&build_plot(rows));
    std::fs::write(path, svg).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}
