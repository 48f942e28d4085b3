//! SVG plots rendered from summary statistics alone.
//!
//! Box plots draw the interquartile box, the median line and min/max
//! whiskers per strategy. The bar chart shows mean total iterations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::report::{Stats, SummaryRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 90.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    AccuracyBox,
    MostLikelyBox,
    IterationsBar,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [Self::AccuracyBox, Self::MostLikelyBox, Self::IterationsBar];

    pub fn file_name(self) -> &'static str {
        match self {
            Self::AccuracyBox => "accuracy_box.svg",
            Self::MostLikelyBox => "most_likely_box.svg",
            Self::IterationsBar => "iterations_bar.svg",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Self::AccuracyBox => "Final accuracy per strategy",
            Self::MostLikelyBox => "Most likely shot correct (trailing window)",
            Self::IterationsBar => "Mean optimization iterations per strategy",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy_box" => Ok(Self::AccuracyBox),
            "most_likely_box" => Ok(Self::MostLikelyBox),
            "iterations_bar" => Ok(Self::IterationsBar),
            _ => Err(Error::InvalidArgument(format!("unknown plot kind {s:?}"))),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Rounds `x` up to 1, 2 or 5 times a power of ten.
fn nice_ceiling(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(x.log10().floor());
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * mag >= x {
            return m * mag;
        }
    }
    10.0 * mag
}

pub fn render(summary: &[SummaryRow], kind: PlotKind) -> Result<String> {
    if summary.is_empty() {
        return Err(Error::InvalidArgument("empty summary".into()));
    }
    let y_max = match kind {
        PlotKind::IterationsBar => nice_ceiling(summary.iter().map(|s| s.iterations.mean).fold(0.0, f64::max)),
        _ => 1.0,
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |v: f64| TOP + plot_h * (1.0 - v / y_max);
    let slot = plot_w / summary.len() as f64;
    let half = (slot * 0.3).min(40.0);

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        kind.title()
    );
    for i in 0..=5 {
        let v = y_max * i as f64 / 5.0;
        let yy = y(v);
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="#dddddd"/>"##,
            WIDTH - RIGHT
        );
        let label = if y_max >= 10.0 { format!("{v:.0}") } else { format!("{v:.1}") };
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#,
            LEFT - 6.0,
            yy + 4.0
        );
    }
    let _ = writeln!(
        w,
        r##"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}" stroke="#333333"/>"##,
        TOP + plot_h
    );
    for (i, s) in summary.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let _ = writeln!(w, r#"<g class="group" data-strategy="{}">"#, escape(&s.strategy));
        match kind {
            PlotKind::IterationsBar => {
                let top = y(s.iterations.mean);
                let _ = writeln!(
                    w,
                    r##"<rect x="{:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="#4c78a8"/>"##,
                    cx - half,
                    2.0 * half,
                    TOP + plot_h - top
                );
                let _ = writeln!(
                    w,
                    r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
                    top - 4.0,
                    s.iterations.mean
                );
            }
            PlotKind::AccuracyBox | PlotKind::MostLikelyBox => {
                let st: Stats = if kind == PlotKind::AccuracyBox { s.accuracy } else { s.most_likely };
                let _ = writeln!(
                    w,
                    r##"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="#333333"/>"##,
                    y(st.max),
                    y(st.min)
                );
                for v in [st.min, st.max] {
                    let _ = writeln!(
                        w,
                        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#333333"/>"##,
                        cx - half / 2.0,
                        y(v),
                        cx + half / 2.0,
                        y(v)
                    );
                }
                let _ = writeln!(
                    w,
                    r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#9ecae9" stroke="#333333"/>"##,
                    cx - half,
                    y(st.q3),
                    2.0 * half,
                    (y(st.q1) - y(st.q3)).max(0.5)
                );
                let _ = writeln!(
                    w,
                    r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#d62728" stroke-width="2"/>"##,
                    cx - half,
                    y(st.median),
                    cx + half,
                    y(st.median)
                );
                let _ = writeln!(
                    w,
                    r#"<circle cx="{cx:.1}" cy="{:.1}" r="3" fill="black"/>"#,
                    y(st.mean)
                );
            }
        }
        let ly = TOP + plot_h + 14.0;
        let _ = writeln!(
            w,
            r#"<text x="{cx:.1}" y="{ly:.1}" text-anchor="end" transform="rotate(-35 {cx:.1} {ly:.1})">{}</text>"#,
            escape(&s.strategy)
        );
        let _ = writeln!(w, "</g>");
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

/// Writes one SVG per kind into `dir`.
pub fn write_plots(dir: &Path, summary: &[SummaryRow], kinds: &[PlotKind]) -> Result<Vec<PathBuf>> {
    kinds
        .iter()
        .map(|&k| {
            let path = dir.join(k.file_name());
            std::fs::write(&path, render(summary, k)?).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
