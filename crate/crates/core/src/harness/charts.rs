//! Static SVG charts for one to three experiments.
//!
//! Every plotted number is also written as a `data-*` attribute with the
//! same formatting as the CSV files, so a chart can be checked against the
//! CSVs it was drawn from.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::output::{ensure_dir, write_file};
use super::run::RunArtifacts;
use super::stats::{mean, sample_std};
use crate::error::{Error, Result};

pub const TRAINING_CURVES_SVG: &str = "training_curves.svg";
pub const TEST_SCORES_SVG: &str = "test_scores.svg";
pub const CONSUMPTION_SVG: &str = "consumption.svg";

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];
const SEED_COLOR: &str = "#d62728";
const DRUG_COLOR: &str = "#1f77b4";

/// Mean and sample standard deviation of all test-episode returns.
pub fn test_score_summary(art: &RunArtifacts) -> (f64, f64) {
    let all: Vec<f64> = art.repeats.iter().flat_map(|r| r.test_returns()).collect();
    (mean(&all), sample_std(&all))
}

/// Seeds and drugs eaten per test episode, pooled over repeats.
pub fn consumption_summary(art: &RunArtifacts) -> (f64, f64) {
    let episodes: usize = art.repeats.iter().map(|r| r.test.len()).sum();
    let (s, d) = art
        .repeats
        .iter()
        .map(|r| r.consumption())
        .fold((0u64, 0u64), |(a, b), (s, d)| (a + s, b + d));
    (s as f64 / episodes as f64, d as f64 / episodes as f64)
}

struct Frame {
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + x / self.x_max.max(f64::MIN_POSITIVE) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        HEIGHT - BOTTOM - (y - self.y_min) / span * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round-number tick step covering `span` in about five intervals.
fn tick_step(span: f64) -> f64 {
    if !(span > 0.0) {
        return 1.0;
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn nice_max(v: f64) -> f64 {
    if !(v > 0.0) {
        return 1.0;
    }
    let step = tick_step(v);
    (v / step).ceil() * step
}

fn open(svg: &mut String, title: &str, x_label: &str, y_label: &str) {
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(y_label)
    )
    .unwrap();
}

fn y_axis(svg: &mut String, f: &Frame) {
    let step = tick_step(f.y_max - f.y_min);
    let mut y = (f.y_min / step).ceil() * step;
    while y <= f.y_max + step * 1e-9 {
        let py = f.py(y);
        writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#e0e0e0"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            WIDTH - RIGHT,
            LEFT - 6.0,
            py + 4.0,
            y
        )
        .unwrap();
        y += step;
    }
    writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/><line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        HEIGHT - BOTTOM,
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    )
    .unwrap();
}

fn legend(svg: &mut String, entries: &[(&str, &str)]) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = TOP + 4.0 + 16.0 * i as f64;
        let x = WIDTH - RIGHT - 170.0;
        writeln!(
            svg,
            r#"<rect x="{x}" y="{y}" width="12" height="12" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            x + 18.0,
            y + 10.0,
            escape(label)
        )
        .unwrap();
    }
}

fn join(values: impl Iterator<Item = String>) -> String {
    values.collect::<Vec<_>>().join(" ")
}

pub fn training_curves_svg(arts: &[&RunArtifacts]) -> String {
    let x_max = arts
        .iter()
        .flat_map(|a| a.training_curve.last().map(|p| p.bin_start_episode))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let ys = arts.iter().flat_map(|a| a.training_curve.iter().map(|p| p.mean_return));
    let (lo, hi) = ys.fold((0.0f64, 0.0f64), |(lo, hi), y| (lo.min(y), hi.max(y)));
    let f = Frame {
        x_max,
        y_min: -nice_max(-lo),
        y_max: nice_max(hi),
    };
    let mut svg = String::new();
    open(&mut svg, "Training return (mean over repeats)", "episode", "return");
    y_axis(&mut svg, &f);
    let step = tick_step(x_max);
    let mut x = 0.0;
    while x <= x_max + step * 1e-9 {
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            f.px(x),
            HEIGHT - BOTTOM + 16.0,
            x
        )
        .unwrap();
        x += step;
    }
    let mut entries = Vec::new();
    for (i, art) in arts.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points = join(
            art.training_curve
                .iter()
                .map(|p| format!("{:.2},{:.2}", f.px(p.bin_start_episode as f64), f.py(p.mean_return))),
        );
        writeln!(
            svg,
            r#"<polyline class="series" data-label="{}" data-x="{}" data-y="{}" data-std="{}" points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            escape(art.label()),
            join(art.training_curve.iter().map(|p| p.bin_start_episode.to_string())),
            join(art.training_curve.iter().map(|p| p.mean_return.to_string())),
            join(art.training_curve.iter().map(|p| p.std_return.to_string())),
        )
        .unwrap();
        entries.push((art.label(), color));
    }
    legend(&mut svg, &entries);
    svg.push_str("</svg>\n");
    svg
}

fn group_labels(svg: &mut String, arts: &[&RunArtifacts], slot: f64) {
    for (i, art) in arts.iter().enumerate() {
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + slot * (i as f64 + 0.5),
            HEIGHT - BOTTOM + 16.0,
            escape(art.label())
        )
        .unwrap();
    }
}

pub fn test_scores_svg(arts: &[&RunArtifacts]) -> String {
    let summaries: Vec<(f64, f64)> = arts.iter().map(|a| test_score_summary(a)).collect();
    let top = summaries.iter().map(|(m, s)| m + s).fold(0.0, f64::max);
    let f = Frame {
        x_max: 1.0,
        y_min: 0.0,
        y_max: nice_max(top),
    };
    let mut svg = String::new();
    open(&mut svg, "Test-time return (mean ± std)", "experiment", "return");
    y_axis(&mut svg, &f);
    let slot = (WIDTH - LEFT - RIGHT) / arts.len().max(1) as f64;
    for (i, (art, (m, s))) in arts.iter().zip(&summaries).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let cx = LEFT + slot * (i as f64 + 0.5);
        let w = slot * 0.5;
        let y = f.py(m.max(0.0));
        writeln!(
            svg,
            r#"<rect class="bar" data-label="{}" data-mean="{m}" data-std="{s}" x="{:.2}" y="{y:.2}" width="{w:.2}" height="{:.2}" fill="{color}"/>"#,
            escape(art.label()),
            cx - w / 2.0,
            (f.py(0.0) - y).max(0.0)
        )
        .unwrap();
        let (y_lo, y_hi) = (f.py((m - s).max(0.0)), f.py(m + s));
        writeln!(
            svg,
            r#"<line x1="{cx:.2}" y1="{y_lo:.2}" x2="{cx:.2}" y2="{y_hi:.2}" stroke="black"/><line x1="{:.2}" y1="{y_hi:.2}" x2="{:.2}" y2="{y_hi:.2}" stroke="black"/><line x1="{:.2}" y1="{y_lo:.2}" x2="{:.2}" y2="{y_lo:.2}" stroke="black"/>"#,
            cx - 8.0,
            cx + 8.0,
            cx - 8.0,
            cx + 8.0
        )
        .unwrap();
    }
    group_labels(&mut svg, arts, slot);
    svg.push_str("</svg>\n");
    svg
}

pub fn consumption_svg(arts: &[&RunArtifacts]) -> String {
    let summaries: Vec<(f64, f64)> = arts.iter().map(|a| consumption_summary(a)).collect();
    let top = summaries.iter().map(|(s, d)| s.max(*d)).fold(0.0, f64::max);
    let f = Frame {
        x_max: 1.0,
        y_min: 0.0,
        y_max: nice_max(top),
    };
    let mut svg = String::new();
    open(&mut svg, "Test-time consumption per episode", "experiment", "items eaten");
    y_axis(&mut svg, &f);
    let slot = (WIDTH - LEFT - RIGHT) / arts.len().max(1) as f64;
    for (i, (art, (seeds, drugs))) in arts.iter().zip(&summaries).enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let w = slot * 0.3;
        for (kind, value, color, x) in [
            ("seeds", *seeds, SEED_COLOR, cx - w),
            ("drugs", *drugs, DRUG_COLOR, cx),
        ] {
            let y = f.py(value);
            writeln!(
                svg,
                r#"<rect class="bar" data-label="{}" data-kind="{kind}" data-value="{value}" x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{:.2}" fill="{color}"/>"#,
                escape(art.label()),
                (f.py(0.0) - y).max(0.0)
            )
            .unwrap();
        }
    }
    group_labels(&mut svg, arts, slot);
    legend(&mut svg, &[("healthy seeds", SEED_COLOR), ("drugs", DRUG_COLOR)]);
    svg.push_str("</svg>\n");
    svg
}

/// Writes the three charts into `out_dir`.
pub fn emit_charts(arts: &[&RunArtifacts], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if arts.is_empty() {
        return Err(Error::Usage("at least one experiment is needed to draw charts".into()));
    }
    ensure_dir(out_dir)?;
    [
        (TRAINING_CURVES_SVG, training_curves_svg(arts)),
        (TEST_SCORES_SVG, test_scores_svg(arts)),
        (CONSUMPTION_SVG, consumption_svg(arts)),
    ]
    .into_iter()
    .map(|(name, body)| {
        let path = out_dir.join(name);
        write_file(&path, &body)?;
        Ok(path)
    })
    .collect()
}
