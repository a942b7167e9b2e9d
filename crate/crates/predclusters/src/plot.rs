//! Static SVG charts: per-generation trajectories (line chart) and final
//! objective distributions (box plot).
//!
//! Each series or box carries its exact data in a `data-values` attribute
//! (space-separated, shortest round-trip formatting) next to the drawn
//! geometry, so charts can be checked against the CSV files they came from.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::experiments::{Manifest, MANIFEST_FILE};
use crate::results::{read_final_population, read_generations, read_run, Algorithm, ResultsError, RESULT_FILE};

pub const TRAJECTORY_FILE: &str = "trajectories.svg";
pub const BOXPLOT_FILE: &str = "final_boxplot.svg";

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];
const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error(transparent)]
    Results(#[from] ResultsError),
    #[error("no run results found under {0}")]
    NothingToPlot(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel<T> {
    pub title: String,
    pub y_label: String,
    pub items: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxGroup {
    pub label: String,
    pub values: Vec<f64>,
}

/// Five-number summary with Tukey whiskers (furthest points within 1.5 IQR).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BoxStats {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        let (q1, median, q3) = (quantile(&s, 0.25), quantile(&s, 0.5), quantile(&s, 0.75));
        let fence = 1.5 * (q3 - q1);
        let whisker_low = *s.iter().find(|&&v| v >= q1 - fence).expect("q1 lies within the data");
        let whisker_high = *s.iter().rev().find(|&&v| v <= q3 + fence).expect("q3 lies within the data");
        Some(Self {
            q1,
            median,
            q3,
            whisker_low,
            whisker_high,
        })
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn join_values(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Parses a `data-values` attribute.
pub fn parse_values(attr: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    attr.split_whitespace().map(str::parse).collect()
}

/// Linear map from data range onto a pixel range.
#[derive(Debug, Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 * lo.abs().max(1.0) {
            let pad = 0.5 * lo.abs().max(1.0);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Self { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self, count: usize) -> Vec<f64> {
        (0..=count)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / count as f64)
            .collect()
    }
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn header(out: &mut String, width: f64, height: f64, kind: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" data-chart="{kind}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

/// Frame, title and y axis of one panel; returns the plot-area origin.
fn panel_frame(out: &mut String, top: f64, title: &str, y_label: &str, y: &Scale) -> (f64, f64) {
    let left = MARGIN_L;
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_top = top + MARGIN_T;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="14">{}</text>"#,
        left + plot_w / 2.0,
        top + 22.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{left:.3}" y="{plot_top:.3}" width="{plot_w:.3}" height="{plot_h:.3}" fill="none" stroke="#333"/>"##
    );
    for t in y.ticks(4) {
        let py = y.map(t);
        let _ = writeln!(
            out,
            r##"<line x1="{:.3}" y1="{py:.3}" x2="{left:.3}" y2="{py:.3}" stroke="#333"/><text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"##,
            left - 5.0,
            left - 8.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text transform="translate(16 {:.3}) rotate(-90)" text-anchor="middle">{}</text>"#,
        plot_top + plot_h / 2.0,
        escape(y_label)
    );
    (left, plot_top)
}

/// Line chart with one stacked panel per entry of `panels`.
pub fn line_chart(panels: &[Panel<Series>], x_label: &str) -> String {
    let height = PANEL_H * panels.len() as f64;
    let mut out = String::new();
    header(&mut out, PANEL_W, height, "line");
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    for (p, panel) in panels.iter().enumerate() {
        let top = PANEL_H * p as f64;
        let y = Scale::new(
            panel.items.iter().flat_map(|s| s.y.iter().copied()),
            top + MARGIN_T + plot_h,
            top + MARGIN_T,
        );
        let x = Scale::new(
            panel.items.iter().flat_map(|s| s.x.iter().copied()),
            MARGIN_L,
            MARGIN_L + plot_w,
        );
        let _ = writeln!(out, r#"<g class="panel" data-title="{}">"#, escape(&panel.title));
        let (left, plot_top) = panel_frame(&mut out, top, &panel.title, &panel.y_label, &y);
        for t in x.ticks(5) {
            let px = x.map(t);
            let _ = writeln!(
                out,
                r##"<text x="{px:.3}" y="{:.3}" text-anchor="middle">{}</text>"##,
                plot_top + plot_h + 16.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            left + plot_w / 2.0,
            plot_top + plot_h + 36.0,
            escape(x_label)
        );
        for (i, s) in panel.items.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let points: Vec<String> = s
                .x
                .iter()
                .zip(&s.y)
                .map(|(&a, &b)| format!("{:.3},{:.3}", x.map(a), y.map(b)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline class="series" data-series="{}" data-x="{}" data-values="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                escape(&s.name),
                join_values(&s.x),
                join_values(&s.y),
                points.join(" ")
            );
            let ly = plot_top + 12.0 + 16.0 * i as f64;
            let lx = left + plot_w + 12.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="{color}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{}</text>"#,
                lx + 18.0,
                lx + 24.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Box plot with one stacked panel per entry of `panels`.
pub fn box_plot(panels: &[Panel<BoxGroup>]) -> String {
    let height = PANEL_H * panels.len() as f64;
    let mut out = String::new();
    header(&mut out, PANEL_W, height, "box");
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    for (p, panel) in panels.iter().enumerate() {
        let top = PANEL_H * p as f64;
        let y = Scale::new(
            panel.items.iter().flat_map(|g| g.values.iter().copied()),
            top + MARGIN_T + plot_h,
            top + MARGIN_T,
        );
        let _ = writeln!(out, r#"<g class="panel" data-title="{}">"#, escape(&panel.title));
        let (left, plot_top) = panel_frame(&mut out, top, &panel.title, &panel.y_label, &y);
        let slot = plot_w / panel.items.len().max(1) as f64;
        for (i, g) in panel.items.iter().enumerate() {
            let cx = left + slot * (i as f64 + 0.5);
            let half = (slot * 0.3).min(24.0);
            let color = PALETTE[i % PALETTE.len()];
            let _ = writeln!(
                out,
                r#"<g class="box" data-label="{}" data-values="{}">"#,
                escape(&g.label),
                join_values(&g.values)
            );
            if let Some(b) = BoxStats::of(&g.values) {
                let _ = writeln!(
                    out,
                    r##"<line x1="{cx:.3}" y1="{:.3}" x2="{cx:.3}" y2="{:.3}" stroke="#333"/>"##,
                    y.map(b.whisker_low),
                    y.map(b.whisker_high)
                );
                let _ = writeln!(
                    out,
                    r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"##,
                    cx - half,
                    y.map(b.q3),
                    2.0 * half,
                    (y.map(b.q1) - y.map(b.q3)).max(0.0)
                );
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#000" stroke-width="2"/>"##,
                    cx - half,
                    y.map(b.median),
                    cx + half,
                    y.map(b.median)
                );
                for &v in g.values.iter().filter(|&&v| v < b.whisker_low || v > b.whisker_high) {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{cx:.3}" cy="{:.3}" r="2.5" fill="none" stroke="{color}"/>"#,
                        y.map(v)
                    );
                }
            }
            let _ = writeln!(
                out,
                r#"<text x="{cx:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
                plot_top + plot_h + 16.0,
                escape(&g.label)
            );
            out.push_str("</g>\n");
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Run directories under `dir`: the runs of a manifest, `dir` itself when it
/// holds a single run, or every immediate subdirectory holding one.
pub fn discover_runs(dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    if dir.join(MANIFEST_FILE).is_file() {
        let m = Manifest::read(dir)?;
        return Ok(m
            .runs
            .iter()
            .filter(|e| e.status == crate::experiments::RunStatus::Ok)
            .map(|e| dir.join(&e.dir))
            .collect());
    }
    if dir.join(RESULT_FILE).is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let entries = std::fs::read_dir(dir).map_err(|source| PlotError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut runs: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.join(RESULT_FILE).is_file())
        .collect();
    runs.sort();
    Ok(runs)
}

/// Writes `trajectories.svg` and `final_boxplot.svg` for the runs found
/// under `input` into `output`.
pub fn plot_results(input: &Path, output: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let runs = discover_runs(input)?;
    if runs.is_empty() {
        return Err(PlotError::NothingToPlot(input.to_path_buf()));
    }
    let mut dev_series = Vec::new();
    let mut mae_series = Vec::new();
    let mut dev_boxes = Vec::new();
    let mut mae_boxes = Vec::new();
    for dir in &runs {
        let result = read_run(dir)?;
        let mut name = format!("model {} rep {}", result.model.id, result.replicate);
        if result.algorithm == Algorithm::DeviationGa {
            name.push_str(" (deviation GA)");
        }
        let gens = read_generations(dir)?;
        let x: Vec<f64> = gens.iter().map(|g| g.generation as f64).collect();
        dev_series.push(Series {
            name: name.clone(),
            x: x.clone(),
            y: gens.iter().map(|g| g.mean_deviation).collect(),
        });
        mae_series.push(Series {
            name: name.clone(),
            x,
            y: gens.iter().map(|g| g.mean_mae).collect(),
        });
        let finals = read_final_population(dir)?;
        dev_boxes.push(BoxGroup {
            label: name.clone(),
            values: finals.iter().map(|r| r.deviation).collect(),
        });
        mae_boxes.push(BoxGroup {
            label: name,
            values: finals.iter().map(|r| r.mae).collect(),
        });
    }
    let lines = line_chart(
        &[
            Panel {
                title: "Average deviation per generation".into(),
                y_label: "mean deviation".into(),
                items: dev_series,
            },
            Panel {
                title: "Average MAE per generation".into(),
                y_label: "mean MAE".into(),
                items: mae_series,
            },
        ],
        "generation",
    );
    let boxes = box_plot(&[
        Panel {
            title: "Final-generation deviation".into(),
            y_label: "deviation".into(),
            items: dev_boxes,
        },
        Panel {
            title: "Final-generation MAE".into(),
            y_label: "MAE".into(),
            items: mae_boxes,
        },
    ]);
    std::fs::create_dir_all(output).map_err(|source| PlotError::Io {
        path: output.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for (file, svg) in [(TRAJECTORY_FILE, lines), (BOXPLOT_FILE, boxes)] {
        let path = output.join(file);
        std::fs::write(&path, svg).map_err(|source| PlotError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_stats_of_small_sample() {
        let b = BoxStats::of(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (2.0, 3.0, 4.0));
        assert_eq!(b.whisker_low, 1.0);
        assert_eq!(b.whisker_high, 4.0);
        assert!(BoxStats::of(&[]).is_none());
        let one = BoxStats::of(&[7.0]).unwrap();
        assert_eq!((one.q1, one.q3, one.whisker_high), (7.0, 7.0, 7.0));
    }

    #[test]
    fn line_chart_is_well_formed_and_exact() {
        let y = vec![0.1, 1.0 / 3.0, 25.0, -4.0];
        let svg = line_chart(
            &[Panel {
                title: "a <b> & c".into(),
                y_label: "v".into(),
                items: vec![Series {
                    name: "s\"1".into(),
                    x: vec![0.0, 1.0, 2.0, 3.0],
                    y: y.clone(),
                }],
            }],
            "generation",
        );
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let line = doc
            .descendants()
            .find(|n| n.attribute("class") == Some("series"))
            .unwrap();
        assert_eq!(line.attribute("data-series"), Some("s\"1"));
        assert_eq!(parse_values(line.attribute("data-values").unwrap()).unwrap(), y);
        // drawn y coordinates order like the data (svg y grows downward)
        let pts: Vec<f64> = line
            .attribute("points")
            .unwrap()
            .split_whitespace()
            .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(pts[2] < pts[1] && pts[1] < pts[0] && pts[0] < pts[3]);
    }

    #[test]
    fn box_plot_is_well_formed() {
        let svg = box_plot(&[Panel {
            title: "t".into(),
            y_label: "v".into(),
            items: vec![
                BoxGroup {
                    label: "a".into(),
                    values: vec![1.0, 2.0, 3.0],
                },
                BoxGroup {
                    label: "b".into(),
                    values: vec![5.0; 4],
                },
            ],
        }]);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let boxes: Vec<_> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("box"))
            .collect();
        assert_eq!(boxes.len(), 2);
        assert_eq!(parse_values(boxes[1].attribute("data-values").unwrap()).unwrap(), vec![5.0; 4]);
    }
}
