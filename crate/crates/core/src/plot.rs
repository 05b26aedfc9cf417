//! Deterministic SVG rendering of report histograms and scatters.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::report::{ComparisonReport, ContextReport};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// One rendered figure: a file stem and its SVG text.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub name: String,
    pub svg: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{MARGIN} {MARGIN} V{y} H{x}" stroke="black" fill="none"/>"#,
        y = HEIGHT - MARGIN,
        x = WIDTH - MARGIN
    );
    s
}

/// Placeholder figure for a report with nothing to draw.
pub fn placeholder(title: &str) -> String {
    let mut s = header(title);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" fill="gray">no data</text>"#,
        WIDTH / 2.0,
        HEIGHT / 2.0
    );
    s.push_str("</svg>\n");
    s
}

/// Orders bins numerically when they parse, otherwise lexically;
/// `off:N` bins sort by N after plain classes of the same value.
fn bin_key(bin: &str) -> (Option<f64>, &str) {
    let numeric = bin.strip_prefix("off:").unwrap_or(bin);
    (numeric.parse::<f64>().ok(), bin)
}

fn compare_bins(a: &str, b: &str) -> Ordering {
    match (bin_key(a), bin_key(b)) {
        ((Some(x), sa), (Some(y), sb)) => x.total_cmp(&y).then(sa.cmp(sb)),
        ((Some(_), _), (None, _)) => Ordering::Less,
        ((None, _), (Some(_), _)) => Ordering::Greater,
        ((None, sa), (None, sb)) => sa.cmp(sb),
    }
}

/// Vertical bar chart of labelled values.
pub fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    if bars.is_empty() {
        return placeholder(title);
    }
    let mut s = header(title);
    let max = bars
        .iter()
        .map(|b| b.1)
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let slot = plot_w / bars.len() as f64;
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        MARGIN + 4.0,
        fmt_num(max)
    );
    for (i, (label, v)) in bars.iter().enumerate() {
        let h = plot_h * v / max;
        let x = MARGIN + slot * i as f64;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4a78b0"/>"##,
            x + slot * 0.1,
            HEIGHT - MARGIN - h,
            slot * 0.8,
            h
        );
        if bars.len() <= 40 || i % (bars.len() / 20 + 1) == 0 {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                x + slot / 2.0,
                HEIGHT - MARGIN + 14.0,
                escape(label)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e12 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

/// Scatter of one or more point series, each with its own colour.
pub fn scatter(title: &str, series: &[(&str, &[[f64; 2]])]) -> String {
    let all: Vec<[f64; 2]> = series
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .filter(|p| p[0].is_finite() && p[1].is_finite())
        .collect();
    if all.is_empty() {
        return placeholder(title);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in &all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let sx = (WIDTH - 2.0 * MARGIN) / (x1 - x0).max(1e-12);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y1 - y0).max(1e-12);
    let mut s = header(title);
    const COLOURS: [&str; 4] = ["#4a78b0", "#d0702c", "#3a9a4a", "#9a3a8a"];
    for (k, (name, pts)) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
            WIDTH - MARGIN - 100.0,
            MARGIN + 14.0 * k as f64,
            escape(name)
        );
        for p in pts.iter().filter(|p| p[0].is_finite() && p[1].is_finite()) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{colour}" fill-opacity="0.6"/>"#,
                MARGIN + (p[0] - x0) * sx,
                HEIGHT - MARGIN - (p[1] - y0) * sy
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">PC1 [{}, {}]</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        fmt_num(x0),
        fmt_num(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">PC2 [{}, {}]</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        fmt_num(y0),
        fmt_num(y1)
    );
    s.push_str("</svg>\n");
    s
}

fn histogram_bars(hist: &BTreeMap<String, u64>) -> Vec<(String, f64)> {
    let mut bars: Vec<(String, f64)> = hist.iter().map(|(k, &v)| (k.clone(), v as f64)).collect();
    bars.sort_by(|a, b| compare_bins(&a.0, &b.0));
    bars
}

fn safe_name(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Figures for an analysis report.
pub fn context_figures(report: &ContextReport) -> Vec<Figure> {
    let model = report.model_id.as_str();
    if report.images.is_empty() {
        return vec![Figure {
            name: format!("{model}_empty"),
            svg: placeholder(&format!("{model}: no analyzed images")),
        }];
    }
    let mut figs = Vec::new();
    let rates: Vec<(String, f64)> = report
        .aggregates
        .iter()
        .filter_map(|(k, &v)| k.strip_prefix("pass_rate.").map(|c| (c.to_string(), v)))
        .collect();
    figs.push(Figure {
        name: format!("{model}_pass_rates"),
        svg: bar_chart(&format!("{model}: pass rate per check"), &rates),
    });
    for (name, hist) in &report.histograms {
        figs.push(Figure {
            name: format!("{model}_hist_{}", safe_name(name)),
            svg: bar_chart(&format!("{model}: {name}"), &histogram_bars(hist)),
        });
    }
    for (name, pts) in &report.points {
        figs.push(Figure {
            name: format!("{model}_scatter_{}", safe_name(name)),
            svg: scatter(&format!("{model}: {name}"), &[(name.as_str(), pts)]),
        });
    }
    figs
}

/// Figures for a comparison report.
pub fn comparison_figures(report: &ComparisonReport) -> Vec<Figure> {
    let c = &report.comparison;
    let mut bars: Vec<(String, f64)> = c
        .families
        .iter()
        .filter_map(|f| f.ks.map(|k| (f.family.clone(), k)))
        .collect();
    if let Some(k) = c.overall_ks {
        bars.push(("overall".into(), k));
    }
    let mut figs = vec![Figure {
        name: "compare_ks".into(),
        svg: bar_chart("KS statistic per feature family", &bars),
    }];
    if let Some(m) = &c.classes {
        let prev = |map: &BTreeMap<u32, f64>| {
            map.iter()
                .map(|(k, &v)| (k.to_string(), v))
                .collect::<Vec<_>>()
        };
        figs.push(Figure {
            name: "compare_prevalence".into(),
            svg: bar_chart("generated class prevalence", &prev(&m.prevalence)),
        });
        figs.push(Figure {
            name: "compare_coverage".into(),
            svg: bar_chart("coverage per class", &prev(&m.coverage)),
        });
        figs.push(Figure {
            name: "compare_density".into(),
            svg: bar_chart("density per class", &prev(&m.density)),
        });
        figs.push(Figure {
            name: "compare_pc_scatter".into(),
            svg: scatter(
                "train vs generated, top two components",
                &[
                    ("train", &m.train_projection),
                    ("generated", &m.gen_projection),
                ],
            ),
        });
    }
    figs
}

/// Parses either report kind and renders its figures.
pub fn figures_from_json(text: &str) -> Result<Vec<Figure>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Format {
        what: "report",
        message: e.to_string(),
    })?;
    if value.get("comparison").is_some() {
        Ok(comparison_figures(&ComparisonReport::from_json(text)?))
    } else {
        Ok(context_figures(&ContextReport::from_json(text)?))
    }
}

/// Writes each figure as `<name>.svg` in `dir`; returns the paths written.
pub fn write_figures(figures: &[Figure], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    figures
        .iter()
        .map(|f| {
            let path = dir.join(format!("{}.svg", f.name));
            fs::write(&path, &f.svg).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
