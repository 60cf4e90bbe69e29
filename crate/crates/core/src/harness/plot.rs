//! Minimal standalone SVG line charts for sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{HarnessError, SweepRow};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// One named line.
#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Data range extended by a 5% margin on both sides; degenerate ranges get a
/// unit margin so the mapping stays finite.
pub fn axis_range(min: f64, max: f64) -> (f64, f64) {
    let span = max - min;
    if span <= 0.0 {
        return (min - 1.0, max + 1.0);
    }
    (min - 0.05 * span, max + 0.05 * span)
}

/// Renders a standalone SVG line chart with one polyline per series and a
/// legend.
pub fn render_line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[PlotSeries],
) -> Result<String, HarnessError> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(HarnessError::EmptyPlot);
    }
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (x_min, x_max) = {
        let min = xs.clone().fold(f64::INFINITY, f64::min);
        let max = xs.fold(f64::NEG_INFINITY, f64::max);
        axis_range(min, max)
    };
    let (y_min, y_max) = {
        let min = ys.clone().fold(f64::INFINITY, f64::min);
        let max = ys.fold(f64::NEG_INFINITY, f64::max);
        axis_range(min, max)
    };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let map_x = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let map_y = |y: f64| MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>"#,
        MARGIN_LEFT + plot_w / 2.0
    );
    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">{y_label}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    // Min/max tick labels.
    for (value, x) in [(x_min, x0), (x_max, MARGIN_LEFT + plot_w)] {
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{value:.0}</text>"#,
            y0 + 16.0
        );
    }
    for (value, y) in [(y_min, y0), (y_max, MARGIN_TOP)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" text-anchor="end" font-family="sans-serif" font-size="10">{value:.1}</text>"#,
            x0 - 6.0
        );
    }
    // Series.
    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut points = String::new();
        for &(x, y) in &s.points {
            let _ = write!(points, "{:.2},{:.2} ", map_x(x), map_y(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.trim_end()
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                map_x(x),
                map_y(y)
            );
        }
        // Legend entry.
        let ly = MARGIN_TOP + 18.0 * idx as f64;
        let lx = WIDTH - MARGIN_RIGHT + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn series_from_rows(
    rows: &[SweepRow],
    value: impl Fn(&SweepRow) -> Option<f64>,
) -> Vec<PlotSeries> {
    let mut series: Vec<PlotSeries> = Vec::new();
    for row in rows {
        let Some(y) = value(row) else { continue };
        let name = format!("{} ({})", row.policy, row.experiment);
        let x = row.rounds as f64;
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push((x, y)),
            None => series.push(PlotSeries {
                name,
                points: vec![(x, y)],
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    series
}

/// Writes `regret_vs_rounds.svg` and `switches_vs_rounds.svg` from sweep
/// rows; error rows are skipped.
pub fn emit_plots(rows: &[SweepRow], out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let regret = series_from_rows(rows, |r| r.mean_regret);
    let switches = series_from_rows(rows, |r| r.mean_switches);
    if regret.is_empty() && switches.is_empty() {
        return Err(HarnessError::EmptyPlot);
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (name, title, y_label, series) in [
        (
            "regret_vs_rounds.svg",
            "Mean regret vs horizon",
            "mean regret",
            regret,
        ),
        (
            "switches_vs_rounds.svg",
            "Mean switches vs horizon",
            "mean switches",
            switches,
        ),
    ] {
        if series.is_empty() {
            continue;
        }
        let svg = render_line_chart(title, "rounds T", y_label, &series)?;
        let path = out_dir.join(name);
        fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

/// Reads back a sweep results CSV (the inverse of `write_sweep_csv`).
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, HarnessError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| HarnessError::CsvFormat(e.to_string()))?
        .clone();
    let expected: Vec<&str> = super::sweep::SWEEP_HEADER.to_vec();
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(HarnessError::CsvFormat(format!(
            "unexpected sweep csv header {got:?}"
        )));
    }
    let parse_opt = |s: &str| -> Option<f64> {
        if s.is_empty() {
            None
        } else {
            s.parse().ok()
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| HarnessError::CsvFormat(e.to_string()))?;
        if record.len() != expected.len() {
            return Err(HarnessError::CsvFormat(format!(
                "expected {} fields, got {}",
                expected.len(),
                record.len()
            )));
        }
        rows.push(SweepRow {
            experiment: record[0].to_string(),
            policy: record[1].to_string(),
            graphs: record[2].to_string(),
            adversary: record[3].to_string(),
            switching_cost: record[4]
                .parse()
                .map_err(|_| HarnessError::CsvFormat(format!("bad c {:?}", &record[4])))?,
            rounds: record[5]
                .parse()
                .map_err(|_| HarnessError::CsvFormat(format!("bad T {:?}", &record[5])))?,
            n_seeds: record[6]
                .parse()
                .map_err(|_| HarnessError::CsvFormat(format!("bad seeds {:?}", &record[6])))?,
            status: record[7].to_string(),
            mean_regret: parse_opt(&record[8]),
            se_regret: parse_opt(&record[9]),
            mean_switches: parse_opt(&record[10]),
            se_switches: parse_opt(&record[11]),
            wall_ms: 0.0,
        });
    }
    Ok(rows)
}
