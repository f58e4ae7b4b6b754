//! File I/O for the subcommands: CSV readers and writers, run metadata,
//! and the hand-rolled SVG line plot.
//!
//! Every emitted file is deterministic for a given input, and every
//! output `<path>` is accompanied by `<path>.meta.json` recording the
//! seed and input digests needed to reproduce it.

use super::CliError;
use crate::bench::BenchPoint;
use crate::demand::DemandTrace;
use crate::provision::TradeoffSurface;
use crate::stats::IsolationFloor;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reproduction record written next to each output file.
#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_slots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solves_per_point: Option<usize>,
}

impl RunMeta {
    pub fn new(command: &'static str) -> Self {
        RunMeta {
            command,
            seed: None,
            config_sha256: None,
            trace_sha256: None,
            window_slots: None,
            step: None,
            slack: None,
            solves_per_point: None,
        }
    }
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

pub fn write_meta(out: &Path, meta: &RunMeta) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(meta).expect("metadata serializes");
    write_file(&meta_path(out), &format!("{json}\n"))
}

pub fn write_trace_csv(path: &Path, trace: &DemandTrace) -> Result<(), CliError> {
    let n = trace.slice_count();
    let mut out = String::from("t");
    for i in 0..n {
        out.push_str(&format!(",slice_{i}"));
    }
    out.push('\n');
    for (t, row) in trace.rows().enumerate() {
        out.push_str(&t.to_string());
        for &w in row {
            out.push_str(&format!(",{w}"));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Parses a trace CSV produced by [`write_trace_csv`]. The CSV carries no
/// slot duration or seed, so those fields are defaulted; provenance lives
/// in the accompanying metadata file.
pub fn read_trace_csv(path: &Path) -> Result<DemandTrace, CliError> {
    let bytes = read_file(path)?;
    parse_trace_csv(path, &bytes)
}

pub fn parse_trace_csv(path: &Path, bytes: &[u8]) -> Result<DemandTrace, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|_| CliError::TraceParse {
        path: path.to_owned(),
        line: 0,
        message: "file is not valid UTF-8".into(),
    })?;
    let bad = |line: usize, message: String| CliError::TraceParse {
        path: path.to_owned(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| bad(1, "empty file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"t") || columns.len() < 2 {
        return Err(bad(1, format!("expected header `t,slice_0,...`, got `{header}`")));
    }
    let n = columns.len() - 1;

    let mut rows = Vec::new();
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n + 1 {
            return Err(bad(
                index + 1,
                format!("expected {} fields, got {}", n + 1, fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(n);
        for field in &fields[1..] {
            let value: u32 = field
                .trim()
                .parse()
                .map_err(|_| bad(index + 1, format!("`{field}` is not a PRB count")))?;
            row.push(value);
        }
        rows.push(row);
    }
    DemandTrace::new(1.0, 0, rows).map_err(|err| bad(0, err.to_string()))
}

pub fn write_stats_csv(path: &Path, floors: &[IsolationFloor]) -> Result<(), CliError> {
    let mut out = String::from("slice,w_l,p_m\n");
    for (i, floor) in floors.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", floor.w_l, floor.p_m));
    }
    write_file(path, &out)
}

pub fn write_sweep_csv(path: &Path, surface: &TradeoffSurface) -> Result<(), CliError> {
    let n = surface
        .rows
        .first()
        .map(|row| row.p_l.len())
        .unwrap_or_default();
    let mut out = String::new();
    for i in 0..n {
        out.push_str(&format!("pl_{i},"));
    }
    for i in 0..n {
        out.push_str(&format!("wl_{i},"));
    }
    out.push_str("wc,total\n");
    for row in &surface.rows {
        for p_l in &row.p_l {
            out.push_str(&format!("{p_l},"));
        }
        for w_l in &row.plan.w_l {
            out.push_str(&format!("{w_l},"));
        }
        out.push_str(&format!("{},{}\n", row.plan.w_c, row.plan.total));
    }
    write_file(path, &out)
}

/// One oracle CSV row: the stationary slack at a pool size, with marker
/// columns flagging where each baseline landed.
pub struct OracleRow {
    pub w_c: u64,
    pub epsilon_star: f64,
    pub is_static_threshold: bool,
    pub is_offline_wc: bool,
    pub is_mw_wc: bool,
}

pub fn write_oracle_csv(path: &Path, rows: &[OracleRow]) -> Result<(), CliError> {
    let mut out = String::from("w_c,epsilon_star,is_static_threshold,is_offline_wc,is_mw_wc\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.w_c,
            row.epsilon_star,
            u8::from(row.is_static_threshold),
            u8::from(row.is_offline_wc),
            u8::from(row.is_mw_wc),
        ));
    }
    write_file(path, &out)
}

pub fn write_bench_csv(path: &Path, points: &[BenchPoint]) -> Result<(), CliError> {
    let mut out = String::from("n,solves,mean_us,median_of_means_us\n");
    for point in points {
        out.push_str(&format!(
            "{},{},{:.3},{:.3}\n",
            point.n, point.solves, point.mean_us, point.median_of_means_us
        ));
    }
    write_file(path, &out)
}

/// Minimal self-contained SVG line plot: one polyline with point markers,
/// axes with five ticks each, and a title. `points` must be sorted by x.
pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 420.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;

    let (mut x_min, mut x_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    if !x_min.is_finite() || x_min == x_max {
        x_min -= 0.5;
        x_max += 0.5;
    }
    let y_max = points
        .iter()
        .map(|&(_, y)| y)
        .fold(0.0f64, f64::max)
        .max(1.0)
        * 1.08;

    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        WIDTH / 2.0
    ));

    for tick in 0..=4 {
        let frac = f64::from(tick) / 4.0;
        let x_val = x_min + frac * (x_max - x_min);
        let y_val = frac * y_max;
        let x = sx(x_val);
        let y = sy(y_val);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#ccc\"/>\n",
            TOP,
            TOP + plot_h
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ccc\"/>\n",
            LEFT,
            LEFT + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{x_val:.2}</text>\n",
            TOP + plot_h + 16.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{y_val:.1}</text>\n",
            LEFT - 6.0,
            y + 4.0
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 16 {:.1})\">{y_label}</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    ));

    if points.len() > 1 {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
            coords.join(" ")
        ));
    }
    for &(x, y) in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"#1f77b4\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
