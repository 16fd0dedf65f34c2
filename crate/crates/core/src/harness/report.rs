//! CSV and JSON emission with stable column order. Floats are printed with
//! fixed precision so reruns produce byte-identical CSV files; wall times
//! appear only in JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{ExperimentReport, GridReport, Status, SweepReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::invalid("format", format!("expected csv or json, got {s:?}"))),
        }
    }
}

pub const REPORT_COLUMNS: [&str; 6] = ["strategy", "seed", "direction", "epoch", "status", "bleu"];
pub const GRID_COLUMNS: [&str; 6] = ["n_x", "n_y", "seed", "direction", "status", "bleu"];
pub const SWEEP_COLUMNS: [&str; 6] = ["strategy", "epsilon", "seed", "direction", "status", "bleu"];

const DIRECTIONS: [&str; 2] = ["l1_l2", "l2_l1"];

fn status(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Error => "error",
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

fn write(path: &Path, text: String) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn report_csv(report: &ExperimentReport) -> String {
    let mut out = REPORT_COLUMNS.join(",") + "\n";
    let epochs = report.config.selftrain.max_epochs;
    for c in &report.cells {
        for (d, dir) in DIRECTIONS.iter().enumerate() {
            for epoch in 0..=epochs {
                let bleu = c
                    .epochs
                    .iter()
                    .find(|e| e.epoch == epoch)
                    .map(|e| if d == 0 { e.bleu_xy } else { e.bleu_yx });
                let st = if bleu.is_some() { c.status } else { Status::Error };
                let _ = writeln!(
                    out,
                    "{},{},{dir},{epoch},{},{}",
                    c.strategy.label(),
                    c.seed,
                    status(st),
                    cell(bleu)
                );
            }
        }
    }
    out
}

pub fn emit_report(report: &ExperimentReport, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Csv => write(path, report_csv(report)),
        Format::Json => write(path, json(report)?),
    }
}

pub fn grid_csv(report: &GridReport) -> String {
    let mut out = GRID_COLUMNS.join(",") + "\n";
    for c in &report.cells {
        for (dir, v) in DIRECTIONS.iter().zip([c.bleu_xy, c.bleu_yx]) {
            let _ = writeln!(out, "{},{},{},{dir},{},{}", c.n_x, c.n_y, c.seed, status(c.status), cell(v));
        }
    }
    out
}

pub fn emit_grid(report: &GridReport, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Csv => write(path, grid_csv(report)),
        Format::Json => write(path, json(report)?),
    }
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = SWEEP_COLUMNS.join(",") + "\n";
    for c in &report.cells {
        for (dir, v) in DIRECTIONS.iter().zip([c.bleu_xy, c.bleu_yx]) {
            let _ = writeln!(
                out,
                "{},{},{},{dir},{},{}",
                c.strategy.label(),
                c.epsilon.map(|e| format!("{e}")).unwrap_or_default(),
                c.seed,
                status(c.status),
                cell(v)
            );
        }
    }
    out
}

pub fn emit_sweep(report: &SweepReport, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Csv => write(path, sweep_csv(report)),
        Format::Json => write(path, json(report)?),
    }
}
