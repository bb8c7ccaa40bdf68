//! CSV and JSON-lines output, and per-cell aggregates.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::config::Scheme;
use crate::experiment::TrialRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::JsonLines),
            _ => Err(format!("unknown format `{s}` (expected csv or jsonl)")),
        }
    }
}

pub const CSV_COLUMNS: [&str; 11] = [
    "scheme",
    "trial",
    "P_dBm",
    "K",
    "M",
    "N",
    "Np",
    "kappa",
    "sum_rate_bps_hz",
    "iterations",
    "wall_ms",
];

/// Writes raw records. Floats use the shortest representation that parses back to the
/// same value.
pub fn write_records<W: Write>(records: &[TrialRecord], format: Format, out: W) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(CSV_COLUMNS)?;
            for r in records {
                w.write_record([
                    r.scheme.name().to_string(),
                    r.trial.to_string(),
                    r.p_dbm.to_string(),
                    r.ports.to_string(),
                    r.users.to_string(),
                    r.bs_antennas.to_string(),
                    r.connected.to_string(),
                    r.kappa.to_string(),
                    r.sum_rate.to_string(),
                    r.iterations.to_string(),
                    r.wall_ms.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::JsonLines => write_json_lines(records, out)?,
    }
    Ok(())
}

fn write_json_lines<T: Serialize, W: Write>(rows: &[T], out: W) -> anyhow::Result<()> {
    let mut out = BufWriter::new(out);
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn emit_results(records: &[TrialRecord], format: Format, path: &Path) -> anyhow::Result<()> {
    let file = File::create(path).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
    write_records(records, format, BufWriter::new(file))
}

/// Mean and standard error of the sum rate over the successful trials of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub scheme: Scheme,
    #[serde(rename = "P_dBm")]
    pub p_dbm: f64,
    #[serde(rename = "K")]
    pub ports: usize,
    #[serde(rename = "M")]
    pub users: usize,
    #[serde(rename = "N")]
    pub bs_antennas: usize,
    #[serde(rename = "Np")]
    pub connected: usize,
    pub kappa: f64,
    pub trials: usize,
    pub failed: usize,
    pub mean_sum_rate: f64,
    pub stderr_sum_rate: f64,
}

pub const AGGREGATE_COLUMNS: [&str; 11] = [
    "scheme",
    "P_dBm",
    "K",
    "M",
    "N",
    "Np",
    "kappa",
    "trials",
    "failed",
    "mean_sum_rate",
    "stderr_sum_rate",
];

/// Groups records by (scheme, K, M, κ, P) in their existing order.
pub fn aggregate(records: &[TrialRecord]) -> Vec<AggregateRow> {
    let key = |r: &TrialRecord| (r.scheme, r.ports, r.users, r.kappa.to_bits(), r.p_dbm.to_bits());
    let mut groups: Vec<(_, Vec<&TrialRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(k, _)| *k == key(r)) {
            Some((_, g)) => g.push(r),
            None => groups.push((key(r), vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(_, g)| {
            let ok: Vec<f64> = g.iter().map(|r| r.sum_rate).filter(|v| v.is_finite()).collect();
            let n = ok.len();
            let mean = ok.iter().sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                let var = ok.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                f64::NAN
            };
            let first = g[0];
            AggregateRow {
                scheme: first.scheme,
                p_dbm: first.p_dbm,
                ports: first.ports,
                users: first.users,
                bs_antennas: first.bs_antennas,
                connected: first.connected,
                kappa: first.kappa,
                trials: g.len(),
                failed: g.len() - n,
                mean_sum_rate: mean,
                stderr_sum_rate: stderr,
            }
        })
        .collect()
}

pub fn write_aggregate<W: Write>(rows: &[AggregateRow], format: Format, out: W) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(AGGREGATE_COLUMNS)?;
            for r in rows {
                w.write_record([
                    r.scheme.name().to_string(),
                    r.p_dbm.to_string(),
                    r.ports.to_string(),
                    r.users.to_string(),
                    r.bs_antennas.to_string(),
                    r.connected.to_string(),
                    r.kappa.to_string(),
                    r.trials.to_string(),
                    r.failed.to_string(),
                    r.mean_sum_rate.to_string(),
                    r.stderr_sum_rate.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::JsonLines => write_json_lines(rows, out)?,
    }
    Ok(())
}
