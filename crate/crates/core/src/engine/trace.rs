use std::io::Write;

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::error::Result;
use crate::model::point::Point;

/// One record per iteration. Row `k` describes the iterate `x_k`; `i_k` and
/// `alpha_k` are the index and stepsize used to leave it, so the final row
/// has neither.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub i_k: Option<usize>,
    pub alpha_k: Option<f64>,
    #[serde(rename = "F")]
    pub value: Option<f64>,
    pub dist_opt: Option<f64>,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIters,
    MaxCycles,
    Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub method: String,
    pub m: usize,
    pub dim: usize,
    pub config: RunConfig,
}

/// Iterate and objective at the start of a cycle, kept by instrumented runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSnapshot {
    pub k: usize,
    pub x: Point,
    pub value: f64,
    pub alpha: f64,
}

/// Norms seen by the oracles during a run: subgradients of `h_i`,
/// prox-recovered subgradients `(in - out) / alpha` of `f_i`, and, on
/// instrumented runs, every component's subgradients at cycle starts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleLog {
    norms: Vec<f64>,
}

impl OracleLog {
    pub fn record(&mut self, norm: f64) {
        self.norms.push(norm);
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }
}

impl FromIterator<f64> for OracleLog {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        OracleLog {
            norms: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub metadata: TraceMetadata,
    pub rows: Vec<TraceRow>,
    pub best_value: f64,
    pub best_k: usize,
    pub best_point: Point,
    pub final_point: Point,
    pub iterations: usize,
    pub stop_reason: Option<StopReason>,
    #[serde(skip)]
    pub oracle_log: OracleLog,
    #[serde(skip)]
    pub cycles: Vec<CycleSnapshot>,
    /// `|x_{k+1} - x_k| / alpha_k` for every step of an instrumented run.
    #[serde(skip)]
    pub step_ratios: Vec<f64>,
}

impl Trace {
    /// Objective at the last evaluated row.
    pub fn final_value(&self) -> Option<f64> {
        self.rows.iter().rev().find_map(|r| r.value)
    }

    /// Index stream of the run.
    pub fn indices(&self) -> Vec<usize> {
        self.rows.iter().filter_map(|r| r.i_k).collect()
    }

    pub const CSV_HEADER: [&'static str; 6] = ["k", "i_k", "alpha_k", "F", "dist_opt", "wall_ms"];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.i_k.map(|i| i.to_string()).unwrap_or_default(),
                cell(r.alpha_k),
                cell(r.value),
                cell(r.dist_opt),
                cell(r.wall_ms),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
