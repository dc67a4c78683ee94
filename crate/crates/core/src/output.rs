//! CSV and JSON artifacts.
//!
//! Floats are written in shortest round-trip form so identical runs produce
//! byte-identical files.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::dimension::{DimensionReport, EmpiricalDimension};
use crate::ifs::IfsSystem;
use crate::measures::BernoulliSpec;
use crate::overlap::{OverlapGrid, OverlapSeries};

pub const SERIES_CSV: &str = "overlap_series.csv";
pub const SUMMARY_JSON: &str = "overlap_summary.json";
pub const REPORT_JSON: &str = "dimension_report.json";
pub const BALLS_CSV: &str = "ball_counts.csv";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep_summary.json";

pub fn tau_label(tau: Option<f64>) -> String {
    match tau {
        Some(t) => t.to_string(),
        None => "inf".to_string(),
    }
}

#[derive(Serialize)]
struct SeriesRow {
    n: usize,
    tau: String,
    mean_log_b: f64,
    stderr: f64,
    samples_ok: usize,
    samples_failed: usize,
}

/// `n,tau,mean_log_b,stderr,samples_ok,samples_failed`, one row per `(τ, n)`.
pub fn write_series_csv<W: Write>(out: W, series: &[OverlapSeries]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in series {
        for k in 0..s.n_values.len() {
            w.serialize(SeriesRow {
                n: s.n_values[k],
                tau: tau_label(s.tau),
                mean_log_b: s.mean_log_b[k],
                stderr: s.stderr[k],
                samples_ok: s.samples_ok[k],
                samples_failed: s.samples_failed[k],
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn system_json(sys: &IfsSystem) -> Value {
    json!({
        "maps": sys.maps().iter().map(|m| json!({"ratio": m.ratio(), "translation": m.translation()})).collect::<Vec<_>>(),
        "ambient": [sys.ambient().lo, sys.ambient().hi],
    })
}

fn series_json(s: &OverlapSeries) -> Value {
    json!({
        "tau": tau_label(s.tau),
        "rate": s.rate_estimate,
        "rate_raw": s.rate_raw,
        "rate_stderr": s.rate_stderr,
        "samples_failed": s.total_failed(),
    })
}

/// Summary of an overlap run: headline rate and overlap number.
pub fn overlap_summary(sys: &IfsSystem, p: &BernoulliSpec, grid: &OverlapGrid, seed: u64) -> Value {
    let h = grid.headline();
    json!({
        "rate_estimate": h.rate_estimate,
        "o_estimate": h.rate_estimate.exp(),
        "rate_method": h.rate_method,
        "seed": seed,
        "rate_raw": h.rate_raw,
        "rate_stderr": h.rate_stderr,
        "tau": tau_label(h.tau),
        "stabilized": grid.stabilized,
        "system": system_json(sys),
        "probabilities": p.probs(),
        "grid": grid.series.iter().map(series_json).collect::<Vec<_>>(),
        "budget_failures": grid.series.iter().flat_map(|s| s.failures.iter().map(move |f| json!({
            "tau": tau_label(s.tau), "n": f.n, "sample": f.sample, "lower": f.lower, "upper": f.upper,
        }))).collect::<Vec<_>>(),
    })
}

pub fn report_json(sys: &IfsSystem, p: &BernoulliSpec, r: &DimensionReport) -> Value {
    let headline = r.overlaps.headline();
    json!({
        "system": system_json(sys),
        "probabilities": p.probs(),
        "seed": r.params.seed,
        "h": r.entropy,
        "chi_s": r.chi_s,
        "overlap": {
            "series_csv_path": SERIES_CSV,
            "rate": headline.rate_estimate,
            "o": r.overlap_number,
            "rate_raw": headline.rate_raw,
            "rate_stderr": headline.rate_stderr,
            "rate_method": headline.rate_method,
            "tau": tau_label(headline.tau),
        },
        "dimension": {
            "formula": r.formula_dimension,
            "formula_clamped": r.formula_dimension_clamped(),
            "empirical": r.empirical.mean_dim,
            "ci": r.empirical.ci,
            "consistent": r.consistent,
        },
        "projection_entropy": r.projection_entropy,
        "feng_hu_residual": r.feng_hu_residual,
        "flags": r.flags,
        "params": {
            "n_min": r.params.series.n_min,
            "n_max": r.params.series.n_max,
            "samples": r.params.series.n_samples,
            "cover_depth": r.params.series.cover_depth,
            "node_budget": r.params.series.node_budget,
            "taus": r.params.taus.iter().map(|t| tau_label(*t)).collect::<Vec<_>>(),
            "points": r.params.empirical.n_points,
            "centers": r.params.empirical.n_centers,
            "r_lo": r.params.empirical.grid.r_lo,
            "r_hi": r.params.empirical.grid.r_hi,
            "r_count": r.params.empirical.grid.count,
        },
    })
}

#[derive(Serialize)]
struct BallRow {
    center_index: usize,
    center: f64,
    r: f64,
    ball_count: u64,
}

/// `center_index,center,r,ball_count` for every center and radius.
pub fn write_ball_counts_csv<W: Write>(out: W, e: &EmpiricalDimension) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, prof) in e.profiles.iter().enumerate() {
        for (r, c) in e.radii.iter().zip(&prof.counts) {
            w.serialize(BallRow {
                center_index: i,
                center: prof.center,
                r: *r,
                ball_count: *c,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of a λ sweep; numeric fields are empty when the row failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub rate: Option<f64>,
    pub o: Option<f64>,
    pub delta_formula: Option<f64>,
    pub delta_empirical: Option<f64>,
    pub ci: Option<f64>,
    pub status: String,
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("json values always serialize");
    bytes.push(b'\n');
    bytes
}
