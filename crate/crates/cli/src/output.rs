//! Files written into the output directory.
//!
//! | file | header |
//! |------|--------|
//! | `run.csv` | `step,time,error,wall_s` |
//! | `convergence.csv` | `steps,n,tau,h,error,precompute_s,total_s,gmres_mean,pcg_mean,nonconverged` |
//! | `bench.csv` | `n,dofs,label_a,label_b,precompute_a_s,total_a_s,precompute_b_s,total_b_s,speedup,gmres_mean,pcg_mean,threads` |
//! | `snapshot_KK.bin` | binary tensor record |
//! | `snapshot_KK_abs.csv` | `x1,…,xd,abs_u` |
//!
//! Empty cells mean "not available". Every command also writes
//! `config.toml` (the effective configuration) and a JSON summary.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use fcgle_core::baseline::IterationStats;
use fcgle_core::integrators::StepRecord;
use fcgle_core::tensor::{write_abs_csv, write_binary};
use fcgle_core::CTensor;
use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
struct RunRow {
    step: usize,
    time: f64,
    error: Option<f64>,
    wall_s: f64,
}

#[derive(Serialize)]
pub struct ConvergenceRow {
    pub steps: usize,
    pub n: usize,
    pub tau: f64,
    pub h: f64,
    pub error: f64,
    pub precompute_s: f64,
    pub total_s: f64,
    pub gmres_mean: Option<f64>,
    pub pcg_mean: Option<f64>,
    pub nonconverged: usize,
}

#[derive(Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub dofs: usize,
    pub label_a: String,
    pub label_b: String,
    pub precompute_a_s: f64,
    pub total_a_s: f64,
    pub precompute_b_s: f64,
    pub total_b_s: f64,
    pub speedup: f64,
    pub gmres_mean: Option<f64>,
    pub pcg_mean: Option<f64>,
    pub threads: usize,
}

/// Mean outer (GMRES or Lanczos) and inner (PCG) iteration counts.
pub fn means(stats: Option<&IterationStats>) -> (Option<f64>, Option<f64>) {
    let Some(s) = stats else { return (None, None) };
    let mean = |c: usize, m: f64| (c > 0).then_some(m);
    if s.inner.count > 0 {
        (None, mean(s.inner.count, s.inner.mean()))
    } else {
        (mean(s.outer.count, s.outer.mean()), None)
    }
}

pub fn write_rows<R: Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_run_csv(path: &Path, records: &[StepRecord]) -> Result<(), CliError> {
    let rows: Vec<RunRow> = records
        .iter()
        .map(|r| RunRow {
            step: r.step,
            time: r.time,
            error: r.error,
            wall_s: r.wall.as_secs_f64(),
        })
        .collect();
    write_rows(path, &rows)
}

/// Writes `snapshot_KK.bin` and `snapshot_KK_abs.csv`; returns the binary's file name.
pub fn write_snapshot(dir: &Path, k: usize, state: &CTensor<f64>, coords: &[Vec<f64>]) -> Result<String, CliError> {
    let name = format!("snapshot_{k:02}.bin");
    write_binary(state, BufWriter::new(File::create(dir.join(&name))?))?;
    let csv = dir.join(format!("snapshot_{k:02}_abs.csv"));
    write_abs_csv(state, coords, BufWriter::new(File::create(csv)?))?;
    Ok(name)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
