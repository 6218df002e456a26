use std::path::{Path, PathBuf};

use fcgle_core::fracfd::{riesz_coeffs_order2, riesz_coeffs_order4};
use fcgle_core::integrators::{convergence_study, fit_order, label, ErrorMode};
use fcgle_core::{run, FdOrder, FracOperator, RunResult};
use serde_json::json;

use crate::config::{ConfigFile, ErrorModeName};
use crate::output::{self, BenchRow, ConvergenceRow};
use crate::{CliError, RunArgs};

/// What `main` needs to pick the exit code of a successful command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub nonconverged: usize,
}

/// Configuration with command-line overrides applied.
pub struct Resolved {
    pub cfg: ConfigFile,
    pub warmup: bool,
}

impl Resolved {
    pub fn new(args: &RunArgs) -> Result<Self, CliError> {
        let mut cfg = ConfigFile::load(&args.config)?;
        if let Some(out) = &args.out {
            cfg.output.dir = out.clone();
        }
        if let Some(p) = args.precision {
            cfg.run.precision = p.into();
        }
        Ok(Self {
            cfg,
            warmup: args.warmup,
        })
    }

    fn out_dir(&self) -> Result<&PathBuf, CliError> {
        let dir = &self.cfg.output.dir;
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config.toml"), self.cfg.to_toml())?;
        Ok(dir)
    }
}

fn secs(d: std::time::Duration) -> f64 {
    d.as_secs_f64()
}

fn nonconverged(r: &RunResult) -> usize {
    r.iterations.map_or(0, |s| s.nonconverged)
}

pub fn solve(res: &Resolved) -> Result<Outcome, CliError> {
    let problem = res.cfg.problem_with(None)?;
    let rc = res.cfg.run_config();
    if res.warmup {
        run(&problem, &rc)?;
    }
    let r = run(&problem, &rc)?;
    let dir = res.out_dir()?;
    output::write_run_csv(&dir.join("run.csv"), &r.records)?;
    let mut snaps = Vec::new();
    for (k, s) in r.snapshots.iter().enumerate() {
        let file = output::write_snapshot(dir, k, &s.state, problem.grid.coords())?;
        snaps.push(json!({"file": file, "requested": s.requested, "step": s.step, "time": s.time}));
    }
    let summary = json!({
        "label": r.label,
        "dims": problem.dims(),
        "steps": r.steps,
        "tau": r.tau,
        "precision": rc.precision,
        "threads": rayon::current_num_threads(),
        "final_error": r.final_error,
        "timing": {
            "precompute_s": secs(r.timing.precompute),
            "stepping_s": secs(r.timing.stepping),
            "total_s": secs(r.timing.total),
            "mean_step_s": secs(r.timing.stepping) / r.steps as f64,
        },
        "iterations": r.iterations,
        "snapshots": snaps,
    });
    output::write_json(&dir.join("summary.json"), &summary)?;
    let err = r.final_error.map_or("n/a".into(), |e| format!("{e:.4e}"));
    println!(
        "{}: {} steps, error {err}, precompute {:.3}s, total {:.3}s",
        r.label,
        r.steps,
        secs(r.timing.precompute),
        secs(r.timing.total)
    );
    Ok(Outcome {
        nonconverged: nonconverged(&r),
    })
}

pub fn convergence(res: &Resolved) -> Result<Outcome, CliError> {
    let cfg = &res.cfg;
    let conv = &cfg.convergence;
    let mut rc = cfg.run_config();
    rc.snapshot_times.clear();
    let mut rows = Vec::new();
    let fit;
    if !conv.n.is_empty() {
        if conv.n.len() < 3 {
            return Err(CliError::Config("convergence.n needs at least 3 grid sizes".into()));
        }
        if !conv.steps.is_empty() {
            return Err(CliError::Config("set either convergence.steps or convergence.n, not both".into()));
        }
        rc.track_error = false;
        for (i, &n) in conv.n.iter().enumerate() {
            let problem = cfg.problem_with(Some(n))?;
            if problem.exact.is_none() {
                return Err(CliError::Config("spatial studies need a problem with an exact solution".into()));
            }
            if res.warmup && i == 0 {
                run(&problem, &rc)?;
            }
            let r = run(&problem, &rc)?;
            let (gm, pm) = output::means(r.iterations.as_ref());
            rows.push(ConvergenceRow {
                steps: r.steps,
                n,
                tau: r.tau,
                h: problem.grid.h()[0],
                error: r.final_error.expect("exact solution present"),
                precompute_s: secs(r.timing.precompute),
                total_s: secs(r.timing.total),
                gmres_mean: gm,
                pcg_mean: pm,
                nonconverged: nonconverged(&r),
            });
        }
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let errs: Vec<f64> = rows.iter().map(|r| r.error).collect();
        fit = fit_order(&hs, &errs);
    } else {
        let problem = cfg.problem_with(None)?;
        let mode = match conv.error_mode {
            ErrorModeName::Exact => ErrorMode::Exact,
            ErrorModeName::SelfReference => ErrorMode::SelfReference {
                factor: conv.reference_factor,
            },
        };
        if res.warmup {
            if let Some(&s) = conv.steps.first() {
                let mut w = rc.clone();
                w.steps = s;
                run(&problem, &w)?;
            }
        }
        let study = convergence_study(&problem, &rc, &conv.steps, mode)?;
        let (n, h) = (problem.dims()[0], problem.grid.h()[0]);
        for p in &study.points {
            let (gm, pm) = output::means(p.iterations.as_ref());
            rows.push(ConvergenceRow {
                steps: p.steps,
                n,
                tau: p.tau,
                h,
                error: p.error,
                precompute_s: secs(p.precompute),
                total_s: secs(p.total),
                gmres_mean: gm,
                pcg_mean: pm,
                nonconverged: p.iterations.map_or(0, |s| s.nonconverged),
            });
        }
        fit = study.fit;
    }
    let dir = res.out_dir()?;
    output::write_rows(&dir.join("convergence.csv"), &rows)?;
    let lab = label(rc.scheme, rc.engine, cfg.problem.d);
    output::write_json(
        &dir.join("convergence.json"),
        &json!({
            "label": lab,
            "variable": if conv.n.is_empty() { "tau" } else { "h" },
            "order": fit.order,
            "degenerate": fit.degenerate,
            "threads": rayon::current_num_threads(),
        }),
    )?;
    for r in &rows {
        println!("{lab} steps={:<5} n={:<5} error={:.4e}  total={:.3}s", r.steps, r.n, r.error, r.total_s);
    }
    if fit.degenerate {
        println!("fitted order 0 (degenerate: errors carry no slope)");
    } else {
        println!("fitted order {:.3}", fit.order);
    }
    Ok(Outcome {
        nonconverged: rows.iter().map(|r| r.nonconverged).sum(),
    })
}

pub fn bench(res: &Resolved) -> Result<Outcome, CliError> {
    let cfg = &res.cfg;
    let sizes: Vec<Option<usize>> = if cfg.bench.n.is_empty() {
        vec![None]
    } else {
        cfg.bench.n.iter().map(|&n| Some(n)).collect()
    };
    let threads = rayon::current_num_threads();
    let mut rows = Vec::new();
    let mut stuck = 0;
    for n in sizes {
        let problem = cfg.problem_with(n)?;
        let mut results = Vec::with_capacity(2);
        for engine in cfg.bench.engines {
            let mut rc = cfg.run_config();
            rc.engine = engine;
            rc.snapshot_times.clear();
            rc.track_error = false;
            if res.warmup {
                run(&problem, &rc)?;
            }
            results.push(run(&problem, &rc)?);
        }
        let (a, b) = (&results[0], &results[1]);
        stuck += nonconverged(a) + nonconverged(b);
        let (gm, pm) = output::means(b.iterations.as_ref().or(a.iterations.as_ref()));
        rows.push(BenchRow {
            n: problem.dims()[0],
            dofs: problem.grid.len(),
            label_a: a.label.clone(),
            label_b: b.label.clone(),
            precompute_a_s: secs(a.timing.precompute),
            total_a_s: secs(a.timing.total),
            precompute_b_s: secs(b.timing.precompute),
            total_b_s: secs(b.timing.total),
            speedup: secs(b.timing.total) / secs(a.timing.total),
            gmres_mean: gm,
            pcg_mean: pm,
            threads,
        });
    }
    let dir = res.out_dir()?;
    output::write_rows(&dir.join("bench.csv"), &rows)?;
    for r in &rows {
        println!(
            "n={:<5} {} {:.3}s  {} {:.3}s  speedup {:.1}x",
            r.n, r.label_a, r.total_a_s, r.label_b, r.total_b_s, r.speedup
        );
    }
    Ok(Outcome { nonconverged: stuck })
}

pub fn coeffs(alpha: f64, fd: FdOrder, n: usize, length: f64, out: Option<&Path>) -> Result<Outcome, CliError> {
    if n == 0 {
        return Err(CliError::Config("--n must be positive".into()));
    }
    let g = match fd {
        FdOrder::Second => riesz_coeffs_order2(alpha, n)?,
        FdOrder::Fourth => riesz_coeffs_order4(alpha, n)?,
    };
    let op = FracOperator::new(alpha, fd, n, length / (n + 1) as f64)?;
    let lambda = op.eigendecompose()?.lambda;
    let mut table = String::from("k,coefficient,eigenvalue\n");
    for k in 0..n {
        table.push_str(&format!("{k},{},{}\n", g[k], lambda[k]));
    }
    print!("{table}");
    let max = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    eprintln!("max eigenvalue {max:e}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("coeffs.csv"), table)?;
    }
    Ok(Outcome::default())
}
