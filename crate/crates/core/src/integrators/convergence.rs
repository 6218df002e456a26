use std::time::Duration;

use super::{run, Engine, Precision, RunConfig, Scheme};
use crate::baseline::IterationStats;
use crate::error::{Error, Result};
use crate::problem::{discrete_l2_error, GridProblem};
use crate::tensor::CTensor;

/// How errors of a step-refinement study are measured.
#[derive(Clone, Debug)]
pub enum ErrorMode {
    /// Against the problem's exact solution at the final time.
    Exact,
    /// Against a Krogstad run on the same grid with `factor` times the
    /// finest step count.
    SelfReference { factor: usize },
    /// Against a caller-supplied final state.
    Reference(CTensor<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderFit {
    pub order: f64,
    /// Set when the errors carry no slope information (all equal, zero or
    /// non-finite); `order` is then reported as 0.
    pub degenerate: bool,
}

/// Least-squares slope of `log(error)` against `log(tau)`.
pub fn fit_order(taus: &[f64], errors: &[f64]) -> OrderFit {
    let degenerate = OrderFit {
        order: 0.0,
        degenerate: true,
    };
    if taus.len() != errors.len() || taus.len() < 2 {
        return degenerate;
    }
    if errors.iter().chain(taus).any(|&e| !(e > 0.0 && e.is_finite())) {
        return degenerate;
    }
    let (emin, emax) = errors
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if emax - emin <= 1e-12 * emax {
        return degenerate;
    }
    let lx: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return degenerate;
    }
    OrderFit {
        order: sxy / sxx,
        degenerate: false,
    }
}

#[derive(Clone, Debug)]
pub struct ConvergencePoint {
    pub steps: usize,
    pub tau: f64,
    pub error: f64,
    pub precompute: Duration,
    pub total: Duration,
    pub iterations: Option<IterationStats>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceResult {
    pub points: Vec<ConvergencePoint>,
    pub fit: OrderFit,
}

impl ConvergenceResult {
    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }
}

/// Runs `base` once per entry of `steps` and fits the observed order.
pub fn convergence_study(
    problem: &GridProblem,
    base: &RunConfig,
    steps: &[usize],
    mode: ErrorMode,
) -> Result<ConvergenceResult> {
    if steps.len() < 3 {
        return Err(Error::Config(format!(
            "a convergence study needs at least 3 step counts, got {}",
            steps.len()
        )));
    }
    let h = problem.grid.h().to_vec();
    let reference = match mode {
        ErrorMode::Exact => {
            let exact = problem.exact_at(problem.params.t_final).ok_or_else(|| {
                Error::Config("exact-solution error mode needs a problem with a known solution".into())
            })?;
            Some(exact)
        }
        ErrorMode::Reference(r) => Some(r),
        ErrorMode::SelfReference { factor } => {
            let finest = *steps.iter().max().expect("nonempty");
            let mut cfg = RunConfig::new(Scheme::Krogstad, Engine::Spectral, finest * factor.max(1));
            cfg.precision = Precision::Double;
            cfg.track_error = false;
            Some(run(problem, &cfg)?.final_state)
        }
    };
    let reference = reference.expect("reference state");
    let mut points = Vec::with_capacity(steps.len());
    for &s in steps {
        let mut cfg = base.clone();
        cfg.steps = s;
        cfg.snapshot_times.clear();
        cfg.track_error = false;
        let r = run(problem, &cfg)?;
        points.push(ConvergencePoint {
            steps: s,
            tau: r.tau,
            error: discrete_l2_error(&r.final_state, &reference, &h)?,
            precompute: r.timing.precompute,
            total: r.timing.total,
            iterations: r.iterations,
        });
    }
    let taus: Vec<f64> = points.iter().map(|p| p.tau).collect();
    let errors: Vec<f64> = points.iter().map(|p| p.error).collect();
    Ok(ConvergenceResult {
        fit: fit_order(&taus, &errors),
        points,
    })
}
