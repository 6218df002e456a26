//! Constant-step time marching and the run driver.
//!
//! Every scheme is available with the spectral engine (filters applied in
//! the eigenbasis of `K`) and with the iterative vector engine of
//! [`crate::baseline`].

mod convergence;
mod spectral;

pub use convergence::{convergence_study, fit_order, ConvergenceResult, ErrorMode, OrderFit};
pub use spectral::{Krogstad, Lbdf2, Strang};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::baseline::{self, IterationStats, SolverConfig};
use crate::error::{Error, Result};
use crate::problem::{discrete_l2_error, GridProblem};
use crate::scalar::Real;
use crate::tensor::CTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Lbdf2,
    Strang,
    Krogstad,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Lbdf2 => "lbdf2",
            Scheme::Strang => "strang",
            Scheme::Krogstad => "krogstad",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Matrix/tensor-oriented: spectral filters and Tucker operators.
    Spectral,
    /// Vector-oriented: preconditioned Krylov solvers on the assembled structure.
    IterativeBaseline,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Single,
    #[default]
    Double,
}

/// Short label such as `lbdf2-m`, `strang-t` or `krogstad-v`.
pub fn label(scheme: Scheme, engine: Engine, d: usize) -> String {
    let suffix = match (engine, d) {
        (Engine::IterativeBaseline, _) => "v",
        (Engine::Spectral, 2) => "m",
        (Engine::Spectral, _) => "t",
    };
    format!("{}-{suffix}", scheme.name())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub engine: Engine,
    pub steps: usize,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Record the error against the exact solution after every step.
    #[serde(default = "default_true")]
    pub track_error: bool,
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn new(scheme: Scheme, engine: Engine, steps: usize) -> Self {
        Self {
            scheme,
            engine,
            steps,
            snapshot_times: Vec::new(),
            precision: Precision::Double,
            solver: SolverConfig::default(),
            track_error: true,
        }
    }

    pub fn tau(&self, t_final: f64) -> f64 {
        t_final / self.steps as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timing {
    pub precompute: Duration,
    pub stepping: Duration,
    pub total: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub error: Option<f64>,
    pub wall: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub requested: f64,
    pub step: usize,
    pub time: f64,
    pub state: CTensor<f64>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub label: String,
    pub steps: usize,
    pub tau: f64,
    pub final_state: CTensor<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Discrete L² error at the final time, when an exact solution is known.
    pub final_error: Option<f64>,
    pub records: Vec<StepRecord>,
    pub timing: Timing,
    pub iterations: Option<IterationStats>,
}

/// One step `U_n ↦ U_{n+1}` of a constant-step scheme.
pub trait Stepper<T: Real> {
    /// Advances from `t = n τ`; `n` is the 0-based index of the current step.
    fn step(&mut self, n: usize, t: f64, u: &CTensor<T>) -> Result<CTensor<T>>;

    fn iteration_stats(&self) -> Option<IterationStats> {
        None
    }
}

/// Runs the precompute phase `build`, then the step loop, with snapshots
/// taken at the step nearest to each requested time.
pub fn time_loop<T, S, F>(problem: &GridProblem, config: &RunConfig, build: F) -> Result<RunResult>
where
    T: Real,
    S: Stepper<T>,
    F: FnOnce() -> Result<S>,
{
    if config.steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    let start = Instant::now();
    let mut stepper = build()?;
    let precompute = start.elapsed();

    let t_final = problem.params.t_final;
    let tau = config.tau(t_final);
    let h = problem.grid.h().to_vec();
    let snap_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&t| ((t / tau).round().max(0.0) as usize).min(config.steps))
        .collect();
    let mut snapshots = Vec::new();
    let take = |k: usize, u: &CTensor<T>, out: &mut Vec<Snapshot>| {
        for (i, &s) in snap_steps.iter().enumerate() {
            if s == k {
                out.push(Snapshot {
                    requested: config.snapshot_times[i],
                    step: k,
                    time: k as f64 * tau,
                    state: u.cast(),
                });
            }
        }
    };

    let mut u: CTensor<T> = problem.u0.cast();
    take(0, &u, &mut snapshots);
    let mut records = Vec::with_capacity(config.steps);
    let loop_start = Instant::now();
    for n in 0..config.steps {
        let t0 = Instant::now();
        let next = stepper.step(n, n as f64 * tau, &u)?;
        let wall = t0.elapsed();
        if !next.is_finite() {
            return Err(Error::BlowUp { step: n + 1 });
        }
        u = next;
        let time = (n + 1) as f64 * tau;
        let error = if config.track_error {
            problem
                .exact_at(time)
                .map(|e| discrete_l2_error(&u, &e, &h))
                .transpose()?
        } else {
            None
        };
        records.push(StepRecord {
            step: n + 1,
            time,
            error,
            wall,
        });
        take(n + 1, &u, &mut snapshots);
    }
    let stepping = loop_start.elapsed();
    snapshots.sort_by_key(|s| s.step);

    let final_state: CTensor<f64> = u.cast();
    let final_error = problem
        .exact_at(t_final)
        .map(|e| discrete_l2_error(&final_state, &e, &h))
        .transpose()?;
    Ok(RunResult {
        label: label(config.scheme, config.engine, problem.dims().len()),
        steps: config.steps,
        tau,
        final_state,
        snapshots,
        final_error,
        records,
        timing: Timing {
            precompute,
            stepping,
            total: start.elapsed(),
        },
        iterations: stepper.iteration_stats(),
    })
}

fn run_spectral<T: Real>(problem: &GridProblem, config: &RunConfig) -> Result<RunResult> {
    let tau = config.tau(problem.params.t_final);
    match config.scheme {
        Scheme::Lbdf2 => time_loop(problem, config, || Lbdf2::<T>::new(problem, tau)),
        Scheme::Strang => time_loop(problem, config, || Strang::<T>::new(problem, tau)),
        Scheme::Krogstad => time_loop(problem, config, || Krogstad::<T>::new(problem, tau)),
    }
}

/// Runs `problem` with the scheme, engine and precision in `config`.
pub fn run(problem: &GridProblem, config: &RunConfig) -> Result<RunResult> {
    match (config.engine, config.precision) {
        (Engine::Spectral, Precision::Double) => run_spectral::<f64>(problem, config),
        (Engine::Spectral, Precision::Single) => run_spectral::<f32>(problem, config),
        (Engine::IterativeBaseline, Precision::Double) => baseline::run_vector(problem, config),
        (Engine::IterativeBaseline, Precision::Single) => Err(Error::Unsupported(
            "the iterative baseline engine runs in double precision only".into(),
        )),
    }
}
