//! Vector-oriented comparator engines.
//!
//! Linear systems with `I − θK` are solved by left-preconditioned GMRES with
//! an FFT-based BTTB matvec and a DST-diagonalized tau preconditioner.
//! Actions of `φ_ℓ(θK)` use shift-and-invert Lanczos on `(I − ξ⊕_μ D_μ)⁻¹`
//! with PCG inner solves. Everything here runs in double precision.

mod fft;
mod krylov;
mod operators;
mod steppers;

pub use krylov::{pcg_solve, pgmres_solve, si_lanczos_phi, LanczosBasis, SolveInfo};
pub use operators::{tau_eigenvalues, BttbOperator, Identity, LinearOperator, TauPreconditioner};
pub use steppers::{KrogstadV, Lbdf2V, StrangV};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{time_loop, RunConfig, RunResult, Scheme};
use crate::problem::GridProblem;

/// Hyperparameters of the iterative solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative tolerance of GMRES and of the PCG inner solves.
    pub tol: f64,
    /// Iteration cap of GMRES and of the PCG inner solves.
    pub maxit: usize,
    /// Krylov subspace size of shift-and-invert Lanczos.
    pub m: usize,
    /// Shift `ξ` as a multiple of the step size `τ`.
    pub xi: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            maxit: 20,
            m: 10,
            xi: 0.1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.maxit == 0 || self.m == 0 || !(self.xi > 0.0) {
            return Err(Error::Config(format!(
                "solver settings need tol > 0, maxit ≥ 1, m ≥ 1 and xi > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Count, sum and range of a per-solve iteration number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IterSummary {
    pub count: usize,
    pub total: usize,
    pub min: usize,
    pub max: usize,
}

impl IterSummary {
    pub fn record(&mut self, k: usize) {
        self.min = if self.count == 0 { k } else { self.min.min(k) };
        self.max = self.max.max(k);
        self.count += 1;
        self.total += k;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.total as f64 / self.count as f64
        }
    }
}

/// Iteration statistics of a baseline run. `outer` counts GMRES iterations
/// per linear solve, or the Lanczos subspace size per φ-action; `inner`
/// counts PCG iterations per shifted solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IterationStats {
    pub outer: IterSummary,
    pub inner: IterSummary,
    /// Solves that hit the iteration cap before reaching the tolerance.
    pub nonconverged: usize,
}

impl IterationStats {
    pub(crate) fn record_outer(&mut self, info: &SolveInfo) {
        self.outer.record(info.iterations);
        self.nonconverged += usize::from(!info.converged);
    }

    pub(crate) fn record_inner(&mut self, infos: &[SolveInfo]) {
        for info in infos {
            self.inner.record(info.iterations);
            self.nonconverged += usize::from(!info.converged);
        }
    }
}

/// Runs `problem` with the vector-oriented realization of `config.scheme`.
pub fn run_vector(problem: &GridProblem, config: &RunConfig) -> Result<RunResult> {
    config.solver.validate()?;
    let tau = config.tau(problem.params.t_final);
    let s = config.solver;
    match config.scheme {
        Scheme::Lbdf2 => time_loop(problem, config, || Lbdf2V::new(problem, tau, s)),
        Scheme::Strang => time_loop(problem, config, || StrangV::new(problem, tau, s)),
        Scheme::Krogstad => time_loop(problem, config, || KrogstadV::new(problem, tau, s)),
    }
}
