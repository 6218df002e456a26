//! TOML run configuration.
//!
//! ```toml
//! [problem]
//! kind = "example1"          # example1 | example2 | custom
//! d = 2
//! n = 64                     # or one count per direction: [64, 48]
//! fd_order = 2
//! source = "discrete_manufactured"
//!
//! [run]
//! scheme = "lbdf2"
//! engine = "spectral"
//! steps = 25
//! snapshot_times = [0.0, 0.5, 1.0]
//!
//! [solver]
//! tol = 1e-6
//! maxit = 20
//! m = 10
//! xi = 0.1
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use fcgle_core::baseline::SolverConfig;
use fcgle_core::problem::{example1_setup, example2_setup, sech};
use fcgle_core::fracfd::BoundaryVanishingPoly;
use fcgle_core::{Engine, FcgleParams, FdOrder, Grid, GridProblem, Precision, RunConfig, Scheme, Source, SourceMode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Example1,
    Example2,
    Custom,
}

/// Initial states available to custom problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    /// `Π_μ sech(x_μ) e^{i x_μ}`.
    SechWave,
    /// `Π_μ (1 − s_μ²)⁴` with `s_μ` the direction mapped onto `(−1, 1)`.
    Bump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSize {
    Uniform(usize),
    PerDirection(Vec<usize>),
}

impl GridSize {
    pub fn resolve(&self, d: usize) -> Result<Vec<usize>, CliError> {
        match self {
            GridSize::Uniform(n) => Ok(vec![*n; d]),
            GridSize::PerDirection(v) if v.len() == d => Ok(v.clone()),
            GridSize::PerDirection(v) => Err(CliError::Config(format!(
                "problem.n lists {} sizes for d = {d}",
                v.len()
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub kind: ProblemKind,
    #[serde(default = "default_d")]
    pub d: usize,
    pub n: GridSize,
    #[serde(default = "default_fd")]
    pub fd_order: FdOrder,
    /// Source of `example1`; ignored otherwise.
    #[serde(default = "default_source")]
    pub source: SourceMode,
    /// Model parameters of a custom problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<FcgleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
}

fn default_d() -> usize {
    2
}
fn default_fd() -> FdOrder {
    FdOrder::Second
}
fn default_source() -> SourceMode {
    SourceMode::DiscreteManufactured
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scheme: Scheme,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

fn default_engine() -> Engine {
    Engine::Spectral
}
fn default_steps() -> usize {
    25
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModeName {
    Exact,
    SelfReference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Step counts of a temporal study.
    pub steps: Vec<usize>,
    /// Grid sizes of a spatial study, run with `run.steps` steps each.
    pub n: Vec<usize>,
    pub error_mode: ErrorModeName,
    /// Reference step count as a multiple of the finest step count.
    pub reference_factor: usize,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            steps: Vec::new(),
            n: Vec::new(),
            error_mode: ErrorModeName::Exact,
            reference_factor: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    /// Grid sizes per direction; empty means the problem's own size.
    pub n: Vec<usize>,
    /// The two engines compared; the speedup is `time[1] / time[0]`.
    pub engines: [Engine; 2],
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            n: Vec::new(),
            engines: [Engine::Spectral, Engine::IterativeBaseline],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: ProblemSection,
    pub run: RunSection,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub bench: BenchSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.problem;
        if p.d == 0 {
            return Err(CliError::Config("problem.d must be positive".into()));
        }
        if p.n.resolve(p.d)?.contains(&0) {
            return Err(CliError::Config("problem.n must be positive".into()));
        }
        match p.kind {
            ProblemKind::Custom => {
                let params = p
                    .params
                    .as_ref()
                    .ok_or_else(|| CliError::Config("custom problems need a [problem.params] table".into()))?;
                if params.order() != p.d {
                    return Err(CliError::Config(format!(
                        "problem.params has {} directions, problem.d is {}",
                        params.order(),
                        p.d
                    )));
                }
                params.validate()?;
                if p.initial.is_none() {
                    return Err(CliError::Config("custom problems need problem.initial".into()));
                }
            }
            _ => {
                if p.params.is_some() || p.initial.is_some() {
                    return Err(CliError::Config(
                        "problem.params and problem.initial apply to custom problems only".into(),
                    ));
                }
                if !matches!(p.n, GridSize::Uniform(_)) {
                    return Err(CliError::Config("the examples use the same n in every direction".into()));
                }
            }
        }
        if p.source == SourceMode::Custom {
            return Err(CliError::Config("custom sources are only available through the library".into()));
        }
        if self.run.steps == 0 {
            return Err(CliError::Config("run.steps must be at least 1".into()));
        }
        if self.run.snapshot_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(CliError::Config("run.snapshot_times must be non-negative".into()));
        }
        if self.convergence.reference_factor < 2 {
            return Err(CliError::Config("convergence.reference_factor must be at least 2".into()));
        }
        self.solver.validate()?;
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.problem.n.resolve(self.problem.d).expect("validated")
    }

    /// Builds the problem with `n` overriding the configured grid size.
    pub fn problem_with(&self, n: Option<usize>) -> Result<GridProblem, CliError> {
        let p = &self.problem;
        let dims = match n {
            Some(n) => vec![n; p.d],
            None => self.dims(),
        };
        let problem = match p.kind {
            ProblemKind::Example1 => example1_setup(p.d, dims[0], p.fd_order, p.source)?,
            ProblemKind::Example2 => example2_setup(p.d, dims[0], p.fd_order)?,
            ProblemKind::Custom => {
                let params = p.params.clone().expect("validated");
                let grid = Grid::new(&params.domain, &dims)?;
                let factors = match p.initial.expect("validated") {
                    Initial::SechWave => grid
                        .coords()
                        .iter()
                        .map(|xs| xs.iter().map(|&x| sech(x) * Complex64::new(0.0, x).exp()).collect())
                        .collect::<Vec<Vec<Complex64>>>(),
                    Initial::Bump => grid
                        .coords()
                        .iter()
                        .zip(&params.domain)
                        .map(|(xs, &(a, b))| {
                            let bump = BoundaryVanishingPoly::bump(a, b, 4)?;
                            let peak = bump.eval(0.5 * (a + b));
                            Ok(xs.iter().map(|&x| Complex64::new(bump.eval(x) / peak, 0.0)).collect())
                        })
                        .collect::<fcgle_core::Result<Vec<Vec<Complex64>>>>()?,
                };
                let u0 = grid.separable(&factors);
                GridProblem::new(params, p.fd_order, &dims, u0, Source::None, None)?
            }
        };
        Ok(problem)
    }

    pub fn run_config(&self) -> RunConfig {
        let mut rc = RunConfig::new(self.run.scheme, self.run.engine, self.run.steps);
        rc.precision = self.run.precision;
        rc.snapshot_times = self.run.snapshot_times.clone();
        rc.solver = self.solver;
        rc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[problem]
kind = "example1"
n = 16

[run]
scheme = "lbdf2"
"#;

    #[test]
    fn defaults_are_filled() {
        let c = ConfigFile::parse(MINIMAL).unwrap();
        assert_eq!(c.problem.d, 2);
        assert_eq!(c.problem.fd_order, FdOrder::Second);
        assert_eq!(c.run.steps, 25);
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.solver.tol, 1e-6);
        assert_eq!(c.solver.maxit, 20);
        assert_eq!(c.solver.m, 10);
        assert_eq!(c.solver.xi, 0.1);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line_number() {
        let text = MINIMAL.replace("scheme = \"lbdf2\"", "scheme = \"lbdf2\"\nsteps_typo = 3");
        let CliError::Config(msg) = ConfigFile::parse(&text).unwrap_err() else {
            panic!("expected config error")
        };
        assert!(msg.contains("steps_typo"), "{msg}");
        assert!(msg.contains("line 8"), "{msg}");
    }

    #[test]
    fn effective_config_round_trips() {
        let c = ConfigFile::parse(MINIMAL).unwrap();
        let again = ConfigFile::parse(&c.to_toml()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn custom_problem_needs_params() {
        let text = MINIMAL.replace("example1", "custom");
        assert!(matches!(ConfigFile::parse(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn custom_problem_builds() {
        let text = r#"
[problem]
kind = "custom"
d = 2
n = [6, 5]
initial = "bump"
source = "none"

[problem.params]
nu = 1.0
eta = 0.5
gamma = 1.0
kappa = 1.0
zeta = 1.0
alphas = [1.4, 1.9]
domain = [[0.0, 2.0], [-1.0, 1.0]]
t_final = 0.5

[run]
scheme = "strang"
"#;
        let c = ConfigFile::parse(text).unwrap();
        let p = c.problem_with(None).unwrap();
        assert_eq!(p.dims(), &[6, 5]);
        assert!(p.u0.as_slice().iter().all(|z| z.re > 0.0 && z.re <= 1.0 && z.im == 0.0));
        assert_eq!(ConfigFile::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for (from, to) in [("n = 16", "n = 0"), ("n = 16", "n = [16, 16, 16]"), ("kind = \"example1\"", "kind = \"example1\"\nd = 1")] {
            let text = MINIMAL.replace(from, to);
            let r = ConfigFile::parse(&text).and_then(|c| c.problem_with(None).map(|_| ()));
            assert!(matches!(r, Err(CliError::Config(_))), "{to}");
        }
    }
}
