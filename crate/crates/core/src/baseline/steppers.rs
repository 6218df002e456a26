use num_complex::Complex64;

use super::krylov::{pgmres_solve, LanczosBasis};
use super::operators::{BttbOperator, TauPreconditioner};
use super::{IterationStats, SolverConfig};
use crate::error::Result;
use crate::integrators::Stepper;
use crate::problem::{GridProblem, Model};
use crate::tensor::{linear_combine, CTensor};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn coef(problem: &GridProblem) -> Complex64 {
    Complex64::new(problem.params.nu, problem.params.eta)
}

/// Shift-and-invert machinery shared by the φ-based schemes.
struct SiLanczos {
    shifted: BttbOperator,
    precond: TauPreconditioner,
    xi: f64,
    coef: Complex64,
    cfg: SolverConfig,
}

impl SiLanczos {
    fn new(problem: &GridProblem, tau: f64, cfg: SolverConfig) -> Result<Self> {
        let ops = problem.frac_operators()?;
        let xi = cfg.xi * tau;
        Ok(Self {
            shifted: BttbOperator::new(&ops, c(1.0), xi),
            precond: TauPreconditioner::new(&ops, c(1.0), xi)?,
            xi,
            coef: coef(problem),
            cfg,
        })
    }

    fn basis(&self, v: &CTensor<f64>, stats: &mut IterationStats) -> Result<LanczosBasis> {
        let b = LanczosBasis::build(
            &self.shifted,
            &self.precond,
            self.xi,
            v.as_slice(),
            self.cfg.m,
            self.cfg.tol,
            self.cfg.maxit,
        )?;
        stats.outer.record(b.dim());
        stats.record_inner(&b.inner);
        Ok(b)
    }

    fn phi(&self, b: &LanczosBasis, ell: usize, theta: f64, dims: &[usize]) -> Result<CTensor<f64>> {
        if b.dim() == 0 {
            return Ok(CTensor::zeros(dims));
        }
        CTensor::from_vec(dims, b.phi_action(ell, theta, self.coef))
    }
}

/// LBDF2 with each `(I − θK)` solve done by tau-preconditioned GMRES,
/// started from the current state.
pub struct Lbdf2V {
    model: Model<f64>,
    tau: f64,
    cfg: SolverConfig,
    a_euler: BttbOperator,
    p_euler: TauPreconditioner,
    a_bdf: BttbOperator,
    p_bdf: TauPreconditioner,
    prev: Option<CTensor<f64>>,
    stats: IterationStats,
}

impl Lbdf2V {
    pub fn new(problem: &GridProblem, tau: f64, cfg: SolverConfig) -> Result<Self> {
        let ops = problem.frac_operators()?;
        let k = coef(problem);
        let th = 2.0 * tau / 3.0;
        Ok(Self {
            model: Model::new(problem)?,
            tau,
            cfg,
            a_euler: BttbOperator::new(&ops, k, tau),
            p_euler: TauPreconditioner::new(&ops, k, tau)?,
            a_bdf: BttbOperator::new(&ops, k, th),
            p_bdf: TauPreconditioner::new(&ops, k, th)?,
            prev: None,
            stats: IterationStats::default(),
        })
    }
}

impl Stepper<f64> for Lbdf2V {
    fn step(&mut self, _n: usize, t: f64, u: &CTensor<f64>) -> Result<CTensor<f64>> {
        let tau = self.tau;
        let (rhs, a, p) = match &self.prev {
            None => {
                let g = self.model.g(t, u)?;
                (linear_combine(&[(c(1.0), u), (c(tau), &g)])?, &self.a_euler, &self.p_euler)
            }
            Some(prev) => {
                let extrap = linear_combine(&[(c(2.0), u), (c(-1.0), prev)])?;
                let g = self.model.g(t + tau, &extrap)?;
                let rhs = linear_combine(&[
                    (c(4.0 / 3.0), u),
                    (c(-1.0 / 3.0), prev),
                    (c(2.0 * tau / 3.0), &g),
                ])?;
                (rhs, &self.a_bdf, &self.p_bdf)
            }
        };
        let (x, info) = pgmres_solve(a, p, rhs.as_slice(), u.as_slice(), self.cfg.tol, self.cfg.maxit)?;
        self.stats.record_outer(&info);
        self.prev = Some(u.clone());
        CTensor::from_vec(u.dims(), x)
    }

    fn iteration_stats(&self) -> Option<IterationStats> {
        Some(self.stats)
    }
}

/// Strang splitting with `e^{τK}` applied by shift-and-invert Lanczos.
pub struct StrangV {
    model: Model<f64>,
    tau: f64,
    si: SiLanczos,
    stats: IterationStats,
}

impl StrangV {
    pub fn new(problem: &GridProblem, tau: f64, cfg: SolverConfig) -> Result<Self> {
        Ok(Self {
            model: Model::new(problem)?,
            tau,
            si: SiLanczos::new(problem, tau, cfg)?,
            stats: IterationStats::default(),
        })
    }
}

impl Stepper<f64> for StrangV {
    fn step(&mut self, _n: usize, t: f64, u: &CTensor<f64>) -> Result<CTensor<f64>> {
        let half = self.tau / 2.0;
        let mut v = self.model.exact_flow(half, u);
        if let Some(s) = self.model.source_integral(t, t + half) {
            v.axpy(c(1.0), &s)?;
        }
        let b = self.si.basis(&v, &mut self.stats)?;
        let mut w = self.si.phi(&b, 0, self.tau, u.dims())?;
        if let Some(s) = self.model.source_integral(t + half, t + self.tau) {
            w.axpy(c(1.0), &s)?;
        }
        Ok(self.model.exact_flow(half, &w))
    }

    fn iteration_stats(&self) -> Option<IterationStats> {
        Some(self.stats)
    }
}

/// Krogstad's scheme with every φ-action by shift-and-invert Lanczos. One
/// Krylov basis is built per distinct vector and reused for all φ-functions
/// applied to it.
pub struct KrogstadV {
    model: Model<f64>,
    tau: f64,
    kop: BttbOperator,
    si: SiLanczos,
    stats: IterationStats,
}

impl KrogstadV {
    pub fn new(problem: &GridProblem, tau: f64, cfg: SolverConfig) -> Result<Self> {
        let ops = problem.frac_operators()?;
        Ok(Self {
            model: Model::new(problem)?,
            tau,
            kop: BttbOperator::new(&ops, coef(problem), 0.0),
            si: SiLanczos::new(problem, tau, cfg)?,
            stats: IterationStats::default(),
        })
    }

    fn defect(&self, t: f64, u: &CTensor<f64>, g_n: &CTensor<f64>) -> Result<CTensor<f64>> {
        let mut g = self.model.g(t, u)?;
        g.axpy(c(-1.0), g_n)?;
        Ok(g)
    }
}

impl Stepper<f64> for KrogstadV {
    fn step(&mut self, _n: usize, t: f64, u: &CTensor<f64>) -> Result<CTensor<f64>> {
        let tau = self.tau;
        let dims = u.dims().to_vec();
        let g_n = self.model.g(t, u)?;
        let mut f = CTensor::from_vec(&dims, self.kop.apply_k(u.as_slice())?)?;
        f.axpy(c(1.0), &g_n)?;

        let bf = self.si.basis(&f, &mut self.stats)?;
        let p1h_f = self.si.phi(&bf, 1, tau / 2.0, &dims)?;
        let p1_f = self.si.phi(&bf, 1, tau, &dims)?;

        let u2 = linear_combine(&[(c(1.0), u), (c(tau / 2.0), &p1h_f)])?;
        let d2 = self.defect(t + tau / 2.0, &u2, &g_n)?;
        let b2 = self.si.basis(&d2, &mut self.stats)?;
        let p2h_d2 = self.si.phi(&b2, 2, tau / 2.0, &dims)?;

        let u3 = linear_combine(&[(c(1.0), u), (c(tau / 2.0), &p1h_f), (c(tau), &p2h_d2)])?;
        let d3 = self.defect(t + tau / 2.0, &u3, &g_n)?;
        let b3 = self.si.basis(&d3, &mut self.stats)?;
        let p2_d3 = self.si.phi(&b3, 2, tau, &dims)?;

        let u4 = linear_combine(&[(c(1.0), u), (c(tau), &p1_f), (c(2.0 * tau), &p2_d3)])?;
        let d4 = self.defect(t + tau, &u4, &g_n)?;
        let b4 = self.si.basis(&d4, &mut self.stats)?;

        let p2_d2 = self.si.phi(&b2, 2, tau, &dims)?;
        let p3_d2 = self.si.phi(&b2, 3, tau, &dims)?;
        let p3_d3 = self.si.phi(&b3, 3, tau, &dims)?;
        let p2_d4 = self.si.phi(&b4, 2, tau, &dims)?;
        let p3_d4 = self.si.phi(&b4, 3, tau, &dims)?;
        linear_combine(&[
            (c(1.0), u),
            (c(tau), &p1_f),
            (c(2.0 * tau), &p2_d2),
            (c(2.0 * tau), &p2_d3),
            (c(-tau), &p2_d4),
            (c(-4.0 * tau), &p3_d2),
            (c(-4.0 * tau), &p3_d3),
            (c(4.0 * tau), &p3_d4),
        ])
    }

    fn iteration_stats(&self) -> Option<IterationStats> {
        Some(self.stats)
    }
}
