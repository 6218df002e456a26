//! The FCGLE model
//! `∂_t u = (ν+iη) Σ_μ ∂^{α_μ}_{x_μ} u + γu − (κ+iζ)|u|²u + s(t,x)`
//! on a cuboid with homogeneous exterior data, discretized on inner nodes.

mod examples;
mod model;
mod source;

pub use examples::{example1_setup, example2_setup, sech};
pub use model::{exact_flow, exact_flow_scalar, nonlinear_g, Model};
pub use source::{manufactured_source, CustomSource, SeparableSolution, Source, SourceMode};

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::fracfd::{FdOrder, FracOperator};
use crate::kronspec::KronSumOperator;
use crate::scalar::Real;
use crate::tensor::CTensor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FcgleParams {
    pub nu: f64,
    pub eta: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub zeta: f64,
    pub alphas: Vec<f64>,
    pub domain: Vec<(f64, f64)>,
    pub t_final: f64,
}

impl FcgleParams {
    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    /// `ν > 0`, `κ ≥ 0`, `α_μ ∈ (1, 2]`, nonempty intervals, `T > 0`.
    ///
    /// `κ = 0` (a linear problem) and `α_μ = 2` are admitted for regression
    /// configurations.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad(format!("nu must be positive, got {}", self.nu));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be non-negative, got {}", self.kappa));
        }
        if ![self.eta, self.gamma, self.zeta].iter().all(|x| x.is_finite()) {
            return bad("eta, gamma and zeta must be finite".into());
        }
        if self.alphas.is_empty() || self.alphas.len() != self.domain.len() {
            return bad(format!(
                "need one alpha per direction: {} alphas, {} intervals",
                self.alphas.len(),
                self.domain.len()
            ));
        }
        if let Some(a) = self.alphas.iter().find(|&&a| !(a > 1.0 && a <= 2.0)) {
            return bad(format!("alpha={a} outside (1, 2]"));
        }
        if let Some((a, b)) = self.domain.iter().find(|(a, b)| !(a < b)) {
            return bad(format!("empty interval ({a}, {b})"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.t_final));
        }
        Ok(())
    }
}

/// Inner nodes `x_j = a + j h`, `j = 1..n`, `h = (b − a)/(n + 1)` per direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dims: Vec<usize>,
    h: Vec<f64>,
    coords: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(domain: &[(f64, f64)], dims: &[usize]) -> Result<Self> {
        check_dims(&[domain.len()], &[dims.len()])?;
        if dims.contains(&0) {
            return Err(Error::Config("every direction needs at least one inner node".into()));
        }
        let h: Vec<f64> = domain
            .iter()
            .zip(dims)
            .map(|(&(a, b), &n)| (b - a) / (n as f64 + 1.0))
            .collect();
        let coords = domain
            .iter()
            .zip(dims)
            .zip(&h)
            .map(|((&(a, _), &n), &h)| (1..=n).map(|j| a + j as f64 * h).collect())
            .collect();
        Ok(Self {
            dims: dims.to_vec(),
            h,
            coords,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn h(&self) -> &[f64] {
        &self.h
    }
    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tensor of `Π_μ f_μ(x_μ)` from per-direction samples.
    pub fn separable(&self, factors: &[Vec<num_complex::Complex64>]) -> CTensor<f64> {
        CTensor::from_fn(&self.dims, |idx| {
            idx.iter()
                .enumerate()
                .fold(num_complex::Complex64::new(1.0, 0.0), |acc, (mu, &j)| acc * factors[mu][j])
        })
    }
}

/// A fully specified semidiscrete problem.
#[derive(Clone)]
pub struct GridProblem {
    pub params: FcgleParams,
    pub fd_order: FdOrder,
    pub grid: Grid,
    pub u0: CTensor<f64>,
    pub source: Source,
    /// Exact solution of the continuous problem, when known.
    pub exact: Option<SeparableSolution>,
}

impl std::fmt::Debug for GridProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridProblem")
            .field("params", &self.params)
            .field("fd_order", &self.fd_order)
            .field("dims", &self.grid.dims)
            .field("source", &self.source.mode())
            .finish()
    }
}

impl GridProblem {
    pub fn new(
        params: FcgleParams,
        fd_order: FdOrder,
        dims: &[usize],
        u0: CTensor<f64>,
        source: Source,
        exact: Option<SeparableSolution>,
    ) -> Result<Self> {
        params.validate()?;
        let grid = Grid::new(&params.domain, dims)?;
        check_dims(grid.dims(), u0.dims())?;
        Ok(Self {
            params,
            fd_order,
            grid,
            u0,
            source,
            exact,
        })
    }

    pub fn dims(&self) -> &[usize] {
        self.grid.dims()
    }

    pub fn frac_operators(&self) -> Result<Vec<FracOperator>> {
        self.params
            .alphas
            .iter()
            .zip(self.grid.dims())
            .zip(self.grid.h())
            .map(|((&a, &n), &h)| FracOperator::new(a, self.fd_order, n, h))
            .collect()
    }

    pub fn kron_operator(&self) -> Result<KronSumOperator> {
        KronSumOperator::new(self.frac_operators()?, self.params.nu, self.params.eta)
    }

    /// Grid samples of the exact solution at time `t`, if one is known.
    pub fn exact_at(&self, t: f64) -> Option<CTensor<f64>> {
        self.exact.as_ref().map(|e| e.eval_grid(t, &self.grid))
    }
}

/// `sqrt(Π h_μ) · ‖U‖₂`.
pub fn discrete_l2<T: Real>(u: &CTensor<T>, h: &[f64]) -> f64 {
    h.iter().product::<f64>().sqrt() * u.norm()
}

/// `discrete_l2(U − U_ref)`.
pub fn discrete_l2_error<T: Real, S: Real>(u: &CTensor<T>, uref: &CTensor<S>, h: &[f64]) -> Result<f64> {
    check_dims(uref.dims(), u.dims())?;
    let sq: f64 = u
        .as_slice()
        .iter()
        .zip(uref.as_slice())
        .map(|(a, b)| {
            let d = crate::scalar::widen_complex(*a) - crate::scalar::widen_complex(*b);
            d.norm_sqr()
        })
        .sum();
    Ok(h.iter().product::<f64>().sqrt() * sq.sqrt())
}
