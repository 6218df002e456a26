use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Grid, GridProblem};
use crate::error::{Error, Result};
use crate::fracfd::{riesz_exact_poly, BoundaryVanishingPoly};
use crate::tensor::{pointwise_map, CTensor};

/// How the source term is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    None,
    /// Continuous Riesz derivatives of the target solution (includes spatial error).
    AnalyticManufactured,
    /// The discrete operator applied to grid samples of the target (isolates time error).
    DiscreteManufactured,
    Custom,
}

/// `u(t, x) = e^{ωt} Π_μ p_μ(x_μ)` with boundary-vanishing polynomial factors.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableSolution {
    pub omega: Complex64,
    pub factors: Vec<BoundaryVanishingPoly>,
}

impl SeparableSolution {
    /// `Π_μ p_μ(x_μ)` on the grid.
    pub fn spatial(&self, grid: &Grid) -> CTensor<f64> {
        let samples: Vec<Vec<Complex64>> = self
            .factors
            .iter()
            .zip(grid.coords())
            .map(|(p, xs)| xs.iter().map(|&x| Complex64::new(p.eval(x), 0.0)).collect())
            .collect();
        grid.separable(&samples)
    }

    pub fn eval_grid(&self, t: f64, grid: &Grid) -> CTensor<f64> {
        let mut x = self.spatial(grid);
        x.scale((self.omega * t).exp());
        x
    }
}

/// User-supplied `s(t, ·)` on the grid.
pub type CustomSource = Arc<dyn Fn(f64, &Grid) -> CTensor<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Source {
    None,
    /// Source making `target` an exact solution; `mode` is one of the
    /// manufactured variants.
    Manufactured {
        mode: SourceMode,
        target: SeparableSolution,
    },
    Custom(CustomSource),
}

impl Source {
    pub fn mode(&self) -> SourceMode {
        match self {
            Source::None => SourceMode::None,
            Source::Manufactured { mode, .. } => *mode,
            Source::Custom(_) => SourceMode::Custom,
        }
    }
}

/// For a separable target `e^{ωt}X`, the source is
/// `S(t) = e^{ωt} A + |e^{ωt}|² e^{ωt} B` with
/// `A = ωX − KX − γX` and `B = (κ+iζ)|X|²X`. Returns `(A, B)`.
pub(crate) fn separable_components(
    problem: &GridProblem,
    target: &SeparableSolution,
    mode: SourceMode,
) -> Result<(CTensor<f64>, CTensor<f64>)> {
    let p = &problem.params;
    if target.factors.len() != p.order() {
        return Err(Error::DimensionMismatch {
            expected: vec![p.order()],
            found: vec![target.factors.len()],
        });
    }
    let grid = &problem.grid;
    let x = target.spatial(grid);
    let kx = match mode {
        SourceMode::DiscreteManufactured => problem.kron_operator()?.apply_k(&x)?,
        SourceMode::AnalyticManufactured => analytic_k(problem, target)?,
        other => {
            return Err(Error::Unsupported(format!(
                "source mode {other:?} is not a manufactured mode"
            )))
        }
    };
    let a_coef = target.omega - p.gamma;
    let mut a = x.clone();
    a.scale(a_coef);
    a.axpy(Complex64::new(-1.0, 0.0), &kx)?;
    let nl = Complex64::new(p.kappa, p.zeta);
    let b = pointwise_map(&x, |z| nl * z.norm_sqr() * z);
    Ok((a, b))
}

/// `(ν+iη) Σ_μ (∂^{α_μ} p_μ)(x_μ) Π_{ν≠μ} p_ν(x_ν)` from the continuous derivatives.
fn analytic_k(problem: &GridProblem, target: &SeparableSolution) -> Result<CTensor<f64>> {
    let p = &problem.params;
    let grid = &problem.grid;
    let values: Vec<Vec<Complex64>> = target
        .factors
        .iter()
        .zip(grid.coords())
        .map(|(f, xs)| xs.iter().map(|&x| Complex64::new(f.eval(x), 0.0)).collect())
        .collect();
    let mut acc = CTensor::zeros(grid.dims());
    for mu in 0..p.order() {
        let deriv = grid.coords()[mu]
            .iter()
            .map(|&x| riesz_exact_poly(&target.factors[mu], p.alphas[mu], x).map(|v| Complex64::new(v, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        let mut factors = values.clone();
        factors[mu] = deriv;
        acc.axpy(Complex64::new(p.nu, p.eta), &grid.separable(&factors))?;
    }
    Ok(acc)
}

/// The source tensor `S(t)` on the grid.
pub fn manufactured_source(problem: &GridProblem, t: f64) -> Result<CTensor<f64>> {
    match &problem.source {
        Source::None => Ok(CTensor::zeros(problem.dims())),
        Source::Custom(f) => Ok(f(t, &problem.grid)),
        Source::Manufactured { mode, target } => {
            let (a, b) = separable_components(problem, target, *mode)?;
            let e = (target.omega * t).exp();
            let mut s = a;
            s.scale(e);
            s.axpy(e * e.norm_sqr(), &b)?;
            Ok(s)
        }
    }
}
