use num_complex::Complex64;

use super::{FcgleParams, Grid, GridProblem, SeparableSolution, Source, SourceMode};
use crate::error::{Error, Result};
use crate::fracfd::{BoundaryVanishingPoly, FdOrder};

const ALPHAS: [f64; 3] = [1.2, 1.8, 1.5];

fn check_d(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::Config(format!("examples are defined for d = 2 or 3, got {d}")))
    }
}

/// Manufactured-solution benchmark: `u = e^{-it} Π_μ (1 − x_μ²)⁴` on `(−1, 1)^d`.
pub fn example1_setup(d: usize, n: usize, fd_order: FdOrder, source_mode: SourceMode) -> Result<GridProblem> {
    check_d(d)?;
    let params = FcgleParams {
        nu: 1.0,
        eta: 1.0,
        gamma: 3.0,
        kappa: 1.0,
        zeta: 2.0,
        alphas: ALPHAS[..d].to_vec(),
        domain: vec![(-1.0, 1.0); d],
        t_final: 1.0,
    };
    let target = SeparableSolution {
        omega: Complex64::new(0.0, -1.0),
        factors: vec![BoundaryVanishingPoly::bump(-1.0, 1.0, 4)?; d],
    };
    let grid = Grid::new(&params.domain, &vec![n; d])?;
    let u0 = target.eval_grid(0.0, &grid);
    let source = match source_mode {
        SourceMode::AnalyticManufactured | SourceMode::DiscreteManufactured => Source::Manufactured {
            mode: source_mode,
            target: target.clone(),
        },
        SourceMode::None => Source::None,
        SourceMode::Custom => {
            return Err(Error::Config("custom sources are only available through the library".into()))
        }
    };
    let exact = matches!(source, Source::Manufactured { .. }).then_some(target);
    GridProblem::new(params, fd_order, &vec![n; d], u0, source, exact)
}

/// `sech x` without overflow for large `|x|`.
pub fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Source-free benchmark on `(−10, 10)^d` with
/// `u_0 = Π_μ sech(x_μ) · e^{i Σ_μ x_μ}`.
pub fn example2_setup(d: usize, n: usize, fd_order: FdOrder) -> Result<GridProblem> {
    check_d(d)?;
    let params = FcgleParams {
        nu: 1.0,
        eta: 1.0,
        gamma: 1.0,
        kappa: 1.0,
        zeta: 1.0,
        alphas: ALPHAS[..d].to_vec(),
        domain: vec![(-10.0, 10.0); d],
        t_final: 1.0,
    };
    let grid = Grid::new(&params.domain, &vec![n; d])?;
    let factors: Vec<Vec<Complex64>> = grid
        .coords()
        .iter()
        .map(|xs| xs.iter().map(|&x| sech(x) * Complex64::new(0.0, x).exp()).collect())
        .collect();
    let u0 = grid.separable(&factors);
    GridProblem::new(params, fd_order, &vec![n; d], u0, Source::None, None)
}
