use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::fft::{dst1_nd, dst_plans, fft_nd, FftPair};
use crate::error::{Error, Result};
use crate::fracfd::FracOperator;
use crate::tensor::PAR_THRESHOLD;

/// A linear map on complex vectors of a fixed length.
pub trait LinearOperator: Sync {
    fn len(&self) -> usize;

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The identity, for unpreconditioned runs.
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn len(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.to_vec()
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: vec![expected],
            found: vec![found],
        })
    }
}

/// `I − θ c (⊕_μ D_μ)` with symmetric Toeplitz `D_μ`, applied by circulant
/// embedding and a d-dimensional FFT.
pub struct BttbOperator {
    dims: Vec<usize>,
    emb: Vec<usize>,
    columns: Vec<Vec<f64>>,
    coef: Complex64,
    theta: f64,
    /// `Σ_μ` circulant eigenvalues on the embedded grid, scaled by `1/∏L_μ`.
    symbol: Vec<f64>,
    runs: Vec<usize>,
    plans: Vec<FftPair>,
}

impl BttbOperator {
    pub fn new(ops: &[FracOperator], coef: Complex64, theta: f64) -> Self {
        let dims: Vec<usize> = ops.iter().map(|o| o.n()).collect();
        let columns: Vec<Vec<f64>> = ops.iter().map(|o| o.first_column()).collect();
        let emb: Vec<usize> = dims.iter().map(|&n| (2 * n).next_power_of_two()).collect();
        let mut planner = FftPlanner::new();
        let plans: Vec<FftPair> = emb.iter().map(|&l| FftPair::new(&mut planner, l)).collect();
        let total: usize = emb.iter().product();
        let eig: Vec<Vec<f64>> = columns
            .iter()
            .zip(&emb)
            .zip(&plans)
            .map(|((t, &l), p)| {
                let mut c = vec![Complex64::default(); l];
                c[0] = Complex64::new(t[0], 0.0);
                for (m, &tm) in t.iter().enumerate().skip(1) {
                    c[m] = Complex64::new(tm, 0.0);
                    c[l - m] = Complex64::new(tm, 0.0);
                }
                p.forward.process(&mut c);
                c.iter().map(|z| z.re).collect()
            })
            .collect();
        let mut symbol = vec![0.0; total];
        let mut stride = 1;
        for (mu, e) in eig.iter().enumerate() {
            let l = emb[mu];
            for (j, s) in symbol.iter_mut().enumerate() {
                *s += e[(j / stride) % l];
            }
            stride *= l;
        }
        let inv = 1.0 / total as f64;
        symbol.iter_mut().for_each(|s| *s *= inv);
        Self {
            runs: run_offsets(&dims, &emb),
            dims,
            emb,
            columns,
            coef,
            theta,
            symbol,
            plans,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn coef(&self) -> Complex64 {
        self.coef
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn embedding(&self) -> &[usize] {
        &self.emb
    }

    /// `c (⊕_μ D_μ) v`.
    pub fn apply_k(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), v.len())?;
        let mut buf = self.embed(v);
        fft_nd(&mut buf, &self.emb, &self.plans, false);
        let coef = self.coef;
        let mul = |(z, &s): (&mut Complex64, &f64)| *z *= coef * s;
        if buf.len() >= PAR_THRESHOLD {
            buf.par_iter_mut().zip(self.symbol.par_iter()).for_each(mul);
        } else {
            buf.iter_mut().zip(&self.symbol).for_each(mul);
        }
        fft_nd(&mut buf, &self.emb, &self.plans, true);
        Ok(self.restrict(&buf))
    }

    /// `(I − θK) v`.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.theta == 0.0 {
            check_len(self.len(), v.len())?;
            return Ok(v.to_vec());
        }
        let mut kv = self.apply_k(v)?;
        let th = self.theta;
        kv.iter_mut().zip(v).for_each(|(k, &x)| *k = x - th * *k);
        Ok(kv)
    }

    fn embed(&self, v: &[Complex64]) -> Vec<Complex64> {
        let total: usize = self.emb.iter().product();
        let n0 = self.dims[0];
        let mut out = vec![Complex64::default(); total];
        for (src, &off) in v.chunks(n0).zip(&self.runs) {
            out[off..off + n0].copy_from_slice(src);
        }
        out
    }

    fn restrict(&self, buf: &[Complex64]) -> Vec<Complex64> {
        let n0 = self.dims[0];
        let mut out = vec![Complex64::default(); self.len()];
        for (dst, &off) in out.chunks_mut(n0).zip(&self.runs) {
            dst.copy_from_slice(&buf[off..off + n0]);
        }
        out
    }
}

/// Offsets in the embedded grid of each leading-axis run of the inner grid.
fn run_offsets(dims: &[usize], emb: &[usize]) -> Vec<usize> {
    let runs: usize = dims[1..].iter().product();
    let mut idx = vec![0usize; dims.len()];
    let mut out = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut off = 0;
        let mut stride = 1;
        for (mu, &i) in idx.iter().enumerate() {
            off += i * stride;
            stride *= emb[mu];
        }
        out.push(off);
        for mu in 1..idx.len() {
            idx[mu] += 1;
            if idx[mu] < dims[mu] {
                break;
            }
            idx[mu] = 0;
        }
    }
    out
}

impl LinearOperator for BttbOperator {
    fn len(&self) -> usize {
        self.dims.iter().product()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matvec(x).expect("operand length")
    }
}

/// Eigenvalues of the tau approximation `τ(D) = D − H` of a symmetric
/// Toeplitz operator, in DST-I order `k = 1, …, n`:
/// `λ_k = t_0 + 2 Σ_{m=1}^{n−1} t_m cos(kmπ/(n+1))`.
pub fn tau_eigenvalues(op: &FracOperator) -> Vec<f64> {
    let t = op.first_column();
    let n = t.len();
    let w = std::f64::consts::PI / (n + 1) as f64;
    (1..=n)
        .map(|k| {
            t[0] + 2.0 * t.iter().enumerate().skip(1).map(|(m, &tm)| tm * (w * (k * m) as f64).cos()).sum::<f64>()
        })
        .collect()
}

/// Solver for `I − θ c (⊕_μ τ(D_μ))` by DST-I diagonalization.
pub struct TauPreconditioner {
    dims: Vec<usize>,
    eigenvalues: Vec<Vec<f64>>,
    inv: Vec<Complex64>,
    plans: Vec<std::sync::Arc<dyn rustfft::Fft<f64>>>,
}

impl TauPreconditioner {
    pub fn new(ops: &[FracOperator], coef: Complex64, theta: f64) -> Result<Self> {
        let dims: Vec<usize> = ops.iter().map(|o| o.n()).collect();
        let eigenvalues: Vec<Vec<f64>> = ops.iter().map(tau_eigenvalues).collect();
        let total: usize = dims.iter().product();
        let mut sum = vec![0.0; total];
        let mut stride = 1;
        for (mu, e) in eigenvalues.iter().enumerate() {
            for (j, s) in sum.iter_mut().enumerate() {
                *s += e[(j / stride) % dims[mu]];
            }
            stride *= dims[mu];
        }
        let mut inv = Vec::with_capacity(total);
        for (j, &s) in sum.iter().enumerate() {
            let d = Complex64::new(1.0, 0.0) - theta * coef * s;
            if d.norm() == 0.0 || !d.is_finite() {
                return Err(Error::FilterPole { index: j, value: d });
            }
            inv.push(1.0 / d);
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            plans: dst_plans(&mut planner, &dims),
            dims,
            eigenvalues,
            inv,
        })
    }

    pub fn eigenvalues(&self) -> &[Vec<f64>] {
        &self.eigenvalues
    }

    pub fn solve(&self, r: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.inv.len(), r.len())?;
        let mut z = r.to_vec();
        dst1_nd(&mut z, &self.dims, &self.plans);
        z.iter_mut().zip(&self.inv).for_each(|(a, &b)| *a *= b);
        dst1_nd(&mut z, &self.dims, &self.plans);
        Ok(z)
    }
}

impl LinearOperator for TauPreconditioner {
    fn len(&self) -> usize {
        self.inv.len()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.solve(x).expect("operand length")
    }
}
