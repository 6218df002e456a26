//! One-dimensional Riesz fractional finite-difference operators.
//!
//! The centered scheme approximates `∂^α v(x_i) ≈ -(1/h^α) Σ_j g_{|j-i|} v(x_j)`
//! on the `n` inner nodes of `(a, b)`. The resulting matrix is a dense,
//! symmetric, negative-definite Toeplitz matrix, diagonalized once per
//! direction as `D = Q Λ Qᵀ`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::RMat;

/// Accuracy order of the spatial stencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum FdOrder {
    Second,
    Fourth,
}

impl FdOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }
}

impl TryFrom<u8> for FdOrder {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            _ => Err(format!("fd_order must be 2 or 4, got {v}")),
        }
    }
}

impl From<FdOrder> for u8 {
    fn from(o: FdOrder) -> u8 {
        o.as_u8()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fractional order alpha={alpha} outside (1, 2]")))
    }
}

/// Second-order coefficients `g_0 … g_{n-1}` via the stable recurrence
/// `g_k = (1 - (α+1)/(α/2 + k)) g_{k-1}`.
pub fn riesz_coeffs_order2(alpha: f64, n: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let mut g = Vec::with_capacity(n);
    if n == 0 {
        return Ok(g);
    }
    let half = alpha / 2.0 + 1.0;
    let g0 = libm::tgamma(alpha + 1.0) / (libm::tgamma(half) * libm::tgamma(half));
    g.push(g0);
    for k in 1..n {
        let prev = g[k - 1];
        g.push((1.0 - (alpha + 1.0) / (alpha / 2.0 + k as f64)) * prev);
    }
    Ok(g)
}

/// Fourth-order coefficients from Richardson extrapolation of the
/// second-order ones: `ĝ_k = (4 g_k - [k even] g_{k/2} / 2^α) / 3`.
pub fn riesz_coeffs_order4(alpha: f64, n: usize) -> Result<Vec<f64>> {
    let g = riesz_coeffs_order2(alpha, n)?;
    let two_alpha = 2f64.powf(alpha);
    Ok((0..n)
        .map(|k| {
            if k % 2 == 0 {
                (4.0 * g[k] - g[k / 2] / two_alpha) / 3.0
            } else {
                4.0 * g[k] / 3.0
            }
        })
        .collect())
}

/// Riesz derivative approximation along one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct FracOperator {
    alpha: f64,
    fd_order: FdOrder,
    h: f64,
    coeffs: Vec<f64>,
}

impl FracOperator {
    pub fn new(alpha: f64, fd_order: FdOrder, n: usize, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!("grid step h={h} must be positive")));
        }
        if n == 0 {
            return Err(Error::Domain("operator needs at least one inner node".into()));
        }
        let coeffs = match fd_order {
            FdOrder::Second => riesz_coeffs_order2(alpha, n)?,
            FdOrder::Fourth => riesz_coeffs_order4(alpha, n)?,
        };
        Ok(Self {
            alpha,
            fd_order,
            h,
            coeffs,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn fd_order(&self) -> FdOrder {
        self.fd_order
    }
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    /// Unscaled stencil coefficients (`g` or `ĝ`).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
    /// The factor `-1/h^α` multiplying the Toeplitz matrix of coefficients.
    pub fn scale(&self) -> f64 {
        -self.h.powf(-self.alpha)
    }

    /// First column of `D` (which, by symmetry, is also its first row).
    pub fn first_column(&self) -> Vec<f64> {
        let s = self.scale();
        self.coeffs.iter().map(|g| s * g).collect()
    }

    pub fn dense(&self) -> RMat<f64> {
        let t = self.first_column();
        RMat::from_fn(self.n(), self.n(), |i, j| t[i.abs_diff(j)])
    }

    /// `(D v)_i` for a single row.
    pub fn apply_row(&self, i: usize, v: &[f64]) -> f64 {
        self.scale()
            * v.iter()
                .enumerate()
                .map(|(j, vj)| self.coeffs[i.abs_diff(j)] * vj)
                .sum::<f64>()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: vec![self.n()],
                found: vec![v.len()],
            });
        }
        Ok((0..self.n()).map(|i| self.apply_row(i, v)).collect())
    }

    pub fn apply_complex<T: Real>(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let re: Vec<f64> = v.iter().map(|z| z.re.to_f64()).collect();
        let im: Vec<f64> = v.iter().map(|z| z.im.to_f64()).collect();
        let (re, im) = (self.apply(&re)?, self.apply(&im)?);
        Ok(re
            .into_iter()
            .zip(im)
            .map(|(a, b)| Complex::new(T::from_f64(a), T::from_f64(b)))
            .collect())
    }

    /// Symmetric eigendecomposition `D = Q Λ Qᵀ`, eigenvalues ascending.
    pub fn eigendecompose(&self) -> Result<SpectralFactor> {
        let n = self.n();
        let t = self.first_column();
        let dense = faer::Mat::<f64>::from_fn(n, n, |i, j| t[i.abs_diff(j)]);
        let evd = dense
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let u = evd.U();
        let q = RMat::from_fn(n, n, |i, j| u[(i, j)]);
        let s = evd.S().column_vector();
        let lambda: Vec<f64> = (0..n).map(|k| s[k]).collect();
        if let Some(&max) = lambda.iter().max_by(|a, b| a.total_cmp(b)) {
            if max >= 0.0 || !max.is_finite() {
                return Err(Error::Eigensolver(format!(
                    "operator is not negative definite (max eigenvalue {max})"
                )));
            }
        }
        Ok(SpectralFactor { q, lambda })
    }
}

/// Orthogonal eigenvectors and (strictly negative) eigenvalues of a [`FracOperator`].
#[derive(Clone, Debug)]
pub struct SpectralFactor {
    pub q: RMat<f64>,
    pub lambda: Vec<f64>,
}

impl SpectralFactor {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// `Q diag(f(λ_k)) Qᵀ` for a scalar function of the eigenvalue.
    pub fn matrix_function(&self, f: impl Fn(f64) -> Complex<f64>) -> crate::tensor::CMat<f64> {
        let n = self.n();
        let fl: Vec<Complex<f64>> = self.lambda.iter().map(|&l| f(l)).collect();
        crate::tensor::CMat::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::new(0.0, 0.0), |acc, k| {
                acc + fl[k] * (self.q[(i, k)] * self.q[(j, k)])
            })
        })
    }
}

/// Polynomial on `(a, b)` vanishing (with its first derivative) at both ends,
/// stored as expansions in `(x - a)^p` and in `(b - x)^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryVanishingPoly {
    a: f64,
    b: f64,
    monomial: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl BoundaryVanishingPoly {
    /// From monomial coefficients `p(x) = Σ_k c_k x^k`.
    pub fn from_monomials(a: f64, b: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Domain(format!("empty interval ({a}, {b})")));
        }
        let deg = coeffs.len();
        let expand = |center: f64, sign: f64| -> Vec<f64> {
            (0..deg)
                .map(|p| {
                    let s: f64 = (p..deg)
                        .map(|k| coeffs[k] * binomial(k, p) * center.powi((k - p) as i32))
                        .sum();
                    if p % 2 == 1 {
                        sign * s
                    } else {
                        s
                    }
                })
                .collect()
        };
        let mut left = expand(a, 1.0);
        let mut right = expand(b, -1.0);
        let scale = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * a.abs().max(b.abs()).max(1.0).powi(k as i32))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for exp in [&mut left, &mut right] {
            for c in exp.iter_mut().take(2) {
                if c.abs() > 1e-10 * scale {
                    return Err(Error::Unsupported(
                        "polynomial and its derivative must vanish at both interval ends".into(),
                    ));
                }
                *c = 0.0;
            }
        }
        Ok(Self {
            a,
            b,
            monomial: coeffs,
            left,
            right,
        })
    }

    /// `((x - a)(b - x))^k`.
    pub fn bump(a: f64, b: f64, k: u32) -> Result<Self> {
        // (x - a)(b - x) = -ab + (a + b) x - x²
        let base = [-a * b, a + b, -1.0];
        let mut c = vec![1.0];
        for _ in 0..k {
            let mut next = vec![0.0; c.len() + 2];
            for (i, ci) in c.iter().enumerate() {
                for (j, bj) in base.iter().enumerate() {
                    next[i + j] += ci * bj;
                }
            }
            c = next;
        }
        Self::from_monomials(a, b, c)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }
    pub fn left_expansion(&self) -> &[f64] {
        &self.left
    }
    pub fn right_expansion(&self) -> &[f64] {
        &self.right
    }

    /// Value at `x`, zero outside `(a, b)`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        self.monomial.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Riesz derivative of order `alpha ∈ (1, 2)` of a zero-extended
/// boundary-vanishing polynomial, evaluated at `x ∈ (a, b)`.
pub fn riesz_exact_poly(p: &BoundaryVanishingPoly, alpha: f64, x: f64) -> Result<f64> {
    if alpha == 2.0 {
        return Err(Error::Unsupported(
            "analytic Riesz derivative requires alpha < 2".into(),
        ));
    }
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (1, 2)")));
    }
    if !(x > p.a && x < p.b) {
        return Err(Error::Domain(format!("x={x} outside ({}, {})", p.a, p.b)));
    }
    // Riemann-Liouville derivative of (x-a)^k from a: Γ(k+1)/Γ(k+1-α) (x-a)^{k-α}.
    let rl = |coeffs: &[f64], dist: f64| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| {
                let k = k as f64;
                c * libm::tgamma(k + 1.0) / libm::tgamma(k + 1.0 - alpha) * dist.powf(k - alpha)
            })
            .sum()
    };
    let sum = rl(&p.left, x - p.a) + rl(&p.right, p.b - x);
    Ok(-sum / (2.0 * (alpha * std::f64::consts::FRAC_PI_2).cos()))
}
