use num_complex::Complex64;
use serde::Serialize;

use super::operators::LinearOperator;
use crate::error::{Error, Result};
use crate::kronspec::phi_scalar;

/// Outcome of one iterative solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveInfo {
    pub iterations: usize,
    pub converged: bool,
    /// Final relative residual in the norm used by the stopping test.
    pub residual: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    y.iter_mut().zip(x).for_each(|(yi, &xi)| *yi += a * xi);
}

fn check(op: &dyn LinearOperator, v: &[Complex64]) -> Result<()> {
    if op.len() == v.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: vec![op.len()],
            found: vec![v.len()],
        })
    }
}

/// Left-preconditioned full GMRES for `A x = b` with `precond ≈ A⁻¹`.
/// Stops when `‖M⁻¹(b − Ax)‖ ≤ tol ‖M⁻¹b‖`; after `maxit` iterations the
/// minimal-residual iterate is returned with `converged = false`.
pub fn pgmres_solve(
    op: &dyn LinearOperator,
    precond: &dyn LinearOperator,
    b: &[Complex64],
    x0: &[Complex64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<Complex64>, SolveInfo)> {
    check(op, b)?;
    check(op, x0)?;
    check(precond, b)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("GMRES tolerance must be positive, got {tol}")));
    }
    let bnorm = norm(&precond.apply(b));
    if bnorm == 0.0 {
        let info = SolveInfo { iterations: 0, converged: true, residual: 0.0 };
        return Ok((vec![Complex64::default(); b.len()], info));
    }
    let mut r = op.apply(x0);
    r.iter_mut().zip(b).for_each(|(ri, &bi)| *ri = bi - *ri);
    let r = precond.apply(&r);
    let beta = norm(&r);
    if beta <= tol * bnorm {
        let info = SolveInfo { iterations: 0, converged: true, residual: beta / bnorm };
        return Ok((x0.to_vec(), info));
    }

    let mut basis: Vec<Vec<Complex64>> = vec![r.iter().map(|z| z / beta).collect()];
    // columns of the Hessenberg matrix, already rotated
    let mut h: Vec<Vec<Complex64>> = Vec::with_capacity(maxit);
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(maxit);
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut k = 0;
    let mut res = beta;
    while k < maxit {
        let mut w = precond.apply(&op.apply(&basis[k]));
        let mut col = vec![Complex64::default(); k + 2];
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                col[i] += c;
                axpy(&mut w, -c, v);
            }
        }
        let hnext = norm(&w);
        col[k + 1] = Complex64::new(hnext, 0.0);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s.conj() * a + c * b;
        }
        let (a, bb) = (col[k], col[k + 1]);
        let rho = (a.norm_sqr() + bb.norm_sqr()).sqrt();
        let (c, s) = if a.norm() == 0.0 {
            (0.0, Complex64::new(1.0, 0.0))
        } else {
            let ph = a / a.norm();
            (a.norm() / rho, ph * bb.conj() / rho)
        };
        col[k] = c * a + s * bb;
        col[k + 1] = Complex64::default();
        rot.push((c, s));
        let gk = g[k];
        g[k] = c * gk;
        g.push(-s.conj() * gk);
        h.push(col);
        k += 1;
        res = g[k].norm();
        if res <= tol * bnorm || hnext <= 1e-14 * beta {
            break;
        }
        basis.push(w.iter().map(|z| z / hnext).collect());
    }
    // back substitution on the rotated triangle
    let mut y = vec![Complex64::default(); k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for j in i + 1..k {
            acc -= h[j][i] * y[j];
        }
        y[i] = acc / h[i][i];
    }
    let mut x = x0.to_vec();
    for (yi, v) in y.iter().zip(&basis) {
        axpy(&mut x, *yi, v);
    }
    let info = SolveInfo {
        iterations: k,
        converged: res <= tol * bnorm,
        residual: res / bnorm,
    };
    Ok((x, info))
}

/// Preconditioned conjugate gradients for a Hermitian positive definite `A`
/// and complex right-hand side. Stops when `‖b − Ax‖ ≤ tol ‖b‖`.
pub fn pcg_solve(
    op: &dyn LinearOperator,
    precond: &dyn LinearOperator,
    b: &[Complex64],
    x0: Option<&[Complex64]>,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<Complex64>, SolveInfo)> {
    check(op, b)?;
    check(precond, b)?;
    let bnorm = norm(b);
    if bnorm == 0.0 {
        let info = SolveInfo { iterations: 0, converged: true, residual: 0.0 };
        return Ok((vec![Complex64::default(); b.len()], info));
    }
    let (mut x, mut r) = match x0 {
        Some(x0) => {
            check(op, x0)?;
            let mut r = op.apply(x0);
            r.iter_mut().zip(b).for_each(|(ri, &bi)| *ri = bi - *ri);
            (x0.to_vec(), r)
        }
        None => (vec![Complex64::default(); b.len()], b.to_vec()),
    };
    let mut res = norm(&r);
    let mut k = 0;
    if res <= tol * bnorm {
        return Ok((x, SolveInfo { iterations: 0, converged: true, residual: res / bnorm }));
    }
    let mut z = precond.apply(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z).re;
    while k < maxit {
        let q = op.apply(&p);
        let pq = dot(&p, &q).re;
        if !(pq > 0.0) {
            break;
        }
        let a = rz / pq;
        axpy(&mut x, Complex64::new(a, 0.0), &p);
        axpy(&mut r, Complex64::new(-a, 0.0), &q);
        k += 1;
        res = norm(&r);
        if res <= tol * bnorm {
            break;
        }
        z = precond.apply(&r);
        let rz_new = dot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, &zi)| *pi = zi + beta * *pi);
    }
    let info = SolveInfo {
        iterations: k,
        converged: res <= tol * bnorm,
        residual: res / bnorm,
    };
    Ok((x, info))
}

/// Lanczos decomposition `(I − ξA)⁻¹ V_m ≈ V_m T_m` for a real symmetric
/// negative definite `A`, started from a given vector, with the inner
/// solves done by PCG.
pub struct LanczosBasis {
    vnorm: f64,
    basis: Vec<Vec<Complex64>>,
    /// Eigenvalues of `T_m`.
    mu: Vec<f64>,
    /// First components of the orthonormal eigenvectors of `T_m`, and the
    /// eigenvectors themselves (column-major, `m × m`).
    w: Vec<f64>,
    xi: f64,
    pub inner: Vec<SolveInfo>,
}

impl LanczosBasis {
    /// `shifted` applies `I − ξA`; `precond` approximates its inverse.
    pub fn build(
        shifted: &dyn LinearOperator,
        precond: &dyn LinearOperator,
        xi: f64,
        v: &[Complex64],
        m: usize,
        tol: f64,
        maxit: usize,
    ) -> Result<Self> {
        check(shifted, v)?;
        if m == 0 || !(xi > 0.0) {
            return Err(Error::Domain(format!("Lanczos needs m ≥ 1 and ξ > 0, got m={m}, ξ={xi}")));
        }
        let vnorm = norm(v);
        if vnorm == 0.0 {
            return Ok(Self { vnorm, basis: Vec::new(), mu: Vec::new(), w: Vec::new(), xi, inner: Vec::new() });
        }
        let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|z| z / vnorm).collect()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut inner = Vec::with_capacity(m);
        for j in 0..m {
            let (mut w, info) = pcg_solve(shifted, precond, &basis[j], None, tol, maxit)?;
            inner.push(info);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            axpy(&mut w, Complex64::new(-a, 0.0), &basis[j]);
            if j > 0 {
                axpy(&mut w, Complex64::new(-beta[j - 1], 0.0), &basis[j - 1]);
            }
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    axpy(&mut w, -c, q);
                }
            }
            if j + 1 == m {
                break;
            }
            let b = norm(&w);
            if b <= 1e-12 * a.abs().max(1e-300) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
        let k = alpha.len();
        basis.truncate(k);
        let t = faer::Mat::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i.abs_diff(j) == 1 {
                beta[i.min(j)]
            } else {
                0.0
            }
        });
        let evd = t
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let mu = (0..k).map(|i| s[i]).collect();
        let mut w = Vec::with_capacity(k * k);
        for c in 0..k {
            for r in 0..k {
                w.push(u[(r, c)]);
            }
        }
        Ok(Self { vnorm, basis, mu, w, xi, inner })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ritz_values(&self) -> &[f64] {
        &self.mu
    }

    /// `‖v‖ V_m φ_ℓ((θ/ξ) c (I − T_m⁻¹)) e_1 ≈ φ_ℓ(θ c A) v`.
    pub fn phi_action(&self, ell: usize, theta: f64, coef: Complex64) -> Vec<Complex64> {
        let len = self.basis.first().map_or(0, Vec::len);
        let k = self.dim();
        if k == 0 {
            return Vec::new();
        }
        let mut y = vec![Complex64::default(); k];
        for (i, &mu) in self.mu.iter().enumerate() {
            let col = &self.w[i * k..(i + 1) * k];
            let f = phi_scalar(ell, (theta / self.xi) * coef * (1.0 - 1.0 / mu)) * col[0];
            for (yr, &wr) in y.iter_mut().zip(col) {
                *yr += f * wr;
            }
        }
        let mut out = vec![Complex64::default(); len];
        for (yr, v) in y.iter().zip(&self.basis) {
            axpy(&mut out, yr * self.vnorm, v);
        }
        out
    }
}

/// One-shot shift-and-invert Lanczos approximation of `φ_ℓ(θ c A) v`.
#[allow(clippy::too_many_arguments)]
pub fn si_lanczos_phi(
    shifted: &dyn LinearOperator,
    precond: &dyn LinearOperator,
    xi: f64,
    ell: usize,
    theta: f64,
    coef: Complex64,
    v: &[Complex64],
    m: usize,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<Complex64>, Vec<SolveInfo>)> {
    let basis = LanczosBasis::build(shifted, precond, xi, v, m, tol, maxit)?;
    let out = if basis.dim() == 0 { vec![Complex64::default(); v.len()] } else { basis.phi_action(ell, theta, coef) };
    Ok((out, basis.inner))
}
