//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fcgle_core::fracfd::{FdOrder, FracOperator};
use fcgle_core::kronspec::{KronSumOperator, SpectralCache};
use fcgle_core::CTensor;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut impl Rng, dims: &[usize]) -> CTensor<f64> {
    CTensor::from_fn(dims, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn to_vector(t: &CTensor<f64>) -> CVector {
    CVector::from_column_slice(t.as_slice())
}

pub fn rel_err(got: &CVector, want: &CVector) -> f64 {
    (got - want).norm() / want.norm()
}

pub fn tensor_rel_err(got: &CTensor<f64>, want: &CTensor<f64>) -> f64 {
    rel_err(&to_vector(got), &to_vector(want))
}

/// Directions with alpha cycling through (1.2, 1.8, 1.5) on (-1, 1).
pub fn operators(dims: &[usize], fd: FdOrder) -> Vec<FracOperator> {
    let alphas = [1.2, 1.8, 1.5];
    dims.iter()
        .enumerate()
        .map(|(mu, &n)| FracOperator::new(alphas[mu % 3], fd, n, 2.0 / (n as f64 + 1.0)).unwrap())
        .collect()
}

pub fn cache(dims: &[usize], nu: f64, eta: f64) -> SpectralCache<f64> {
    let op = KronSumOperator::new(operators(dims, FdOrder::Second), nu, eta).unwrap();
    SpectralCache::new(op).unwrap()
}

pub fn dense_real(op: &FracOperator) -> DMatrix<f64> {
    let n = op.n();
    let t = op.first_column();
    DMatrix::from_fn(n, n, |i, j| t[i.abs_diff(j)])
}

/// `M_d ⊗ ⋯ ⊗ M_1`, matching first-index-fastest vectorization.
pub fn kron_chain(mats: &[CMatrix]) -> CMatrix {
    let mut acc = CMatrix::identity(1, 1);
    for m in mats {
        acc = m.kronecker(&acc);
    }
    acc
}

/// `L = ⊕_μ D_μ` assembled as a dense real matrix.
pub fn dense_laplacian(ops: &[FracOperator]) -> DMatrix<f64> {
    let dims: Vec<usize> = ops.iter().map(FracOperator::n).collect();
    let n: usize = dims.iter().product();
    let mut l = DMatrix::zeros(n, n);
    for (mu, op) in ops.iter().enumerate() {
        let factors: Vec<CMatrix> = dims
            .iter()
            .enumerate()
            .map(|(nu, &k)| {
                if nu == mu {
                    dense_real(op).map(|x| Complex64::new(x, 0.0))
                } else {
                    CMatrix::identity(k, k)
                }
            })
            .collect();
        l += kron_chain(&factors).map(|z| z.re);
    }
    l
}

/// Dense `K = (ν+iη) ⊕_μ D_μ`.
pub fn dense_k(ops: &[FracOperator], coef: Complex64) -> CMatrix {
    dense_laplacian(ops).map(|x| coef * x)
}

/// `f(θ (ν+iη) L)` through a symmetric eigendecomposition of the assembled `L`.
pub fn dense_matrix_function(
    ops: &[FracOperator],
    coef: Complex64,
    theta: f64,
    f: impl Fn(Complex64) -> Complex64,
) -> CMatrix {
    let eig = dense_laplacian(ops).symmetric_eigen();
    let w = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let fd = CMatrix::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| f(coef * theta * l)),
    ));
    &w * fd * w.transpose()
}

/// `φ_ℓ(A) v` from the exponential of the augmented block matrix
/// `[[A, v, 0], [0, 0, I], [0, 0, 0]]` (Padé scaling-and-squaring).
pub fn dense_phi_action(a: &CMatrix, ell: usize, v: &CVector) -> CVector {
    let n = a.nrows();
    if ell == 0 {
        return a.clone().exp() * v;
    }
    let mut big = CMatrix::zeros(n + ell, n + ell);
    big.view_mut((0, 0), (n, n)).copy_from(a);
    big.view_mut((0, n), (n, 1)).copy_from(v);
    for k in 0..ell - 1 {
        big[(n + k, n + k + 1)] = Complex64::new(1.0, 0.0);
    }
    let e = big.exp();
    e.view((0, n + ell - 1), (n, 1)).into_owned().column(0).into_owned()
}

/// Double-double arithmetic (about 32 significant digits).
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn renorm(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::renorm(s, e + self.lo + o.lo)
    }
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Dd::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }
    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let p = q1 * b;
        let pe = q1.mul_add(b, -p);
        let r = self.add(Dd { hi: -p, lo: -pe });
        let q2 = r.hi / b;
        Dd::renorm(q1, q2)
    }
}

/// `φ_ℓ(z) = Σ_k z^k/(k+ℓ)!` summed in double-double with `terms` terms.
pub fn phi_series_dd(ell: usize, z: Complex64, terms: usize) -> Complex64 {
    let (zr, zi) = (Dd::new(z.re), Dd::new(z.im));
    let mut inv = Dd::new(1.0);
    for k in 2..=ell {
        inv = inv.div_f64(k as f64);
    }
    let (mut tr, mut ti) = (inv, Dd::new(0.0));
    let (mut sr, mut si) = (tr, ti);
    for k in 1..terms {
        let nr = tr.mul(zr).add(ti.mul(zi).neg());
        let ni = tr.mul(zi).add(ti.mul(zr));
        let den = (k + ell) as f64;
        tr = nr.div_f64(den);
        ti = ni.div_f64(den);
        sr = sr.add(tr);
        si = si.add(ti);
    }
    Complex64::new(sr.to_f64(), si.to_f64())
}

/// Adaptive Dormand–Prince 5(4) integration of `y' = f(t, y)` from 0 to `t_end`.
pub fn dopri45(f: impl Fn(f64, Complex64) -> Complex64, y0: Complex64, t_end: f64, tol: f64) -> Complex64 {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let (mut t, mut y) = (0.0, y0);
    let mut h = t_end / 100.0;
    while t < t_end {
        h = h.min(t_end - t);
        let mut k = [Complex64::new(0.0, 0.0); 7];
        for s in 0..7 {
            let ys = (0..s).fold(y, |acc, j| acc + k[j] * (h * A[s][j]));
            k[s] = f(t + C[s] * h, ys);
        }
        let y5 = (0..7).fold(y, |acc, j| acc + k[j] * (h * B5[j]));
        let y4 = (0..7).fold(y, |acc, j| acc + k[j] * (h * B4[j]));
        let err = (y5 - y4).norm() / (tol * (1.0 + y5.norm()));
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    y
}

/// Least-squares slope of `log(err)` against `log(x)`.
pub fn fit_slope(x: &[f64], err: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
