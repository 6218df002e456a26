//! The Kronecker-sum operator `K = A_d ⊕ ⋯ ⊕ A_1`, `A_μ = (ν+iη) D_μ`, and
//! its spectral matrix functions.
//!
//! With `D_μ = Q_μ Λ_μ Q_μᵀ`, any `f(θK)` acts on a tensor `V` as
//! `Tucker(F ∘ Tucker(V; Q_1ᵀ, …, Q_dᵀ); Q_1, …, Q_d)` where `F = f(θΛ)` holds
//! the scalar evaluations on the eigen-tensor
//! `Λ_{j_1…j_d} = (ν+iη)(λ_{j_1} + ⋯ + λ_{j_d})`.

mod phi;

pub use phi::{phi_all, phi_scalar};

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fracfd::{FracOperator, SpectralFactor};
use crate::scalar::{cast_complex, Real};
use crate::tensor::{
    hadamard_assign, mu_mode_product_into, tucker, CMat, CTensor, RMat, PAR_THRESHOLD,
};

/// `K = ⊕_μ (ν+iη) D_μ` without assembling it.
#[derive(Clone, Debug)]
pub struct KronSumOperator {
    ops: Vec<FracOperator>,
    coef: Complex64,
}

impl KronSumOperator {
    pub fn new(ops: Vec<FracOperator>, nu: f64, eta: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite() && eta.is_finite()) {
            return Err(Error::Domain(format!("need nu > 0 and finite eta, got nu={nu}, eta={eta}")));
        }
        if ops.is_empty() {
            return Err(Error::Domain("Kronecker sum needs at least one direction".into()));
        }
        Ok(Self {
            ops,
            coef: Complex64::new(nu, eta),
        })
    }

    pub fn coef(&self) -> Complex64 {
        self.coef
    }
    pub fn order(&self) -> usize {
        self.ops.len()
    }
    pub fn operators(&self) -> &[FracOperator] {
        &self.ops
    }
    pub fn dims(&self) -> Vec<usize> {
        self.ops.iter().map(FracOperator::n).collect()
    }

    /// `K·U = Σ_μ U ×_μ A_μ`.
    pub fn apply_k<T: Real>(&self, u: &CTensor<T>) -> Result<CTensor<T>> {
        let mats: Vec<RMat<T>> = self.ops.iter().map(|op| RMat::cast_from(&op.dense())).collect();
        kron_sum_apply(&mats, cast_complex(self.coef), u)
    }
}

fn kron_sum_apply<T: Real>(mats: &[RMat<T>], coef: Complex<T>, u: &CTensor<T>) -> Result<CTensor<T>> {
    crate::error::check_dims(&mats.iter().map(RMat::rows).collect::<Vec<_>>(), u.dims())?;
    let mut acc = CTensor::zeros(u.dims());
    mu_mode_product_into(u, &mats[0], 0, &mut acc)?;
    let mut tmp = CTensor::zeros(u.dims());
    for (mode, m) in mats.iter().enumerate().skip(1) {
        mu_mode_product_into(u, m, mode, &mut tmp)?;
        add_assign(&mut acc, &tmp);
    }
    acc.scale(coef);
    Ok(acc)
}

fn add_assign<T: Real>(a: &mut CTensor<T>, b: &CTensor<T>) {
    let (a, b) = (a.as_mut_slice(), b.as_slice());
    if a.len() >= PAR_THRESHOLD {
        a.par_iter_mut().zip(b.par_iter()).for_each(|(x, &y)| *x += y);
    } else {
        a.iter_mut().zip(b).for_each(|(x, &y)| *x += y);
    }
}

/// Named scalar functions whose filters are cached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterKind {
    /// `1/(1 - z)`.
    Resolvent,
    /// `φ_ℓ(z)`; `Phi(0)` is the exponential.
    Phi(u8),
}

impl FilterKind {
    pub fn eval(self, z: Complex64) -> Complex64 {
        match self {
            FilterKind::Resolvent => 1.0 / (1.0 - z),
            FilterKind::Phi(l) => phi_scalar(l as usize, z),
        }
    }
}

type FilterMap<T> = HashMap<(FilterKind, u64), Arc<CTensor<T>>>;
type ExpMap<T> = HashMap<u64, Arc<Vec<CMat<T>>>>;

/// Diagonalizations of every direction plus lazily built, immutable filters.
pub struct SpectralCache<T: Real = f64> {
    op: KronSumOperator,
    factors: Vec<SpectralFactor>,
    q: Vec<RMat<T>>,
    qt: Vec<RMat<T>>,
    d: Vec<RMat<T>>,
    lambda_sum: Vec<f64>,
    filters: Mutex<FilterMap<T>>,
    exps: Mutex<ExpMap<T>>,
}

impl<T: Real> SpectralCache<T> {
    pub fn new(op: KronSumOperator) -> Result<Self> {
        let factors = op
            .ops
            .iter()
            .map(FracOperator::eigendecompose)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_factors(op, factors))
    }

    /// Builds the cache from precomputed factorizations (one per direction).
    pub fn from_factors(op: KronSumOperator, factors: Vec<SpectralFactor>) -> Self {
        let q: Vec<RMat<T>> = factors.iter().map(|f| RMat::cast_from(&f.q)).collect();
        let qt = factors.iter().map(|f| RMat::cast_from(&f.q.transpose())).collect();
        let d = op.ops.iter().map(|o| RMat::cast_from(&o.dense())).collect();
        let lambda_sum = direct_sum(&factors);
        Self {
            op,
            factors,
            q,
            qt,
            d,
            lambda_sum,
            filters: Mutex::new(HashMap::new()),
            exps: Mutex::new(HashMap::new()),
        }
    }

    pub fn operator(&self) -> &KronSumOperator {
        &self.op
    }
    pub fn factors(&self) -> &[SpectralFactor] {
        &self.factors
    }
    pub fn dims(&self) -> Vec<usize> {
        self.op.dims()
    }
    pub fn len(&self) -> usize {
        self.lambda_sum.len()
    }
    pub fn is_empty(&self) -> bool {
        self.lambda_sum.is_empty()
    }

    /// The eigen-tensor `Λ` of `K`, in double precision.
    pub fn eigen_tensor(&self) -> CTensor<f64> {
        let c = self.op.coef;
        let data = self.lambda_sum.iter().map(|&l| c * l).collect();
        CTensor::from_vec(&self.dims(), data).expect("eigen-tensor length")
    }

    pub fn apply_k(&self, u: &CTensor<T>) -> Result<CTensor<T>> {
        kron_sum_apply(&self.d, cast_complex(self.op.coef), u)
    }

    /// `F = f(θΛ)` evaluated in double precision and rounded to `T`.
    pub fn build_filter<F>(&self, f: F, theta: f64) -> Result<CTensor<T>>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let c = self.op.coef * theta;
        let eval = |(k, &l): (usize, &f64)| {
            let z = c * l;
            let v = f(z);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(cast_complex::<T>(v))
            } else {
                Err(Error::FilterPole { index: k, value: z })
            }
        };
        let data: Result<Vec<Complex<T>>> = if self.len() >= PAR_THRESHOLD {
            self.lambda_sum.par_iter().enumerate().map(eval).collect()
        } else {
            self.lambda_sum.iter().enumerate().map(eval).collect()
        };
        CTensor::from_vec(&self.dims(), data?)
    }

    /// Cached filter for a named function; repeated requests share one tensor.
    pub fn filter(&self, kind: FilterKind, theta: f64) -> Result<Arc<CTensor<T>>> {
        let key = (kind, theta.to_bits());
        if let Some(f) = self.filters.lock().unwrap().get(&key) {
            return Ok(Arc::clone(f));
        }
        let built = Arc::new(self.build_filter(|z| kind.eval(z), theta)?);
        let mut map = self.filters.lock().unwrap();
        Ok(Arc::clone(map.entry(key).or_insert(built)))
    }

    /// `Tucker(V; Q_1ᵀ, …, Q_dᵀ)`: coordinates in the eigenbasis.
    pub fn transform(&self, v: &CTensor<T>) -> Result<CTensor<T>> {
        tucker(v, &self.qt)
    }

    /// `Tucker(W; Q_1, …, Q_d)`.
    pub fn back_transform(&self, w: &CTensor<T>) -> Result<CTensor<T>> {
        tucker(w, &self.q)
    }

    /// `f(θK)·V` given the filter `F = f(θΛ)`.
    pub fn apply_filter(&self, filter: &CTensor<T>, v: &CTensor<T>) -> Result<CTensor<T>> {
        let mut w = self.transform(v)?;
        hadamard_assign(&mut w, filter)?;
        self.back_transform(&w)
    }

    /// `exp(θA_μ) = Q_μ diag(e^{θ(ν+iη)λ_k}) Q_μᵀ` in double precision.
    pub fn expm_small(&self, mu: usize, theta: f64) -> Result<CMat<f64>> {
        let f = self.factors.get(mu).ok_or_else(|| Error::IndexOutOfRange {
            index: vec![mu],
            dims: vec![self.factors.len()],
        })?;
        let c = self.op.coef * theta;
        Ok(f.matrix_function(|l| (c * l).exp()))
    }

    /// Cached `[exp(θA_1), …, exp(θA_d)]`.
    pub fn exp_factors(&self, theta: f64) -> Result<Arc<Vec<CMat<T>>>> {
        let key = theta.to_bits();
        if let Some(e) = self.exps.lock().unwrap().get(&key) {
            return Ok(Arc::clone(e));
        }
        let mats = (0..self.op.order())
            .map(|mu| self.expm_small(mu, theta).map(|m| CMat::cast_from_c64(&m)))
            .collect::<Result<Vec<_>>>()?;
        let built = Arc::new(mats);
        let mut map = self.exps.lock().unwrap();
        Ok(Arc::clone(map.entry(key).or_insert(built)))
    }

    /// `exp(θK)·V = Tucker(V; exp(θA_1), …, exp(θA_d))`.
    pub fn apply_exp(&self, theta: f64, v: &CTensor<T>) -> Result<CTensor<T>> {
        let e = self.exp_factors(theta)?;
        tucker(v, e.as_slice())
    }
}

/// `λ_{j_1} + ⋯ + λ_{j_d}` in first-index-fastest order.
fn direct_sum(factors: &[SpectralFactor]) -> Vec<f64> {
    let mut acc = vec![0.0];
    let mut stride = 1;
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.n());
        for &l in &f.lambda {
            next.extend(acc.iter().map(|&a| a + l));
        }
        stride *= f.n();
        acc = next;
    }
    debug_assert_eq!(acc.len(), stride);
    acc
}
