use std::sync::Arc;

use num_complex::Complex;

use super::Stepper;
use crate::error::Result;
use crate::kronspec::{FilterKind, SpectralCache};
use crate::problem::{GridProblem, Model};
use crate::scalar::Real;
use crate::tensor::{from_linear_fn, linear_combine, CTensor};

fn c<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::from_f64(x), T::zero())
}

fn prepare<T: Real>(problem: &GridProblem) -> Result<(Arc<SpectralCache<T>>, Model<T>)> {
    let cache = SpectralCache::new(problem.kron_operator()?)?;
    Ok((Arc::new(cache), Model::new(problem)?))
}

/// Linearized BDF2, started by one backward–forward Euler step:
///
/// `U_1 = R_τ(U_0 + τG(0, U_0))`,
/// `U_{n+1} = R_{2τ/3}((4/3)U_n − (1/3)U_{n−1} + (2τ/3)G(t_{n+1}, 2U_n − U_{n−1}))`
/// with `R_θ = (I − θK)^{-1}` applied as a spectral filter.
pub struct Lbdf2<T: Real = f64> {
    cache: Arc<SpectralCache<T>>,
    model: Model<T>,
    tau: f64,
    r_euler: Arc<CTensor<T>>,
    r_bdf: Arc<CTensor<T>>,
    prev: Option<CTensor<T>>,
}

impl<T: Real> Lbdf2<T> {
    pub fn new(problem: &GridProblem, tau: f64) -> Result<Self> {
        let (cache, model) = prepare(problem)?;
        Self::with_cache(cache, model, tau)
    }

    pub fn with_cache(cache: Arc<SpectralCache<T>>, model: Model<T>, tau: f64) -> Result<Self> {
        let r_euler = cache.filter(FilterKind::Resolvent, tau)?;
        let r_bdf = cache.filter(FilterKind::Resolvent, 2.0 * tau / 3.0)?;
        Ok(Self {
            cache,
            model,
            tau,
            r_euler,
            r_bdf,
            prev: None,
        })
    }
}

impl<T: Real> Stepper<T> for Lbdf2<T> {
    fn step(&mut self, _n: usize, t: f64, u: &CTensor<T>) -> Result<CTensor<T>> {
        let tau = self.tau;
        let next = match &self.prev {
            None => {
                let g = self.model.g(t, u)?;
                let rhs = linear_combine(&[(c(1.0), u), (c(tau), &g)])?;
                self.cache.apply_filter(&self.r_euler, &rhs)?
            }
            Some(prev) => {
                let extrap = linear_combine(&[(c(2.0), u), (c(-1.0), prev)])?;
                let g = self.model.g(t + tau, &extrap)?;
                let rhs = linear_combine(&[
                    (c(4.0 / 3.0), u),
                    (c(-1.0 / 3.0), prev),
                    (c(2.0 * tau / 3.0), &g),
                ])?;
                self.cache.apply_filter(&self.r_bdf, &rhs)?
            }
        };
        self.prev = Some(u.clone());
        Ok(next)
    }
}

/// Strang splitting `Φ_{τ/2} ∘ e^{τK} ∘ Φ_{τ/2}` with the exact nonlinear
/// flow `Φ`. A source term is split off symmetrically around the linear
/// step: `Φ_{τ/2} ∘ S_{[t+τ/2, t+τ]} ∘ e^{τK} ∘ S_{[t, t+τ/2]} ∘ Φ_{τ/2}`,
/// where `S_{[a,b]}` adds `∫_a^b s`.
pub struct Strang<T: Real = f64> {
    cache: Arc<SpectralCache<T>>,
    model: Model<T>,
    tau: f64,
}

impl<T: Real> Strang<T> {
    pub fn new(problem: &GridProblem, tau: f64) -> Result<Self> {
        let (cache, model) = prepare(problem)?;
        Self::with_cache(cache, model, tau)
    }

    pub fn with_cache(cache: Arc<SpectralCache<T>>, model: Model<T>, tau: f64) -> Result<Self> {
        cache.exp_factors(tau)?;
        Ok(Self { cache, model, tau })
    }
}

impl<T: Real> Stepper<T> for Strang<T> {
    fn step(&mut self, _n: usize, t: f64, u: &CTensor<T>) -> Result<CTensor<T>> {
        let half = self.tau / 2.0;
        let mut v = self.model.exact_flow(half, u);
        if let Some(s) = self.model.source_integral(t, t + half) {
            v.axpy(c(1.0), &s)?;
        }
        let mut w = self.cache.apply_exp(self.tau, &v)?;
        if let Some(s) = self.model.source_integral(t + half, t + self.tau) {
            w.axpy(c(1.0), &s)?;
        }
        Ok(self.model.exact_flow(half, &w))
    }
}

/// Krogstad's fourth-order exponential Runge–Kutta scheme with all
/// φ-function actions realized as spectral filters. Nonlinear stage data is
/// moved to the eigenbasis once per stage.
pub struct Krogstad<T: Real = f64> {
    cache: Arc<SpectralCache<T>>,
    model: Model<T>,
    tau: f64,
    p1_half: Arc<CTensor<T>>,
    p2_half: Arc<CTensor<T>>,
    p1: Arc<CTensor<T>>,
    p2: Arc<CTensor<T>>,
    p3: Arc<CTensor<T>>,
}

impl<T: Real> Krogstad<T> {
    pub fn new(problem: &GridProblem, tau: f64) -> Result<Self> {
        let (cache, model) = prepare(problem)?;
        Self::with_cache(cache, model, tau)
    }

    pub fn with_cache(cache: Arc<SpectralCache<T>>, model: Model<T>, tau: f64) -> Result<Self> {
        let f = |l: u8, th: f64| cache.filter(FilterKind::Phi(l), th);
        Ok(Self {
            p1_half: f(1, tau / 2.0)?,
            p2_half: f(2, tau / 2.0)?,
            p1: f(1, tau)?,
            p2: f(2, tau)?,
            p3: f(3, tau)?,
            cache,
            model,
            tau,
        })
    }

    /// `U + θ Q[Ŵ]`.
    fn advance(&self, u: &CTensor<T>, theta: f64, w_hat: &CTensor<T>) -> Result<CTensor<T>> {
        let mut out = self.cache.back_transform(w_hat)?;
        out.scale(c(theta));
        out.axpy(c(1.0), u)?;
        Ok(out)
    }

    /// `Qᵀ(G(t, U) − G_n)`.
    fn defect(&self, t: f64, u: &CTensor<T>, g_n: &CTensor<T>) -> Result<CTensor<T>> {
        let mut g = self.model.g(t, u)?;
        g.axpy(c(-1.0), g_n)?;
        self.cache.transform(&g)
    }
}

impl<T: Real> Stepper<T> for Krogstad<T> {
    fn step(&mut self, _n: usize, t: f64, u: &CTensor<T>) -> Result<CTensor<T>> {
        let tau = self.tau;
        let dims = u.dims();
        let g_n = self.model.g(t, u)?;
        let mut ku = self.cache.apply_k(u)?;
        ku.axpy(c(1.0), &g_n)?;
        let f_hat = self.cache.transform(&ku)?;
        let (f, p1h, p2h) = (f_hat.as_slice(), self.p1_half.as_slice(), self.p2_half.as_slice());

        let w = from_linear_fn(dims, |j| p1h[j] * f[j]);
        let u2 = self.advance(u, tau / 2.0, &w)?;
        let d2 = self.defect(t + tau / 2.0, &u2, &g_n)?;

        let half = c::<T>(0.5);
        let d2s = d2.as_slice();
        let w = from_linear_fn(dims, |j| half * p1h[j] * f[j] + p2h[j] * d2s[j]);
        let u3 = self.advance(u, tau, &w)?;
        let d3 = self.defect(t + tau / 2.0, &u3, &g_n)?;

        let (p1, p2, p3) = (self.p1.as_slice(), self.p2.as_slice(), self.p3.as_slice());
        let d3s = d3.as_slice();
        let two = c::<T>(2.0);
        let w = from_linear_fn(dims, |j| p1[j] * f[j] + two * p2[j] * d3s[j]);
        let u4 = self.advance(u, tau, &w)?;
        let d4 = self.defect(t + tau, &u4, &g_n)?;

        let d4s = d4.as_slice();
        let four = c::<T>(4.0);
        let w = from_linear_fn(dims, |j| {
            let (a, b, e) = (d2s[j], d3s[j], d4s[j]);
            p1[j] * f[j] + p2[j] * (two * a + two * b - e) + p3[j] * (four * (e - a - b))
        });
        self.advance(u, tau, &w)
    }
}
