use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use super::source::separable_components;
use super::{CustomSource, FcgleParams, GridProblem, Source};
use crate::error::{check_dims, Result};
use crate::kronspec::phi_scalar;
use crate::scalar::{cast_complex, widen_complex, Real};
use crate::tensor::{pointwise_map, CTensor, PAR_THRESHOLD};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

enum Prepared<T: Real> {
    None,
    /// `S(t) = e^{ωt} a + e^{(ω + 2 Re ω)t} b`.
    Separable {
        omega: Complex64,
        a: CTensor<T>,
        b: CTensor<T>,
    },
    Custom(CustomSource, super::Grid),
}

/// Right-hand side data of a problem in working precision `T`.
pub struct Model<T: Real = f64> {
    gamma: f64,
    kappa: f64,
    zeta: f64,
    dims: Vec<usize>,
    source: Prepared<T>,
}

fn phi1_real(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

/// Exact solution of `w' = γw − (κ+iζ)|w|²w` at time `t`.
pub fn exact_flow_scalar(gamma: f64, kappa: f64, zeta: f64, t: f64, w: Complex64) -> Complex64 {
    FlowCoefs::new(gamma, kappa, zeta, t).apply(w)
}

#[derive(Clone, Copy)]
struct FlowCoefs {
    growth: f64,
    s: f64,
    kappa: f64,
    nl: Complex64,
}

impl FlowCoefs {
    fn new(gamma: f64, kappa: f64, zeta: f64, t: f64) -> Self {
        let tphi = t * phi1_real(2.0 * gamma * t);
        // ∫_0^t |w|² = ln(1 + 2κ|w_0|² tφ₁(2γt)) / (2κ), or |w_0|² tφ₁(2γt) when κ = 0
        let s = if kappa > 0.0 { 2.0 * kappa * tphi } else { tphi };
        Self {
            growth: gamma * t,
            s,
            kappa,
            nl: Complex64::new(kappa, zeta),
        }
    }

    #[inline]
    fn apply(&self, w: Complex64) -> Complex64 {
        let rho = w.norm_sqr();
        let integral = if self.kappa > 0.0 {
            (self.s * rho).ln_1p() / (2.0 * self.kappa)
        } else {
            self.s * rho
        };
        w * (self.growth - self.nl * integral).exp()
    }
}

/// Pointwise exact nonlinear flow over time `t`.
pub fn exact_flow<T: Real>(params: &FcgleParams, t: f64, w: &CTensor<T>) -> CTensor<T> {
    let c = FlowCoefs::new(params.gamma, params.kappa, params.zeta, t);
    pointwise_map(w, |z| cast_complex(c.apply(widen_complex(z))))
}

/// `γU − (κ+iζ)|U|²∘U + S(t)`.
pub fn nonlinear_g<T: Real>(problem: &GridProblem, t: f64, u: &CTensor<T>) -> Result<CTensor<T>> {
    Model::new(problem)?.g(t, u)
}

impl<T: Real> Model<T> {
    pub fn new(problem: &GridProblem) -> Result<Self> {
        let p = &problem.params;
        let source = match &problem.source {
            Source::None => Prepared::None,
            Source::Custom(f) => Prepared::Custom(f.clone(), problem.grid.clone()),
            Source::Manufactured { mode, target } => {
                let (a, b) = separable_components(problem, target, *mode)?;
                Prepared::Separable {
                    omega: target.omega,
                    a: a.cast(),
                    b: b.cast(),
                }
            }
        };
        Ok(Self {
            gamma: p.gamma,
            kappa: p.kappa,
            zeta: p.zeta,
            dims: problem.dims().to_vec(),
            source,
        })
    }

    pub fn has_source(&self) -> bool {
        !matches!(self.source, Prepared::None)
    }

    pub fn source_at(&self, t: f64) -> Option<CTensor<T>> {
        match &self.source {
            Prepared::None => None,
            Prepared::Custom(f, grid) => Some(f(t, grid).cast()),
            Prepared::Separable { omega, a, b } => {
                let (ca, cb) = separable_coefs(*omega, t);
                Some(combine2(a, ca, b, cb))
            }
        }
    }

    /// `∫_{t0}^{t1} S(s) ds`: in closed form for separable sources, by
    /// three-point Gauss–Legendre quadrature otherwise.
    pub fn source_integral(&self, t0: f64, t1: f64) -> Option<CTensor<T>> {
        let dt = t1 - t0;
        match &self.source {
            Prepared::None => None,
            Prepared::Separable { omega, a, b } => {
                let w2 = omega + 2.0 * omega.re;
                let ia = dt * (omega * t0).exp() * phi_scalar(1, omega * dt);
                let ib = dt * (w2 * t0).exp() * phi_scalar(1, w2 * dt);
                Some(combine2(a, ia, b, ib))
            }
            Prepared::Custom(f, grid) => {
                let mut acc = CTensor::<T>::zeros(&self.dims);
                for (x, w) in GAUSS3 {
                    let t = t0 + 0.5 * dt * (1.0 + x);
                    let s: CTensor<T> = f(t, grid).cast();
                    acc.axpy(cast_complex(Complex64::new(0.5 * dt * w, 0.0)), &s)
                        .expect("custom source dims");
                }
                Some(acc)
            }
        }
    }

    /// `G(t, U) = γU − (κ+iζ)|U|²∘U + S(t)`.
    pub fn g(&self, t: f64, u: &CTensor<T>) -> Result<CTensor<T>> {
        check_dims(&self.dims, u.dims())?;
        let gamma = T::from_f64(self.gamma);
        let nl: Complex<T> = cast_complex(Complex64::new(self.kappa, self.zeta));
        let local = |z: Complex<T>| z * gamma - nl * (z * z.norm_sqr());
        let mut out = match &self.source {
            Prepared::Separable { omega, a, b } => {
                let (ca, cb) = separable_coefs(*omega, t);
                let (ca, cb): (Complex<T>, Complex<T>) = (cast_complex(ca), cast_complex(cb));
                let f = |((&z, &x), &y): ((&Complex<T>, &Complex<T>), &Complex<T>)| local(z) + ca * x + cb * y;
                let data: Vec<Complex<T>> = if u.len() >= PAR_THRESHOLD {
                    u.as_slice()
                        .par_iter()
                        .zip(a.as_slice().par_iter())
                        .zip(b.as_slice().par_iter())
                        .map(f)
                        .collect()
                } else {
                    u.as_slice().iter().zip(a.as_slice()).zip(b.as_slice()).map(f).collect()
                };
                return CTensor::from_vec(&self.dims, data);
            }
            _ => pointwise_map(u, local),
        };
        if let Prepared::Custom(f, grid) = &self.source {
            out.axpy(Complex::new(T::one(), T::zero()), &f(t, grid).cast())?;
        }
        Ok(out)
    }

    /// Exact flow of `w' = γw − (κ+iζ)|w|²w` over time `t`, pointwise.
    pub fn exact_flow(&self, t: f64, u: &CTensor<T>) -> CTensor<T> {
        let c = FlowCoefs::new(self.gamma, self.kappa, self.zeta, t);
        pointwise_map(u, |z| cast_complex(c.apply(widen_complex(z))))
    }
}

fn separable_coefs(omega: Complex64, t: f64) -> (Complex64, Complex64) {
    let e = (omega * t).exp();
    (e, e * e.norm_sqr())
}

fn combine2<T: Real>(a: &CTensor<T>, ca: Complex64, b: &CTensor<T>, cb: Complex64) -> CTensor<T> {
    crate::tensor::linear_combine(&[(cast_complex(ca), a), (cast_complex(cb), b)])
        .expect("source components share dims")
}
