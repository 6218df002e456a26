use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

/// Floating-point precision a solver runs in.
///
/// Spectral data (eigenvalues, filters) is always computed in `f64` and
/// rounded to `Self` afterwards.
pub trait Real:
    Float + FloatConst + NumAssign + Default + Debug + Display + Sum + Send + Sync + 'static
{
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;

    /// `C = A * B` for real strided matrices (`m x k` times `k x n`).
    ///
    /// # Safety
    /// Pointers and strides must describe valid, non-overlapping storage.
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );

    /// Complex counterpart of [`Real::gemm`].
    ///
    /// # Safety
    /// Same contract as [`Real::gemm`].
    #[allow(clippy::too_many_arguments)]
    unsafe fn cgemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const Complex<Self>,
        rsa: isize,
        csa: isize,
        b: *const Complex<Self>,
        rsb: isize,
        csb: isize,
        c: *mut Complex<Self>,
        rsc: isize,
        csc: isize,
    );
}

impl Real for f64 {
    const NAME: &'static str = "double";

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    unsafe fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const f64,
        rsa: isize,
        csa: isize,
        b: *const f64,
        rsb: isize,
        csb: isize,
        c: *mut f64,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::dgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, 0.0, c, rsc, csc);
    }

    unsafe fn cgemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const Complex<f64>,
        rsa: isize,
        csa: isize,
        b: *const Complex<f64>,
        rsb: isize,
        csb: isize,
        c: *mut Complex<f64>,
        rsc: isize,
        csc: isize,
    ) {
        use matrixmultiply::CGemmOption::Standard;
        // Complex<f64> is repr(C) { re, im }, layout-compatible with [f64; 2].
        matrixmultiply::zgemm(
            Standard,
            Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.cast(),
            rsa,
            csa,
            b.cast(),
            rsb,
            csb,
            [0.0, 0.0],
            c.cast(),
            rsc,
            csc,
        );
    }
}

impl Real for f32 {
    const NAME: &'static str = "single";

    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }

    unsafe fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const f32,
        rsa: isize,
        csa: isize,
        b: *const f32,
        rsb: isize,
        csb: isize,
        c: *mut f32,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::sgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, 0.0, c, rsc, csc);
    }

    unsafe fn cgemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const Complex<f32>,
        rsa: isize,
        csa: isize,
        b: *const Complex<f32>,
        rsb: isize,
        csb: isize,
        c: *mut Complex<f32>,
        rsc: isize,
        csc: isize,
    ) {
        use matrixmultiply::CGemmOption::Standard;
        matrixmultiply::cgemm(
            Standard,
            Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.cast(),
            rsa,
            csa,
            b.cast(),
            rsb,
            csb,
            [0.0, 0.0],
            c.cast(),
            rsc,
            csc,
        );
    }
}

/// Rounds an `f64` complex value into precision `T`.
#[inline]
pub fn cast_complex<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// Widens a complex value in precision `T` to `f64`.
#[inline]
pub fn widen_complex<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}
