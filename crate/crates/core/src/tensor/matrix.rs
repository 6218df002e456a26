use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type RMat<T> = Mat<T>;
pub type CMat<T> = Mat<Complex<T>>;

impl<S: Copy + Zero> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Wraps column-major data. Panics if the length does not match.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "column-major data length");
        Self { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }
}

impl<S: Copy + Zero + One> Mat<S> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }
}

impl<S> Mat<S> {
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<S> {
        self.data
    }
    pub fn col(&self, j: usize) -> &[S] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i + j * self.rows]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i + j * self.rows]
    }
}

impl<T: Real> Mat<T> {
    /// Promotes a real matrix to complex.
    pub fn to_complex(&self) -> CMat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        }
    }

    /// Rounds an `f64` matrix into precision `T`.
    pub fn cast_from(m: &Mat<f64>) -> Self {
        Mat {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&x| T::from_f64(x)).collect(),
        }
    }

    /// Real matrix-vector product on complex data.
    pub fn mul_complex_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Complex::zero(); self.rows];
        for (j, &vj) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.col(j)) {
                *o += vj * a;
            }
        }
        out
    }
}

impl<T: Real> Mat<Complex<T>> {
    pub fn cast_from_c64(m: &Mat<Complex<f64>>) -> Self {
        Mat {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&z| crate::scalar::cast_complex(z)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Complex::zero(); self.rows];
        for (j, &vj) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.col(j)) {
                *o += vj * a;
            }
        }
        out
    }

    /// Estimates the spectral norm by power iteration on `M^H M`.
    pub fn norm2_estimate(&self, iters: usize) -> T {
        let n = self.cols;
        let mut v: Vec<Complex<T>> = (0..n)
            .map(|i| Complex::new(T::one() + T::from_f64(i as f64 * 1e-3), T::zero()))
            .collect();
        let mut sigma = T::zero();
        for _ in 0..iters {
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            v.iter_mut().for_each(|z| *z /= nv);
            let w = self.mul_vec(&v);
            sigma = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            // v <- M^H w
            v = (0..n)
                .map(|j| {
                    self.col(j)
                        .iter()
                        .zip(&w)
                        .fold(Complex::zero(), |acc, (&a, &b)| acc + a.conj() * b)
                })
                .collect();
        }
        sigma
    }
}
