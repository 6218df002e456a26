//! Order-d complex tensors and the μ-mode / Tucker kernels.
//!
//! Data is stored first-index-fastest, so element `(j_1, …, j_d)` (1-based)
//! sits at linear position `j_1 + Σ_{μ≥2} n_1⋯n_{μ-1} (j_μ - 1)`. Under this
//! ordering `vec(T ×_1 M_1 ⋯ ×_d M_d) = (M_d ⊗ ⋯ ⊗ M_1) vec(T)`.
//!
//! μ-mode products never permute the tensor. Mode 0 is a single GEMM on the
//! contiguous leading dimension; mode μ > 0 is a loop of GEMMs over the
//! trailing index, each acting on a contiguous `left × n_μ` slab.

mod io;
mod matrix;

pub use io::{read_binary, write_abs_csv, write_binary};
pub use matrix::{CMat, Mat, RMat};

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{check_dims, Error, Result};
use crate::scalar::{cast_complex, widen_complex, Real};

/// Work (in complex entries) below which kernels stay on the calling thread.
pub(crate) const PAR_THRESHOLD: usize = 1 << 15;

/// Order-d complex tensor, first index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct CTensor<T: Real = f64> {
    dims: Vec<usize>,
    data: Vec<Complex<T>>,
}

impl<T: Real> CTensor<T> {
    pub fn zeros(dims: &[usize]) -> Self {
        Self {
            dims: dims.to_vec(),
            data: vec![Complex::zero(); dims.iter().product()],
        }
    }

    pub fn from_elem(dims: &[usize], value: Complex<T>) -> Self {
        Self {
            dims: dims.to_vec(),
            data: vec![value; dims.iter().product()],
        }
    }

    pub fn from_vec(dims: &[usize], data: Vec<Complex<T>>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::DimensionMismatch {
                expected: vec![len],
                found: vec![data.len()],
            });
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }

    /// Builds a tensor from a function of the 0-based multi-index.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> Complex<T>) -> Self {
        let len: usize = dims.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            data.push(f(&idx));
            for (i, n) in idx.iter_mut().zip(dims) {
                *i += 1;
                if *i < *n {
                    break;
                }
                *i = 0;
            }
        }
        Self {
            dims: dims.to_vec(),
            data,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn order(&self) -> usize {
        self.dims.len()
    }
    pub fn len(&self) -> usize {
        self.data.len()
    }
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }
    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    /// Element at a 0-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Option<&Complex<T>> {
        offset(idx, &self.dims).map(|k| &self.data[k])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Euclidean norm of the entries.
    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| widen_complex(*z).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn cast<U: Real>(&self) -> CTensor<U> {
        CTensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|&z| cast_complex(widen_complex(z))).collect(),
        }
    }

    pub fn scale(&mut self, c: Complex<T>) {
        self.data.iter_mut().for_each(|z| *z *= c);
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Complex<T>, other: &CTensor<T>) -> Result<()> {
        check_dims(&self.dims, &other.dims)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }
}

/// 0-based multi-index to 0-based linear offset.
fn offset(idx: &[usize], dims: &[usize]) -> Option<usize> {
    if idx.len() != dims.len() {
        return None;
    }
    let mut k = 0;
    let mut stride = 1;
    for (&i, &n) in idx.iter().zip(dims) {
        if i >= n {
            return None;
        }
        k += i * stride;
        stride *= n;
    }
    Some(k)
}

/// Linear position of a 1-based multi-index, itself 1-based.
pub fn vec_index(multi: &[usize], dims: &[usize]) -> Result<usize> {
    let out_of_range = || Error::IndexOutOfRange {
        index: multi.to_vec(),
        dims: dims.to_vec(),
    };
    if multi.contains(&0) {
        return Err(out_of_range());
    }
    let zero_based: Vec<usize> = multi.iter().map(|j| j - 1).collect();
    offset(&zero_based, dims).map(|k| k + 1).ok_or_else(out_of_range)
}

/// Inverse of [`vec_index`].
pub fn multi_index(j: usize, dims: &[usize]) -> Result<Vec<usize>> {
    let len: usize = dims.iter().product();
    if j == 0 || j > len {
        return Err(Error::IndexOutOfRange {
            index: vec![j],
            dims: dims.to_vec(),
        });
    }
    let mut rest = j - 1;
    Ok(dims
        .iter()
        .map(|&n| {
            let i = rest % n;
            rest /= n;
            i + 1
        })
        .collect())
}

/// Splits `dims` around `mode` into `(left, n_mode, right)` extents.
fn split_dims(dims: &[usize], mode: usize) -> (usize, usize, usize) {
    let left = dims[..mode].iter().product();
    let right = dims[mode + 1..].iter().product();
    (left, dims[mode], right)
}

/// A square matrix that can be multiplied onto the fibers of a tensor.
pub trait ModeOperand<T: Real>: Sync {
    fn side(&self) -> usize;
    fn is_square(&self) -> bool;

    /// `dst(l, :, r) = M · src(l, :, r)` for every `l < left`, `r < right`.
    fn apply_fibers(
        &self,
        src: &[Complex<T>],
        dst: &mut [Complex<T>],
        left: usize,
        right: usize,
    );
}

/// Number of columns per parallel GEMM chunk in the mode-0 product.
fn column_chunk(right: usize, work: usize) -> usize {
    if work < PAR_THRESHOLD {
        return right.max(1);
    }
    let threads = rayon::current_num_threads().max(1);
    right.div_ceil(4 * threads).max(1)
}

impl<T: Real> ModeOperand<T> for Mat<T> {
    fn side(&self) -> usize {
        self.rows()
    }
    fn is_square(&self) -> bool {
        Mat::is_square(self)
    }

    fn apply_fibers(
        &self,
        src: &[Complex<T>],
        dst: &mut [Complex<T>],
        left: usize,
        right: usize,
    ) {
        let n = self.rows();
        let ms = self.as_slice();
        if left == 1 {
            // dst (n x right) = M · src, done separately on the real and
            // imaginary planes (row stride 2 in the interleaved storage).
            let chunk = column_chunk(right, n * right);
            let kernel = |(s, d): (&[Complex<T>], &mut [Complex<T>])| {
                let cols = s.len() / n;
                let sp = s.as_ptr() as *const T;
                let dp = d.as_mut_ptr() as *mut T;
                let cs = 2 * n as isize;
                for plane in 0..2 {
                    // SAFETY: s and d hold n*cols complex values, i.e. 2*n*cols reals.
                    unsafe {
                        T::gemm(
                            n,
                            n,
                            cols,
                            ms.as_ptr(),
                            1,
                            n as isize,
                            sp.add(plane),
                            2,
                            cs,
                            dp.add(plane),
                            2,
                            cs,
                        );
                    }
                }
            };
            if chunk >= right {
                kernel((src, dst));
            } else {
                src.par_chunks(n * chunk)
                    .zip(dst.par_chunks_mut(n * chunk))
                    .for_each(kernel);
            }
        } else {
            // Each slab is a (2*left x n) real matrix; dst_r = src_r · Mᵀ.
            let slab = left * n;
            let kernel = |(s, d): (&[Complex<T>], &mut [Complex<T>])| {
                let rows = 2 * left;
                // SAFETY: s and d each hold `slab` complex values.
                unsafe {
                    T::gemm(
                        rows,
                        n,
                        n,
                        s.as_ptr() as *const T,
                        1,
                        rows as isize,
                        ms.as_ptr(),
                        n as isize,
                        1,
                        d.as_mut_ptr() as *mut T,
                        1,
                        rows as isize,
                    );
                }
            };
            if right > 1 && slab * right >= PAR_THRESHOLD {
                src.par_chunks(slab)
                    .zip(dst.par_chunks_mut(slab))
                    .for_each(kernel);
            } else {
                src.chunks(slab).zip(dst.chunks_mut(slab)).for_each(kernel);
            }
        }
    }
}

impl<T: Real> ModeOperand<T> for Mat<Complex<T>> {
    fn side(&self) -> usize {
        self.rows()
    }
    fn is_square(&self) -> bool {
        Mat::is_square(self)
    }

    fn apply_fibers(
        &self,
        src: &[Complex<T>],
        dst: &mut [Complex<T>],
        left: usize,
        right: usize,
    ) {
        let n = self.rows();
        let ms = self.as_slice();
        if left == 1 {
            let chunk = column_chunk(right, n * right);
            let kernel = |(s, d): (&[Complex<T>], &mut [Complex<T>])| {
                let cols = s.len() / n;
                // SAFETY: s and d hold n*cols complex values.
                unsafe {
                    T::cgemm(
                        n,
                        n,
                        cols,
                        ms.as_ptr(),
                        1,
                        n as isize,
                        s.as_ptr(),
                        1,
                        n as isize,
                        d.as_mut_ptr(),
                        1,
                        n as isize,
                    );
                }
            };
            if chunk >= right {
                kernel((src, dst));
            } else {
                src.par_chunks(n * chunk)
                    .zip(dst.par_chunks_mut(n * chunk))
                    .for_each(kernel);
            }
        } else {
            let slab = left * n;
            let kernel = |(s, d): (&[Complex<T>], &mut [Complex<T>])| {
                // SAFETY: s and d each hold `slab` complex values.
                unsafe {
                    T::cgemm(
                        left,
                        n,
                        n,
                        s.as_ptr(),
                        1,
                        left as isize,
                        ms.as_ptr(),
                        n as isize,
                        1,
                        d.as_mut_ptr(),
                        1,
                        left as isize,
                    );
                }
            };
            if right > 1 && slab * right >= PAR_THRESHOLD {
                src.par_chunks(slab)
                    .zip(dst.par_chunks_mut(slab))
                    .for_each(kernel);
            } else {
                src.chunks(slab).zip(dst.chunks_mut(slab)).for_each(kernel);
            }
        }
    }
}

fn check_operand<T: Real, M: ModeOperand<T>>(dims: &[usize], m: &M, mode: usize) -> Result<()> {
    if mode >= dims.len() {
        return Err(Error::DimensionMismatch {
            expected: vec![dims.len()],
            found: vec![mode],
        });
    }
    if !m.is_square() || m.side() != dims[mode] {
        return Err(Error::DimensionMismatch {
            expected: vec![dims[mode], dims[mode]],
            found: vec![m.side()],
        });
    }
    Ok(())
}

/// Writes `src ×_mode m` into `dst` (which must have the same dims).
pub fn mu_mode_product_into<T: Real, M: ModeOperand<T>>(
    src: &CTensor<T>,
    m: &M,
    mode: usize,
    dst: &mut CTensor<T>,
) -> Result<()> {
    check_operand(&src.dims, m, mode)?;
    check_dims(&src.dims, &dst.dims)?;
    let (left, _, right) = split_dims(&src.dims, mode);
    m.apply_fibers(&src.data, &mut dst.data, left, right);
    Ok(())
}

/// μ-mode product `T ×_mode M` (mode is 0-based): every mode-fiber `f` of
/// `T` is replaced by `M f`.
pub fn mu_mode_product<T: Real, M: ModeOperand<T>>(
    t: &CTensor<T>,
    m: &M,
    mode: usize,
) -> Result<CTensor<T>> {
    let mut out = CTensor::zeros(&t.dims);
    mu_mode_product_into(t, m, mode, &mut out)?;
    Ok(out)
}

/// Tucker operator `T ×_1 M_1 ×_2 ⋯ ×_d M_d`.
pub fn tucker<T: Real, M: ModeOperand<T>>(t: &CTensor<T>, mats: &[M]) -> Result<CTensor<T>> {
    if mats.len() != t.order() {
        return Err(Error::DimensionMismatch {
            expected: vec![t.order()],
            found: vec![mats.len()],
        });
    }
    for (mode, m) in mats.iter().enumerate() {
        check_operand(&t.dims, m, mode)?;
    }
    let mut cur = CTensor::zeros(&t.dims);
    let (left, _, right) = split_dims(&t.dims, 0);
    mats[0].apply_fibers(&t.data, &mut cur.data, left, right);
    let mut next = CTensor::zeros(&t.dims);
    for (mode, m) in mats.iter().enumerate().skip(1) {
        let (left, _, right) = split_dims(&t.dims, mode);
        m.apply_fibers(&cur.data, &mut next.data, left, right);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// Tensor whose `j`-th linear entry is `f(j)`, evaluated in parallel for
/// large sizes.
pub fn from_linear_fn<T: Real, F>(dims: &[usize], f: F) -> CTensor<T>
where
    F: Fn(usize) -> Complex<T> + Sync,
{
    let len: usize = dims.iter().product();
    let data = if len >= PAR_THRESHOLD {
        (0..len).into_par_iter().map(&f).collect()
    } else {
        (0..len).map(&f).collect()
    };
    CTensor {
        dims: dims.to_vec(),
        data,
    }
}

/// Elementwise product.
pub fn hadamard<T: Real>(a: &CTensor<T>, b: &CTensor<T>) -> Result<CTensor<T>> {
    check_dims(&a.dims, &b.dims)?;
    let mut out = a.clone();
    hadamard_assign(&mut out, b)?;
    Ok(out)
}

/// `a ← a ∘ b`.
pub fn hadamard_assign<T: Real>(a: &mut CTensor<T>, b: &CTensor<T>) -> Result<()> {
    check_dims(&a.dims, &b.dims)?;
    if a.len() >= PAR_THRESHOLD {
        a.data
            .par_iter_mut()
            .zip(b.data.par_iter())
            .for_each(|(x, &y)| *x *= y);
    } else {
        a.data.iter_mut().zip(&b.data).for_each(|(x, &y)| *x *= y);
    }
    Ok(())
}

/// Applies `f` to every entry.
pub fn pointwise_map<T: Real, F>(t: &CTensor<T>, f: F) -> CTensor<T>
where
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    let data = if t.len() >= PAR_THRESHOLD {
        t.data.par_iter().map(|&z| f(z)).collect()
    } else {
        t.data.iter().map(|&z| f(z)).collect()
    };
    CTensor {
        dims: t.dims.clone(),
        data,
    }
}

/// `Σ_k c_k T_k`, fused into a single pass.
pub fn linear_combine<T: Real>(terms: &[(Complex<T>, &CTensor<T>)]) -> Result<CTensor<T>> {
    let (_, first) = terms.first().ok_or_else(|| {
        Error::Domain("linear_combine needs at least one operand".into())
    })?;
    for (_, t) in terms {
        check_dims(&first.dims, &t.dims)?;
    }
    let combine = |k: usize| {
        terms
            .iter()
            .fold(Complex::zero(), |acc, (c, t)| acc + *c * t.data[k])
    };
    let len = first.len();
    let data = if len >= PAR_THRESHOLD {
        (0..len).into_par_iter().map(combine).collect()
    } else {
        (0..len).map(combine).collect()
    };
    Ok(CTensor {
        dims: first.dims.clone(),
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(dims: &[usize], rng: &mut ChaCha8Rng) -> CTensor<f64> {
        CTensor::from_fn(dims, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_cmat(n: usize, rng: &mut ChaCha8Rng) -> CMat<f64> {
        Mat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn vec_index_examples() {
        assert_eq!(vec_index(&[1, 1, 1], &[4, 5, 6]).unwrap(), 1);
        assert_eq!(vec_index(&[2, 3, 1], &[4, 5, 6]).unwrap(), 10);
        assert!(vec_index(&[5, 1, 1], &[4, 5, 6]).is_err());
        assert!(vec_index(&[0, 1, 1], &[4, 5, 6]).is_err());
        assert!(multi_index(121, &[4, 5, 6]).is_err());
    }

    #[test]
    fn vec_index_round_trip_exhaustive() {
        let dims = [3, 4, 5];
        for j in 1..=60 {
            let m = multi_index(j, &dims).unwrap();
            assert_eq!(vec_index(&m, &dims).unwrap(), j);
        }
    }

    #[test]
    fn identity_mode_product_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_tensor(&[3, 4, 5], &mut rng);
        for mode in 0..3 {
            let id = Mat::<f64>::identity(t.dims()[mode]);
            assert_eq!(mu_mode_product(&t, &id, mode).unwrap(), t);
        }
    }

    #[test]
    fn mode_products_match_dense_matrix_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_tensor(&[3, 4], &mut rng);
        let m1 = random_cmat(3, &mut rng);
        let m2 = random_cmat(4, &mut rng);
        // mode 1: M·T
        let got = mu_mode_product(&t, &m1, 0).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                let want: Complex64 = (0..3).map(|k| m1[(i, k)] * t.get(&[k, j]).unwrap()).sum();
                assert!((got.get(&[i, j]).unwrap() - want).norm() < 1e-14);
            }
        }
        // mode 2: (M₂ Tᵀ)ᵀ = T M₂ᵀ
        let got = mu_mode_product(&t, &m2, 1).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                let want: Complex64 = (0..4).map(|k| t.get(&[i, k]).unwrap() * m2[(j, k)]).sum();
                assert!((got.get(&[i, j]).unwrap() - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn real_and_complex_operands_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_tensor(&[5, 3, 4], &mut rng);
        for mode in 0..3 {
            let n = t.dims()[mode];
            let r = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let a = mu_mode_product(&t, &r, mode).unwrap();
            let b = mu_mode_product(&t, &r.to_complex(), mode).unwrap();
            assert!(max_diff(a.as_slice(), b.as_slice()) < 1e-14);
        }
    }

    #[test]
    fn hadamard_map_combine_trivia() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_tensor(&[3, 2], &mut rng);
        let ones = CTensor::from_elem(&[3, 2], Complex64::new(1.0, 0.0));
        assert_eq!(hadamard(&t, &ones).unwrap(), t);
        assert_eq!(pointwise_map(&t, |z| z), t);
        let c = linear_combine(&[(Complex64::new(2.0, 0.0), &t), (Complex64::new(-1.0, 0.0), &t)]).unwrap();
        assert!(max_diff(c.as_slice(), t.as_slice()) < 1e-15);
        let other = CTensor::<f64>::zeros(&[2, 3]);
        assert!(hadamard(&t, &other).is_err());
        assert!(linear_combine::<f64>(&[]).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let t = CTensor::<f64>::zeros(&[3, 4]);
        assert!(mu_mode_product(&t, &Mat::<f64>::identity(4), 0).is_err());
        assert!(mu_mode_product(&t, &Mat::<f64>::identity(3), 2).is_err());
        assert!(tucker(&t, &[Mat::<f64>::identity(3)]).is_err());
    }

    #[test]
    fn single_precision_tucker_tracks_double() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_tensor(&[6, 5, 4], &mut rng);
        let mats: Vec<CMat<f64>> = t.dims().iter().map(|&n| random_cmat(n, &mut rng)).collect();
        let want = tucker(&t, &mats).unwrap();
        let mats32: Vec<CMat<f32>> = mats.iter().map(Mat::cast_from_c64).collect();
        let got = tucker(&t.cast::<f32>(), &mats32).unwrap().cast::<f64>();
        let rel = max_diff(got.as_slice(), want.as_slice()) / want.norm();
        assert!(rel < 1e-5, "rel {rel}");
    }
}
