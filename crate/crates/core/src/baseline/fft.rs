//! Axis-wise FFT and DST-I on first-index-fastest arrays.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::tensor::PAR_THRESHOLD;

/// Calls `f(line, scratch)` for every 1-D fibre of `data` along `axis`.
pub(crate) fn for_each_line<F>(data: &mut [Complex64], dims: &[usize], axis: usize, f: F)
where
    F: Fn(&mut [Complex64]) + Sync,
{
    let n = dims[axis];
    let left: usize = dims[..axis].iter().product();
    let block = left * n;
    let work = |chunk: &mut [Complex64]| {
        if left == 1 {
            f(chunk);
            return;
        }
        let mut line = vec![Complex64::default(); n];
        for i in 0..left {
            for (k, x) in line.iter_mut().enumerate() {
                *x = chunk[i + k * left];
            }
            f(&mut line);
            for (k, x) in line.iter().enumerate() {
                chunk[i + k * left] = *x;
            }
        }
    };
    if data.len() >= PAR_THRESHOLD {
        data.par_chunks_mut(block).for_each(work);
    } else {
        data.chunks_mut(block).for_each(work);
    }
}

/// Forward and inverse plans for one axis length.
#[derive(Clone)]
pub(crate) struct FftPair {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(planner: &mut FftPlanner<f64>, len: usize) -> Self {
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }
}

/// Unnormalized multidimensional FFT in place.
pub(crate) fn fft_nd(data: &mut [Complex64], dims: &[usize], plans: &[FftPair], inverse: bool) {
    for (axis, pair) in plans.iter().enumerate().take(dims.len()) {
        let plan = if inverse { &pair.inverse } else { &pair.forward };
        for_each_line(data, dims, axis, |line| plan.process(line));
    }
}

/// Orthonormal DST-I along every axis, `S_{jk} = √(2/(n+1)) sin(jkπ/(n+1))`.
/// The transform is symmetric and its own inverse.
pub(crate) fn dst1_nd(data: &mut [Complex64], dims: &[usize], plans: &[Arc<dyn Fft<f64>>]) {
    for (axis, &n) in dims.iter().enumerate() {
        let plan = &plans[axis];
        let m = 2 * (n + 1);
        let norm = (2.0 / (n + 1) as f64).sqrt();
        for_each_line(data, dims, axis, |line| {
            // odd extension [0, x, 0, −rev(x)]: X_k = −2i Σ x_j sin(jkπ/(n+1))
            let mut ext = vec![Complex64::default(); m];
            for (j, &x) in line.iter().enumerate() {
                ext[j + 1] = x;
                ext[m - 1 - j] = -x;
            }
            plan.process(&mut ext);
            let c = Complex64::new(0.0, 0.5 * norm);
            for (k, y) in line.iter_mut().enumerate() {
                *y = c * ext[k + 1];
            }
        });
    }
}

pub(crate) fn dst_plans(planner: &mut FftPlanner<f64>, dims: &[usize]) -> Vec<Arc<dyn Fft<f64>>> {
    dims.iter().map(|&n| planner.plan_fft_forward(2 * (n + 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dst_matches_definition_and_is_involutory() {
        let dims = [5usize, 3];
        let x: Vec<Complex64> = (0..15).map(|j| Complex64::new(j as f64 * 0.3 - 1.0, (j * j) as f64 * 0.01)).collect();
        let mut planner = FftPlanner::new();
        let plans = dst_plans(&mut planner, &dims);
        let mut y = x.clone();
        dst1_nd(&mut y, &dims, &plans);
        let s = |n: usize, j: usize, k: usize| {
            (2.0 / (n + 1) as f64).sqrt() * ((j + 1) as f64 * (k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).sin()
        };
        for k1 in 0..5 {
            for k2 in 0..3 {
                let mut want = Complex64::default();
                for j1 in 0..5 {
                    for j2 in 0..3 {
                        want += x[j1 + 5 * j2] * s(5, j1, k1) * s(3, j2, k2);
                    }
                }
                assert!((y[k1 + 5 * k2] - want).norm() < 1e-13);
            }
        }
        dst1_nd(&mut y, &dims, &plans);
        for (a, b) in y.iter().zip(&x) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn fft_round_trip() {
        let dims = [4usize, 6];
        let x: Vec<Complex64> = (0..24).map(|j| Complex64::new((j as f64).sin(), (j as f64).cos())).collect();
        let mut planner = FftPlanner::new();
        let plans: Vec<FftPair> = dims.iter().map(|&n| FftPair::new(&mut planner, n)).collect();
        let mut y = x.clone();
        fft_nd(&mut y, &dims, &plans, false);
        fft_nd(&mut y, &dims, &plans, true);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / 24.0 - b).norm() < 1e-14);
        }
    }
}
