use num_complex::Complex64;

const TAYLOR_TERMS: usize = 30;

fn inv_factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc / j as f64)
}

/// `φ_ℓ(z)` with `φ_0 = e^z` and `φ_ℓ(z) = (φ_{ℓ-1}(z) - 1/(ℓ-1)!)/z`.
///
/// Inside the unit disc the Taylor series `Σ_k z^k/(k+ℓ)!` is summed; outside
/// the recurrence is run upward from `e^z`.
pub fn phi_scalar(ell: usize, z: Complex64) -> Complex64 {
    if ell == 0 {
        return z.exp();
    }
    if z.norm() <= 1.0 {
        let mut term = Complex64::new(inv_factorial(ell), 0.0);
        let mut sum = term;
        for k in 1..TAYLOR_TERMS {
            term = term * z / (k + ell) as f64;
            sum += term;
            if term.norm() <= f64::EPSILON * 1e-3 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        let mut phi = z.exp();
        for k in 1..=ell {
            phi = (phi - inv_factorial(k - 1)) / z;
        }
        phi
    }
}

/// All of `φ_0(z), …, φ_ℓmax(z)` at once.
pub fn phi_all(ell_max: usize, z: Complex64) -> Vec<Complex64> {
    (0..=ell_max).map(|l| phi_scalar(l, z)).collect()
}
