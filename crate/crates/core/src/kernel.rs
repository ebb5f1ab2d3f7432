//! The Gaussian window and its closed-form polynomial Fourier transform.
//!
//! The window is the unit-mass Gaussian `g(t) = exp(-t²/2) / √(2π)`. Its
//! polynomial Fourier transform
//!
//! ```text
//! ğ(η, λ) = ∫ g(t) exp(-i2πηt - iπλt²) dt
//!         = (1 + i2πλ)^(-1/2) · exp(-2π²η² / (1 + i2πλ))
//! ```
//!
//! is what the transform reduces to on an exact linear chirp, so it serves both
//! as the model term of the local chirp approximation and as the oracle for the
//! discrete transform.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{param, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Unit-integral Gaussian window.
#[inline]
pub fn gaussian_window(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Closed form of `ğ(η, λ)` for the Gaussian window.
///
/// The square root is the principal branch, which for `1 + i2πλ` (positive real
/// part) lies in the same quadrant as its argument.
pub fn pft_gaussian(eta: f64, lambda: f64) -> Complex64 {
    let z = Complex64::new(1.0, 2.0 * PI * lambda);
    let expo = Complex64::new(-2.0 * PI * PI * eta * eta, 0.0) / z;
    expo.exp() / z.sqrt()
}

/// `|ğ(η, λ)| = f(|η|, |λ|)`, evaluated without complex arithmetic.
pub fn kernel_magnitude(eta: f64, lambda: f64) -> f64 {
    let q = 1.0 + 4.0 * PI * PI * lambda * lambda;
    q.powf(-0.25) * (-2.0 * PI * PI * eta * eta / q).exp()
}

/// Absolute moment `I_n = ∫ |g(t) tⁿ| dt` of the Gaussian window.
///
/// Uses `I_n = 2^(n/2) Γ((n+1)/2) / √π`, which gives `I_1 = √(2/π)`, `I_2 = 1`,
/// `I_3 = 2√(2/π)`.
pub fn window_moment(n: i32) -> Result<f64> {
    if n < 1 {
        return param(format!("window moment order must be >= 1, got {n}"));
    }
    let gamma = libm::tgamma((n + 1) as f64 / 2.0);
    Ok(SQRT_2.powi(n) * gamma / PI.sqrt())
}

/// Relative window mass outside `|t| <= radius` (two-sided Gaussian tail).
pub fn gaussian_tail_mass(radius: f64) -> f64 {
    libm::erfc(radius / SQRT_2)
}
