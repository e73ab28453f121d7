//! Numerical check of the Fourier witness against Bell separability.
//!
//! A separable model would need `p̃ = 2p − 1` to take only the values `±1`,
//! while the Fourier conditions force `p̃(a, λ) = (2|c₁(λ)|/√π)·cos(2a + α(λ))`.
//! On `Λ = [0, 1]` with uniform `ρ` the coefficients `c_{±1}(λ) = √(π/2)·e^{±2πiλ}`
//! meet all the integral conditions, and the resulting `p̃` reaches `√2`.
//! The phase is taken as `c₁ = |c₁|e^{iα}`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_GRID: usize = 100;
const INTEGRAL_TOL: f64 = 1e-8;
const ANGLE_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierWitnessReport {
    /// `max_± |∫ c_{±1} dρ|`.
    pub integral_c1: f64,
    /// `max_± |∫ c_{±1}² dρ|`.
    pub integral_c1_squared: f64,
    /// `∫ |c₁|² dρ`, required to equal `π/2`.
    pub integral_abs_c1_squared: f64,
    /// `max_{a,λ} |p̃(a, λ)|`.
    pub p_tilde_max_abs: f64,
    pub contradiction: bool,
}

/// `c_k(λ) = √(π/2)·e^{2πikλ}` for `k = ±1`.
pub fn witness_coefficient(k: i32, lambda: f64) -> Complex64 {
    Complex64::from_polar(FRAC_PI_2.sqrt(), 2.0 * PI * f64::from(k) * lambda)
}

/// Fourier synthesis `p̃(a, λ) = (c₁e^{2ia} + c₋₁e^{−2ia})/√π`.
pub fn p_tilde(a: f64, lambda: f64) -> f64 {
    let sum = witness_coefficient(1, lambda) * Complex64::from_polar(1.0, 2.0 * a)
        + witness_coefficient(-1, lambda) * Complex64::from_polar(1.0, -2.0 * a);
    sum.re / PI.sqrt()
}

pub fn fourier_witness_check(grid_size: usize) -> Result<FourierWitnessReport> {
    if grid_size < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid_size must be at least {MIN_GRID}, got {grid_size}")));
    }
    // Uniform ρ on [0,1): equal weights at λ_n = n/N. For periodic integrands the
    // rectangle rule is exact up to rounding for frequencies below N.
    let weight = 1.0 / grid_size as f64;
    let mut sums = [Complex64::new(0.0, 0.0); 2];
    let mut sums_sq = [Complex64::new(0.0, 0.0); 2];
    let mut abs_sq = 0.0;
    let mut p_max: f64 = 0.0;

    for n in 0..grid_size {
        let lambda = n as f64 * weight;
        for (slot, k) in [1, -1].into_iter().enumerate() {
            let c = witness_coefficient(k, lambda);
            sums[slot] += c * weight;
            sums_sq[slot] += c * c * weight;
        }
        let c1 = witness_coefficient(1, lambda);
        abs_sq += c1.norm_sqr() * weight;

        // with c₁ = |c₁|e^{iα}, |p̃| peaks where 2a + α ≡ 0 mod π
        let alpha = c1.arg();
        let peak = (-alpha / 2.0).rem_euclid(PI);
        let sampled = (0..ANGLE_SAMPLES).map(|m| PI * m as f64 / ANGLE_SAMPLES as f64);
        for a in sampled.chain(std::iter::once(peak)) {
            p_max = p_max.max(p_tilde(a, lambda).abs());
        }
    }

    let integral_c1 = sums.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let integral_c1_squared = sums_sq.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let contradiction = integral_c1 <= INTEGRAL_TOL
        && integral_c1_squared <= INTEGRAL_TOL
        && (abs_sq - FRAC_PI_2).abs() <= INTEGRAL_TOL
        && p_max > 1.0 + 1e-6;

    Ok(FourierWitnessReport {
        integral_c1,
        integral_c1_squared,
        integral_abs_c1_squared: abs_sq,
        p_tilde_max_abs: p_max,
        contradiction,
    })
}
