//! Error-bound calculus for the Gaussian window.
//!
//! All quantities refer to a single time `b`. `σ` is the dimensionless window
//! parameter used by the transform.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::kernel::window_moment;

/// Largest admissible `c = 2·Err/A` for the Gaussian pair `(β, γ)`.
pub fn c_max() -> f64 {
    1.0 - (-0.25f64).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsInput {
    pub eps1: f64,
    pub eps3: f64,
    pub sigma: f64,
    pub mu: f64,
    pub delta: f64,
    pub delta1: f64,
    /// Smallest scale of the analysis range.
    pub a1: f64,
    /// Largest scale of the analysis range.
    pub a2: f64,
    pub amplitudes: Vec<f64>,
    pub if_values: Vec<f64>,
    pub cr_values: Vec<f64>,
    /// Measured ridge scales; `μ/φ'_ℓ` is used where absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_hat: Option<Vec<f64>>,
}

impl BoundsInput {
    pub fn validate(&self) -> Result<()> {
        let k = self.amplitudes.len();
        if k == 0 {
            return param("at least one amplitude is required");
        }
        if self.if_values.len() != k || self.cr_values.len() != k {
            return param(format!(
                "amplitudes, IFs and chirp rates must have equal lengths ({}, {}, {})",
                k,
                self.if_values.len(),
                self.cr_values.len()
            ));
        }
        if let Some(a) = &self.a_hat {
            if a.len() != k || a.iter().any(|&x| !(x > 0.0)) {
                return param("measured scales must be positive, one per component");
            }
        }
        if !(self.eps1 >= 0.0 && self.eps3 >= 0.0) {
            return param("ε₁ and ε₃ must be non-negative");
        }
        if !(self.sigma > 0.0 && self.mu > 0.0) {
            return param("σ and μ must be positive");
        }
        if !(self.a1 > 0.0 && self.a2 >= self.a1) {
            return param(format!("scale range must satisfy 0 < a1 <= a2, got [{}, {}]", self.a1, self.a2));
        }
        if self.amplitudes.iter().any(|&x| !(x > 0.0)) {
            return param("amplitudes must be positive");
        }
        if self.if_values.iter().any(|&x| !(x > 0.0)) {
            return param("instantaneous frequencies must be positive");
        }
        Ok(())
    }

    /// `M = Σ A_k`.
    pub fn total_amplitude(&self) -> f64 {
        self.amplitudes.iter().sum()
    }

    /// `ν = min A_k`.
    pub fn min_amplitude(&self) -> f64 {
        self.amplitudes.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn a_hat(&self, ell: usize) -> f64 {
        self.a_hat.as_ref().map_or(self.mu / self.if_values[ell], |a| a[ell])
    }
}

/// `Π(a) = ε₁I₁aσ + (π/3)ε₃I₃a³σ³`.
pub fn pi_factor(eps1: f64, eps3: f64, sigma: f64, a: f64) -> f64 {
    let s = a * sigma;
    let i1 = (2.0 / PI).sqrt();
    let i3 = 2.0 * i1;
    eps1 * i1 * s + PI / 3.0 * eps3 * i3 * s * s * s
}

/// `M·Π(a)`, the bound on `|U − R|` at scale `a`.
pub fn remainder_bound(input: &BoundsInput, a: f64) -> Result<f64> {
    input.validate()?;
    if !(a > 0.0) {
        return param(format!("scale must be positive, got {a}"));
    }
    Ok(input.total_amplitude() * pi_factor(input.eps1, input.eps3, input.sigma, a))
}

/// `Υ = 1/(√σ·min{(2π²)^{1/4}√△, a₁√(2π△₁σ)})`.
pub fn upsilon_gaussian(input: &BoundsInput) -> Result<f64> {
    if !(input.delta > 0.0 && input.delta1 > 0.0) {
        return Err(Error::DegenerateSeparation(format!(
            "△ = {} and △₁ = {} must both be positive",
            input.delta, input.delta1
        )));
    }
    if !(input.sigma > 0.0 && input.a1 > 0.0) {
        return param("σ and a1 must be positive");
    }
    let s = input.sigma;
    let m = ((2.0 * PI * PI).powf(0.25) * input.delta.sqrt()).min(input.a1 * (2.0 * PI * input.delta1 * s).sqrt());
    Ok(1.0 / (s.sqrt() * m))
}

/// `Π_ℓ = Π((μ + △)/φ'_ℓ)`.
pub fn pi_ell(input: &BoundsInput, ell: usize) -> Result<f64> {
    input.validate()?;
    check_index(input, ell)?;
    let a = (input.mu + input.delta) / input.if_values[ell];
    Ok(pi_factor(input.eps1, input.eps3, input.sigma, a))
}

/// `Err_ℓ = M·Π_ℓ + Σ_{k≠ℓ} A_k·Υ`.
pub fn err_ell(input: &BoundsInput, ell: usize) -> Result<f64> {
    let p = pi_ell(input, ell)?;
    let u = upsilon_gaussian(input)?;
    let others: f64 = input.amplitudes.iter().enumerate().filter(|&(k, _)| k != ell).map(|(_, a)| a).sum();
    Ok(input.total_amplitude() * p + others * u)
}

fn check_index(input: &BoundsInput, ell: usize) -> Result<()> {
    if ell >= input.amplitudes.len() {
        return param(format!("component index {ell} out of range ({} components)", input.amplitudes.len()));
    }
    Ok(())
}

/// `(β⁻¹(1 − c), γ⁻¹(1 − c))` for `β(η) = e^{−2π²η²}` and
/// `γ(λ) = (1 + 4π²λ²)^{−1/4}`.
pub fn gaussian_beta_gamma_inverse(c: f64) -> Result<(f64, f64)> {
    if !(0.0..=c_max()).contains(&c) {
        return Err(Error::Hypothesis(format!("c = {c} outside [0, 1 − e^(−1/4)]")));
    }
    let x = 1.0 - c;
    let beta = (-x.ln()).max(0.0).sqrt() / (PI * 2f64.sqrt());
    let gamma = (1.0 - x.powi(4)).max(0.0).sqrt() / (2.0 * PI * x * x);
    Ok((beta, gamma))
}

/// Per-component bounds. The `bd*` fields are absent when
/// `2·Err_ℓ/A_ℓ > 1 − e^{−1/4}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentBounds {
    pub component: usize,
    pub amplitude: f64,
    pub inst_freq: f64,
    pub chirp_rate: f64,
    pub a_hat: f64,
    pub pi_ell: f64,
    pub err_ell: f64,
    /// `2·Err_ℓ/A_ℓ`.
    pub c: f64,
    pub hypothesis_ok: bool,
    pub bd1: Option<f64>,
    pub bd2: Option<f64>,
    pub bd3: Option<f64>,
    /// `(e^{1/8}/(σπ))·√(Err_ℓ/A_ℓ)`.
    pub bd1_closed: Option<f64>,
    /// `Err + 2e^{1/8}I₁√(Err·A) + πI₂A·γ⁻¹(1 − c)`.
    pub bd3_closed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub total_amplitude: f64,
    pub min_amplitude: f64,
    pub pi0: f64,
    pub upsilon: f64,
    /// `2M(Υ + Π₀) ≤ ν`.
    pub theorem1_condition_ok: bool,
    /// Admissible threshold range `[M(Υ + Π₀), ν − M(Υ + Π₀)]`.
    pub eps_tilde_window: (f64, f64),
    pub components: Vec<ComponentBounds>,
}

impl BoundsReport {
    pub fn all_hypotheses_ok(&self) -> bool {
        self.theorem1_condition_ok && self.components.iter().all(|c| c.hypothesis_ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn error_bounds(input: &BoundsInput) -> Result<BoundsReport> {
    input.validate()?;
    let m = input.total_amplitude();
    let nu = input.min_amplitude();
    let pi0 = pi_factor(input.eps1, input.eps3, input.sigma, input.a2);
    let upsilon = upsilon_gaussian(input)?;
    let floor = m * (upsilon + pi0);
    let i1 = window_moment(1)?;
    let i2 = window_moment(2)?;
    let s = input.sigma;

    let mut components = Vec::with_capacity(input.amplitudes.len());
    for ell in 0..input.amplitudes.len() {
        let amp = input.amplitudes[ell];
        let err = err_ell(input, ell)?;
        let c = 2.0 * err / amp;
        let a_hat = input.a_hat(ell);
        let mut rec = ComponentBounds {
            component: ell + 1,
            amplitude: amp,
            inst_freq: input.if_values[ell],
            chirp_rate: input.cr_values[ell],
            a_hat,
            pi_ell: pi_ell(input, ell)?,
            err_ell: err,
            c,
            hypothesis_ok: false,
            bd1: None,
            bd2: None,
            bd3: None,
            bd1_closed: None,
            bd3_closed: None,
        };
        if let Ok((beta, gamma)) = gaussian_beta_gamma_inverse(c) {
            rec.hypothesis_ok = true;
            rec.bd1 = Some(beta / s);
            rec.bd2 = Some(gamma / (s * s * a_hat * a_hat));
            rec.bd3 = Some(err + 2.0 * PI * i1 * amp * beta + PI * i2 * amp * gamma);
            rec.bd1_closed = Some(0.125f64.exp() / (s * PI) * (err / amp).sqrt());
            rec.bd3_closed = Some(err + 2.0 * 0.125f64.exp() * i1 * (err * amp).sqrt() + PI * i2 * amp * gamma);
        }
        components.push(rec);
    }
    Ok(BoundsReport {
        total_amplitude: m,
        min_amplitude: nu,
        pi0,
        upsilon,
        theorem1_condition_ok: 2.0 * floor <= nu,
        eps_tilde_window: (floor, nu - floor),
        components,
    })
}

/// Whether every pair of components satisfies the separation condition at
/// one instant: relative IF gap `≥ △` or chirp-rate gap `≥ 2△₁`.
pub fn separation_holds(if_values: &[f64], cr_values: &[f64], delta: f64, delta1: f64) -> bool {
    let k = if_values.len();
    (0..k).all(|i| {
        (i + 1..k).all(|j| {
            let rel = (if_values[i] - if_values[j]).abs() / (if_values[i] + if_values[j]);
            rel >= delta || (cr_values[i] - cr_values[j]).abs() >= 2.0 * delta1
        })
    })
}
