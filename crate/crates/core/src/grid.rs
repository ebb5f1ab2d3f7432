//! The discrete `(b, a, λ)` evaluation lattice.

use crate::error::{param, Error, Result};
use crate::signal::Signal;

/// Evaluation lattice. All three axes are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TscrGrid {
    b_values: Vec<f64>,
    a_values: Vec<f64>,
    lambda_values: Vec<f64>,
}

fn check_axis(name: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::EmptyGrid(name));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return param(format!("{name} contains non-finite values"));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return param(format!("{name} must be strictly increasing"));
    }
    Ok(())
}

impl TscrGrid {
    pub fn new(b_values: Vec<f64>, a_values: Vec<f64>, lambda_values: Vec<f64>) -> Result<Self> {
        check_axis("b values", &b_values)?;
        check_axis("scale values", &a_values)?;
        check_axis("chirp-rate values", &lambda_values)?;
        if a_values[0] <= 0.0 {
            return param("scales must be positive");
        }
        Ok(Self { b_values, a_values, lambda_values })
    }

    /// Grid over every sample instant of `signal`.
    pub fn for_signal(signal: &Signal, spec: &GridSpec) -> Result<Self> {
        let a = dyadic_scales(signal.dt(), spec.voices, spec.mu, spec.if_min, spec.if_max)?;
        let l = uniform(spec.lambda_min, spec.lambda_max, spec.lambda_count)?;
        Self::new(signal.times(), a, l)
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda_values
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.b_values.len(), self.a_values.len(), self.lambda_values.len())
    }

    pub fn len(&self) -> usize {
        let (nb, na, nl) = self.shape();
        nb * na * nl
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the grid value nearest to `x` on a sorted axis.
    pub fn nearest(axis: &[f64], x: f64) -> usize {
        match axis.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= axis.len() => axis.len() - 1,
            Err(i) => {
                if (x - axis[i - 1]) <= (axis[i] - x) {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Spacing of the λ axis around index `i` (one-sided at the ends).
    pub fn lambda_step(&self, i: usize) -> f64 {
        axis_step(&self.lambda_values, i)
    }

    /// IF width `μ/a_i − μ/a_{i+1}` of the scale cell at index `i`.
    pub fn if_step(&self, i: usize, mu: f64) -> f64 {
        let a = &self.a_values;
        if a.len() < 2 {
            return 0.0;
        }
        let j = i.min(a.len() - 2);
        let lo = mu / a[j] - mu / a[j + 1];
        if i > 0 && i < a.len() - 1 {
            lo.max(mu / a[i - 1] - mu / a[i])
        } else {
            lo
        }
    }
}

fn axis_step(v: &[f64], i: usize) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let j = i.min(v.len() - 2);
    let right = v[j + 1] - v[j];
    if i > 0 && i < v.len() - 1 {
        right.max(v[i] - v[i - 1])
    } else {
        right
    }
}

/// Scale lattice `a_j = 2^(j/n_v)·Δt` restricted to `μ/a ∈ [if_min, if_max]`.
pub fn dyadic_scales(dt: f64, voices: u32, mu: f64, if_min: f64, if_max: f64) -> Result<Vec<f64>> {
    if voices == 0 {
        return param("number of voices must be positive");
    }
    if !(if_min > 0.0 && if_max > if_min && mu > 0.0 && dt > 0.0) {
        return param(format!("invalid IF range [{if_min}, {if_max}] or μ = {mu}"));
    }
    let nv = voices as f64;
    let j_lo = (nv * (mu / (if_max * dt)).log2() - 1e-9).ceil() as i64;
    let j_hi = (nv * (mu / (if_min * dt)).log2() + 1e-9).floor() as i64;
    if j_hi < j_lo {
        return Err(Error::EmptyGrid("scale values"));
    }
    Ok((j_lo..=j_hi).map(|j| 2f64.powf(j as f64 / nv) * dt).collect())
}

/// `count` equally spaced values from `min` to `max` inclusive.
pub fn uniform(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    match count {
        0 => Err(Error::EmptyGrid("uniform axis")),
        1 => Ok(vec![min]),
        _ if max <= min => param(format!("axis range [{min}, {max}] is empty")),
        _ => {
            let step = (max - min) / (count - 1) as f64;
            Ok((0..count).map(|i| min + i as f64 * step).collect())
        }
    }
}

/// Parameters of the default lattice over a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub voices: u32,
    pub mu: f64,
    pub if_min: f64,
    pub if_max: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
}

impl GridSpec {
    /// 32 voices spanning 2 Hz to Nyquist, λ ∈ [−128, 128] with 129 points.
    pub fn for_rate(rate: f64) -> Self {
        Self {
            voices: 32,
            mu: 1.0,
            if_min: 2.0,
            if_max: rate / 2.0,
            lambda_min: -128.0,
            lambda_max: 128.0,
            lambda_count: 129,
        }
    }
}
