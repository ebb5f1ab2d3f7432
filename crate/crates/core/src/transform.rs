//! Discrete evaluation of the adaptive time-scale-chirp_rate transform
//!
//! ```text
//! U(a, b, λ) = ∫ x(b + at) (1/σ(b)) g(t/σ(b)) e^{−i2πμt − iπλa²t²} dt
//! ```
//!
//! The integral is evaluated as a Riemann sum over the signal's own samples.
//! With `t = (t_n − b)/a` every term is taken at a sample instant:
//!
//! ```text
//! U ≈ Σ_n x_n · Δt/(aσ) · g(d_n/(aσ)) · e^{−i2πμ d_n/a} · e^{−iπλ d_n²},   d_n = t_n − b
//! ```
//!
//! so the chirp factor is independent of the scale. For every `b` the factors
//! `e^{−iπλ d_n²}` are tabulated once and each scale becomes a short
//! vector-times-matrix product over the λ axis.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::grid::TscrGrid;
use crate::kernel::{gaussian_window, pft_gaussian};
use crate::signal::{ComponentTruth, Form, GroundTruth, Signal};

/// Time-varying window parameter `σ(b)` (dimensionless).
#[derive(Clone)]
pub enum Sigma {
    Constant(f64),
    /// Piecewise-linear through `(b, σ)` knots, clamped outside.
    Piecewise(Vec<(f64, f64)>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Sigma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sigma::Constant(s) => f.debug_tuple("Constant").field(s).finish(),
            Sigma::Piecewise(k) => f.debug_tuple("Piecewise").field(k).finish(),
            Sigma::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl Sigma {
    pub fn at(&self, b: f64) -> f64 {
        match self {
            Sigma::Constant(s) => *s,
            Sigma::Function(f) => f(b),
            Sigma::Piecewise(knots) => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if b <= first.0 {
                    return first.1;
                }
                if b >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|k| k.0 <= b);
                let (b0, s0) = knots[i - 1];
                let (b1, s1) = knots[i];
                s0 + (s1 - s0) * (b - b0) / (b1 - b0)
            }
        }
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> Sigma {
        match self {
            Sigma::Constant(s) => Sigma::Constant(s * factor),
            Sigma::Piecewise(k) => Sigma::Piecewise(k.iter().map(|&(b, s)| (b, s * factor)).collect()),
            Sigma::Function(f) => {
                let f = f.clone();
                Sigma::Function(Arc::new(move |b| f(b) * factor))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Sigma::Constant(s) if !(*s > 0.0 && s.is_finite()) => param(format!("σ must be positive, got {s}")),
            Sigma::Piecewise(k) => {
                if k.is_empty() {
                    return param("σ table is empty");
                }
                if k.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return param("σ table knots must be strictly increasing in b");
                }
                if k.iter().any(|&(_, s)| !(s > 0.0 && s.is_finite())) {
                    return param("σ table values must be positive");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Gaussian analysis window: `σ(b)`, the modulation `μ`, truncation radius in
/// units of the window's standard deviation and the optional edge
/// renormalization.
#[derive(Debug, Clone)]
pub struct WindowSpec {
    pub sigma: Sigma,
    pub mu: f64,
    pub truncation_radius: f64,
    /// Divide each sum by the in-support window mass.
    pub renormalize: bool,
}

impl WindowSpec {
    pub fn new(sigma: Sigma) -> Self {
        Self { sigma, mu: 1.0, truncation_radius: 5.0, renormalize: false }
    }

    pub fn constant(sigma: f64) -> Self {
        Self::new(Sigma::Constant(sigma))
    }

    /// Window given as the standard deviation in seconds at the unit sample
    /// scale `a = Δt`; the dimensionless parameter is `σ·rate`.
    pub fn from_sample_scale_seconds(sigma_s: f64, rate: f64) -> Self {
        Self::constant(sigma_s * rate)
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_truncation(mut self, radius: f64) -> Self {
        self.truncation_radius = radius;
        self
    }

    pub fn with_renormalization(mut self, on: bool) -> Self {
        self.renormalize = on;
        self
    }

    pub fn sigma_at(&self, b: f64) -> Result<f64> {
        let s = self.sigma.at(b);
        if !(s > 0.0 && s.is_finite()) {
            return param(format!("σ({b}) = {s} is not positive"));
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.sigma.validate()?;
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return param(format!("μ must be positive, got {}", self.mu));
        }
        if !(self.truncation_radius >= 3.0) {
            return param(format!("truncation radius must be >= 3, got {}", self.truncation_radius));
        }
        Ok(())
    }
}

/// Transform values over a grid, stored `[b][a][λ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TscrVolume {
    grid: TscrGrid,
    mu: f64,
    values: Vec<Complex64>,
}

impl TscrVolume {
    pub fn from_parts(grid: TscrGrid, mu: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return param(format!("volume has {} values, grid needs {}", values.len(), grid.len()));
        }
        Ok(Self { grid, mu, values })
    }

    pub fn grid(&self) -> &TscrGrid {
        &self.grid
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, ib: usize, ia: usize, il: usize) -> Complex64 {
        let (_, na, nl) = self.grid.shape();
        self.values[(ib * na + ia) * nl + il]
    }

    /// The `(a, λ)` plane at one `b`, row-major in `a`.
    pub fn plane(&self, ib: usize) -> &[Complex64] {
        let (_, na, nl) = self.grid.shape();
        &self.values[ib * na * nl..(ib + 1) * na * nl]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every value by `alpha`.
    pub fn scaled(&self, alpha: f64) -> TscrVolume {
        TscrVolume {
            values: self.values.iter().map(|v| v * alpha).collect(),
            ..self.clone()
        }
    }

    /// Writes `b,a,lambda,re,im,abs` rows for the requested slice.
    pub fn write_slice_csv<W: Write>(&self, slice: SliceAxis, mut out: W) -> Result<()> {
        let g = &self.grid;
        let (nb, na, nl) = g.shape();
        let (bs, as_, ls) = match slice {
            SliceAxis::B(b) => {
                let i = TscrGrid::nearest(g.b_values(), b);
                (i..i + 1, 0..na, 0..nl)
            }
            SliceAxis::A(a) => {
                let i = TscrGrid::nearest(g.a_values(), a);
                (0..nb, i..i + 1, 0..nl)
            }
            SliceAxis::Lambda(l) => {
                let i = TscrGrid::nearest(g.lambda_values(), l);
                (0..nb, 0..na, i..i + 1)
            }
        };
        writeln!(out, "b,a,lambda,re,im,abs")?;
        for ib in bs {
            for ia in as_.clone() {
                for il in ls.clone() {
                    let v = self.get(ib, ia, il);
                    writeln!(
                        out,
                        "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
                        g.b_values()[ib],
                        g.a_values()[ia],
                        g.lambda_values()[il],
                        v.re,
                        v.im,
                        v.norm()
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Little-endian dump: three `u64` axis lengths, the `b`, `a` and `λ` axes
    /// as `f64`, then `(re, im)` pairs in `[b][a][λ]` order.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let (nb, na, nl) = self.grid.shape();
        for n in [nb, na, nl] {
            out.write_all(&(n as u64).to_le_bytes())?;
        }
        let axes = [self.grid.b_values(), self.grid.a_values(), self.grid.lambda_values()];
        for x in axes.into_iter().flatten() {
            out.write_all(&x.to_le_bytes())?;
        }
        for v in &self.values {
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump written by [`write_binary`](Self::write_binary). The dump
    /// does not record `μ`, so the caller supplies it.
    pub fn read_binary<R: Read>(mut input: R, mu: f64) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |input: &mut R| -> Result<[u8; 8]> {
            input.read_exact(&mut word)?;
            Ok(word)
        };
        let mut dims = [0usize; 3];
        for d in &mut dims {
            let n = u64::from_le_bytes(next(&mut input)?);
            *d = usize::try_from(n).map_err(|_| Error::Format("axis length overflows".into()))?;
        }
        let mut axis = |len: usize, input: &mut R| -> Result<Vec<f64>> {
            (0..len).map(|_| Ok(f64::from_le_bytes(next(input)?))).collect()
        };
        let b = axis(dims[0], &mut input)?;
        let a = axis(dims[1], &mut input)?;
        let l = axis(dims[2], &mut input)?;
        let grid = TscrGrid::new(b, a, l)?;
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = f64::from_le_bytes(next(&mut input)?);
            let im = f64::from_le_bytes(next(&mut input)?);
            values.push(Complex64::new(re, im));
        }
        Self::from_parts(grid, mu, values)
    }
}

/// A slice through the volume, located at the grid value nearest the argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SliceAxis {
    B(f64),
    A(f64),
    Lambda(f64),
}

// Tabulated chirp factors e^{−iπλd²}, one row (over λ) per time offset.
struct ChirpTable {
    nl: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ChirpTable {
    fn new(offsets: impl Iterator<Item = f64>, lambdas: &[f64]) -> Self {
        let nl = lambdas.len();
        let mut re = Vec::new();
        let mut im = Vec::new();
        for d in offsets {
            let d2 = d * d;
            for &l in lambdas {
                let (s, c) = (-PI * l * d2).sin_cos();
                re.push(c);
                im.push(s);
            }
        }
        Self { nl, re, im }
    }

    #[inline]
    fn row(&self, i: usize) -> (&[f64], &[f64]) {
        let r = i * self.nl..(i + 1) * self.nl;
        (&self.re[r.clone()], &self.im[r])
    }
}

// Sample index range [lo, hi] with |t_n − b| <= half_width, clipped to the signal.
fn support(signal: &Signal, b: f64, half_width: f64) -> Option<(usize, usize)> {
    let fs = signal.sample_rate();
    let t0 = signal.start_time();
    let lo = ((b - half_width - t0) * fs - 1e-9).ceil().max(0.0);
    let hi = ((b + half_width - t0) * fs + 1e-9).floor().min((signal.len() - 1) as f64);
    if hi < lo {
        None
    } else {
        Some((lo as usize, hi as usize))
    }
}

// Weight of sample n for the node (a, b): Δt/(aσ) g(d/(aσ)) e^{−i2πμd/a}.
#[inline]
fn weight(d: f64, a: f64, sigma: f64, mu: f64, dt: f64) -> (f64, Complex64) {
    let w = a * sigma;
    let g = dt / w * gaussian_window(d / w);
    (g, Complex64::from_polar(g, -2.0 * PI * mu * d / a))
}

fn check_signal(signal: &Signal) -> Result<()> {
    if let Some(i) = signal.samples().iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

/// Evaluates the transform on every node of `grid`.
///
/// Samples outside the signal contribute zero. Each node is accumulated in
/// sample order, so the result does not depend on the number of worker
/// threads.
pub fn compute_tscr(signal: &Signal, grid: &TscrGrid, window: &WindowSpec) -> Result<TscrVolume> {
    window.validate()?;
    check_signal(signal)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid("grid"));
    }
    let (nb, na, nl) = grid.shape();
    let sigmas: Vec<f64> = grid.b_values().iter().map(|&b| window.sigma_at(b)).collect::<Result<_>>()?;

    let fs = signal.sample_rate();
    let dt = signal.dt();
    let t0 = signal.start_time();
    let lambdas = grid.lambda_values();
    // Offsets k·Δt for nodes that sit on a sample instant.
    let on_sample = |b: f64| {
        let pos = (b - t0) * fs;
        ((pos - pos.round()).abs() < 1e-9).then(|| pos.round() as i64)
    };
    let shared = if grid.b_values().iter().any(|&b| on_sample(b).is_some()) {
        Some(ChirpTable::new((0..signal.len()).map(|k| k as f64 * dt), lambdas))
    } else {
        None
    };

    let mut values = vec![Complex64::new(0.0, 0.0); nb * na * nl];
    values.par_chunks_mut(na * nl).enumerate().for_each(|(ib, plane)| {
        let b = grid.b_values()[ib];
        let sigma = sigmas[ib];
        let a_max = grid.a_values()[na - 1];
        let Some((lo_all, hi_all)) = support(signal, b, window.truncation_radius * a_max * sigma) else {
            return;
        };
        let centre = on_sample(b);
        let local;
        let (table, row_of): (&ChirpTable, Box<dyn Fn(usize) -> usize>) = match (centre, shared.as_ref()) {
            (Some(m), Some(t)) => (t, Box::new(move |n: usize| (n as i64 - m).unsigned_abs() as usize)),
            _ => {
                local = ChirpTable::new((lo_all..=hi_all).map(|n| signal.time(n) - b), lambdas);
                (&local, Box::new(move |n: usize| n - lo_all))
            }
        };

        let mut acc_re = vec![0.0; nl];
        let mut acc_im = vec![0.0; nl];
        for (ia, &a) in grid.a_values().iter().enumerate() {
            let Some((lo, hi)) = support(signal, b, window.truncation_radius * a * sigma) else {
                continue;
            };
            acc_re.iter_mut().for_each(|v| *v = 0.0);
            acc_im.iter_mut().for_each(|v| *v = 0.0);
            let mut mass = 0.0;
            for n in lo..=hi {
                let d = signal.time(n) - b;
                let (g, k) = weight(d, a, sigma, window.mu, dt);
                mass += g;
                let w = signal.samples()[n] * k;
                let (cr, ci) = table.row(row_of(n));
                for l in 0..nl {
                    acc_re[l] += w.re * cr[l] - w.im * ci[l];
                    acc_im[l] += w.re * ci[l] + w.im * cr[l];
                }
            }
            let norm = if window.renormalize && mass > 0.0 { 1.0 / mass } else { 1.0 };
            let row = &mut plane[ia * nl..(ia + 1) * nl];
            for l in 0..nl {
                row[l] = Complex64::new(acc_re[l] * norm, acc_im[l] * norm);
            }
        }
    });

    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return param("transform produced non-finite values");
    }
    TscrVolume::from_parts(grid.clone(), window.mu, values)
}

/// Evaluates the transform at a single `(a, b, λ)` by direct summation.
pub fn evaluate_node(signal: &Signal, window: &WindowSpec, a: f64, b: f64, lambda: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return param(format!("scale must be positive, got {a}"));
    }
    let sigma = window.sigma_at(b)?;
    let Some((lo, hi)) = support(signal, b, window.truncation_radius * a * sigma) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for n in lo..=hi {
        let d = signal.time(n) - b;
        let (g, k) = weight(d, a, sigma, window.mu, signal.dt());
        mass += g;
        acc += signal.samples()[n] * k * Complex64::from_polar(1.0, -PI * lambda * d * d);
    }
    if window.renormalize && mass > 0.0 {
        acc /= mass;
    }
    Ok(acc)
}

/// The `λ = 0` plane (the adaptive continuous wavelet-like transform).
#[derive(Debug, Clone, PartialEq)]
pub struct CwltSlice {
    /// The λ grid value used (nearest to 0).
    pub lambda: f64,
    pub b_values: Vec<f64>,
    pub a_values: Vec<f64>,
    /// `[b][a]` row-major.
    pub values: Vec<Complex64>,
}

impl CwltSlice {
    pub fn get(&self, ib: usize, ia: usize) -> Complex64 {
        self.values[ib * self.a_values.len() + ia]
    }
}

pub fn cwlt_slice(volume: &TscrVolume) -> Result<CwltSlice> {
    let g = volume.grid();
    let l = g.lambda_values();
    if l[0] > 0.0 || l[l.len() - 1] < 0.0 {
        return param(format!("λ range [{}, {}] excludes 0", l[0], l[l.len() - 1]));
    }
    let il = TscrGrid::nearest(l, 0.0);
    let (nb, na, _) = g.shape();
    let values = (0..nb).flat_map(|ib| (0..na).map(move |ia| (ib, ia))).map(|(ib, ia)| volume.get(ib, ia, il)).collect();
    Ok(CwltSlice {
        lambda: l[il],
        b_values: g.b_values().to_vec(),
        a_values: g.a_values().to_vec(),
        values,
    })
}

/// The local linear-chirp model of the transform,
/// `Σ_k x_k(b) ğ(σ(μ − aφ'_k(b)), σ²a²(λ − φ''_k(b)))`.
///
/// For a real source each cosine contributes its two analytic halves, the
/// negative-frequency half entering with IF `−φ'_k` and chirp rate `−φ''_k`.
pub fn chirp_model(truth: &GroundTruth, form: Form, sigma: f64, mu: f64, a: f64, b: f64, lambda: f64) -> Complex64 {
    truth
        .components
        .iter()
        .map(|c| component_model(c, form, sigma, mu, a, b, lambda))
        .sum()
}

pub fn component_model(c: &ComponentTruth, form: Form, sigma: f64, mu: f64, a: f64, b: f64, lambda: f64) -> Complex64 {
    let term = |x: Complex64, f: f64, r: f64| x * pft_gaussian(sigma * (mu - a * f), sigma * sigma * a * a * (lambda - r));
    let x = c.complex_value(b);
    let (f, r) = (c.inst_freq(b), c.chirp_rate(b));
    match form {
        Form::Complex => term(x, f, r),
        Form::Real => term(x * 0.5, f, r) + term(x.conj() * 0.5, -f, -r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dyadic_scales, uniform};
    use crate::signal::{example1, gen_linear_chirp, mix, Form};

    fn small_grid(signal: &Signal, lambdas: Vec<f64>) -> TscrGrid {
        let b: Vec<f64> = signal.times().into_iter().step_by(8).collect();
        TscrGrid::new(b, dyadic_scales(signal.dt(), 8, 1.0, 8.0, 100.0).unwrap(), lambdas).unwrap()
    }

    #[test]
    fn zero_signal_gives_zero_volume() {
        let s = Signal::from_real(&[0.0; 128], 128.0, 0.0).unwrap();
        let g = small_grid(&s, uniform(-20.0, 20.0, 5).unwrap());
        let v = compute_tscr(&s, &g, &WindowSpec::constant(3.0)).unwrap();
        assert!(v.values().iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn exact_complex_chirp_matches_model() {
        let (s, truth) = gen_linear_chirp(1.0, 40.0, 30.0, 1.0, 256.0, Form::Complex).unwrap();
        let truth = GroundTruth::new(vec![truth]).unwrap();
        let sigma = 4.0;
        let w = WindowSpec::constant(sigma);
        let g = TscrGrid::new(
            vec![0.5],
            dyadic_scales(s.dt(), 16, 1.0, 30.0, 100.0).unwrap(),
            uniform(-60.0, 60.0, 13).unwrap(),
        )
        .unwrap();
        let v = compute_tscr(&s, &g, &w).unwrap();
        for (ia, &a) in g.a_values().iter().enumerate() {
            if 5.0 * a * sigma > 0.5 {
                continue;
            }
            for (il, &l) in g.lambda_values().iter().enumerate() {
                let r = chirp_model(&truth, Form::Complex, sigma, 1.0, a, 0.5, l);
                assert!((v.get(0, ia, il) - r).norm() < 1e-5, "a = {a}, λ = {l}");
            }
        }
    }

    #[test]
    fn grid_matches_single_node_evaluation() {
        let (s, _) = example1(Form::Real).unwrap();
        let w = WindowSpec::constant(5.0);
        // includes an off-sample b to exercise the per-node chirp table
        let g = TscrGrid::new(
            vec![0.1, 0.3012, 0.5],
            dyadic_scales(s.dt(), 4, 1.0, 10.0, 100.0).unwrap(),
            uniform(-100.0, 100.0, 7).unwrap(),
        )
        .unwrap();
        let v = compute_tscr(&s, &g, &w).unwrap();
        for (ib, &b) in g.b_values().iter().enumerate() {
            for (ia, &a) in g.a_values().iter().enumerate() {
                for (il, &l) in g.lambda_values().iter().enumerate() {
                    let d = evaluate_node(&s, &w, a, b, l).unwrap();
                    assert!((v.get(ib, ia, il) - d).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linearity() {
        let (x, _) = gen_linear_chirp(1.0, 20.0, 40.0, 0.5, 128.0, Form::Complex).unwrap();
        let (y, _) = gen_linear_chirp(0.7, 45.0, -10.0, 0.5, 128.0, Form::Real).unwrap();
        let g = small_grid(&x, uniform(-50.0, 50.0, 11).unwrap());
        let w = WindowSpec::constant(3.0);
        let (alpha, beta) = (1.5, -0.25);
        let comb = mix(&[x.scaled(alpha), y.scaled(beta)]).unwrap();
        let ux = compute_tscr(&x, &g, &w).unwrap();
        let uy = compute_tscr(&y, &g, &w).unwrap();
        let uc = compute_tscr(&comb, &g, &w).unwrap();
        let scale = uc.max_abs();
        for i in 0..uc.values().len() {
            let lin = ux.values()[i] * alpha + uy.values()[i] * beta;
            assert!((uc.values()[i] - lin).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn renormalization_restores_edge_amplitude() {
        let (s, _) = gen_linear_chirp(1.0, 30.0, 0.0, 1.0, 256.0, Form::Complex).unwrap();
        let w = WindowSpec::constant(4.0);
        let raw = evaluate_node(&s, &w, 1.0 / 30.0, 0.0, 0.0).unwrap();
        let fixed = evaluate_node(&s, &w.clone().with_renormalization(true), 1.0 / 30.0, 0.0, 0.0).unwrap();
        assert!((raw.norm() - 0.5).abs() < 0.05, "{}", raw.norm());
        assert!((fixed.norm() - 1.0).abs() < 1e-3, "{}", fixed.norm());
    }

    #[test]
    fn cwlt_slice_behaviour() {
        let (s, _) = gen_linear_chirp(1.0, 32.0, 0.0, 1.0, 128.0, Form::Complex).unwrap();
        let g = TscrGrid::new(
            s.times(),
            dyadic_scales(s.dt(), 16, 1.0, 8.0, 64.0).unwrap(),
            vec![0.0],
        )
        .unwrap();
        let v = compute_tscr(&s, &g, &WindowSpec::constant(3.0)).unwrap();
        let c = cwlt_slice(&v).unwrap();
        assert_eq!(c.values, v.values());
        // maximal near a = μ/32 for interior b
        let target = TscrGrid::nearest(g.a_values(), 1.0 / 32.0);
        for ib in 40..88 {
            let best = (0..g.a_values().len())
                .max_by(|&i, &j| c.get(ib, i).norm().total_cmp(&c.get(ib, j).norm()))
                .unwrap();
            assert_eq!(best, target);
        }
        let only_positive = TscrGrid::new(vec![0.5], vec![0.03], vec![1.0, 2.0]).unwrap();
        let v2 = compute_tscr(&s, &only_positive, &WindowSpec::constant(3.0)).unwrap();
        assert!(cwlt_slice(&v2).is_err());
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut x = vec![0.0; 32];
        x[3] = f64::NAN;
        let s = Signal::from_real(&x, 32.0, 0.0).unwrap();
        let g = TscrGrid::new(vec![0.5], vec![0.1], vec![0.0]).unwrap();
        assert!(matches!(compute_tscr(&s, &g, &WindowSpec::constant(3.0)), Err(Error::NonFinite(3))));
    }

    #[test]
    fn window_validation() {
        assert!(WindowSpec::constant(0.0).validate().is_err());
        assert!(WindowSpec::constant(1.0).with_mu(0.0).validate().is_err());
        assert!(WindowSpec::constant(1.0).with_truncation(2.0).validate().is_err());
        assert!(WindowSpec::new(Sigma::Piecewise(vec![])).validate().is_err());
        let p = Sigma::Piecewise(vec![(0.0, 1.0), (1.0, 3.0)]);
        assert_eq!(p.at(-1.0), 1.0);
        assert_eq!(p.at(0.5), 2.0);
        assert_eq!(p.at(2.0), 3.0);
    }

    #[test]
    fn binary_round_trip() {
        let (s, _) = example1(Form::Real).unwrap();
        let g = small_grid(&s, uniform(-10.0, 10.0, 3).unwrap());
        let v = compute_tscr(&s, &g, &WindowSpec::constant(4.0)).unwrap();
        let mut buf = Vec::new();
        v.write_binary(&mut buf).unwrap();
        let (nb, na, nl) = g.shape();
        assert_eq!(buf.len(), 8 * (3 + nb + na + nl + 2 * nb * na * nl));
        let back = TscrVolume::read_binary(buf.as_slice(), 1.0).unwrap();
        assert_eq!(back, v);
        assert!(TscrVolume::read_binary(&buf[..40], 1.0).is_err());
    }

    #[test]
    fn slice_csv_has_expected_rows() {
        let (s, _) = example1(Form::Real).unwrap();
        let g = small_grid(&s, uniform(-10.0, 10.0, 3).unwrap());
        let v = compute_tscr(&s, &g, &WindowSpec::constant(4.0)).unwrap();
        let mut buf = Vec::new();
        v.write_slice_csv(SliceAxis::Lambda(0.0), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let (nb, na, _) = g.shape();
        assert_eq!(text.lines().count(), 1 + nb * na);
        assert!(text.starts_with("b,a,lambda,re,im,abs\n"));
    }
}
