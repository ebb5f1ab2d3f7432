//! IF and chirp-rate estimates and component reconstruction along ridges.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::grid::TscrGrid;
use crate::ridge::Ridge;
use crate::signal::{parse_row, Signal};
use crate::transform::{evaluate_node, TscrVolume, WindowSpec};

/// Source of transform values at arbitrary ridge points.
pub trait RidgeEvaluator: Sync {
    fn evaluate(&self, a: f64, b: f64, lambda: f64) -> Result<Complex64>;
}

/// Reads the stored value at the grid node nearest `(a, b, λ)`.
pub struct GridLookup<'a> {
    pub volume: &'a TscrVolume,
}

impl RidgeEvaluator for GridLookup<'_> {
    fn evaluate(&self, a: f64, b: f64, lambda: f64) -> Result<Complex64> {
        let g = self.volume.grid();
        Ok(self.volume.get(
            TscrGrid::nearest(g.b_values(), b),
            TscrGrid::nearest(g.a_values(), a),
            TscrGrid::nearest(g.lambda_values(), lambda),
        ))
    }
}

/// Evaluates the transform afresh at the exact point.
pub struct DirectSum<'a> {
    pub signal: &'a Signal,
    pub window: &'a WindowSpec,
}

impl RidgeEvaluator for DirectSum<'_> {
    fn evaluate(&self, a: f64, b: f64, lambda: f64) -> Result<Complex64> {
        evaluate_node(self.signal, self.window, a, b, lambda)
    }
}

/// Per-component estimates over the ridge's `b` values.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentEstimate {
    pub b_values: Vec<f64>,
    pub if_hat: Vec<f64>,
    pub cr_hat: Vec<f64>,
    pub amp_hat: Vec<f64>,
    /// Imaginary parts are zero for real sources.
    pub waveform: Vec<Complex64>,
}

impl ComponentEstimate {
    pub fn len(&self) -> usize {
        self.b_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b_values.is_empty()
    }
}

/// `if_hat = μ/â`, `cr_hat = λ̂`.
pub fn estimate_if_cr(ridge: &Ridge, mu: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(mu > 0.0) {
        return param(format!("μ must be positive, got {mu}"));
    }
    if ridge.is_empty() {
        return param("ridge is empty");
    }
    let mut f = Vec::with_capacity(ridge.len());
    let mut r = Vec::with_capacity(ridge.len());
    for p in &ridge.points {
        if !(p.a_hat > 0.0 && p.a_hat.is_finite()) {
            return param(format!("ridge scale must be positive, got {} at b = {}", p.a_hat, p.b));
        }
        f.push(mu / p.a_hat);
        r.push(p.lambda_hat);
    }
    Ok((f, r))
}

/// Replaces each ridge point's value by the evaluator's.
pub fn fill_values(ridge: &mut Ridge, evaluator: &dyn RidgeEvaluator) -> Result<()> {
    for p in &mut ridge.points {
        p.value = evaluator.evaluate(p.a_hat, p.b, p.lambda_hat)?;
    }
    Ok(())
}

/// `U(â(b), b, λ̂(b))` along the ridge, or `2·Re U` for a real source.
pub fn recover_component(evaluator: &dyn RidgeEvaluator, ridge: &Ridge, real_source: bool) -> Result<Vec<Complex64>> {
    ridge
        .points
        .iter()
        .map(|p| {
            let u = evaluator.evaluate(p.a_hat, p.b, p.lambda_hat)?;
            Ok(if real_source { Complex64::new(2.0 * u.re, 0.0) } else { u })
        })
        .collect()
}

/// `|U|` at the ridge points.
pub fn estimate_amplitude(ridge: &Ridge) -> Vec<f64> {
    ridge.points.iter().map(|p| p.value.norm()).collect()
}

/// Runs the three estimates on one ridge. The ridge's stored values are
/// refreshed from the evaluator first.
pub fn estimate_component(
    ridge: &mut Ridge,
    mu: f64,
    evaluator: &dyn RidgeEvaluator,
    real_source: bool,
) -> Result<ComponentEstimate> {
    fill_values(ridge, evaluator)?;
    let (if_hat, cr_hat) = estimate_if_cr(ridge, mu)?;
    let waveform = ridge
        .points
        .iter()
        .map(|p| if real_source { Complex64::new(2.0 * p.value.re, 0.0) } else { p.value })
        .collect();
    Ok(ComponentEstimate {
        b_values: ridge.b_values(),
        if_hat,
        cr_hat,
        amp_hat: estimate_amplitude(ridge),
        waveform,
    })
}

/// Writes `component,b,if_hat,cr_hat,amp_hat,wave_re,wave_im`, components
/// numbered from 1.
pub fn write_components_csv<W: Write>(components: &[ComponentEstimate], mut out: W) -> Result<()> {
    writeln!(out, "component,b,if_hat,cr_hat,amp_hat,wave_re,wave_im")?;
    for (k, c) in components.iter().enumerate() {
        for i in 0..c.len() {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                k + 1,
                c.b_values[i],
                c.if_hat[i],
                c.cr_hat[i],
                c.amp_hat[i],
                c.waveform[i].re,
                c.waveform[i].im
            )?;
        }
    }
    Ok(())
}

pub fn read_components_csv<R: BufRead>(input: R) -> Result<Vec<ComponentEstimate>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some("component,b,if_hat,cr_hat,amp_hat,wave_re,wave_im") {
        return Err(Error::Format("unexpected component header".into()));
    }
    let mut out: Vec<ComponentEstimate> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = parse_row(&line, 7, i + 2)?;
        let k = f[0] as usize;
        if f[0] < 1.0 || f[0].fract() != 0.0 || k > out.len() + 1 {
            return Err(Error::Format(format!("line {}: bad component number {}", i + 2, f[0])));
        }
        if k == out.len() + 1 {
            out.push(ComponentEstimate {
                b_values: vec![],
                if_hat: vec![],
                cr_hat: vec![],
                amp_hat: vec![],
                waveform: vec![],
            });
        }
        let c = &mut out[k - 1];
        c.b_values.push(f[1]);
        c.if_hat.push(f[2]);
        c.cr_hat.push(f[3]);
        c.amp_hat.push(f[4]);
        c.waveform.push(Complex64::new(f[5], f[6]));
    }
    Ok(out)
}
