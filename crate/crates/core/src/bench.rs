//! Monte-Carlo scoring of the pipeline against a known ground truth.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Result};
use crate::pipeline::{analyze, AnalysisConfig};
use crate::recovery::ComponentEstimate;
use crate::signal::{add_noise, GroundTruth, Signal};

/// Normalized errors of one run, per truth component. A component with no
/// matching ridge scores 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub if_nmse: Vec<f64>,
    pub mode_nmse: Vec<f64>,
    /// The pipeline returned an error.
    pub failed: bool,
}

fn nmse_complex(reference: &[Complex64], estimate: &[Complex64]) -> f64 {
    let den: f64 = reference.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let num: f64 = reference.iter().zip(estimate).map(|(r, e)| (r - e).norm_sqr()).sum::<f64>().sqrt();
    num / den
}

// Estimates resampled on `times`: linear interpolation over the ridge's b
// values, held constant beyond its ends. Waveforms are zero outside.
fn resample(c: &ComponentEstimate, times: &[f64]) -> (Vec<f64>, Vec<Complex64>) {
    let b = &c.b_values;
    let mut f = Vec::with_capacity(times.len());
    let mut w = Vec::with_capacity(times.len());
    for &t in times {
        let i = b.partition_point(|&x| x < t);
        if i < b.len() && (b[i] - t).abs() < 1e-12 {
            f.push(c.if_hat[i]);
            w.push(c.waveform[i]);
        } else if i == 0 {
            f.push(c.if_hat[0]);
            w.push(Complex64::new(0.0, 0.0));
        } else if i == b.len() {
            f.push(c.if_hat[b.len() - 1]);
            w.push(Complex64::new(0.0, 0.0));
        } else {
            let s = (t - b[i - 1]) / (b[i] - b[i - 1]);
            f.push(c.if_hat[i - 1] + s * (c.if_hat[i] - c.if_hat[i - 1]));
            w.push(c.waveform[i - 1] + (c.waveform[i] - c.waveform[i - 1]) * s);
        }
    }
    (f, w)
}

fn permutations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n, k - 1) {
        for i in 0..n {
            if !p.contains(&i) {
                let mut q = p.clone();
                q.push(i);
                out.push(q);
            }
        }
    }
    out
}

/// Scores estimates against the truth. Each truth component is paired with a
/// distinct estimate so that the summed IF error is smallest; `parts` holds
/// the clean component signals.
pub fn score(truth: &GroundTruth, parts: &[Signal], estimates: &[ComponentEstimate]) -> Result<TrialMetrics> {
    if parts.len() != truth.len() {
        return param(format!("{} component signals for {} truths", parts.len(), truth.len()));
    }
    let times = parts[0].times();
    let k = truth.len();
    let refs_if: Vec<Vec<f64>> = truth.components.iter().map(|c| times.iter().map(|&t| c.inst_freq(t)).collect()).collect();
    let resampled: Vec<_> = estimates.iter().map(|e| resample(e, &times)).collect();
    let if_err = |ti: usize, ei: usize| {
        let r = &refs_if[ti];
        let e = &resampled[ei].0;
        let num: f64 = r.iter().zip(e).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        num / r.iter().map(|a| a * a).sum::<f64>().sqrt()
    };
    let m = k.min(estimates.len());
    // choose which truths get an estimate and which estimate each gets
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    for truths in permutations(k, m) {
        if truths.windows(2).any(|w| w[1] < w[0]) {
            continue;
        }
        for ests in permutations(estimates.len(), m) {
            let pairs: Vec<_> = truths.iter().cloned().zip(ests).collect();
            let cost: f64 = pairs.iter().map(|&(t, e)| if_err(t, e)).sum::<f64>() + (k - m) as f64;
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, pairs));
            }
        }
    }
    let mut if_nmse = vec![1.0; k];
    let mut mode_nmse = vec![1.0; k];
    for (t, e) in best.map(|b| b.1).unwrap_or_default() {
        if_nmse[t] = if_err(t, e);
        mode_nmse[t] = nmse_complex(parts[t].samples(), &resampled[e].1);
    }
    Ok(TrialMetrics { if_nmse, mode_nmse, failed: false })
}

/// One noisy realization: noise at `snr_db` with `seed`, analysis, scoring.
pub fn run_trial(
    clean: &Signal,
    truth: &GroundTruth,
    parts: &[Signal],
    config: &AnalysisConfig,
    snr_db: Option<f64>,
    seed: u64,
) -> Result<TrialMetrics> {
    let noisy = match snr_db {
        Some(snr) => add_noise(clean, snr, seed)?,
        None => clean.clone(),
    };
    match analyze(&noisy, config) {
        Ok(a) => score(truth, parts, &a.components),
        Err(_) => Ok(TrialMetrics { if_nmse: vec![1.0; truth.len()], mode_nmse: vec![1.0; truth.len()], failed: true }),
    }
}

/// Mean and sample standard deviation per component at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub snr_db: f64,
    pub trials: usize,
    pub failures: usize,
    pub if_mean: Vec<f64>,
    pub if_std: Vec<f64>,
    pub mode_mean: Vec<f64>,
    pub mode_std: Vec<f64>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = if v.len() > 1 { (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (m, s)
}

/// Seed of trial `i`, shared by every SNR so rows differ only in noise level.
pub fn trial_seed(base_seed: u64, i: usize) -> u64 {
    base_seed.wrapping_add(i as u64)
}

pub fn bench(
    clean: &Signal,
    truth: &GroundTruth,
    parts: &[Signal],
    config: &AnalysisConfig,
    snrs: &[f64],
    trials: usize,
    base_seed: u64,
) -> Result<Vec<BenchRow>> {
    if trials == 0 {
        return param("at least one trial is required");
    }
    snrs.iter()
        .map(|&snr| {
            let runs: Vec<TrialMetrics> = (0..trials)
                .into_par_iter()
                .map(|i| run_trial(clean, truth, parts, config, Some(snr), trial_seed(base_seed, i)))
                .collect::<Result<_>>()?;
            let k = truth.len();
            let col = |f: &dyn Fn(&TrialMetrics) -> f64| -> (f64, f64) { mean_std(&runs.iter().map(f).collect::<Vec<_>>()) };
            let mut row = BenchRow {
                snr_db: snr,
                trials,
                failures: runs.iter().filter(|r| r.failed).count(),
                if_mean: vec![],
                if_std: vec![],
                mode_mean: vec![],
                mode_std: vec![],
            };
            for j in 0..k {
                let (m, s) = col(&|r| r.if_nmse[j]);
                row.if_mean.push(m);
                row.if_std.push(s);
                let (m, s) = col(&|r| r.mode_nmse[j]);
                row.mode_mean.push(m);
                row.mode_std.push(s);
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gen_linear_chirp, Form};

    #[test]
    fn perfect_estimates_score_zero_in_any_order() {
        let (x, tx) = gen_linear_chirp(1.0, 20.0, 10.0, 0.5, 64.0, Form::Real).unwrap();
        let (y, ty) = gen_linear_chirp(1.0, 5.0, 0.0, 0.5, 64.0, Form::Real).unwrap();
        let truth = GroundTruth::new(vec![tx.clone(), ty.clone()]).unwrap();
        let est = |s: &Signal, c: &crate::signal::ComponentTruth| ComponentEstimate {
            b_values: s.times(),
            if_hat: s.times().iter().map(|&t| c.inst_freq(t)).collect(),
            cr_hat: vec![0.0; s.len()],
            amp_hat: vec![1.0; s.len()],
            waveform: s.samples().to_vec(),
        };
        let m = score(&truth, &[x.clone(), y.clone()], &[est(&y, &ty), est(&x, &tx)]).unwrap();
        assert_eq!(m.if_nmse, vec![0.0, 0.0]);
        assert_eq!(m.mode_nmse, vec![0.0, 0.0]);
        let partial = score(&truth, &[x.clone(), y.clone()], &[est(&y, &ty)]).unwrap();
        assert_eq!(partial.if_nmse, vec![1.0, 0.0]);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3, 3).len(), 6);
        assert_eq!(permutations(4, 2).len(), 12);
        assert_eq!(permutations(2, 0).len(), 1);
    }
}
