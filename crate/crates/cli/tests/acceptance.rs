//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tscr::bench::bench;
use tscr::bounds::{error_bounds, remainder_bound, BoundsInput};
use tscr::grid::{dyadic_scales, GridSpec, TscrGrid};
use tscr::kernel::{kernel_magnitude, pft_gaussian};
use tscr::pipeline::{analyze, analyze_volume, AnalysisConfig};
use tscr::ridge::{argmax_in_zone, extract_peaks, SeparationParams};
use tscr::signal::{example1, example2, gen_linear_chirp, synthesize, ComponentTruth, Form, GroundTruth};
use tscr::transform::{chirp_model, compute_tscr, WindowSpec};
use tscr_cli::commands::analysis_config;
use tscr_cli::config::{Builtin, RunConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant, detail: String, ok: bool) -> Outcome {
    let took = start.elapsed();
    check(ok && took <= limit, format!("{detail}; {:.1} s (limit {} s)", took.as_secs_f64(), limit.as_secs()))
}

// Trapezoid rule on [-14, 14]; spectrally accurate for this smooth, fast
// decaying integrand.
fn pft_trapezoid(eta: f64, lambda: f64) -> Complex64 {
    let (lo, hi, n) = (-14.0, 14.0, 28_000);
    let h = (hi - lo) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let t: f64 = lo + i as f64 * h;
        let g = (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += Complex64::from_polar(g * w, -2.0 * PI * eta * t - PI * lambda * t * t);
    }
    acc * h
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let eta = rng.random_range(-3.0..3.0);
        let lambda = rng.random_range(-3.0..3.0);
        worst = worst.max((pft_gaussian(eta, lambda) - pft_trapezoid(eta, lambda)).norm());
    }
    within(Duration::from_secs(5), start, format!("max deviation {worst:.2e} (limit 1e-8)"), worst <= 1e-8)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sigma_s = 0.023;
    let sigma = sigma_s * 256.0;
    let (mut worst_u, mut worst_if, mut worst_cr, mut interior) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for _ in 0..50 {
        // IF stays in [5, 100] Hz over the whole second
        let (c, r) = loop {
            let c: f64 = rng.random_range(5.0..100.0);
            let r: f64 = rng.random_range(-100.0..100.0);
            if (5.0..=100.0).contains(&(c + r)) {
                break (c, r);
            }
        };
        let amp = rng.random_range(0.5..2.0);
        let (s, t) = gen_linear_chirp(amp, c, r, 1.0, 256.0, Form::Complex).map_err(|e| e.to_string())?;
        let truth = GroundTruth::new(vec![t.clone()]).map_err(|e| e.to_string())?;
        let mut spec = GridSpec::for_rate(256.0);
        spec.if_min = 4.0;
        let full = TscrGrid::for_signal(&s, &spec).map_err(|e| e.to_string())?;
        let grid = TscrGrid::new(
            full.b_values().iter().copied().step_by(4).collect(),
            full.a_values().to_vec(),
            full.lambda_values().to_vec(),
        )
        .map_err(|e| e.to_string())?;
        let window = WindowSpec::from_sample_scale_seconds(sigma_s, 256.0);
        let volume = compute_tscr(&s, &grid, &window).map_err(|e| e.to_string())?;
        // closed form holds where the truncated window lies inside the record
        for (ib, &b) in grid.b_values().iter().enumerate() {
            for (ia, &a) in grid.a_values().iter().enumerate() {
                let half = window.truncation_radius * a * sigma;
                if b < half || b + half > s.end_time() {
                    continue;
                }
                for (il, &l) in grid.lambda_values().iter().enumerate() {
                    let model = chirp_model(&truth, Form::Complex, sigma, 1.0, a, b, l);
                    worst_u = worst_u.max((volume.get(ib, ia, il) - model).norm() / amp);
                }
            }
        }
        let mut cfg = AnalysisConfig::new(spec, window);
        cfg.k_expected = Some(1);
        let an = analyze_volume(&s, volume, &cfg).map_err(|e| format!("c={c}, r={r}: {e}"))?;
        let comp = &an.components[0];
        for (j, p) in an.ridges.ridges[0].points.iter().enumerate() {
            // interior: three window widths from both ends at the true scale
            let reach = 3.0 * sigma / t.inst_freq(p.b);
            if p.b < reach || p.b + reach > s.end_time() {
                continue;
            }
            interior += 1;
            let ia = TscrGrid::nearest(grid.a_values(), p.a_hat);
            let il = TscrGrid::nearest(grid.lambda_values(), p.lambda_hat);
            worst_if = worst_if.max((comp.if_hat[j] - t.inst_freq(p.b)).abs() / grid.if_step(ia, 1.0));
            worst_cr = worst_cr.max((comp.cr_hat[j] - r).abs() / grid.lambda_step(il));
        }
    }
    within(
        Duration::from_secs(120),
        start,
        format!(
            "max |U-R|/A {worst_u:.2e} (limit 1e-3); ridge IF error {worst_if:.2} steps, chirp-rate error {worst_cr:.2} steps over {interior} interior points (limit 1)"
        ),
        worst_u <= 1e-3 && worst_if <= 1.0 && worst_cr <= 1.0 && interior > 0,
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let cfg = RunConfig::preset(Builtin::Example1);
    let (s, truth) = example1(Form::Real).map_err(|e| e.to_string())?;
    let acfg = analysis_config(&cfg, 256.0);
    let an = analyze(&s, &acfg).map_err(|e| e.to_string())?;
    let sigma = cfg_sigma(&cfg);
    let lambda_step = (cfg.lambda_max - cfg.lambda_min) / (cfg.lambda_count - 1) as f64;
    let mut details = Vec::new();
    let mut ok = an.components.len() == 2;
    for (k, c) in truth.components.iter().enumerate() {
        let target = c.chirp_rate(0.0);
        // the ridge whose median chirp rate has the same sign
        let Some((ridge, est)) = an.ridges.ridges.iter().zip(&an.components).find(|(_, e)| {
            let mut cr = e.cr_hat.clone();
            cr.sort_by(f64::total_cmp);
            cr[cr.len() / 2].signum() == target.signum()
        }) else {
            return Err(format!("no ridge for component {}", k + 1));
        };
        // interior: one window width from both ends at the true scale
        let times = s.times();
        let inner: Vec<f64> = times
            .iter()
            .copied()
            .filter(|&b| {
                let reach = sigma / c.inst_freq(b);
                b >= reach && b + reach <= s.end_time()
            })
            .collect();
        let covered = inner.iter().all(|b| ridge.points.iter().any(|p| (p.b - b).abs() < 1e-12));
        let idx: Vec<usize> = (0..est.len()).filter(|&j| inner.iter().any(|b| (b - est.b_values[j]).abs() < 1e-12)).collect();
        let mut cr: Vec<f64> = idx.iter().map(|&j| est.cr_hat[j]).collect();
        cr.sort_by(f64::total_cmp);
        let median = cr[cr.len() / 2];
        let num: f64 = idx.iter().map(|&j| (est.if_hat[j] - c.inst_freq(est.b_values[j])).powi(2)).sum();
        let den: f64 = idx.iter().map(|&j| c.inst_freq(est.b_values[j]).powi(2)).sum();
        let nmse = (num / den).sqrt();
        ok &= covered && (median - target).abs() <= 2.0 * lambda_step && nmse <= 0.02;
        details.push(format!(
            "component {}: median chirp rate {median} (target {target}), IF nmse {nmse:.4}, interior covered {covered}",
            k + 1
        ));
    }
    within(Duration::from_secs(60), start, details.join("; "), ok)
}

fn cfg_sigma(cfg: &RunConfig) -> f64 {
    match &cfg.sigma {
        tscr_cli::config::SigmaSetting::Constant(s) => s * cfg.rate,
        tscr_cli::config::SigmaSetting::Table(_) => f64::NAN,
    }
}

fn criterion_4() -> Outcome {
    let cfg = RunConfig::preset(Builtin::Example2);
    let (s, _, _) = example2(Form::Real).map_err(|e| e.to_string())?;
    let acfg = analysis_config(&cfg, 256.0);
    let grid = TscrGrid::for_signal(&s, &acfg.grid).map_err(|e| e.to_string())?;
    let volume = compute_tscr(&s, &grid, &acfg.window).map_err(|e| e.to_string())?;
    let params = SeparationParams::relative(acfg.delta, acfg.delta1, cfg.threshold, &volume).map_err(|e| e.to_string())?;
    let ib = TscrGrid::nearest(grid.b_values(), 0.5);
    let set = extract_peaks(&volume, ib, &params).map_err(|e| e.to_string())?;
    let mut lambdas: Vec<f64> = set.peaks.iter().map(|p| p.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    let min_gap = lambdas.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let list = set.peaks.iter().map(|p| format!("({:.1} Hz, {} Hz/s)", 1.0 / p.a, p.lambda)).collect::<Vec<_>>();
    check(
        set.peaks.len() == 3 && min_gap > 50.0,
        format!("{} peaks at b = {}: {}; min chirp-rate gap {min_gap} Hz/s", set.peaks.len(), set.b, list.join(", ")),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let cfg = RunConfig::preset(Builtin::Example2);
    let (s, truth, parts) = example2(Form::Real).map_err(|e| e.to_string())?;
    let acfg = analysis_config(&cfg, 256.0);
    let rows = bench(&s, &truth, &parts, &acfg, &[10.0], 20, cfg.seed).map_err(|e| e.to_string())?;
    let r = &rows[0];
    let ok = r.if_mean.iter().all(|&v| v <= 0.05) && r.mode_mean.iter().all(|&v| v <= 0.40);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join("/");
    within(
        Duration::from_secs(1200),
        start,
        format!(
            "10 dB, 20 trials: IF nmse {} (limit 0.05), mode nmse {} (limit 0.40), {} failed runs",
            fmt(&r.if_mean),
            fmt(&r.mode_mean),
            r.failures
        ),
        ok,
    )
}

// One random single-component configuration inside the theorem hypotheses:
// a large window, wide zones and small model constants.
fn bound_case(rng: &mut ChaCha8Rng) -> (ComponentTruth, f64) {
    let amp = rng.random_range(0.5..2.0);
    let carrier = rng.random_range(40.0..80.0);
    let comp = if rng.random_bool(0.5) {
        ComponentTruth::linear_chirp(amp, carrier, rng.random_range(-10.0..10.0))
    } else {
        // |φ'''| = depth·f_m·(2π f_m)² kept below 1
        let fm = rng.random_range(0.1..0.25);
        let depth = rng.random_range(0.2..0.8) / (fm * (2.0 * PI * fm).powi(2)).max(1.0);
        ComponentTruth::sinusoidal_fm(amp, carrier, depth, fm, rng.random_range(0.0..2.0 * PI))
    };
    let m = rng.random_range(0.0..0.2);
    let comp = comp.with_amplitude_modulation(m, rng.random_range(0.0..0.2)).expect("valid modulation");
    (comp, rng.random_range(7.0..9.0))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // long enough for the truncated window at the largest scale
    let (rate, duration, b) = (256.0, 8.0, 4.0);
    let (delta, delta1, if_min) = (0.9, 2000.0, 20.0);
    let mut worst = [0.0f64; 4];
    let mut lemma_nodes = 0usize;
    for case in 0..20 {
        let (comp, sigma) = bound_case(&mut rng);
        let s = synthesize(&comp, duration, rate, Form::Complex).map_err(|e| e.to_string())?;
        let truth = GroundTruth::new(vec![comp.clone()]).map_err(|e| e.to_string())?;
        let (f, cr, amp) = (comp.inst_freq(b), comp.chirp_rate(b), comp.amplitude(b));
        // scale and λ axes that contain the true node exactly
        let mut a = dyadic_scales(s.dt(), 32, 1.0, if_min, rate / 2.0).map_err(|e| e.to_string())?;
        a.push(1.0 / f);
        a.sort_by(f64::total_cmp);
        a.dedup();
        let lambdas: Vec<f64> = (-100..=100).map(|k| cr + 2.0 * k as f64).collect();
        let grid = TscrGrid::new(vec![b], a, lambdas).map_err(|e| e.to_string())?;
        let window = WindowSpec::constant(sigma).with_truncation(7.0);
        let volume = compute_tscr(&s, &grid, &window).map_err(|e| e.to_string())?;
        let input = BoundsInput {
            eps1: comp.eps1,
            eps3: comp.eps3,
            sigma,
            mu: 1.0,
            delta,
            delta1,
            a1: 1.0 / (rate / 2.0),
            a2: 1.0 / if_min,
            amplitudes: vec![amp],
            if_values: vec![f],
            cr_values: vec![cr],
            a_hat: None,
        };
        let pre = error_bounds(&input).map_err(|e| e.to_string())?;
        if !pre.all_hypotheses_ok() {
            return Err(format!("case {case}: generated configuration violates the hypotheses"));
        }
        // lemma bound at every node
        for (ia, &aa) in grid.a_values().iter().enumerate() {
            let bound = remainder_bound(&input, aa).map_err(|e| e.to_string())?;
            for (il, &ll) in grid.lambda_values().iter().enumerate() {
                // the sampled integrand must stay below Nyquist over the support
                let reach = window.truncation_radius * aa * sigma;
                if (f - 1.0 / aa).abs() + (cr - ll).abs() * reach + comp.eps3 * reach * reach >= rate / 2.0 {
                    continue;
                }
                lemma_nodes += 1;
                let gap = (volume.get(0, ia, il) - chirp_model(&truth, Form::Complex, sigma, 1.0, aa, b, ll)).norm();
                if gap > bound + 1e-9 * amp {
                    return Err(format!("case {case}: |U-R| = {gap:.3e} > {bound:.3e} at a = {aa}, λ = {ll}"));
                }
            }
        }
        let threshold = pre.eps_tilde_window.0;
        let params = SeparationParams::new(delta, delta1, threshold).map_err(|e| e.to_string())?;
        let (a_hat, l_hat, u) = argmax_in_zone(&volume, 0, 1.0 / f, cr, &params).map_err(|e| e.to_string())?;
        let report = error_bounds(&BoundsInput { a_hat: Some(vec![a_hat]), ..input }).map_err(|e| e.to_string())?;
        let cb = &report.components[0];
        let (Some(bd1), Some(bd2), Some(bd3)) = (cb.bd1, cb.bd2, cb.bd3) else {
            return Err(format!("case {case}: bounds unavailable"));
        };
        let measured = [(1.0 - a_hat * f).abs(), (l_hat - cr).abs(), (u - comp.complex_value(b)).norm()];
        for (k, (m, bd)) in measured.iter().zip([bd1, bd2, bd3]).enumerate() {
            if *m > bd {
                return Err(format!("case {case}: error {} = {m:.3e} exceeds its bound {bd:.3e}", k + 1));
            }
            worst[k] = worst[k].max(m / bd);
        }
        worst[3] = worst[3].max(cb.c);
    }
    Ok(format!(
        "20 configurations, {lemma_nodes} alias-free lemma nodes, no violations; worst error/bound ratios {:.3}, {:.3}, {:.3}; largest 2Err/A {:.3}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn criterion_7() -> Outcome {
    let n = 500;
    let level = (-0.25f64).exp();
    let eta_max = 1.0 / (2.0 * PI * 2.0f64.sqrt());
    let axis: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let (mut level_bad, mut mono_bad) = (0usize, 0usize);
    for &eta in &axis {
        for (j, &lambda) in axis.iter().enumerate() {
            let f = kernel_magnitude(eta, lambda);
            if f >= level && eta > eta_max {
                level_bad += 1;
            }
            if j + 1 < n && 8.0 * PI * PI * eta * eta <= 1.0 + 4.0 * PI * PI * lambda * lambda {
                if kernel_magnitude(eta, axis[j + 1]) > f {
                    mono_bad += 1;
                }
            }
        }
    }
    check(
        level_bad == 0 && mono_bad == 0,
        format!("{n}x{n} grid: {level_bad} level-set and {mono_bad} monotonicity counterexamples"),
    )
}

fn run_analyze(dir: &Path, threads: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_tscr"))
        .args(["analyze", "--builtin", "example1", "--out"])
        .arg(dir)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (one, many) = (tmp.path().join("one"), tmp.path().join("many"));
    run_analyze(&one, "1")?;
    run_analyze(&many, "4")?;
    let mut names = Vec::new();
    for name in ["ridges.csv", "components.csv", "cwlt.csv"] {
        let a = std::fs::read(one.join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(many.join(name)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{name} differs between 1 and 4 threads"));
        }
        names.push(format!("{name} ({} bytes)", a.len()));
    }
    Ok(format!("identical with 1 and 4 threads: {}", names.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("kernel closed form vs quadrature", criterion_1),
        ("exact-chirp oracle", criterion_2),
        ("example 1 reproduction", criterion_3),
        ("example 2 crossover separation", criterion_4),
        ("table 1 reproduction at 10 dB", criterion_5),
        ("bound consistency", criterion_6),
        ("kernel level set and monotonicity", criterion_7),
        ("determinism across thread counts", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
