//! The subcommands. Each writes its files under the configured output
//! directory and returns what it wrote plus a short text summary.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use tscr::bench::{bench, BenchRow};
use tscr::bounds::{error_bounds, BoundsInput};
use tscr::grid::{GridSpec, TscrGrid};
use tscr::pipeline::{analyze, AnalysisConfig, Threshold};
use tscr::recovery::write_components_csv;
use tscr::signal::{add_noise, example1, example2, gen_linear_chirp, synthesize, GroundTruth, Signal};
use tscr::transform::{compute_tscr, Sigma, SliceAxis, WindowSpec};

use crate::config::{Axis, Builtin, RunConfig, SigmaSetting, ThresholdMode};
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// A loaded signal; builtins also carry their truth and clean components.
pub struct Source {
    pub signal: Signal,
    pub truth: Option<GroundTruth>,
    pub parts: Option<Vec<Signal>>,
}

pub fn load_source(cfg: &RunConfig) -> Result<Source, CliError> {
    cfg.validate()?;
    let source = match (cfg.builtin, &cfg.input) {
        (Some(b), _) => builtin_source(cfg, b)?,
        (None, Some(path)) => {
            let f = File::open(path).map_err(|e| io_err(path, e))?;
            let signal = Signal::read_csv(BufReader::new(f))?;
            Source { signal, truth: None, parts: None }
        }
        (None, None) => return Err(CliError::Config("no signal: set signal.builtin or signal.input".into())),
    };
    cfg.validate_for_rate(source.signal.sample_rate())?;
    Ok(source)
}

fn builtin_source(cfg: &RunConfig, b: Builtin) -> Result<Source, CliError> {
    let (signal, truth, parts) = match b {
        Builtin::Example1 => {
            let (s, truth) = example1(cfg.form)?;
            let parts = truth
                .components
                .iter()
                .map(|c| synthesize(c, s.end_time() + s.dt(), s.sample_rate(), cfg.form))
                .collect::<tscr::Result<Vec<_>>>()?;
            (s, truth, parts)
        }
        Builtin::Example2 => example2(cfg.form)?,
        Builtin::Tone | Builtin::Chirp => {
            let r = if b == Builtin::Tone { 0.0 } else { cfg.r };
            let nyquist = cfg.rate / 2.0;
            for f in [cfg.c, cfg.c + r * cfg.duration] {
                if !(f > 0.0 && f < nyquist) {
                    return Err(CliError::Config(format!(
                        "{} frequency {f} Hz lies outside (0, {nyquist}) Hz",
                        b.name()
                    )));
                }
            }
            let (s, c) = gen_linear_chirp(cfg.amplitude, cfg.c, r, cfg.duration, cfg.rate, cfg.form)?;
            (s.clone(), GroundTruth::new(vec![c])?, vec![s])
        }
    };
    Ok(Source { signal, truth: Some(truth), parts: Some(parts) })
}

/// Converts the configured width to the dimensionless `σ` at `rate`.
pub fn window_spec(cfg: &RunConfig, rate: f64) -> WindowSpec {
    let sigma = match &cfg.sigma {
        SigmaSetting::Constant(s) => Sigma::Constant(s * rate),
        SigmaSetting::Table(t) => Sigma::Piecewise(t.iter().map(|&(b, s)| (b, s * rate)).collect()),
    };
    WindowSpec::new(sigma)
        .with_mu(cfg.mu)
        .with_truncation(cfg.truncation)
        .with_renormalization(cfg.renormalize)
}

pub fn analysis_config(cfg: &RunConfig, rate: f64) -> AnalysisConfig {
    let grid = GridSpec {
        voices: cfg.voices,
        mu: cfg.mu,
        if_min: cfg.if_min,
        if_max: cfg.if_max.unwrap_or(rate / 2.0),
        lambda_min: cfg.lambda_min,
        lambda_max: cfg.lambda_max,
        lambda_count: cfg.lambda_count,
    };
    let mut a = AnalysisConfig::new(grid, window_spec(cfg, rate));
    a.delta = cfg.delta;
    a.delta1 = cfg.delta1;
    a.threshold = match cfg.threshold_mode {
        ThresholdMode::Relative => Threshold::Relative(cfg.threshold),
        ThresholdMode::Absolute => Threshold::Absolute(cfg.threshold),
    };
    a.k_expected = cfg.k;
    a.gate = cfg.gate;
    a.max_gap = cfg.max_gap;
    a.min_length_fraction = cfg.min_length;
    a.refine = cfg.refine;
    a
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> tscr::Result<()>,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = BufWriter::new(f);
    body(&mut w)?;
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn cmd_synth(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.builtin.is_none() {
        return Err(CliError::Config("synth needs signal.builtin".into()));
    }
    let src = load_source(cfg)?;
    let truth = src.truth.expect("builtins carry truth");
    let times = src.signal.times();
    let files = vec![
        write_file(&cfg.out_dir, "signal.csv", |w| src.signal.write_csv(w))?,
        write_file(&cfg.out_dir, "truth.csv", |w| truth.write_csv(&times, w))?,
    ];
    let summary = format!(
        "{} samples at {} Hz, {} component(s)",
        src.signal.len(),
        src.signal.sample_rate(),
        truth.len()
    );
    Ok(Report { files, summary })
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Report, CliError> {
    let src = load_source(cfg)?;
    let signal = match cfg.snr_db {
        Some(snr) => add_noise(&src.signal, snr, cfg.seed)?,
        None => src.signal,
    };
    let acfg = analysis_config(cfg, signal.sample_rate());
    let a = analyze(&signal, &acfg)?;
    let files = vec![
        write_file(&cfg.out_dir, "ridges.csv", |w| a.ridges.write_csv(w))?,
        write_file(&cfg.out_dir, "components.csv", |w| write_components_csv(&a.components, w))?,
        write_file(&cfg.out_dir, "cwlt.csv", |w| a.volume.write_slice_csv(SliceAxis::Lambda(0.0), w))?,
    ];
    let mut summary = format!("{} ridge(s), threshold {:.6}", a.ridges.len(), a.params.threshold);
    for (i, c) in a.components.iter().enumerate() {
        let mut cr = c.cr_hat.clone();
        cr.sort_by(f64::total_cmp);
        let _ = write!(
            summary,
            "\n  component {}: b in [{:.4}, {:.4}], median chirp rate {:.2} Hz/s",
            i + 1,
            c.b_values[0],
            c.b_values[c.len() - 1],
            cr[cr.len() / 2]
        );
    }
    Ok(Report { files, summary })
}

pub fn bench_csv(rows: &[BenchRow], mut w: impl Write) -> tscr::Result<()> {
    let k = rows.first().map_or(0, |r| r.if_mean.len());
    let mut header = vec!["snr_db".to_string(), "trials".into(), "failures".into()];
    for name in ["if_nmse", "mode_nmse", "if_std", "mode_std"] {
        header.extend((1..=k).map(|i| format!("{name}_{i}")));
    }
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let mut row = vec![r.snr_db.to_string(), r.trials.to_string(), r.failures.to_string()];
        for col in [&r.if_mean, &r.mode_mean, &r.if_std, &r.mode_std] {
            row.extend(col.iter().map(|v| format!("{v:.10e}")));
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn cmd_bench(cfg: &RunConfig) -> Result<Report, CliError> {
    let src = load_source(cfg)?;
    let (Some(truth), Some(parts)) = (src.truth, src.parts) else {
        return Err(CliError::Config("bench needs a builtin signal with known truth".into()));
    };
    let acfg = analysis_config(cfg, src.signal.sample_rate());
    let rows = bench(&src.signal, &truth, &parts, &acfg, &cfg.snrs, cfg.trials, cfg.seed)?;
    let files = vec![write_file(&cfg.out_dir, "bench.csv", |w| bench_csv(&rows, w))?];
    let mut summary = String::from("SNR (dB) | IF normalized MSE | mode normalized MSE | failures");
    for r in &rows {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
        let _ = write!(summary, "\n{:>8} | {} | {} | {}", r.snr_db, fmt(&r.if_mean), fmt(&r.mode_mean), r.failures);
    }
    Ok(Report { files, summary })
}

pub fn bounds_input(cfg: &RunConfig, truth: &GroundTruth, rate: f64) -> Result<BoundsInput, CliError> {
    let b = cfg.bounds_b;
    let (e1, e3) = truth.model_constants();
    let sigma = window_spec(cfg, rate).sigma_at(b)?;
    let if_max = cfg.if_max.unwrap_or(rate / 2.0);
    Ok(BoundsInput {
        eps1: cfg.eps1.unwrap_or(e1),
        eps3: cfg.eps3.unwrap_or(e3),
        sigma,
        mu: cfg.mu,
        delta: cfg.delta,
        delta1: cfg.delta1,
        a1: cfg.mu / if_max,
        a2: cfg.mu / cfg.if_min,
        amplitudes: truth.components.iter().map(|c| c.amplitude(b)).collect(),
        if_values: truth.components.iter().map(|c| c.inst_freq(b)).collect(),
        cr_values: truth.components.iter().map(|c| c.chirp_rate(b)).collect(),
        a_hat: None,
    })
}

pub fn cmd_bounds(cfg: &RunConfig) -> Result<Report, CliError> {
    let src = load_source(cfg)?;
    let Some(truth) = src.truth else {
        return Err(CliError::Config("bounds needs a builtin signal with known truth".into()));
    };
    let input = bounds_input(cfg, &truth, src.signal.sample_rate())?;
    let report = error_bounds(&input)?;
    let files = vec![write_file(&cfg.out_dir, "bounds.json", |w| {
        writeln!(w, "{}", report.to_json())?;
        Ok(())
    })?];
    let mut summary = format!(
        "b = {}: theorem-1 condition {}, all hypotheses {}",
        cfg.bounds_b,
        if report.theorem1_condition_ok { "holds" } else { "VIOLATED" },
        if report.all_hypotheses_ok() { "hold" } else { "VIOLATED" }
    );
    for c in &report.components {
        let bd = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4e}"));
        let _ = write!(
            summary,
            "\n  component {}: Err {:.4e}, bd1 {}, bd2 {}, bd3 {}{}",
            c.component,
            c.err_ell,
            bd(c.bd1),
            bd(c.bd2),
            bd(c.bd3),
            if c.hypothesis_ok { "" } else { " (c out of range)" }
        );
    }
    Ok(Report { files, summary })
}

pub fn cmd_slice(cfg: &RunConfig) -> Result<Report, CliError> {
    let src = load_source(cfg)?;
    let acfg = analysis_config(cfg, src.signal.sample_rate());
    let grid = TscrGrid::for_signal(&src.signal, &acfg.grid)?;
    let volume = compute_tscr(&src.signal, &grid, &acfg.window)?;
    let (slice, name) = match cfg.axis {
        Axis::B => (SliceAxis::B(cfg.value), "slice_b.csv"),
        Axis::A => (SliceAxis::A(cfg.value), "slice_a.csv"),
        Axis::Lambda => (SliceAxis::Lambda(cfg.value), "slice_lambda.csv"),
    };
    let files = vec![write_file(&cfg.out_dir, name, |w| volume.write_slice_csv(slice, w))?];
    let (nb, na, nl) = grid.shape();
    let summary = format!("volume {nb} x {na} x {nl} (b, a, lambda)");
    Ok(Report { files, summary })
}
