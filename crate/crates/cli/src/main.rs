use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tscr_cli::commands::Report;
use tscr_cli::{cmd_analyze, cmd_bench, cmd_bounds, cmd_slice, cmd_synth, CliError, RunConfig};

/// Time-scale-chirp_rate analysis of multicomponent signals.
#[derive(Parser)]
#[command(name = "tscr", version)]
struct Cli {
    /// INI-style configuration file (`[section]` headers, `key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    /// Override any setting, e.g. `--set window.sigma=0.03`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    sets: Vec<String>,

    #[command(flatten)]
    flags: Flags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a builtin signal and its truth table.
    Synth,
    /// Run the transform and ridge pipeline; write ridges and components.
    Analyze,
    /// Monte-Carlo IF and mode errors over a list of SNRs.
    Bench,
    /// Evaluate the theoretical error bounds at one instant.
    Bounds,
    /// Export one slice of the transform volume.
    Slice,
}

/// Shorthands for common settings.
#[derive(Args)]
struct Flags {
    /// example1, example2, tone or chirp.
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// Signal CSV with header `t,re,im`.
    #[arg(long, global = true)]
    input: Option<String>,
    /// real or complex synthesis.
    #[arg(long, global = true)]
    form: Option<String>,
    #[arg(long, global = true)]
    amplitude: Option<String>,
    /// Start frequency (Hz) of tone and chirp.
    #[arg(long, global = true)]
    c: Option<String>,
    /// Chirp rate (Hz/s) of chirp.
    #[arg(long, global = true)]
    r: Option<String>,
    #[arg(long, global = true)]
    duration: Option<String>,
    #[arg(long, global = true)]
    rate: Option<String>,
    /// Window width, constant or a `b:sigma, ...` table.
    #[arg(long, global = true)]
    sigma: Option<String>,
    #[arg(long, global = true)]
    voices: Option<String>,
    /// Expected number of components.
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    threshold: Option<String>,
    #[arg(long, global = true)]
    snr: Option<String>,
    /// Comma-separated SNR list for bench.
    #[arg(long, global = true)]
    snrs: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Slice axis: b, a or lambda.
    #[arg(long, global = true)]
    axis: Option<String>,
    /// Slice position on the axis.
    #[arg(long, global = true, allow_hyphen_values = true)]
    value: Option<String>,
    /// Time at which bounds are evaluated.
    #[arg(long, global = true)]
    at: Option<String>,
    #[arg(long, global = true)]
    eps1: Option<String>,
    #[arg(long, global = true)]
    eps3: Option<String>,
    #[arg(long, global = true)]
    delta: Option<String>,
    #[arg(long, global = true)]
    delta1: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(String, String)> {
        let pairs = [
            ("signal.builtin", &self.builtin),
            ("signal.input", &self.input),
            ("signal.form", &self.form),
            ("signal.amplitude", &self.amplitude),
            ("signal.c", &self.c),
            ("signal.r", &self.r),
            ("signal.duration", &self.duration),
            ("signal.rate", &self.rate),
            ("window.sigma", &self.sigma),
            ("grid.voices", &self.voices),
            ("detection.k", &self.k),
            ("detection.threshold", &self.threshold),
            ("noise.snr_db", &self.snr),
            ("noise.snrs", &self.snrs),
            ("noise.seed", &self.seed),
            ("noise.trials", &self.trials),
            ("slice.axis", &self.axis),
            ("slice.value", &self.value),
            ("bounds.b", &self.at),
            ("bounds.eps1", &self.eps1),
            ("bounds.eps3", &self.eps3),
            ("detection.delta", &self.delta),
            ("detection.delta1", &self.delta1),
            ("output.dir", &self.out),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let text = match &cli.config {
        Some(p) => Some(
            std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        ),
        None => None,
    };
    let mut overrides = Vec::new();
    for s in &cli.sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("`--set {s}` is not of the form section.key=value")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    // named flags win over --set
    overrides.extend(cli.flags.overrides());
    RunConfig::resolve(text.as_deref(), &overrides)
}

fn run(cli: &Cli) -> Result<Option<Report>, CliError> {
    let cfg = resolve(cli)?;
    if cli.dump_config {
        print!("{}", cfg.to_ini());
        return Ok(None);
    }
    let report = match cli.command {
        Command::Synth => cmd_synth(&cfg)?,
        Command::Analyze => cmd_analyze(&cfg)?,
        Command::Bench => cmd_bench(&cfg)?,
        Command::Bounds => cmd_bounds(&cfg)?,
        Command::Slice => cmd_slice(&cfg)?,
    };
    Ok(Some(report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(report)) => {
            println!("{}", report.summary);
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
