//! Run configuration: builtin presets, an INI-style file and command-line
//! overrides, applied in that order.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use ini::Ini;
use tscr::signal::Form;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Example1,
    Example2,
    Tone,
    Chirp,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Example1 => "example1",
            Builtin::Example2 => "example2",
            Builtin::Tone => "tone",
            Builtin::Chirp => "chirp",
        }
    }
}

impl FromStr for Builtin {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "example1" => Ok(Builtin::Example1),
            "example2" => Ok(Builtin::Example2),
            "tone" => Ok(Builtin::Tone),
            "chirp" => Ok(Builtin::Chirp),
            _ => Err(CliError::Config(format!(
                "unknown builtin `{s}` (expected example1, example2, tone or chirp)"
            ))),
        }
    }
}

/// Window width in seconds-per-sample units: the value is multiplied by the
/// sample rate to give the dimensionless `σ` of the transform.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSetting {
    Constant(f64),
    Table(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    B,
    A,
    Lambda,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // [signal]
    pub builtin: Option<Builtin>,
    pub input: Option<PathBuf>,
    pub form: Form,
    pub amplitude: f64,
    pub c: f64,
    pub r: f64,
    pub duration: f64,
    pub rate: f64,
    // [grid]
    pub voices: u32,
    pub if_min: f64,
    /// `None` means Nyquist.
    pub if_max: Option<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
    // [window]
    pub sigma: SigmaSetting,
    pub mu: f64,
    pub truncation: f64,
    pub renormalize: bool,
    // [detection]
    pub threshold_mode: ThresholdMode,
    pub threshold: f64,
    pub k: Option<usize>,
    pub delta: f64,
    pub delta1: f64,
    pub min_length: f64,
    pub gate: f64,
    pub max_gap: usize,
    pub refine: bool,
    // [noise]
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub trials: usize,
    pub snrs: Vec<f64>,
    // [bounds]
    pub bounds_b: f64,
    pub eps1: Option<f64>,
    pub eps3: Option<f64>,
    // [slice]
    pub axis: Axis,
    pub value: f64,
    // [output]
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            builtin: None,
            input: None,
            form: Form::Real,
            amplitude: 1.0,
            c: 41.0,
            r: 0.0,
            duration: 1.0,
            rate: 256.0,
            voices: 32,
            if_min: 2.0,
            if_max: None,
            lambda_min: -128.0,
            lambda_max: 128.0,
            lambda_count: 129,
            sigma: SigmaSetting::Constant(0.023),
            mu: 1.0,
            truncation: 5.0,
            renormalize: false,
            threshold_mode: ThresholdMode::Relative,
            threshold: 0.3,
            k: None,
            delta: 0.2,
            delta1: 30.0,
            min_length: 0.05,
            gate: 0.1,
            max_gap: 16,
            refine: false,
            snr_db: None,
            seed: 1,
            trials: 20,
            snrs: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            bounds_b: 0.5,
            eps1: None,
            eps3: None,
            axis: Axis::Lambda,
            value: 0.0,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Defaults tuned for a builtin signal.
    pub fn preset(builtin: Builtin) -> Self {
        let base = Self { builtin: Some(builtin), ..Self::default() };
        match builtin {
            Builtin::Example1 => Self { duration: 0.75, k: Some(2), delta1: 60.0, ..base },
            Builtin::Example2 => Self {
                if_min: 4.0,
                lambda_min: -260.0,
                lambda_max: 260.0,
                lambda_count: 131,
                // hand-tuned: narrow near the ends, wide at the crossover
                sigma: SigmaSetting::Table(vec![
                    (0.0, 0.01953125),
                    (0.35, 0.0234375),
                    (0.5, 0.046875),
                    (0.65, 0.0234375),
                    (1.0, 0.01953125),
                ]),
                renormalize: true,
                threshold: 0.6,
                k: Some(3),
                ..base
            },
            Builtin::Tone => Self { k: Some(1), ..base },
            Builtin::Chirp => Self { c: 21.0, r: 67.0, k: Some(1), ..base },
        }
    }

    /// Resolves a configuration from optional file contents and ordered
    /// `section.key = value` overrides. A builtin named in either source
    /// selects the preset the rest is applied on.
    pub fn resolve(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut entries = match file {
            Some(text) => parse_ini(text)?,
            None => Vec::new(),
        };
        entries.extend(overrides.iter().cloned());
        let builtin = entries
            .iter()
            .rev()
            .find(|(k, _)| k == "signal.builtin")
            .map(|(_, v)| v.as_str());
        let mut cfg = match builtin {
            Some("none") => Self::default(),
            Some(name) => Self::preset(name.parse()?),
            None => Self::default(),
        };
        for (key, value) in &entries {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "signal.builtin" => self.builtin = opt(v, str::parse)?,
            "signal.input" => self.input = opt(v, |s| Ok::<_, CliError>(PathBuf::from(s)))?,
            "signal.form" => {
                self.form = match v {
                    "real" => Form::Real,
                    "complex" => Form::Complex,
                    _ => return Err(bad(key, v)),
                }
            }
            "signal.amplitude" => self.amplitude = num(key, v)?,
            "signal.c" => self.c = num(key, v)?,
            "signal.r" => self.r = num(key, v)?,
            "signal.duration" => self.duration = num(key, v)?,
            "signal.rate" => self.rate = num(key, v)?,
            "grid.voices" => self.voices = num(key, v)?,
            "grid.if_min" => self.if_min = num(key, v)?,
            "grid.if_max" => {
                self.if_max = if v == "nyquist" { None } else { Some(num(key, v)?) };
            }
            "grid.lambda_min" => self.lambda_min = num(key, v)?,
            "grid.lambda_max" => self.lambda_max = num(key, v)?,
            "grid.lambda_count" => self.lambda_count = num(key, v)?,
            "window.sigma" => self.sigma = parse_sigma(v).ok_or_else(|| bad(key, v))?,
            "window.mu" => self.mu = num(key, v)?,
            "window.truncation" => self.truncation = num(key, v)?,
            "window.renormalize" => self.renormalize = num(key, v)?,
            "detection.threshold_mode" => {
                self.threshold_mode = match v {
                    "relative" => ThresholdMode::Relative,
                    "absolute" => ThresholdMode::Absolute,
                    _ => return Err(bad(key, v)),
                }
            }
            "detection.threshold" => self.threshold = num(key, v)?,
            "detection.k" => self.k = opt(v, |s| num(key, s))?,
            "detection.delta" => self.delta = num(key, v)?,
            "detection.delta1" => self.delta1 = num(key, v)?,
            "detection.min_length" => self.min_length = num(key, v)?,
            "detection.gate" => self.gate = num(key, v)?,
            "detection.max_gap" => self.max_gap = num(key, v)?,
            "detection.refine" => self.refine = num(key, v)?,
            "noise.snr_db" => self.snr_db = opt(v, |s| num(key, s))?,
            "noise.seed" => self.seed = num(key, v)?,
            "noise.trials" => self.trials = num(key, v)?,
            "noise.snrs" => {
                self.snrs = v
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "bounds.b" => self.bounds_b = num(key, v)?,
            "bounds.eps1" => self.eps1 = opt(v, |s| num(key, s))?,
            "bounds.eps3" => self.eps3 = opt(v, |s| num(key, s))?,
            "slice.axis" => {
                self.axis = match v {
                    "b" => Axis::B,
                    "a" => Axis::A,
                    "lambda" => Axis::Lambda,
                    _ => return Err(bad(key, v)),
                }
            }
            "slice.value" => self.value = num(key, v)?,
            "output.dir" => self.out_dir = PathBuf::from(v),
            _ => return Err(CliError::Config(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    /// Checks ranges that do not depend on the signal.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Config(m.to_string()));
        if self.builtin.is_some() && self.input.is_some() {
            return fail("signal.builtin and signal.input are mutually exclusive");
        }
        if !(self.if_min > 0.0) {
            return fail("grid.if_min must be positive");
        }
        if let Some(hi) = self.if_max {
            if !(hi > self.if_min) {
                return fail("grid.if_max must exceed grid.if_min");
            }
        }
        if self.voices == 0 {
            return fail("grid.voices must be positive");
        }
        if !(self.lambda_max >= self.lambda_min) || self.lambda_count == 0 {
            return fail("lambda range is empty");
        }
        if self.lambda_count == 1 && self.lambda_max != self.lambda_min {
            return fail("a single lambda point needs lambda_min = lambda_max");
        }
        match &self.sigma {
            SigmaSetting::Constant(s) if !(*s > 0.0) => return fail("window.sigma must be positive"),
            SigmaSetting::Table(t) => {
                if t.iter().any(|&(_, s)| !(s > 0.0)) {
                    return fail("window.sigma table values must be positive");
                }
                if t.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return fail("window.sigma table times must increase");
                }
            }
            _ => {}
        }
        if self.threshold_mode == ThresholdMode::Relative && !(self.threshold > 0.0 && self.threshold < 1.0) {
            return fail("a relative threshold must lie in (0, 1)");
        }
        if self.k == Some(0) {
            return fail("detection.k must be at least 1");
        }
        if self.trials == 0 {
            return fail("noise.trials must be at least 1");
        }
        if self.snrs.is_empty() {
            return fail("noise.snrs is empty");
        }
        Ok(())
    }

    /// Checks that the IF range fits below the Nyquist frequency of `rate`.
    pub fn validate_for_rate(&self, rate: f64) -> Result<(), CliError> {
        let nyquist = rate / 2.0;
        if self.if_min >= nyquist || self.if_max.is_some_and(|hi| hi > nyquist) {
            return Err(CliError::Config(format!(
                "IF range must lie within (0, {nyquist}] Hz for a {rate} Hz signal"
            )));
        }
        Ok(())
    }

    /// The resolved configuration as INI text; feeding it back through
    /// [`RunConfig::resolve`] gives the same configuration.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let none = || "none".to_string();
        let f = |x: f64| x.to_string();
        let sections: Vec<(&str, Vec<(&str, String)>)> = vec![
            (
                "signal",
                vec![
                    ("builtin", self.builtin.map_or_else(none, |b| b.name().into())),
                    ("input", self.input.as_ref().map_or_else(none, |p| p.display().to_string())),
                    ("form", if self.form == Form::Real { "real" } else { "complex" }.into()),
                    ("amplitude", f(self.amplitude)),
                    ("c", f(self.c)),
                    ("r", f(self.r)),
                    ("duration", f(self.duration)),
                    ("rate", f(self.rate)),
                ],
            ),
            (
                "grid",
                vec![
                    ("voices", self.voices.to_string()),
                    ("if_min", f(self.if_min)),
                    ("if_max", self.if_max.map_or_else(|| "nyquist".into(), f)),
                    ("lambda_min", f(self.lambda_min)),
                    ("lambda_max", f(self.lambda_max)),
                    ("lambda_count", self.lambda_count.to_string()),
                ],
            ),
            (
                "window",
                vec![
                    ("sigma", sigma_text(&self.sigma)),
                    ("mu", f(self.mu)),
                    ("truncation", f(self.truncation)),
                    ("renormalize", self.renormalize.to_string()),
                ],
            ),
            (
                "detection",
                vec![
                    (
                        "threshold_mode",
                        match self.threshold_mode {
                            ThresholdMode::Relative => "relative",
                            ThresholdMode::Absolute => "absolute",
                        }
                        .into(),
                    ),
                    ("threshold", f(self.threshold)),
                    ("k", self.k.map_or_else(none, |k| k.to_string())),
                    ("delta", f(self.delta)),
                    ("delta1", f(self.delta1)),
                    ("min_length", f(self.min_length)),
                    ("gate", f(self.gate)),
                    ("max_gap", self.max_gap.to_string()),
                    ("refine", self.refine.to_string()),
                ],
            ),
            (
                "noise",
                vec![
                    ("snr_db", self.snr_db.map_or_else(none, f)),
                    ("seed", self.seed.to_string()),
                    ("trials", self.trials.to_string()),
                    ("snrs", self.snrs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
                ],
            ),
            (
                "bounds",
                vec![
                    ("b", f(self.bounds_b)),
                    ("eps1", self.eps1.map_or_else(none, f)),
                    ("eps3", self.eps3.map_or_else(none, f)),
                ],
            ),
            (
                "slice",
                vec![
                    (
                        "axis",
                        match self.axis {
                            Axis::B => "b",
                            Axis::A => "a",
                            Axis::Lambda => "lambda",
                        }
                        .into(),
                    ),
                    ("value", f(self.value)),
                ],
            ),
            ("output", vec![("dir", self.out_dir.display().to_string())]),
        ];
        for (i, (name, keys)) in sections.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            let _ = writeln!(s, "[{name}]");
            for (k, v) in keys {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        s
    }
}

/// Flattens INI text into `section.key` entries in file order.
pub fn parse_ini(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))?;
    let mut out = Vec::new();
    for (section, props) in ini.iter() {
        for (k, v) in props.iter() {
            match section {
                Some(sec) => out.push((format!("{sec}.{k}"), v.to_string())),
                None => return Err(CliError::Config(format!("setting `{k}` is outside any section"))),
            }
        }
    }
    Ok(out)
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Config(format!("invalid value `{value}` for `{key}`"))
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| bad(key, value))
}

fn opt<T>(value: &str, parse: impl FnOnce(&str) -> Result<T, CliError>) -> Result<Option<T>, CliError> {
    if value == "none" || value.is_empty() {
        Ok(None)
    } else {
        parse(value).map(Some)
    }
}

/// `0.023` or a knot table `b:σ, b:σ, ...`.
fn parse_sigma(v: &str) -> Option<SigmaSetting> {
    if !v.contains(':') {
        return v.parse().ok().map(SigmaSetting::Constant);
    }
    let knots = v
        .split(',')
        .map(|pair| {
            let (b, s) = pair.split_once(':')?;
            Some((b.trim().parse().ok()?, s.trim().parse().ok()?))
        })
        .collect::<Option<Vec<(f64, f64)>>>()?;
    (!knots.is_empty()).then_some(SigmaSetting::Table(knots))
}

fn sigma_text(s: &SigmaSetting) -> String {
    match s {
        SigmaSetting::Constant(v) => v.to_string(),
        SigmaSetting::Table(t) => t.iter().map(|(b, s)| format!("{b}:{s}")).collect::<Vec<_>>().join(", "),
    }
}
