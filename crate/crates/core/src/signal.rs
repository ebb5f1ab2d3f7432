//! Signal containers, analytic ground truth, synthetic generators, noise and
//! error metrics.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{param, Error, Result};

/// A uniformly sampled, possibly complex, time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    sample_rate: f64,
    start_time: f64,
    is_real: bool,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, start_time: f64) -> Result<Self> {
        if samples.is_empty() {
            return param("signal must have at least one sample");
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return param(format!("sample rate must be positive, got {sample_rate}"));
        }
        let is_real = samples.iter().all(|s| s.im == 0.0);
        Ok(Self { samples, sample_rate, start_time, is_real })
    }

    pub fn from_real(samples: &[f64], sample_rate: f64, start_time: f64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            sample_rate,
            start_time,
        )
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn time(&self, n: usize) -> f64 {
        self.start_time + n as f64 / self.sample_rate
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.time(n)).collect()
    }

    /// Last sample instant.
    pub fn end_time(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real parts of the samples.
    pub fn real_part(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.re).collect()
    }

    pub fn scaled(&self, alpha: f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|s| s * alpha).collect(),
            ..self.clone()
        }
    }

    /// Writes `t,re,im` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,re,im")?;
        for (n, s) in self.samples.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", self.time(n), s.re, s.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Signal> {
        let mut times = Vec::new();
        let mut samples = Vec::new();
        let mut lines = input.lines();
        let header = lines.next().transpose()?;
        if header.as_deref().map(str::trim) != Some("t,re,im") {
            return Err(Error::Format("expected header `t,re,im`".into()));
        }
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields = parse_row(&line, 3, i + 2)?;
            times.push(fields[0]);
            samples.push(Complex64::new(fields[1], fields[2]));
        }
        if samples.is_empty() {
            return Err(Error::Format("signal file has no samples".into()));
        }
        let rate = if times.len() > 1 {
            let r = (times.len() - 1) as f64 / (times[times.len() - 1] - times[0]);
            // undo the rounding of the written time stamps
            if (r - r.round()).abs() < 1e-9 * r { r.round() } else { r }
        } else {
            1.0
        };
        Signal::new(samples, rate, times[0])
    }
}

pub(crate) fn parse_row(line: &str, width: usize, line_no: usize) -> Result<Vec<f64>> {
    let fields: Vec<f64> = line
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Format(format!("line {line_no}: {e}")))?;
    if fields.len() != width {
        return Err(Error::Format(format!(
            "line {line_no}: expected {width} fields, found {}",
            fields.len()
        )));
    }
    Ok(fields)
}

/// Shared scalar function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Analytic description of one component `A(t) e^{i2πφ(t)}`.
///
/// `eps1` and `eps3` are the model constants of the component: the relative
/// Lipschitz constant of the amplitude (`|A(t+τ) − A(t)| ≤ ε₁|τ|A(t)`) and the
/// bound `|φ'''| ≤ ε₃`.
#[derive(Clone)]
pub struct ComponentTruth {
    pub amplitude_fn: TimeFn,
    /// Phase in cycles.
    pub phase_fn: TimeFn,
    /// Instantaneous frequency in Hz.
    pub if_fn: TimeFn,
    /// Chirp rate in Hz/s.
    pub chirp_fn: TimeFn,
    pub eps1: f64,
    pub eps3: f64,
}

impl fmt::Debug for ComponentTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComponentTruth")
            .field("if(0)", &(self.if_fn)(0.0))
            .field("chirp(0)", &(self.chirp_fn)(0.0))
            .field("eps1", &self.eps1)
            .field("eps3", &self.eps3)
            .finish()
    }
}

impl ComponentTruth {
    pub fn amplitude(&self, t: f64) -> f64 {
        (self.amplitude_fn)(t)
    }

    pub fn phase(&self, t: f64) -> f64 {
        (self.phase_fn)(t)
    }

    pub fn inst_freq(&self, t: f64) -> f64 {
        (self.if_fn)(t)
    }

    pub fn chirp_rate(&self, t: f64) -> f64 {
        (self.chirp_fn)(t)
    }

    /// Complex value `A(t) e^{i2πφ(t)}`.
    pub fn complex_value(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude(t), 2.0 * PI * self.phase(t))
    }

    /// Real value `A(t) cos(2πφ(t))`.
    pub fn real_value(&self, t: f64) -> f64 {
        self.amplitude(t) * (2.0 * PI * self.phase(t)).cos()
    }

    /// Linear chirp `A e^{i2π(ct + rt²/2)}`.
    pub fn linear_chirp(amplitude: f64, c: f64, r: f64) -> Self {
        Self {
            amplitude_fn: Arc::new(move |_| amplitude),
            phase_fn: Arc::new(move |t| c * t + 0.5 * r * t * t),
            if_fn: Arc::new(move |t| c + r * t),
            chirp_fn: Arc::new(move |_| r),
            eps1: 0.0,
            eps3: 0.0,
        }
    }

    /// Sinusoidal FM: phase (radians) `2π·carrier·t + depth·cos(2π·mod_freq·t + offset)`.
    ///
    /// `depth` is the peak phase deviation in radians.
    pub fn sinusoidal_fm(amplitude: f64, carrier: f64, depth: f64, mod_freq: f64, offset: f64) -> Self {
        let w = 2.0 * PI * mod_freq;
        Self {
            amplitude_fn: Arc::new(move |_| amplitude),
            phase_fn: Arc::new(move |t| carrier * t + depth / (2.0 * PI) * (w * t + offset).cos()),
            if_fn: Arc::new(move |t| carrier - depth * mod_freq * (w * t + offset).sin()),
            chirp_fn: Arc::new(move |t| -depth * mod_freq * w * (w * t + offset).cos()),
            eps1: 0.0,
            eps3: (depth * mod_freq * w * w).abs(),
        }
    }

    /// Multiplies the amplitude by `1 + m cos(2π f_am t)` (`0 <= m < 1`).
    ///
    /// The resulting amplitude satisfies the relative Lipschitz condition with
    /// `ε₁ = 2π f_am m / (1 − m)`.
    pub fn with_amplitude_modulation(mut self, m: f64, f_am: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&m) || f_am < 0.0 {
            return param(format!("amplitude modulation needs 0 <= m < 1 and f >= 0, got m = {m}, f = {f_am}"));
        }
        let base = self.amplitude_fn.clone();
        self.amplitude_fn = Arc::new(move |t| base(t) * (1.0 + m * (2.0 * PI * f_am * t).cos()));
        // Base amplitude is constant for every built-in generator.
        self.eps1 += 2.0 * PI * f_am * m / (1.0 - m);
        Ok(self)
    }
}

/// Ordered list of component truths.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub components: Vec<ComponentTruth>,
}

impl GroundTruth {
    pub fn new(components: Vec<ComponentTruth>) -> Result<Self> {
        if components.is_empty() {
            return param("ground truth needs at least one component");
        }
        Ok(Self { components })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `max_k ε₁` and `max_k ε₃` over the components.
    pub fn model_constants(&self) -> (f64, f64) {
        self.components
            .iter()
            .fold((0.0f64, 0.0f64), |(e1, e3), c| (e1.max(c.eps1), e3.max(c.eps3)))
    }

    /// Writes `t,if_1..K,cr_1..K` evaluated on the signal's time grid.
    pub fn write_csv<W: Write>(&self, times: &[f64], mut out: W) -> Result<()> {
        let k = self.len();
        let mut header = vec!["t".to_string()];
        header.extend((1..=k).map(|i| format!("if_{i}")));
        header.extend((1..=k).map(|i| format!("cr_{i}")));
        writeln!(out, "{}", header.join(","))?;
        for &t in times {
            let mut row = vec![format!("{t:.16e}")];
            row.extend(self.components.iter().map(|c| format!("{:.16e}", c.inst_freq(t))));
            row.extend(self.components.iter().map(|c| format!("{:.16e}", c.chirp_rate(t))));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Real cosine or complex exponential synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Form {
    #[default]
    Real,
    Complex,
}

fn sample_count(duration: f64, rate: f64) -> Result<usize> {
    if !(rate > 0.0 && rate.is_finite()) {
        return param(format!("sample rate must be positive, got {rate}"));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return param(format!("duration must be positive, got {duration}"));
    }
    // Samples at t = n/rate for t in [0, duration).
    Ok(((duration * rate) - 1e-9).ceil().max(1.0) as usize)
}

/// Samples a component on `t = n/rate`, `t ∈ [0, duration)`.
pub fn synthesize(truth: &ComponentTruth, duration: f64, rate: f64, form: Form) -> Result<Signal> {
    let n = sample_count(duration, rate)?;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            match form {
                Form::Real => Complex64::new(truth.real_value(t), 0.0),
                Form::Complex => truth.complex_value(t),
            }
        })
        .collect();
    let mut s = Signal::new(samples, rate, 0.0)?;
    s.is_real = form == Form::Real;
    Ok(s)
}

/// `A cos(2πct + πrt²)` (or its complex exponential form).
pub fn gen_linear_chirp(
    amplitude: f64,
    c: f64,
    r: f64,
    duration: f64,
    rate: f64,
    form: Form,
) -> Result<(Signal, ComponentTruth)> {
    let truth = ComponentTruth::linear_chirp(amplitude, c, r);
    Ok((synthesize(&truth, duration, rate, form)?, truth))
}

/// `cos(2π·carrier·t + depth·cos(2π·mod_freq·t + phase_offset))`, unit amplitude.
pub fn gen_sinusoidal_fm(
    carrier: f64,
    depth: f64,
    mod_freq: f64,
    phase_offset: f64,
    duration: f64,
    rate: f64,
    form: Form,
) -> Result<(Signal, ComponentTruth)> {
    let truth = ComponentTruth::sinusoidal_fm(1.0, carrier, depth, mod_freq, phase_offset);
    Ok((synthesize(&truth, duration, rate, form)?, truth))
}

/// Pointwise sum of signals on a common grid.
pub fn mix(signals: &[Signal]) -> Result<Signal> {
    let first = signals.first().ok_or_else(|| Error::Parameter("nothing to mix".into()))?;
    for s in &signals[1..] {
        if s.len() != first.len() || s.sample_rate != first.sample_rate || s.start_time != first.start_time {
            return Err(Error::GridMismatch(format!(
                "({} samples, {} Hz, t0 = {}) vs ({} samples, {} Hz, t0 = {})",
                first.len(),
                first.sample_rate,
                first.start_time,
                s.len(),
                s.sample_rate,
                s.start_time
            )));
        }
    }
    let mut samples = first.samples.clone();
    for s in &signals[1..] {
        for (acc, v) in samples.iter_mut().zip(&s.samples) {
            *acc += v;
        }
    }
    Ok(Signal {
        samples,
        sample_rate: first.sample_rate,
        start_time: first.start_time,
        is_real: signals.iter().all(|s| s.is_real),
    })
}

/// Adds white Gaussian noise so that `10·log10(‖y‖₂/‖n‖₂) = snr_db` exactly.
///
/// Real signals get real noise, complex signals circular complex noise. The
/// noise vector is drawn from a ChaCha20 stream seeded by `seed` and then
/// rescaled to the exact norm.
pub fn add_noise(signal: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    let norm = signal.norm();
    if norm <= 0.0 {
        return param("cannot scale noise to a zero signal");
    }
    if !snr_db.is_finite() {
        return param(format!("SNR must be finite, got {snr_db}"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let noise: Vec<Complex64> = (0..signal.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            if signal.is_real {
                Complex64::new(re, 0.0)
            } else {
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            }
        })
        .collect();
    let noise_norm = noise.iter().map(|n| n.norm_sqr()).sum::<f64>().sqrt();
    let scale = norm * 10f64.powf(-snr_db / 10.0) / noise_norm;
    Ok(Signal {
        samples: signal.samples.iter().zip(&noise).map(|(s, n)| s + n * scale).collect(),
        ..signal.clone()
    })
}

/// Relative error `‖f − f̃‖₂ / ‖f‖₂`.
pub fn normalized_mse(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return param(format!(
            "length mismatch: reference {} vs estimate {}",
            reference.len(),
            estimate.len()
        ));
    }
    let ref_norm = reference.iter().map(|x| x * x).sum::<f64>().sqrt();
    if ref_norm <= 0.0 {
        return param("reference has zero norm");
    }
    let diff = reference
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(diff / ref_norm)
}

/// The two-chirp test signal: `cos(2π21t + π67t²) + cos(2π71t − π61t²)`,
/// 192 samples at 256 Hz.
pub fn example1(form: Form) -> Result<(Signal, GroundTruth)> {
    let (x1, t1) = gen_linear_chirp(1.0, 21.0, 67.0, 0.75, 256.0, form)?;
    let (x2, t2) = gen_linear_chirp(1.0, 71.0, -61.0, 0.75, 256.0, form)?;
    Ok((mix(&[x1, x2])?, GroundTruth::new(vec![t1, t2])?))
}

/// The three-component micro-Doppler signal on `t ∈ [0, 1)` at 256 Hz: two
/// sinusoidal-FM components with IFs `41 ∓ 25 cos(πt)` and a 41 Hz tone.
pub fn example2(form: Form) -> Result<(Signal, GroundTruth, Vec<Signal>)> {
    let (y1, t1) = gen_sinusoidal_fm(41.0, 50.0, 0.5, PI / 2.0, 1.0, 256.0, form)?;
    let (y2, t2) = gen_sinusoidal_fm(41.0, 0.0, 0.5, 0.0, 1.0, 256.0, form)?;
    let (y3, t3) = gen_sinusoidal_fm(41.0, 50.0, 0.5, -PI / 2.0, 1.0, 256.0, form)?;
    let parts = vec![y1, y2, y3];
    Ok((mix(&parts)?, GroundTruth::new(vec![t1, t2, t3])?, parts))
}
