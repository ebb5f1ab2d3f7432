//! Peak extraction in the `(a, λ)` plane and ridge tracking across `b`.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::grid::TscrGrid;
use crate::signal::parse_row;
use crate::transform::TscrVolume;

/// Separation constants `△`, `△₁` and the detection threshold `ε̃₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationParams {
    pub delta: f64,
    pub delta1: f64,
    pub threshold: f64,
}

impl SeparationParams {
    pub fn new(delta: f64, delta1: f64, threshold: f64) -> Result<Self> {
        let p = Self { delta, delta1, threshold };
        p.validate()?;
        Ok(p)
    }

    /// Threshold set to `fraction` of the largest magnitude in `volume`.
    pub fn relative(delta: f64, delta1: f64, fraction: f64, volume: &TscrVolume) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return param(format!("relative threshold must lie in (0, 1), got {fraction}"));
        }
        let max = volume.max_abs();
        if max <= 0.0 {
            return Err(Error::NoRidges);
        }
        Self::new(delta, delta1, fraction * max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return param(format!("△ must lie in (0, 1), got {}", self.delta));
        }
        if !(self.delta1 > 0.0 && self.delta1.is_finite()) {
            return param(format!("△₁ must be positive, got {}", self.delta1));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return param(format!("threshold must be positive, got {}", self.threshold));
        }
        Ok(())
    }
}

/// Whether `(a, λ)` lies in the zone `|μ − a·f| < △`, `|λ − r| < △₁`.
pub fn zone_contains(mu: f64, params: &SeparationParams, inst_freq: f64, chirp_rate: f64, a: f64, lambda: f64) -> bool {
    (mu - a * inst_freq).abs() < params.delta && (lambda - chirp_rate).abs() < params.delta1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub a: f64,
    pub lambda: f64,
    pub a_index: usize,
    pub lambda_index: usize,
    pub value: Complex64,
    pub magnitude: f64,
}

/// Above-threshold local maxima at one `b`, by descending magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSet {
    pub b: f64,
    pub b_index: usize,
    pub peaks: Vec<Peak>,
}

// Descending magnitude; ties by smaller a, then smaller λ.
fn peak_order(p: &Peak, q: &Peak) -> std::cmp::Ordering {
    q.magnitude
        .total_cmp(&p.magnitude)
        .then(p.a_index.cmp(&q.a_index))
        .then(p.lambda_index.cmp(&q.lambda_index))
}

/// Strict 8-neighbourhood local maxima of `|U(·, b, ·)|` above the threshold.
///
/// On an axis with at least three values the end nodes are never reported: a
/// magnitude still rising at the edge of the grid is not a located maximum.
///
/// Maxima closer than one zone width (`2△a/μ` in scale and `2△₁` in λ) to a
/// larger one are dropped.
pub fn extract_peaks(volume: &TscrVolume, b_index: usize, params: &SeparationParams) -> Result<PeakSet> {
    params.validate()?;
    let grid = volume.grid();
    let (nb, na, nl) = grid.shape();
    if b_index >= nb {
        return param(format!("b index {b_index} out of range (grid has {nb})"));
    }
    let plane = volume.plane(b_index);
    let mag: Vec<f64> = plane.iter().map(|v| v.norm()).collect();
    let inner = |n: usize| if n >= 3 { 1..n - 1 } else { 0..n };
    let mut found = Vec::new();
    for ia in inner(na) {
        for il in inner(nl) {
            let m = mag[ia * nl + il];
            if m <= params.threshold {
                continue;
            }
            let mut is_max = true;
            'nb: for da in -1i64..=1 {
                for dl in -1i64..=1 {
                    if da == 0 && dl == 0 {
                        continue;
                    }
                    let (ja, jl) = (ia as i64 + da, il as i64 + dl);
                    if ja < 0 || jl < 0 || ja >= na as i64 || jl >= nl as i64 {
                        continue;
                    }
                    if mag[ja as usize * nl + jl as usize] >= m {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                found.push(Peak {
                    a: grid.a_values()[ia],
                    lambda: grid.lambda_values()[il],
                    a_index: ia,
                    lambda_index: il,
                    value: plane[ia * nl + il],
                    magnitude: m,
                });
            }
        }
    }
    found.sort_by(peak_order);
    let mu = volume.mu();
    let mut kept: Vec<Peak> = Vec::new();
    for p in found {
        let close = kept.iter().any(|k| {
            (p.a - k.a).abs() < params.delta * k.a / mu && (p.lambda - k.lambda).abs() < params.delta1
        });
        if !close {
            kept.push(p);
        }
    }
    Ok(PeakSet { b: grid.b_values()[b_index], b_index, peaks: kept })
}

/// [`extract_peaks`] for every `b` of the volume.
pub fn extract_all(volume: &TscrVolume, params: &SeparationParams) -> Result<Vec<PeakSet>> {
    (0..volume.grid().shape().0)
        .into_par_iter()
        .map(|ib| extract_peaks(volume, ib, params))
        .collect()
}

/// Sub-grid peak location by parabolic interpolation of `ln|U|` along the
/// `ln a` and `λ` axes. Falls back to the grid value at the axis ends.
pub fn refine_peak(volume: &TscrVolume, b_index: usize, peak: &Peak) -> (f64, f64) {
    let grid = volume.grid();
    let (_, na, nl) = grid.shape();
    let ln_mag = |ia: usize, il: usize| volume.get(b_index, ia, il).norm().max(f64::MIN_POSITIVE).ln();
    let vertex = |x: [f64; 3], y: [f64; 3]| -> Option<f64> {
        let d1 = (y[1] - y[0]) / (x[1] - x[0]);
        let d2 = (y[2] - y[1]) / (x[2] - x[1]);
        let curv = (d2 - d1) / (x[2] - x[0]);
        if curv >= 0.0 {
            return None;
        }
        // vertex of the parabola through the three points
        let v = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curv);
        (v >= x[0] && v <= x[2]).then_some(v)
    };
    let (ia, il) = (peak.a_index, peak.lambda_index);
    let a = if ia > 0 && ia + 1 < na {
        let x = [ia - 1, ia, ia + 1].map(|i| grid.a_values()[i].ln());
        let y = [ia - 1, ia, ia + 1].map(|i| ln_mag(i, il));
        vertex(x, y).map_or(peak.a, f64::exp)
    } else {
        peak.a
    };
    let lambda = if il > 0 && il + 1 < nl {
        let x = [il - 1, il, il + 1].map(|i| grid.lambda_values()[i]);
        let y = [il - 1, il, il + 1].map(|i| ln_mag(ia, i));
        vertex(x, y).unwrap_or(peak.lambda)
    } else {
        peak.lambda
    };
    (a, lambda)
}

/// Maximizer of `|U|` over the grid nodes of the zone around
/// `(zone_a, zone_lambda)`, where the zone IF is `μ/zone_a`.
///
/// Ties go to the smaller scale, then the smaller chirp rate.
pub fn argmax_in_zone(
    volume: &TscrVolume,
    b_index: usize,
    zone_a: f64,
    zone_lambda: f64,
    params: &SeparationParams,
) -> Result<(f64, f64, Complex64)> {
    params.validate()?;
    let grid = volume.grid();
    let (nb, _, _) = grid.shape();
    if b_index >= nb {
        return param(format!("b index {b_index} out of range (grid has {nb})"));
    }
    if !(zone_a > 0.0) {
        return param(format!("zone scale must be positive, got {zone_a}"));
    }
    let mu = volume.mu();
    let f = mu / zone_a;
    let mut best: Option<(f64, usize, usize)> = None;
    for (ia, &a) in grid.a_values().iter().enumerate() {
        for (il, &l) in grid.lambda_values().iter().enumerate() {
            if !zone_contains(mu, params, f, zone_lambda, a, l) {
                continue;
            }
            let m = volume.get(b_index, ia, il).norm();
            // strict comparison keeps the first (smallest a, then λ) on ties
            if best.is_none_or(|(bm, _, _)| m > bm) {
                best = Some((m, ia, il));
            }
        }
    }
    match best {
        Some((m, ia, il)) if m > params.threshold => {
            Ok((grid.a_values()[ia], grid.lambda_values()[il], volume.get(b_index, ia, il)))
        }
        _ => Err(Error::NonEmptyViolation { b: grid.b_values()[b_index] }),
    }
}

/// Frame-to-frame association settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingParams {
    pub mu: f64,
    /// Normalizer for IF differences, Hz.
    pub if_span: f64,
    /// Normalizer for chirp-rate differences, Hz/s.
    pub lambda_span: f64,
    /// Largest normalized distance accepted as a continuation.
    pub gate: f64,
    /// Frames a track may go unmatched and still be continued.
    pub max_gap: usize,
    /// Tracks covering fewer than this fraction of frames are dropped.
    pub min_length_fraction: f64,
}

impl TrackingParams {
    pub fn for_grid(grid: &TscrGrid, mu: f64) -> Self {
        let a = grid.a_values();
        let l = grid.lambda_values();
        Self {
            mu,
            if_span: (mu / a[0] - mu / a[a.len() - 1]).max(f64::MIN_POSITIVE),
            lambda_span: (l[l.len() - 1] - l[0]).max(1.0),
            gate: 0.1,
            max_gap: 16,
            min_length_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgePoint {
    pub b: f64,
    pub b_index: usize,
    pub a_hat: f64,
    pub lambda_hat: f64,
    pub value: Complex64,
    /// Filled across a gap rather than detected.
    pub interpolated: bool,
}

/// One component trajectory over a contiguous run of `b` frames.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ridge {
    pub points: Vec<RidgePoint>,
}

impl Ridge {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn b_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.b).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSet {
    pub mu: f64,
    pub ridges: Vec<Ridge>,
}

impl RidgeSet {
    pub fn len(&self) -> usize {
        self.ridges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ridges.is_empty()
    }

    /// Writes `component,b,a_hat,lambda_hat,if_hat,re,im,abs` rows,
    /// components numbered from 1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "component,b,a_hat,lambda_hat,if_hat,re,im,abs")?;
        for (k, r) in self.ridges.iter().enumerate() {
            for p in &r.points {
                writeln!(
                    out,
                    "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    k + 1,
                    p.b,
                    p.a_hat,
                    p.lambda_hat,
                    self.mu / p.a_hat,
                    p.value.re,
                    p.value.im,
                    p.value.norm()
                )?;
            }
        }
        Ok(())
    }

    /// Reads a ridge CSV. `μ` is recovered from `if_hat·a_hat`; frame
    /// indices are not stored and are numbered per ridge.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?;
        if header.as_deref().map(str::trim) != Some("component,b,a_hat,lambda_hat,if_hat,re,im,abs") {
            return Err(Error::Format("unexpected ridge header".into()));
        }
        let mut ridges: Vec<Ridge> = Vec::new();
        let mut mu = None;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f = parse_row(&line, 8, i + 2)?;
            let k = f[0] as usize;
            if f[0] < 1.0 || f[0].fract() != 0.0 || k > ridges.len() + 1 {
                return Err(Error::Format(format!("line {}: bad component number {}", i + 2, f[0])));
            }
            if k == ridges.len() + 1 {
                ridges.push(Ridge::default());
            }
            mu.get_or_insert(f[4] * f[2]);
            let r = &mut ridges[k - 1];
            r.points.push(RidgePoint {
                b: f[1],
                b_index: r.points.len(),
                a_hat: f[2],
                lambda_hat: f[3],
                value: Complex64::new(f[5], f[6]),
                interpolated: false,
            });
        }
        Ok(Self { mu: mu.unwrap_or(1.0), ridges })
    }
}

struct Track {
    frames: Vec<(usize, Peak)>,
    strength: f64,
}

impl Track {
    fn last(&self) -> &(usize, Peak) {
        self.frames.last().expect("tracks are never empty")
    }
}

/// Links per-frame peaks into trajectories by greedy nearest-neighbour
/// association.
///
/// The position of a track is predicted at the new frame from its last IF and
/// chirp rate (the chirp rate is the IF slope). Candidate pairs closer than the
/// gate are accepted cheapest first. Tracks that stay unmatched longer than
/// `max_gap` frames are closed; short tracks are dropped.
///
/// With `k_expected`, the `k` longest (then strongest) tracks are kept and
/// interior gaps are filled by linear interpolation of `(μ/a, λ)`; the
/// interpolated points carry a zero value until re-evaluated.
pub fn track_ridges(peak_sets: &[PeakSet], k_expected: Option<usize>, params: &TrackingParams) -> Result<RidgeSet> {
    if !(params.mu > 0.0 && params.if_span > 0.0 && params.lambda_span > 0.0 && params.gate > 0.0) {
        return param("tracking parameters must be positive");
    }
    let mu = params.mu;
    let mut done: Vec<Track> = Vec::new();
    let mut active: Vec<Track> = Vec::new();
    for (f, set) in peak_sets.iter().enumerate() {
        let (still, closed): (Vec<Track>, Vec<Track>) =
            active.into_iter().partition(|t| f - t.last().0 <= params.max_gap + 1);
        done.extend(closed);
        active = still;

        let mut pairs = Vec::new();
        for (ti, t) in active.iter().enumerate() {
            let (lf, lp) = t.last();
            let db = set.b - peak_sets[*lf].b;
            let if_pred = mu / lp.a + lp.lambda * db;
            for (pi, p) in set.peaks.iter().enumerate() {
                let cost = (mu / p.a - if_pred).abs() / params.if_span
                    + (p.lambda - lp.lambda).abs() / params.lambda_span;
                if cost < params.gate {
                    pairs.push((cost, ti, pi));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut track_used = vec![false; active.len()];
        let mut peak_used = vec![false; set.peaks.len()];
        for (_, ti, pi) in pairs {
            if track_used[ti] || peak_used[pi] {
                continue;
            }
            track_used[ti] = true;
            peak_used[pi] = true;
            let p = set.peaks[pi];
            active[ti].frames.push((f, p));
            active[ti].strength += p.magnitude;
        }
        for (pi, p) in set.peaks.iter().enumerate() {
            if !peak_used[pi] {
                active.push(Track { frames: vec![(f, *p)], strength: p.magnitude });
            }
        }
    }
    done.extend(active);

    let min_len = (params.min_length_fraction * peak_sets.len() as f64).ceil().max(1.0) as usize;
    let span = |t: &Track| t.last().0 - t.frames[0].0 + 1;
    done.retain(|t| t.frames.len() >= min_len);
    if let Some(k) = k_expected {
        if done.len() < k {
            return Err(Error::TooFewRidges { expected: k, found: done.len() });
        }
        done.sort_by(|x, y| {
            y.frames
                .len()
                .cmp(&x.frames.len())
                .then(y.strength.total_cmp(&x.strength))
                .then(x.frames[0].0.cmp(&y.frames[0].0))
        });
        done.truncate(k);
    }
    // Output order: by start frame, then by IF at the start.
    done.sort_by(|x, y| {
        x.frames[0]
            .0
            .cmp(&y.frames[0].0)
            .then(x.frames[0].1.a.total_cmp(&y.frames[0].1.a).reverse())
            .then(span(x).cmp(&span(y)))
    });

    let fill = k_expected.is_some();
    let ridges = done
        .into_iter()
        .map(|t| {
            let mut points = Vec::new();
            for w in 0..t.frames.len() {
                let (f, p) = t.frames[w];
                let set = &peak_sets[f];
                points.push(RidgePoint {
                    b: set.b,
                    b_index: set.b_index,
                    a_hat: p.a,
                    lambda_hat: p.lambda,
                    value: p.value,
                    interpolated: false,
                });
                if !fill || w + 1 == t.frames.len() {
                    continue;
                }
                let (g, q) = t.frames[w + 1];
                let (f0, f1) = (mu / p.a, mu / q.a);
                for h in f + 1..g {
                    let s = (h - f) as f64 / (g - f) as f64;
                    let set = &peak_sets[h];
                    points.push(RidgePoint {
                        b: set.b,
                        b_index: set.b_index,
                        a_hat: mu / (f0 + s * (f1 - f0)),
                        lambda_hat: p.lambda + s * (q.lambda - p.lambda),
                        value: Complex64::new(0.0, 0.0),
                        interpolated: true,
                    });
                }
            }
            Ridge { points }
        })
        .collect();
    Ok(RidgeSet { mu, ridges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dyadic_scales, uniform};
    use crate::signal::{example1, gen_linear_chirp, Form, Signal};
    use crate::transform::{compute_tscr, WindowSpec};

    fn volume_for(signal: &Signal, b: Vec<f64>, sigma: f64) -> TscrVolume {
        let g = TscrGrid::new(
            b,
            dyadic_scales(signal.dt(), 32, 1.0, 4.0, 128.0).unwrap(),
            uniform(-128.0, 128.0, 129).unwrap(),
        )
        .unwrap();
        compute_tscr(signal, &g, &WindowSpec::constant(sigma)).unwrap()
    }

    #[test]
    fn example1_has_two_peaks_near_truth() {
        let (s, truth) = example1(Form::Real).unwrap();
        let b = 32.0 / 256.0;
        let v = volume_for(&s, vec![b], 5.888);
        let p = SeparationParams::relative(0.2, 60.0, 0.4, &v).unwrap();
        let set = extract_peaks(&v, 0, &p).unwrap();
        assert_eq!(set.peaks.len(), 2, "{:?}", set.peaks);
        for c in &truth.components {
            let hit = set.peaks.iter().any(|q| {
                (1.0 / q.a - c.inst_freq(b)).abs() < 1.0 && (q.lambda - c.chirp_rate(b)).abs() <= 6.0
            });
            assert!(hit, "no peak near {} Hz, {} Hz/s", c.inst_freq(b), c.chirp_rate(b));
        }
    }

    #[test]
    fn zero_signal_has_no_peaks() {
        let s = Signal::from_real(&[0.0; 64], 64.0, 0.0).unwrap();
        let g = TscrGrid::new(vec![0.5], vec![0.05, 0.1], vec![0.0, 1.0]).unwrap();
        let v = compute_tscr(&s, &g, &WindowSpec::constant(3.0)).unwrap();
        let set = extract_peaks(&v, 0, &SeparationParams::new(0.2, 10.0, 1e-12).unwrap()).unwrap();
        assert!(set.peaks.is_empty());
    }

    #[test]
    fn tone_gives_one_flat_ridge() {
        let (s, _) = gen_linear_chirp(1.0, 40.0, 0.0, 1.0, 128.0, Form::Complex).unwrap();
        let b: Vec<f64> = s.times().into_iter().skip(40).take(48).collect();
        let v = volume_for(&s, b, 4.0);
        let p = SeparationParams::relative(0.2, 30.0, 0.3, &v).unwrap();
        let sets = extract_all(&v, &p).unwrap();
        let r = track_ridges(&sets, Some(1), &TrackingParams::for_grid(v.grid(), 1.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.ridges[0].len(), 48);
        let a_true = TscrGrid::nearest(v.grid().a_values(), 1.0 / 40.0);
        for pt in &r.ridges[0].points {
            assert_eq!(pt.lambda_hat, 0.0);
            assert_eq!(pt.a_hat, v.grid().a_values()[a_true]);
        }
    }

    #[test]
    fn empty_input_gives_empty_ridges() {
        let r = track_ridges(&[], None, &TrackingParams { mu: 1.0, if_span: 1.0, lambda_span: 1.0, gate: 0.1, max_gap: 2, min_length_fraction: 0.05 }).unwrap();
        assert!(r.is_empty());
    }

    fn peak(a: f64, lambda: f64, m: f64) -> Peak {
        Peak { a, lambda, a_index: 0, lambda_index: 0, value: Complex64::new(m, 0.0), magnitude: m }
    }

    #[test]
    fn gaps_are_interpolated_and_counts_checked() {
        let tp = TrackingParams { mu: 1.0, if_span: 100.0, lambda_span: 100.0, gate: 0.1, max_gap: 3, min_length_fraction: 0.0 };
        let sets: Vec<PeakSet> = (0..10)
            .map(|i| {
                let b = i as f64 * 0.01;
                let mut peaks = vec![peak(1.0 / 20.0, 0.0, 1.0)];
                if i != 4 && i != 5 {
                    peaks.push(peak(1.0 / (50.0 + 100.0 * b), 100.0, 0.5));
                }
                PeakSet { b, b_index: i, peaks }
            })
            .collect();
        let r = track_ridges(&sets, Some(2), &tp).unwrap();
        assert_eq!(r.len(), 2);
        let moving = r.ridges.iter().find(|x| x.points[0].lambda_hat == 100.0).unwrap();
        assert_eq!(moving.len(), 10);
        let filled: Vec<_> = moving.points.iter().filter(|p| p.interpolated).map(|p| p.b_index).collect();
        assert_eq!(filled, vec![4, 5]);
        let p4 = moving.points[4];
        assert!((1.0 / p4.a_hat - 54.0).abs() < 1e-9);
        assert!(matches!(track_ridges(&sets, Some(3), &tp), Err(Error::TooFewRidges { expected: 3, found: 2 })));
    }

    #[test]
    fn argmax_in_zone_behaviour() {
        let (s, _) = gen_linear_chirp(1.0, 30.0, 20.0, 1.0, 128.0, Form::Complex).unwrap();
        let v = volume_for(&s, vec![0.5], 4.0);
        let p = SeparationParams::new(0.2, 30.0, 0.1).unwrap();
        let (a, l, _) = argmax_in_zone(&v, 0, 1.0 / 41.0, 15.0, &p).unwrap();
        assert_eq!(a, v.grid().a_values()[TscrGrid::nearest(v.grid().a_values(), 1.0 / 40.0)]);
        assert_eq!(l, 20.0);
        let high = SeparationParams::new(0.2, 30.0, 2.0 * v.max_abs()).unwrap();
        assert!(matches!(argmax_in_zone(&v, 0, 1.0 / 40.0, 20.0, &high), Err(Error::NonEmptyViolation { .. })));
    }

    #[test]
    fn refinement_moves_toward_truth() {
        let (s, _) = gen_linear_chirp(1.0, 33.3, 21.0, 1.0, 128.0, Form::Complex).unwrap();
        let v = volume_for(&s, vec![0.5], 4.0);
        let p = SeparationParams::relative(0.2, 30.0, 0.5, &v).unwrap();
        let set = extract_peaks(&v, 0, &p).unwrap();
        let pk = set.peaks[0];
        let (a, l) = refine_peak(&v, 0, &pk);
        let f_true = 33.3 + 21.0 * 0.5;
        assert!((1.0 / a - f_true).abs() <= (1.0 / pk.a - f_true).abs());
        assert!((l - 21.0).abs() <= (pk.lambda - 21.0).abs());
    }

    #[test]
    fn ridge_csv_round_trip() {
        let tp = TrackingParams { mu: 1.0, if_span: 100.0, lambda_span: 100.0, gate: 0.1, max_gap: 3, min_length_fraction: 0.0 };
        let sets: Vec<PeakSet> = (0..4)
            .map(|i| PeakSet { b: i as f64, b_index: i, peaks: vec![peak(0.05, 1.0, 2.0), peak(0.01, -3.0, 1.0)] })
            .collect();
        let r = track_ridges(&sets, None, &tp).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let back = RidgeSet::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.ridges, r.ridges);
    }
}
