//! End-to-end analysis: transform, peaks, ridges, estimates.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, TscrGrid};
use crate::recovery::{estimate_component, ComponentEstimate, DirectSum, GridLookup, RidgeEvaluator};
use crate::ridge::{extract_all, refine_peak, track_ridges, PeakSet, RidgeSet, SeparationParams, TrackingParams};
use crate::signal::Signal;
use crate::transform::{compute_tscr, TscrVolume, WindowSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Fraction of the largest magnitude in the volume.
    Relative(f64),
    Absolute(f64),
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub grid: GridSpec,
    pub window: WindowSpec,
    pub delta: f64,
    pub delta1: f64,
    pub threshold: Threshold,
    pub k_expected: Option<usize>,
    pub gate: f64,
    pub max_gap: usize,
    pub min_length_fraction: f64,
    /// Parabolic sub-grid refinement; values are then re-evaluated directly.
    pub refine: bool,
}

impl AnalysisConfig {
    pub fn new(grid: GridSpec, window: WindowSpec) -> Self {
        Self {
            grid,
            window,
            delta: 0.2,
            delta1: 30.0,
            threshold: Threshold::Relative(0.3),
            k_expected: None,
            gate: 0.1,
            max_gap: 16,
            min_length_fraction: 0.05,
            refine: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub volume: TscrVolume,
    pub params: SeparationParams,
    pub peaks: Vec<PeakSet>,
    pub ridges: RidgeSet,
    pub components: Vec<ComponentEstimate>,
}

/// Builds the grid over every sample, evaluates the transform and recovers
/// the components.
pub fn analyze(signal: &Signal, config: &AnalysisConfig) -> Result<Analysis> {
    let mut spec = config.grid.clone();
    spec.mu = config.window.mu;
    let grid = TscrGrid::for_signal(signal, &spec)?;
    let volume = compute_tscr(signal, &grid, &config.window)?;
    analyze_volume(signal, volume, config)
}

/// The detection and recovery stages on an existing volume.
pub fn analyze_volume(signal: &Signal, volume: TscrVolume, config: &AnalysisConfig) -> Result<Analysis> {
    let params = match config.threshold {
        Threshold::Relative(f) => SeparationParams::relative(config.delta, config.delta1, f, &volume)?,
        Threshold::Absolute(t) => SeparationParams::new(config.delta, config.delta1, t)?,
    };
    let mut peaks = extract_all(&volume, &params)?;
    if config.refine {
        for set in &mut peaks {
            for p in &mut set.peaks {
                let (a, l) = refine_peak(&volume, set.b_index, p);
                p.a = a;
                p.lambda = l;
            }
        }
    }
    let tracking = TrackingParams {
        gate: config.gate,
        max_gap: config.max_gap,
        min_length_fraction: config.min_length_fraction,
        ..TrackingParams::for_grid(volume.grid(), volume.mu())
    };
    let mut ridges = track_ridges(&peaks, config.k_expected, &tracking)?;
    if ridges.is_empty() {
        return Err(Error::NoRidges);
    }
    let direct = DirectSum { signal, window: &config.window };
    let lookup = GridLookup { volume: &volume };
    let evaluator: &dyn RidgeEvaluator = if config.refine { &direct } else { &lookup };
    let components = ridges
        .ridges
        .iter_mut()
        .map(|r| estimate_component(r, volume.mu(), evaluator, signal.is_real()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Analysis { volume, params, peaks, ridges, components })
}
