//! Adaptive time-scale-chirp_rate (TSC-R) analysis of multicomponent
//! non-stationary signals.
//!
//! The transform adds a chirp-rate axis to an adaptive continuous wavelet-like
//! transform, which separates components whose instantaneous-frequency curves
//! cross as long as their chirp rates differ at the crossing. Components are
//! recovered by reading the transform along each ridge.

pub mod bench;
pub mod bounds;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod pipeline;
pub mod recovery;
pub mod ridge;
pub mod signal;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{GridSpec, TscrGrid};
pub use signal::{Form, GroundTruth, Signal};
pub use transform::{compute_tscr, Sigma, TscrVolume, WindowSpec};
