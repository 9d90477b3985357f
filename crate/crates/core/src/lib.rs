//! Design and evaluation of the piecewise linear scalar companding
//! quantizer (PLSCQ) for a zero-mean, unit-variance Gaussian source.
//!
//! * [`gaussmath`]: density, erf-based partial moments and p^(1/3) integrals.
//! * [`compressor`]: the optimal compressor and its piecewise linear model.
//! * [`design`]: cell allocation and the symmetric codebook.
//! * [`analysis`]: high-rate and exact distortion, SQNR, threshold
//!   optimization, the compander baseline and the segment sweep.
//! * [`codec`]: encode/decode, seeded Gaussian streams, Monte Carlo SQNR
//!   and sample/index file conversion.
//!
//! ```
//! use plscq::analysis::{optimize_threshold, Objective};
//!
//! let best = optimize_threshold(128, 8, Objective::HighRateFormula).unwrap();
//! assert!(best.report.sqnr_db > 37.0);
//! ```

pub mod analysis;
pub mod codec;
pub mod compressor;
pub mod design;
pub mod error;
pub mod fsutil;
pub mod gaussmath;
mod jsonfloat;
pub mod search;

#[cfg(test)]
mod testutil;

pub use analysis::{DistortionReport, Method, Objective, SweepResult, Variant};
pub use codec::{LevelIndex, SampleFormat, StreamStats};
pub use compressor::{Compressor, OptimalCompressor, PiecewiseLinearCompressor};
pub use design::{build_codebook, Codebook, QuantizerConfig, SegmentLayout};
pub use error::{Error, Result};
pub use gaussmath::SourceModel;
