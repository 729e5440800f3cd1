//! Epileptic EEG classification: spectral and time-domain features of
//! single-channel segments, fed to a probabilistic neural network and
//! evaluated by leave-one-out cross-validation.
//!
//! The pipeline for one segment:
//!
//! ```
//! use eeg_pnn::features::PipelineConfig;
//! use eeg_pnn::signal_io::{synth_segment, SynthParams, SynthKind};
//!
//! let params = SynthParams::bonn(SynthKind::Sine { freq_hz: 10.0, amplitude: 50.0 });
//! let seg = synth_segment(&params, 0).unwrap();
//! let features = PipelineConfig::default().extract(&seg).unwrap();
//! assert_eq!(features.as_slice().len(), 38);
//! ```
//!
//! Module map:
//!
//! - [`signal_io`]: segments, Bonn-format files, the 40 Hz low-pass,
//!   synthetic corpora
//! - [`spectral`]: FFT magnitudes, band power (PSI) and relative intensity
//!   ratio (RIR)
//! - [`timedomain`]: Petrosian and Higuchi fractal dimensions, Hjorth
//!   parameters, amplitude statistics
//! - [`features`]: the 38-element feature vector and feature CSV files
//! - [`normalize`]: z-score and min-max scaling
//! - [`pnn`]: the network and the saved model format
//! - [`eval`]: experiments, leave-one-out, spread sweeps

pub mod error;
pub mod eval;
pub mod features;
mod fft;
pub mod normalize;
pub mod pnn;
pub mod signal_io;
pub mod spectral;
pub mod timedomain;

pub use error::{Error, Result};
pub use features::{FeatureVector, PipelineConfig, FEATURE_COUNT, FEATURE_NAMES};
pub use normalize::{NormMethod, NormStats};
pub use pnn::{Pnn, PnnModel};
pub use signal_io::{Segment, SetTag};

/// The guide's code blocks, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/segments.md")]
    mod segments {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/timedomain.md")]
    mod timedomain {}
    #[doc = include_str!("../../../book/src/normalization.md")]
    mod normalization {}
    #[doc = include_str!("../../../book/src/pnn.md")]
    mod pnn {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
