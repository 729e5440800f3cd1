//! FFT magnitudes and the 2-32 Hz band features.
//!
//! Bins are indexed from 0 (bin `k` has frequency `k * fs / N`). Band `k`
//! (1-based, `k = 1..=15`) covers `[2k, 2k+2)` Hz and sums the magnitudes of
//! bins `floor(N * 2k / fs) .. floor(N * (2k+2) / fs)`, upper index
//! excluded, so neighbouring bands share no bin.

use crate::error::{Error, Result};
use crate::fft;
use crate::signal_io::Segment;

pub const BAND_COUNT: usize = 15;
pub const BAND_WIDTH_HZ: f64 = 2.0;
pub const LOWEST_BAND_HZ: f64 = 2.0;

/// Magnitude spectrum `|X_k|` of a real segment, full length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    magnitudes: Vec<f64>,
    sample_rate_hz: f64,
}

impl Spectrum {
    pub fn new(magnitudes: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if let Some(i) = magnitudes.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::domain(format!(
                "magnitude {} at bin {i} is not a finite non-negative number",
                magnitudes[i]
            )));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::domain(format!("invalid sample rate {sample_rate_hz}")));
        }
        Ok(Self {
            magnitudes,
            sample_rate_hz,
        })
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn n_samples(&self) -> usize {
        self.magnitudes.len()
    }

    /// Every magnitude multiplied by `factor` (must be positive).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.magnitudes.iter().map(|m| m * factor).collect(),
            self.sample_rate_hz,
        )
    }
}

/// Power Spectral Intensity per band and the Relative Intensity Ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPowers {
    pub psi: [f64; BAND_COUNT],
    pub rir: [f64; BAND_COUNT],
}

pub fn fft_magnitudes(seg: &Segment) -> Spectrum {
    let magnitudes = fft::forward(seg.samples())
        .into_iter()
        .map(|c| c.norm())
        .collect();
    Spectrum {
        magnitudes,
        sample_rate_hz: seg.sample_rate_hz(),
    }
}

/// Half-open bin ranges `[start, end)` for the 15 bands.
pub fn band_bins(n_samples: usize, sample_rate_hz: f64) -> [(usize, usize); BAND_COUNT] {
    let edge = |hz: f64| (n_samples as f64 * hz / sample_rate_hz).floor() as usize;
    std::array::from_fn(|j| {
        let lo = LOWEST_BAND_HZ + BAND_WIDTH_HZ * j as f64;
        (edge(lo), edge(lo + BAND_WIDTH_HZ))
    })
}

pub fn band_powers(spec: &Spectrum) -> Result<BandPowers> {
    let fs = spec.sample_rate_hz;
    let top = LOWEST_BAND_HZ + BAND_WIDTH_HZ * BAND_COUNT as f64;
    if fs <= 2.0 * top {
        return Err(Error::domain(format!(
            "band features need a sample rate above {} Hz, got {fs}",
            2.0 * top
        )));
    }
    let bins = band_bins(spec.n_samples(), fs);
    let psi: [f64; BAND_COUNT] =
        std::array::from_fn(|j| spec.magnitudes[bins[j].0..bins[j].1].iter().sum());
    let total: f64 = psi.iter().sum();
    let rir = if total > 0.0 {
        psi.map(|p| p / total)
    } else {
        [0.0; BAND_COUNT]
    };
    Ok(BandPowers { psi, rir })
}
