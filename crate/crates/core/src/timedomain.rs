//! Fractal dimensions, Hjorth parameters and amplitude statistics.
//!
//! All sums run in fixed index order so results are bit-reproducible.

use crate::error::{Error, Result};
use crate::signal_io::Segment;

/// Petrosian fractal dimension:
/// `log10 N / (log10 N + log10(N / (N + 0.4 N_delta)))`, where `N_delta`
/// counts sign changes of the first difference.
pub fn petrosian_fd(seg: &Segment) -> f64 {
    let xs = seg.samples();
    let n = xs.len() as f64;
    let sign_changes = xs
        .windows(3)
        .filter(|w| (w[2] - w[1]) * (w[1] - w[0]) < 0.0)
        .count() as f64;
    let log_n = n.log10();
    log_n / (log_n + (n / (n + 0.4 * sign_changes)).log10())
}

/// Largest scale `k` used by Higuchi's method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HfdConfig {
    k_max: usize,
}

impl HfdConfig {
    pub const DEFAULT_K_MAX: usize = 5;

    pub fn new(k_max: usize) -> Result<Self> {
        if k_max < 2 {
            return Err(Error::domain(format!("k_max must be at least 2, got {k_max}")));
        }
        Ok(Self { k_max })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
}

impl Default for HfdConfig {
    fn default() -> Self {
        Self {
            k_max: Self::DEFAULT_K_MAX,
        }
    }
}

/// Average curve lengths `L(k)` for `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HiguchiCurve {
    pub lengths: Vec<f64>,
}

impl HiguchiCurve {
    /// A zero length at some scale leaves `ln L(k)` undefined. Happens for
    /// constant signals (and signals constant along some stride).
    pub fn is_degenerate(&self) -> bool {
        self.lengths.iter().any(|&l| l <= 0.0)
    }

    /// Least-squares slope of `ln L(k)` against `ln(1/k)`, or 0 for a
    /// degenerate curve.
    pub fn dimension(&self) -> f64 {
        if self.is_degenerate() {
            return 0.0;
        }
        let pts: Vec<(f64, f64)> = self
            .lengths
            .iter()
            .enumerate()
            .map(|(i, l)| ((1.0 / (i + 1) as f64).ln(), l.ln()))
            .collect();
        let m = pts.len() as f64;
        let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
            let dx = x - mean_x;
            (sxy + dx * (y - mean_y), sxx + dx * dx)
        });
        sxy / sxx
    }
}

/// Curve lengths for Higuchi's method. For scale `k` and offset `m`
/// (1-based) the subseries `x_m, x_{m+k}, ...` has `M = floor((N-m)/k)`
/// increments and normalized length
/// `L(m,k) = (sum |increment|) * (N-1) / (M k) / k`.
pub fn higuchi_curve(seg: &Segment, cfg: HfdConfig) -> Result<HiguchiCurve> {
    let xs = seg.samples();
    let n = xs.len();
    if n <= 2 * cfg.k_max {
        return Err(Error::domain(format!(
            "Higuchi with k_max = {} needs more than {} samples, got {n}",
            cfg.k_max,
            2 * cfg.k_max
        )));
    }
    let lengths = (1..=cfg.k_max)
        .map(|k| {
            let total: f64 = (1..=k)
                .map(|m| {
                    let start = m - 1;
                    let steps = (n - m) / k;
                    let path: f64 = (1..=steps)
                        .map(|i| (xs[start + i * k] - xs[start + (i - 1) * k]).abs())
                        .sum();
                    path * (n - 1) as f64 / (steps * k) as f64 / k as f64
                })
                .sum();
            total / k as f64
        })
        .collect();
    Ok(HiguchiCurve { lengths })
}

/// Higuchi fractal dimension. Returns 0 for degenerate (zero-length)
/// curves; use [`higuchi_curve`] to detect that case.
pub fn higuchi_fd(seg: &Segment, cfg: HfdConfig) -> Result<f64> {
    Ok(higuchi_curve(seg, cfg)?.dimension())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hjorth {
    pub mobility: f64,
    pub complexity: f64,
}

/// Hjorth mobility `sqrt(M2/TP)` and complexity `sqrt(M4 TP / M2^2)` with
/// `TP = sum x^2 / N`, `M2 = sum d^2 / N`, `M4 = sum (d_i - d_{i-1})^2 / N`.
pub fn hjorth(seg: &Segment) -> Result<Hjorth> {
    let xs = seg.samples();
    let n = xs.len() as f64;
    let tp = xs.iter().map(|x| x * x).sum::<f64>() / n;
    if tp == 0.0 {
        return Err(Error::domain("Hjorth parameters undefined for an all-zero signal"));
    }
    let diffs: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let m2 = diffs.iter().map(|d| d * d).sum::<f64>() / n;
    if m2 == 0.0 {
        return Err(Error::domain("Hjorth parameters undefined for a constant signal"));
    }
    let m4 = diffs
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2))
        .sum::<f64>()
        / n;
    Ok(Hjorth {
        mobility: (m2 / tp).sqrt(),
        complexity: (m4 * tp / (m2 * m2)).sqrt(),
    })
}

/// Population mean and standard deviation of the samples and of their
/// absolute values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeStats {
    pub mean_raw: f64,
    pub std_raw: f64,
    pub mean_abs: f64,
    pub std_abs: f64,
}

pub fn amplitude_stats(seg: &Segment) -> AmplitudeStats {
    let xs = seg.samples();
    let (mean_raw, std_raw) = mean_std(xs.iter().copied());
    let (mean_abs, std_abs) = mean_std(xs.iter().map(|x| x.abs()));
    AmplitudeStats {
        mean_raw,
        std_raw,
        mean_abs,
        std_abs,
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
