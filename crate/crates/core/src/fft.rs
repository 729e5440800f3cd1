//! Thin wrapper over `rustfft` for real input.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Unnormalized forward DFT: `X_k = sum_n x_n e^{-j 2 pi k n / N}`.
pub(crate) fn forward(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// Inverse DFT scaled by `1/N`, returning only the real part.
pub(crate) fn inverse_real(mut spectrum: Vec<Complex64>) -> Vec<f64> {
    let n = spectrum.len();
    FftPlanner::new()
        .plan_fft_inverse(n)
        .process(&mut spectrum);
    let scale = 1.0 / n as f64;
    spectrum.into_iter().map(|c| c.re * scale).collect()
}
