use rustfft::num_complex::Complex64;

use super::Segment;
use crate::error::{Error, Result};
use crate::fft;

pub const LOWPASS_CUTOFF_HZ: f64 = 40.0;

/// Zero-phase brick-wall low-pass at 40 Hz.
pub fn lowpass_40hz(seg: &Segment) -> Result<Segment> {
    lowpass(seg, LOWPASS_CUTOFF_HZ)
}

/// Zeroes every DFT bin whose frequency is strictly above `cutoff_hz` and
/// transforms back. Bins at exactly the cutoff are kept. Both halves of the
/// spectrum are treated alike, so conjugate symmetry and a real output are
/// preserved.
pub fn lowpass(seg: &Segment, cutoff_hz: f64) -> Result<Segment> {
    let fs = seg.sample_rate_hz();
    if !(cutoff_hz > 0.0 && fs > 2.0 * cutoff_hz) {
        return Err(Error::domain(format!(
            "low-pass at {cutoff_hz} Hz needs a sample rate above {} Hz, got {fs}",
            2.0 * cutoff_hz
        )));
    }
    let n = seg.len();
    let mut spectrum = fft::forward(seg.samples());
    for (k, bin) in spectrum.iter_mut().enumerate() {
        if bin_frequency(k, n, fs) > cutoff_hz {
            *bin = Complex64::new(0.0, 0.0);
        }
    }
    seg.with_samples(fft::inverse_real(spectrum))
}

/// Absolute frequency of DFT bin `k`, folding the upper half onto negative
/// frequencies.
fn bin_frequency(k: usize, n: usize, fs: f64) -> f64 {
    let folded = k.min(n - k);
    folded as f64 * fs / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_io::BONN_SAMPLE_RATE_HZ;
    use std::f64::consts::PI;

    fn sine(freq: f64, n: usize, fs: f64) -> Segment {
        let xs = (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / fs).sin())
            .collect();
        Segment::new(xs, fs, "sine").unwrap()
    }

    /// Frequency of the DFT bin nearest `freq`, so the tone has no leakage.
    fn centred(freq: f64, n: usize, fs: f64) -> f64 {
        (freq * n as f64 / fs).round() * fs / n as f64
    }

    fn max_abs(xs: &[f64]) -> f64 {
        xs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Direct DFT of one bin, independent of the FFT path.
    fn dft_bin(xs: &[f64], k: usize) -> (f64, f64) {
        let n = xs.len() as f64;
        xs.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, &x)| {
            let phase = -2.0 * PI * k as f64 * i as f64 / n;
            (re + x * phase.cos(), im + x * phase.sin())
        })
    }

    #[test]
    fn ten_hz_sine_passes_unchanged() {
        let seg = sine(centred(10.0, 4096, BONN_SAMPLE_RATE_HZ), 4096, BONN_SAMPLE_RATE_HZ);
        let out = lowpass_40hz(&seg).unwrap();
        let peak = max_abs(seg.samples());
        for (a, b) in seg.samples().iter().zip(out.samples()) {
            assert!((a - b).abs() <= 1e-9 * peak, "{a} vs {b}");
        }
    }

    #[test]
    fn sixty_hz_sine_is_removed() {
        let seg = sine(centred(60.0, 4096, BONN_SAMPLE_RATE_HZ), 4096, BONN_SAMPLE_RATE_HZ);
        let out = lowpass_40hz(&seg).unwrap();
        assert!(max_abs(out.samples()) <= 1e-9 * max_abs(seg.samples()));
        // the bin nearest 60 Hz is gone in the output spectrum
        let k = (60.0 * 4096.0 / BONN_SAMPLE_RATE_HZ).round() as usize;
        let (re, im) = dft_bin(out.samples(), k);
        assert!(re.hypot(im) < 1e-6);
    }

    #[test]
    fn constant_is_unchanged() {
        let seg = Segment::new(vec![3.25; 256], BONN_SAMPLE_RATE_HZ, "c").unwrap();
        let out = lowpass_40hz(&seg).unwrap();
        for x in out.samples() {
            assert!((x - 3.25).abs() < 1e-12);
        }
    }

    #[test]
    fn bin_exactly_at_cutoff_is_kept() {
        // fs = 128, N = 128: bin 40 sits exactly at 40 Hz, bin 41 above it.
        let n = 128;
        let fs = 128.0;
        let at = sine(40.0, n, fs);
        let above = sine(41.0, n, fs);
        let out_at = lowpass_40hz(&at).unwrap();
        let out_above = lowpass_40hz(&above).unwrap();
        for (a, b) in at.samples().iter().zip(out_at.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(max_abs(out_above.samples()) < 1e-12);
    }

    #[test]
    fn rejects_low_sample_rate() {
        let seg = Segment::new(vec![1.0; 32], 80.0, "s").unwrap();
        assert!(matches!(lowpass_40hz(&seg), Err(Error::Domain(_))));
    }

    #[test]
    fn idempotent_and_energy_non_increasing() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let xs: Vec<f64> = (0..1024).map(|_| rng.gen_range(-100.0..100.0)).collect();
            let seg = Segment::new(xs, BONN_SAMPLE_RATE_HZ, "r").unwrap();
            let once = lowpass_40hz(&seg).unwrap();
            let twice = lowpass_40hz(&once).unwrap();
            let scale = max_abs(once.samples());
            for (a, b) in once.samples().iter().zip(twice.samples()) {
                assert!((a - b).abs() <= 1e-12 * scale);
            }
            let e_in: f64 = seg.samples().iter().map(|x| x * x).sum();
            let e_out: f64 = once.samples().iter().map(|x| x * x).sum();
            assert!(e_out <= e_in);
        }
    }
}
