//! Seeded synthetic segments and the JSON manifest that records how each
//! one was generated.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_uniform_length, Corpus, Segment, SetTag, BONN_SAMPLE_RATE_HZ, BONN_SEGMENT_LEN};
use crate::error::{Error, Result};

/// One sinusoidal component of a mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub freq_hz: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SynthKind {
    /// `A sin(2 pi f t)`, zero phase. The seed is ignored.
    Sine { freq_hz: f64, amplitude: f64 },
    /// Gaussian white noise with standard deviation `sigma`.
    Noise { sigma: f64 },
    /// Periodic spike-and-slow-wave complex at `freq_hz` with a seeded
    /// starting phase.
    #[serde(rename = "spikewave")]
    SpikeWave { freq_hz: f64, amplitude: f64 },
    /// Sum of tones with seeded random phases plus Gaussian noise.
    Mixture { components: Vec<Tone>, noise_sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_samples: usize,
    pub sample_rate_hz: f64,
    #[serde(flatten)]
    pub kind: SynthKind,
}

impl SynthParams {
    /// Bonn-shaped parameters (4096 samples at 173.61 Hz).
    pub fn bonn(kind: SynthKind) -> Self {
        Self {
            n_samples: BONN_SEGMENT_LEN,
            sample_rate_hz: BONN_SAMPLE_RATE_HZ,
            kind,
        }
    }

    fn validate(&self) -> Result<()> {
        let fs = self.sample_rate_hz;
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::domain(format!("sample rate must be positive, got {fs}")));
        }
        if self.n_samples < Segment::MIN_LEN {
            return Err(Error::shape(format!(
                "n_samples must be at least {}, got {}",
                Segment::MIN_LEN,
                self.n_samples
            )));
        }
        let nyquist = fs / 2.0;
        let check_tone = |freq: f64, amp: f64| -> Result<()> {
            if !(freq > 0.0 && freq < nyquist) {
                return Err(Error::domain(format!(
                    "frequency {freq} Hz must lie in (0, {nyquist}) Hz"
                )));
            }
            if !(amp.is_finite() && amp > 0.0) {
                return Err(Error::domain(format!("amplitude must be positive, got {amp}")));
            }
            Ok(())
        };
        match &self.kind {
            SynthKind::Sine { freq_hz, amplitude } | SynthKind::SpikeWave { freq_hz, amplitude } => {
                check_tone(*freq_hz, *amplitude)
            }
            SynthKind::Noise { sigma } => {
                if sigma.is_finite() && *sigma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("noise sigma must be positive, got {sigma}")))
                }
            }
            SynthKind::Mixture {
                components,
                noise_sigma,
            } => {
                if components.is_empty() {
                    return Err(Error::domain("mixture needs at least one tone"));
                }
                if !(noise_sigma.is_finite() && *noise_sigma >= 0.0) {
                    return Err(Error::domain(format!(
                        "noise sigma must be non-negative, got {noise_sigma}"
                    )));
                }
                components
                    .iter()
                    .try_for_each(|t| check_tone(t.freq_hz, t.amplitude))
            }
        }
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            SynthKind::Sine { .. } => "sine",
            SynthKind::Noise { .. } => "noise",
            SynthKind::SpikeWave { .. } => "spikewave",
            SynthKind::Mixture { .. } => "mixture",
        }
    }
}

/// Generates a segment. Output is a pure function of `(params, seed)`.
pub fn synth_segment(params: &SynthParams, seed: u64) -> Result<Segment> {
    params.validate()?;
    let n = params.n_samples;
    let fs = params.sample_rate_hz;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = |i: usize| i as f64 / fs;

    let samples: Vec<f64> = match &params.kind {
        SynthKind::Sine { freq_hz, amplitude } => (0..n)
            .map(|i| amplitude * (2.0 * PI * freq_hz * t(i)).sin())
            .collect(),
        SynthKind::Noise { sigma } => {
            let dist = Normal::new(0.0, *sigma).map_err(|e| Error::domain(e.to_string()))?;
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
        SynthKind::SpikeWave { freq_hz, amplitude } => {
            let offset: f64 = rng.gen();
            (0..n)
                .map(|i| amplitude * spike_wave_cycle((freq_hz * t(i) + offset).fract()))
                .collect()
        }
        SynthKind::Mixture {
            components,
            noise_sigma,
        } => {
            let phases: Vec<f64> = components.iter().map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            let noise = Normal::new(0.0, *noise_sigma).map_err(|e| Error::domain(e.to_string()))?;
            (0..n)
                .map(|i| {
                    let tones: f64 = components
                        .iter()
                        .zip(&phases)
                        .map(|(c, ph)| c.amplitude * (2.0 * PI * c.freq_hz * t(i) + ph).sin())
                        .sum();
                    tones + noise.sample(&mut rng)
                })
                .collect()
        }
    };
    Segment::new(samples, fs, format!("synth-{}-{seed}", params.kind_name()))
}

/// One cycle of a spike-and-wave complex on phase `[0, 1)`: a narrow
/// negative spike at phase 0 riding on a unit slow wave. Unit peak scale.
fn spike_wave_cycle(phase: f64) -> f64 {
    const SPIKE_WIDTH: f64 = 0.04;
    const SPIKE_HEIGHT: f64 = 1.5;
    let d = phase.min(1.0 - phase) / SPIKE_WIDTH;
    (2.0 * PI * phase).cos() - SPIKE_HEIGHT * (-d * d).exp()
}

/// A manifest row: which set the segment belongs to and how to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub set: SetTag,
    pub source_id: String,
    pub seed: u64,
    #[serde(flatten)]
    pub params: SynthParams,
}

/// Reproducible description of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub version: u32,
    pub segments: Vec<ManifestEntry>,
}

impl SynthManifest {
    pub const VERSION: u32 = 1;

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Self = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if manifest.version != Self::VERSION {
            return Err(Error::Config(format!(
                "{}: unsupported manifest version {}",
                path.display(),
                manifest.version
            )));
        }
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Generates every segment, grouped by set in manifest order.
    pub fn realize(&self) -> Result<Corpus> {
        let mut corpus = Corpus::new();
        for entry in &self.segments {
            let seg = synth_segment(&entry.params, entry.seed)?;
            let seg = Segment::new(seg.into_samples(), entry.params.sample_rate_hz, &entry.source_id)?;
            corpus.entry(entry.set).or_default().push(seg);
        }
        check_uniform_length(corpus.values().flatten())?;
        Ok(corpus)
    }
}

/// The shipped two-class corpus: sets A and B hold low-frequency,
/// low-amplitude "normal" mixtures; sets C and D hold high-frequency,
/// high-amplitude "ictal" mixtures. 25 segments per set, all seeds fixed.
pub fn default_manifest() -> SynthManifest {
    const PER_SET: usize = 25;
    let mut jitter = ChaCha8Rng::seed_from_u64(20080101);
    let mut draw = |lo: f64, hi: f64| -> f64 { (jitter.gen_range(lo..hi) * 100.0).round() / 100.0 };

    let mut segments = Vec::with_capacity(4 * PER_SET);
    let mut seed = 1000u64;
    for set in [SetTag::A, SetTag::B, SetTag::C, SetTag::D] {
        let normal = matches!(set, SetTag::A | SetTag::B);
        for i in 0..PER_SET {
            let (components, noise_sigma) = if normal {
                (
                    vec![
                        Tone { freq_hz: draw(1.5, 3.5), amplitude: draw(15.0, 25.0) },
                        Tone { freq_hz: draw(4.5, 7.0), amplitude: draw(10.0, 20.0) },
                        Tone { freq_hz: draw(8.0, 12.0), amplitude: draw(30.0, 50.0) },
                    ],
                    8.0,
                )
            } else {
                (
                    vec![
                        Tone { freq_hz: draw(14.0, 20.0), amplitude: draw(250.0, 400.0) },
                        Tone { freq_hz: draw(20.0, 28.0), amplitude: draw(150.0, 300.0) },
                        Tone { freq_hz: draw(2.5, 3.5), amplitude: draw(80.0, 150.0) },
                    ],
                    60.0,
                )
            };
            segments.push(ManifestEntry {
                set,
                source_id: format!("{}{:03}", set.corpus_letter(), i + 1),
                seed,
                params: SynthParams::bonn(SynthKind::Mixture {
                    components,
                    noise_sigma,
                }),
            });
            seed += 1;
        }
    }
    SynthManifest {
        version: SynthManifest::VERSION,
        segments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dominant_frequency(seg: &Segment) -> f64 {
        // direct DFT over the lower half, independent of the FFT path
        let xs = seg.samples();
        let n = xs.len();
        let mut best = (0usize, 0.0f64);
        for k in 1..n / 2 {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &x) in xs.iter().enumerate() {
                let ph = -2.0 * PI * (k * i % n) as f64 / n as f64;
                re += x * ph.cos();
                im += x * ph.sin();
            }
            let mag = re.hypot(im);
            if mag > best.1 {
                best = (k, mag);
            }
        }
        best.0 as f64 * seg.sample_rate_hz() / n as f64
    }

    #[test]
    fn sine_is_deterministic() {
        let p = SynthParams::bonn(SynthKind::Sine { freq_hz: 11.0, amplitude: 100.0 });
        assert_eq!(synth_segment(&p, 1).unwrap(), synth_segment(&p, 1).unwrap());
    }

    #[test]
    fn noise_depends_on_seed() {
        let p = SynthParams::bonn(SynthKind::Noise { sigma: 1.0 });
        let a = synth_segment(&p, 1).unwrap();
        let b = synth_segment(&p, 2).unwrap();
        assert_ne!(a.samples(), b.samples());
        assert_eq!(a.samples(), synth_segment(&p, 1).unwrap().samples());
    }

    #[test]
    fn spikewave_peaks_in_two_to_four_hz() {
        let p = SynthParams {
            n_samples: 1024,
            sample_rate_hz: BONN_SAMPLE_RATE_HZ,
            kind: SynthKind::SpikeWave { freq_hz: 3.0, amplitude: 200.0 },
        };
        let f = dominant_frequency(&synth_segment(&p, 5).unwrap());
        assert!((2.0..4.0).contains(&f), "dominant at {f} Hz");
    }

    #[test]
    fn rejects_frequency_at_or_above_nyquist() {
        let nyq = BONN_SAMPLE_RATE_HZ / 2.0;
        for kind in [
            SynthKind::Sine { freq_hz: nyq, amplitude: 1.0 },
            SynthKind::SpikeWave { freq_hz: 100.0, amplitude: 1.0 },
            SynthKind::Mixture {
                components: vec![Tone { freq_hz: 90.0, amplitude: 1.0 }],
                noise_sigma: 0.0,
            },
        ] {
            assert!(matches!(
                synth_segment(&SynthParams::bonn(kind), 0),
                Err(Error::Domain(_))
            ));
        }
        let zero_amp = SynthParams::bonn(SynthKind::Sine { freq_hz: 5.0, amplitude: 0.0 });
        assert!(synth_segment(&zero_amp, 0).is_err());
    }

    #[test]
    fn manifest_json_round_trips() {
        let m = default_manifest();
        let back: SynthManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(m.to_json().contains("\"kind\": \"mixture\""));
    }

    #[test]
    fn shipped_manifest_matches_generator() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic/manifest.json");
        let shipped = SynthManifest::load(&path).unwrap();
        assert_eq!(shipped, default_manifest());
    }

    #[test]
    fn default_corpus_layout() {
        let corpus = default_manifest().realize().unwrap();
        let sizes: Vec<_> = corpus.iter().map(|(t, v)| (*t, v.len())).collect();
        assert_eq!(
            sizes,
            [(SetTag::A, 25), (SetTag::B, 25), (SetTag::C, 25), (SetTag::D, 25)]
        );
        assert_eq!(corpus[&SetTag::C][0].source_id(), "N001");
    }
}
