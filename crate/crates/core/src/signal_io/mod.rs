//! Raw EEG segments: the in-memory type, the Bonn text corpus, the 40 Hz
//! low-pass step and the seeded synthetic generators.

mod bonn;
mod filter;
mod synth;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bonn::{
    load_bonn_corpus, load_bonn_dir, load_bonn_file, load_bonn_set, parse_bonn_text,
    resolve_set_dir, write_bonn_file,
};
pub use filter::{lowpass, lowpass_40hz, LOWPASS_CUTOFF_HZ};
pub use synth::{
    default_manifest, synth_segment, ManifestEntry, SynthKind, SynthManifest, SynthParams, Tone,
};

/// Sampling rate of every recording in the Bonn corpus.
pub const BONN_SAMPLE_RATE_HZ: f64 = 173.61;

/// Samples per Bonn segment once the trailing 4097th sample is dropped.
pub const BONN_SEGMENT_LEN: usize = 4096;

/// Segments per set grouped by set tag.
pub type Corpus = BTreeMap<SetTag, Vec<Segment>>;

/// One single-channel recording window, the unit of classification.
///
/// Construction validates the invariants, so every `Segment` in circulation
/// has at least [`Segment::MIN_LEN`] finite samples and a positive rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    samples: Vec<f64>,
    sample_rate_hz: f64,
    source_id: String,
}

impl Segment {
    pub const MIN_LEN: usize = 16;

    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: f64,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        let source_id = source_id.into();
        if samples.len() < Self::MIN_LEN {
            return Err(Error::shape(format!(
                "segment `{source_id}` has {} samples, need at least {}",
                samples.len(),
                Self::MIN_LEN
            )));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::domain(format!(
                "segment `{source_id}` has invalid sample rate {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!(
                "segment `{source_id}` has a non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            source_id,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Same rate and id, new samples. Revalidates.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate_hz, self.source_id.clone())
    }
}

/// Fails unless every segment has the same number of samples.
pub fn check_uniform_length<'a>(segments: impl IntoIterator<Item = &'a Segment>) -> Result<()> {
    let mut expected: Option<(usize, &str)> = None;
    for seg in segments {
        match expected {
            None => expected = Some((seg.len(), seg.source_id())),
            Some((n, first)) if n != seg.len() => {
                return Err(Error::shape(format!(
                    "segment `{}` has {} samples but `{first}` has {n}",
                    seg.source_id(),
                    seg.len()
                )))
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// The five recording sets of the Bonn corpus.
///
/// A and B are surface EEG from healthy volunteers (eyes open, eyes closed),
/// C and D are intracranial interictal recordings, E is ictal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SetTag {
    A,
    B,
    C,
    D,
    E,
}

impl SetTag {
    pub const ALL: [SetTag; 5] = [SetTag::A, SetTag::B, SetTag::C, SetTag::D, SetTag::E];

    pub fn letter(self) -> char {
        match self {
            SetTag::A => 'A',
            SetTag::B => 'B',
            SetTag::C => 'C',
            SetTag::D => 'D',
            SetTag::E => 'E',
        }
    }

    /// Letter used by the published archive for this set's directory and
    /// file names (Z, O, N, F, S).
    pub fn corpus_letter(self) -> char {
        match self {
            SetTag::A => 'Z',
            SetTag::B => 'O',
            SetTag::C => 'N',
            SetTag::D => 'F',
            SetTag::E => 'S',
        }
    }
}

impl fmt::Display for SetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for SetTag {
    type Err = Error;

    /// Accepts either the set letter (A-E) or the archive letter (Z, O, N,
    /// F, S), case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let tag = match upper.as_str() {
            "A" | "Z" => SetTag::A,
            "B" | "O" => SetTag::B,
            "C" | "N" => SetTag::C,
            "D" | "F" => SetTag::D,
            "E" | "S" => SetTag::E,
            _ => return Err(Error::Config(format!("unknown set `{s}`"))),
        };
        Ok(tag)
    }
}

/// A segment with its experiment class and originating set.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSegment {
    pub segment: Segment,
    pub class_label: usize,
    pub set_tag: SetTag,
}
