//! The 38-feature vector, the extraction pipeline and CSV export.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::{lowpass_40hz, Segment};
use crate::spectral::{band_powers, fft_magnitudes, BAND_COUNT};
use crate::timedomain::{amplitude_stats, higuchi_fd, hjorth, petrosian_fd, HfdConfig};

pub const FEATURE_COUNT: usize = 38;

/// Canonical feature order. Stable across releases.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "psi_1", "psi_2", "psi_3", "psi_4", "psi_5", "psi_6", "psi_7", "psi_8", "psi_9", "psi_10",
    "psi_11", "psi_12", "psi_13", "psi_14", "psi_15", "rir_1", "rir_2", "rir_3", "rir_4", "rir_5",
    "rir_6", "rir_7", "rir_8", "rir_9", "rir_10", "rir_11", "rir_12", "rir_13", "rir_14", "rir_15",
    "pfd", "hfd", "hjorth_mobility", "hjorth_complexity", "mean_raw", "std_raw", "mean_abs",
    "std_abs",
];

/// Index of each feature within [`FeatureVector`].
pub mod index {
    pub const PSI: usize = 0;
    pub const RIR: usize = 15;
    pub const PFD: usize = 30;
    pub const HFD: usize = 31;
    pub const HJORTH_MOBILITY: usize = 32;
    pub const HJORTH_COMPLEXITY: usize = 33;
    pub const MEAN_RAW: usize = 34;
    pub const STD_RAW: usize = 35;
    pub const MEAN_ABS: usize = 36;
    pub const STD_ABS: usize = 37;
}

/// 38 finite features of one segment in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector([f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn new(values: [f64; FEATURE_COUNT]) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "feature {} ({}) is not finite",
                i, FEATURE_NAMES[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let arr: [f64; FEATURE_COUNT] = values.try_into().map_err(|_| {
            Error::ModelMismatch(format!(
                "expected {FEATURE_COUNT} features, got {}",
                values.len()
            ))
        })?;
        Self::new(arr)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn psi(&self) -> &[f64] {
        &self.0[index::PSI..index::PSI + BAND_COUNT]
    }

    pub fn rir(&self) -> &[f64] {
        &self.0[index::RIR..index::RIR + BAND_COUNT]
    }
}

/// Preprocessing and extraction settings applied uniformly to every segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub lowpass: bool,
    pub k_max: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lowpass: true,
            k_max: HfdConfig::DEFAULT_K_MAX,
        }
    }
}

impl PipelineConfig {
    pub fn hfd(&self) -> Result<HfdConfig> {
        HfdConfig::new(self.k_max)
    }

    /// Optional 40 Hz low-pass followed by [`extract_features`].
    pub fn extract(&self, seg: &Segment) -> Result<FeatureVector> {
        let cfg = self.hfd()?;
        if self.lowpass {
            let filtered = lowpass_40hz(seg).map_err(|e| tag("lowpass", e))?;
            extract_features(&filtered, cfg)
        } else {
            extract_features(seg, cfg)
        }
    }
}

fn tag(feature: &'static str, source: Error) -> Error {
    Error::Feature {
        feature,
        source: Box::new(source),
    }
}

/// Computes all 38 features of one segment.
pub fn extract_features(seg: &Segment, cfg: HfdConfig) -> Result<FeatureVector> {
    let bands = band_powers(&fft_magnitudes(seg)).map_err(|e| tag("psi/rir", e))?;
    let pfd = petrosian_fd(seg);
    let hfd = higuchi_fd(seg, cfg).map_err(|e| tag("hfd", e))?;
    let hj = hjorth(seg).map_err(|e| tag("hjorth", e))?;
    let amp = amplitude_stats(seg);

    let mut values = [0.0; FEATURE_COUNT];
    values[index::PSI..index::PSI + BAND_COUNT].copy_from_slice(&bands.psi);
    values[index::RIR..index::RIR + BAND_COUNT].copy_from_slice(&bands.rir);
    values[index::PFD] = pfd;
    values[index::HFD] = hfd;
    values[index::HJORTH_MOBILITY] = hj.mobility;
    values[index::HJORTH_COMPLEXITY] = hj.complexity;
    values[index::MEAN_RAW] = amp.mean_raw;
    values[index::STD_RAW] = amp.std_raw;
    values[index::MEAN_ABS] = amp.mean_abs;
    values[index::STD_ABS] = amp.std_abs;
    FeatureVector::new(values).map_err(|e| tag("assembly", e))
}

/// One row of a feature CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub features: FeatureVector,
    pub label: String,
    pub source_id: String,
}

pub fn csv_header() -> Vec<&'static str> {
    FEATURE_NAMES
        .iter()
        .copied()
        .chain(["label", "source_id"])
        .collect()
}

/// Serializes rows with 17 significant digits per value.
pub fn feature_csv_string(rows: &[FeatureRow]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(csv_header()).expect("in-memory write");
    for row in rows {
        let mut record: Vec<String> = row
            .features
            .as_slice()
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect();
        record.push(row.label.clone());
        record.push(row.source_id.clone());
        wtr.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn write_feature_csv(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let body = feature_csv_string(rows);
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_feature_csv(path: &Path) -> Result<Vec<FeatureRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != csv_header() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "header does not match the canonical feature columns".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = i + 2;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let values = record
            .iter()
            .take(FEATURE_COUNT)
            .map(|s| s.parse::<f64>().map_err(|_| parse_err(format!("`{s}` is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        let features = FeatureVector::from_slice(&values).map_err(|e| parse_err(e.to_string()))?;
        rows.push(FeatureRow {
            features,
            label: record[FEATURE_COUNT].to_string(),
            source_id: record[FEATURE_COUNT + 1].to_string(),
        });
    }
    Ok(rows)
}
