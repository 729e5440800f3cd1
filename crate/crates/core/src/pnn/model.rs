//! A trained network bundled with its normalization and preprocessing, and
//! the versioned JSON file it is saved as.
//!
//! File layout (all numbers at full precision):
//!
//! ```json
//! {
//!   "format": "eeg-pnn-model",
//!   "version": 1,
//!   "spread": 0.1,
//!   "n_classes": 2,
//!   "n_features": 38,
//!   "class_names": ["normal", "interictal"],
//!   "pipeline": { "lowpass": true, "k_max": 5 },
//!   "segment": { "n_samples": 4096, "sample_rate_hz": 173.61 },
//!   "norm_stats": { "method": "zscore", "location": [...], "scale": [...] },
//!   "labels": [0, 0, 1, ...],
//!   "weights": [[...38 values...], ...]
//! }
//! ```
//!
//! `weights` holds the normalized training vectors, one row per label.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClassificationTrace, Pnn};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, PipelineConfig, FEATURE_COUNT};
use crate::normalize::{NormMethod, NormStats};
use crate::signal_io::Segment;

pub const MODEL_FORMAT: &str = "eeg-pnn-model";
pub const MODEL_VERSION: u32 = 1;

/// Length and rate of the segments a model was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentShape {
    pub n_samples: usize,
    pub sample_rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnnModel {
    pub network: Pnn,
    pub norm_stats: NormStats,
    pub class_names: Vec<String>,
    pub pipeline: PipelineConfig,
    pub segment: SegmentShape,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    spread: f64,
    n_classes: usize,
    n_features: usize,
    class_names: Vec<String>,
    pipeline: PipelineConfig,
    segment: SegmentShape,
    norm_stats: NormStats,
    labels: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

impl PnnModel {
    /// Fits normalization on `rows`, normalizes them and stores them.
    pub fn fit(
        rows: &[FeatureVector],
        labels: &[usize],
        class_names: Vec<String>,
        spread: f64,
        method: NormMethod,
        pipeline: PipelineConfig,
        segment: SegmentShape,
    ) -> Result<Self> {
        let raw: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let norm_stats = NormStats::fit(&raw, method)?;
        let normalized = raw
            .iter()
            .map(|r| norm_stats.apply(r))
            .collect::<Result<Vec<_>>>()?;
        let network = Pnn::train(&normalized, labels, class_names.len(), spread)?;
        Ok(Self {
            network,
            norm_stats,
            class_names,
            pipeline,
            segment,
        })
    }

    /// Normalizes a raw feature vector with the frozen training statistics
    /// and classifies it.
    pub fn classify_features(&self, v: &FeatureVector) -> Result<ClassificationTrace> {
        let p = self.norm_stats.apply(v.as_slice())?;
        self.network.classify(&p)
    }

    /// Full path from a raw segment: shape check, preprocessing, features,
    /// normalization, network.
    pub fn classify_segment(&self, seg: &Segment) -> Result<ClassificationTrace> {
        if seg.len() != self.segment.n_samples {
            return Err(Error::shape(format!(
                "segment `{}` has {} samples, model was trained on {}",
                seg.source_id(),
                seg.len(),
                self.segment.n_samples
            )));
        }
        if seg.sample_rate_hz() != self.segment.sample_rate_hz {
            return Err(Error::shape(format!(
                "segment `{}` is sampled at {} Hz, model expects {} Hz",
                seg.source_id(),
                seg.sample_rate_hz(),
                self.segment.sample_rate_hz
            )));
        }
        let features = self.pipeline.extract(seg)?;
        self.classify_features(&features)
    }

    /// Adds one raw (unnormalized) feature vector using the frozen
    /// normalization.
    pub fn add_sample(&self, v: &FeatureVector, label: usize) -> Result<Self> {
        let p = self.norm_stats.apply(v.as_slice())?;
        Ok(Self {
            network: self.network.add_sample(&p, label)?,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            spread: self.network.spread(),
            n_classes: self.network.n_classes(),
            n_features: self.network.dim(),
            class_names: self.class_names.clone(),
            pipeline: self.pipeline,
            segment: self.segment,
            norm_stats: self.norm_stats.clone(),
            labels: self.network.labels().to_vec(),
            weights: self.network.rows().map(<[f64]>::to_vec).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::ModelMismatch(format!(
                "{}: expected {MODEL_FORMAT} v{MODEL_VERSION}, found {} v{}",
                path.display(),
                file.format,
                file.version
            )));
        }
        if file.n_features != FEATURE_COUNT {
            return Err(Error::ModelMismatch(format!(
                "model has {} features, this pipeline produces {FEATURE_COUNT}",
                file.n_features
            )));
        }
        if let Some(row) = file.weights.iter().find(|r| r.len() != file.n_features) {
            return Err(Error::ModelMismatch(format!(
                "weight row of length {} in a {}-feature model",
                row.len(),
                file.n_features
            )));
        }
        if file.norm_stats.dim() != file.n_features {
            return Err(Error::ModelMismatch(format!(
                "normalization covers {} features, model has {}",
                file.norm_stats.dim(),
                file.n_features
            )));
        }
        file.norm_stats.validate()?;
        if file.class_names.len() != file.n_classes {
            return Err(Error::ModelMismatch(format!(
                "{} class names for {} classes",
                file.class_names.len(),
                file.n_classes
            )));
        }
        let network = Pnn::train(&file.weights, &file.labels, file.n_classes, file.spread)?;
        Ok(Self {
            network,
            norm_stats: file.norm_stats,
            class_names: file.class_names,
            pipeline: file.pipeline,
            segment: file.segment,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_features(rng: &mut impl Rng, shift: f64) -> FeatureVector {
        let mut v = [0.0; FEATURE_COUNT];
        for x in v.iter_mut() {
            *x = rng.gen_range(-1.0..1.0) + shift;
        }
        FeatureVector::new(v).unwrap()
    }

    fn toy_model() -> (PnnModel, Vec<FeatureVector>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<_> = (0..20).map(|i| random_features(&mut rng, if i < 10 { 0.0 } else { 5.0 })).collect();
        let labels: Vec<_> = (0..20).map(|i| usize::from(i >= 10)).collect();
        let model = PnnModel::fit(
            &rows,
            &labels,
            vec!["low".into(), "high".into()],
            0.1,
            NormMethod::Zscore,
            PipelineConfig::default(),
            SegmentShape { n_samples: 4096, sample_rate_hz: 173.61 },
        )
        .unwrap();
        (model, rows)
    }

    #[test]
    fn json_round_trip_preserves_decisions() {
        let (model, rows) = toy_model();
        let back = PnnModel::from_json(&model.to_json(), Path::new("m.json")).unwrap();
        assert_eq!(back, model);
        for r in &rows {
            assert_eq!(
                back.classify_features(r).unwrap().winner,
                model.classify_features(r).unwrap().winner
            );
        }
    }

    #[test]
    fn training_rows_classify_to_their_labels() {
        let (model, rows) = toy_model();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(model.classify_features(r).unwrap().winner, usize::from(i >= 10));
        }
    }

    #[test]
    fn feature_dimension_mismatch_is_reported() {
        let (model, _) = toy_model();
        let json = model.to_json();
        let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
        value["n_features"] = 37.into();
        let err = PnnModel::from_json(&value.to_string(), Path::new("m.json")).unwrap_err();
        assert!(matches!(err, Error::ModelMismatch(_)));

        let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
        value["weights"][3].as_array_mut().unwrap().pop();
        let err = PnnModel::from_json(&value.to_string(), Path::new("m.json")).unwrap_err();
        assert!(matches!(err, Error::ModelMismatch(_)));
    }

    #[test]
    fn short_segment_is_a_shape_error() {
        let (model, _) = toy_model();
        let seg = Segment::new(vec![1.0; 4000], 173.61, "short").unwrap();
        assert!(matches!(model.classify_segment(&seg), Err(Error::Shape(_))));
    }

    #[test]
    fn add_sample_uses_frozen_statistics() {
        let (model, _) = toy_model();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let extra = random_features(&mut rng, 20.0);
        let grown = model.add_sample(&extra, 0).unwrap();
        assert_eq!(grown.norm_stats, model.norm_stats);
        assert_eq!(grown.network.len(), 21);
        assert_eq!(grown.classify_features(&extra).unwrap().winner, 0);
    }
}
