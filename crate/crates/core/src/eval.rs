//! Leave-one-out cross-validation over the four two-class experiments.
//!
//! Every fold refits normalization on the training rows only, stores those
//! rows in a fresh network and classifies the held-out row. Folds run in
//! parallel unless timing is requested, in which case they run sequentially
//! and the time spent inside the network's `classify` is recorded per fold.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureRow, FeatureVector, PipelineConfig};
use crate::normalize::{NormMethod, NormStats};
use crate::pnn::{Pnn, SegmentShape};
use crate::signal_io::{check_uniform_length, Corpus, SetTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassGroup {
    pub name: &'static str,
    pub sets: &'static [SetTag],
}

/// A two-class experiment. Class 0 is `groups[0]`, class 1 is `groups[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentDef {
    pub id: u8,
    pub name: &'static str,
    pub groups: [ClassGroup; 2],
}

pub const EXPERIMENTS: [ExperimentDef; 4] = [
    ExperimentDef {
        id: 1,
        name: "normal vs interictal",
        groups: [
            ClassGroup { name: "normal", sets: &[SetTag::A, SetTag::B] },
            ClassGroup { name: "interictal", sets: &[SetTag::C, SetTag::D] },
        ],
    },
    ExperimentDef {
        id: 2,
        name: "normal vs ictal",
        groups: [
            ClassGroup { name: "normal", sets: &[SetTag::A, SetTag::B] },
            ClassGroup { name: "ictal", sets: &[SetTag::E] },
        ],
    },
    ExperimentDef {
        id: 3,
        name: "interictal vs ictal",
        groups: [
            ClassGroup { name: "interictal", sets: &[SetTag::C, SetTag::D] },
            ClassGroup { name: "ictal", sets: &[SetTag::E] },
        ],
    },
    ExperimentDef {
        id: 4,
        name: "focus localization (C vs D)",
        groups: [
            ClassGroup { name: "set-C", sets: &[SetTag::C] },
            ClassGroup { name: "set-D", sets: &[SetTag::D] },
        ],
    },
];

impl ExperimentDef {
    pub fn by_id(id: u8) -> Result<Self> {
        EXPERIMENTS
            .iter()
            .find(|e| e.id == id)
            .copied()
            .ok_or_else(|| Error::Config(format!("no experiment {id}; valid ids are 1-4")))
    }

    pub fn sets(&self) -> impl Iterator<Item = SetTag> + '_ {
        self.groups.iter().flat_map(|g| g.sets.iter().copied())
    }

    pub fn class_of(&self, tag: SetTag) -> Option<usize> {
        self.groups.iter().position(|g| g.sets.contains(&tag))
    }

    pub fn class_names(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.name.to_string()).collect()
    }
}

/// Labeled raw (unnormalized) feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: Vec<FeatureVector>,
    pub labels: Vec<usize>,
    pub source_ids: Vec<String>,
    pub class_names: Vec<String>,
    /// Shape of the underlying segments, when known.
    pub segment: Option<SegmentShape>,
}

impl Dataset {
    pub fn new(
        rows: Vec<FeatureVector>,
        labels: Vec<usize>,
        source_ids: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() || rows.len() != source_ids.len() {
            return Err(Error::shape(format!(
                "{} rows, {} labels, {} source ids",
                rows.len(),
                labels.len(),
                source_ids.len()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::domain(format!(
                "label {l} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            rows,
            labels,
            source_ids,
            class_names,
            segment: None,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// Extracts features for every segment of the experiment's sets. Class 0
/// is the first group, class 1 the second; rows follow group, set and
/// segment order.
pub fn build_experiment(def: &ExperimentDef, corpus: &Corpus, cfg: &PipelineConfig) -> Result<Dataset> {
    let mut tagged = Vec::new();
    for (class, group) in def.groups.iter().enumerate() {
        for tag in group.sets {
            let segments = corpus.get(tag).ok_or_else(|| {
                Error::Config(format!("experiment {} needs set {tag}, which is missing", def.id))
            })?;
            tagged.extend(segments.iter().map(|s| (class, s)));
        }
    }
    check_uniform_length(tagged.iter().map(|(_, s)| *s))?;

    let rows = tagged
        .par_iter()
        .map(|(_, seg)| cfg.extract(seg))
        .collect::<Result<Vec<_>>>()?;
    let mut dataset = Dataset::new(
        rows,
        tagged.iter().map(|(c, _)| *c).collect(),
        tagged.iter().map(|(_, s)| s.source_id().to_string()).collect(),
        def.class_names(),
    )?;
    dataset.segment = tagged.first().map(|(_, s)| SegmentShape {
        n_samples: s.len(),
        sample_rate_hz: s.sample_rate_hz(),
    });
    Ok(dataset)
}

/// Builds an experiment dataset from feature CSV rows whose `label` column
/// holds the set tag. Rows of sets outside the experiment are ignored.
pub fn dataset_from_feature_rows(def: &ExperimentDef, rows: &[FeatureRow]) -> Result<Dataset> {
    let mut by_set: Vec<(SetTag, &FeatureRow)> = Vec::new();
    for row in rows {
        let tag: SetTag = row.label.parse()?;
        by_set.push((tag, row));
    }
    let mut out_rows = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    for (class, group) in def.groups.iter().enumerate() {
        for &tag in group.sets {
            let before = out_rows.len();
            for (t, row) in &by_set {
                if *t == tag {
                    out_rows.push(row.features);
                    labels.push(class);
                    ids.push(row.source_id.clone());
                }
            }
            if out_rows.len() == before {
                return Err(Error::Config(format!(
                    "experiment {} needs set {tag}, but no feature rows carry that label",
                    def.id
                )));
            }
        }
    }
    Dataset::new(out_rows, labels, ids, def.class_names())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LooOptions {
    pub method: NormMethod,
    /// Run folds sequentially and record per-fold classification time.
    pub timing: bool,
}

/// The model one fold trains: statistics and network built without row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldModel {
    pub held_out: usize,
    pub norm_stats: NormStats,
    pub network: Pnn,
}

impl FoldModel {
    /// Normalizes and classifies the held-out row.
    pub fn predict(&self, dataset: &Dataset) -> Result<usize> {
        let p = self.norm_stats.apply(dataset.rows[self.held_out].as_slice())?;
        self.network.predict(&p)
    }
}

/// Trains the fold that holds out row `i`. Row `i` touches neither the
/// statistics nor the weights.
pub fn loo_fold(dataset: &Dataset, i: usize, spread: f64, method: NormMethod) -> Result<FoldModel> {
    let train: Vec<&[f64]> = dataset
        .rows
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, r)| r.as_slice())
        .collect();
    let labels: Vec<usize> = dataset
        .labels
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, &l)| l)
        .collect();
    let norm_stats = NormStats::fit(&train, method)?;
    let normalized = train
        .iter()
        .map(|r| norm_stats.apply(r))
        .collect::<Result<Vec<_>>>()?;
    let network = Pnn::train(&normalized, &labels, dataset.n_classes(), spread)?;
    Ok(FoldModel {
        held_out: i,
        norm_stats,
        network,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub source_id: String,
    #[serde(rename = "true")]
    pub truth: usize,
    pub predicted: usize,
}

/// One-vs-rest rates per class. Not part of the headline accuracy; useful
/// for the imbalanced experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub name: String,
    pub support: usize,
    pub sensitivity: f64,
    pub specificity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub median_fold_classify_seconds: f64,
    pub per_fold_classify_seconds: Vec<f64>,
}

pub const REPORT_FORMAT: &str = "eeg-pnn-report";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format: String,
    pub version: u32,
    pub experiment: Option<u8>,
    pub name: String,
    pub spread: f64,
    pub normalization: NormMethod,
    pub n_samples: usize,
    pub class_names: Vec<String>,
    /// `confusion[true][predicted]`
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub timing: Option<Timing>,
    pub predictions: Vec<Prediction>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn with_experiment(mut self, def: &ExperimentDef) -> Self {
        self.experiment = Some(def.id);
        self.name = def.name.to_string();
        self
    }
}

pub fn loo_cv(dataset: &Dataset, spread: f64, opts: LooOptions) -> Result<EvalReport> {
    if !(spread.is_finite() && spread > 0.0) {
        return Err(Error::domain(format!("spread must be positive, got {spread}")));
    }
    let counts = dataset.class_counts();
    if let Some(k) = counts.iter().position(|&c| c < 2) {
        return Err(Error::domain(format!(
            "class {k} ({}) has {} samples; leave-one-out needs at least 2 per class",
            dataset.class_names[k], counts[k]
        )));
    }

    let run_fold = |i: usize| -> Result<(usize, Option<f64>)> {
        let fold = loo_fold(dataset, i, spread, opts.method)?;
        let p = fold.norm_stats.apply(dataset.rows[i].as_slice())?;
        if opts.timing {
            let start = Instant::now();
            let trace = fold.network.classify(&p)?;
            let elapsed = start.elapsed().as_secs_f64();
            Ok((trace.winner, Some(elapsed)))
        } else {
            Ok((fold.network.predict(&p)?, None))
        }
    };
    let outcomes: Vec<(usize, Option<f64>)> = if opts.timing {
        (0..dataset.len()).map(run_fold).collect::<Result<_>>()?
    } else {
        (0..dataset.len()).into_par_iter().map(run_fold).collect::<Result<_>>()?
    };

    let k = dataset.n_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut predictions = Vec::with_capacity(dataset.len());
    for (i, (predicted, _)) in outcomes.iter().enumerate() {
        let truth = dataset.labels[i];
        confusion[truth][*predicted] += 1;
        predictions.push(Prediction {
            source_id: dataset.source_ids[i].clone(),
            truth,
            predicted: *predicted,
        });
    }
    let total = dataset.len();
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class = (0..k)
        .map(|c| {
            let support = counts[c];
            let tp = confusion[c][c];
            let predicted_c: usize = (0..k).map(|t| confusion[t][c]).sum();
            let negatives = total - support;
            let tn = negatives - (predicted_c - tp);
            ClassMetrics {
                class: c,
                name: dataset.class_names[c].clone(),
                support,
                sensitivity: tp as f64 / support as f64,
                specificity: if negatives > 0 { tn as f64 / negatives as f64 } else { 1.0 },
            }
        })
        .collect();
    let timing = opts.timing.then(|| {
        let per_fold: Vec<f64> = outcomes.iter().filter_map(|o| o.1).collect();
        Timing {
            median_fold_classify_seconds: median(&per_fold),
            per_fold_classify_seconds: per_fold,
        }
    });

    Ok(EvalReport {
        format: REPORT_FORMAT.to_string(),
        version: 1,
        experiment: None,
        name: String::new(),
        spread,
        normalization: opts.method,
        n_samples: total,
        class_names: dataset.class_names.clone(),
        confusion,
        accuracy: correct as f64 / total as f64,
        per_class,
        timing,
        predictions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub spread: f64,
    pub accuracy: f64,
}

/// One full leave-one-out run per spread, in input order.
pub fn spread_sweep(dataset: &Dataset, spreads: &[f64], opts: LooOptions) -> Result<Vec<SweepPoint>> {
    spreads
        .iter()
        .map(|&spread| {
            Ok(SweepPoint {
                spread,
                accuracy: loo_cv(dataset, spread, opts)?.accuracy,
            })
        })
        .collect()
}

pub fn sweep_csv_string(points: &[SweepPoint]) -> String {
    let mut out = String::from("spread,accuracy\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.spread, p.accuracy));
    }
    out
}

/// Whitespace-separated columns with a `#` header, readable by gnuplot
/// and most plotting tools.
pub fn sweep_plot_data(points: &[SweepPoint]) -> String {
    let mut out = String::from("# spread accuracy\n");
    for p in points {
        out.push_str(&format!("{} {}\n", p.spread, p.accuracy));
    }
    out
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
