//! Three-layer probabilistic neural network.
//!
//! The radial basis layer stores one training vector per row of `W`. For an
//! input `p` it computes `n_q = ||W_q - p|| * b_q` and `a_q = exp(-n_q^2)`.
//! The competitive layer sums activations per class (`d = M a`) and picks
//! the largest entry, lowest class index on ties.
//!
//! Class scores are compared in the log domain (`ln d_k`, via log-sum-exp)
//! so that small spreads, where every `a_q` underflows to zero, still
//! resolve to the nearest stored vector instead of a blanket tie.

mod model;

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

pub use model::{PnnModel, SegmentShape, MODEL_FORMAT, MODEL_VERSION};

/// Spread constant used throughout unless overridden.
pub const DEFAULT_SPREAD: f64 = 0.1;

/// `radbas(n) = exp(-n^2)`.
pub fn radbas(n: f64) -> f64 {
    (-n * n).exp()
}

/// `sqrt(ln 2) / s`: the bias that makes `radbas` cross 0.5 at a distance
/// of exactly `s`.
pub fn bias_for_spread(spread: f64) -> f64 {
    LN_2.sqrt() / spread
}

/// Everything computed while classifying one input.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationTrace {
    /// Weighted distances `n_q = ||W_q - p|| * b_q`.
    pub distances: Vec<f64>,
    /// `a_q = exp(-n_q^2)`; may underflow to 0 for distant rows.
    pub activations: Vec<f64>,
    /// `d = M a`: raw per-class sums of activations.
    pub class_scores: Vec<f64>,
    /// `ln d_k` computed without underflow. The decision is made on these.
    pub log_scores: Vec<f64>,
    /// `d_k` divided by the number of class-`k` rows. Diagnostic only.
    pub prior_corrected: Vec<f64>,
    pub winner: usize,
}

/// The trained network: weight rows, biases, class assignment and spread.
#[derive(Debug, Clone, PartialEq)]
pub struct Pnn {
    dim: usize,
    n_classes: usize,
    spread: f64,
    weights: Vec<f64>,
    bias: Vec<f64>,
    labels: Vec<usize>,
}

impl Pnn {
    /// Stores the rows as the weight matrix. No iterative fitting.
    pub fn train<R: AsRef<[f64]>>(
        rows: &[R],
        labels: &[usize],
        n_classes: usize,
        spread: f64,
    ) -> Result<Self> {
        if !(spread.is_finite() && spread > 0.0) {
            return Err(Error::domain(format!("spread must be positive, got {spread}")));
        }
        if n_classes == 0 {
            return Err(Error::domain("a network needs at least one class"));
        }
        if rows.len() != labels.len() {
            return Err(Error::shape(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if dim == 0 && !rows.is_empty() {
            return Err(Error::shape("training vectors are empty"));
        }
        let mut net = Self {
            dim,
            n_classes,
            spread,
            weights: Vec::with_capacity(rows.len() * dim),
            bias: Vec::with_capacity(rows.len()),
            labels: Vec::with_capacity(rows.len()),
        };
        for (row, &label) in rows.iter().zip(labels) {
            net.push(row.as_ref(), label)?;
        }
        let counts = net.class_counts();
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::domain(format!("class {empty} has no training samples")));
        }
        Ok(net)
    }

    /// Returns a new network with one more stored row. Equivalent to
    /// retraining on the enlarged set.
    pub fn add_sample(&self, v: &[f64], label: usize) -> Result<Self> {
        let mut next = self.clone();
        next.push(v, label)?;
        Ok(next)
    }

    fn push(&mut self, v: &[f64], label: usize) -> Result<()> {
        if label >= self.n_classes {
            return Err(Error::domain(format!(
                "label {label} out of range for {} classes",
                self.n_classes
            )));
        }
        if v.len() != self.dim {
            return Err(Error::shape(format!(
                "vector has {} features, network expects {}",
                v.len(),
                self.dim
            )));
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!("training feature {i} is not finite")));
        }
        self.weights.extend_from_slice(v);
        self.bias.push(bias_for_spread(self.spread));
        self.labels.push(label);
        Ok(())
    }

    pub fn classify(&self, p: &[f64]) -> Result<ClassificationTrace> {
        if p.len() != self.dim {
            return Err(Error::ModelMismatch(format!(
                "input has {} features, network expects {}",
                p.len(),
                self.dim
            )));
        }
        if let Some(i) = p.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!("input feature {i} is not finite")));
        }

        let distances: Vec<f64> = self
            .rows()
            .zip(&self.bias)
            .map(|(w, b)| euclidean(w, p) * b)
            .collect();
        let activations: Vec<f64> = distances.iter().map(|&n| radbas(n)).collect();

        let k = self.n_classes;
        let mut class_scores = vec![0.0; k];
        let mut peak = vec![f64::NEG_INFINITY; k];
        for ((&label, &a), &n) in self.labels.iter().zip(&activations).zip(&distances) {
            class_scores[label] += a;
            peak[label] = peak[label].max(-n * n);
        }
        let mut shifted = vec![0.0; k];
        for (&label, &n) in self.labels.iter().zip(&distances) {
            shifted[label] += (-n * n - peak[label]).exp();
        }
        let log_scores: Vec<f64> = peak
            .iter()
            .zip(&shifted)
            .map(|(&m, &s)| if s > 0.0 { m + s.ln() } else { f64::NEG_INFINITY })
            .collect();

        let counts = self.class_counts();
        let prior_corrected = class_scores
            .iter()
            .zip(&counts)
            .map(|(&d, &c)| if c > 0 { d / c as f64 } else { 0.0 })
            .collect();

        let mut winner = 0;
        for (i, &s) in log_scores.iter().enumerate().skip(1) {
            if s > log_scores[winner] {
                winner = i;
            }
        }

        Ok(ClassificationTrace {
            distances,
            activations,
            class_scores,
            log_scores,
            prior_corrected,
            winner,
        })
    }

    pub fn predict(&self, p: &[f64]) -> Result<usize> {
        Ok(self.classify(p)?.winner)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Number of stored rows `Q`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, q: usize) -> &[f64] {
        &self.weights[q * self.dim..(q + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // dim is 0 only for a network without rows; chunks_exact(0) panics
        self.weights.chunks_exact(self.dim.max(1))
    }

    /// The `K x Q` class indicator matrix `M`.
    pub fn class_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n_classes)
            .map(|k| self.labels.iter().map(|&l| u8::from(l == k)).collect())
            .collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
