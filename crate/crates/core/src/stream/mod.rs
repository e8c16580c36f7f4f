//! Labelled example streams.
//!
//! Synthetic streams draw the label first (Bernoulli with the active prior)
//! and then rejection-sample `x` uniformly inside that label's region, so the
//! configured imbalance rate holds exactly in expectation. Drift is abrupt:
//! the regime switches at `onset` and stays switched.

mod concept;
mod csv_source;
mod generator;

use std::path::PathBuf;

use thiserror::Error;

pub use concept::Concept;
pub use csv_source::{load_csv_stream, CsvDataset};
pub use generator::{effective_regime, sample_example, Regime, StreamItem, SyntheticStream};

/// Maximum number of rejection-sampling proposals per example.
pub const REJECTION_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("point {x:?} is outside the unit square")]
    OutOfDomain { x: Vec<f64> },
    #[error("invalid stream configuration: {0}")]
    InvalidConfig(String),
    #[error("rejection sampling exceeded {cap} proposals for label {label} at step {step}")]
    RejectionCapExceeded {
        step: usize,
        label: crate::Label,
        cap: usize,
    },
    #[error("step {step} is past the end of a {steps}-step stream")]
    StepOutOfRange { step: usize, steps: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: row {row}: {source}")]
    Csv {
        path: PathBuf,
        row: u64,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: empty file")]
    EmptyFile { path: PathBuf },
    #[error("{path}: label column {column:?} not found in header")]
    MissingLabelColumn { path: PathBuf, column: String },
    #[error("{path}: row {row}, column {column:?}: non-numeric value {value:?}")]
    NonNumeric {
        path: PathBuf,
        row: u64,
        column: String,
        value: String,
    },
    #[error("{path}: row {row}: label {value:?} is not 0 or 1")]
    InvalidLabel {
        path: PathBuf,
        row: u64,
        value: String,
    },
    #[error("{path}: no examples of class {label}")]
    MissingClass { path: PathBuf, label: crate::Label },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftKind {
    None,
    /// `p(y)` changes: the positive prior becomes `1 - imbalance_rate`.
    Prior,
    /// `p(x|y=0)` changes: the share of negatives with `x1 < 0.6` goes 0.9 -> 0.1.
    Likelihood,
    /// `p(y|x)` changes: the concept is swapped and every label inverts.
    Posterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriftSpec {
    pub kind: DriftKind,
    pub onset: usize,
}

impl DriftSpec {
    pub const NONE: DriftSpec = DriftSpec {
        kind: DriftKind::None,
        onset: 0,
    };

    pub fn new(kind: DriftKind, onset: usize) -> Self {
        DriftSpec { kind, onset }
    }

    pub fn is_active(&self, t: usize) -> bool {
        self.kind != DriftKind::None && t >= self.onset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub concept: Concept,
    /// Pre-drift `p(y = 1)`.
    pub imbalance_rate: f64,
    pub drift: DriftSpec,
    /// Probability that the emitted label is the complement of the concept label.
    pub noise_prob: f64,
    pub seed: u64,
    pub steps: usize,
}

impl StreamConfig {
    pub fn stationary(concept: Concept, imbalance_rate: f64, steps: usize, seed: u64) -> Self {
        StreamConfig {
            concept,
            imbalance_rate,
            drift: DriftSpec::NONE,
            noise_prob: 0.0,
            seed,
            steps,
        }
    }

    pub fn with_drift(mut self, drift: DriftSpec) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_noise(mut self, noise_prob: f64) -> Self {
        self.noise_prob = noise_prob;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        let rate = self.imbalance_rate;
        if !(rate > 0.0 && rate <= 0.5) {
            return Err(StreamError::InvalidConfig(format!(
                "imbalance rate {rate} must lie in (0, 0.5]"
            )));
        }
        if !(0.0..=1.0).contains(&self.noise_prob) {
            return Err(StreamError::InvalidConfig(format!(
                "noise probability {} must lie in [0, 1]",
                self.noise_prob
            )));
        }
        if self.drift.kind != DriftKind::None && self.drift.onset >= self.steps {
            return Err(StreamError::InvalidConfig(format!(
                "drift onset {} must precede the stream end ({} steps)",
                self.drift.onset, self.steps
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rejects_bad_values() {
        let ok = StreamConfig::stationary(Concept::Sine, 0.01, 100, 0);
        assert!(ok.validate().is_ok());
        assert!(StreamConfig {
            imbalance_rate: 0.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(StreamConfig {
            imbalance_rate: 0.7,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ok.clone().with_noise(1.5).validate().is_err());
        assert!(ok
            .clone()
            .with_drift(DriftSpec::new(DriftKind::Prior, 100))
            .validate()
            .is_err());
        assert!(ok
            .with_drift(DriftSpec::new(DriftKind::Prior, 99))
            .validate()
            .is_ok());
    }
}
