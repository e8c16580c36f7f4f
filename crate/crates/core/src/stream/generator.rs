use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DriftKind, StreamConfig, StreamError, REJECTION_CAP};
use crate::{Label, LabeledExample};

const LIKELIHOOD_SPLIT: f64 = 0.6;
const LIKELIHOOD_LEFT_BEFORE: f64 = 0.9;
const LIKELIHOOD_LEFT_AFTER: f64 = 0.1;

/// The generating distribution in force at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    /// `p(y = 1)`.
    pub positive_prior: f64,
    /// `p(x1 < 0.6 | y = 0)` when negatives are region-constrained.
    pub negative_left_share: Option<f64>,
    /// Concept swapped (posterior drift).
    pub flipped: bool,
}

pub fn effective_regime(config: &StreamConfig, t: usize) -> Regime {
    let drifted = config.drift.is_active(t);
    let ci = config.imbalance_rate;
    match config.drift.kind {
        DriftKind::None => Regime {
            positive_prior: ci,
            negative_left_share: None,
            flipped: false,
        },
        DriftKind::Prior => Regime {
            positive_prior: if drifted { 1.0 - ci } else { ci },
            negative_left_share: None,
            flipped: false,
        },
        DriftKind::Likelihood => Regime {
            positive_prior: ci,
            negative_left_share: Some(if drifted {
                LIKELIHOOD_LEFT_AFTER
            } else {
                LIKELIHOOD_LEFT_BEFORE
            }),
            flipped: false,
        },
        DriftKind::Posterior => Regime {
            positive_prior: ci,
            negative_left_share: None,
            flipped: drifted,
        },
    }
}

/// A generated example: `example.y` carries label noise, `concept_label` does not.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamItem {
    pub example: LabeledExample,
    pub concept_label: Label,
}

impl StreamItem {
    pub fn clean(example: LabeledExample) -> Self {
        let concept_label = example.y;
        StreamItem {
            example,
            concept_label,
        }
    }
}

pub fn sample_example<R: Rng + ?Sized>(
    config: &StreamConfig,
    t: usize,
    rng: &mut R,
) -> Result<StreamItem, StreamError> {
    if t >= config.steps {
        return Err(StreamError::StepOutOfRange {
            step: t,
            steps: config.steps,
        });
    }
    let regime = effective_regime(config, t);
    let y = Label::from_positive(rng.random_bool(regime.positive_prior));

    // x1 is drawn from [lo, hi); the region is fixed before rejection starts
    let (lo, hi) = match (y, regime.negative_left_share) {
        (Label::Negative, Some(left)) => {
            if rng.random_bool(left) {
                (0.0, LIKELIHOOD_SPLIT)
            } else {
                (LIKELIHOOD_SPLIT, 1.0)
            }
        }
        _ => (0.0, 1.0),
    };

    let mut proposals = 0;
    let x = loop {
        if proposals == REJECTION_CAP {
            return Err(StreamError::RejectionCapExceeded {
                step: t,
                label: y,
                cap: REJECTION_CAP,
            });
        }
        proposals += 1;
        let x1 = rng.random_range(lo..hi);
        let x2 = rng.random::<f64>();
        if (config.concept.is_positive(x1, x2) != regime.flipped) == y.is_positive() {
            break vec![x1, x2];
        }
    };

    let emitted = if config.noise_prob > 0.0 && rng.random_bool(config.noise_prob) {
        y.flipped()
    } else {
        y
    };
    Ok(StreamItem {
        example: LabeledExample::new(x, emitted),
        concept_label: y,
    })
}

/// Seeded iterator over a synthetic stream of `config.steps` examples.
#[derive(Debug, Clone)]
pub struct SyntheticStream {
    config: StreamConfig,
    rng: ChaCha8Rng,
    t: usize,
}

impl SyntheticStream {
    pub fn new(config: StreamConfig) -> Result<Self, StreamError> {
        config.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(SyntheticStream { config, rng, t: 0 })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    pub fn step(&self) -> usize {
        self.t
    }
}

impl Iterator for SyntheticStream {
    type Item = Result<StreamItem, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.t >= self.config.steps {
            return None;
        }
        let item = sample_example(&self.config, self.t, &mut self.rng);
        self.t += 1;
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.config.steps - self.t;
        (left, Some(left))
    }
}
