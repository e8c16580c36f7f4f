//! Prequential (test-then-train) evaluation with a fading factor.
//!
//! Four accumulators decay by `theta` every step: the fading number of
//! positives and negatives seen, and of those predicted correctly. Recall and
//! specificity are their ratios; a class not yet seen has accuracy 0.

use crate::Label;

pub const DEFAULT_FADING: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub recall: f64,
    pub specificity: f64,
    pub gmean: f64,
}

impl Metrics {
    pub fn from_rates(recall: f64, specificity: f64) -> Self {
        Metrics {
            recall,
            specificity,
            gmean: (recall * specificity).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrequentialState {
    theta: f64,
    positives: f64,
    negatives: f64,
    true_positives: f64,
    true_negatives: f64,
}

impl PrequentialState {
    pub fn new(theta: f64) -> Self {
        assert!(
            theta > 0.0 && theta <= 1.0,
            "fading factor {theta} outside (0, 1]"
        );
        PrequentialState {
            theta,
            positives: 0.0,
            negatives: 0.0,
            true_positives: 0.0,
            true_negatives: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Record the prediction `predicted` for an example whose label is `actual`.
    pub fn update(&mut self, actual: Label, predicted: Label) {
        let theta = self.theta;
        self.positives *= theta;
        self.negatives *= theta;
        self.true_positives *= theta;
        self.true_negatives *= theta;
        match actual {
            Label::Positive => {
                self.positives += 1.0;
                if predicted == Label::Positive {
                    self.true_positives += 1.0;
                }
            }
            Label::Negative => {
                self.negatives += 1.0;
                if predicted == Label::Negative {
                    self.true_negatives += 1.0;
                }
            }
        }
    }

    /// `(n_p, tp, n_n, tn)`.
    pub fn counts(&self) -> (f64, f64, f64, f64) {
        (
            self.positives,
            self.true_positives,
            self.negatives,
            self.true_negatives,
        )
    }

    pub fn metrics(&self) -> Metrics {
        let ratio = |hit: f64, total: f64| {
            if total > 0.0 {
                (hit / total).clamp(0.0, 1.0)
            } else {
                0.0
            }
        };
        Metrics::from_rates(
            ratio(self.true_positives, self.positives),
            ratio(self.true_negatives, self.negatives),
        )
    }
}

impl Default for PrequentialState {
    fn default() -> Self {
        PrequentialState::new(DEFAULT_FADING)
    }
}
