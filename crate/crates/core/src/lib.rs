//! Online binary classification on class-imbalanced, nonstationary data streams.
//!
//! The crate is organised around the test-then-train loop:
//!
//! - [`stream`] produces labelled examples one at a time, either from the
//!   synthetic Circle / Sine / Sea concepts (with scheduled drift and label
//!   noise) or from a CSV file.
//! - [`nn`] is the shared base classifier: a small dense network trained with
//!   weighted binary cross-entropy and Adam, one optimizer step per call.
//! - [`learners`] wraps the network in the six online strategies (Baseline,
//!   Sliding, AdaptiveCS, OOB, QBR and AREBA) behind [`learners::OnlineLearner`].
//! - [`eval`] keeps fading-factor prequential recall, specificity and G-mean.
//!
//! ```
//! use areba::eval::PrequentialState;
//! use areba::learners::{Areba, OnlineLearner};
//! use areba::nn::NetworkConfig;
//! use areba::stream::{Concept, StreamConfig, SyntheticStream};
//!
//! let config = StreamConfig::stationary(Concept::Sine, 0.1, 500, 7);
//! let mut learner = Areba::new(NetworkConfig::new(2), 20, 0.99, 7).unwrap();
//! let mut preq = PrequentialState::new(0.99);
//! for item in SyntheticStream::new(config).unwrap() {
//!     let item = item.unwrap();
//!     preq.update(item.concept_label, learner.predict(&item.example.x).unwrap());
//!     learner.observe(&item.example).unwrap();
//! }
//! assert!(preq.metrics().gmean >= 0.0);
//! ```

pub mod eval;
pub mod learners;
pub mod nn;
pub mod stream;

mod label;

pub use label::{Label, LabeledExample};
