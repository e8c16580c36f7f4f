use std::path::PathBuf;

use areba::learners::{DEFAULT_THETA, DEFAULT_WINDOW};
use areba::stream::{Concept, DriftKind, DriftSpec, StreamConfig};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};

use crate::experiment::{Dataset, ExperimentConfig, LearnerSpec, NetworkSettings, ScoreLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LearnerKind {
    Baseline,
    Sliding,
    #[value(name = "adaptive_cs", alias = "adaptive-cs")]
    AdaptiveCs,
    Oob,
    Qbr,
    Areba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Circle,
    Sine,
    Sea,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriftArg {
    None,
    Prior,
    Likelihood,
    Posterior,
}

/// Prequential experiment runner for online imbalanced-stream learners.
#[derive(Debug, Parser)]
#[command(name = "areba-bench", version)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "areba")]
    pub learner: LearnerKind,
    /// Total queue memory B for qbr / areba (even, at least 2).
    #[arg(long, default_value_t = 20)]
    pub memory: usize,
    /// Sliding window size W.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    /// Number of OOB ensemble members.
    #[arg(long, default_value_t = 20)]
    pub ensemble: usize,
    /// Class-size decay for areba, adaptive_cs and oob.
    #[arg(long, default_value_t = DEFAULT_THETA)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "sine")]
    pub dataset: DatasetKind,
    #[arg(long, required_if_eq("dataset", "csv"))]
    pub csv_path: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    pub label_col: String,
    /// Positive-class prior CI of synthetic streams.
    #[arg(long, default_value_t = 0.01)]
    pub imbalance: f64,
    #[arg(long, value_enum, default_value = "none")]
    pub drift: DriftArg,
    /// First drifted step; required with any drift.
    #[arg(long)]
    pub drift_step: Option<usize>,
    /// Label-flip probability.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Score predictions against the noiseless concept label instead of the
    /// emitted one.
    #[arg(long)]
    pub score_clean: bool,
    /// Stream length (synthetic) or truncation of the CSV pass.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Hidden layer sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub hidden: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub l2: f64,
    /// Aggregate CSV output; stdout summary only when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional long-format per-repetition CSV.
    #[arg(long)]
    pub per_rep_out: Option<PathBuf>,
}

pub const DEFAULT_SYNTHETIC_STEPS: usize = 5000;

impl Cli {
    pub fn learner_spec(&self) -> LearnerSpec {
        match self.learner {
            LearnerKind::Baseline => LearnerSpec::Baseline,
            LearnerKind::Sliding => LearnerSpec::Sliding {
                window: self.window,
            },
            LearnerKind::AdaptiveCs => LearnerSpec::AdaptiveCs { theta: self.theta },
            LearnerKind::Oob => LearnerSpec::Oob {
                ensemble: self.ensemble,
                theta: self.theta,
            },
            LearnerKind::Qbr => LearnerSpec::Qbr {
                memory: self.memory,
            },
            LearnerKind::Areba => LearnerSpec::Areba {
                memory: self.memory,
                theta: self.theta,
            },
        }
    }

    pub fn to_config(&self) -> Result<ExperimentConfig, clap::Error> {
        let usage = |kind: ErrorKind, msg: String| Cli::command().error(kind, msg);
        let drift = match (self.drift, self.drift_step) {
            (DriftArg::None, _) => DriftSpec::NONE,
            (_, None) => {
                return Err(usage(
                    ErrorKind::MissingRequiredArgument,
                    "--drift-step is required when --drift is not none".into(),
                ))
            }
            (kind, Some(onset)) => DriftSpec::new(
                match kind {
                    DriftArg::Prior => DriftKind::Prior,
                    DriftArg::Likelihood => DriftKind::Likelihood,
                    _ => DriftKind::Posterior,
                },
                onset,
            ),
        };
        let concept = match self.dataset {
            DatasetKind::Circle => Some(Concept::Circle),
            DatasetKind::Sine => Some(Concept::Sine),
            DatasetKind::Sea => Some(Concept::Sea),
            DatasetKind::Csv => None,
        };
        let dataset = match concept {
            Some(concept) => {
                let steps = self.steps.unwrap_or(DEFAULT_SYNTHETIC_STEPS);
                let stream = StreamConfig::stationary(concept, self.imbalance, steps, self.seed)
                    .with_drift(drift)
                    .with_noise(self.noise);
                Dataset::Synthetic(stream)
            }
            None => Dataset::Csv {
                path: self.csv_path.clone().expect("enforced by clap"),
                label_column: self.label_col.clone(),
                steps: self.steps,
            },
        };
        let config = ExperimentConfig::new(self.learner_spec(), dataset)
            .with_reps(self.reps)
            .with_seed(self.seed)
            .with_score(if self.score_clean {
                ScoreLabel::Concept
            } else {
                ScoreLabel::Emitted
            })
            .with_network(NetworkSettings {
                hidden: self.hidden.clone(),
                learning_rate: self.lr,
                l2: self.l2,
            });
        config
            .validate()
            .map_err(|e| usage(ErrorKind::ValueValidation, e.to_string()))?;
        Ok(config)
    }
}

/// Parses a full argument vector (program name first) into a validated config.
pub fn parse_cli<I, T>(args: I) -> Result<(Cli, ExperimentConfig), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let config = cli.to_config()?;
    Ok((cli, config))
}
