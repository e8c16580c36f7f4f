use std::path::PathBuf;

use areba::eval::{Metrics, PrequentialState, DEFAULT_FADING};
use areba::learners::{
    AdaptiveCs, Areba, Baseline, LearnerError, OnlineLearner, Oob, Qbr, Sliding,
};
use areba::nn::{NetworkConfig, NnError};
use areba::stream::{CsvDataset, StreamConfig, StreamError, StreamItem, SyntheticStream};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid experiment: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("repetition {rep}: {source}")]
    RepStream { rep: usize, source: StreamError },
    #[error("repetition {rep}: {source}")]
    RepLearner { rep: usize, source: LearnerError },
    #[error("repetition {rep}: {source}")]
    RepNetwork { rep: usize, source: NnError },
    #[error("cannot aggregate series of different lengths ({expected} and {got})")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: malformed result row {row}: {reason}")]
    Malformed {
        path: PathBuf,
        row: u64,
        reason: String,
    },
}

/// Which strategy to run and its strategy-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnerSpec {
    Baseline,
    Sliding { window: usize },
    AdaptiveCs { theta: f64 },
    Oob { ensemble: usize, theta: f64 },
    Qbr { memory: usize },
    Areba { memory: usize, theta: f64 },
}

impl LearnerSpec {
    pub fn build(
        &self,
        network: NetworkConfig,
        seed: u64,
    ) -> Result<Box<dyn OnlineLearner + Send>, LearnerError> {
        Ok(match *self {
            LearnerSpec::Baseline => Box::new(Baseline::new(network, seed)?),
            LearnerSpec::Sliding { window } => Box::new(Sliding::new(network, window, seed)?),
            LearnerSpec::AdaptiveCs { theta } => Box::new(AdaptiveCs::new(network, theta, seed)?),
            LearnerSpec::Oob { ensemble, theta } => {
                Box::new(Oob::new(network, ensemble, theta, seed)?)
            }
            LearnerSpec::Qbr { memory } => Box::new(Qbr::new(network, memory, seed)?),
            LearnerSpec::Areba { memory, theta } => {
                Box::new(Areba::new(network, memory, theta, seed)?)
            }
        })
    }
}

/// Network settings shared by every learner; the input width comes from the data.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSettings {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for NetworkSettings {
    fn default() -> Self {
        NetworkSettings {
            hidden: vec![8],
            learning_rate: 0.01,
            l2: 0.0,
        }
    }
}

impl NetworkSettings {
    pub fn config(&self, input: usize) -> NetworkConfig {
        NetworkConfig::new(input)
            .with_hidden(self.hidden.clone())
            .with_learning_rate(self.learning_rate)
            .with_l2(self.l2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    /// The stream's own seed is replaced per repetition.
    Synthetic(StreamConfig),
    /// Rows are reshuffled per repetition; `steps` truncates the pass.
    Csv {
        path: PathBuf,
        label_column: String,
        steps: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub learner: LearnerSpec,
    pub network: NetworkSettings,
    pub dataset: Dataset,
    pub reps: usize,
    pub seed: u64,
    pub fading: f64,
    pub score: ScoreLabel,
}

impl ExperimentConfig {
    pub fn new(learner: LearnerSpec, dataset: Dataset) -> Self {
        ExperimentConfig {
            learner,
            network: NetworkSettings::default(),
            dataset,
            reps: 50,
            seed: 0,
            fading: DEFAULT_FADING,
            score: ScoreLabel::default(),
        }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_score(mut self, score: ScoreLabel) -> Self {
        self.score = score;
        self
    }

    pub fn with_network(mut self, network: NetworkSettings) -> Self {
        self.network = network;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.reps == 0 {
            return Err(BenchError::InvalidConfig(
                "at least one repetition is required".into(),
            ));
        }
        if !(self.fading > 0.0 && self.fading < 1.0) {
            return Err(BenchError::InvalidConfig(format!(
                "fading factor {} outside (0, 1)",
                self.fading
            )));
        }
        if let Dataset::Synthetic(stream) = &self.dataset {
            stream.validate()?;
        }
        self.network
            .config(1)
            .validate()
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        self.learner
            .build(self.network.config(1), 0)
            .map(drop)
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))
    }
}

/// Seeds of repetition `rep`: `(data, learner)`, a pure function of the master seed.
pub fn repetition_seeds(master: u64, rep: usize) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(rep as u64);
    (rng.next_u64(), rng.next_u64())
}

/// Per-step prequential metrics of every repetition plus their aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub learner: String,
    pub per_rep: Vec<Vec<Metrics>>,
    pub gmean: Aggregate,
    pub recall: Aggregate,
    pub specificity: Aggregate,
}

impl RunResult {
    pub fn from_reps(learner: String, per_rep: Vec<Vec<Metrics>>) -> Result<Self, BenchError> {
        let series = |f: fn(&Metrics) -> f64| -> Vec<Vec<f64>> {
            per_rep
                .iter()
                .map(|rep| rep.iter().map(f).collect())
                .collect()
        };
        Ok(RunResult {
            gmean: aggregate(&series(|m| m.gmean))?,
            recall: aggregate(&series(|m| m.recall))?,
            specificity: aggregate(&series(|m| m.specificity))?,
            learner,
            per_rep,
        })
    }

    pub fn steps(&self) -> usize {
        self.gmean.mean.len()
    }

    pub fn metric(&self, metric: Metric) -> &Aggregate {
        match metric {
            Metric::Gmean => &self.gmean,
            Metric::Recall => &self.recall,
            Metric::Specificity => &self.specificity,
        }
    }

    /// Mean and standard error of `metric` at the last step.
    pub fn final_value(&self, metric: Metric) -> Option<(f64, f64)> {
        let agg = self.metric(metric);
        Some((*agg.mean.last()?, *agg.stderr.last()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Gmean,
    Recall,
    Specificity,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Gmean, Metric::Recall, Metric::Specificity];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Gmean => "gmean",
            Metric::Recall => "recall",
            Metric::Specificity => "specificity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Metric::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Aggregate {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Per-step mean and standard error (sample standard deviation over `sqrt(R)`,
/// 0 for a single repetition). Values are summed in sorted order, so the
/// result does not depend on the order of the repetitions.
pub fn aggregate(series: &[Vec<f64>]) -> Result<Aggregate, BenchError> {
    let Some(first) = series.first() else {
        return Ok(Aggregate::default());
    };
    let steps = first.len();
    if let Some(bad) = series.iter().find(|s| s.len() != steps) {
        return Err(BenchError::LengthMismatch {
            expected: steps,
            got: bad.len(),
        });
    }
    let r = series.len() as f64;
    let mut out = Aggregate {
        mean: Vec::with_capacity(steps),
        stderr: Vec::with_capacity(steps),
    };
    let mut column = Vec::with_capacity(series.len());
    for t in 0..steps {
        column.clear();
        column.extend(series.iter().map(|s| s[t]));
        column.sort_by(f64::total_cmp);
        let mean = column.iter().sum::<f64>() / r;
        let se = if series.len() > 1 {
            let mut deviations: Vec<f64> = column.iter().map(|v| (v - mean).powi(2)).collect();
            deviations.sort_by(f64::total_cmp);
            (deviations.iter().sum::<f64>() / (r - 1.0)).sqrt() / r.sqrt()
        } else {
            0.0
        };
        out.mean.push(mean);
        out.stderr.push(se);
    }
    Ok(out)
}

/// Which label a prediction is scored against. They differ only under label noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreLabel {
    /// The label revealed to the learner, noisy or not.
    #[default]
    Emitted,
    /// The noiseless label of the active concept.
    Concept,
}

/// Test-then-train over one sequence: predict, score, then train on the
/// emitted label.
pub fn run_prequential<L, I>(
    learner: &mut L,
    items: I,
    fading: f64,
    score: ScoreLabel,
) -> Result<Vec<Metrics>, NnError>
where
    L: OnlineLearner + ?Sized,
    I: IntoIterator<Item = StreamItem>,
{
    let mut state = PrequentialState::new(fading);
    let mut out = Vec::new();
    for item in items {
        let predicted = learner.predict(&item.example.x)?;
        let actual = match score {
            ScoreLabel::Emitted => item.example.y,
            ScoreLabel::Concept => item.concept_label,
        };
        state.update(actual, predicted);
        out.push(state.metrics());
        learner.observe(&item.example)?;
    }
    Ok(out)
}

/// Runs every repetition (in parallel) and aggregates the results.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult, BenchError> {
    config.validate()?;
    let table = match &config.dataset {
        Dataset::Csv {
            path, label_column, ..
        } => Some(CsvDataset::load(path, label_column)?),
        Dataset::Synthetic(_) => None,
    };
    let input = table.as_ref().map_or(2, CsvDataset::dim);
    let network = config.network.config(input);
    let name = config
        .learner
        .build(network.clone(), 0)
        .map_err(|source| BenchError::RepLearner { rep: 0, source })?
        .name();

    let per_rep = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let (data_seed, learner_seed) = repetition_seeds(config.seed, rep);
            let mut learner = config
                .learner
                .build(network.clone(), learner_seed)
                .map_err(|source| BenchError::RepLearner { rep, source })?;
            let items: Vec<StreamItem> = match (&config.dataset, &table) {
                (Dataset::Synthetic(stream), _) => {
                    SyntheticStream::new(stream.clone().with_seed(data_seed))
                        .map_err(|source| BenchError::RepStream { rep, source })?
                        .collect::<Result<_, _>>()
                        .map_err(|source| BenchError::RepStream { rep, source })?
                }
                (Dataset::Csv { steps, .. }, Some(table)) => {
                    let rows = table.shuffled(data_seed);
                    let n = steps.unwrap_or(rows.len()).min(rows.len());
                    rows.into_iter().take(n).map(StreamItem::clean).collect()
                }
                (Dataset::Csv { .. }, None) => unreachable!("table loaded above"),
            };
            run_prequential(learner.as_mut(), items, config.fading, config.score)
                .map_err(|source| BenchError::RepNetwork { rep, source })
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    RunResult::from_reps(name, per_rep)
}
