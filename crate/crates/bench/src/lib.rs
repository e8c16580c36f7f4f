//! Repetition runner, aggregation, CSV output and command line for the
//! online stream learners in `areba`.

pub mod cli;
pub mod experiment;
pub mod output;

pub use cli::{parse_cli, Cli};
pub use experiment::{
    aggregate, repetition_seeds, run_experiment, run_prequential, Aggregate, BenchError, Dataset,
    ExperimentConfig, LearnerSpec, Metric, NetworkSettings, RunResult, ScoreLabel,
};
pub use output::{read_csv, summary_rows, write_csv, write_per_rep_csv, SummaryRow, FINAL_STEP};
