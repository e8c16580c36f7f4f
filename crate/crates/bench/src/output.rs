use std::path::Path;

use crate::experiment::{BenchError, Metric, RunResult};

/// Label of the summary rows written after the per-step rows.
pub const FINAL_STEP: &str = "final";

/// One row of the aggregate CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// 1-based step, or `None` for the final-step summary.
    pub step: Option<usize>,
    pub metric: Metric,
    pub mean: f64,
    pub stderr: f64,
}

/// The aggregate rows of `result` in file order: every step for each metric,
/// then one final-step row per metric.
pub fn summary_rows(result: &RunResult) -> Vec<SummaryRow> {
    let mut rows = Vec::with_capacity((result.steps() + 1) * Metric::ALL.len());
    for t in 0..result.steps() {
        for metric in Metric::ALL {
            let agg = result.metric(metric);
            rows.push(SummaryRow {
                step: Some(t + 1),
                metric,
                mean: agg.mean[t],
                stderr: agg.stderr[t],
            });
        }
    }
    for metric in Metric::ALL {
        if let Some((mean, stderr)) = result.final_value(metric) {
            rows.push(SummaryRow {
                step: None,
                metric,
                mean,
                stderr,
            });
        }
    }
    rows
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> BenchError + '_ {
    move |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `step,metric,mean,stderr` rows. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_csv(result: &RunResult, path: &Path) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_error(path))?;
    writer
        .write_record(["step", "metric", "mean", "stderr"])
        .map_err(csv_error(path))?;
    for row in summary_rows(result) {
        let step = row
            .step
            .map_or_else(|| FINAL_STEP.to_string(), |s| s.to_string());
        writer
            .write_record([
                step,
                row.metric.name().to_string(),
                row.mean.to_string(),
                row.stderr.to_string(),
            ])
            .map_err(csv_error(path))?;
    }
    writer.flush().map_err(io_error(path))
}

/// Writes the long-format per-repetition file `step,rep,gmean,recall,specificity`.
pub fn write_per_rep_csv(result: &RunResult, path: &Path) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_error(path))?;
    writer
        .write_record(["step", "rep", "gmean", "recall", "specificity"])
        .map_err(csv_error(path))?;
    for (rep, series) in result.per_rep.iter().enumerate() {
        for (t, m) in series.iter().enumerate() {
            writer
                .write_record([
                    (t + 1).to_string(),
                    rep.to_string(),
                    m.gmean.to_string(),
                    m.recall.to_string(),
                    m.specificity.to_string(),
                ])
                .map_err(csv_error(path))?;
        }
    }
    writer.flush().map_err(io_error(path))
}

/// Parses a file written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<SummaryRow>, BenchError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_error(path))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error(path))?;
        let line = record.position().map_or(0, |p| p.line());
        let malformed = |reason: String| BenchError::Malformed {
            path: path.to_path_buf(),
            row: line,
            reason,
        };
        if record.len() != 4 {
            return Err(malformed(format!(
                "expected 4 fields, found {}",
                record.len()
            )));
        }
        let step = match &record[0] {
            FINAL_STEP => None,
            s => Some(
                s.parse()
                    .map_err(|_| malformed(format!("bad step {s:?}")))?,
            ),
        };
        let metric = Metric::from_name(&record[1])
            .ok_or_else(|| malformed(format!("unknown metric {:?}", &record[1])))?;
        let number = |i: usize| -> Result<f64, BenchError> {
            record[i]
                .parse()
                .map_err(|_| malformed(format!("bad number {:?}", &record[i])))
        };
        rows.push(SummaryRow {
            step,
            metric,
            mean: number(2)?,
            stderr: number(3)?,
        });
    }
    Ok(rows)
}
