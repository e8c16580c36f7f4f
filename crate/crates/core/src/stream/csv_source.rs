use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::StreamError;
use crate::{Label, LabeledExample};

/// A numeric CSV table, min-max rescaled per feature to `[0, 1]`.
///
/// Constant columns map to 0. Scaling is computed over the whole file.
#[derive(Debug, Clone)]
pub struct CsvDataset {
    pub feature_names: Vec<String>,
    pub examples: Vec<LabeledExample>,
}

impl CsvDataset {
    pub fn load(path: impl AsRef<Path>, label_column: &str) -> Result<Self, StreamError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| StreamError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file, path, label_column)
    }

    fn from_reader<R: std::io::Read>(
        reader: R,
        path: &Path,
        label_column: &str,
    ) -> Result<Self, StreamError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let csv_err = |row: u64, source: csv::Error| StreamError::Csv {
            path: path.to_path_buf(),
            row,
            source,
        };
        let headers = reader.headers().map_err(|e| csv_err(1, e))?.clone();
        if headers.is_empty() {
            return Err(StreamError::EmptyFile {
                path: path.to_path_buf(),
            });
        }
        let label_idx = headers
            .iter()
            .position(|h| h == label_column)
            .ok_or_else(|| StreamError::MissingLabelColumn {
                path: path.to_path_buf(),
                column: label_column.to_string(),
            })?;
        let feature_names: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != label_idx)
            .map(|(_, h)| h.to_string())
            .collect();

        let mut rows: Vec<(Vec<f64>, Label)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let row = e.position().map_or(0, |p| p.line());
                csv_err(row, e)
            })?;
            let row = record.position().map_or(0, |p| p.line());
            let mut x = Vec::with_capacity(feature_names.len());
            let mut label = None;
            for (i, cell) in record.iter().enumerate() {
                if i == label_idx {
                    label = match cell {
                        "0" | "0.0" => Some(Label::Negative),
                        "1" | "1.0" => Some(Label::Positive),
                        _ => {
                            return Err(StreamError::InvalidLabel {
                                path: path.to_path_buf(),
                                row,
                                value: cell.to_string(),
                            })
                        }
                    };
                    continue;
                }
                let value: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| StreamError::NonNumeric {
                        path: path.to_path_buf(),
                        row,
                        column: headers[i].to_string(),
                        value: cell.to_string(),
                    })?;
                x.push(value);
            }
            // the csv reader enforces equal record lengths, so the label is always present
            rows.push((x, label.expect("label cell present")));
        }
        if rows.is_empty() {
            return Err(StreamError::EmptyFile {
                path: path.to_path_buf(),
            });
        }
        for label in [Label::Negative, Label::Positive] {
            if !rows.iter().any(|(_, y)| *y == label) {
                return Err(StreamError::MissingClass {
                    path: path.to_path_buf(),
                    label,
                });
            }
        }

        let d = feature_names.len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for (x, _) in &rows {
            for j in 0..d {
                lo[j] = lo[j].min(x[j]);
                hi[j] = hi[j].max(x[j]);
            }
        }
        let examples = rows
            .into_iter()
            .map(|(x, y)| {
                let scaled = x
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let span = hi[j] - lo[j];
                        if span > 0.0 {
                            ((v - lo[j]) / span).clamp(0.0, 1.0)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                LabeledExample::new(scaled, y)
            })
            .collect();
        Ok(CsvDataset {
            feature_names,
            examples,
        })
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// The rows in an order determined only by `seed`.
    pub fn shuffled(&self, seed: u64) -> Vec<LabeledExample> {
        let mut examples = self.examples.clone();
        examples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        examples
    }
}

pub fn load_csv_stream(
    path: impl AsRef<Path>,
    label_column: &str,
    shuffle_seed: u64,
) -> Result<Vec<LabeledExample>, StreamError> {
    Ok(CsvDataset::load(path, label_column)?.shuffled(shuffle_seed))
}

#[cfg(test)]
mod tests {
    use std::path::PathBuf;

    use super::*;

    fn parse(text: &str) -> Result<CsvDataset, StreamError> {
        CsvDataset::from_reader(text.as_bytes(), &PathBuf::from("mem.csv"), "label")
    }

    #[test]
    fn min_max_endpoints() {
        let ds = parse("a,label\n2,0\n4,1\n").unwrap();
        assert_eq!(ds.examples[0].x, vec![0.0]);
        assert_eq!(ds.examples[1].x, vec![1.0]);
        assert_eq!(ds.examples[1].y, Label::Positive);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let ds = parse("c,label,b\n5,0,1\n5,1,2\n5,0,3\n").unwrap();
        assert!(ds.examples.iter().all(|e| e.x[0] == 0.0));
        assert_eq!(ds.examples[2].x[1], 1.0);
        assert_eq!(ds.feature_names, vec!["c", "b"]);
    }

    #[test]
    fn errors_carry_location() {
        match parse("a,label\n1,0\nx,1\n") {
            Err(StreamError::NonNumeric { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "a");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("a,b\n1,0\n"),
            Err(StreamError::MissingLabelColumn { .. })
        ));
        assert!(matches!(parse(""), Err(StreamError::EmptyFile { .. })));
        assert!(matches!(
            parse("a,label\n"),
            Err(StreamError::EmptyFile { .. })
        ));
        assert!(matches!(
            parse("a,label\n1,2\n"),
            Err(StreamError::InvalidLabel { row: 2, .. })
        ));
        assert!(matches!(
            parse("a,label\n1,0\n2,0\n"),
            Err(StreamError::MissingClass {
                label: Label::Positive,
                ..
            })
        ));
        assert!(matches!(
            parse("a,label\n1,0\n2\n"),
            Err(StreamError::Csv { .. })
        ));
    }

    #[test]
    fn shuffle_is_deterministic() {
        let text: String = std::iter::once("a,label\n".to_string())
            .chain((0..50).map(|i| format!("{i},{}\n", i % 2)))
            .collect();
        let ds = parse(&text).unwrap();
        assert_eq!(ds.shuffled(7), ds.shuffled(7));
        assert_ne!(ds.shuffled(7), ds.shuffled(8));
        let mut sorted = ds.shuffled(7);
        sorted.sort_by(|a, b| a.x[0].total_cmp(&b.x[0]));
        assert_eq!(sorted, ds.examples);
    }
}
