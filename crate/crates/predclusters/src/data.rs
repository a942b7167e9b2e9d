//! CSV loading and writing.
//!
//! Files need a header row, comma separators and numeric cells only. The
//! outcome column is removed from the features.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use predclusters_core::{Dataset, DatasetError, Normalization};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}, column {col} (`{name}`): cannot parse `{value}` as a number")]
    Parse {
        /// 1-based data row, header excluded.
        row: usize,
        /// 1-based column.
        col: usize,
        name: String,
        value: String,
    },
    #[error("target column `{0}` not found")]
    TargetNotFound(String),
    #[error("need at least 2 rows, found {0}")]
    EmptyDataset(usize),
    #[error("target is the only column; no features remain")]
    NoFeatures,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Which column holds the outcome.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetColumn {
    #[default]
    Last,
    /// 0-based column index.
    Index(usize),
    Name(String),
}

impl FromStr for TargetColumn {
    type Err = std::convert::Infallible;

    /// `last`, a 0-based index, or a header name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            TargetColumn::Last
        } else if let Ok(i) = s.parse() {
            TargetColumn::Index(i)
        } else {
            TargetColumn::Name(s.to_string())
        })
    }
}

impl fmt::Display for TargetColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetColumn::Last => f.write_str("last"),
            TargetColumn::Index(i) => write!(f, "{i}"),
            TargetColumn::Name(n) => f.write_str(n),
        }
    }
}

impl TargetColumn {
    fn resolve(&self, header: &[String]) -> Result<usize, LoadError> {
        let found = match self {
            TargetColumn::Last => header.len().checked_sub(1),
            TargetColumn::Index(i) => (*i < header.len()).then_some(*i),
            TargetColumn::Name(n) => header.iter().position(|h| h == n),
        };
        found.ok_or_else(|| LoadError::TargetNotFound(self.to_string()))
    }
}

/// Loads a CSV file and applies `normalization` to the features.
pub fn load_csv(
    path: impl AsRef<Path>,
    target: &TargetColumn,
    normalization: Normalization,
) -> Result<Dataset, LoadError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(LoadError::FileNotFound(path.to_path_buf()));
    }
    let file = std::fs::File::open(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let dataset = read_csv(file, target)?.with_source(path.display().to_string());
    Ok(dataset.normalize(normalization))
}

/// Parses CSV content from any reader; no normalization.
pub fn read_csv<R: std::io::Read>(reader: R, target: &TargetColumn) -> Result<Dataset, LoadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let t = target.resolve(&header)?;
    if header.len() < 2 {
        return Err(LoadError::NoFeatures);
    }

    let mut features = Vec::new();
    let mut outcome = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| LoadError::Parse {
                    row: r + 1,
                    col: c + 1,
                    name: header[c].clone(),
                    value: cell.to_string(),
                })?;
            if c == t {
                outcome.push(value);
            } else {
                features.push(value);
            }
        }
    }
    if outcome.len() < 2 {
        return Err(LoadError::EmptyDataset(outcome.len()));
    }
    let names = header
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != t)
        .map(|(_, h)| h.clone())
        .collect();
    Ok(Dataset::new(features, header.len() - 1, outcome)?.with_names(names, header[t].clone()))
}

/// Writes features then the outcome as the last column. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_csv<W: std::io::Write>(dataset: &Dataset, writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = dataset.feature_names().iter().map(String::as_str).collect();
    header.push(dataset.outcome_name());
    w.write_record(&header)?;
    for (row, y) in dataset.rows().zip(dataset.outcome()) {
        let mut cells: Vec<String> = row.iter().map(f64::to_string).collect();
        cells.push(y.to_string());
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, target: &str) -> Result<Dataset, LoadError> {
        read_csv(text.as_bytes(), &target.parse().unwrap())
    }

    #[test]
    fn minimal_file() {
        let ds = parse("a,b\n1,2\n3,4\n", "last").unwrap();
        assert_eq!((ds.n(), ds.d()), (2, 1));
        assert_eq!(ds.features(), &[1.0, 3.0]);
        assert_eq!(ds.outcome(), &[2.0, 4.0]);
        assert_eq!(ds.feature_names(), &["a".to_string()]);
        assert_eq!(ds.outcome_name(), "b");
    }

    #[test]
    fn target_by_name_and_index() {
        let text = "x,y,z\n1,2,3\n4,5,6\n";
        let by_name = parse(text, "y").unwrap();
        assert_eq!(by_name.outcome(), &[2.0, 5.0]);
        assert_eq!(by_name.features(), &[1.0, 3.0, 4.0, 6.0]);
        let by_index = parse(text, "0").unwrap();
        assert_eq!(by_index.outcome(), &[1.0, 4.0]);
        assert!(matches!(parse(text, "w"), Err(LoadError::TargetNotFound(_))));
        assert!(matches!(parse(text, "3"), Err(LoadError::TargetNotFound(_))));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse("a,b\n1,2\n3,x\n", "last") {
            Err(LoadError::Parse { row, col, value, .. }) => {
                assert_eq!((row, col, value.as_str()), (2, 2, "x"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("a,b\n1,\n", "last"), Err(LoadError::Parse { row: 1, col: 2, .. })));
        assert!(matches!(parse("a,b\n1,NaN\n2,3\n", "last"), Err(LoadError::Parse { .. })));
    }

    #[test]
    fn too_few_rows_or_columns() {
        assert!(matches!(parse("a,b\n1,2\n", "last"), Err(LoadError::EmptyDataset(1))));
        assert!(matches!(parse("a,b\n", "last"), Err(LoadError::EmptyDataset(0))));
        assert!(matches!(parse("a\n1\n2\n", "last"), Err(LoadError::NoFeatures)));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(matches!(parse("a,b\n1,2\n3\n", "last"), Err(LoadError::Csv(_))));
    }

    #[test]
    fn missing_file() {
        let err = load_csv("/nonexistent/file.csv", &TargetColumn::Last, Normalization::None);
        assert!(matches!(err, Err(LoadError::FileNotFound(_))));
    }

    #[test]
    fn constant_column_under_zscore() {
        let ds = parse("a,c,y\n1,5,0\n2,5,1\n3,5,2\n", "last").unwrap();
        let z = ds.normalize(Normalization::Zscore);
        assert_eq!(z.column(1).collect::<Vec<_>>(), vec![0.0; 3]);
    }

    #[test]
    fn target_parsing() {
        assert_eq!("LAST".parse::<TargetColumn>().unwrap(), TargetColumn::Last);
        assert_eq!("12".parse::<TargetColumn>().unwrap(), TargetColumn::Index(12));
        assert_eq!("medv".parse::<TargetColumn>().unwrap(), TargetColumn::Name("medv".into()));
    }
}
