use std::io::Read;
use std::path::Path;

use crate::distributions::inverse_normal_cdf;
use crate::error::{Error, Result};
use crate::rng::UniformStream;

/// Cell values treated as missing.
const MISSING: [&str; 4] = ["", "?", "NA", "NaN"];

/// Which CSV columns make up a [`LabeledDataset`] and how to binarise them.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSchema {
    pub feature_columns: Vec<String>,
    pub label_column: String,
    /// Label value encoded as `Y = 1`.
    pub positive_label: String,
    /// When set, labels other than `positive_label` and this value are errors.
    pub negative_label: Option<String>,
    pub protected_column: String,
    /// Attribute value encoded as `S = 0`, the group whose positive rate is
    /// the numerator of the disparate impact.
    pub protected_value: String,
    /// When set, attribute values other than `protected_value` and this value are errors.
    pub reference_value: Option<String>,
}

impl DatasetSchema {
    /// Adult Income columns: five numeric attributes, income label, sex.
    pub fn adult() -> Self {
        Self {
            feature_columns: ["age", "education-num", "capital-gain", "capital-loss", "hours-per-week"]
                .map(String::from)
                .to_vec(),
            label_column: "income".into(),
            positive_label: ">50K".into(),
            negative_label: Some("<=50K".into()),
            protected_column: "sex".into(),
            protected_value: "Female".into(),
            reference_value: Some("Male".into()),
        }
    }
}

/// Numeric features with a binary outcome and binary protected attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
    protected: Vec<u8>,
    feature_names: Vec<String>,
    dropped: usize,
}

impl LabeledDataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<u8>,
        protected: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let rows = features.len();
        if labels.len() != rows || protected.len() != rows {
            return Err(Error::domain("features, labels and protected must share a row count"));
        }
        if let Some(bad) = features.iter().position(|r| r.len() != feature_names.len()) {
            return Err(Error::domain(format!("row {bad} has the wrong number of features")));
        }
        if labels.iter().chain(&protected).any(|&v| v > 1) {
            return Err(Error::domain("labels and protected attribute must be 0 or 1"));
        }
        for group in [0u8, 1] {
            if !protected.contains(&group) {
                return Err(Error::EmptyGroup(format!("S={group}")));
            }
        }
        Ok(Self {
            features,
            labels,
            protected,
            feature_names,
            dropped: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn protected(&self) -> &[u8] {
        &self.protected
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Rows dropped at load time because of missing values.
    pub fn dropped_count(&self) -> usize {
        self.dropped
    }

    pub fn group_sizes(&self) -> (usize, usize) {
        let ones = self.protected.iter().filter(|&&s| s == 1).count();
        (self.rows() - ones, ones)
    }
}

/// Seeded two-feature dataset with `n_per_group` rows in each group.
///
/// Group `S = 1` has its first feature shifted by `shift`; labels are drawn
/// from a logistic model in both features, so a fitted classifier scores the
/// reference group higher when `shift > 0`.
pub fn synthetic_biased_dataset(n_per_group: usize, shift: f64, seed: u64) -> Result<LabeledDataset> {
    let mut stream = UniformStream::new(seed, 0);
    let mut features = Vec::with_capacity(2 * n_per_group);
    let mut labels = Vec::with_capacity(2 * n_per_group);
    let mut protected = Vec::with_capacity(2 * n_per_group);
    for s in [0u8, 1] {
        for _ in 0..n_per_group {
            let x1 = inverse_normal_cdf(stream.next_open01()) + shift * f64::from(s);
            let x2 = inverse_normal_cdf(stream.next_open01());
            let eta = 1.5 * x1 + 0.5 * x2 - 0.5;
            let u = stream.next_open01();
            labels.push(u8::from(u < 1.0 / (1.0 + (-eta).exp())));
            features.push(vec![x1, x2]);
            protected.push(s);
        }
    }
    LabeledDataset::new(features, labels, protected, vec!["x1".into(), "x2".into()])
}

pub fn load_csv_dataset(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path)?;
    read_csv_dataset(file, schema)
}

/// Reads a headed CSV. Surrounding whitespace in cells is ignored; rows with
/// a missing value in any selected column are dropped and counted.
pub fn read_csv_dataset<R: Read>(reader: R, schema: &DatasetSchema) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let feature_idx = schema
        .feature_columns
        .iter()
        .map(|c| column(c))
        .collect::<Result<Vec<_>>>()?;
    let label_idx = column(&schema.label_column)?;
    let protected_idx = column(&schema.protected_column)?;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut protected = Vec::new();
    let mut dropped = 0;
    for (k, record) in rdr.records().enumerate() {
        // header is line 1
        let row = k + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let selected = feature_idx.iter().chain([&label_idx, &protected_idx]);
        if selected
            .clone()
            .any(|&i| MISSING.contains(&record.get(i).unwrap_or("")))
        {
            dropped += 1;
            continue;
        }
        let values = feature_idx
            .iter()
            .map(|&i| {
                let cell = &record[i];
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row,
                        message: format!("`{cell}` in column `{}` is not a finite number", &headers[i]),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let label = binarise(
            &record[label_idx],
            &schema.positive_label,
            schema.negative_label.as_deref(),
        )
        .ok_or_else(|| Error::Parse {
            row,
            message: format!(
                "unknown label `{}` in column `{}`",
                &record[label_idx], schema.label_column
            ),
        })?;
        // protected_value ↦ S = 0
        let s = binarise(
            &record[protected_idx],
            &schema.protected_value,
            schema.reference_value.as_deref(),
        )
        .map(|v| 1 - v)
        .ok_or_else(|| Error::Parse {
            row,
            message: format!(
                "unknown protected value `{}` in column `{}`",
                &record[protected_idx], schema.protected_column
            ),
        })?;
        features.push(values);
        labels.push(label);
        protected.push(s);
    }
    let (s0, s1) = (schema.protected_value.clone(), schema.reference_value.clone());
    let mut data =
        LabeledDataset::new(features, labels, protected, schema.feature_columns.clone()).map_err(|e| match e {
            Error::EmptyGroup(g) if g == "S=0" => Error::EmptyGroup(s0),
            Error::EmptyGroup(_) => Error::EmptyGroup(s1.unwrap_or_else(|| format!("not {}", schema.protected_value))),
            other => other,
        })?;
    data.dropped = dropped;
    Ok(data)
}

/// 1 for `positive`, 0 for `negative` or, when no negative is given, anything
/// else. A trailing `.` is ignored, as in the Adult test split.
fn binarise(cell: &str, positive: &str, negative: Option<&str>) -> Option<u8> {
    let is = |want: &str| cell == want || cell.strip_suffix('.') == Some(want);
    if is(positive) {
        Some(1)
    } else {
        match negative {
            Some(neg) if is(neg) => Some(0),
            Some(_) => None,
            None => Some(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> DatasetSchema {
        DatasetSchema {
            feature_columns: vec!["a".into(), "b".into()],
            label_column: "y".into(),
            positive_label: "yes".into(),
            negative_label: Some("no".into()),
            protected_column: "g".into(),
            protected_value: "F".into(),
            reference_value: Some("M".into()),
        }
    }

    #[test]
    fn drops_rows_with_missing_values() {
        let csv = "a,b,y,g\n1,2,yes,F\n3,?,no,M\n5,6,no,M\n7,8, yes ,F\n";
        let d = read_csv_dataset(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(d.rows(), 3);
        assert_eq!(d.dropped_count(), 1);
        assert_eq!(d.labels(), &[1, 0, 1]);
        assert_eq!(d.protected(), &[0, 1, 0]);
        assert_eq!(d.features()[2], vec![7.0, 8.0]);
        assert_eq!(d.group_sizes(), (2, 1));
    }

    #[test]
    fn unknown_label_names_the_row() {
        let csv = "a,b,y,g\n1,2,yes,F\n3,4,maybe,M\n";
        match read_csv_dataset(csv.as_bytes(), &schema()) {
            Err(Error::Parse { row, message }) => {
                assert_eq!(row, 3);
                assert!(message.contains("maybe"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_column_and_bad_number() {
        let csv = "a,y,g\n1,yes,F\n";
        assert!(matches!(read_csv_dataset(csv.as_bytes(), &schema()), Err(Error::MissingColumn(c)) if c == "b"));
        let csv = "a,b,y,g\n1,x,yes,F\n";
        assert!(matches!(
            read_csv_dataset(csv.as_bytes(), &schema()),
            Err(Error::Parse { row: 2, .. })
        ));
    }

    #[test]
    fn vanished_group() {
        let csv = "a,b,y,g\n1,2,yes,M\n3,4,no,M\n5,?,no,F\n";
        assert!(matches!(read_csv_dataset(csv.as_bytes(), &schema()), Err(Error::EmptyGroup(g)) if g == "F"));
    }

    #[test]
    fn adult_style_labels() {
        assert_eq!(binarise(">50K.", ">50K", None), Some(1));
        assert_eq!(binarise("<=50K", ">50K", None), Some(0));
        assert_eq!(binarise("1", "1", Some("0")), Some(1));
        assert_eq!(binarise("2", "1", Some("0")), None);
    }
}
