//! Dataset schema from a `key=value` file plus command-line overrides.

use std::fs;
use std::path::Path;

use wasser_infer::fairness::DatasetSchema;

use crate::args::SchemaArgs;
use crate::CliError;

/// Applies `key=value` lines to `schema`. Blank lines and `#` comments are skipped.
pub fn apply_config(schema: &mut DatasetSchema, text: &str, origin: &Path) -> Result<(), CliError> {
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| CliError::Usage(format!("{}:{}: {msg}", origin.display(), k + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let value = value.trim().to_string();
        match key.trim().replace('-', "_").as_str() {
            "features" => schema.feature_columns = split_list(&value),
            "label" => schema.label_column = value,
            "positive" => schema.positive_label = value,
            "negative" => schema.negative_label = optional(value),
            "protected" => schema.protected_column = value,
            "protected_value" => schema.protected_value = value,
            "reference_value" => schema.reference_value = optional(value),
            other => return Err(bad(&format!("unknown key `{other}`"))),
        }
    }
    if schema.feature_columns.is_empty() {
        return Err(CliError::Usage(format!("{}: no feature columns", origin.display())));
    }
    Ok(())
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// An empty value clears an optional entry.
fn optional(v: String) -> Option<String> {
    (!v.is_empty()).then_some(v)
}

/// Adult defaults, then the config file, then flags.
pub fn resolve(args: &SchemaArgs) -> Result<DatasetSchema, CliError> {
    let mut schema = DatasetSchema::adult();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        apply_config(&mut schema, &text, path)?;
    }
    if let Some(f) = &args.features {
        schema.feature_columns = f
            .iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if schema.feature_columns.is_empty() {
            return Err(CliError::Usage("--features is empty".into()));
        }
    }
    let set = |slot: &mut String, v: &Option<String>| {
        if let Some(v) = v {
            *slot = v.clone();
        }
    };
    set(&mut schema.label_column, &args.label);
    set(&mut schema.positive_label, &args.positive);
    set(&mut schema.protected_column, &args.protected);
    set(&mut schema.protected_value, &args.protected_value);
    if let Some(v) = &args.negative {
        schema.negative_label = optional(v.clone());
    }
    if let Some(v) = &args.reference_value {
        schema.reference_value = optional(v.clone());
    }
    Ok(schema)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_overrides_defaults() {
        let mut s = DatasetSchema::adult();
        let text = "# census\nfeatures = a, b\nlabel=y\npositive = 1\nnegative=\nprotected-value = F\n";
        apply_config(&mut s, text, Path::new("c.cfg")).unwrap();
        assert_eq!(s.feature_columns, vec!["a", "b"]);
        assert_eq!(s.label_column, "y");
        assert_eq!(s.positive_label, "1");
        assert_eq!(s.negative_label, None);
        assert_eq!(s.protected_value, "F");
        assert_eq!(s.protected_column, "sex");
    }

    #[test]
    fn config_errors_name_the_line() {
        let mut s = DatasetSchema::adult();
        match apply_config(&mut s, "label=y\ncolour=red\n", Path::new("c.cfg")) {
            Err(CliError::Usage(msg)) => assert!(msg.starts_with("c.cfg:2:"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(apply_config(&mut s, "no equals sign", Path::new("c.cfg")).is_err());
    }
}
