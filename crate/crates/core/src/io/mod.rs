//! Configuration files, CSV output and run manifests.

mod config;
pub mod csv;
mod manifest;

use std::path::Path;

pub use config::{parse_config, parse_config_file, parse_matrix_value, write_config, ConfigError};
pub use manifest::{sha256_hex, OutputDir, RunManifest, MANIFEST_FILE};

use crate::matrix::StochasticMatrix;
use crate::scalar::Scalar;

/// Matrix file: `N` followed by `N^2` reals in row-major order, separated
/// by whitespace or commas.
pub fn parse_matrix_text<T: Scalar>(text: &str) -> Result<StochasticMatrix<T>, ConfigError> {
    let mut tokens = text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty());
    let bad = |m: String| ConfigError::Parse { line: None, message: m };
    let n: usize = tokens
        .next()
        .ok_or_else(|| bad("empty matrix file".into()))?
        .parse()
        .map_err(|_| bad("first token must be the dimension N".into()))?;
    let entries: Vec<f64> =
        tokens.map(|t| t.parse::<f64>().map_err(|_| bad(format!("not a number: {t:?}")))).collect::<Result<_, _>>()?;
    let value = toml::Value::Array(entries.into_iter().map(toml::Value::Float).collect());
    parse_matrix_value(&value, n, "F")
}

/// `"symmetric-<diag>"` or a comma-separated row-major list of `n^2` reals.
pub fn parse_matrix_spec<T: Scalar>(spec: &str, n: usize) -> Result<StochasticMatrix<T>, ConfigError> {
    parse_matrix_value(&toml::Value::String(spec.to_string()), n, "F")
}

pub fn read_matrix_file<T: Scalar>(path: &Path) -> Result<StochasticMatrix<T>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Parse { line: None, message: format!("{}: {e}", path.display()) })?;
    parse_matrix_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_text() {
        let f: StochasticMatrix<f64> = parse_matrix_text("2\n0.8 0.2\n0.4, 0.6\n").unwrap();
        assert_eq!(f.get(1, 0), 0.4);
        let err = parse_matrix_text::<f64>("2\n0.8 0.2\n0.4 0.5\n").unwrap_err();
        assert_eq!(err.key(), Some("F row 2"));
        assert!(parse_matrix_text::<f64>("2\n0.8 0.2\n").is_err());
    }
}
