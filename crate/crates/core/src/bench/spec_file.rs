//! Flat key-value sweep spec files:
//!
//! ```text
//! # comment
//! kernels = lse, zf
//! sizes = 16, 32
//! vlens = 512, 4096
//! seed = 7
//! ```
//!
//! Missing keys keep their defaults.

use std::str::FromStr;

use super::{BenchError, SweepSpec};

pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec, BenchError> {
    let mut spec = SweepSpec::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| BenchError::SpecFile { line: line_no, message };
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "kernels" => spec.kernels = parse_list(value).map_err(err)?,
            "sizes" => spec.sizes = parse_list(value).map_err(err)?,
            "fft_sizes" => spec.fft_sizes = parse_list(value).map_err(err)?,
            "vlens" => spec.vlens = parse_list(value).map_err(err)?,
            "lanes" => spec.lanes = parse_list(value).map_err(err)?,
            "seed" => spec.seed = parse_one(value).map_err(err)?,
            "issue_overhead" => spec.issue_overhead = parse_one(value).map_err(err)?,
            "strided_factor" => spec.strided_factor = parse_one(value).map_err(err)?,
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }
    Ok(spec)
}

/// Comma-separated values; an empty value yields an empty list.
pub(crate) fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("invalid value '{s}'")))
        .collect()
}

fn parse_one<T: FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("invalid value '{value}'"))
}
