//! File formats: symbol streams (decimal text, one value per whitespace
//! gap), partitions, matrices, and interval-set flag syntax.

use std::fs;
use std::path::Path;

use rawcode_core::baselines::StochasticMatrix;
use rawcode_core::coding::{Partition, SymbolStream};
use rawcode_core::interval::{Interval, IntervalSet};
use rawcode_core::rational::parse_rational;

use crate::CliError;

/// Parses a stream file: whitespace/newline-separated unsigned decimals
/// below the alphabet size. Errors carry the file and line.
pub fn read_stream_file(path: &Path, alphabet: u32) -> Result<SymbolStream, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut symbols = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        for token in line.split_whitespace() {
            let value: u32 = token.parse().map_err(|_| {
                CliError::runtime(format!(
                    "{}:{}: {token:?} is not an unsigned decimal",
                    path.display(),
                    lineno + 1
                ))
            })?;
            if value >= alphabet {
                return Err(CliError::runtime(format!(
                    "{}:{}: symbol {value} outside the alphabet 0..{alphabet}",
                    path.display(),
                    lineno + 1
                )));
            }
            symbols.push(value);
        }
    }
    SymbolStream::new(alphabet, symbols).map_err(CliError::from)
}

/// One symbol per line; re-parses to the identical stream.
pub fn render_stream(stream: &SymbolStream) -> String {
    let mut out = String::with_capacity(stream.len() * 2);
    for s in stream.symbols() {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

/// Resolves `binary`, `dyadic:K`, `bridge:k`, or `@path`.
pub fn load_partition(spec: &str) -> Result<Partition, CliError> {
    if let Some(path) = spec.strip_prefix('@') {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::runtime(format!("cannot read {path}: {e}")))?;
        return Partition::parse_text(&text).map_err(CliError::from);
    }
    if spec == "binary" {
        return Ok(Partition::binary());
    }
    if let Some(k) = spec.strip_prefix("dyadic:") {
        let k: u32 = k
            .parse()
            .map_err(|_| CliError::usage(format!("bad dyadic partition order {k:?}")))?;
        return Partition::dyadic(k).map_err(CliError::usage_from);
    }
    if let Some(k) = spec.strip_prefix("bridge:") {
        let k: u32 = k
            .parse()
            .map_err(|_| CliError::usage(format!("bad bridge partition width {k:?}")))?;
        return Partition::bridge(k).map_err(CliError::usage_from);
    }
    Err(CliError::usage(format!(
        "unknown partition {spec:?}: expected binary, dyadic:K, bridge:k or @file"
    )))
}

pub fn load_matrix(path: &Path) -> Result<StochasticMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    StochasticMatrix::parse_text(&text).map_err(CliError::from)
}

/// Interval-set flag syntax: comma-separated `lo:hi` pairs with rational
/// endpoints, e.g. `0:1/2` or `0:1/4,3/8:1/2`.
pub fn parse_interval_set(text: &str) -> Result<IntervalSet, CliError> {
    let mut spans = Vec::new();
    for part in text.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| CliError::usage(format!("bad interval {part:?}: expected lo:hi")))?;
        let lo = parse_rational(lo).map_err(CliError::usage_from)?;
        let hi = parse_rational(hi).map_err(CliError::usage_from)?;
        spans.push(Interval::new(lo, hi).map_err(CliError::usage_from)?);
    }
    Ok(IntervalSet::from_spans(spans))
}

/// Comma-separated rational list (probabilities, initial distributions).
pub fn parse_rational_list(text: &str) -> Result<Vec<rawcode_core::Rational>, CliError> {
    text.split(',')
        .map(|t| parse_rational(t).map_err(CliError::usage_from))
        .collect()
}

/// Comma-separated symbol word.
pub fn parse_word(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| CliError::usage(format!("bad symbol {t:?} in word")))
        })
        .collect()
}
