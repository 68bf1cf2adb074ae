//! Slicing ledger rows by binary lines and re-summing each half.

use crate::protocol::{CodedList, CodedValue};
use std::collections::BTreeMap;

use super::AnalysisError;

/// Per-serial above/below assignment derived from a strong-outcome list.
/// Covers every serial exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLine {
    assignment: BTreeMap<u64, CodedValue>,
}

impl BinaryLine {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, CodedValue)>) -> Self {
        Self {
            assignment: pairs.into_iter().collect(),
        }
    }

    pub fn from_coded(list: &CodedList) -> Self {
        Self::from_pairs(list.records().iter().map(|r| (r.serial, r.value)))
    }

    /// Flip above and below; a sign-convention hypothesis.
    pub fn flipped(&self) -> Self {
        Self {
            assignment: self
                .assignment
                .iter()
                .map(|(s, v)| {
                    let flipped = match v {
                        CodedValue::Above => CodedValue::Below,
                        CodedValue::Below => CodedValue::Above,
                    };
                    (*s, flipped)
                })
                .collect(),
        }
    }

    pub fn get(&self, serial: u64) -> Option<CodedValue> {
        self.assignment.get(&serial).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn serials(&self) -> impl Iterator<Item = u64> + '_ {
        self.assignment.keys().copied()
    }
}

/// Sum, mean and z-score of one half of a sliced row. The z-score is taken
/// against the zero-mean null with standard deviation `delta * sqrt(size)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceStats {
    pub subset_size: usize,
    pub sum: f64,
    pub mean: f64,
    pub z_score: f64,
}

impl SliceStats {
    fn from_values(values: &[f64], delta: f64) -> Self {
        let n = values.len();
        let sum: f64 = values.iter().sum();
        let mean = if n == 0 { 0.0 } else { sum / n as f64 };
        let z_score = if n == 0 {
            0.0
        } else {
            sum / (delta * (n as f64).sqrt())
        };
        Self {
            subset_size: n,
            sum,
            mean,
            z_score,
        }
    }
}

/// Partition one row's readings by the line and compute per-half stats.
///
/// The line must cover every serial in the row; a serial missing from the
/// line is a mismatch error.
pub fn slice(
    row: &[(u64, f64)],
    line: &BinaryLine,
    delta: f64,
) -> Result<(SliceStats, SliceStats), AnalysisError> {
    let mut above = Vec::new();
    let mut below = Vec::new();
    for (serial, value) in row {
        match line.get(*serial) {
            Some(CodedValue::Above) => above.push(*value),
            Some(CodedValue::Below) => below.push(*value),
            None => return Err(AnalysisError::SerialMismatch { serial: *serial }),
        }
    }
    Ok((
        SliceStats::from_values(&above, delta),
        SliceStats::from_values(&below, delta),
    ))
}

/// Sliced correlation of a row against a line, in units of the coupling:
/// `(mean_above - mean_below) / (2 g)`. For readings with mean `+-g c`
/// conditioned on the line this estimates `c`.
pub fn sliced_correlation(
    row: &[(u64, f64)],
    line: &BinaryLine,
    delta: f64,
    coupling: f64,
) -> Result<f64, AnalysisError> {
    let (above, below) = slice(row, line, delta)?;
    Ok((above.mean - below.mean) / (2.0 * coupling))
}
