//! CHSH statistic from four EPR runs at paired evening angles.
//!
//! With runs at angle pairs (a,b), (a,b'), (a',b), (a',b') the statistic is
//! `S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|`, bounded by 2 for local
//! deterministic assignments and by 2 sqrt(2) quantum mechanically.
//!
//! Correlations are computed from per-serial products of the two coded
//! lists. A run's single sign convention flips both factors together, so
//! the product, and therefore S, is readable without unsealing the key.

use crate::protocol::{CodedList, CodedValue};

use super::AnalysisError;

/// One run's contribution: the evening angle pair and per-serial products.
#[derive(Debug, Clone)]
pub struct ChshRun {
    pub right_deg: f64,
    pub left_deg: f64,
    pub products: Vec<f64>,
}

impl ChshRun {
    /// Pair up a run's right and left coded lists by serial.
    pub fn from_coded(
        right_deg: f64,
        left_deg: f64,
        right: &CodedList,
        left: &CodedList,
    ) -> Result<Self, AnalysisError> {
        if right.records().len() != left.records().len() {
            return Err(AnalysisError::LengthMismatch {
                left: left.records().len(),
                right: right.records().len(),
            });
        }
        let sign = |v: CodedValue| match v {
            CodedValue::Above => 1.0,
            CodedValue::Below => -1.0,
        };
        let mut products = Vec::with_capacity(right.records().len());
        for (r, l) in right.records().iter().zip(left.records()) {
            if r.serial != l.serial {
                return Err(AnalysisError::SerialMismatch { serial: r.serial });
            }
            products.push(sign(r.value) * sign(l.value));
        }
        Ok(Self {
            right_deg,
            left_deg,
            products,
        })
    }

    pub fn correlation(&self) -> f64 {
        if self.products.is_empty() {
            return 0.0;
        }
        self.products.iter().sum::<f64>() / self.products.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct ChshOutcome {
    pub s: f64,
    /// (right deg, left deg, E) per run, input order.
    pub correlations: Vec<(f64, f64, f64)>,
}

/// Evaluate S over four runs ordered (a,b), (a,b'), (a',b), (a',b').
///
/// The angle pattern and the ensemble sizes are validated.
pub fn chsh(runs: &[ChshRun]) -> Result<ChshOutcome, AnalysisError> {
    if runs.len() != 4 {
        return Err(AnalysisError::BadInput(format!(
            "CHSH needs exactly 4 runs, got {}",
            runs.len()
        )));
    }
    let n = runs[0].products.len();
    if runs.iter().any(|r| r.products.len() != n) || n == 0 {
        return Err(AnalysisError::BadInput(
            "CHSH runs must share one nonzero ensemble size".into(),
        ));
    }
    let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
    let (a, b) = (runs[0].right_deg, runs[0].left_deg);
    let b_prime = runs[1].left_deg;
    let a_prime = runs[2].right_deg;
    let pattern_ok = close(runs[1].right_deg, a)
        && close(runs[2].left_deg, b)
        && close(runs[3].right_deg, a_prime)
        && close(runs[3].left_deg, b_prime)
        && !close(a, a_prime)
        && !close(b, b_prime);
    if !pattern_ok {
        return Err(AnalysisError::BadInput(
            "CHSH runs must follow the (a,b), (a,b'), (a',b), (a',b') angle pattern".into(),
        ));
    }
    let e: Vec<f64> = runs.iter().map(|r| r.correlation()).collect();
    let s = (e[0] - e[1] + e[2] + e[3]).abs();
    Ok(ChshOutcome {
        s,
        correlations: runs
            .iter()
            .zip(&e)
            .map(|(r, e)| (r.right_deg, r.left_deg, *e))
            .collect(),
    })
}
