//! Decoding Bob's coded lists from the sliced ledger.
//!
//! Every hypothesis pairs one of the 6 symbol-to-orientation permutations
//! with one of the 2 sign conventions. For a hypothesis, each coded list
//! slices the three ledger rows of its hypothesized orientation on its own
//! side; the statistic is the summed signed slice contrast
//! `z_above - z_below`, which is large and positive exactly when rows and
//! line belong together with the right sign. The decoded mapping is the
//! argmax, its confidence the gap to the runner-up.

use crate::protocol::{CodedList, DecodedMapping, StoneLedger};
use crate::spinalg::Orientation;

use super::slicing::{slice, BinaryLine};
use super::AnalysisError;

#[derive(Debug, Clone)]
pub struct HypothesisScore {
    /// Orientation (degrees) hypothesized for each symbol, x, y, z order.
    pub symbol_to_deg: Vec<(char, f64)>,
    pub above_is_up: bool,
    pub statistic: f64,
}

#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub mapping: DecodedMapping,
    /// Gap between the best and second-best hypothesis statistics.
    pub confidence: f64,
    pub hypotheses: Vec<HypothesisScore>,
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Decode one or more coded lists against the ledger.
///
/// Low confidence is reported, never raised as an error.
pub fn decode(
    ledger: &StoneLedger,
    lists: &[&CodedList],
    protocol_deg: [f64; 3],
    delta: f64,
) -> Result<DecodeOutcome, AnalysisError> {
    if lists.is_empty() {
        return Err(AnalysisError::BadInput("decode needs a coded list".into()));
    }
    let symbols = ['x', 'y', 'z'];
    let lines: Vec<(char, BinaryLine, crate::protocol::RecordSide)> = lists
        .iter()
        .map(|l| {
            let symbol = l
                .symbol()
                .ok_or_else(|| AnalysisError::BadInput("coded list has no records".to_string()))?;
            Ok((symbol, BinaryLine::from_coded(l), l.role.ledger_side()))
        })
        .collect::<Result<_, AnalysisError>>()?;

    let mut hypotheses = Vec::with_capacity(12);
    for perm in PERMUTATIONS {
        let symbol_to_deg: Vec<(char, f64)> = symbols
            .iter()
            .zip(perm)
            .map(|(c, slot)| (*c, protocol_deg[slot]))
            .collect();
        for above_is_up in [true, false] {
            let mut statistic = 0.0;
            for (symbol, line, side) in &lines {
                let deg = symbol_to_deg
                    .iter()
                    .find(|(c, _)| c == symbol)
                    .map(|(_, d)| *d)
                    .expect("all three symbols are mapped");
                let oriented = if above_is_up {
                    line.clone()
                } else {
                    line.flipped()
                };
                for row in rows_with_orientation(ledger, *side, deg) {
                    let readings = ledger.row_readings(*side, row);
                    let (above, below) = slice(&readings, &oriented, delta)?;
                    statistic += above.z_score - below.z_score;
                }
            }
            hypotheses.push(HypothesisScore {
                symbol_to_deg: symbol_to_deg.clone(),
                above_is_up,
                statistic,
            });
        }
    }

    let mut order: Vec<usize> = (0..hypotheses.len()).collect();
    order.sort_by(|&a, &b| {
        hypotheses[b]
            .statistic
            .partial_cmp(&hypotheses[a].statistic)
            .expect("finite statistics")
    });
    let best = &hypotheses[order[0]];
    let confidence = best.statistic - hypotheses[order[1]].statistic;
    Ok(DecodeOutcome {
        mapping: DecodedMapping {
            symbol_to_deg: best.symbol_to_deg.clone(),
            above_is_up: best.above_is_up,
        },
        confidence,
        hypotheses,
    })
}

/// Ledger rows on `side` whose recorded orientation equals `deg`.
pub fn rows_with_orientation(
    ledger: &StoneLedger,
    side: crate::protocol::RecordSide,
    deg: f64,
) -> Vec<u8> {
    let target = Orientation::from_degrees(deg).radians();
    ledger
        .rows_for_side(side)
        .into_iter()
        .filter(|row| {
            ledger
                .row_orientation_deg(side, *row)
                .map(|d| (Orientation::from_degrees(d).radians() - target).abs() < 1e-9)
                .unwrap_or(false)
        })
        .collect()
}
