//! Inferring an unknown strong-measurement orientation from sliced weak
//! rows.
//!
//! Each protocol orientation's sliced correlation against the line
//! estimates `cos(theta)` to that line's hidden axis, so a least-squares
//! scan of `sum_o (c_o - cos(o - phi))^2` over phi recovers it: a dense
//! 0.1 degree scan followed by parabolic refinement.

use crate::measurement::PointerConfig;
use crate::protocol::{RecordSide, StoneLedger};
use crate::spinalg::Orientation;

use super::decode::rows_with_orientation;
use super::slicing::{slice, BinaryLine};
use super::AnalysisError;

/// Which weak rows feed the per-orientation correlations.
///
/// `LastCycle` keeps only the final repetition of each orientation, the
/// rows with the fewest later measurements between them and the evening
/// line; their conditional means carry the least intervening back-action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSelection {
    All,
    LastCycle,
}

#[derive(Debug, Clone)]
pub struct InferOutcome {
    pub estimate_deg: f64,
    /// (orientation deg, sliced correlation, z of the pooled contrast).
    pub correlations: Vec<(f64, f64, f64)>,
    /// Raised when every correlation is consistent with zero; the estimate
    /// is then meaningless and the interval is the whole circle.
    pub degenerate: bool,
}

/// Recover the line's hidden orientation from the weak rows of `side`.
pub fn infer_orientation(
    ledger: &StoneLedger,
    side: RecordSide,
    line: &BinaryLine,
    protocol_deg: [f64; 3],
    pointer: &PointerConfig,
    selection: RowSelection,
) -> Result<InferOutcome, AnalysisError> {
    let g = pointer.coupling();
    if g <= 0.0 {
        return Err(AnalysisError::BadInput(
            "orientation inference needs a positive coupling".into(),
        ));
    }
    let mut correlations = Vec::with_capacity(3);
    for deg in protocol_deg {
        let mut rows = rows_with_orientation(ledger, side, deg);
        if rows.is_empty() {
            return Err(AnalysisError::BadInput(format!(
                "no rows with orientation {deg} deg on this side"
            )));
        }
        if selection == RowSelection::LastCycle {
            rows = vec![*rows.last().expect("nonempty")];
        }
        let mut pooled: Vec<(u64, f64)> = Vec::new();
        for row in rows {
            pooled.extend(ledger.row_readings(side, row));
        }
        let (above, below) = slice(&pooled, line, pointer.delta())?;
        let c = (above.mean - below.mean) / (2.0 * g);
        // z of the pooled contrast against the zero-correlation null.
        let z = (above.z_score - below.z_score) / std::f64::consts::SQRT_2;
        correlations.push((deg, c, z));
    }

    let degenerate = correlations.iter().all(|(_, _, z)| z.abs() < 3.0);

    let cost = |phi_rad: f64| -> f64 {
        correlations
            .iter()
            .map(|(deg, c, _)| {
                let theta = Orientation::from_degrees(*deg).radians() - phi_rad;
                (c - theta.cos()).powi(2)
            })
            .sum()
    };

    // Dense scan at 0.1 degree.
    let step = 0.1f64.to_radians();
    let mut best_phi = 0.0;
    let mut best_cost = f64::INFINITY;
    let mut k = 0usize;
    while (k as f64) * 0.1 < 360.0 {
        let phi = (k as f64) * step;
        let c = cost(phi);
        if c < best_cost {
            best_cost = c;
            best_phi = phi;
        }
        k += 1;
    }

    // Parabolic refinement through the three neighboring samples.
    let (c_minus, c_plus) = (cost(best_phi - step), cost(best_phi + step));
    let denom = c_minus - 2.0 * best_cost + c_plus;
    let refined = if denom.abs() > 1e-18 {
        best_phi + 0.5 * step * (c_minus - c_plus) / denom
    } else {
        best_phi
    };

    Ok(InferOutcome {
        estimate_deg: Orientation::from_radians(refined).degrees(),
        correlations,
        degenerate,
    })
}

/// Distance between two directions taken modulo 180 degrees: a line's sign
/// convention is unobservable, so an axis and its opposite are the same
/// answer.
pub fn axis_distance_deg(a_deg: f64, b_deg: f64) -> f64 {
    let d = (a_deg - b_deg).rem_euclid(180.0);
    d.min(180.0 - d)
}
