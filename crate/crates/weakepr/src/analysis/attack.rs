//! The prediction attack: exhaustive enumeration of balanced slicings.
//!
//! For a row of N readings the attacker enumerates every one of the
//! C(N, N/2) ways to split the serials into two equal halves and computes
//! the deviation statistic `z_above - z_below` for each. If the readings
//! secretly carried the future strong outcomes, the slicing Bob later
//! induces would stand out at the top of that distribution; if they do
//! not, its rank is uniform. The statistic is scale-free and comparable
//! across subset sizes, so the actually induced line is ranked against the
//! balanced population even when its own split is not exactly even.

use super::slicing::{slice, BinaryLine};
use super::AnalysisError;

/// Exact binomial coefficient in integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Iterator over all n-bit masks with exactly k bits set, ascending
/// (Gosper's hack).
pub struct BalancedMasks {
    next: Option<u32>,
    limit: u32,
}

pub fn balanced_masks(n: u32, k: u32) -> BalancedMasks {
    assert!(n <= 30 && k <= n);
    BalancedMasks {
        next: Some((1u32 << k) - 1),
        limit: 1u32 << n,
    }
}

impl Iterator for BalancedMasks {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let current = self.next?;
        if current >= self.limit {
            self.next = None;
            return None;
        }
        self.next = if current == 0 {
            None
        } else {
            let low = current & current.wrapping_neg();
            let ripple = current + low;
            Some((((current ^ ripple) >> 2) / low) | ripple)
        };
        Some(current)
    }
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    pub n: usize,
    /// Exactly C(n, n/2).
    pub total_slicings: u64,
    /// Deviation statistic per enumerated slicing, enumeration order. The
    /// mask's bit i refers to the i-th serial of the row in ascending
    /// order; set bits form the above half.
    pub deviations: Vec<(u32, f64)>,
    pub max_deviation: f64,
    /// Number of slicings within one delta-shift of the maximum: the
    /// deviation change a single delta-sized reading error can cause,
    /// `sqrt(2/n)` in statistic units.
    pub ties_at_top: u64,
    pub tie_window: f64,
    /// Statistic of the slicing the true line induces, when given.
    pub true_deviation: Option<f64>,
    /// 1 + number of enumerated slicings strictly above the true one.
    pub true_rank: Option<u64>,
}

/// Enumerate every balanced slicing of one row. `line`, when given, is the
/// strong line whose induced slicing gets ranked against the population.
/// Rows larger than `cap` (at most 30) are refused rather than sampled.
pub fn prediction_attack(
    row: &[(u64, f64)],
    line: Option<&BinaryLine>,
    delta: f64,
    cap: usize,
) -> Result<AttackReport, AnalysisError> {
    let n = row.len();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(AnalysisError::BadInput(format!(
            "attack needs a nonempty even-sized row, got {n}"
        )));
    }
    if n > cap || n > 30 {
        return Err(AnalysisError::TooLarge {
            n,
            cap: cap.min(30),
        });
    }
    let half = n / 2;
    let total = binomial(n as u64, half as u64);
    let expected = u64::try_from(total).expect("cap <= 30 keeps counts in range");

    let readings: Vec<f64> = row.iter().map(|(_, q)| *q).collect();
    let row_sum: f64 = readings.iter().sum();
    let z_norm = delta * (half as f64).sqrt();

    let mut deviations = Vec::with_capacity(expected as usize);
    let mut max_deviation = f64::NEG_INFINITY;
    for mask in balanced_masks(n as u32, half as u32) {
        let mut sum_above = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            sum_above += readings[i];
            bits &= bits - 1;
        }
        let sum_below = row_sum - sum_above;
        let d = (sum_above - sum_below) / z_norm;
        max_deviation = max_deviation.max(d);
        deviations.push((mask, d));
    }
    debug_assert_eq!(deviations.len() as u64, expected);

    let tie_window = (2.0 / n as f64).sqrt();
    let ties_at_top = deviations
        .iter()
        .filter(|(_, d)| *d >= max_deviation - tie_window)
        .count() as u64;

    let (true_deviation, true_rank) = match line {
        None => (None, None),
        Some(line) => {
            let (above, below) = slice(row, line, delta)?;
            let d_true = above.z_score - below.z_score;
            // Tolerance absorbs the rounding difference between this
            // slicing path and the enumeration path when the true line is
            // itself one of the enumerated masks.
            let eps = 1e-9 * (1.0 + d_true.abs());
            let rank = 1 + deviations.iter().filter(|(_, d)| *d > d_true + eps).count() as u64;
            (Some(d_true), Some(rank))
        }
    };

    Ok(AttackReport {
        n,
        total_slicings: expected,
        deviations,
        max_deviation,
        ties_at_top,
        tie_window,
        true_deviation,
        true_rank,
    })
}
