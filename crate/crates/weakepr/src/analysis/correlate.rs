//! Sign correlations between binary outcome lists.

use crate::spinalg::Spin;

use super::AnalysisError;

/// Mean of per-serial sign products. Symmetric and exactly inside [-1, 1].
pub fn correlation(a: &[Spin], b: &[Spin]) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(AnalysisError::LengthMismatch { left: 0, right: 0 });
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| x.sign() * y.sign()).sum();
    Ok(sum / a.len() as f64)
}

/// Correlation of two serial-keyed lists, pairing by serial. Serials must
/// agree exactly.
pub fn correlation_by_serial(a: &[(u64, Spin)], b: &[(u64, Spin)]) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut sum = 0.0;
    for ((sa, xa), (sb, xb)) in a.iter().zip(b) {
        if sa != sb {
            return Err(AnalysisError::SerialMismatch { serial: *sa });
        }
        sum += xa.sign() * xb.sign();
    }
    if a.is_empty() {
        return Err(AnalysisError::LengthMismatch { left: 0, right: 0 });
    }
    Ok(sum / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_lists_give_one() {
        let xs = vec![Spin::Up, Spin::Down, Spin::Up];
        assert_eq!(correlation(&xs, &xs).unwrap(), 1.0);
    }

    #[test]
    fn opposite_lists_give_minus_one() {
        let xs = vec![Spin::Up, Spin::Down];
        let ys = vec![Spin::Down, Spin::Up];
        assert_eq!(correlation(&xs, &ys).unwrap(), -1.0);
    }

    #[test]
    fn bounded_and_symmetric() {
        let xs = vec![Spin::Up, Spin::Up, Spin::Down, Spin::Up];
        let ys = vec![Spin::Up, Spin::Down, Spin::Down, Spin::Down];
        let ab = correlation(&xs, &ys).unwrap();
        let ba = correlation(&ys, &xs).unwrap();
        assert_eq!(ab, ba);
        assert!((-1.0..=1.0).contains(&ab));
        assert_eq!(ab, 0.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let xs = vec![Spin::Up];
        let ys = vec![Spin::Up, Spin::Down];
        assert!(matches!(
            correlation(&xs, &ys),
            Err(AnalysisError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn serial_pairing_is_checked() {
        let a = vec![(1u64, Spin::Up), (2, Spin::Down)];
        let b = vec![(1u64, Spin::Up), (3, Spin::Down)];
        assert!(matches!(
            correlation_by_serial(&a, &b),
            Err(AnalysisError::SerialMismatch { serial: 2 })
        ));
        let b_ok = vec![(1u64, Spin::Up), (2, Spin::Up)];
        assert_eq!(correlation_by_serial(&a, &b_ok).unwrap(), 0.0);
    }
}
