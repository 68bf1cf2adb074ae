//! Strong projective measurement with collapse, and weak measurement via a
//! Gaussian pointer model with state back-action.
//!
//! A weak measurement of an operator `A` with eigenvalues +-1 couples the
//! spin to a pointer that moves `g = lambda / N^exponent` units for up and
//! `-g` for down, on top of Gaussian noise with standard deviation `delta`.
//! The pointer degrees of freedom are never represented explicitly: for an
//! initial Gaussian pointer and an impulsive coupling, tracing the pointer
//! out is exactly equivalent to the measurement operator
//!
//! ```text
//! M(q) ~ exp(-(q - g A)^2 / (4 delta^2))
//! ```
//!
//! so a reading `q` is sampled from the two-Gaussian mixture
//! `p(q) = p_up N(q; +g, delta^2) + p_down N(q; -g, delta^2)` with Born
//! weights, and the post-measurement state is `M(q)|s>` renormalized. The
//! time profile of the coupling integrates to 1; only the net kick matters.

use crate::rng::RandomStream;
use crate::spinalg::{
    self, born_probability, eigenprojector, Operator, Orientation, PureState, Side, Spin, SpinError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("pointer coupling lambda must be nonnegative, got {0}")]
    BadLambda(f64),
    #[error("pointer noise delta must be positive, got {0}")]
    BadDelta(f64),
    #[error("ensemble size must be at least 1")]
    BadEnsembleSize,
    #[error("coupling exponent must be 0.5 or 1.0, got {0}")]
    BadExponent(f64),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// Weak-coupling parameters: pointer shift scale `lambda`, Gaussian noise
/// `delta`, ensemble size `N` and the exponent of the `1/N^e` weakening.
///
/// The effective coupling is `g = lambda / N^exponent`. The exponent
/// defaults to 0.5; 1.0 selects the stronger single-apparatus weakening.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerConfig {
    lambda: f64,
    delta: f64,
    ensemble_size: u64,
    coupling_exponent: f64,
}

impl PointerConfig {
    pub fn new(
        lambda: f64,
        delta: f64,
        ensemble_size: u64,
        coupling_exponent: f64,
    ) -> Result<Self, MeasureError> {
        // lambda = 0 is permitted: it is the useful "no coupling" limit.
        if lambda.is_nan() || lambda < 0.0 {
            return Err(MeasureError::BadLambda(lambda));
        }
        if delta.is_nan() || delta <= 0.0 {
            return Err(MeasureError::BadDelta(delta));
        }
        if ensemble_size < 1 {
            return Err(MeasureError::BadEnsembleSize);
        }
        if coupling_exponent != 0.5 && coupling_exponent != 1.0 {
            return Err(MeasureError::BadExponent(coupling_exponent));
        }
        Ok(Self {
            lambda,
            delta,
            ensemble_size,
            coupling_exponent,
        })
    }

    /// Convenience constructor with the default 1/sqrt(N) exponent.
    pub fn sqrt_n(lambda: f64, delta: f64, ensemble_size: u64) -> Result<Self, MeasureError> {
        Self::new(lambda, delta, ensemble_size, 0.5)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ensemble_size(&self) -> u64 {
        self.ensemble_size
    }

    pub fn coupling_exponent(&self) -> f64 {
        self.coupling_exponent
    }

    /// Effective per-measurement pointer shift `g = lambda / N^exponent`.
    pub fn coupling(&self) -> f64 {
        self.lambda / (self.ensemble_size as f64).powf(self.coupling_exponent)
    }

    /// Weakness regime flag: weak iff `delta >= 10 g`. Violations are
    /// reported by callers, never rejected.
    pub fn is_weak(&self) -> bool {
        self.delta >= 10.0 * self.coupling()
    }
}

/// One weak pointer reading, with its binarized up/down form.
///
/// A reading of exactly 0 binarizes to up; that event has measure zero and
/// the tie rule only exists to keep records deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakReading {
    pub value: f64,
    pub orientation: Orientation,
    pub row_index: u8,
    pub binarized: Spin,
}

impl WeakReading {
    pub fn record(value: f64, orientation: Orientation, row_index: u8) -> Self {
        let binarized = if value >= 0.0 { Spin::Up } else { Spin::Down };
        Self {
            value,
            orientation,
            row_index,
            binarized,
        }
    }
}

/// One strong outcome attributed to a particle serial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongOutcome {
    pub serial: u64,
    pub spin: Spin,
}

/// Strong projective measurement: samples the sign with Born probabilities
/// and collapses the state onto the outcome eigenspace.
pub fn strong_measure(
    state: &PureState,
    op: &Operator,
    rng: &mut RandomStream,
) -> Result<(Spin, PureState), MeasureError> {
    let p_up = born_probability(state, op, Spin::Up)?;
    // Sampling the branch with its own probability makes a zero-norm
    // projection unreachable: u < p_up fails whenever p_up = 0.
    let sign = if rng.bernoulli(p_up) {
        Spin::Up
    } else {
        Spin::Down
    };
    let proj = eigenprojector(op, sign)?;
    let collapsed = PureState::normalized(proj.apply_raw(state.amplitudes()))?;
    Ok((sign, collapsed))
}

/// Weak measurement of an operator with +-1 eigenvalues.
///
/// Returns the pointer reading `q` and the renormalized post-measurement
/// state `M(q)|s>`. In the `g/delta -> 0` limit the state is unchanged; in
/// the `delta/g -> 0` limit the statistics reproduce `strong_measure`.
pub fn weak_measure(
    state: &PureState,
    op: &Operator,
    cfg: &PointerConfig,
    rng: &mut RandomStream,
) -> Result<(f64, PureState), MeasureError> {
    let g = cfg.coupling();
    let delta = cfg.delta();
    let p_up = born_probability(state, op, Spin::Up)?;

    // Draw q from the Born-weighted two-Gaussian mixture. Branch sampling
    // followed by M(q) on the *unprojected* state reproduces the exact
    // joint law p(q) = ||M(q)|s>||^2 because the cross terms of the two
    // projector components vanish.
    let center = if rng.bernoulli(p_up) { g } else { -g };
    let q = rng.normal(center, delta);

    let post = apply_kraus(state, op, q, g, delta)?;
    Ok((q, post))
}

/// Weak measurement of one side of a pair: identical contract to
/// [`weak_measure`] with the operator lifted to the joint space, so the
/// back-action acts on the joint state.
pub fn weak_measure_pair(
    state: &PureState,
    op: &Operator,
    side: Side,
    cfg: &PointerConfig,
    rng: &mut RandomStream,
) -> Result<(f64, PureState), MeasureError> {
    let lifted = spinalg::embed(op, side)?;
    weak_measure(state, &lifted, cfg, rng)
}

/// Apply the Gaussian measurement operator for reading `q` and renormalize.
fn apply_kraus(
    state: &PureState,
    op: &Operator,
    q: f64,
    g: f64,
    delta: f64,
) -> Result<PureState, MeasureError> {
    let e_up = -((q - g) * (q - g)) / (4.0 * delta * delta);
    let e_down = -((q + g) * (q + g)) / (4.0 * delta * delta);
    // Weights relative to the larger exponent so extreme readings cannot
    // underflow both branches.
    let m = e_up.max(e_down);
    let w_up = (e_up - m).exp();
    let w_down = (e_down - m).exp();

    let p_up = eigenprojector(op, Spin::Up)?;
    let p_down = eigenprojector(op, Spin::Down)?;
    let up_part = p_up.apply_raw(state.amplitudes());
    let down_part = p_down.apply_raw(state.amplitudes());
    let mixed: Vec<_> = up_part
        .iter()
        .zip(&down_part)
        .map(|(u, d)| u * w_up + d * w_down)
        .collect();
    Ok(PureState::normalized(mixed)?)
}
