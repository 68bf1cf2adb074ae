//! Exact complex linear algebra for 2-level spins and 4-level pairs.
//!
//! The measurement plane is fixed as the z-x plane, so a coplanar spin
//! orientation is a single angle and its operator is
//! `cos(angle) * sigma_z + sin(angle) * sigma_x`. Eigenvectors carry a
//! canonical global phase (first nonzero amplitude real and positive) so
//! that records and tests are reproducible.

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance used by constructors when validating invariants.
const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("state dimension must be 2 or 4, got {0}")]
    BadDimension(usize),
    #[error("state norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),
    #[error("operator is not Hermitian within tolerance")]
    NotHermitian,
    #[error("operator does not have eigenvalues +1 and -1 (A^2 != I)")]
    NotInvolutory,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Measurement outcome or binarized reading: up is +1, down is -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Single-letter wire form used in ledger files.
    pub fn letter(self) -> char {
        match self {
            Spin::Up => 'U',
            Spin::Down => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Spin> {
        match c {
            'U' => Some(Spin::Up),
            'D' => Some(Spin::Down),
            _ => None,
        }
    }
}

/// Which particle of an EPR pair an operator or measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Coplanar spin direction: one angle in the z-x plane, canonicalized to
/// [0, 2*pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    radians: f64,
}

impl Orientation {
    pub fn from_radians(radians: f64) -> Self {
        let two_pi = std::f64::consts::TAU;
        let mut r = radians.rem_euclid(two_pi);
        // rem_euclid can return exactly two_pi after rounding.
        if r >= two_pi {
            r = 0.0;
        }
        Self { radians: r }
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Self::from_radians(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.radians
    }

    pub fn degrees(self) -> f64 {
        self.radians.to_degrees()
    }

    /// Signed relative angle `other - self` in radians.
    pub fn angle_to(self, other: Orientation) -> f64 {
        other.radians - self.radians
    }
}

/// Normalized complex amplitude vector for one spin (dim 2) or a pair (dim 4).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    /// Build from amplitudes, requiring unit norm within 1e-12.
    pub fn new(amps: Vec<C64>) -> Result<Self, SpinError> {
        if amps.len() != 2 && amps.len() != 4 {
            return Err(SpinError::BadDimension(amps.len()));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(SpinError::NotNormalized((norm_sq - 1.0).abs()));
        }
        Ok(Self { amps })
    }

    /// Build from unnormalized amplitudes by rescaling to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self, SpinError> {
        if amps.len() != 2 && amps.len() != 4 {
            return Err(SpinError::BadDimension(amps.len()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SpinError::NotNormalized(1.0));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Inner product `<self|other>` (conjugation on `self`).
    pub fn inner(&self, other: &PureState) -> Result<C64, SpinError> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Spin-up eigenstate of the coplanar operator at `o`:
    /// `(cos(angle/2), sin(angle/2))`.
    pub fn up_along(o: Orientation) -> PureState {
        let half = o.radians() / 2.0;
        PureState::new(vec![C64::new(half.cos(), 0.0), C64::new(half.sin(), 0.0)])
            .expect("trigonometric state is normalized")
    }
}

/// Complex 2x2 or 4x4 Hermitian matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    /// Build from row-major entries, requiring hermiticity within 1e-12.
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self, SpinError> {
        if dim != 2 && dim != 4 {
            return Err(SpinError::BadDimension(dim));
        }
        if entries.len() != dim * dim {
            return Err(SpinError::BadDimension(entries.len()));
        }
        let op = Self { dim, entries };
        if !op.is_hermitian(HERMITIAN_TOL) {
            return Err(SpinError::NotHermitian);
        }
        Ok(op)
    }

    pub fn identity(dim: usize) -> Operator {
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        Operator { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = self.at(i, j) - self.at(j, i).conj();
                if d.norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// True when A^2 = I within `tol`, i.e. the eigenvalues are +1 and -1
    /// (possibly degenerate) or the operator is the identity.
    pub fn is_involutory(&self, tol: f64) -> bool {
        let sq = self.matmul(self);
        let id = Operator::identity(self.dim);
        sq.entries
            .iter()
            .zip(&id.entries)
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Operator {
            dim: d,
            entries: out,
        }
    }

    pub fn scaled(&self, factor: f64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim);
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply_raw(&self, amps: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, amps.len());
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(amps).map(|(m, a)| m * a).sum())
            .collect()
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), SpinError> {
    if left != right {
        Err(SpinError::DimensionMismatch { left, right })
    } else {
        Ok(())
    }
}

pub fn sigma_z() -> Operator {
    Operator::from_entries(
        2,
        vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    )
    .expect("sigma_z is Hermitian")
}

pub fn sigma_x() -> Operator {
    Operator::from_entries(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("sigma_x is Hermitian")
}

pub fn sigma_y() -> Operator {
    Operator::from_entries(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("sigma_y is Hermitian")
}

/// Spin operator along a coplanar orientation:
/// `cos(angle) * sigma_z + sin(angle) * sigma_x`.
///
/// Hermitian, traceless, eigenvalues exactly +1 and -1.
pub fn spin_operator(o: Orientation) -> Operator {
    let (s, c) = o.radians().sin_cos();
    Operator::from_entries(
        2,
        vec![
            C64::new(c, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(-c, 0.0),
        ],
    )
    .expect("spin operator is Hermitian")
}

/// Eigenprojector `(I + sign * A) / 2` of an operator with +-1 eigenvalues.
pub fn eigenprojector(op: &Operator, sign: Spin) -> Result<Operator, SpinError> {
    if !op.is_hermitian(HERMITIAN_TOL) {
        return Err(SpinError::NotHermitian);
    }
    if !op.is_involutory(1e-10) {
        return Err(SpinError::NotInvolutory);
    }
    Ok(Operator::identity(op.dim())
        .add(&op.scaled(sign.sign()))
        .scaled(0.5))
}

/// Normalized eigenvector of a 2x2 spin operator with the requested
/// eigenvalue. The global phase is fixed by making the first nonzero
/// amplitude real and positive.
pub fn eigenpair(op: &Operator, sign: Spin) -> Result<PureState, SpinError> {
    if op.dim() != 2 {
        return Err(SpinError::BadDimension(op.dim()));
    }
    let proj = eigenprojector(op, sign)?;
    // Any nonzero column of the rank-1 projector is the eigenvector.
    let col0 = [proj.at(0, 0), proj.at(1, 0)];
    let col1 = [proj.at(0, 1), proj.at(1, 1)];
    let n0 = col0[0].norm_sqr() + col0[1].norm_sqr();
    let n1 = col1[0].norm_sqr() + col1[1].norm_sqr();
    let col = if n0 >= n1 { col0 } else { col1 };
    canonical_phase(PureState::normalized(col.to_vec())?)
}

/// Fix the global phase so the first amplitude above 1e-9 is real positive.
fn canonical_phase(state: PureState) -> Result<PureState, SpinError> {
    let lead = state
        .amps
        .iter()
        .find(|a| a.norm() > 1e-9)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = lead / lead.norm();
    PureState::new(state.amps.iter().map(|a| a / phase).collect())
}

/// The EPR singlet `(|ud> - |du>) / sqrt(2)` in the product basis
/// `|left right>` ordered uu, ud, du, dd.
pub fn singlet_state() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(vec![
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(-s, 0.0),
        C64::new(0.0, 0.0),
    ])
    .expect("singlet is normalized")
}

/// Lift a 2x2 operator to the pair space: `op (x) I` for Left,
/// `I (x) op` for Right.
pub fn embed(op: &Operator, side: Side) -> Result<Operator, SpinError> {
    if op.dim() != 2 {
        return Err(SpinError::BadDimension(op.dim()));
    }
    if !op.is_hermitian(HERMITIAN_TOL) {
        return Err(SpinError::NotHermitian);
    }
    let mut entries = vec![C64::new(0.0, 0.0); 16];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let (row, col, value) = match side {
                        Side::Left => (2 * i + k, 2 * j + l, op.at(i, j) * kron_delta(k, l)),
                        Side::Right => (2 * k + i, 2 * l + j, op.at(i, j) * kron_delta(k, l)),
                    };
                    entries[row * 4 + col] += value;
                }
            }
        }
    }
    Operator::from_entries(4, entries)
}

#[inline]
fn kron_delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Born probability `|| P_sign |s> ||^2`. The two signs sum to 1.
pub fn born_probability(s: &PureState, op: &Operator, sign: Spin) -> Result<f64, SpinError> {
    check_dims(s.dim(), op.dim())?;
    let proj = eigenprojector(op, sign)?;
    let projected = proj.apply_raw(s.amplitudes());
    Ok(projected.iter().map(|a| a.norm_sqr()).sum())
}

/// Expectation value `<s| op |s>`, real for Hermitian operators.
pub fn expectation(s: &PureState, op: &Operator) -> Result<f64, SpinError> {
    check_dims(s.dim(), op.dim())?;
    let applied = op.apply_raw(s.amplitudes());
    let value: C64 = s
        .amplitudes()
        .iter()
        .zip(&applied)
        .map(|(a, b)| a.conj() * b)
        .sum();
    debug_assert!(value.im.abs() < 1e-10, "expectation has imaginary part");
    Ok(value.re)
}

/// Overlap probability `|<a|b>|^2`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64, SpinError> {
    Ok(a.inner(b)?.norm_sqr())
}
