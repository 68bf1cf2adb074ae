//! Simulator of weak and strong spin measurements on single particles and
//! EPR pairs, together with the record-keeping protocol and data analysis
//! built on top of them.
//!
//! The crate is organized in layers:
//!
//! * [`spinalg`] is exact complex linear algebra for 2-level spins and
//!   4-level pairs: states, coplanar spin operators, projectors, Born
//!   probabilities.
//! * [`measurement`] adds strong projective measurement with collapse and
//!   weak measurement through a Gaussian pointer model with state
//!   back-action.
//! * [`tsvf`] is the deterministic two-state-vector calculus: ABL
//!   probabilities, weak values, forward/backward evolution.
//! * [`protocol`] orchestrates complete experiments, writing weak readings
//!   to an append-only stone ledger and strong outcomes to coded lists.
//! * [`analysis`] slices ledgers by binary lines, decodes coded lists,
//!   estimates correlations and CHSH statistics, infers unknown
//!   orientations, and runs the exhaustive prediction attack.
//!
//! All randomness flows through [`rng::RandomStream`], a counter-derived
//! generator keyed by (master seed, serial, stage) so that runs are
//! reproducible regardless of execution order or thread count.

pub mod analysis;
pub mod measurement;
pub mod protocol;
pub mod rng;
pub mod spinalg;
pub mod tsvf;

pub use measurement::{PointerConfig, WeakReading};
pub use rng::RandomStream;
pub use spinalg::{Operator, Orientation, PureState, Side, Spin};
pub use tsvf::TwoStateVector;
