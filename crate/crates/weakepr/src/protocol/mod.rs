//! Orchestration of the two experiments.
//!
//! A run proceeds in stages. Stage one simulates every serial's pre-set
//! measurements (the single-particle morning strong measurement and the
//! nine weak rows, or the eighteen weak rows of an EPR pair) and appends
//! each weak reading to the stone ledger. The ledger is then sealed: the
//! caller's hook may persist it before anything later happens. Only then
//! are the evening orientations resolved (fixed values, or free choices
//! drawn from a run-level stream that never reads ledger state) and the
//! evening strong measurements performed on the stored post-weak states.
//! Strong outcomes are finally published as coded lists under a sealed key.
//!
//! Every per-serial stage draws from its own derived random stream, so any
//! parallel schedule produces the same ledger as sequential execution and
//! single serials can be replayed in isolation.

pub mod coded;
pub mod config;
pub mod ledger;

use crate::measurement::{
    strong_measure, weak_measure, weak_measure_pair, MeasureError, StrongOutcome, WeakReading,
};
use crate::rng::RandomStream;
use crate::spinalg::{spin_operator, Orientation, PureState, Side, Spin};
use thiserror::Error;

pub use coded::{CodedList, CodedRecord, CodedValue, CodingKey, DecodedMapping, ListRole};
pub use config::{EveningChoice, ExperimentConfig, ExperimentKind};
pub use ledger::{LedgerEntry, RecordSide, StoneLedger};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("protocol order violation: {0}")]
    OrderViolation(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

// Stage codes for stream derivation.
const STAGE_MORNING: u64 = 1;
const STAGE_NOON: u64 = 2;
const STAGE_EVENING: u64 = 3;
const STAGE_FREE_EVENING: u64 = 10;
const STAGE_FREE_RIGHT: u64 = 11;
const STAGE_FREE_LEFT: u64 = 12;
const STAGE_KEY: u64 = 20;

/// Evening orientations after free choices have been drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ResolvedEvenings {
    pub morning_deg: Option<f64>,
    pub evening_deg: Option<f64>,
    pub right_deg: Option<f64>,
    pub left_deg: Option<f64>,
}

/// One strong list with its orientation, before coding.
#[derive(Debug, Clone)]
pub struct StrongList {
    pub role: ListRole,
    pub orientation_deg: f64,
    pub outcomes: Vec<StrongOutcome>,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub ledger: StoneLedger,
    pub coded: Vec<CodedList>,
    /// Uncoded strong lists, for the operator's own summaries.
    pub strong: Vec<StrongList>,
    pub resolved: ResolvedEvenings,
    pub warnings: Vec<String>,
}

/// A runnable experiment kind, registered by name.
pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run_with_hook(
        &self,
        cfg: &ExperimentConfig,
        on_ledger_sealed: &mut dyn FnMut(&StoneLedger) -> Result<(), ProtocolError>,
    ) -> Result<RunOutput, ProtocolError>;
}

struct SingleParticleExperiment;
struct EprExperiment;

static REGISTRY: [&dyn Experiment; 2] = [&SingleParticleExperiment, &EprExperiment];

/// All registered experiments.
pub fn experiments() -> &'static [&'static dyn Experiment] {
    &REGISTRY
}

/// Look an experiment up by its registered name.
pub fn experiment_by_name(name: &str) -> Result<&'static dyn Experiment, ProtocolError> {
    REGISTRY
        .iter()
        .find(|e| e.name() == name)
        .copied()
        .ok_or_else(|| {
            ProtocolError::Config(format!(
                "no experiment named '{name}' (known: {})",
                REGISTRY
                    .iter()
                    .map(|e| e.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })
}

/// Run the single-particle experiment without a ledger hook.
pub fn run_single_particle(cfg: &ExperimentConfig) -> Result<RunOutput, ProtocolError> {
    SingleParticleExperiment.run_with_hook(cfg, &mut |_| Ok(()))
}

/// Run the EPR experiment without a ledger hook.
pub fn run_epr(cfg: &ExperimentConfig) -> Result<RunOutput, ProtocolError> {
    EprExperiment.run_with_hook(cfg, &mut |_| Ok(()))
}

impl Experiment for SingleParticleExperiment {
    fn name(&self) -> &'static str {
        "single"
    }

    fn describe(&self) -> &'static str {
        "morning strong measurement, nine weak rows, evening strong measurement"
    }

    fn run_with_hook(
        &self,
        cfg: &ExperimentConfig,
        on_ledger_sealed: &mut dyn FnMut(&StoneLedger) -> Result<(), ProtocolError>,
    ) -> Result<RunOutput, ProtocolError> {
        if cfg.kind != ExperimentKind::SingleParticle {
            return Err(ProtocolError::Config(
                "config kind does not match the single-particle experiment".to_string(),
            ));
        }
        let warnings = cfg.validate()?;
        let morning_deg = cfg
            .bob_morning_deg
            .expect("validated single config has a morning angle");

        // Stage one: morning strong measurement plus the nine weak rows.
        let stage_one = parallel_map_serials(cfg.n_particles, cfg.threads, |serial| {
            simulate_single_stage_one(cfg, serial)
        })?;

        let mut ledger = StoneLedger::new(cfg.seed);
        let mut morning_outcomes = Vec::with_capacity(stage_one.len());
        let mut states = Vec::with_capacity(stage_one.len());
        for (outcome, entries, state) in stage_one {
            morning_outcomes.push(outcome);
            ledger.extend(entries);
            states.push(state);
        }
        // Engraved on stone: nothing past this point may change it.
        on_ledger_sealed(&ledger)?;

        // Bob's evening choice happens only after the ledger is sealed and
        // reads nothing but its own stream.
        let evening_deg = resolve_choice(
            cfg.bob_evening.expect("validated single config"),
            cfg.seed,
            STAGE_FREE_EVENING,
        );
        let evening_op = spin_operator(Orientation::from_degrees(evening_deg));

        let evening_outcomes = parallel_map_serials(cfg.n_particles, cfg.threads, |serial| {
            let state = &states[(serial - 1) as usize];
            let mut rng = RandomStream::derive(cfg.seed, serial, STAGE_EVENING);
            let (spin, _) = strong_measure(state, &evening_op, &mut rng)?;
            Ok(StrongOutcome { serial, spin })
        })?;

        let key = regenerate_key(cfg);
        let strong = vec![
            StrongList {
                role: ListRole::Morning,
                orientation_deg: morning_deg,
                outcomes: morning_outcomes,
            },
            StrongList {
                role: ListRole::Evening,
                orientation_deg: evening_deg,
                outcomes: evening_outcomes,
            },
        ];
        let coded = encode_lists(&strong, &key);

        Ok(RunOutput {
            ledger,
            coded,
            strong,
            resolved: ResolvedEvenings {
                morning_deg: Some(morning_deg),
                evening_deg: Some(evening_deg),
                ..Default::default()
            },
            warnings,
        })
    }
}

impl Experiment for EprExperiment {
    fn name(&self) -> &'static str {
        "epr"
    }

    fn describe(&self) -> &'static str {
        "nine weak rows per side of each singlet pair, then one strong measurement per side"
    }

    fn run_with_hook(
        &self,
        cfg: &ExperimentConfig,
        on_ledger_sealed: &mut dyn FnMut(&StoneLedger) -> Result<(), ProtocolError>,
    ) -> Result<RunOutput, ProtocolError> {
        if cfg.kind != ExperimentKind::EprPair {
            return Err(ProtocolError::Config(
                "config kind does not match the EPR experiment".to_string(),
            ));
        }
        let warnings = cfg.validate()?;

        let stage_one = parallel_map_serials(cfg.n_particles, cfg.threads, |serial| {
            simulate_epr_stage_one(cfg, serial)
        })?;

        let mut ledger = StoneLedger::new(cfg.seed);
        let mut states = Vec::with_capacity(stage_one.len());
        for (entries, state) in stage_one {
            ledger.extend(entries);
            states.push(state);
        }
        on_ledger_sealed(&ledger)?;

        let right_deg = resolve_choice(
            cfg.bob_evening_right.expect("validated EPR config"),
            cfg.seed,
            STAGE_FREE_RIGHT,
        );
        let left_deg = resolve_choice(
            cfg.bob_evening_left.expect("validated EPR config"),
            cfg.seed,
            STAGE_FREE_LEFT,
        );
        let right_op = spin_operator(Orientation::from_degrees(right_deg));
        let left_op = spin_operator(Orientation::from_degrees(left_deg));

        // Evening: right side first, then left, threading the collapse.
        let evening = parallel_map_serials(cfg.n_particles, cfg.threads, |serial| {
            let state = &states[(serial - 1) as usize];
            let mut rng = RandomStream::derive(cfg.seed, serial, STAGE_EVENING);
            let lifted_right =
                crate::spinalg::embed(&right_op, Side::Right).map_err(MeasureError::from)?;
            let (right_spin, after_right) = strong_measure(state, &lifted_right, &mut rng)?;
            let lifted_left =
                crate::spinalg::embed(&left_op, Side::Left).map_err(MeasureError::from)?;
            let (left_spin, _) = strong_measure(&after_right, &lifted_left, &mut rng)?;
            Ok((
                StrongOutcome {
                    serial,
                    spin: right_spin,
                },
                StrongOutcome {
                    serial,
                    spin: left_spin,
                },
            ))
        })?;

        let (right_outcomes, left_outcomes): (Vec<_>, Vec<_>) = evening.into_iter().unzip();

        let key = regenerate_key(cfg);
        let strong = vec![
            StrongList {
                role: ListRole::EveningRight,
                orientation_deg: right_deg,
                outcomes: right_outcomes,
            },
            StrongList {
                role: ListRole::EveningLeft,
                orientation_deg: left_deg,
                outcomes: left_outcomes,
            },
        ];
        let coded = encode_lists(&strong, &key);

        Ok(RunOutput {
            ledger,
            coded,
            strong,
            resolved: ResolvedEvenings {
                right_deg: Some(right_deg),
                left_deg: Some(left_deg),
                ..Default::default()
            },
            warnings,
        })
    }
}

/// Regenerate the sealed coding key of a run from its configuration.
pub fn regenerate_key(cfg: &ExperimentConfig) -> CodingKey {
    let mut key_rng = RandomStream::for_run(cfg.seed, STAGE_KEY);
    CodingKey::generate([cfg.alpha_deg, cfg.beta_deg, cfg.gamma_deg], &mut key_rng)
}

fn resolve_choice(choice: EveningChoice, seed: u64, stage: u64) -> f64 {
    match choice {
        EveningChoice::FixedDeg(d) => d,
        EveningChoice::Free => {
            let mut rng = RandomStream::for_run(seed, stage);
            rng.next_f64() * 360.0
        }
    }
}

fn encode_lists(strong: &[StrongList], key: &CodingKey) -> Vec<CodedList> {
    let mut used = Vec::new();
    strong
        .iter()
        .map(|list| {
            let symbol = key
                .symbol_for_deg(list.orientation_deg)
                .unwrap_or_else(|| CodingKey::spare_symbol(&used));
            used.push(symbol);
            CodedList::encode(list.role, symbol, &list.outcomes, key)
        })
        .collect()
}

/// Stage one of the single-particle experiment for one serial: the morning
/// strong measurement along Bob's morning orientation on an unpolarized
/// particle (a fair coin plus collapse onto the outcome eigenstate),
/// followed by the nine weak rows with back-action threading.
fn simulate_single_stage_one(
    cfg: &ExperimentConfig,
    serial: u64,
) -> Result<(StrongOutcome, Vec<LedgerEntry>, PureState), ProtocolError> {
    let morning_deg = cfg.bob_morning_deg.expect("validated config");
    let morning = Orientation::from_degrees(morning_deg);
    let pointer = cfg.pointer()?;

    let mut rng_morning = RandomStream::derive(cfg.seed, serial, STAGE_MORNING);
    let spin = if rng_morning.bernoulli(0.5) {
        Spin::Up
    } else {
        Spin::Down
    };
    let mut state = match spin {
        Spin::Up => PureState::up_along(morning),
        Spin::Down => crate::spinalg::eigenpair(&spin_operator(morning), Spin::Down)
            .map_err(MeasureError::from)?,
    };

    let mut rng_noon = RandomStream::derive(cfg.seed, serial, STAGE_NOON);
    let mut entries = Vec::with_capacity(9);
    for row in 1..=9u8 {
        let deg = cfg.row_orientation_deg(row);
        let orientation = Orientation::from_degrees(deg);
        let op = spin_operator(orientation);
        let (value, next) = weak_measure(&state, &op, &pointer, &mut rng_noon)?;
        let reading = WeakReading::record(value, orientation, row);
        entries.push(LedgerEntry {
            serial,
            side: RecordSide::Single,
            row,
            orientation_deg: deg,
            reading: reading.value,
            binarized: reading.binarized,
        });
        state = next;
    }
    Ok((StrongOutcome { serial, spin }, entries, state))
}

/// Stage one of the EPR experiment for one serial: a fresh singlet, nine
/// weak measurements on the right particle and then nine on the left, all
/// through the joint state.
fn simulate_epr_stage_one(
    cfg: &ExperimentConfig,
    serial: u64,
) -> Result<(Vec<LedgerEntry>, PureState), ProtocolError> {
    let pointer = cfg.pointer()?;
    let mut state = crate::spinalg::singlet_state();
    let mut rng_noon = RandomStream::derive(cfg.seed, serial, STAGE_NOON);
    let mut entries = Vec::with_capacity(18);
    for (side, record_side) in [
        (Side::Right, RecordSide::Right),
        (Side::Left, RecordSide::Left),
    ] {
        for row in 1..=9u8 {
            let deg = cfg.row_orientation_deg(row);
            let orientation = Orientation::from_degrees(deg);
            let op = spin_operator(orientation);
            let (value, next) = weak_measure_pair(&state, &op, side, &pointer, &mut rng_noon)?;
            let reading = WeakReading::record(value, orientation, row);
            entries.push(LedgerEntry {
                serial,
                side: record_side,
                row,
                orientation_deg: deg,
                reading: reading.value,
                binarized: reading.binarized,
            });
            state = next;
        }
    }
    Ok((entries, state))
}

/// Replay the stage-one ledger entries of a single serial from its derived
/// streams. The result is bit-identical to the corresponding rows of a full
/// run with the same configuration.
pub fn replay_serial(
    cfg: &ExperimentConfig,
    serial: u64,
) -> Result<Vec<LedgerEntry>, ProtocolError> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::SingleParticle => {
            simulate_single_stage_one(cfg, serial).map(|(_, entries, _)| entries)
        }
        ExperimentKind::EprPair => simulate_epr_stage_one(cfg, serial).map(|(entries, _)| entries),
    }
}

/// Order-preserving parallel map over serials 1..=n. The output only
/// depends on `f`, never on the schedule: slot i holds f(i + 1).
fn parallel_map_serials<T, F>(n: u64, threads: usize, f: F) -> Result<Vec<T>, ProtocolError>
where
    T: Send,
    F: Fn(u64) -> Result<T, ProtocolError> + Sync,
{
    let n_usize = n as usize;
    let workers = threads.clamp(1, n_usize.max(1));
    let mut slots: Vec<Option<Result<T, ProtocolError>>> = Vec::with_capacity(n_usize);
    slots.resize_with(n_usize, || None);

    if workers == 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            *slot = Some(f(i as u64 + 1));
        }
    } else {
        let chunk = n_usize.div_ceil(workers);
        std::thread::scope(|scope| {
            for (chunk_idx, chunk_slots) in slots.chunks_mut(chunk).enumerate() {
                let f = &f;
                scope.spawn(move || {
                    let base = chunk_idx * chunk;
                    for (i, slot) in chunk_slots.iter_mut().enumerate() {
                        *slot = Some(f((base + i) as u64 + 1));
                    }
                });
            }
        });
    }

    slots
        .into_iter()
        .map(|s| s.expect("every slot is filled"))
        .collect()
}


#[cfg(test)]
mod tests {
    use super::test_support::{sample_epr, sample_single};
    use super::*;
    use crate::analysis::stats;

    #[test]
    fn registry_finds_experiments_by_name() {
        assert_eq!(experiment_by_name("single").unwrap().name(), "single");
        assert_eq!(experiment_by_name("epr").unwrap().name(), "epr");
        assert!(experiment_by_name("nope").is_err());
    }

    #[test]
    fn single_run_has_nine_rows_per_serial() {
        let cfg = sample_single(100, 3);
        let out = run_single_particle(&cfg).unwrap();
        assert_eq!(out.ledger.len(), 9 * 100);
        for serial in 1..=100u64 {
            let count = out
                .ledger
                .entries()
                .iter()
                .filter(|e| e.serial == serial)
                .count();
            assert_eq!(count, 9);
        }
        assert_eq!(out.coded.len(), 2);
        assert_eq!(out.strong[0].outcomes.len(), 100);
    }

    #[test]
    fn epr_run_has_eighteen_rows_per_serial() {
        let cfg = sample_epr(50, 5);
        let out = run_epr(&cfg).unwrap();
        assert_eq!(out.ledger.len(), 18 * 50);
        for side in [RecordSide::Right, RecordSide::Left] {
            for serial in [1u64, 17, 50] {
                let count = out
                    .ledger
                    .entries()
                    .iter()
                    .filter(|e| e.serial == serial && e.side == side)
                    .count();
                assert_eq!(count, 9);
            }
        }
    }

    #[test]
    fn ledgers_are_identical_across_thread_counts() {
        for kind in ["single", "epr"] {
            let mut baseline = None;
            for threads in [1usize, 4, 8] {
                let mut cfg = if kind == "single" {
                    sample_single(64, 11)
                } else {
                    sample_epr(64, 11)
                };
                cfg.threads = threads;
                let out = experiment_by_name(kind)
                    .unwrap()
                    .run_with_hook(&cfg, &mut |_| Ok(()))
                    .unwrap();
                let bytes = out.ledger.to_csv_string();
                match &baseline {
                    None => baseline = Some(bytes),
                    Some(b) => assert_eq!(b, &bytes, "{kind} with {threads} threads diverged"),
                }
            }
        }
    }

    #[test]
    fn replay_reproduces_single_serials_exactly() {
        let cfg = sample_epr(40, 23);
        let out = run_epr(&cfg).unwrap();
        for serial in [1u64, 20, 40] {
            let replayed = replay_serial(&cfg, serial).unwrap();
            let from_run: Vec<LedgerEntry> = out
                .ledger
                .entries()
                .iter()
                .filter(|e| e.serial == serial)
                .cloned()
                .collect();
            assert_eq!(replayed, from_run);
        }
    }

    #[test]
    fn ledger_is_sealed_before_evening_outcomes_exist() {
        let cfg = sample_single(20, 3);
        let mut sealed_len = None;
        let out = SingleParticleExperiment
            .run_with_hook(&cfg, &mut |ledger| {
                sealed_len = Some(ledger.len());
                Ok(())
            })
            .unwrap();
        assert_eq!(sealed_len, Some(out.ledger.len()));
    }

    #[test]
    fn free_choice_is_reproducible_and_ledger_blind() {
        let mut cfg = sample_epr(10, 99);
        cfg.bob_evening_right = Some(EveningChoice::Free);
        cfg.bob_evening_left = Some(EveningChoice::Free);
        let a = run_epr(&cfg).unwrap();
        let b = run_epr(&cfg).unwrap();
        assert_eq!(a.resolved.right_deg, b.resolved.right_deg);
        assert_eq!(a.resolved.left_deg, b.resolved.left_deg);
        assert_ne!(a.resolved.right_deg, a.resolved.left_deg);

        // The choice stream does not depend on what the ledger contains:
        // changing lambda changes every reading but not the choice.
        let mut cfg2 = cfg.clone();
        cfg2.lambda = cfg.lambda * 3.0;
        let c = run_epr(&cfg2).unwrap();
        assert_eq!(a.resolved.right_deg, c.resolved.right_deg);
        assert_ne!(
            a.ledger.to_csv_string(),
            c.ledger.to_csv_string(),
            "readings should differ"
        );
    }

    #[test]
    fn strong_limit_first_alpha_row_repeats_morning() {
        // With delta/g = 0.01 the first weak row is effectively a repeated
        // strong measurement along the morning axis, so its binarized
        // readings equal the morning outcomes. Later alpha rows need not:
        // the intervening beta and gamma rows disturb the spin.
        let mut cfg = sample_single(40, 5);
        cfg.lambda = 100.0 * (cfg.n_particles as f64).sqrt();
        cfg.delta = 1.0;
        cfg.bob_evening = Some(EveningChoice::FixedDeg(cfg.alpha_deg));
        let out = run_single_particle(&cfg).unwrap();
        let morning = &out.strong[0].outcomes;
        let row1 = out.ledger.row_binarized(RecordSide::Single, 1);
        for (outcome, (serial, bin)) in morning.iter().zip(row1) {
            assert_eq!(outcome.serial, serial);
            assert_eq!(outcome.spin, bin);
        }
    }

    #[test]
    fn weak_rows_are_balanced_within_noise() {
        // Each full row sums to 0 within 3 delta sqrt(N): the 50/50
        // up-down distribution of an unpolarized ensemble.
        let cfg = sample_single(2_000, 31);
        let out = run_single_particle(&cfg).unwrap();
        let n = cfg.n_particles as f64;
        for row in 1..=9u8 {
            let sum: f64 = out
                .ledger
                .row_readings(RecordSide::Single, row)
                .iter()
                .map(|(_, q)| q)
                .sum();
            assert!(
                sum.abs() <= 3.0 * cfg.delta * n.sqrt(),
                "row {row} sum {sum}"
            );
        }
    }

    #[test]
    fn epr_evening_products_follow_minus_cosine() {
        let mut cfg = sample_epr(10_000, 41);
        cfg.bob_evening_right = Some(EveningChoice::FixedDeg(0.0));
        cfg.bob_evening_left = Some(EveningChoice::FixedDeg(45.0));
        let out = run_epr(&cfg).unwrap();
        let right = &out.strong[0].outcomes;
        let left = &out.strong[1].outcomes;
        let mean: f64 = right
            .iter()
            .zip(left)
            .map(|(r, l)| r.spin.sign() * l.spin.sign())
            .sum::<f64>()
            / right.len() as f64;
        let want = -45f64.to_radians().cos();
        assert!((mean - want).abs() < 0.03, "mean {mean} want {want}");
    }

    #[test]
    fn right_marginals_ignore_left_angle_choice() {
        // No-signaling at the marginal level across three left angles.
        let mut freqs = Vec::new();
        for left_deg in [0.0, 60.0, 110.0] {
            let mut cfg = sample_epr(4_000, 77);
            cfg.bob_evening_right = Some(EveningChoice::FixedDeg(30.0));
            cfg.bob_evening_left = Some(EveningChoice::FixedDeg(left_deg));
            let out = run_epr(&cfg).unwrap();
            let ups = out.strong[0]
                .outcomes
                .iter()
                .filter(|o| o.spin == Spin::Up)
                .count() as f64;
            freqs.push(ups / cfg.n_particles as f64);
        }
        let sigma = 0.5 / (4_000f64).sqrt();
        for f in &freqs {
            assert!((f - 0.5).abs() < 3.0 * sigma, "marginal {f}");
        }
    }

    #[test]
    fn coded_lists_share_serials_with_ledger() {
        let cfg = sample_epr(30, 1);
        let out = run_epr(&cfg).unwrap();
        for coded in &out.coded {
            let serials: Vec<u64> = coded.serials().collect();
            assert_eq!(serials, (1..=30u64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn mismatched_kind_is_rejected() {
        let cfg = sample_single(10, 1);
        assert!(run_epr(&cfg).is_err());
    }

    #[test]
    fn noon_readings_have_pointer_noise_statistics() {
        // Sanity: one row's readings have roughly delta spread.
        let cfg = sample_single(2_000, 13);
        let out = run_single_particle(&cfg).unwrap();
        let readings: Vec<f64> = out
            .ledger
            .row_readings(RecordSide::Single, 2)
            .iter()
            .map(|(_, q)| *q)
            .collect();
        let std = stats::sample_std(&readings);
        assert!((std - cfg.delta).abs() < 0.1 * cfg.delta, "std {std}");
    }
}
