//! The data-analysis layer: slicing, decoding, correlation and CHSH
//! estimation, orientation inference, and the exhaustive prediction attack.
//!
//! The user-facing analyses are interchangeable strategies behind the
//! [`AnalysisMode`] trait, registered by name and selected at runtime (the
//! CLI's `--mode` flag). Each mode consumes loaded runs through an
//! [`AnalysisContext`] and produces a uniform [`AnalysisReport`] of summary
//! lines and tables.

pub mod attack;
pub mod chsh;
pub mod correlate;
pub mod decode;
pub mod infer;
pub mod slicing;
pub mod stats;

use crate::protocol::{CodedList, ExperimentConfig, ListRole, ProtocolError, StoneLedger};
use thiserror::Error;

pub use attack::{binomial, prediction_attack, AttackReport};
pub use chsh::{chsh, ChshOutcome, ChshRun};
pub use correlate::{correlation, correlation_by_serial};
pub use decode::{decode, DecodeOutcome};
pub use infer::{axis_distance_deg, infer_orientation, InferOutcome, RowSelection};
pub use slicing::{slice, sliced_correlation, BinaryLine, SliceStats};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("serial {serial} is not covered by the line or its counterpart")]
    SerialMismatch { serial: u64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("row of {n} readings exceeds the exhaustive-enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("{0}")]
    BadInput(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// One run loaded for analysis: its configuration, ledger and coded lists.
#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub config: ExperimentConfig,
    pub ledger: StoneLedger,
    pub coded: Vec<CodedList>,
}

impl LoadedRun {
    pub fn protocol_deg(&self) -> [f64; 3] {
        [
            self.config.alpha_deg,
            self.config.beta_deg,
            self.config.gamma_deg,
        ]
    }

    pub fn coded_with_role(&self, role: ListRole) -> Option<&CodedList> {
        self.coded.iter().find(|c| c.role == role)
    }
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    /// Ground-truth angle for scoring orientation inference.
    pub true_angle_deg: Option<f64>,
    /// Row selection for orientation inference.
    pub last_cycle_only: bool,
}

/// Input to every analysis mode. Single-run modes use `runs[0]`; the CHSH
/// mode needs four runs.
#[derive(Debug, Clone)]
pub struct AnalysisContext {
    pub runs: Vec<LoadedRun>,
    pub options: AnalysisOptions,
}

#[derive(Debug, Clone)]
pub struct ReportTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ReportTable {
    pub fn to_csv_string(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisReport {
    pub summary: Vec<String>,
    pub tables: Vec<ReportTable>,
}

/// An analysis strategy registered by name.
pub trait AnalysisMode: Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(&self, ctx: &AnalysisContext) -> Result<AnalysisReport, AnalysisError>;
}

struct DecodeMode;
struct CorrelateMode;
struct InferMode;
struct ChshMode;

static MODES: [&dyn AnalysisMode; 4] = [&DecodeMode, &CorrelateMode, &InferMode, &ChshMode];

/// All registered analysis modes.
pub fn analysis_modes() -> &'static [&'static dyn AnalysisMode] {
    &MODES
}

/// Look a mode up by its registered name.
pub fn mode_by_name(name: &str) -> Result<&'static dyn AnalysisMode, AnalysisError> {
    MODES
        .iter()
        .find(|m| m.name() == name)
        .copied()
        .ok_or_else(|| {
            AnalysisError::BadInput(format!(
                "no analysis mode named '{name}' (known: {})",
                MODES
                    .iter()
                    .map(|m| m.name())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })
}

fn single_run(ctx: &AnalysisContext) -> Result<&LoadedRun, AnalysisError> {
    ctx.runs
        .first()
        .ok_or_else(|| AnalysisError::BadInput("this mode needs one loaded run".into()))
}

impl AnalysisMode for DecodeMode {
    fn name(&self) -> &'static str {
        "decode"
    }

    fn describe(&self) -> &'static str {
        "recover the coded lists' orientation permutation and sign from sliced rows"
    }

    fn run(&self, ctx: &AnalysisContext) -> Result<AnalysisReport, AnalysisError> {
        let run = single_run(ctx)?;
        let lists: Vec<&CodedList> = run.coded.iter().collect();
        let outcome = decode(&run.ledger, &lists, run.protocol_deg(), run.config.delta)?;

        let mut report = AnalysisReport::default();
        let mapping_text = outcome
            .mapping
            .symbol_to_deg
            .iter()
            .map(|(c, d)| format!("{c}={d}deg"))
            .collect::<Vec<_>>()
            .join(" ");
        report.summary.push(format!(
            "decoded mapping: {mapping_text} above={} (confidence {:.3})",
            if outcome.mapping.above_is_up {
                "up"
            } else {
                "down"
            },
            outcome.confidence
        ));

        // Register the guess, then unseal for scoring.
        let mut scored = run.coded.clone();
        let mut score_line = String::from("score: key not available (coded lists unsealed)");
        for list in &mut scored {
            list.register_guess(&outcome.mapping);
        }
        if let Some(first) = scored.first() {
            if let Ok(key) = first.unseal() {
                score_line = format!(
                    "score: {} (sign {})",
                    outcome.mapping.score(key),
                    if outcome.mapping.sign_matches(key) {
                        "correct"
                    } else {
                        "wrong"
                    }
                );
            }
        }
        report.summary.push(score_line);

        report.tables.push(ReportTable {
            name: "hypotheses".into(),
            columns: vec![
                "x_deg".into(),
                "y_deg".into(),
                "z_deg".into(),
                "above_is_up".into(),
                "statistic".into(),
            ],
            rows: outcome
                .hypotheses
                .iter()
                .map(|h| {
                    let mut row: Vec<String> = h
                        .symbol_to_deg
                        .iter()
                        .map(|(_, d)| format!("{d}"))
                        .collect();
                    row.push(h.above_is_up.to_string());
                    row.push(format!("{:.6}", h.statistic));
                    row
                })
                .collect(),
        });
        Ok(report)
    }
}

impl AnalysisMode for CorrelateMode {
    fn name(&self) -> &'static str {
        "correlate"
    }

    fn describe(&self) -> &'static str {
        "slice every weak row by every coded line and correlate the strong lists"
    }

    fn run(&self, ctx: &AnalysisContext) -> Result<AnalysisReport, AnalysisError> {
        let run = single_run(ctx)?;
        let pointer = run.config.pointer().map_err(AnalysisError::Protocol)?;
        let g = pointer.coupling();
        let mut report = AnalysisReport::default();

        let mut table = ReportTable {
            name: "sliced_rows".into(),
            columns: vec![
                "line".into(),
                "side".into(),
                "row".into(),
                "orientation_deg".into(),
                "z_above".into(),
                "z_below".into(),
                "sliced_correlation".into(),
            ],
            rows: Vec::new(),
        };
        for coded in &run.coded {
            let line = BinaryLine::from_coded(coded);
            let side = coded.role.ledger_side();
            for row in run.ledger.rows_for_side(side) {
                let readings = run.ledger.row_readings(side, row);
                let (above, below) = slice(&readings, &line, run.config.delta)?;
                let c = (above.mean - below.mean) / (2.0 * g);
                table.rows.push(vec![
                    coded.role.name().into(),
                    side.letter().to_string(),
                    row.to_string(),
                    format!(
                        "{}",
                        run.ledger.row_orientation_deg(side, row).unwrap_or(0.0)
                    ),
                    format!("{:.4}", above.z_score),
                    format!("{:.4}", below.z_score),
                    format!("{:.6}", c),
                ]);
            }
        }
        report.tables.push(table);

        // Correlation between the two strong lists, when both exist. The
        // shared sign convention cancels in the product.
        if run.coded.len() == 2 {
            let a = &run.coded[0];
            let b = &run.coded[1];
            if a.records().len() == b.records().len() {
                let products: Vec<f64> = a
                    .records()
                    .iter()
                    .zip(b.records())
                    .map(|(x, y)| {
                        let sign = |v| match v {
                            crate::protocol::CodedValue::Above => 1.0,
                            crate::protocol::CodedValue::Below => -1.0,
                        };
                        sign(x.value) * sign(y.value)
                    })
                    .collect();
                let corr = stats::mean(&products);
                report.summary.push(format!(
                    "strong-list correlation ({} vs {}): {:.4}",
                    a.role.name(),
                    b.role.name(),
                    corr
                ));
            }
        }
        Ok(report)
    }
}

impl AnalysisMode for InferMode {
    fn name(&self) -> &'static str {
        "infer"
    }

    fn describe(&self) -> &'static str {
        "estimate the evening line's hidden orientation from sliced correlations"
    }

    fn run(&self, ctx: &AnalysisContext) -> Result<AnalysisReport, AnalysisError> {
        let run = single_run(ctx)?;
        let pointer = run.config.pointer().map_err(AnalysisError::Protocol)?;
        // The evening list is the inference target; for EPR runs use the
        // right-hand list.
        let coded = run
            .coded_with_role(ListRole::Evening)
            .or_else(|| run.coded_with_role(ListRole::EveningRight))
            .ok_or_else(|| AnalysisError::BadInput("run has no evening coded list".into()))?;
        let line = BinaryLine::from_coded(coded);
        let side = coded.role.ledger_side();
        let selection = if ctx.options.last_cycle_only {
            RowSelection::LastCycle
        } else {
            RowSelection::All
        };
        let outcome = infer_orientation(
            &run.ledger,
            side,
            &line,
            run.protocol_deg(),
            &pointer,
            selection,
        )?;

        let mut report = AnalysisReport::default();
        report.summary.push(format!(
            "estimated orientation: {:.2} deg (axis modulo 180 deg){}",
            outcome.estimate_deg,
            if outcome.degenerate {
                " DEGENERATE: correlations consistent with zero"
            } else {
                ""
            }
        ));
        if let Some(true_deg) = ctx.options.true_angle_deg {
            report.summary.push(format!(
                "axis error vs true {:.2} deg: {:.3} deg",
                true_deg,
                axis_distance_deg(outcome.estimate_deg, true_deg)
            ));
        }
        report.tables.push(ReportTable {
            name: "correlations".into(),
            columns: vec!["orientation_deg".into(), "c".into(), "z".into()],
            rows: outcome
                .correlations
                .iter()
                .map(|(deg, c, z)| vec![format!("{deg}"), format!("{c:.6}"), format!("{z:.3}")])
                .collect(),
        });
        Ok(report)
    }
}

impl AnalysisMode for ChshMode {
    fn name(&self) -> &'static str {
        "chsh"
    }

    fn describe(&self) -> &'static str {
        "Bell statistic from four EPR runs at paired evening angles"
    }

    fn run(&self, ctx: &AnalysisContext) -> Result<AnalysisReport, AnalysisError> {
        if ctx.runs.len() != 4 {
            return Err(AnalysisError::BadInput(format!(
                "chsh needs 4 runs, got {}",
                ctx.runs.len()
            )));
        }
        let mut chsh_runs = Vec::with_capacity(4);
        for run in &ctx.runs {
            let right = run
                .coded_with_role(ListRole::EveningRight)
                .ok_or_else(|| AnalysisError::BadInput("run lacks a right coded list".into()))?;
            let left = run
                .coded_with_role(ListRole::EveningLeft)
                .ok_or_else(|| AnalysisError::BadInput("run lacks a left coded list".into()))?;
            let (right_deg, left_deg) =
                match (run.config.bob_evening_right, run.config.bob_evening_left) {
                    (
                        Some(crate::protocol::EveningChoice::FixedDeg(r)),
                        Some(crate::protocol::EveningChoice::FixedDeg(l)),
                    ) => (r, l),
                    _ => {
                        return Err(AnalysisError::BadInput(
                            "chsh needs fixed evening angles in each run config".into(),
                        ))
                    }
                };
            chsh_runs.push(ChshRun::from_coded(right_deg, left_deg, right, left)?);
        }
        let outcome = chsh(&chsh_runs)?;
        let mut report = AnalysisReport::default();
        report.summary.push(format!("CHSH S = {:.4}", outcome.s));
        report.tables.push(ReportTable {
            name: "correlations".into(),
            columns: vec!["right_deg".into(), "left_deg".into(), "E".into()],
            rows: outcome
                .correlations
                .iter()
                .map(|(a, b, e)| vec![format!("{a}"), format!("{b}"), format!("{e:.6}")])
                .collect(),
        });
        Ok(report)
    }
}
