//! Command-line front end: configure, run, analyze, attack.
//!
//! Every command is deterministic given its seed and flags, writes
//! artifacts atomically (temp file + rename), and finishes by writing a
//! manifest listing everything it emitted.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use weakepr::analysis::slicing::BinaryLine;
use weakepr::analysis::{
    mode_by_name, prediction_attack, slice, stats, AnalysisContext, AnalysisOptions, LoadedRun,
    ReportTable,
};
use weakepr::protocol::{
    config::parse_flat_map, experiment_by_name, regenerate_key, CodedList, CodedValue,
    ExperimentConfig, ExperimentKind, ListRole, RecordSide, RunOutput, StoneLedger,
};
use weakepr::spinalg::Spin;

#[derive(Parser)]
#[command(
    name = "weakepr",
    version,
    about = "Seeded Monte Carlo runs of weak/strong spin-measurement protocols on single particles and EPR pairs, with slicing analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the single-particle experiment: morning strong measurement,
    /// nine weak rows, evening strong measurement.
    RunSingle(RunSingleArgs),
    /// Run the EPR experiment: nine weak rows per side of each singlet
    /// pair, then one strong measurement per side.
    RunEpr(RunEprArgs),
    /// Analyze recorded runs: decode, correlate, infer or chsh.
    Analyze(AnalyzeArgs),
    /// Exhaustively enumerate balanced slicings of one ledger row.
    Attack(AttackArgs),
}

#[derive(Args)]
struct CommonRunArgs {
    /// Flat key = value config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ensemble size (even, at least 2).
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    alpha_deg: Option<f64>,
    #[arg(long)]
    beta_deg: Option<f64>,
    #[arg(long)]
    gamma_deg: Option<f64>,
    /// Pointer shift scale; the coupling is lambda / n^exponent.
    #[arg(long)]
    lambda: Option<f64>,
    /// Pointer Gaussian noise standard deviation.
    #[arg(long)]
    delta: Option<f64>,
    /// 0.5 for the ensemble weakening, 1.0 for the single-apparatus one.
    #[arg(long)]
    coupling_exponent: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for ledger, coded lists and manifest.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunSingleArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    #[arg(long)]
    bob_morning_deg: Option<f64>,
    #[arg(long, conflicts_with = "bob_evening_free")]
    bob_evening_deg: Option<f64>,
    /// Draw the evening orientation from a seeded free-choice stream.
    #[arg(long)]
    bob_evening_free: bool,
}

#[derive(Args)]
struct RunEprArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    #[arg(long, conflicts_with = "bob_free")]
    bob_right_deg: Option<f64>,
    #[arg(long, conflicts_with = "bob_free")]
    bob_left_deg: Option<f64>,
    /// Draw both evening orientations from seeded free-choice streams.
    #[arg(long)]
    bob_free: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Analysis mode: decode, correlate, infer or chsh.
    #[arg(long)]
    mode: String,
    /// Ledger CSV (its sibling manifest.txt supplies the configuration).
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Coded list CSVs; defaults to the ones the manifest names.
    #[arg(long)]
    coded: Vec<PathBuf>,
    /// Run manifests; chsh takes exactly four.
    #[arg(long)]
    manifest: Vec<PathBuf>,
    /// Ground-truth evening angle for scoring infer.
    #[arg(long)]
    true_deg: Option<f64>,
    /// Restrict inference to the last repetition of each orientation.
    #[arg(long)]
    last_cycle: bool,
    /// Directory for report files; defaults to the run directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    /// Ledger CSV (its sibling manifest.txt supplies the configuration).
    #[arg(long)]
    ledger: PathBuf,
    /// Explicit manifest path, when not next to the ledger.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Row to attack (defaults to the last row).
    #[arg(long)]
    row: Option<u8>,
    /// Ledger side to attack: S, R or L (defaults to the ledger's kind).
    #[arg(long)]
    side: Option<char>,
    /// Largest ensemble the exhaustive enumeration accepts.
    #[arg(long, default_value_t = 20)]
    n_cap: usize,
    /// Re-run this many seeded replicas and report the rank distribution.
    #[arg(long)]
    repetitions: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RunSingle(args) => cmd_run(build_single_config(args.apply()?)?, "run-single"),
        Command::RunEpr(args) => cmd_run(build_epr_config(args.apply()?)?, "run-epr"),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Attack(args) => cmd_attack(args),
    }
}

/// Flag values merged over an optional config file.
struct MergedRun {
    map: BTreeMap<String, String>,
    out: PathBuf,
}

impl RunSingleArgs {
    fn apply(self) -> Result<MergedRun> {
        let mut merged = merge_common(self.common)?;
        merged.set_f64("bob_morning_deg", self.bob_morning_deg);
        if self.bob_evening_free {
            merged.set("bob_evening", "free".to_string());
        }
        merged.set_f64("bob_evening", self.bob_evening_deg);
        merged.set("experiment", "single".to_string());
        Ok(merged)
    }
}

impl RunEprArgs {
    fn apply(self) -> Result<MergedRun> {
        let mut merged = merge_common(self.common)?;
        if self.bob_free {
            merged.set("bob_right", "free".to_string());
            merged.set("bob_left", "free".to_string());
        }
        merged.set_f64("bob_right", self.bob_right_deg);
        merged.set_f64("bob_left", self.bob_left_deg);
        merged.set("experiment", "epr".to_string());
        Ok(merged)
    }
}

impl MergedRun {
    fn set(&mut self, key: &str, value: String) {
        self.map.insert(key.to_string(), value);
    }

    fn set_f64(&mut self, key: &str, value: Option<f64>) {
        if let Some(v) = value {
            self.map.insert(key.to_string(), format!("{v}"));
        }
    }
}

fn merge_common(common: CommonRunArgs) -> Result<MergedRun> {
    let mut map = BTreeMap::new();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        map = parse_flat_map(&text)?;
    }
    let mut merged = MergedRun {
        map,
        out: common.out,
    };
    if let Some(n) = common.n {
        merged.set("n", n.to_string());
    }
    merged.set_f64("alpha_deg", common.alpha_deg);
    merged.set_f64("beta_deg", common.beta_deg);
    merged.set_f64("gamma_deg", common.gamma_deg);
    merged.set_f64("lambda", common.lambda);
    merged.set_f64("delta", common.delta);
    merged.set_f64("coupling_exponent", common.coupling_exponent);
    if let Some(seed) = common.seed {
        merged.set("seed", seed.to_string());
    }
    if let Some(threads) = common.threads {
        merged.set("threads", threads.to_string());
    }
    Ok(merged)
}

fn config_from_map(merged: &MergedRun) -> Result<ExperimentConfig> {
    let mut text = String::new();
    for (k, v) in &merged.map {
        text.push_str(&format!("{k} = {v}\n"));
    }
    Ok(ExperimentConfig::from_flat_text(&text)?)
}

fn build_single_config(merged: MergedRun) -> Result<(ExperimentConfig, PathBuf)> {
    let cfg = config_from_map(&merged)?;
    if cfg.kind != ExperimentKind::SingleParticle {
        bail!("run-single needs experiment = single");
    }
    Ok((cfg, merged.out))
}

fn build_epr_config(merged: MergedRun) -> Result<(ExperimentConfig, PathBuf)> {
    let cfg = config_from_map(&merged)?;
    if cfg.kind != ExperimentKind::EprPair {
        bail!("run-epr needs experiment = epr");
    }
    Ok((cfg, merged.out))
}

fn coded_file_name(role: ListRole) -> &'static str {
    match role {
        ListRole::Morning => "coded_morning.csv",
        ListRole::Evening => "coded_evening.csv",
        ListRole::EveningRight => "coded_right.csv",
        ListRole::EveningLeft => "coded_left.csv",
    }
}

fn cmd_run((cfg, out_dir): (ExperimentConfig, PathBuf), command: &str) -> Result<()> {
    let started = Instant::now();
    let warnings = cfg.validate()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let experiment = experiment_by_name(cfg.kind.name())?;
    let ledger_path = out_dir.join("ledger.csv");
    // The ledger is engraved before any evening measurement happens: the
    // hook persists it mid-run.
    let output = experiment.run_with_hook(&cfg, &mut |ledger| {
        write_atomic(&ledger_path, &ledger.to_csv_string())
            .map_err(|e| weakepr::protocol::ProtocolError::Io(std::io::Error::other(e.to_string())))
    })?;

    let mut artifact_lines = vec!["ledger = ledger.csv".to_string()];
    for coded in &output.coded {
        let name = coded_file_name(coded.role);
        write_atomic(&out_dir.join(name), &coded.to_csv_string())?;
        artifact_lines.push(format!("coded_{} = {name}", coded.role.name()));
    }

    print_run_summary(&cfg, &output);

    // Manifest last: it is the commit marker for the whole run.
    let mut manifest = String::new();
    manifest.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    manifest.push_str(&format!("command = {command}\n"));
    manifest.push_str(&cfg.to_flat_text());
    if let Some(d) = output.resolved.morning_deg {
        manifest.push_str(&format!("resolved_morning_deg = {d}\n"));
    }
    if let Some(d) = output.resolved.evening_deg {
        manifest.push_str(&format!("resolved_evening_deg = {d}\n"));
    }
    if let Some(d) = output.resolved.right_deg {
        manifest.push_str(&format!("resolved_right_deg = {d}\n"));
    }
    if let Some(d) = output.resolved.left_deg {
        manifest.push_str(&format!("resolved_left_deg = {d}\n"));
    }
    for line in &artifact_lines {
        manifest.push_str(line);
        manifest.push('\n');
    }
    manifest.push_str(&format!(
        "duration_ms = {}\n",
        started.elapsed().as_millis()
    ));
    write_atomic(&out_dir.join("manifest.txt"), &manifest)?;
    println!("run complete: artifacts in {}", out_dir.display());
    Ok(())
}

/// The nine-row sliced-sum summary table against both strong lines, plus
/// the strong-list correlation.
fn print_run_summary(cfg: &ExperimentConfig, output: &RunOutput) {
    let g = match cfg.pointer() {
        Ok(p) => p.coupling(),
        Err(_) => return,
    };
    for list in &output.strong {
        let line = BinaryLine::from_pairs(list.outcomes.iter().map(|o| {
            (
                o.serial,
                match o.spin {
                    Spin::Up => CodedValue::Above,
                    Spin::Down => CodedValue::Below,
                },
            )
        }));
        let side = list.role.ledger_side();
        println!(
            "sliced sums against the {} line ({} deg):",
            list.role.name(),
            list.orientation_deg
        );
        println!("  row orient_deg   sum_above   sum_below   z_above  z_below   corr");
        for row in output.ledger.rows_for_side(side) {
            let readings = output.ledger.row_readings(side, row);
            let Ok((above, below)) = slice(&readings, &line, cfg.delta) else {
                continue;
            };
            let corr = (above.mean - below.mean) / (2.0 * g);
            println!(
                "  {row:>3} {:>10} {:>11.3} {:>11.3} {:>9.2} {:>8.2} {:>6.3}",
                output
                    .ledger
                    .row_orientation_deg(side, row)
                    .unwrap_or(f64::NAN),
                above.sum,
                below.sum,
                above.z_score,
                below.z_score,
                corr
            );
        }
    }
    if output.strong.len() == 2
        && output.strong[0].outcomes.len() == output.strong[1].outcomes.len()
    {
        let products: Vec<f64> = output.strong[0]
            .outcomes
            .iter()
            .zip(&output.strong[1].outcomes)
            .map(|(a, b)| a.spin.sign() * b.spin.sign())
            .collect();
        println!(
            "strong-outcome correlation ({} vs {}): {:+.4}",
            output.strong[0].role.name(),
            output.strong[1].role.name(),
            stats::mean(&products)
        );
    }
}

/// A manifest plus the files it names.
struct ManifestData {
    dir: PathBuf,
    config: ExperimentConfig,
    ledger_path: PathBuf,
    coded_paths: Vec<(ListRole, PathBuf)>,
}

fn read_manifest(path: &Path) -> Result<ManifestData> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    let map = parse_flat_map(&text)?;
    let dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let config = ExperimentConfig::from_flat_text(&text)?;
    let ledger_path = dir.join(
        map.get("ledger")
            .ok_or_else(|| anyhow!("manifest lists no ledger"))?,
    );
    let mut coded_paths = Vec::new();
    for (role, key) in [
        (ListRole::Morning, "coded_morning"),
        (ListRole::Evening, "coded_evening"),
        (ListRole::EveningRight, "coded_right"),
        (ListRole::EveningLeft, "coded_left"),
    ] {
        if let Some(name) = map.get(key) {
            coded_paths.push((role, dir.join(name)));
        }
    }
    Ok(ManifestData {
        dir,
        config,
        ledger_path,
        coded_paths,
    })
}

fn load_ledger(path: &Path) -> Result<StoneLedger> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    StoneLedger::read_csv(BufReader::new(file))
        .with_context(|| format!("parsing ledger {}", path.display()))
}

fn load_coded(role: ListRole, path: &Path) -> Result<CodedList> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    CodedList::read_csv(role, BufReader::new(file))
        .with_context(|| format!("parsing coded list {}", path.display()))
}

fn role_from_path(path: &Path) -> ListRole {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    if name.contains("morning") {
        ListRole::Morning
    } else if name.contains("right") {
        ListRole::EveningRight
    } else if name.contains("left") {
        ListRole::EveningLeft
    } else {
        ListRole::Evening
    }
}

fn load_run(manifest: &ManifestData, coded_override: &[PathBuf]) -> Result<LoadedRun> {
    let ledger = load_ledger(&manifest.ledger_path)?;
    let mut coded = Vec::new();
    if coded_override.is_empty() {
        for (role, path) in &manifest.coded_paths {
            coded.push(load_coded(*role, path)?);
        }
    } else {
        for path in coded_override {
            coded.push(load_coded(role_from_path(path), path)?);
        }
    }
    // The sealed key is derived from the run seed, so analyses that unseal
    // after registering a guess can score themselves.
    let key = regenerate_key(&manifest.config);
    for list in &mut coded {
        list.reseal(key.clone());
    }
    Ok(LoadedRun {
        config: manifest.config.clone(),
        ledger,
        coded,
    })
}

fn manifest_next_to(ledger: &Path) -> PathBuf {
    ledger
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join("manifest.txt")
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let mode = mode_by_name(&args.mode)?;

    let manifests: Vec<PathBuf> = if !args.manifest.is_empty() {
        args.manifest.clone()
    } else if let Some(ledger) = &args.ledger {
        vec![manifest_next_to(ledger)]
    } else {
        bail!("analyze needs --ledger or --manifest");
    };

    let mut runs = Vec::new();
    let mut first_dir = PathBuf::from(".");
    for (i, m) in manifests.iter().enumerate() {
        let data = read_manifest(m)?;
        if i == 0 {
            first_dir = data.dir.clone();
        }
        runs.push(load_run(&data, &args.coded)?);
    }
    let out_dir = args.out.clone().unwrap_or(first_dir);
    fs::create_dir_all(&out_dir)?;

    let ctx = AnalysisContext {
        runs,
        options: AnalysisOptions {
            true_angle_deg: args.true_deg,
            last_cycle_only: args.last_cycle,
        },
    };
    let report = mode.run(&ctx)?;

    for line in &report.summary {
        println!("{line}");
    }
    let mut summary_text = report.summary.join("\n");
    summary_text.push('\n');
    write_atomic(
        &out_dir.join(format!("summary_{}.txt", mode.name())),
        &summary_text,
    )?;
    for table in &report.tables {
        let name = if report.tables.len() == 1 {
            format!("report_{}.csv", mode.name())
        } else {
            format!("report_{}_{}.csv", mode.name(), table.name)
        };
        write_atomic(&out_dir.join(name), &table.to_csv_string())?;
    }

    // Decoding unseals the key after registering its guess; the revealed
    // key is written only now.
    if mode.name() == "decode" {
        let key = regenerate_key(&ctx.runs[0].config);
        write_atomic(&out_dir.join("key.txt"), &key.to_flat_text())?;
    }
    Ok(())
}

fn cmd_attack(args: AttackArgs) -> Result<()> {
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| manifest_next_to(&args.ledger));
    let data = read_manifest(&manifest_path)?;
    let run = load_run(&data, &[])?;
    let out_dir = args.out.clone().unwrap_or_else(|| data.dir.clone());
    fs::create_dir_all(&out_dir)?;

    let side = match args.side {
        Some(c) => RecordSide::from_letter(c).ok_or_else(|| anyhow!("bad side '{c}'"))?,
        None => match run.config.kind {
            ExperimentKind::SingleParticle => RecordSide::Single,
            ExperimentKind::EprPair => RecordSide::Right,
        },
    };
    let rows = run.ledger.rows_for_side(side);
    let row = args
        .row
        .or_else(|| rows.last().copied())
        .ok_or_else(|| anyhow!("ledger has no rows on side {}", side.letter()))?;

    // The line whose induced slicing gets ranked: the evening list of the
    // attacked side, when present.
    let line_role = match side {
        RecordSide::Single => ListRole::Evening,
        RecordSide::Right => ListRole::EveningRight,
        RecordSide::Left => ListRole::EveningLeft,
    };
    let line = run
        .coded
        .iter()
        .find(|c| c.role == line_role)
        .map(BinaryLine::from_coded);

    let readings = run.ledger.row_readings(side, row);
    let report = prediction_attack(&readings, line.as_ref(), run.config.delta, args.n_cap)?;

    println!(
        "attack: side {} row {row}: {} balanced slicings (C({}, {}))",
        side.letter(),
        report.total_slicings,
        report.n,
        report.n / 2
    );
    println!(
        "attack: max deviation {:.3}, {} slicings within one delta-shift of the top",
        report.max_deviation, report.ties_at_top
    );
    if let (Some(d), Some(rank)) = (report.true_deviation, report.true_rank) {
        println!(
            "attack: true line deviation {d:.3}, rank {rank} of {}",
            report.total_slicings
        );
    }

    let table = ReportTable {
        name: "slicings".into(),
        columns: vec!["mask_hex".into(), "deviation".into()],
        rows: report
            .deviations
            .iter()
            .map(|(mask, d)| vec![format!("{mask:04x}"), format!("{d:.6}")])
            .collect(),
    };
    write_atomic(&out_dir.join("report_attack.csv"), &table.to_csv_string())?;

    if let Some(reps) = args.repetitions {
        let ranks = attack_repetitions(&run.config, side, row, args.n_cap, reps)?;
        let normalized: Vec<f64> = ranks
            .iter()
            .map(|(rank, total)| *rank as f64 / (*total + 1) as f64)
            .collect();
        let ks = stats::ks_uniform(&normalized);
        let top_rate =
            ranks.iter().filter(|(rank, _)| *rank == 1).count() as f64 / ranks.len() as f64;
        println!(
            "attack: {reps} repetitions: rank-uniformity KS p = {:.4}, rank-1 rate {:.3}",
            ks.p_value, top_rate
        );
        let table = ReportTable {
            name: "ranks".into(),
            columns: vec!["repetition".into(), "rank".into(), "total".into()],
            rows: ranks
                .iter()
                .enumerate()
                .map(|(i, (rank, total))| vec![i.to_string(), rank.to_string(), total.to_string()])
                .collect(),
        };
        write_atomic(
            &out_dir.join("report_attack_ranks.csv"),
            &table.to_csv_string(),
        )?;
    }
    Ok(())
}

/// Re-run seeded replicas of the manifest's configuration and rank the
/// true evening slicing in each. Replicas are conditioned on balanced
/// evening outcomes, the idealization the exhaustive counting argument
/// assumes (each line must split the row into two N/2 halves).
fn attack_repetitions(
    base: &ExperimentConfig,
    side: RecordSide,
    row: u8,
    cap: usize,
    reps: u64,
) -> Result<Vec<(u64, u64)>> {
    let mut out = Vec::with_capacity(reps as usize);
    for rep in 0..reps {
        let mut k = 0u64;
        let (run_out, cfg) = loop {
            let mut cfg = base.clone();
            cfg.seed = base
                .seed
                .wrapping_add(1 + rep)
                .wrapping_add(k.wrapping_mul(0x9E37_79B9));
            let run_out = match cfg.kind {
                ExperimentKind::SingleParticle => weakepr::protocol::run_single_particle(&cfg)?,
                ExperimentKind::EprPair => weakepr::protocol::run_epr(&cfg)?,
            };
            let which = run_out
                .strong
                .iter()
                .position(|l| l.role.ledger_side() == side)
                .ok_or_else(|| anyhow!("no strong list for side {}", side.letter()))?;
            let ups = run_out.strong[which]
                .outcomes
                .iter()
                .filter(|o| o.spin == Spin::Up)
                .count() as u64;
            if ups == cfg.n_particles / 2 {
                break (run_out, cfg);
            }
            k += 1;
        };
        let which = run_out
            .strong
            .iter()
            .position(|l| l.role.ledger_side() == side)
            .expect("checked above");
        let line = BinaryLine::from_pairs(run_out.strong[which].outcomes.iter().map(|o| {
            (
                o.serial,
                match o.spin {
                    Spin::Up => CodedValue::Above,
                    Spin::Down => CodedValue::Below,
                },
            )
        }));
        let readings = run_out.ledger.row_readings(side, row);
        let report = prediction_attack(&readings, Some(&line), cfg.delta, cap)?;
        out.push((report.true_rank.unwrap(), report.total_slicings));
    }
    Ok(out)
}

/// Write through a temp file and rename, so readers never see a partial
/// artifact.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
