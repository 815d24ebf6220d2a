//! Scenario-driven command line for the collision-model thermalization
//! toolkit: cone dumps, cooling-bound sweeps, protocol trajectories,
//! work/CoP series, and the protocol comparison table.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 verification failure
//! (a cooling bound violated or an emitted file failing its schema check),
//! 4 I/O failure. All outputs are deterministic in the given parameters and
//! seed, and files are written atomically (temp file + rename).

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use finitherm::cones::{mto_qutrit_inner_bound, qutrit_cone_subset_v, ConeRegion};
use finitherm::nogo::{sweep_theorem2, sweep_theorem3, NoGoVerdict};
use finitherm::protocols::{
    build_protocol_i_general, build_protocol_i_qutrit, build_protocol_ii_cooling_limit,
    build_protocol_ii_efficiency, cooling_limit, fixed_point, parity_limits, round_matrix,
    trajectory, RoundSpec,
};
use finitherm::spectra::{gibbs, BathSpec, HamiltonianSpec, PopulationVector};
use finitherm::thermo::{cumulative_cop, simulate_protocol};

const OUT_DIR_ENV: &str = "FINITHERM_OUT_DIR";

// ---------------------------------------------------------------------------
// Failure modes and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Verification(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Verification(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(msg) => write!(f, "invalid parameters: {msg}"),
            Failure::Verification(msg) => write!(f, "verification failure: {msg}"),
            Failure::Io(msg) => write!(f, "i/o failure: {msg}"),
        }
    }
}

fn invalid(err: impl fmt::Display) -> Failure {
    Failure::Invalid(first_line(&err.to_string()))
}

fn verification(err: impl fmt::Display) -> Failure {
    Failure::Verification(first_line(&err.to_string()))
}

fn first_line(text: &str) -> String {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("unknown error")
        .trim()
        .to_string()
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "finitherm",
    version,
    about = "Collision-model thermalization: cones, cooling bounds, and protocols"
)]
struct Cli {
    /// TOML file supplying defaults for any omitted flag (same key names).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reachable-region data for a qutrit state: collision-cone extreme
    /// points plus the hull of the two-level-reset search.
    Cone(ConeArgs),
    /// Sweep random instances of the cooling bound and report verdicts.
    Nogo(NogoArgs),
    /// Simulate a cooling protocol and emit its population trajectory.
    Protocol(ProtocolArgs),
    /// Per-round work, energy drain, and coefficient of performance.
    Cop(CopArgs),
    /// Comparison table of cooling limits and CoP across protocols.
    Report(ReportArgs),
}

#[derive(Args)]
struct BathArgs {
    /// Boltzmann ratio exp(-beta E) of the bath, in (0, 1).
    #[arg(long)]
    q: Option<f64>,
    /// Inverse temperature; alternative to --q.
    #[arg(long)]
    beta: Option<f64>,
    /// Level spacing of the reference ladder spectrum.
    #[arg(long = "E")]
    energy: Option<f64>,
}

#[derive(Args)]
struct ConeArgs {
    #[command(flatten)]
    bath: BathArgs,
    /// Initial qutrit state: subsetV-canonical, gibbs, or "p0,p1,p2".
    #[arg(long)]
    initial: Option<String>,
    /// Seed for the reset-sequence search.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum reset-sequence length explored by the search.
    #[arg(long)]
    budget: Option<usize>,
    /// Random reset sequences sampled by the search.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct NogoArgs {
    #[command(flatten)]
    bath: BathArgs,
    /// Sweep preset: default (200 + 54 instances) or quick (20 + 6).
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Dump the optimizing channel of the tightest instance to this path.
    #[arg(long = "witness-out")]
    witness_out: Option<PathBuf>,
}

#[derive(Args)]
struct ProtocolArgs {
    #[command(flatten)]
    bath: BathArgs,
    /// Protocol family: I (machine-free pump) or II (qubit machine).
    #[arg(long)]
    variant: Option<String>,
    /// System dimension (variant I).
    #[arg(long = "dS")]
    ds: Option<usize>,
    /// Molecule dimension (variant I).
    #[arg(long = "dr")]
    dr: Option<usize>,
    /// Variant II flavor: cooling (beta* = 4 beta) or efficiency.
    #[arg(long)]
    mode: Option<String>,
    /// Number of rounds to simulate.
    #[arg(long)]
    rounds: Option<usize>,
    /// Start state: gibbs, excited, or a comma-separated distribution.
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct CopArgs {
    #[command(flatten)]
    bath: BathArgs,
    /// Number of rounds to simulate.
    #[arg(long)]
    rounds: Option<usize>,
    /// Comma-separated protocol list, e.g. "I,II".
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    bath: BathArgs,
    /// Rounds simulated for the CoP trend classification (at least 10).
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Comma-separated series with a header row.
    Csv,
    /// Line-delimited key=value records.
    Records,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if err.use_stderr() {
                eprintln!("{}", first_line(&err.to_string()));
                return ExitCode::from(2);
            }
            // --help and --version land here
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
    };

    let config = match Config::load(cli.config.as_deref()) {
        Ok(config) => config,
        Err(failure) => {
            eprintln!("{failure}");
            return ExitCode::from(failure.code());
        }
    };

    let result = match cli.command {
        Command::Cone(args) => run_cone(args, &config),
        Command::Nogo(args) => run_nogo(args, &config),
        Command::Protocol(args) => run_protocol(args, &config),
        Command::Cop(args) => run_cop(args, &config),
        Command::Report(args) => run_report(args, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.code())
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration file
// ---------------------------------------------------------------------------

/// Flat key/value defaults mirroring the flag names.
struct Config(toml::Table);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self(toml::Table::new()));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("config {}: {e}", path.display())))?;
        let table = text.parse::<toml::Table>().map_err(|e| {
            Failure::Invalid(format!(
                "config {}: {}",
                path.display(),
                first_line(&e.to_string())
            ))
        })?;
        Ok(Self(table))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_float()
                .or_else(|| v.as_integer().map(|i| i as f64))
                .map(Some)
                .ok_or_else(|| Failure::Invalid(format!("config key '{key}' must be a number"))),
        }
    }

    fn unsigned(&self, key: &str) -> Result<Option<u64>, Failure> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_integer()
                .and_then(|i| u64::try_from(i).ok())
                .map(Some)
                .ok_or_else(|| {
                    Failure::Invalid(format!("config key '{key}' must be a non-negative integer"))
                }),
        }
    }

    fn size(&self, key: &str) -> Result<Option<usize>, Failure> {
        Ok(self.unsigned(key)?.map(|v| v as usize))
    }

    fn string(&self, key: &str) -> Result<Option<String>, Failure> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| Failure::Invalid(format!("config key '{key}' must be a string"))),
        }
    }

    fn path(&self, key: &str) -> Result<Option<PathBuf>, Failure> {
        Ok(self.string(key)?.map(PathBuf::from))
    }
}

/// Flag value when given, otherwise the config-file default.
fn or_config<T>(
    flag: Option<T>,
    fallback: Result<Option<T>, Failure>,
) -> Result<Option<T>, Failure> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => fallback,
    }
}

fn resolve_bath(args: &BathArgs, config: &Config) -> Result<BathSpec, Failure> {
    let q = or_config(args.q, config.f64("q"))?;
    let beta = or_config(args.beta, config.f64("beta"))?;
    let gap = or_config(args.energy, config.f64("E"))?.unwrap_or(1.0);
    match (q, beta) {
        (Some(_), Some(_)) => Err(Failure::Invalid(
            "give either --q or --beta, not both".into(),
        )),
        (Some(q), None) => BathSpec::from_q(q, gap).map_err(invalid),
        (None, Some(beta)) => BathSpec::from_beta(beta, gap).map_err(invalid),
        (None, None) => BathSpec::from_q(0.5, gap).map_err(invalid),
    }
}

fn resolve_format(
    flag: Option<Format>,
    config: &Config,
    default: Format,
) -> Result<Format, Failure> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match config.string("format")?.as_deref() {
        None => Ok(default),
        Some("csv") => Ok(Format::Csv),
        Some("records") => Ok(Format::Records),
        Some(other) => Err(Failure::Invalid(format!(
            "config key 'format' must be csv or records, got '{other}'"
        ))),
    }
}

fn resolve_out(flag: Option<PathBuf>, config: &Config) -> Result<Option<PathBuf>, Failure> {
    Ok(match flag {
        Some(p) => Some(p),
        None => config.path("out")?,
    })
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

/// Final location of `path`: relative paths land in `FINITHERM_OUT_DIR`
/// when that variable is set.
fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Atomic write: the content lands under a temporary name in the target
/// directory and is renamed over the final path only once fully written.
fn write_atomic(path: &Path, content: &str) -> Result<PathBuf, Failure> {
    let target = resolve_out_path(path);
    if let Some(parent) = target.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| Failure::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    let mut tmp_name = target.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(&tmp, content).map_err(|e| Failure::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, &target).map_err(|e| Failure::Io(format!("{}: {e}", target.display())))?;
    log::debug!("wrote {}", target.display());
    Ok(target)
}

/// Column-labelled rows rendered as CSV or as line-delimited records.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(row.len(), self.columns.len(), "row width matches header");
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn records(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let line = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, v)| format!("{c}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Records => self.records(),
        }
    }
}

/// Schema check for emitted CSV: declared header, rectangular rows, no
/// empty or non-finite cells, and a strictly increasing index column
/// (per group when a grouping column is given).
fn check_csv_schema(
    content: &str,
    columns: &[String],
    index: Option<&str>,
    group: Option<&str>,
) -> Result<(), Failure> {
    let mut lines = content.lines();
    let header = lines
        .next()
        .ok_or_else(|| Failure::Verification("emitted CSV is empty".into()))?;
    let declared = columns.join(",");
    if header != declared {
        return Err(Failure::Verification(format!(
            "CSV header '{header}' does not match declared columns '{declared}'"
        )));
    }
    let position = |name: &str| {
        columns
            .iter()
            .position(|c| c == name)
            .expect("declared column")
    };
    let index_col = index.map(position);
    let group_col = group.map(position);
    let mut last_index: HashMap<String, f64> = HashMap::new();
    for (row_no, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(Failure::Verification(format!(
                "CSV row {row_no} has {} cells, expected {}",
                cells.len(),
                columns.len()
            )));
        }
        for (cell, column) in cells.iter().zip(columns) {
            if cell.is_empty() {
                return Err(Failure::Verification(format!(
                    "CSV row {row_no} has an empty '{column}' cell"
                )));
            }
            if let Ok(value) = cell.parse::<f64>() {
                if !value.is_finite() {
                    return Err(Failure::Verification(format!(
                        "CSV row {row_no} column '{column}' is not finite: {cell}"
                    )));
                }
            }
        }
        if let Some(ic) = index_col {
            let value: f64 = cells[ic].parse().map_err(|_| {
                Failure::Verification(format!("CSV row {row_no} has a non-numeric index"))
            })?;
            let key = group_col
                .map(|gc| cells[gc].to_string())
                .unwrap_or_default();
            if let Some(prev) = last_index.get(&key) {
                if value <= *prev {
                    return Err(Failure::Verification(format!(
                        "round index not increasing at CSV row {row_no}"
                    )));
                }
            }
            last_index.insert(key, value);
        }
    }
    Ok(())
}

/// Print to stdout, exiting quietly when the reading end has gone away
/// (e.g. piped through `head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(err) = out.write_all(text.as_bytes()) {
        if err.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("i/o failure: stdout: {err}");
        std::process::exit(4);
    }
}

/// Write to `out` (printing a summary to stdout) or dump the content itself.
fn deliver(content: &str, out: Option<&Path>, summary: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let target = write_atomic(path, content)?;
            if !summary.is_empty() {
                emit(&format!("{summary}\n"));
            }
            emit(&format!("wrote {}\n", target.display()));
        }
        None => emit(content),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// cone
// ---------------------------------------------------------------------------

fn run_cone(args: ConeArgs, config: &Config) -> Result<(), Failure> {
    let bath = resolve_bath(&args.bath, config)?;
    let format = resolve_format(args.format, config, Format::Csv)?;
    let out = resolve_out(args.out, config)?;
    let seed = or_config(args.seed, config.unsigned("seed"))?.unwrap_or(11);
    let budget = or_config(args.budget, config.size("budget"))?.unwrap_or(6);
    let samples = or_config(args.samples, config.size("samples"))?.unwrap_or(4000);
    let name = or_config(args.initial, config.string("initial"))?
        .unwrap_or_else(|| "subsetV-canonical".to_string());

    let qutrit = HamiltonianSpec::equally_spaced(3).map_err(invalid)?;
    let tau = gibbs(&qutrit, &bath);
    let p = match name.as_str() {
        "subsetV-canonical" => {
            PopulationVector::new(vec![tau[1], tau[0], tau[2]]).map_err(invalid)?
        }
        "gibbs" => tau,
        other => parse_distribution(other, 3)?,
    };

    let cone = qutrit_cone_subset_v(&p, &bath).map_err(invalid)?;
    let vertices = mto_qutrit_inner_bound(&p, &bath, budget, samples, seed).map_err(invalid)?;

    let mut table = Table::new(["kind", "label", "p0", "p1", "p2"]);
    for (i, pt) in cone.extreme_points.iter().enumerate() {
        table.push([
            "collision_extreme".to_string(),
            format!("A{i}"),
            pt[0].to_string(),
            pt[1].to_string(),
            pt[2].to_string(),
        ]);
    }
    for (i, pt) in vertices.iter().enumerate() {
        table.push([
            "reset_hull".to_string(),
            format!("M{i}"),
            pt[0].to_string(),
            pt[1].to_string(),
            pt[2].to_string(),
        ]);
    }
    let content = table.render(format);
    if format == Format::Csv {
        check_csv_schema(&content, &table.columns, None, None)?;
    }
    let summary = ConeRegion::QutritPopulation(cone).to_table(2);
    deliver(&content, out.as_deref(), summary.trim_end())
}

fn parse_distribution(text: &str, dim: usize) -> Result<PopulationVector, Failure> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let parts = parts.map_err(|_| {
        Failure::Invalid(format!(
            "expected a named state or {dim} comma-separated populations, got '{text}'"
        ))
    })?;
    if parts.len() != dim {
        return Err(Failure::Invalid(format!(
            "expected {dim} populations, got {}",
            parts.len()
        )));
    }
    PopulationVector::new(parts).map_err(invalid)
}

// ---------------------------------------------------------------------------
// nogo
// ---------------------------------------------------------------------------

fn run_nogo(args: NogoArgs, config: &Config) -> Result<(), Failure> {
    let bath = resolve_bath(&args.bath, config)?;
    let format = resolve_format(args.format, config, Format::Records)?;
    let out = resolve_out(args.out, config)?;
    let seed = or_config(args.seed, config.unsigned("seed"))?.unwrap_or(7);
    let sweep =
        or_config(args.sweep, config.string("sweep"))?.unwrap_or_else(|| "default".to_string());
    let witness_out = or_config(args.witness_out, config.path("witness_out"))?;

    let (matched_instances, copies_per_pair) = match sweep.as_str() {
        "default" => (200, 9),
        "quick" => (20, 1),
        other => {
            return Err(Failure::Invalid(format!(
                "unknown sweep '{other}': expected default or quick"
            )))
        }
    };

    let mut verdicts: Vec<(u8, NoGoVerdict)> = Vec::new();
    for v in sweep_theorem2(&bath, matched_instances, seed).map_err(verification)? {
        verdicts.push((2, v));
    }
    let qubit = HamiltonianSpec::qubit();
    for (i, (mu, nu)) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]
        .into_iter()
        .enumerate()
    {
        let swept = sweep_theorem3(&qubit, mu, nu, &bath, copies_per_pair, seed + 1 + i as u64)
            .map_err(verification)?;
        for v in swept {
            verdicts.push((3, v));
        }
    }

    let mut table = Table::new([
        "instance",
        "theorem",
        "r1",
        "r2",
        "r3",
        "p0_star",
        "tau0_s",
        "margin",
        "bound_holds",
    ]);
    let mut violated = None;
    for (i, (theorem, v)) in verdicts.iter().enumerate() {
        table.push([
            i.to_string(),
            theorem.to_string(),
            v.premises.r1.to_string(),
            v.premises.r2.to_string(),
            v.premises.r3.to_string(),
            v.p0_star.to_string(),
            v.tau0_s.to_string(),
            v.margin().to_string(),
            v.bound_holds.to_string(),
        ]);
        if !v.bound_holds && violated.is_none() {
            violated = Some(i);
        }
    }
    let content = table.render(format);
    if format == Format::Csv {
        check_csv_schema(&content, &table.columns, Some("instance"), None)?;
    }

    let summary = format!(
        "checked {} instances at q = {}: {}",
        verdicts.len(),
        bath.q(),
        if violated.is_none() {
            "all cooling bounds hold"
        } else {
            "cooling bound violated"
        }
    );
    deliver(&content, out.as_deref(), &summary)?;

    if let Some(path) = witness_out {
        let tightest = verdicts
            .iter()
            .filter(|(_, v)| v.witness.is_some())
            .min_by(|(_, a), (_, b)| a.margin().partial_cmp(&b.margin()).expect("finite margins"));
        match tightest {
            Some((_, v)) => {
                let target = write_atomic(&path, &v.witness.as_ref().expect("filtered").to_text())?;
                emit(&format!("wrote witness {}\n", target.display()));
            }
            None => {
                return Err(Failure::Invalid(
                    "no instance kept an explicit witness channel".into(),
                ))
            }
        }
    }

    match violated {
        Some(i) => Err(Failure::Verification(format!(
            "cooling bound violated on instance {i}"
        ))),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// protocol
// ---------------------------------------------------------------------------

fn build_variant(
    variant: &str,
    ds: Option<usize>,
    dr: Option<usize>,
    mode: Option<&str>,
) -> Result<RoundSpec, Failure> {
    match variant {
        "I" => {
            let ds = ds.unwrap_or(3);
            let dr = dr.unwrap_or(3);
            if dr == 3 {
                build_protocol_i_qutrit(ds).map_err(invalid)
            } else {
                build_protocol_i_general(ds, dr).map_err(invalid)
            }
        }
        "II" => {
            if ds.is_some_and(|d| d != 3) || dr.is_some_and(|d| d != 3) {
                return Err(Failure::Invalid(
                    "the machine-assisted protocol fixes d_S = d_r = 3".into(),
                ));
            }
            match mode.unwrap_or("cooling") {
                "cooling" => build_protocol_ii_cooling_limit().map_err(invalid),
                "efficiency" => build_protocol_ii_efficiency().map_err(invalid),
                other => Err(Failure::Invalid(format!(
                    "unknown mode '{other}': expected cooling or efficiency"
                ))),
            }
        }
        other => Err(Failure::Invalid(format!(
            "unknown variant '{other}': expected I or II"
        ))),
    }
}

fn run_protocol(args: ProtocolArgs, config: &Config) -> Result<(), Failure> {
    let bath = resolve_bath(&args.bath, config)?;
    let format = resolve_format(args.format, config, Format::Csv)?;
    let out = resolve_out(args.out, config)?;
    let rounds = or_config(args.rounds, config.size("rounds"))?.unwrap_or(100);
    let variant =
        or_config(args.variant, config.string("variant"))?.unwrap_or_else(|| "I".to_string());
    let ds = or_config(args.ds, config.size("dS"))?;
    let dr = or_config(args.dr, config.size("dr"))?;
    let mode = or_config(args.mode, config.string("mode"))?;
    let initial =
        or_config(args.initial, config.string("initial"))?.unwrap_or_else(|| "gibbs".to_string());

    let spec = build_variant(&variant, ds, dr, mode.as_deref())?;
    let dim = spec.controlled.dim();
    let start = match initial.as_str() {
        "gibbs" => gibbs(&spec.controlled, &bath),
        "excited" => PopulationVector::point_mass(dim, dim - 1),
        other => parse_distribution(other, dim)?,
    };

    let g = round_matrix(&spec, &bath).map_err(verification)?;
    let fp = fixed_point(&g).map_err(verification)?;
    let traj = trajectory(&spec, &start, &bath, rounds).map_err(verification)?;

    let mut columns = vec!["n".to_string()];
    columns.extend((0..dim).map(|j| format!("p{j}")));
    columns.push("dist_fixed_point".to_string());
    let mut table = Table::new(columns);
    for (n, state) in traj.iter().enumerate() {
        let mut row = vec![n.to_string()];
        row.extend((0..dim).map(|j| state[j].to_string()));
        row.push(state.linf_distance(&fp).to_string());
        table.push(row);
    }
    let content = table.render(format);
    if format == Format::Csv {
        check_csv_schema(&content, &table.columns, Some("n"), None)?;
    }

    let mut summary = format!(
        "{} at q = {}\nround contraction (slem): {}\nfixed point: {:?}",
        spec.label,
        bath.q(),
        g.slem(),
        fp.to_vec()
    );
    if variant == "I" {
        let limit = cooling_limit(ds.unwrap_or(3), dr.unwrap_or(3), &bath).map_err(invalid)?;
        summary.push_str(&format!("\ncooling limit (ground population): {limit}"));
    } else {
        summary.push_str(&format!(
            "\nsteady system marginal: {:?}",
            spec.system_marginal(&fp).to_vec()
        ));
    }
    deliver(&content, out.as_deref(), &summary)
}

// ---------------------------------------------------------------------------
// cop
// ---------------------------------------------------------------------------

fn run_cop(args: CopArgs, config: &Config) -> Result<(), Failure> {
    let bath = resolve_bath(&args.bath, config)?;
    let format = resolve_format(args.format, config, Format::Csv)?;
    let out = resolve_out(args.out, config)?;
    let rounds = or_config(args.rounds, config.size("rounds"))?.unwrap_or(200);
    let list =
        or_config(args.variant, config.string("variant"))?.unwrap_or_else(|| "I,II".to_string());
    let mut variants = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if token != "I" && token != "II" {
            return Err(Failure::Invalid(format!(
                "unknown variant '{token}': expected I or II"
            )));
        }
        if !variants.contains(&token.to_string()) {
            variants.push(token.to_string());
        }
    }
    if variants.is_empty() {
        return Err(Failure::Invalid("no variant given".into()));
    }

    let mut table = Table::new(["variant", "n", "W", "dU", "cumW", "cumdU", "K"]);
    let mut summary_lines = Vec::new();
    for variant in &variants {
        let spec = match variant.as_str() {
            "I" => build_protocol_i_qutrit(3).map_err(invalid)?,
            _ => build_protocol_ii_efficiency().map_err(invalid)?,
        };
        let start = gibbs(&spec.controlled, &bath);
        let ledger = simulate_protocol(&spec, &start, &bath, rounds).map_err(verification)?;
        let mut cum_work = 0.0;
        let mut cum_drain = 0.0;
        for record in ledger.records() {
            cum_work += record.work;
            cum_drain += record.energy_reduction;
            let cop = cumulative_cop(&ledger, record.n).map_err(|e| {
                Failure::Verification(format!("variant {variant}: {}", first_line(&e.to_string())))
            })?;
            table.push([
                variant.clone(),
                record.n.to_string(),
                record.work.to_string(),
                record.energy_reduction.to_string(),
                cum_work.to_string(),
                cum_drain.to_string(),
                cop.to_string(),
            ]);
        }
        if rounds > 0 {
            summary_lines.push(format!(
                "variant {variant}: W(1) = {}, K({rounds}) = {}",
                ledger.records()[0].work,
                cumulative_cop(&ledger, rounds).map_err(verification)?
            ));
        }
    }
    let content = table.render(format);
    if format == Format::Csv {
        check_csv_schema(&content, &table.columns, Some("n"), Some("variant"))?;
    }
    deliver(&content, out.as_deref(), &summary_lines.join("\n"))
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// Inverse-temperature fit from adjacent-level ratios of an equally spaced
/// marginal: mean of `ln(p_j / p_{j+1}) / (beta E)` and the largest
/// deviation from that mean.
fn fitted_beta_ratio(p: &PopulationVector, bath: &BathSpec) -> (f64, f64) {
    let denom = bath.beta() * bath.gap();
    let ratios: Vec<f64> = (0..p.dim() - 1)
        .map(|j| (p[j] / p[j + 1]).ln() / denom)
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max_dev = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    (mean, max_dev)
}

fn run_report(args: ReportArgs, config: &Config) -> Result<(), Failure> {
    let bath = resolve_bath(&args.bath, config)?;
    let out = resolve_out(args.out, config)?;
    let rounds = or_config(args.rounds, config.size("rounds"))?.unwrap_or(200);
    if rounds < 10 {
        return Err(Failure::Invalid(
            "--rounds must be at least 10 to classify the CoP trend".into(),
        ));
    }

    // A halving CoP signals the 1/N decay of an unbounded work bill; a flat
    // tail signals a bounded one.
    let trend = |spec: &RoundSpec| -> Result<(f64, &'static str), Failure> {
        let start = gibbs(&spec.controlled, &bath);
        let ledger = simulate_protocol(spec, &start, &bath, rounds).map_err(verification)?;
        let half = cumulative_cop(&ledger, rounds / 2).map_err(verification)?;
        let full = cumulative_cop(&ledger, rounds).map_err(verification)?;
        Ok((
            full,
            if full <= 0.75 * half {
                "zero"
            } else {
                "positive"
            },
        ))
    };

    let pump = build_protocol_i_qutrit(3).map_err(invalid)?;
    let pump_fp =
        fixed_point(&round_matrix(&pump, &bath).map_err(verification)?).map_err(verification)?;
    let (pump_fit, pump_dev) = fitted_beta_ratio(&pump_fp, &bath);
    let (_, pump_flag) = trend(&pump)?;

    let cooling = build_protocol_ii_cooling_limit().map_err(invalid)?;
    let cooling_fp =
        fixed_point(&round_matrix(&cooling, &bath).map_err(verification)?).map_err(verification)?;
    let (cool_fit, cool_dev) = fitted_beta_ratio(&cooling.system_marginal(&cooling_fp), &bath);
    let (_, cool_flag) = trend(&cooling)?;

    let efficiency = build_protocol_ii_efficiency().map_err(invalid)?;
    let start = gibbs(&efficiency.controlled, &bath);
    let (even, _) = parity_limits(&efficiency, &start, &bath).map_err(verification)?;
    let (eff_fit, eff_dev) = fitted_beta_ratio(&efficiency.system_marginal(&even), &bath);
    let (eff_cop, eff_flag) = trend(&efficiency)?;

    let mut rows: Vec<[String; 5]> = vec![
        [
            "machine reset against the bath".into(),
            "m qubits".into(),
            "beta* = m beta".into(),
            "positive".into(),
            "Phys. Rev. Lett. 123, 170605".into(),
        ],
        [
            "partner pairing algorithm (PPA)".into(),
            "m qubits".into(),
            "beta* = 2^(m-1) beta".into(),
            "positive".into(),
            "Phys. Rev. Lett. 116, 170501".into(),
        ],
        [
            "subspace reset (SR)".into(),
            "m qubits".into(),
            "beta* = (2^(m+1) - 1) beta".into(),
            "zero".into(),
            "Rodriguez-Briones et al. (2017)".into(),
        ],
        [
            "unrestricted thermal operations (xHBAC)".into(),
            "none".into(),
            "beta* -> infinity".into(),
            "zero".into(),
            "Alhambra et al. (2019)".into(),
        ],
    ];
    rows.push([
        "single-collision rounds, d_r <= d_S".into(),
        "none".into(),
        format!("beta*/beta = {pump_fit:.3} (max dev {pump_dev:.1e})"),
        pump_flag.into(),
        "simulated: d_S = d_r = 3 fixed point".into(),
    ]);
    rows.push([
        "machine-assisted rounds, work-efficient".into(),
        "1 qubit".into(),
        format!("beta*/beta = {eff_fit:.3} (max dev {eff_dev:.1e})"),
        format!("{eff_flag} (K({rounds}) = {eff_cop:.3})"),
        "simulated: parity-limit marginal".into(),
    ]);
    rows.push([
        "machine-assisted rounds, deepest cooling".into(),
        "1 qubit".into(),
        format!("beta*/beta = {cool_fit:.3} (max dev {cool_dev:.1e})"),
        cool_flag.into(),
        "simulated: steady-state marginal".into(),
    ]);

    let header = [
        "thermalization",
        "machine",
        "cooling limit",
        "cumulative CoP",
        "source",
    ];
    let widths = [42, 10, 38, 26, 0];
    let mut text = format!(
        "protocol comparison at q = {}, E = {}\n",
        bath.q(),
        bath.gap()
    );
    let render_row = |cells: &[&str]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if widths[i] == 0 {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{:<width$}  ", cell, width = widths[i]));
            }
        }
        line.trim_end().to_string()
    };
    text.push_str(&render_row(&header));
    text.push('\n');
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        text.push_str(&render_row(&cells));
        text.push('\n');
    }

    match out {
        Some(path) => {
            let target = write_atomic(&path, &text)?;
            emit(&format!("wrote {}\n", target.display()));
            Ok(())
        }
        None => {
            emit(&text);
            Ok(())
        }
    }
}
