//! `otl-cfr` subcommands: `estimate`, `infer`, `simulate`, `compare`.
//!
//! Exit codes: 0 success, 1 runtime or domain error, 2 usage or config error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cfr::{
    self, build_cfr_network, classify_record, count_contingencies, estimate_h2_rows, fixtures,
    read_records, with_prior_failure_rate, CfrError, CfrNetworkSpec, EstimationMode, FailureCounts,
    HealthyRows, PriorWeights, Scenario, TableContext,
};
use crate::credal::{
    credal_infer_soft_with, CredalError, CredalNetwork, Evidence, InferenceOptions, Query,
    DEFAULT_MAX_COMBINATIONS,
};
use crate::estimate::{EstimateError, ProbabilityInterval, SampleSize};
use crate::sim::{compare_traces, run_replications, ConvergenceTrace, SimError, SimulationConfig};

pub const OUT_DIR_ENV: &str = "OTL_CFR_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "otl-cfr-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Runtime(_) => 1,
            Self::Usage(_) | Self::Config(_) => 2,
        }
    }
}

impl From<CfrError> for CliError {
    fn from(e: CfrError) -> Self {
        match e {
            CfrError::InvalidSpec(_) | CfrError::InvalidScenario(_) => Self::Config(e.to_string()),
            CfrError::Credal(c) => c.into(),
            other => Self::Runtime(other.to_string()),
        }
    }
}

impl From<CredalError> for CliError {
    fn from(e: CredalError) -> Self {
        match e {
            CredalError::InvalidNetwork(_)
            | CredalError::Document(_)
            | CredalError::EmptyCredalSet { .. } => Self::Config(e.to_string()),
            CredalError::UnknownVariable { .. }
            | CredalError::UnknownState { .. }
            | CredalError::EvidenceOnQuery(_)
            | CredalError::ConflictingEvidence(_)
            | CredalError::InvalidSoftWeights { .. } => Self::Usage(e.to_string()),
            other => Self::Runtime(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(_) => Self::Config(e.to_string()),
            other => Self::Runtime(other.to_string()),
        }
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        Self::Config(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "otl-cfr",
    version,
    about = "Interval conditional failure rates for overhead lines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count failures per context and estimate the failure-hour tables.
    Estimate(EstimateArgs),
    /// Bound P(query | evidence) in a network document.
    Infer(InferArgs),
    /// Run seeded convergence studies and write trace files.
    Simulate(SimulateArgs),
    /// Summarize a convergence trace.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").args(["records", "counts"]))]
#[command(group = clap::ArgGroup::new("mode").args(["idm_s", "credible_gamma", "dirichlet_weights"]))]
pub struct EstimateArgs {
    /// Hourly records CSV; only failed hours are counted.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Failure counts JSON; defaults to the bundled counts.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Imprecise Dirichlet intervals with this equivalent sample size (default mode, s = 1).
    #[arg(long)]
    pub idm_s: Option<f64>,
    /// Imprecise credible intervals at this credibility.
    #[arg(long)]
    pub credible_gamma: Option<f64>,
    /// Dirichlet posterior means with these prior weights (JSON).
    #[arg(long)]
    pub dirichlet_weights: Option<PathBuf>,
    /// Sample size used with --credible-gamma.
    #[arg(long, default_value_t = 1.0, requires = "credible_gamma")]
    pub credible_s: f64,
    /// Prior failure rate of the line, used for --network-out.
    #[arg(long, default_value_t = fixtures::LINE_1_PRIOR)]
    pub prior: f64,
    /// Healthy-hour rows JSON, used for --network-out; defaults to the bundled rows.
    #[arg(long)]
    pub healthy_rows: Option<PathBuf>,
    /// Also write the assembled network document here.
    #[arg(long)]
    pub network_out: Option<PathBuf>,
    /// Write the machine-readable JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print JSON instead of the text tables.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Network document (JSON).
    pub network: PathBuf,
    /// Hard evidence `VAR=state`; repeatable or comma separated.
    #[arg(long = "evidence", short = 'e', value_delimiter = ',')]
    pub evidence: Vec<String>,
    /// Soft evidence `VAR=state:w,state:w`; repeatable.
    #[arg(long = "soft")]
    pub soft: Vec<String>,
    /// Scenario file providing evidence and the prior failure rate.
    #[arg(long, conflicts_with_all = ["evidence", "soft"])]
    pub scenario: Option<PathBuf>,
    /// Query `VAR=state`, or a bare state of `H`.
    #[arg(long, default_value = "H=h2")]
    pub query: String,
    /// Replace the root `H` row with (1 - p, p).
    #[arg(long)]
    pub prior: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_COMBINATIONS)]
    pub max_combinations: u64,
    /// Also write the JSON result here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of consecutive seeds to run.
    #[arg(long, default_value_t = 1)]
    pub replications: u64,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Trace file (CSV, or JSON when the extension is .json).
    #[arg(long)]
    pub trace: PathBuf,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

/// Provenance written next to command outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    fn of(path: impl Into<String>, bytes: &[u8]) -> Self {
        Self {
            path: path.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

impl RunManifest {
    fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config,
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn write_next_to(&self, output: &Path) -> Result<()> {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        write_file(Path::new(&name), &to_json(self))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// One estimated context in the `estimate` report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableReport {
    pub variable: String,
    pub given: Option<(String, String)>,
    pub states: Vec<String>,
    pub counts: Vec<u64>,
    pub intervals: Vec<ProbabilityInterval>,
    pub rounded: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mode: EstimationMode,
    pub s: f64,
    pub failures: u64,
    pub tables: Vec<TableReport>,
}

impl EstimateReport {
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "failure-hour tables, mode {}, {} failures\n",
            self.mode.name(),
            self.failures
        );
        for t in &self.tables {
            let given = t
                .given
                .as_ref()
                .map_or(String::new(), |(v, s)| format!(" given {v}={s}"));
            out += &format!("\nP({} | h2{given})\n", t.variable);
            for ((state, &(lo, hi)), n) in t.states.iter().zip(&t.rounded).zip(&t.counts) {
                if lo == hi {
                    out += &format!("  {state:<4} {lo:.2}          (n={n})\n");
                } else {
                    out += &format!("  {state:<4} [{lo:.2}, {hi:.2}]  (n={n})\n");
                }
            }
        }
        out
    }
}

pub fn estimate_report(
    counts: &FailureCounts,
    s: SampleSize,
    mode: &EstimationMode,
) -> Result<EstimateReport> {
    let rows = estimate_h2_rows(counts, s, mode)?;
    let tables = TableContext::all()
        .map(|ctx| {
            let ivs = rows.get(ctx).clone();
            TableReport {
                variable: ctx.child_variable().into(),
                given: ctx.parent().map(|(v, s)| (v.into(), s.into())),
                states: ctx.child_states().iter().map(|s| s.to_string()).collect(),
                counts: counts.get(ctx).counts().to_vec(),
                rounded: ivs.iter().map(|iv| iv.rounded(2)).collect(),
                intervals: ivs,
            }
        })
        .collect();
    Ok(EstimateReport {
        mode: mode.clone(),
        s: s.get(),
        failures: counts.failures(),
        tables,
    })
}

fn cmd_estimate(args: &EstimateArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut manifest = RunManifest::new("estimate", serde_json::Value::Null);
    let counts = if let Some(path) = &args.records {
        let bytes = read_input(path)?;
        manifest
            .inputs
            .push(FileDigest::of(path.display().to_string(), &bytes));
        let records = read_records(bytes.as_slice())?;
        let states = records
            .iter()
            .map(classify_record)
            .collect::<cfr::Result<Vec<_>>>()?;
        count_contingencies(&states)
    } else if let Some(path) = &args.counts {
        let bytes = read_input(path)?;
        manifest
            .inputs
            .push(FileDigest::of(path.display().to_string(), &bytes));
        let counts: FailureCounts = read_json(path, &bytes)?;
        counts.validate()?;
        counts
    } else {
        fixtures::failure_counts()
    };

    let (mode, s) = if let Some(path) = &args.dirichlet_weights {
        let bytes = read_input(path)?;
        manifest
            .inputs
            .push(FileDigest::of(path.display().to_string(), &bytes));
        let weights: PriorWeights = read_json(path, &bytes)?;
        weights.check_shape()?;
        (EstimationMode::Dirichlet { weights }, SampleSize::default())
    } else if let Some(gamma) = args.credible_gamma {
        (
            EstimationMode::CredibleInterval { gamma },
            SampleSize::new(args.credible_s)?,
        )
    } else {
        (
            EstimationMode::Idm,
            SampleSize::new(args.idm_s.unwrap_or(1.0))?,
        )
    };

    let report = estimate_report(&counts, s, &mode)?;
    manifest.config = serde_json::json!({
        "mode": mode,
        "s": s.get(),
        "prior": args.prior,
        "source": if args.records.is_some() { "records" } else if args.counts.is_some() { "counts" } else { "bundled" },
    });

    if let Some(path) = &args.network_out {
        let h1_rows: HealthyRows = match &args.healthy_rows {
            Some(p) => {
                let bytes = read_input(p)?;
                manifest
                    .inputs
                    .push(FileDigest::of(p.display().to_string(), &bytes));
                read_json(p, &bytes)?
            }
            None => fixtures::healthy_rows(),
        };
        let spec = CfrNetworkSpec {
            prior_failure_rate: args.prior,
            h2_counts: counts.clone(),
            h1_rows,
            s,
        };
        let net = build_cfr_network(&spec, &mode)?;
        let text = net.to_json() + "\n";
        write_file(path, &text)?;
        manifest
            .outputs
            .push(FileDigest::of(path.display().to_string(), text.as_bytes()));
    }

    let json = to_json(&report);
    if let Some(path) = &args.out {
        write_file(path, &json)?;
        manifest
            .outputs
            .push(FileDigest::of(path.display().to_string(), json.as_bytes()));
        manifest.write_next_to(path)?;
    }
    emit(
        stdout,
        &if args.json {
            json
        } else {
            report.render_text()
        },
    )
}

fn parse_pair(text: &str) -> Result<(String, String)> {
    match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
            Ok((k.trim().to_string(), v.trim().to_string()))
        }
        _ => Err(CliError::Usage(format!("expected VAR=state, got `{text}`"))),
    }
}

fn parse_soft(text: &str) -> Result<(String, Vec<(String, f64)>)> {
    let (var, rest) = parse_pair(text)?;
    let weights = rest
        .split(',')
        .map(|item| {
            let (state, w) = item
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("expected state:weight, got `{item}`")))?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad weight in `{item}`")))?;
            Ok((state.trim().to_string(), w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((var, weights))
}

/// JSON result of `infer`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferReport {
    pub query: Query,
    pub lower: f64,
    pub upper: f64,
    /// `point` for precise networks, otherwise `interval`.
    pub mode: String,
    pub evidence: Evidence,
    pub prior_failure_rate: Option<f64>,
}

fn cmd_infer(args: &InferArgs, stdout: &mut dyn Write) -> Result<()> {
    let bytes = read_input(&args.network)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Config(format!("{} is not UTF-8", args.network.display())))?;
    let mut net = CredalNetwork::from_json(&text)?;
    let mut manifest = RunManifest::new("infer", serde_json::Value::Null);
    manifest
        .inputs
        .push(FileDigest::of(args.network.display().to_string(), &bytes));

    let (evidence, prior) = if let Some(path) = &args.scenario {
        let sbytes = read_input(path)?;
        manifest
            .inputs
            .push(FileDigest::of(path.display().to_string(), &sbytes));
        let sc: Scenario = read_json(path, &sbytes)?;
        (sc.evidence, args.prior.or(Some(sc.prior_failure_rate)))
    } else {
        let mut e = Evidence::new();
        for item in &args.evidence {
            let (k, v) = parse_pair(item)?;
            e = e.hard(k, v);
        }
        for item in &args.soft {
            let (k, ws) = parse_soft(item)?;
            e = e.soft(k, ws);
        }
        (e, args.prior)
    };
    if let Some(p) = prior {
        net = with_prior_failure_rate(&net, p)?;
    }
    let query = match args.query.split_once('=') {
        Some(_) => {
            let (v, s) = parse_pair(&args.query)?;
            Query::new(v, s)
        }
        None => Query::new("H", args.query.trim()),
    };
    let options = InferenceOptions {
        max_combinations: args.max_combinations,
        ..InferenceOptions::default()
    };
    let iv = credal_infer_soft_with(&net, &query, &evidence, options)?;
    let report = InferReport {
        query,
        lower: iv.lower(),
        upper: iv.upper(),
        mode: if net.is_point() { "point" } else { "interval" }.into(),
        evidence,
        prior_failure_rate: prior,
    };
    let json = to_json(&report);
    if let Some(path) = &args.out {
        manifest.config = serde_json::json!({
            "query": report.query,
            "evidence": report.evidence,
            "prior": prior,
            "max_combinations": args.max_combinations,
        });
        write_file(path, &json)?;
        manifest
            .outputs
            .push(FileDigest::of(path.display().to_string(), json.as_bytes()));
        manifest.write_next_to(path)?;
    }
    emit(stdout, &json)
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let bytes = read_input(&args.config)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Config(format!("{} is not UTF-8", args.config.display())))?;
    let mut config = SimulationConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let trace = run_replications(&config, args.replications)?;
    let csv = trace.to_csv_string()?;
    let json = trace.to_json() + "\n";

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", args.out.display())))?;
    let mut manifest = RunManifest::new(
        "simulate",
        serde_json::to_value(&config).expect("config serializes"),
    );
    manifest.config["replications"] = args.replications.into();
    manifest.seeds = (0..args.replications)
        .map(|i| config.seed.wrapping_add(i))
        .collect();
    manifest
        .inputs
        .push(FileDigest::of(args.config.display().to_string(), &bytes));
    for (name, body) in [("trace.csv", &csv), ("trace.json", &json)] {
        write_file(&args.out.join(name), body)?;
        manifest.outputs.push(FileDigest::of(name, body.as_bytes()));
    }
    let manifest_text = to_json(&manifest);
    write_file(&args.out.join("manifest.json"), &manifest_text)?;
    emit(
        stdout,
        &format!(
            "{} rows from {} run(s) written to {}\n",
            trace.rows.len(),
            args.replications,
            args.out.display()
        ),
    )
}

fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<()> {
    let bytes = read_input(&args.trace)?;
    let trace = if args.trace.extension().is_some_and(|e| e == "json") {
        serde_json::from_slice::<ConvergenceTrace>(&bytes)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", args.trace.display())))?
    } else {
        ConvergenceTrace::read_csv(bytes.as_slice())?
    };
    let report = compare_traces(&trace);
    let json = to_json(&report);
    if let Some(path) = &args.out {
        write_file(path, &json)?;
        let mut manifest = RunManifest::new("compare", serde_json::Value::Null);
        manifest
            .inputs
            .push(FileDigest::of(args.trace.display().to_string(), &bytes));
        manifest
            .outputs
            .push(FileDigest::of(path.display().to_string(), json.as_bytes()));
        manifest.write_next_to(path)?;
    }
    emit(
        stdout,
        &if args.json {
            json
        } else {
            report.render_text()
        },
    )
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, stdout),
        Command::Infer(a) => cmd_infer(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Compare(a) => cmd_compare(a, stdout),
    }
}

/// Parses `args` (including the program name), runs the command, reports
/// errors on stderr and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
