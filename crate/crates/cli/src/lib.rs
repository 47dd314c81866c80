//! Command-line surface over `sandpile_core`.
//!
//! Exit codes: 0 affirmative, 2 invalid input, 3 negative verdict or
//! recurrent run, 4 falsification (methods disagree), 5 state budget
//! exhausted. Machine output goes to standard out, diagnostics to
//! standard error.

pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sandpile_core::{
    canonical_rotation, classify_by_invariant, classify_by_simulation, cross_check,
    residue_histogram, reverse_bfs_successful, stabilize, terminal_invariant, trace,
    weak_compositions, CycleConfig, FiringPolicy, Residue, SandpileError, StabilizationOutcome,
    Verdict, VerificationReport, DEFAULT_STATE_BUDGET,
};

use crate::output::{ClassifyRecord, EnumerateRecord, HistogramRecord, SimulateRecord, TraceRow};

/// Largest cycle `verify` accepts without `--allow-large`.
pub const DEFAULT_MAX_VERIFY_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Success = 0,
    Io = 1,
    Invalid = 2,
    Negative = 3,
    Falsified = 4,
    Budget = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            status: Status::Invalid,
            message: message.into(),
        }
    }
}

impl From<SandpileError> for CliError {
    fn from(err: SandpileError) -> Self {
        let status = match err {
            SandpileError::BudgetExhausted { .. } => Status::Budget,
            _ => Status::Invalid,
        };
        CliError {
            status,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError {
            status: Status::Io,
            message: err.to_string(),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError {
            status: Status::Io,
            message: err.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError {
            status: Status::Io,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "sandpile",
    version,
    about = "Chip-firing on the cycle graph with k = N chips"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a configuration to stability or to a repeated state.
    Simulate(SimulateArgs),
    /// Decide whether a k = N configuration reaches the all-ones state.
    Classify(ClassifyArgs),
    /// List weak compositions of n into n parts, or the successful ones.
    Enumerate(EnumerateArgs),
    /// Exhaustively cross-check residue test, simulation and reverse reachability.
    Verify(VerifyArgs),
    /// Count configurations of k chips on n vertices by residue.
    Histogram(HistogramArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifyMethod {
    Invariant,
    Simulation,
    Both,
}

fn parse_config(s: &str) -> Result<CycleConfig, SandpileError> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Comma-separated chip counts, vertex 1 first (e.g. 0,3,0,1).
    #[arg(value_parser = parse_config)]
    pub config: CycleConfig,
    #[arg(long, default_value = "lowest-index", value_parser = str::parse::<FiringPolicy>)]
    pub policy: FiringPolicy,
    /// Firing steps shown in the trace.
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
    /// Distinct states a run may visit before giving up.
    #[arg(long, env = "SANDPILE_BUDGET", default_value_t = DEFAULT_STATE_BUDGET)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(value_parser = parse_config)]
    pub config: CycleConfig,
    #[arg(long, value_enum, default_value_t = ClassifyMethod::Both)]
    pub method: ClassifyMethod,
    #[arg(long, default_value = "lowest-index", value_parser = str::parse::<FiringPolicy>)]
    pub policy: FiringPolicy,
    #[arg(long, env = "SANDPILE_BUDGET", default_value_t = DEFAULT_STATE_BUDGET)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Cycle size; n chips are distributed.
    pub n: usize,
    /// Only the configurations reachable from all-ones by reverse firing.
    #[arg(long)]
    pub successful_only: bool,
    /// Show the minimal reverse depth (text format).
    #[arg(long)]
    pub depths: bool,
    /// Group by rotation class and show each class representative.
    #[arg(long)]
    pub classes: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the listing to this file instead of standard out.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_VERIFY_N)]
    pub n_max: usize,
    /// Permit n above 8.
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long, default_value = "lowest-index", value_parser = str::parse::<FiringPolicy>)]
    pub policy: FiringPolicy,
    #[arg(long, env = "SANDPILE_BUDGET", default_value_t = DEFAULT_STATE_BUDGET)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    pub n: usize,
    pub k: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Runs a parsed command against standard out.
pub fn run(cli: Cli) -> CliResult<Status> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let status = run_with(cli, &mut out)?;
    out.flush()?;
    Ok(status)
}

pub fn run_with(cli: Cli, out: &mut dyn Write) -> CliResult<Status> {
    match cli.command {
        Command::Simulate(args) => simulate(args, out),
        Command::Classify(args) => classify(args, out),
        Command::Enumerate(args) => match args.out.clone() {
            Some(path) => {
                let mut file = BufWriter::new(File::create(&path)?);
                let status = enumerate(args, &mut file)?;
                file.flush()?;
                Ok(status)
            }
            None => enumerate(args, out),
        },
        Command::Verify(args) => verify(args, out),
        Command::Histogram(args) => histogram(args, out),
    }
}

fn json_line<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn braced(vertices: &[usize]) -> String {
    let inner: Vec<String> = vertices.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn simulate(args: SimulateArgs, out: &mut dyn Write) -> CliResult<Status> {
    let outcome = stabilize(&args.config, args.policy, args.budget)?;
    let rows = TraceRow::from_trace(trace(&args.config, args.policy, args.max_steps));
    match args.format {
        Format::Text => {
            for row in &rows {
                writeln!(
                    out,
                    "{}\tfired={}\tstate={}",
                    row.step,
                    braced(&row.fired),
                    row.state
                )?;
            }
            match &outcome {
                StabilizationOutcome::Terminated {
                    final_config,
                    firings_total,
                    odometer,
                } => {
                    let odo: Vec<String> = odometer.iter().map(ToString::to_string).collect();
                    writeln!(
                        out,
                        "Terminated firings_total={firings_total} final={final_config} odometer={}",
                        odo.join(",")
                    )?;
                }
                StabilizationOutcome::Recurrent {
                    firings_total,
                    steps_to_cycle,
                    cycle_length,
                } => {
                    writeln!(
                        out,
                        "Recurrent firings_total={firings_total} steps_to_cycle={steps_to_cycle} cycle_length={cycle_length}"
                    )?;
                }
            }
        }
        Format::Json => json_line(
            out,
            &SimulateRecord {
                policy: args.policy.to_string(),
                trace: rows,
                outcome: outcome.clone(),
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["step", "fired", "state"])?;
            for row in &rows {
                let fired: Vec<String> = row.fired.iter().map(ToString::to_string).collect();
                w.write_record([row.step.to_string(), fired.join(";"), row.state.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(if outcome.is_terminated() {
        Status::Success
    } else {
        Status::Negative
    })
}

fn classify(args: ClassifyArgs, out: &mut dyn Write) -> CliResult<Status> {
    let mut classifications = Vec::new();
    if matches!(
        args.method,
        ClassifyMethod::Invariant | ClassifyMethod::Both
    ) {
        classifications.push(classify_by_invariant(&args.config)?);
    }
    if matches!(
        args.method,
        ClassifyMethod::Simulation | ClassifyMethod::Both
    ) {
        classifications.push(classify_by_simulation(
            &args.config,
            args.policy,
            args.budget,
        )?);
    }

    match args.format {
        Format::Text => {
            for c in &classifications {
                write!(
                    out,
                    "{:?} C={} target={} method={:?}",
                    c.verdict, c.config_invariant, c.target_invariant, c.method
                )?;
                if let Some(f) = c.firings_total {
                    write!(out, " firings={f}")?;
                }
                writeln!(out)?;
            }
        }
        Format::Json => json_line(
            out,
            &ClassifyRecord {
                config: args.config.clone(),
                classifications: classifications.clone(),
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record([
                "config",
                "method",
                "verdict",
                "config_invariant",
                "target_invariant",
                "firings_total",
            ])?;
            for c in &classifications {
                w.write_record([
                    args.config.to_string(),
                    format!("{:?}", c.method),
                    format!("{:?}", c.verdict),
                    c.config_invariant.to_string(),
                    c.target_invariant.to_string(),
                    c.firings_total.map(|f| f.to_string()).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
    }

    let verdicts: Vec<Verdict> = classifications.iter().map(|c| c.verdict).collect();
    if verdicts.windows(2).any(|w| w[0] != w[1]) {
        eprintln!("sandpile: methods disagree on {}", args.config);
        return Ok(Status::Falsified);
    }
    Ok(if verdicts[0].is_successful() {
        Status::Success
    } else {
        Status::Negative
    })
}

fn enumerate(args: EnumerateArgs, out: &mut dyn Write) -> CliResult<Status> {
    let n = args.n;
    let chips =
        u32::try_from(n).map_err(|_| CliError::invalid(format!("cycle size {n} too large")))?;
    let successful = reverse_bfs_successful(n)?;
    let configs: Vec<CycleConfig> = if args.successful_only {
        successful.members_sorted()
    } else {
        weak_compositions(chips, n)?.collect()
    };
    let mut records: Vec<EnumerateRecord> = configs
        .into_iter()
        .map(|config| EnumerateRecord {
            invariant: config.invariant(),
            depth: successful.depth(&config),
            class: args.classes.then(|| canonical_rotation(&config)),
            config,
        })
        .collect();
    if args.classes {
        // group by class, members ascending within a class
        records.sort_by(|a, b| (&a.class, &a.config).cmp(&(&b.class, &b.config)));
    }

    match args.format {
        Format::Text => {
            for r in &records {
                write!(out, "{}", r.config)?;
                if !args.successful_only {
                    write!(out, " invariant={}", r.invariant)?;
                }
                if let (true, Some(d)) = (args.depths, r.depth) {
                    write!(out, " depth={d}")?;
                }
                if let Some(class) = &r.class {
                    write!(out, " class={class}")?;
                }
                writeln!(out)?;
            }
        }
        Format::Json => {
            for r in &records {
                json_line(out, r)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let mut header = vec!["config", "invariant", "depth"];
            if args.classes {
                header.push("class");
            }
            w.write_record(&header)?;
            for r in &records {
                let mut row = vec![
                    r.config.to_string(),
                    r.invariant.to_string(),
                    r.depth.map(|d| d.to_string()).unwrap_or_default(),
                ];
                if let Some(class) = &r.class {
                    row.push(class.to_string());
                }
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(Status::Success)
}

fn histogram_text(histogram: &std::collections::BTreeMap<Residue, u64>) -> String {
    histogram
        .iter()
        .map(|(r, c)| format!("{r}:{c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> CliResult<Status> {
    if args.n_min < 3 || args.n_min > args.n_max {
        return Err(CliError::invalid(format!(
            "bad range: need 3 <= n-min <= n-max, got {}..={}",
            args.n_min, args.n_max
        )));
    }
    if args.n_max > DEFAULT_MAX_VERIFY_N && !args.allow_large {
        return Err(CliError::invalid(format!(
            "n-max {} exceeds {DEFAULT_MAX_VERIFY_N}; pass --allow-large to run it",
            args.n_max
        )));
    }

    let mut csv_writer = None;
    if args.format == Format::Csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "residue", "count"])?;
        csv_writer = Some(w);
    }

    let mut falsified = false;
    for n in args.n_min..=args.n_max {
        let report: VerificationReport = cross_check(n, args.policy, args.budget)?;
        falsified |= !report.mismatches.is_empty();
        match args.format {
            Format::Text => {
                writeln!(
                    out,
                    "n={} total={} successful={} mismatches={} terminal_residue={} histogram={} elapsed_ms={}",
                    report.n,
                    report.total_configs,
                    report.successful_count,
                    report.mismatches.len(),
                    terminal_invariant(n)?,
                    histogram_text(&report.residue_histogram),
                    report.elapsed_ms
                )?;
                for m in &report.mismatches {
                    writeln!(
                        out,
                        "  mismatch {} invariant={:?} simulation={:?} reverse_bfs={}",
                        m.config, m.invariant, m.simulation, m.reverse_bfs
                    )?;
                }
            }
            Format::Json => json_line(out, &report)?,
            Format::Csv => {
                let w = csv_writer.as_mut().expect("csv writer");
                for (r, c) in &report.residue_histogram {
                    w.write_record([n.to_string(), r.to_string(), c.to_string()])?;
                }
            }
        }
        out.flush()?;
    }
    if let Some(w) = csv_writer {
        let bytes = w.into_inner().map_err(|e| CliError::from(e.into_error()))?;
        out.write_all(&bytes)?;
    }

    if falsified {
        eprintln!("sandpile: the three methods disagree on at least one configuration");
        Ok(Status::Falsified)
    } else {
        Ok(Status::Success)
    }
}

fn histogram(args: HistogramArgs, out: &mut dyn Write) -> CliResult<Status> {
    let histogram = residue_histogram(args.n, args.k)?;
    let terminal_residue = if u64::from(args.k) == args.n as u64 {
        Some(terminal_invariant(args.n)?)
    } else {
        None
    };
    match args.format {
        Format::Text => {
            writeln!(out, "{}", histogram_text(&histogram))?;
            if let Some(r) = terminal_residue {
                writeln!(out, "terminal residue {r}")?;
            }
        }
        Format::Json => json_line(
            out,
            &HistogramRecord {
                n: args.n,
                k: args.k,
                residue_histogram: histogram,
                terminal_residue,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["residue", "count"])?;
            for (r, c) in &histogram {
                w.write_record([r.to_string(), c.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(Status::Success)
}
