//! Command-line front end of the levitation toolkit.
//!
//! Exit codes: 0 success, 1 invalid input (the message names the key),
//! 2 numerical failure (the core error is printed verbatim).

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

pub use error::CliError;
pub use report::{Cell, Report, Table, REPORT_SCHEMA};
pub use scenario::Scenario;

/// JSON Schema of the scenario document.
pub const SCENARIO_SCHEMA_JSON: &str = include_str!("../schema/scenario.schema.json");
/// JSON Schema of the structured report.
pub const REPORT_SCHEMA_JSON: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemaKind {
    Scenario,
    Report,
}

#[derive(Debug, Parser)]
#[command(name = "maglev", version, about = "Design and analysis of magnetically levitated superconducting spheres")]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Directory receiving one CSV per table and a JSON report.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Rendering on standard output when no output directory is given.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Master seed of stochastic commands; overrides the scenario.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Print the physical constants (appended to a command's report).
    #[arg(long, global = true)]
    pub constants: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trap frequencies from the gradients and sphere density.
    Frequencies,
    /// Single-turn coupling: closed form against flux quadrature.
    Coupling,
    /// Planar spiral pickup minimising the position noise.
    OptimizePickup,
    /// Stage frequencies, normal modes and transmissibility of a stack.
    Isolation,
    /// Sensing, vibration and ground-state noise budgets.
    Budget,
    /// Response of the RL low-pass filter.
    Filter,
    /// Langevin simulation of the oscillator.
    Simulate {
        /// Run the `[sim.sweep]` values concurrently with split seeds.
        #[arg(long)]
        sweep: bool,
    },
    /// Spectral and ringdown analysis of a recorded series.
    Analyze {
        /// Series CSV; overrides `analysis.input`.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
    /// Print a published JSON schema.
    Schema {
        #[arg(value_enum)]
        kind: SchemaKind,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Frequencies => "frequencies",
            Command::Coupling => "coupling",
            Command::OptimizePickup => "optimize-pickup",
            Command::Isolation => "isolation",
            Command::Budget => "budget",
            Command::Filter => "filter",
            Command::Simulate { .. } => "simulate",
            Command::Analyze { .. } => "analyze",
            Command::Schema { .. } => "schema",
        }
    }
}

struct Loaded {
    scenario: Scenario,
    digest: Option<String>,
    dir: PathBuf,
}

fn load(path: Option<&Path>) -> Result<Loaded, CliError> {
    let Some(path) = path else {
        return Ok(Loaded {
            scenario: Scenario::default(),
            digest: None,
            dir: PathBuf::from("."),
        });
    };
    let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Validation(format!("{}: scenario is not UTF-8", path.display())))?;
    let scenario = Scenario::parse(&text)?;
    let digest = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded {
        scenario,
        digest: Some(digest),
        dir: path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")),
    })
}

/// Builds the report of one invocation without touching the file system
/// beyond reading inputs.
pub fn build_report(cli: &Cli) -> Result<Report, CliError> {
    let Some(command) = &cli.command else {
        if cli.constants {
            let mut r = Report::new("constants");
            r.tables.push(commands::constants_table());
            return Ok(r);
        }
        return Err(CliError::Validation("no command given (see --help)".into()));
    };
    let loaded = load(cli.scenario.as_deref())?;
    let sc = &loaded.scenario;
    let mut report = match command {
        Command::Frequencies => commands::frequencies(sc)?,
        Command::Coupling => commands::coupling(sc)?,
        Command::OptimizePickup => commands::optimize(sc)?,
        Command::Isolation => commands::isolation(sc)?,
        Command::Budget => commands::budget(sc)?,
        Command::Filter => commands::filter(sc)?,
        Command::Simulate { sweep } => commands::simulate_cmd(sc, commands::resolve_seed(sc, cli.seed), *sweep)?,
        Command::Analyze { input } => {
            let path = match input {
                Some(p) => p.clone(),
                None => {
                    let a = Scenario::require(&sc.analysis, "analysis")?;
                    let p = a
                        .input
                        .clone()
                        .ok_or_else(|| CliError::Validation("analysis.input: give a series path or --input".into()))?;
                    if p.is_relative() {
                        loaded.dir.join(p)
                    } else {
                        p
                    }
                }
            };
            commands::analyze(sc, &path)?
        }
        Command::Schema { .. } => unreachable!("schema output is not a report"),
    };
    report.scenario_sha256 = loaded.digest;
    if cli.constants {
        report.tables.push(commands::constants_table());
    }
    Ok(report)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `<dir>/<table>.csv` for every table and `<dir>/<command>.json`; returns
/// the written paths.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::with_capacity(report.tables.len() + 1);
    for t in &report.tables {
        let p = dir.join(format!("{}.csv", t.name));
        write_atomic(&p, &t.to_csv())?;
        written.push(p);
    }
    let p = dir.join(format!("{}.json", report.command));
    write_atomic(&p, &report.to_json())?;
    written.push(p);
    Ok(written)
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("stdout: {e}"));
    if let Some(Command::Schema { kind }) = &cli.command {
        let text = match kind {
            SchemaKind::Scenario => SCENARIO_SCHEMA_JSON,
            SchemaKind::Report => REPORT_SCHEMA_JSON,
        };
        return stdout.write_all(text.as_bytes()).map_err(io);
    }
    let report = build_report(cli)?;
    match &cli.out {
        Some(dir) => {
            for p in write_outputs(&report, dir)? {
                writeln!(stdout, "{}", p.display()).map_err(io)?;
            }
        }
        None => {
            let text = match cli.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            };
            stdout.write_all(text.as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "maglev: {e}");
            e.exit_code()
        }
    }
}
