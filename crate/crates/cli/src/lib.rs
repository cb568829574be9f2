//! Command-line front-end: reads a system description, runs the analysis and
//! writes a JSON report.

pub mod commands;
pub mod report;
pub mod spec;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use quadint::{catalog, Error, Mode, QuadraticSystem, SpectralOptions};
use thiserror::Error as ThisError;

use crate::report::{Report, Settings, Timing};
use crate::spec::{ModeOpt, SystemSpec};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("unsupported structure: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoBalance
            | Error::NotDiagonalizable
            | Error::MissingTrivialExponent
            | Error::TooFewBalances(_)
            | Error::TrivialPlanarExponent => CliError::Unsupported(e.to_string()),
            Error::Parse(_)
            | Error::IndexOutOfRange { .. }
            | Error::NotQuadratic
            | Error::DimensionMismatch { .. } => CliError::Validation(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quadint", version, about = "Polynomial first integrals of quadratic homogeneous ODE systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Balances, exponents, admissible degrees, base functions and integrals.
    Analyze(Common),
    /// Complete classification of a planar system.
    Planar(Common),
    /// Brute-force integral and symmetry-field searches.
    Oracle(Common),
    /// Exact and numerical conservation check of a polynomial.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON system description; `-` reads standard input.
    pub spec: Option<PathBuf>,
    /// Built-in system instead of a file.
    #[arg(long, value_parser = ["halphen", "tsy512"])]
    pub example: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeOpt>,
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Balance residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Newton multi-start count for n ≥ 3.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Polynomial in x1..xn.
    #[arg(long)]
    pub poly: String,
    /// Initial point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x0: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

pub const DEFAULT_MAX_DEGREE: u32 = 12;

/// A validated system together with the effective run settings.
pub struct Job {
    pub spec: SystemSpec,
    pub system: QuadraticSystem,
    pub max_degree: u32,
    pub options: SpectralOptions,
}

impl Job {
    pub fn mode(&self) -> Mode {
        self.options.mode
    }

    fn settings(&self) -> Settings {
        Settings {
            mode: self.options.mode.to_string(),
            max_degree: self.max_degree,
            seed: self.options.seed,
            starts: self.options.starts,
            residual_tol: self.options.residual_tol,
        }
    }

    pub fn empty_report(&self, command: &str) -> Report {
        Report {
            command: command.to_string(),
            spec: self.spec.clone(),
            settings: self.settings(),
            fields: self
                .system
                .fields()
                .iter()
                .enumerate()
                .map(|(i, f)| format!("dx{}/dt = {f}", i + 1))
                .collect(),
            balances: Vec::new(),
            admissible_degrees: None,
            symmetry_degrees: None,
            degrees: Vec::new(),
            cross_check: Vec::new(),
            planar: None,
            oracle: None,
            verify: None,
            verdict: String::new(),
            timing: None,
        }
    }
}

fn read_spec(common: &Common) -> Result<SystemSpec, CliError> {
    match (&common.example, &common.spec) {
        (Some(_), Some(_)) => Err(CliError::Validation("give either a spec file or --example, not both".into())),
        (Some(name), None) => Ok(match name.as_str() {
            "halphen" => SystemSpec::from_system(&catalog::halphen()),
            "tsy512" => SystemSpec::from_system(&catalog::tsy512()),
            other => return Err(CliError::Validation(format!("unknown example `{other}`"))),
        }),
        (None, Some(path)) => {
            let text = if path.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin())
            } else {
                std::fs::read_to_string(path)
            }
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            SystemSpec::from_json(&text)
        }
        (None, None) => Err(CliError::Validation("no spec file or --example given".into())),
    }
}

/// Validates the input and merges flags over the spec's own options.
pub fn prepare(common: &Common) -> Result<Job, CliError> {
    let raw = read_spec(common)?;
    let spec = raw.canonical()?;
    let mut effective = spec.clone();
    if let Some(m) = common.mode {
        effective.options.mode = Some(m);
    }
    let system = effective.to_system()?;
    let o = spec.options.clone();
    let defaults = SpectralOptions::default();
    let options = SpectralOptions {
        mode: effective.mode(),
        starts: common.starts.or(o.starts).unwrap_or(defaults.starts),
        seed: common.seed.or(o.seed).unwrap_or(defaults.seed),
        residual_tol: common.tol.or(o.residual_tol).unwrap_or(defaults.residual_tol),
        dedup_tol: o.dedup_tol.unwrap_or(defaults.dedup_tol),
        ..defaults
    };
    if options.starts == 0 {
        return Err(CliError::Validation("--starts must be positive".into()));
    }
    if options.residual_tol.is_nan() || options.residual_tol <= 0.0 {
        return Err(CliError::Validation("--tol must be positive".into()));
    }
    Ok(Job {
        spec,
        system,
        max_degree: common.max_degree.or(o.max_degree).unwrap_or(DEFAULT_MAX_DEGREE),
        options,
    })
}

pub fn execute(command: &Command) -> Result<Report, CliError> {
    let started = std::time::Instant::now();
    let common = match command {
        Command::Analyze(c) | Command::Planar(c) | Command::Oracle(c) => c,
        Command::Verify(v) => &v.common,
    };
    let job = prepare(common)?;
    let mut report = match command {
        Command::Analyze(_) => commands::analyze(&job)?,
        Command::Planar(_) => commands::planar(&job)?,
        Command::Oracle(_) => commands::oracle(&job)?,
        Command::Verify(v) => commands::verify(&job, v)?,
    };
    if common.timing {
        report.timing = Some(Timing {
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(report)
}

pub fn render(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Runs a full command line; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let output = match &cli.command {
        Command::Analyze(c) | Command::Planar(c) | Command::Oracle(c) => c.output.clone(),
        Command::Verify(v) => v.common.output.clone(),
    };
    match execute(&cli.command) {
        Ok(report) => {
            let text = render(&report);
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return 1;
                    }
                }
                None => print!("{text}"),
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
