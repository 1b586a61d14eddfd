//! Command-line front end for `nfkit`.
//!
//! Each subcommand writes one data set (CSV or JSON) describing a near-field
//! region. Shared physical parameters come from a `key = value` config file
//! and may be overridden by flags. The environment variable `NFKIT_THREADS`
//! caps the worker threads used for sweeps.
//!
//! Exit codes: 0 success, 2 config error, 3 infeasible request, 4 numeric
//! failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{execute, Command};
use config::{RawConfig, RunConfig};
use error::{CliError, CliResult};

pub const THREADS_ENV: &str = "NFKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "nfkit", version, about = "Near-field regions of phased arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    /// Configuration file with `[section]` headers and `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Carrier frequency in Hz (comma list for coverage).
    #[arg(long, global = true, value_name = "HZ")]
    pub freq: Option<String>,

    /// Elements per side, comma list.
    #[arg(long, global = true, value_name = "N")]
    pub n: Option<String>,

    /// Array kind: ula or upa.
    #[arg(long, global = true, value_name = "KIND")]
    pub kind: Option<String>,

    /// Element spacing in wavelengths.
    #[arg(long = "spacing-wl", global = true, value_name = "X")]
    pub spacing_wl: Option<String>,

    /// Channel model: usw, nusw or gnc.
    #[arg(long, global = true, value_name = "MODEL")]
    pub model: Option<String>,

    /// Target radius in meters (comma list superposes targets).
    #[arg(long, global = true, value_name = "M")]
    pub target: Option<String>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,

    /// JSON summary file for focus-profile in CSV mode.
    #[arg(long, global = true, value_name = "PATH")]
    pub summary: Option<String>,

    /// Output format: csv or json.
    #[arg(long, global = true, value_name = "FMT")]
    pub format: Option<String>,

    /// Swept variable as START:STOP:COUNT.
    #[arg(long, global = true, value_name = "START:STOP:COUNT")]
    pub sweep: Option<String>,

    /// Any config key, as section.key=value; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Sub {
    /// Fraunhofer distance per wavelength versus observation angle.
    Fraunhofer,
    /// Ground coverage distance of the Fraunhofer region versus mounting height.
    Coverage,
    /// Normalized radial amplitude under MRT, with focal-point summary.
    FocusProfile,
    /// Iterative search placing a focal point at the requested radius.
    FocusSolve,
    /// Off-target amplitude ratio under MRT versus array size.
    Kappa,
    /// Non-radiating distance of dipole arrays.
    Nonrad,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Fraunhofer => Command::Fraunhofer,
            Sub::Coverage => Command::Coverage,
            Sub::FocusProfile => Command::FocusProfile,
            Sub::FocusSolve => Command::FocusSolve,
            Sub::Kappa => Command::Kappa,
            Sub::Nonrad => Command::Nonrad,
        }
    }
}

impl Cli {
    /// File values with every flag applied on top.
    pub fn raw_config(&self) -> CliResult<RawConfig> {
        let mut raw = match &self.config {
            Some(p) => RawConfig::load(p)?,
            None => RawConfig::default(),
        };
        let flags = [
            ("physics.frequency_hz", &self.freq),
            ("array.n", &self.n),
            ("array.kind", &self.kind),
            ("array.spacing_wl", &self.spacing_wl),
            ("physics.model", &self.model),
            ("focus.target_m", &self.target),
            ("output.path", &self.out),
            ("output.summary", &self.summary),
            ("output.format", &self.format),
            ("sweep.range", &self.sweep),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("--set expects KEY=VALUE, got `{pair}`")))?;
            raw.set(k.trim(), v)?;
        }
        Ok(raw)
    }
}

/// Worker-thread cap from `NFKIT_THREADS`; `None` leaves rayon's default.
pub fn thread_cap(value: Option<&str>) -> CliResult<Option<usize>> {
    let Some(v) = value else { return Ok(None) };
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some(n)),
        _ => Err(CliError::config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
    }
}

fn run_parsed(cli: &Cli) -> CliResult<()> {
    let command = Command::from(cli.command);
    let cfg = RunConfig::resolve(&cli.raw_config()?, &command.defaults())?;
    let threads = thread_cap(std::env::var(THREADS_ENV).ok().as_deref())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Numeric(format!("cannot start worker threads: {e}")))?;
    let rendered = pool.install(|| execute(command, &cfg))?;
    output::emit(cfg.out.as_deref(), &rendered.main)?;
    if let (Some(path), Some(text)) = (&cfg.summary, &rendered.summary) {
        output::emit(Some(path), text)?;
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("nfkit: {e}");
            e.exit_code()
        }
    }
}
