mod boundary;
mod focus;
mod kappa;
mod nonrad;

use nfkit::{ArrayGeometry, ArrayKind, Position3};

use crate::config::{Defaults, Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{to_json, Table, TableDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fraunhofer,
    Coverage,
    FocusProfile,
    FocusSolve,
    Kappa,
    Nonrad,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fraunhofer => "fraunhofer",
            Command::Coverage => "coverage",
            Command::FocusProfile => "focus-profile",
            Command::FocusSolve => "focus-solve",
            Command::Kappa => "kappa",
            Command::Nonrad => "nonrad",
        }
    }

    pub fn defaults(&self) -> Defaults {
        let base = Defaults::default();
        match self {
            Command::Fraunhofer => Defaults { n: "1,5,40", sweep: Some("0:180:361"), ..base },
            Command::Coverage => Defaults { frequencies: "2.8e9,28e9", sweep: Some("0:300:301"), ..base },
            Command::FocusProfile => Defaults { n: "40,120,500", ..base },
            Command::FocusSolve => Defaults { n: "130,150,200", targets: "4", ..base },
            Command::Kappa => Defaults { n: "101,401,1601", ..base },
            Command::Nonrad => Defaults { n: "1,3,5,7,9", ..base },
        }
    }
}

/// Rendered output: the main document plus an optional side summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub main: String,
    pub summary: Option<String>,
}

pub fn execute(command: Command, cfg: &RunConfig) -> CliResult<Rendered> {
    match command {
        Command::Fraunhofer => table_output(command, cfg, boundary::fraunhofer(cfg)?),
        Command::Coverage => table_output(command, cfg, boundary::coverage(cfg)?),
        Command::FocusProfile => focus::profile(cfg),
        Command::FocusSolve => focus::solve(cfg),
        Command::Kappa => table_output(command, cfg, kappa::kappa(cfg)?),
        Command::Nonrad => table_output(command, cfg, nonrad::nonrad(cfg)?),
    }
}

fn table_output(command: Command, cfg: &RunConfig, table: Table) -> CliResult<Rendered> {
    if cfg.summary.is_some() {
        return Err(CliError::config(format!("`output.summary` does not apply to {}", command.name())));
    }
    let main = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&TableDocument { command: command.name(), table: &table })?,
    };
    Ok(Rendered { main, summary: None })
}

/// The configured array for `n` elements per side at `wavelength`.
fn geometry(cfg: &RunConfig, n: usize, wavelength: f64) -> CliResult<ArrayGeometry> {
    let spacing = cfg.spacing_wl * wavelength;
    let g = match cfg.kind {
        ArrayKind::Ula => ArrayGeometry::ula(n, spacing, wavelength)?,
        ArrayKind::Upa => ArrayGeometry::upa(n, cfg.n2.unwrap_or(n), spacing, wavelength)?,
    };
    Ok(if cfg.offset_z_m == 0.0 { g } else { g.translated(Position3::new(0.0, 0.0, cfg.offset_z_m)) })
}

/// Polar and azimuth angles of the configured direction, radians.
fn direction(cfg: &RunConfig) -> CliResult<(f64, f64)> {
    if !(0.0..=180.0).contains(&cfg.theta_deg) {
        return Err(CliError::config(format!("`focus.theta_deg` must lie in [0, 180], got {}", cfg.theta_deg)));
    }
    if !(0.0..360.0).contains(&cfg.phi_deg) {
        return Err(CliError::config(format!("`focus.phi_deg` must lie in [0, 360), got {}", cfg.phi_deg)));
    }
    Ok((cfg.theta_deg.to_radians(), cfg.phi_deg.to_radians()))
}
