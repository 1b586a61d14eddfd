//! Fraunhofer-boundary tables: distance versus angle and ground coverage
//! versus mounting height.

use std::f64::consts::PI;

use nfkit::fraunhofer::{coverage_distance, fraunhofer_array, fraunhofer_single};
use nfkit::wavelength_from_frequency;
use rayon::prelude::*;

use super::geometry;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

pub fn fraunhofer(cfg: &RunConfig) -> CliResult<Table> {
    let lambda = wavelength_from_frequency(cfg.single_frequency()?);
    let thetas = cfg.sweep.expect("fraunhofer has a default sweep").values();
    if let Some(t) = thetas.iter().find(|t| !(0.0..=180.0).contains(*t)) {
        return Err(CliError::config(format!("theta sweep must stay within [0, 180] degrees, got {t}")));
    }

    let mut table = Table::new(&["n", "theta_deg", "dF_over_lambda", "branch"]);
    for &n in &cfg.n {
        let g = geometry(cfg, n, lambda)?;
        let rows = thetas
            .par_iter()
            .map(|&deg| -> CliResult<Vec<Cell>> {
                let theta = deg.to_radians().min(PI);
                let (distance, branch) = if g.len() == 1 {
                    // a lone element is treated as an aperture of one spacing
                    (fraunhofer_single(g.spacing(), lambda, theta), "SINGLE")
                } else {
                    let r = fraunhofer_array(g.aperture_diameter(), lambda, theta)?;
                    (r.distance, r.branch.label())
                };
                Ok(vec![n.into(), deg.into(), (distance / lambda).into(), branch.into()])
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.into_iter().for_each(|r| table.push(r));
    }
    Ok(table)
}

pub fn coverage(cfg: &RunConfig) -> CliResult<Table> {
    let heights = cfg.sweep.expect("coverage has a default sweep").values();
    if let Some(h) = heights.iter().find(|h| **h < 0.0) {
        return Err(CliError::config(format!("mounting heights must be >= 0, got {h}")));
    }
    let mut table = Table::new(&["f_hz", "aperture_m", "h_m", "dbar_m"]);
    for &f in &cfg.frequencies_hz {
        let lambda = wavelength_from_frequency(f);
        for &(w, h) in &cfg.apertures_m {
            let label = format!("{}x{}", crate::output::format_number(w), crate::output::format_number(h));
            let diagonal = w.hypot(h);
            let rows = heights
                .par_iter()
                .map(|&height| -> CliResult<Vec<Cell>> {
                    let dbar = coverage_distance(height, diagonal, lambda)?;
                    Ok(vec![f.into(), label.as_str().into(), height.into(), dbar.into()])
                })
                .collect::<CliResult<Vec<_>>>()?;
            rows.into_iter().for_each(|r| table.push(r));
        }
    }
    Ok(table)
}
