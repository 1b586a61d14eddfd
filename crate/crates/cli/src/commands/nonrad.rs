//! Non-radiating distance of dipole arrays.
//!
//! Without a sweep the table lists `d^NR/λ` for every combination of dipole
//! length, element count and phase pattern. With a sweep over `r/λ` it lists
//! the active and reactive power densities along the plane instead.

use nfkit::dipole::{nonradiating_distance_with, poynting_with, DipoleArraySpec, NonRadiatingOptions};
use nfkit::quadrature::QuadratureOptions;
use nfkit::wavelength_from_frequency;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

pub fn nonrad(cfg: &RunConfig) -> CliResult<Table> {
    let lambda = wavelength_from_frequency(cfg.single_frequency()?);
    let quadrature = QuadratureOptions::with_rel_tol(cfg.rel_tol);

    let mut specs = Vec::new();
    for &ds in &cfg.ds_wl {
        for &n in &cfg.n {
            for &p in &cfg.patterns {
                let spec = DipoleArraySpec::new(n, ds * lambda, cfg.spacing_wl * lambda, lambda, p)?;
                specs.push((ds, n, p, spec));
            }
        }
    }

    let Some(sweep) = cfg.sweep else {
        let opts = NonRadiatingOptions { quadrature, ..NonRadiatingOptions::default() };
        let rows = specs
            .par_iter()
            .map(|(ds, n, p, spec)| -> CliResult<Vec<Cell>> {
                let d = nonradiating_distance_with(spec, opts)?;
                Ok(vec![(*ds).into(), (*n).into(), p.label().into(), (d.distance / lambda).into()])
            })
            .collect::<CliResult<Vec<_>>>()?;
        let mut table = Table::new(&["ds_over_lambda", "n", "phase_pattern", "dnr_over_lambda"]);
        rows.into_iter().for_each(|r| table.push(r));
        return Ok(table);
    };

    let radii = sweep.values();
    if let Some(r) = radii.iter().find(|r| **r <= 0.0) {
        return Err(CliError::config(format!("r/λ sweep must stay positive, got {r}")));
    }
    let jobs: Vec<_> = specs.iter().flat_map(|s| radii.iter().map(move |&r| (s, r))).collect();
    let rows = jobs
        .par_iter()
        .map(|((ds, n, p, spec), r)| -> CliResult<Vec<Cell>> {
            let pd = poynting_with(spec, r * lambda, quadrature)?;
            Ok(vec![
                (*ds).into(),
                (*n).into(),
                p.label().into(),
                (*r).into(),
                pd.active_mag.into(),
                pd.reactive_mag.into(),
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut table =
        Table::new(&["ds_over_lambda", "n", "phase_pattern", "r_over_lambda", "active_mag", "reactive_mag"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}
