use nfkit::focus::{kappa_direct, kappa_integral_decomposition};
use nfkit::{wavelength_from_frequency, ArrayKind, SphericalPoint};
use rayon::prelude::*;

use super::{direction, geometry};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

/// Relative agreement expected between the integral estimate and the direct
/// sum once the array is large.
const AGREEMENT: f64 = 0.1;

pub fn kappa(cfg: &RunConfig) -> CliResult<Table> {
    if cfg.sweep.is_some() {
        return Err(CliError::config("kappa takes no sweep; list array sizes with --n"));
    }
    let lambda = wavelength_from_frequency(cfg.single_frequency()?);
    let model = cfg.single_model()?.channel();
    let (theta, phi) = direction(cfg)?;
    let [target_m] = cfg.targets_m[..] else {
        return Err(CliError::config("kappa takes a single target radius"));
    };
    let target = SphericalPoint::new(target_m, theta, phi)?;
    let point = SphericalPoint::new(cfg.kappa_point_m, theta, phi)?;

    let rows = cfg
        .n
        .par_iter()
        .map(|&n| -> CliResult<Vec<Cell>> {
            let g = geometry(cfg, n, lambda)?;
            let direct = kappa_direct(&model, &g, &target, &point)?.kappa;
            let integral = match cfg.kind {
                ArrayKind::Ula if cfg.offset_z_m == 0.0 => {
                    Some(kappa_integral_decomposition(&g, &target, &point)?.kappa_est)
                }
                _ => None,
            };
            let agree = integral.map(|k| (k - direct).abs() <= AGREEMENT * direct);
            Ok(vec![n.into(), direct.into(), integral.into(), agree.into()])
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut table = Table::new(&["n", "kappa_direct", "kappa_integral", "agree_10pct"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}
