//! Radial beamfocusing: profiles under MRT and the focal-placement search.

use nfkit::focus::{
    algorithm1_focus, amplitude, analyze_profile, dominant_below, focal_depth_3db, mrt, multi_focal_mrt,
    Algorithm1Options, ScanWindow,
};
use nfkit::{wavelength_from_frequency, ArrayGeometry, ChannelModel, SphericalPoint};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{direction, geometry, Rendered};
use crate::config::{Format, ModelName, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{to_json, Table};

#[derive(Debug, Serialize)]
struct Window {
    r_min_m: f64,
    r_max_m: f64,
    points: usize,
}

#[derive(Debug, Serialize)]
struct TargetSummary {
    target_m: f64,
    target_amplitude: f64,
    dominant_focal_m: Option<f64>,
    gap_m: Option<f64>,
    depth_3db_lo_m: Option<f64>,
    depth_3db_hi_m: Option<f64>,
    half_depth_m: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ProfileRun {
    n: usize,
    model: &'static str,
    peak_radius_m: f64,
    focal_radii_m: Vec<f64>,
    targets: Vec<TargetSummary>,
}

/// Flags a USW run whose peak sits outside the NUSW focal half-depth.
#[derive(Debug, Serialize)]
struct Divergence {
    n: usize,
    usw_peak_m: f64,
    nusw_peak_m: f64,
    nusw_half_depth_m: Option<f64>,
    diverges: bool,
}

#[derive(Debug, Serialize)]
struct ProfileData {
    n: usize,
    model: &'static str,
    r_m: Vec<f64>,
    mag_norm: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ProfileDocument {
    command: &'static str,
    frequency_hz: f64,
    theta_deg: f64,
    phi_deg: f64,
    targets_m: Vec<f64>,
    window: Window,
    runs: Vec<ProfileRun>,
    usw_divergence: Vec<Divergence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profiles: Option<Vec<ProfileData>>,
}

fn scan_window(cfg: &RunConfig) -> CliResult<ScanWindow> {
    match cfg.sweep {
        Some(s) if s.start > 0.0 && s.stop > s.start && s.count >= 3 => {
            Ok(ScanWindow { r_min: s.start, r_max: s.stop, n_points: s.count })
        }
        Some(_) => Err(CliError::config("radial sweep needs 0 < START < STOP and COUNT >= 3")),
        None => {
            let far = cfg.targets_m.iter().copied().fold(0.0, f64::max);
            Ok(ScanWindow::around(far))
        }
    }
}

fn focus_weights(g: &ArrayGeometry, targets: &[SphericalPoint]) -> CliResult<Vec<Complex64>> {
    Ok(match targets {
        [t] => mrt(g, t)?.weights().to_vec(),
        _ => multi_focal_mrt(g, targets)?,
    })
}

fn summarize_run(
    name: ModelName,
    g: &ArrayGeometry,
    weights: &[Complex64],
    targets: &[SphericalPoint],
    window: ScanWindow,
) -> CliResult<(ProfileRun, ProfileData)> {
    let model = &name.channel();
    let (theta, phi) = (targets[0].theta, targets[0].phi);
    let (profile, report) = analyze_profile(model, g, theta, phi, weights, None, window)?;
    let summaries = targets
        .iter()
        .map(|t| -> CliResult<TargetSummary> {
            let target_amplitude = amplitude(model, g, t, weights)?;
            let dominant = dominant_below(&report.focal_points, t.r, target_amplitude);
            let depth = dominant.map(|f| focal_depth_3db(&profile, &f)).transpose()?;
            Ok(TargetSummary {
                target_m: t.r,
                target_amplitude,
                dominant_focal_m: dominant.map(|f| f.radius),
                gap_m: dominant.map(|f| t.r - f.radius),
                depth_3db_lo_m: depth.and_then(|d| d.lo),
                depth_3db_hi_m: depth.and_then(|d| d.hi),
                half_depth_m: dominant.zip(depth).and_then(|(f, d)| d.half_depth(f.radius)),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let (imax, _) = profile
        .magnitudes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| CliError::Numeric("empty radial profile".into()))?;
    let run = ProfileRun {
        n: g.n1(),
        model: name.label(),
        peak_radius_m: profile.radii[imax],
        focal_radii_m: report.focal_radii(),
        targets: summaries,
    };
    let data = ProfileData { n: g.n1(), model: name.label(), mag_norm: profile.normalized(), r_m: profile.radii };
    Ok((run, data))
}

fn divergences(runs: &[ProfileRun]) -> Vec<Divergence> {
    let peak = |r: &ProfileRun| r.targets[0].dominant_focal_m.unwrap_or(r.peak_radius_m);
    let mut out = Vec::new();
    for nusw in runs.iter().filter(|r| r.model == ModelName::Nusw.label()) {
        let Some(usw) = runs.iter().find(|r| r.model == ModelName::Usw.label() && r.n == nusw.n) else {
            continue;
        };
        let half = nusw.targets[0].half_depth_m;
        let offset = (peak(usw) - peak(nusw)).abs();
        out.push(Divergence {
            n: nusw.n,
            usw_peak_m: peak(usw),
            nusw_peak_m: peak(nusw),
            nusw_half_depth_m: half,
            diverges: half.is_some_and(|h| offset > h),
        });
    }
    out
}

pub fn profile(cfg: &RunConfig) -> CliResult<Rendered> {
    let frequency_hz = cfg.single_frequency()?;
    let lambda = wavelength_from_frequency(frequency_hz);
    let (theta, phi) = direction(cfg)?;
    let targets =
        cfg.targets_m.iter().map(|&r| SphericalPoint::new(r, theta, phi)).collect::<nfkit::Result<Vec<_>>>()?;
    let window = scan_window(cfg)?;

    let mut runs = Vec::new();
    let mut data = Vec::new();
    for &n in &cfg.n {
        let g = geometry(cfg, n, lambda)?;
        let weights = focus_weights(&g, &targets)?;
        for &model in &cfg.models {
            let (run, d) = summarize_run(model, &g, &weights, &targets, window)?;
            runs.push(run);
            data.push(d);
        }
    }

    let mut doc = ProfileDocument {
        command: "focus-profile",
        frequency_hz,
        theta_deg: cfg.theta_deg,
        phi_deg: cfg.phi_deg,
        targets_m: cfg.targets_m.clone(),
        window: Window { r_min_m: window.r_min, r_max_m: window.r_max, points: window.n_points },
        usw_divergence: divergences(&runs),
        runs,
        profiles: None,
    };
    match cfg.format {
        Format::Json => {
            if cfg.summary.is_some() {
                return Err(CliError::config("`output.summary` only applies to CSV output"));
            }
            doc.profiles = Some(data);
            Ok(Rendered { main: to_json(&doc)?, summary: None })
        }
        Format::Csv => {
            let mut table = Table::new(&["n", "model", "r_m", "mag_norm"]);
            for d in &data {
                for (r, m) in d.r_m.iter().zip(&d.mag_norm) {
                    table.push(vec![d.n.into(), d.model.into(), (*r).into(), (*m).into()]);
                }
            }
            let summary = cfg.summary.as_ref().map(|_| to_json(&doc)).transpose()?;
            Ok(Rendered { main: table.to_csv(), summary })
        }
    }
}

#[derive(Debug, Serialize)]
struct TraceStep {
    k: usize,
    r_bar_m: f64,
    y_hat: f64,
    slope: f64,
    focal_estimate_m: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SolveRun {
    n: usize,
    r_bar_star_m: f64,
    loop_iterations: usize,
    achieved_focal_m: Option<f64>,
    within_tolerance: bool,
    trace: Vec<TraceStep>,
    phases_deg: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SolveDocument {
    command: &'static str,
    frequency_hz: f64,
    model: &'static str,
    theta_deg: f64,
    phi_deg: f64,
    focal_radius_m: f64,
    tolerance_m: f64,
    runs: Vec<SolveRun>,
}

/// Dominant focal radius produced by `weights` aimed at `aim`.
fn achieved_focus(
    model: &ChannelModel,
    g: &ArrayGeometry,
    aim: &SphericalPoint,
    weights: &[Complex64],
) -> CliResult<Option<f64>> {
    let (_, report) =
        analyze_profile(model, g, aim.theta, aim.phi, weights, Some(aim.r), ScanWindow::around(aim.r))?;
    Ok(report.dominant_focal())
}

fn solve_one(cfg: &RunConfig, model: &ChannelModel, g: &ArrayGeometry, focal: &SphericalPoint) -> CliResult<SolveRun> {
    let opts = Algorithm1Options { epsilon: cfg.epsilon, ..Algorithm1Options::default() };
    let outcome = algorithm1_focus(model, g, focal, opts)?;
    let trace = outcome
        .trace
        .par_iter()
        .map(|s| -> CliResult<TraceStep> {
            let aim = focal.with_radius(s.r_bar);
            let estimate = achieved_focus(model, g, &aim, mrt(g, &aim)?.weights())?;
            Ok(TraceStep { k: s.k, r_bar_m: s.r_bar, y_hat: s.y_hat, slope: s.slope, focal_estimate_m: estimate })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let aim = focal.with_radius(outcome.r_bar_star);
    let achieved = achieved_focus(model, g, &aim, outcome.beamformer.weights())?;
    Ok(SolveRun {
        n: g.n1(),
        r_bar_star_m: outcome.r_bar_star,
        loop_iterations: outcome.loop_iterations,
        achieved_focal_m: achieved,
        within_tolerance: achieved.is_some_and(|a| (a - focal.r).abs() <= cfg.tolerance_m),
        trace,
        phases_deg: outcome.beamformer.phases().iter().map(|p| p.to_degrees()).collect(),
    })
}

pub fn solve(cfg: &RunConfig) -> CliResult<Rendered> {
    if cfg.sweep.is_some() {
        return Err(CliError::config("focus-solve takes no sweep"));
    }
    if cfg.summary.is_some() {
        return Err(CliError::config("`output.summary` does not apply to focus-solve"));
    }
    let frequency_hz = cfg.single_frequency()?;
    let lambda = wavelength_from_frequency(frequency_hz);
    let model_name = cfg.single_model()?;
    let model = model_name.channel();
    let (theta, phi) = direction(cfg)?;
    let [rf] = cfg.targets_m[..] else {
        return Err(CliError::config("focus-solve takes a single focal radius"));
    };
    let focal = SphericalPoint::new(rf, theta, phi)?;

    let runs = cfg
        .n
        .iter()
        .map(|&n| solve_one(cfg, &model, &geometry(cfg, n, lambda)?, &focal))
        .collect::<CliResult<Vec<_>>>()?;

    let main = match cfg.format {
        Format::Json => to_json(&SolveDocument {
            command: "focus-solve",
            frequency_hz,
            model: model_name.label(),
            theta_deg: cfg.theta_deg,
            phi_deg: cfg.phi_deg,
            focal_radius_m: rf,
            tolerance_m: cfg.tolerance_m,
            runs,
        })?,
        Format::Csv => {
            let mut table = Table::new(&["n", "k", "r_bar_m", "y_hat", "slope", "focal_estimate_m"]);
            for run in &runs {
                for s in &run.trace {
                    table.push(vec![
                        run.n.into(),
                        s.k.into(),
                        s.r_bar_m.into(),
                        s.y_hat.into(),
                        s.slope.into(),
                        s.focal_estimate_m.into(),
                    ]);
                }
            }
            table.to_csv()
        }
    };
    Ok(Rendered { main, summary: None })
}
