//! Radial beamfocusing under MRT.
//!
//! An MRT beamformer aimed at `r̄` maximizes `|y|` at `r̄` among phase-only
//! weights, yet along the radial cut through `r̄` the amplitude keeps rising
//! as the observer moves toward the array, up to a local maximum at `r^f < r̄`.
//! This module scans that radial cut, locates the focal points, the 3dB
//! depth around the dominant one and the focal gap `r̄ - r^f`.

mod algorithm;
mod kappa;

pub use algorithm::{algorithm1_focus, Algorithm1Options, Algorithm1Outcome, Algorithm1Step};
pub use kappa::{kappa_direct, kappa_integral_decomposition, KappaDecomposition, KappaResult};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{received, Beamformer, ChannelModel};
use crate::error::{Error, Result};
use crate::fraunhofer::{fraunhofer_array, max_fraunhofer};
use crate::geometry::{ArrayGeometry, SphericalPoint};

/// Grid size used when no explicit one is requested.
pub const DEFAULT_GRID_POINTS: usize = 2000;

/// Samples between adjacent coarse-grid points when a maximum is refined.
const REFINE_FACTOR: usize = 5;

pub fn mrt(geometry: &ArrayGeometry, target: &SphericalPoint) -> Result<Beamformer> {
    let k = geometry.wavenumber();
    let distances = geometry.element_distances(target);
    let floor = 1e-12 * geometry.wavelength();
    if let Some(element) = distances.iter().position(|&d| d <= floor) {
        return Err(Error::Singularity { element });
    }
    Ok(Beamformer::from_phases(&distances.iter().map(|rn| k * rn).collect::<Vec<_>>()))
}

/// Superposes the MRT vectors of several targets and rescales the result to a
/// largest modulus of one. The weights are no longer phase-only.
pub fn multi_focal_mrt(geometry: &ArrayGeometry, targets: &[SphericalPoint]) -> Result<Vec<Complex64>> {
    if targets.is_empty() {
        return Err(Error::param("at least one focal target is required"));
    }
    let mut sum = vec![Complex64::new(0.0, 0.0); geometry.len()];
    for t in targets {
        for (acc, w) in sum.iter_mut().zip(mrt(geometry, t)?.weights()) {
            *acc += w;
        }
    }
    let peak = sum.iter().map(|w| w.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Numeric("focal targets cancel on every element".into()));
    }
    Ok(sum.into_iter().map(|w| w / peak).collect())
}

/// `|y(r, θ, φ)|` for the given weights.
pub fn amplitude(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    point: &SphericalPoint,
    weights: &[Complex64],
) -> Result<f64> {
    Ok(received(model, geometry, point, weights)?.norm())
}

#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub theta: f64,
    pub phi: f64,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.magnitudes.iter().copied().fold(0.0, f64::max)
    }

    /// Magnitudes divided by the profile maximum.
    pub fn normalized(&self) -> Vec<f64> {
        let peak = self.peak();
        self.magnitudes.iter().map(|m| if peak > 0.0 { m / peak } else { 0.0 }).collect()
    }
}

/// Geometric grid with exact endpoints.
pub fn log_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    let ratio = (r_max / r_min).ln();
    (0..n)
        .map(|i| match i {
            0 => r_min,
            i if i + 1 == n => r_max,
            i => r_min * (ratio * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

fn validate_window(r_min: f64, r_max: f64, n_points: usize) -> Result<()> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::param(format!("radial window must satisfy 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if n_points < 3 {
        return Err(Error::param(format!("a radial profile needs at least 3 points, got {n_points}")));
    }
    Ok(())
}

fn evaluate_radii(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    theta: f64,
    phi: f64,
    weights: &[Complex64],
    radii: &[f64],
) -> Result<Vec<f64>> {
    let direction = SphericalPoint::new(1.0, theta, phi)?;
    radii
        .par_iter()
        .map(|&r| amplitude(model, geometry, &direction.with_radius(r), weights))
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn radial_profile(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    theta: f64,
    phi: f64,
    weights: &[Complex64],
    r_min: f64,
    r_max: f64,
    n_points: usize,
) -> Result<RadialProfile> {
    validate_window(r_min, r_max, n_points)?;
    let radii = log_grid(r_min, r_max, n_points);
    let magnitudes = evaluate_radii(model, geometry, theta, phi, weights, &radii)?;
    Ok(RadialProfile { radii, magnitudes, theta, phi })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalPoint {
    pub radius: f64,
    pub amplitude: f64,
}

/// Vertex of the parabola through three points, clamped to their span.
fn parabolic_peak(x: [f64; 3], y: [f64; 3]) -> FocalPoint {
    let (a, b) = (x[1] - x[0], x[1] - x[2]);
    let (fa, fb) = (y[1] - y[0], y[1] - y[2]);
    let den = a * fb - b * fa;
    if den == 0.0 {
        return FocalPoint { radius: x[1], amplitude: y[1] };
    }
    let shift = 0.5 * (a * a * fb - b * b * fa) / den;
    let radius = (x[1] - shift).clamp(x[0], x[2]);
    // evaluate the interpolating parabola at the vertex
    let l0 = (radius - x[1]) * (radius - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
    let l1 = (radius - x[0]) * (radius - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
    let l2 = (radius - x[0]) * (radius - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
    FocalPoint { radius, amplitude: (y[0] * l0 + y[1] * l1 + y[2] * l2).max(y[1]) }
}

fn interior_maxima(m: &[f64]) -> Vec<usize> {
    (1..m.len().saturating_sub(1)).filter(|&i| m[i] > m[i - 1] && m[i] >= m[i + 1]).collect()
}

/// Interior local maxima of the profile, refined by three-point parabolic
/// interpolation. Endpoints are never reported.
pub fn find_focal_points(profile: &RadialProfile) -> Vec<FocalPoint> {
    let (r, m) = (&profile.radii, &profile.magnitudes);
    interior_maxima(m)
        .into_iter()
        .map(|i| parabolic_peak([r[i - 1], r[i], r[i + 1]], [m[i - 1], m[i], m[i + 1]]))
        .collect()
}

/// Re-samples the neighbourhood of each coarse maximum at a finer step before
/// the parabolic fit.
fn refine_focal_points(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    weights: &[Complex64],
    profile: &RadialProfile,
) -> Result<Vec<FocalPoint>> {
    let (r, m) = (&profile.radii, &profile.magnitudes);
    interior_maxima(m)
        .into_iter()
        .map(|i| {
            let n = 2 * REFINE_FACTOR + 1;
            let fine: Vec<f64> = (0..n)
                .map(|j| r[i - 1] + (r[i + 1] - r[i - 1]) * j as f64 / (n - 1) as f64)
                .collect();
            let vals = evaluate_radii(model, geometry, profile.theta, profile.phi, weights, &fine)?;
            let best = (1..n - 1).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(REFINE_FACTOR);
            Ok(parabolic_peak(
                [fine[best - 1], fine[best], fine[best + 1]],
                [vals[best - 1], vals[best], vals[best + 1]],
            ))
        })
        .collect()
}

/// Half-power bracket around a focal point; a side is `None` when the
/// profile never drops below the threshold on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Depth3db {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Depth3db {
    pub fn width(&self) -> Option<f64> {
        Some(self.hi? - self.lo?)
    }

    /// Smaller of the two one-sided extents measured from `focal`.
    pub fn half_depth(&self, focal: f64) -> Option<f64> {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => Some((focal - lo).min(hi - focal)),
            (Some(lo), None) => Some(focal - lo),
            (None, Some(hi)) => Some(hi - focal),
            (None, None) => None,
        }
    }
}

fn crossing(r0: f64, m0: f64, r1: f64, m1: f64, level: f64) -> f64 {
    if m1 == m0 {
        return 0.5 * (r0 + r1);
    }
    r0 + (level - m0) * (r1 - r0) / (m1 - m0)
}

pub fn focal_depth_3db(profile: &RadialProfile, focal: &FocalPoint) -> Result<Depth3db> {
    let (r, m) = (&profile.radii, &profile.magnitudes);
    let (first, last) = (r[0], r[r.len() - 1]);
    if !(focal.radius >= first && focal.radius <= last) {
        return Err(Error::param(format!(
            "focal radius {} lies outside the profile [{first}, {last}]",
            focal.radius
        )));
    }
    let level = focal.amplitude / std::f64::consts::SQRT_2;
    let right = r.partition_point(|&x| x < focal.radius).min(r.len() - 1);
    let left = if r[right] > focal.radius && right > 0 { right - 1 } else { right };

    let mut lo = None;
    let mut i = left;
    loop {
        if m[i] < level && i + 1 < r.len() {
            lo = Some(crossing(r[i], m[i], r[i + 1], m[i + 1], level));
            break;
        }
        if i == 0 {
            break;
        }
        i -= 1;
    }
    let mut hi = None;
    for j in right.max(1)..r.len() {
        if m[j] < level {
            hi = Some(crossing(r[j - 1], m[j - 1], r[j], m[j], level));
            break;
        }
    }
    // a crossing that lands on the wrong side of the focal point comes from
    // the grid straddling the peak itself
    let lo = lo.map(|x| x.min(focal.radius));
    let hi = hi.map(|x| x.max(focal.radius));
    Ok(Depth3db { lo, hi })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialFocusReport {
    pub focal_points: Vec<FocalPoint>,
    pub target: Option<f64>,
    pub target_amplitude: Option<f64>,
    pub dominant: Option<FocalPoint>,
    pub gap: Option<f64>,
    pub depth_3db: Option<Depth3db>,
}

impl RadialFocusReport {
    pub fn focal_radii(&self) -> Vec<f64> {
        self.focal_points.iter().map(|f| f.radius).collect()
    }

    pub fn dominant_focal(&self) -> Option<f64> {
        self.dominant.map(|f| f.radius)
    }
}

/// Focal point nearest below `target` whose amplitude exceeds the amplitude
/// at the target itself.
pub fn dominant_below(points: &[FocalPoint], target: f64, target_amplitude: f64) -> Option<FocalPoint> {
    points
        .iter()
        .filter(|f| f.radius < target)
        .max_by(|a, b| a.radius.total_cmp(&b.radius))
        .filter(|f| f.amplitude > target_amplitude)
        .copied()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanWindow {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
}

impl ScanWindow {
    /// `[r̄/12, 4r̄/3]`, which for `r̄ = 6 m` is the 0.5–8 m window.
    pub fn around(target: f64) -> Self {
        Self { r_min: target / 12.0, r_max: target * 4.0 / 3.0, n_points: DEFAULT_GRID_POINTS }
    }
}

/// Scans a radial cut for an arbitrary weight vector and reports its focal
/// structure relative to `target` when one is given.
pub fn analyze_profile(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    theta: f64,
    phi: f64,
    weights: &[Complex64],
    target: Option<f64>,
    window: ScanWindow,
) -> Result<(RadialProfile, RadialFocusReport)> {
    let profile =
        radial_profile(model, geometry, theta, phi, weights, window.r_min, window.r_max, window.n_points)?;
    let focal_points = refine_focal_points(model, geometry, weights, &profile)?;
    let target_amplitude = target
        .map(|t| amplitude(model, geometry, &SphericalPoint::new(t, theta, phi)?, weights))
        .transpose()?;
    let dominant = match (target, target_amplitude) {
        (Some(t), Some(a)) => dominant_below(&focal_points, t, a),
        _ => None,
    };
    let depth_3db = dominant.map(|f| focal_depth_3db(&profile, &f)).transpose()?;
    let gap = dominant.and_then(|f| Some(target? - f.radius));
    let report = RadialFocusReport { focal_points, target, target_amplitude, dominant, gap, depth_3db };
    Ok((profile, report))
}

/// MRT at `target`, then the radial analysis along the target direction.
///
/// Focusing is only possible inside the Fraunhofer boundary, so targets at or
/// beyond the maximum Fraunhofer distance, and apertures under half a
/// wavelength, are rejected as infeasible.
pub fn focal_gap(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    target: &SphericalPoint,
    window: Option<ScanWindow>,
) -> Result<(RadialProfile, RadialFocusReport)> {
    check_focusable(geometry, target.r)?;
    let b = mrt(geometry, target)?;
    let window = window.unwrap_or_else(|| ScanWindow::around(target.r));
    analyze_profile(model, geometry, target.theta, target.phi, b.weights(), Some(target.r), window)
}

pub(crate) fn check_focusable(geometry: &ArrayGeometry, r: f64) -> Result<()> {
    let d = geometry.aperture_diameter();
    let lambda = geometry.wavelength();
    let limit = max_fraunhofer(d, lambda).map_err(|_| {
        Error::Infeasible(format!("aperture {d} m is too small to focus at wavelength {lambda} m"))
    })?;
    if r >= limit {
        return Err(Error::Infeasible(format!(
            "radius {r} m is beyond the maximum Fraunhofer distance {limit} m"
        )));
    }
    Ok(())
}

/// Boresight Fraunhofer distance of the array, convenient for scan windows.
pub fn boresight_fraunhofer(geometry: &ArrayGeometry) -> Result<f64> {
    Ok(fraunhofer_array(geometry.aperture_diameter(), geometry.wavelength(), std::f64::consts::FRAC_PI_2)?
        .distance)
}
