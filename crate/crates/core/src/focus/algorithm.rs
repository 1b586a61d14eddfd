//! Iterative placement of a radial focal point at a prescribed radius.
//!
//! The MRT target is pushed outward geometrically, `r̄_k = (1+ε) r̄_{k-1}`,
//! until the radial slope of `|y(·, MRT(r̄_k))|` at the desired radius `r^f`
//! changes sign, which means the focal point has crossed `r^f`. A bisection on
//! `r̄` over the last bracket then drives the slope at `r^f` to zero.

use crate::channel::{Beamformer, ChannelModel};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, SphericalPoint};
use crate::roots::try_bisect;

use super::{amplitude, check_focusable, mrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Algorithm1Options {
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Bisection width on `r̄`, relative to `r^f`.
    pub bisection_rel_tol: f64,
    /// Half-width of the central difference used for the radial slope,
    /// relative to `r^f`.
    pub slope_step_rel: f64,
}

impl Default for Algorithm1Options {
    fn default() -> Self {
        Self { epsilon: 0.02, max_iterations: 500, bisection_rel_tol: 1e-4, slope_step_rel: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Algorithm1Step {
    pub k: usize,
    pub r_bar: f64,
    /// `|y(r^f, MRT(r̄_k))|`.
    pub y_hat: f64,
    /// Radial slope of `|y|` at `r^f` under `MRT(r̄_k)`. The first step
    /// carries the assumed starting sign `-1` instead of a measurement.
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct Algorithm1Outcome {
    pub beamformer: Beamformer,
    pub r_bar_star: f64,
    pub trace: Vec<Algorithm1Step>,
    /// Passes through the outward loop before the slope changed sign.
    pub loop_iterations: usize,
}

struct Probe<'a> {
    model: &'a ChannelModel,
    geometry: &'a ArrayGeometry,
    focal: SphericalPoint,
    h: f64,
}

impl Probe<'_> {
    fn at(&self, r_bar: f64) -> Result<(f64, f64)> {
        let b = mrt(self.geometry, &self.focal.with_radius(r_bar))?;
        let w = b.weights();
        let y = amplitude(self.model, self.geometry, &self.focal, w)?;
        let plus = amplitude(self.model, self.geometry, &self.focal.with_radius(self.focal.r + self.h), w)?;
        let minus = amplitude(self.model, self.geometry, &self.focal.with_radius(self.focal.r - self.h), w)?;
        Ok((y, (plus - minus) / (2.0 * self.h)))
    }
}

pub fn algorithm1_focus(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    focal: &SphericalPoint,
    opts: Algorithm1Options,
) -> Result<Algorithm1Outcome> {
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
        return Err(Error::param(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    check_focusable(geometry, focal.r)?;
    let rf = focal.r;
    let probe = Probe { model, geometry, focal: *focal, h: opts.slope_step_rel * rf };

    let (y1, _) = probe.at(rf)?;
    let mut trace = vec![Algorithm1Step { k: 1, r_bar: rf, y_hat: y1, slope: -1.0 }];
    let mut epsilon = opts.epsilon;
    let mut loop_iterations = 0;

    loop {
        if loop_iterations >= opts.max_iterations {
            return Err(Error::Infeasible(format!(
                "no focal point reached {rf} m within {} iterations",
                opts.max_iterations
            )));
        }
        loop_iterations += 1;
        let prev = *trace.last().expect("trace starts non-empty");
        let r_bar = (1.0 + epsilon) * prev.r_bar;
        let (y_hat, slope) = probe.at(r_bar)?;
        let step = Algorithm1Step { k: prev.k + 1, r_bar, y_hat, slope };
        trace.push(step);
        if slope * prev.slope > 0.0 {
            continue;
        }
        if slope == 0.0 {
            let beamformer = mrt(geometry, &focal.with_radius(r_bar))?;
            return Ok(Algorithm1Outcome { beamformer, r_bar_star: r_bar, trace, loop_iterations });
        }

        let lo_idx = trace.len().saturating_sub(3);
        let lo = trace[lo_idx].r_bar;
        let slope_at = |r: f64| probe.at(r).map(|(_, s)| s);
        let lo_slope = if lo_idx == 0 { slope_at(lo)? } else { trace[lo_idx].slope };
        if lo_slope * slope < 0.0 {
            let r_star = try_bisect(slope_at, lo, r_bar, opts.bisection_rel_tol * rf)?;
            let beamformer = mrt(geometry, &focal.with_radius(r_star))?;
            return Ok(Algorithm1Outcome { beamformer, r_bar_star: r_star, trace, loop_iterations });
        }
        // the bracket misses the sign change: step back and refine the stride
        trace.truncate(lo_idx + 1);
        epsilon *= 0.5;
        if epsilon < f64::EPSILON {
            return Err(Error::Numeric("outward step collapsed without a valid bracket".into()));
        }
    }
}
