//! Angle-dependent Fraunhofer distance of phased arrays.
//!
//! A single center-fed antenna of diameter `D` becomes far-field at
//! `2D² sin²θ / λ`. A phased array has independent feeds, so the worst-case
//! phase delay is taken between the element nearest the source and the
//! farthest element. Away from broadside the path spans the whole aperture and
//! the boundary grows to `8D² sin²θ / λ`. Inside a narrow angular window of
//! half-width `θ_F` around broadside the boundary follows a transition branch,
//! the smaller root of
//!
//! ```text
//! (2D²/λ) sin²θ (1 + min{1, 2 d |cosθ| / D})² = d
//! ```
//!
//! which joins the off-broadside branch continuously at `θ = π/2 ± θ_F`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::roots::bisect;

/// Phase error accepted before a wavefront counts as planar.
pub const PHASE_ERROR_LIMIT: f64 = PI / 8.0;

const MIN_APERTURE_RATIO: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `|π/2 - θ| < θ_F`: quadratic-root branch.
    Transition,
    /// `8D² sin²θ / λ`.
    OffBoresight,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::Transition => "TRANSITION",
            Branch::OffBoresight => "OFF_BORESIGHT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FraunhoferResult {
    pub distance: f64,
    pub branch: Branch,
    pub theta_f: f64,
}

/// Expansion of the arrival-phase difference between a point at distance
/// `d'` from the feed and the feed itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDelayBreakdown {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub exact: f64,
}

impl PhaseDelayBreakdown {
    pub fn truncated(&self) -> f64 {
        self.delta1 + self.delta2 + self.delta3
    }

    pub fn truncation_error(&self) -> f64 {
        (self.truncated() - self.exact).abs()
    }
}

pub fn phase_delay_terms(
    r: f64,
    theta: f64,
    d_prime: f64,
    wavelength: f64,
) -> Result<PhaseDelayBreakdown> {
    if !(d_prime > 0.0 && r > d_prime) {
        return Err(Error::param(format!("need r > d' > 0, got r = {r}, d' = {d_prime}")));
    }
    let (s, c) = theta.sin_cos();
    let s2 = s * s;
    let delta1 = -2.0 * PI / wavelength * c * d_prime;
    let delta2 = PI / wavelength * s2 * d_prime * d_prime / r;
    let delta3 = PI / wavelength * c * s2 * d_prime.powi(3) / (r * r);
    let r_prime = (r * r - 2.0 * r * d_prime * c + d_prime * d_prime).sqrt();
    let exact = 2.0 * PI / wavelength * (r_prime - r);
    Ok(PhaseDelayBreakdown { delta1, delta2, delta3, exact })
}

/// Fraunhofer distance of a single center-fed antenna, `2D² sin²θ / λ`.
pub fn fraunhofer_single(d: f64, wavelength: f64, theta: f64) -> f64 {
    // folding onto [0, π/2] makes θ = π give exactly zero
    let s = theta.min(PI - theta).sin();
    2.0 * d * d * s * s / wavelength
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FraunhoferAngle {
    /// `π/2 - F⁻¹(λ / 2D)` with `F(θ) = 8|cosθ| sin²θ`.
    pub exact: f64,
    /// `½ asin(λ / 8D)`.
    pub approx: f64,
}

fn check_domain(d: f64, wavelength: f64) -> Result<()> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::param(format!("wavelength must be positive, got {wavelength}")));
    }
    if !d.is_finite() || d / wavelength < MIN_APERTURE_RATIO {
        return Err(Error::OutOfDomain(format!(
            "aperture ratio D/lambda = {} is below {MIN_APERTURE_RATIO}",
            d / wavelength
        )));
    }
    Ok(())
}

/// `F(θ) = 8|cosθ| sin²θ`.
pub fn aperture_phase_function(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    8.0 * c.abs() * s * s
}

pub fn fraunhofer_angle(d: f64, wavelength: f64) -> Result<FraunhoferAngle> {
    check_domain(d, wavelength)?;
    let target = wavelength / (2.0 * d);
    // With c = cosθ the root closest to π/2 solves 8c(1 - c²) = target on
    // c ∈ [0, 1/√3], where the left side increases monotonically. Then
    // θ_F = π/2 - acos(c) = asin(c), which keeps full precision for tiny angles.
    let c = bisect(|c| 8.0 * c * (1.0 - c * c) - target, 0.0, 1.0 / 3f64.sqrt(), 0.0)?;
    Ok(FraunhoferAngle {
        exact: c.asin(),
        approx: 0.5 * (wavelength / (8.0 * d)).asin(),
    })
}

/// Off-broadside branch, `8D² sin²θ / λ`.
pub fn off_boresight_distance(d: f64, wavelength: f64, theta: f64) -> f64 {
    4.0 * fraunhofer_single(d, wavelength, theta)
}

/// Transition branch: smaller positive root of
/// `(4Ac²/D²) x² + (4Ac/D - 1) x + A = 0`, `A = 2D² sin²θ / λ`, `c = |cosθ|`.
///
/// Written in the cancellation-free form `2A / (1 - 4Ac/D + √(1 - 8Ac/D))`,
/// which reduces to `A` at broadside.
///
/// The root has a square-root branch point at `θ = π/2 ± θ_F`. A discriminant
/// smaller than the error it inherits from rounding `θ` itself is treated as
/// zero, so both branches agree at the representable boundary angle.
pub fn transition_distance(d: f64, wavelength: f64, theta: f64) -> f64 {
    let a = fraunhofer_single(d, wavelength, theta);
    let c = theta.cos().abs();
    let q = 4.0 * a * c / d;
    let disc = 1.0 - 2.0 * q;
    let rounding = 64.0 * (d / wavelength) * f64::EPSILON;
    let disc = if disc <= rounding { 0.0 } else { disc };
    2.0 * a / (1.0 - q + disc.sqrt())
}

/// Relative residual of the defining relation
/// `(2D²/λ) sin²θ (1 + min{1, 2x|cosθ|/D})² = x` at candidate distance `x`.
pub fn defining_residual(d: f64, wavelength: f64, theta: f64, x: f64) -> f64 {
    let c = theta.cos().abs();
    let lhs = fraunhofer_single(d, wavelength, theta) * (1.0 + (2.0 * x * c / d).min(1.0)).powi(2);
    (lhs - x).abs() / x.abs().max(f64::MIN_POSITIVE)
}

pub fn fraunhofer_array(d: f64, wavelength: f64, theta: f64) -> Result<FraunhoferResult> {
    check_domain(d, wavelength)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::param(format!("theta must lie in [0, pi], got {theta}")));
    }
    let theta_f = fraunhofer_angle(d, wavelength)?.exact;
    let offset = (FRAC_PI_2 - theta).abs();
    let (distance, branch) = if offset >= theta_f {
        (off_boresight_distance(d, wavelength, theta), Branch::OffBoresight)
    } else if theta == FRAC_PI_2 {
        (2.0 * d * d / wavelength, Branch::Transition)
    } else {
        (transition_distance(d, wavelength, theta), Branch::Transition)
    };
    Ok(FraunhoferResult { distance, branch, theta_f })
}

/// Largest Fraunhofer distance over all angles, `8D² cos²θ_F / λ`.
pub fn max_fraunhofer(d: f64, wavelength: f64) -> Result<f64> {
    let theta_f = fraunhofer_angle(d, wavelength)?.exact;
    let c = theta_f.cos();
    Ok(8.0 * d * d * c * c / wavelength)
}

const COVERAGE_GRID: usize = 8192;

/// Largest ground distance at which a UE is still inside the Fraunhofer
/// boundary of an array mounted at height `h` with its axis vertical.
///
/// The slant range is `r = √(h² + x²)` and the angle from the array axis has
/// `cosθ = h / r`. Returns 0 when no ground distance qualifies.
pub fn coverage_distance(h: f64, d: f64, wavelength: f64) -> Result<f64> {
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::param(format!("height must be finite and >= 0, got {h}")));
    }
    let upper = max_fraunhofer(d, wavelength)?;
    let margin = |x: f64| -> Result<f64> {
        let r = h.hypot(x);
        let theta = x.atan2(h);
        Ok(fraunhofer_array(d, wavelength, theta)?.distance - r)
    };

    let step = upper / COVERAGE_GRID as f64;
    let mut last_inside = None;
    for i in (1..=COVERAGE_GRID).rev() {
        let x = step * i as f64;
        if margin(x)? >= 0.0 {
            last_inside = Some(x);
            break;
        }
    }
    let Some(x_in) = last_inside else {
        return Ok(0.0);
    };
    if x_in >= upper {
        return Ok(upper);
    }
    // margin is cheap and infallible inside the domain checked above
    let f = |x: f64| margin(x).unwrap_or(f64::NAN);
    bisect(f, x_in, x_in + step, 1e-10 * upper)
}
