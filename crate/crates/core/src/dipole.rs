//! Exact on-plane near fields of a thin-dipole ULA and its non-radiating distance.
//!
//! Each element `n` is a center-fed dipole of length `D^s` on the z-axis at
//! `z_n`, carrying the standing-wave current
//! `I_0^{(n)} sin[k(D^s/2 - |z' - z_n|)]`. Observation is on the `z = 0` plane
//! at cylindrical radius `r`. All lengths with a tilde are divided by `λ`.
//!
//! The fields reduce to one-dimensional integrals over the current:
//!
//! ```text
//! F̃_α = ∫ sin[2π(D̃s/2 - |z'|)] e^{-j2π R̃} / R̃^α dz'
//! G̃_α = ∫ sin[2π(D̃s/2 - |z'|)] e^{-j2π R̃} (z' + z̃_n) / R̃^α dz'
//! R̃   = √(r̃² + (z' + z̃_n)²),   z' ∈ [-D̃s/2, D̃s/2]
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::roots::try_bisect;
use crate::FREE_SPACE_IMPEDANCE;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct DipoleArraySpec {
    n: usize,
    element_length: f64,
    spacing: f64,
    wavelength: f64,
    excitations: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Excitation {
    /// `I_0^{(n)} = I_0`.
    InPhase,
    /// `I_0^{(n)} = (-1)^n I_0`, `n = 1..N`.
    Alternating,
}

impl Excitation {
    pub fn label(&self) -> &'static str {
        match self {
            Excitation::InPhase => "in_phase",
            Excitation::Alternating => "alternating",
        }
    }

    fn currents(&self, n: usize, i0: f64) -> Vec<Complex64> {
        (1..=n)
            .map(|i| match self {
                Excitation::InPhase => Complex64::new(i0, 0.0),
                Excitation::Alternating => Complex64::new(if i % 2 == 0 { i0 } else { -i0 }, 0.0),
            })
            .collect()
    }
}

impl DipoleArraySpec {
    /// Unit-amplitude (1 A) array with the given phase pattern.
    pub fn new(
        n: usize,
        element_length: f64,
        spacing: f64,
        wavelength: f64,
        pattern: Excitation,
    ) -> Result<Self> {
        Self::with_excitations(element_length, spacing, wavelength, pattern.currents(n, 1.0))
    }

    pub fn with_excitations(
        element_length: f64,
        spacing: f64,
        wavelength: f64,
        excitations: Vec<Complex64>,
    ) -> Result<Self> {
        let n = excitations.len();
        if n == 0 {
            return Err(Error::param("a dipole array needs at least one element"));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::param(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(element_length > 0.0 && element_length < wavelength) {
            return Err(Error::param(format!(
                "dipole length must lie in (0, lambda), got {element_length} for lambda {wavelength}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::param(format!("spacing must be positive, got {spacing}")));
        }
        if excitations.iter().any(|i| !(i.re.is_finite() && i.im.is_finite())) {
            return Err(Error::param("excitation currents must be finite"));
        }
        Ok(Self { n, element_length, spacing, wavelength, excitations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn element_length(&self) -> f64 {
        self.element_length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn excitations(&self) -> &[Complex64] {
        &self.excitations
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Feed position `z_n = (n - (N+1)/2) δ` for `n = 1..N`, given zero-based.
    pub fn element_center(&self, index: usize) -> f64 {
        (index as f64 + 1.0 - (self.n as f64 + 1.0) / 2.0) * self.spacing
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { excitations: self.excitations.iter().map(|i| i * factor).collect(), ..self.clone() }
    }
}

/// Current on element `index` at axial position `z_prime`; zero off the wire.
pub fn current_distribution(spec: &DipoleArraySpec, index: usize, z_prime: f64) -> Result<Complex64> {
    if index >= spec.n {
        return Err(Error::param(format!("element index {index} out of range for {} elements", spec.n)));
    }
    let offset = (z_prime - spec.element_center(index)).abs();
    let half = spec.element_length / 2.0;
    if offset > half {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(spec.excitations[index] * (spec.wavenumber() * (half - offset)).sin())
}

/// Normalized integral selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weight {
    F,
    G,
}

fn normalized_integral(
    weight: Weight,
    alpha: u32,
    d_s: f64,
    z_n: f64,
    r: f64,
    opts: QuadratureOptions,
) -> Result<Complex64> {
    if !(2..=5).contains(&alpha) {
        return Err(Error::param(format!("alpha must be 2, 3, 4 or 5, got {alpha}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param(format!("normalized radius must be positive, got {r}")));
    }
    if !(d_s >= 0.0 && d_s.is_finite() && z_n.is_finite()) {
        return Err(Error::param("dipole length and position must be finite"));
    }
    let half = d_s / 2.0;
    let integrand = |zp: f64| {
        let z = zp + z_n;
        let rho2 = r * r + z * z;
        let rho = rho2.sqrt();
        let amp = (2.0 * PI * (half - zp.abs())).sin() / rho.powi(alpha as i32);
        let amp = match weight {
            Weight::F => amp,
            Weight::G => amp * z,
        };
        Complex64::from_polar(amp, -2.0 * PI * rho)
    };
    // the current has a kink at the feed, so each half is integrated separately
    let lower = integrate(integrand, -half, 0.0, opts)?.value;
    let upper = integrate(integrand, 0.0, half, opts)?.value;
    Ok(lower + upper)
}

pub fn f_tilde_with(alpha: u32, d_s: f64, z_n: f64, r: f64, opts: QuadratureOptions) -> Result<Complex64> {
    normalized_integral(Weight::F, alpha, d_s, z_n, r, opts)
}

pub fn g_tilde_with(alpha: u32, d_s: f64, z_n: f64, r: f64, opts: QuadratureOptions) -> Result<Complex64> {
    normalized_integral(Weight::G, alpha, d_s, z_n, r, opts)
}

/// `F̃_α(D̃s, z̃_n, r̃)` at the default relative tolerance of `1e-9`.
pub fn f_tilde(alpha: u32, d_s: f64, z_n: f64, r: f64) -> Result<Complex64> {
    f_tilde_with(alpha, d_s, z_n, r, QuadratureOptions::default())
}

/// `G̃_α(D̃s, z̃_n, r̃)` at the default relative tolerance of `1e-9`.
pub fn g_tilde(alpha: u32, d_s: f64, z_n: f64, r: f64) -> Result<Complex64> {
    g_tilde_with(alpha, d_s, z_n, r, QuadratureOptions::default())
}

/// Un-normalized `F_α` or `G_α`, integrated over the physical wire
/// `z' ∈ [z_n - D^s/2, z_n + D^s/2]` with `R = √(r² + z'²)`.
fn physical_integral(
    weight: Weight,
    alpha: u32,
    d_s: f64,
    z_n: f64,
    r: f64,
    wavelength: f64,
    opts: QuadratureOptions,
) -> Result<Complex64> {
    if !(2..=5).contains(&alpha) {
        return Err(Error::param(format!("alpha must be 2, 3, 4 or 5, got {alpha}")));
    }
    if !(r > 0.0 && wavelength > 0.0) {
        return Err(Error::param("radius and wavelength must be positive"));
    }
    let k = 2.0 * PI / wavelength;
    let half = d_s / 2.0;
    let integrand = |z: f64| {
        let rho = (r * r + z * z).sqrt();
        let amp = (k * (half - (z - z_n).abs())).sin() / rho.powi(alpha as i32);
        let amp = if weight == Weight::G { amp * z } else { amp };
        Complex64::from_polar(amp, -k * rho)
    };
    Ok(integrate(integrand, z_n - half, z_n, opts)?.value + integrate(integrand, z_n, z_n + half, opts)?.value)
}

/// `F_α(D^s, z_n, r)` in physical units; equals `λ^{1-α} F̃_α`.
pub fn f_alpha(alpha: u32, d_s: f64, z_n: f64, r: f64, wavelength: f64) -> Result<Complex64> {
    physical_integral(Weight::F, alpha, d_s, z_n, r, wavelength, QuadratureOptions::default())
}

/// `G_α(D^s, z_n, r)` in physical units; equals `λ^{2-α} G̃_α`.
pub fn g_alpha(alpha: u32, d_s: f64, z_n: f64, r: f64, wavelength: f64) -> Result<Complex64> {
    physical_integral(Weight::G, alpha, d_s, z_n, r, wavelength, QuadratureOptions::default())
}

/// Field phasors at one on-plane point: `H_φ` in A/m, `E_r` and `E_z` in V/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFieldSample {
    pub h_phi: Complex64,
    pub e_r: Complex64,
    pub e_z: Complex64,
}

impl ComplexFieldSample {
    const ZERO: Self = Self {
        h_phi: Complex64 { re: 0.0, im: 0.0 },
        e_r: Complex64 { re: 0.0, im: 0.0 },
        e_z: Complex64 { re: 0.0, im: 0.0 },
    };
}

impl std::ops::Add for ComplexFieldSample {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self { h_phi: self.h_phi + o.h_phi, e_r: self.e_r + o.e_r, e_z: self.e_z + o.e_z }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayFields {
    pub total: ComplexFieldSample,
    pub per_element: Vec<ComplexFieldSample>,
}

fn element_fields(
    spec: &DipoleArraySpec,
    index: usize,
    r: f64,
    opts: QuadratureOptions,
) -> Result<ComplexFieldSample> {
    let lambda = spec.wavelength;
    let k = spec.wavenumber();
    let eta = FREE_SPACE_IMPEDANCE;
    let i0 = spec.excitations[index];
    let ds = spec.element_length / lambda;
    let zn = spec.element_center(index) / lambda;
    let rt = r / lambda;
    let f = |a| f_tilde_with(a, ds, zn, rt, opts);
    let g = |a| g_tilde_with(a, ds, zn, rt, opts);
    let (f2, f3, f4, f5) = (f(2)?, f(3)?, f(4)?, f(5)?);
    let (g3, g4, g5) = (g(3)?, g(4)?, g(5)?);
    let inv2pi = 1.0 / (2.0 * PI);

    let h_phi = J * k * i0 * rt / (4.0 * PI) * (f2 - J * inv2pi * f3);
    let e_r = J * eta * k * i0 * rt / (4.0 * PI) * (-g3 + 3.0 * J * inv2pi * g4 + 3.0 * inv2pi * inv2pi * g5);
    let e_z = eta * k * i0 / (8.0 * PI * PI)
        * (2.0 * f2 - 2.0 * J * (inv2pi + PI * rt * rt) * f3 - 3.0 * rt * rt * f4
            + 3.0 * J * inv2pi * rt * rt * f5);
    Ok(ComplexFieldSample { h_phi, e_r, e_z })
}

pub fn fields_on_plane_with(spec: &DipoleArraySpec, r: f64, opts: QuadratureOptions) -> Result<ArrayFields> {
    if r == 0.0 {
        return Err(Error::Singularity { element: spec.n / 2 });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param(format!("observation radius must be positive, got {r}")));
    }
    let per_element = (0..spec.n).map(|i| element_fields(spec, i, r, opts)).collect::<Result<Vec<_>>>()?;
    let total = per_element.iter().fold(ComplexFieldSample::ZERO, |acc, s| acc + *s);
    Ok(ArrayFields { total, per_element })
}

pub fn fields_on_plane(spec: &DipoleArraySpec, r: f64) -> Result<ArrayFields> {
    fields_on_plane_with(spec, r, QuadratureOptions::default())
}

/// Complex Poynting components on the `z = 0` plane, W/m².
///
/// `P_z = ½ E_r H_φ*` and `P_r = -½ E_z H_φ*`, the signs of the strict cross
/// product `½ E × H*` in cylindrical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPowerDensity {
    pub p_z: Complex64,
    pub p_r: Complex64,
    pub active_mag: f64,
    pub reactive_mag: f64,
}

impl ComplexPowerDensity {
    fn from_fields(f: &ComplexFieldSample) -> Self {
        let h = f.h_phi.conj();
        let p_z = 0.5 * f.e_r * h;
        let p_r = -0.5 * f.e_z * h;
        Self { p_z, p_r, active_mag: p_z.re.hypot(p_r.re), reactive_mag: p_z.im.hypot(p_r.im) }
    }
}

pub fn poynting_with(spec: &DipoleArraySpec, r: f64, opts: QuadratureOptions) -> Result<ComplexPowerDensity> {
    Ok(ComplexPowerDensity::from_fields(&fields_on_plane_with(spec, r, opts)?.total))
}

pub fn poynting(spec: &DipoleArraySpec, r: f64) -> Result<ComplexPowerDensity> {
    poynting_with(spec, r, QuadratureOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonRadiatingResult {
    /// Meters; 0 when no crossing lies in the scan window.
    pub distance: f64,
    pub fully_radiative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonRadiatingOptions {
    /// Scan window in wavelengths.
    pub r_min_wl: f64,
    pub r_max_wl: f64,
    pub points: usize,
    /// Bisection width in wavelengths.
    pub tol_wl: f64,
    pub quadrature: QuadratureOptions,
}

impl Default for NonRadiatingOptions {
    fn default() -> Self {
        Self { r_min_wl: 0.01, r_max_wl: 1.0, points: 500, tol_wl: 1e-6, quadrature: QuadratureOptions::default() }
    }
}

/// Largest radius where the reactive and active power densities have equal
/// magnitude, from the last sign change of `reactive - active` on a
/// log-spaced scan followed by bisection.
pub fn nonradiating_distance_with(spec: &DipoleArraySpec, opts: NonRadiatingOptions) -> Result<NonRadiatingResult> {
    let lambda = spec.wavelength;
    if !(opts.r_min_wl > 0.0 && opts.r_max_wl > opts.r_min_wl && opts.points >= 2) {
        return Err(Error::param("invalid non-radiating scan window"));
    }
    let excess = |r: f64| -> Result<f64> {
        let p = poynting_with(spec, r, opts.quadrature)?;
        Ok(p.reactive_mag - p.active_mag)
    };
    let radii = crate::focus::log_grid(opts.r_min_wl * lambda, opts.r_max_wl * lambda, opts.points);
    let values = radii.par_iter().map(|&r| excess(r)).collect::<Result<Vec<_>>>()?;

    let last = (0..values.len() - 1).rev().find(|&i| (values[i] >= 0.0) != (values[i + 1] >= 0.0));
    let Some(i) = last else {
        return Ok(NonRadiatingResult { distance: 0.0, fully_radiative: true });
    };
    let distance = try_bisect(excess, radii[i], radii[i + 1], opts.tol_wl * lambda)?;
    Ok(NonRadiatingResult { distance, fully_radiative: false })
}

pub fn nonradiating_distance(spec: &DipoleArraySpec) -> Result<NonRadiatingResult> {
    nonradiating_distance_with(spec, NonRadiatingOptions::default())
}
