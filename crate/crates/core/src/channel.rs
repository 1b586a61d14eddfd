//! Near-field line-of-sight channel models and the received signal.
//!
//! All three models share the per-element propagation phase `e^{-jk r_n}`.
//! They differ only in amplitude:
//!
//! | model | amplitude of `h_n`          |
//! |-------|-----------------------------|
//! | USW   | `1 / (√(4π) r)`             |
//! | NUSW  | `1 / (√(4π) r_n)`           |
//! | GNC   | `√(G1 G2) / (√(4π) r_n)`    |

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Position3, SphericalPoint};

/// Gain callback `G(point, element_position)`; must be effect-free and return
/// a finite, non-negative value.
pub type GainFn = Arc<dyn Fn(&SphericalPoint, &Position3) -> f64 + Send + Sync>;

pub(crate) const INV_SQRT_4PI: f64 = 0.282_094_791_773_878_14;

#[derive(Clone)]
pub enum ChannelModel {
    /// Uniform spherical wave: common path loss, per-element phase.
    Usw,
    /// Non-uniform spherical wave: per-element path loss and phase.
    Nusw,
    /// General near-field channel with effective-aperture and polarization gains.
    Gnc { aperture: GainFn, polarization: GainFn },
}

impl ChannelModel {
    /// GNC with both gains fixed at 1 (isotropic elements).
    pub fn gnc_isotropic() -> Self {
        let unit: GainFn = Arc::new(|_, _| 1.0);
        ChannelModel::Gnc { aperture: unit.clone(), polarization: unit }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelModel::Usw => "usw",
            ChannelModel::Nusw => "nusw",
            ChannelModel::Gnc { .. } => "gnc",
        }
    }

    /// `g_n = √(G1 G2)` for one element; 1 for the isotropic models.
    fn element_gain(&self, point: &SphericalPoint, element: &Position3) -> Result<f64> {
        match self {
            ChannelModel::Usw | ChannelModel::Nusw => Ok(1.0),
            ChannelModel::Gnc { aperture, polarization } => {
                let g1 = aperture(point, element);
                let g2 = polarization(point, element);
                if !(g1.is_finite() && g2.is_finite() && g1 >= 0.0 && g2 >= 0.0) {
                    return Err(Error::param(format!(
                        "gain callbacks must return finite non-negative values, got {g1}, {g2}"
                    )));
                }
                Ok((g1 * g2).sqrt())
            }
        }
    }

    /// Channel coefficient of one element at distance `rn` from a point at radius `r`.
    #[inline]
    fn coefficient(&self, gain: f64, r: f64, rn: f64, k: f64) -> Complex64 {
        let amplitude = match self {
            ChannelModel::Usw => INV_SQRT_4PI / r,
            _ => gain / rn * INV_SQRT_4PI,
        };
        Complex64::from_polar(amplitude, -k * rn)
    }
}

impl fmt::Debug for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Phase-only weight vector, one unit-modulus entry per element.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    weights: Vec<Complex64>,
}

impl Beamformer {
    const MODULUS_TOL: f64 = 1e-12;

    pub fn new(weights: Vec<Complex64>) -> Result<Self> {
        if let Some((i, w)) =
            weights.iter().enumerate().find(|(_, w)| (w.norm() - 1.0).abs() > Self::MODULUS_TOL)
        {
            return Err(Error::param(format!("weight {i} has modulus {}, expected 1", w.norm())));
        }
        Ok(Self { weights })
    }

    pub fn from_phases(phases: &[f64]) -> Self {
        Self { weights: phases.iter().map(|&b| Complex64::from_polar(1.0, b)).collect() }
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Excitation phases `β_n` in `(-π, π]`.
    pub fn phases(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.arg()).collect()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl AsRef<[Complex64]> for Beamformer {
    fn as_ref(&self) -> &[Complex64] {
        &self.weights
    }
}

#[derive(Debug, Clone)]
pub struct ChannelVector {
    pub entries: Vec<Complex64>,
    pub model: ChannelModel,
    pub point: SphericalPoint,
}

fn check_singular(distances: &[f64], wavelength: f64) -> Result<()> {
    let floor = 1e-12 * wavelength;
    match distances.iter().position(|&d| d <= floor) {
        Some(element) => Err(Error::Singularity { element }),
        None => Ok(()),
    }
}

pub fn channel_vector(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    point: &SphericalPoint,
) -> Result<ChannelVector> {
    let distances = geometry.element_distances(point);
    check_singular(&distances, geometry.wavelength())?;
    let k = geometry.wavenumber();
    let entries = geometry
        .positions()
        .iter()
        .zip(&distances)
        .map(|(s, &rn)| Ok(model.coefficient(model.element_gain(point, s)?, point.r, rn, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelVector { entries, model: model.clone(), point: *point })
}

/// `y = Σ_n h_n b_n` for unit input symbol.
pub fn received_signal(channel: &ChannelVector, weights: &[Complex64]) -> Result<Complex64> {
    if channel.entries.len() != weights.len() {
        return Err(Error::param(format!(
            "channel has {} entries but beamformer has {}",
            channel.entries.len(),
            weights.len()
        )));
    }
    Ok(channel.entries.iter().zip(weights).map(|(h, b)| h * b).sum())
}

/// Same value as `received_signal(channel_vector(..), weights)` without
/// materializing the channel vector. Used by the radial scans.
pub fn received(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    point: &SphericalPoint,
    weights: &[Complex64],
) -> Result<Complex64> {
    if geometry.len() != weights.len() {
        return Err(Error::param(format!(
            "array has {} elements but beamformer has {}",
            geometry.len(),
            weights.len()
        )));
    }
    let dir = point.direction();
    let r = point.r;
    let k = geometry.wavenumber();
    let floor = 1e-12 * geometry.wavelength();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (s, w)) in geometry.positions().iter().zip(weights).enumerate() {
        let rn = (r * r - 2.0 * r * dir.dot(s) + s.norm_sq()).max(0.0).sqrt();
        if rn <= floor {
            return Err(Error::Singularity { element: i });
        }
        acc += model.coefficient(model.element_gain(point, s)?, r, rn, k) * w;
    }
    Ok(acc)
}

/// Near-field array factor, normalized so that `|y| = A(θ,φ) |AF| / r` with
/// `A = g_ref / √(4π)` taken from the reference element.
pub fn array_factor(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    point: &SphericalPoint,
    weights: &[Complex64],
) -> Result<Complex64> {
    if geometry.len() != weights.len() {
        return Err(Error::param("beamformer length does not match the array"));
    }
    let distances = geometry.element_distances(point);
    check_singular(&distances, geometry.wavelength())?;
    let reference_gain =
        model.element_gain(point, &geometry.positions()[geometry.reference_index()])?;
    if reference_gain == 0.0 {
        return Err(Error::Numeric("reference element gain is zero".into()));
    }
    let k = geometry.wavenumber();
    let r = point.r;
    let mut af = Complex64::new(0.0, 0.0);
    for ((s, &rn), w) in geometry.positions().iter().zip(&distances).zip(weights) {
        let amplitude = match model {
            ChannelModel::Usw => 1.0,
            _ => model.element_gain(point, s)? / reference_gain * r / rn,
        };
        af += Complex64::from_polar(amplitude, -k * (rn - r)) * w;
    }
    Ok(af)
}

/// `A(θ, φ) = √(G1 G2 / 4π)` evaluated at the reference element.
pub fn angular_gain(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    point: &SphericalPoint,
) -> Result<f64> {
    let g = model.element_gain(point, &geometry.positions()[geometry.reference_index()])?;
    Ok(g / (4.0 * PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 0.01;

    fn ula(n: usize) -> ArrayGeometry {
        ArrayGeometry::ula(n, LAMBDA / 2.0, LAMBDA).unwrap()
    }

    #[test]
    fn single_element_all_models_coincide() {
        let g = ula(1);
        let p = SphericalPoint::new(1.0, 0.4, 0.2).unwrap();
        let expected = Complex64::from_polar(INV_SQRT_4PI, -2.0 * PI / LAMBDA);
        for m in [ChannelModel::Usw, ChannelModel::Nusw, ChannelModel::gnc_isotropic()] {
            let h = channel_vector(&m, &g, &p).unwrap().entries[0];
            assert_relative_eq!(h.re, expected.re, epsilon = 1e-14);
            assert_relative_eq!(h.im, expected.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn nusw_magnitudes_follow_element_distances() {
        let g = ula(3);
        let p = SphericalPoint::boresight(10.0 * LAMBDA);
        let h = channel_vector(&ChannelModel::Nusw, &g, &p).unwrap();
        for (hn, s) in h.entries.iter().zip(g.positions()) {
            let rn = (100.0 * LAMBDA * LAMBDA + s.z * s.z).sqrt();
            assert_relative_eq!(hn.norm(), INV_SQRT_4PI / rn, max_relative = 1e-13);
        }
    }

    #[test]
    fn usw_magnitudes_are_equal() {
        let g = ula(9);
        let p = SphericalPoint::new(0.3, 1.0, 2.0).unwrap();
        let h = channel_vector(&ChannelModel::Usw, &g, &p).unwrap();
        let m0 = h.entries[0].norm();
        assert!(h.entries.iter().all(|e| (e.norm() - m0).abs() <= 1e-15 * m0));
    }

    #[test]
    fn coincident_point_is_singular() {
        let g = ula(3);
        let p = SphericalPoint::new(LAMBDA / 2.0, 0.0, 0.0).unwrap();
        assert_eq!(
            channel_vector(&ChannelModel::Nusw, &g, &p).unwrap_err(),
            Error::Singularity { element: 2 }
        );
        let w = vec![Complex64::new(1.0, 0.0); 3];
        assert!(matches!(received(&ChannelModel::Nusw, &g, &p, &w), Err(Error::Singularity { .. })));
    }

    #[test]
    fn conjugate_phases_combine_coherently() {
        let g = ula(6);
        let p = SphericalPoint::new(0.2, 1.3, 0.5).unwrap();
        let d = g.element_distances(&p);
        let b = Beamformer::from_phases(&d.iter().map(|rn| 2.0 * PI * rn / LAMBDA).collect::<Vec<_>>());
        let y = received_signal(&channel_vector(&ChannelModel::Nusw, &g, &p).unwrap(), b.weights())
            .unwrap();
        let expected: f64 = d.iter().map(|rn| INV_SQRT_4PI / rn).sum();
        assert_relative_eq!(y.re, expected, max_relative = 1e-12);
        assert!(y.im.abs() < 1e-12 * expected);
    }

    #[test]
    fn symmetric_pair_at_boresight() {
        let g = ula(2);
        let p = SphericalPoint::boresight(0.5);
        let h = channel_vector(&ChannelModel::Nusw, &g, &p).unwrap();
        let y = received_signal(&h, &[Complex64::new(1.0, 0.0); 2]).unwrap();
        assert_relative_eq!(y.re, 2.0 * h.entries[0].re, max_relative = 1e-12);
        assert_relative_eq!(y.im, 2.0 * h.entries[0].im, max_relative = 1e-12);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = ula(3);
        let h = channel_vector(&ChannelModel::Nusw, &g, &SphericalPoint::boresight(1.0)).unwrap();
        assert!(matches!(received_signal(&h, &[Complex64::new(1.0, 0.0)]), Err(Error::Parameter(_))));
    }

    #[test]
    fn single_element_array_factor_is_the_weight() {
        let g = ula(1);
        let b = Beamformer::from_phases(&[0.7]);
        let af = array_factor(&ChannelModel::Nusw, &g, &SphericalPoint::boresight(2.0), b.weights())
            .unwrap();
        assert_relative_eq!(af.arg(), 0.7, epsilon = 1e-14);
        assert_relative_eq!(af.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn array_factor_reproduces_received_magnitude() {
        let g = ArrayGeometry::upa(4, 5, 0.004, LAMBDA).unwrap();
        let p = SphericalPoint::new(0.15, 1.1, 1.9).unwrap();
        let b = Beamformer::from_phases(&(0..20).map(|i| 0.37 * i as f64).collect::<Vec<_>>());
        for m in [ChannelModel::Usw, ChannelModel::Nusw, ChannelModel::gnc_isotropic()] {
            let y = received(&m, &g, &p, b.weights()).unwrap();
            let af = array_factor(&m, &g, &p, b.weights()).unwrap();
            let a = angular_gain(&m, &g, &p).unwrap();
            assert_relative_eq!(a * af.norm() / p.r, y.norm(), max_relative = 1e-10);
        }
    }

    #[test]
    fn unit_modulus_is_enforced() {
        assert!(Beamformer::new(vec![Complex64::new(0.5, 0.0)]).is_err());
        assert!(Beamformer::new(vec![Complex64::from_polar(1.0, 2.0)]).is_ok());
    }

    #[test]
    fn invalid_gain_callback_is_reported() {
        let bad: GainFn = Arc::new(|_, _| -1.0);
        let m = ChannelModel::Gnc { aperture: bad.clone(), polarization: bad };
        let r = channel_vector(&m, &ula(2), &SphericalPoint::boresight(1.0));
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
