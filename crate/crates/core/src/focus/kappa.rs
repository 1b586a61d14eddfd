//! Normalized off-target amplitude `κ` under MRT.
//!
//! `κ = |y(r, MRT(r̄))| / |y(r̄, MRT(r̄))|`. For a ULA the sum over elements is
//! approximated by integrals over a continuous index `n ∈ [-N/2, N/2]`, with
//! the phase mismatch expanded to second order, `η1 n + η2 n²`:
//!
//! ```text
//! A_N = ∫ cos(η1 n + η2 n²) / r_n dn
//! B_N = ∫ sin(η1 n + η2 n²) / r_n dn
//! C_N = ∫ 1 / r̄_n dn
//! κ ≈ √(A_N² + B_N²) / C_N
//! ```

use std::f64::consts::PI;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, ArrayKind, SphericalPoint};
use crate::quadrature::{integrate_real, QuadratureOptions};

use super::{amplitude, mrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaResult {
    pub n1: usize,
    pub n2: usize,
    pub kappa: f64,
}

pub fn kappa_direct(
    model: &ChannelModel,
    geometry: &ArrayGeometry,
    target: &SphericalPoint,
    point: &SphericalPoint,
) -> Result<KappaResult> {
    let b = mrt(geometry, target)?;
    let at_target = amplitude(model, geometry, target, b.weights())?;
    let at_point = amplitude(model, geometry, point, b.weights())?;
    if at_target == 0.0 {
        return Err(Error::Numeric("MRT amplitude vanishes at its own target".into()));
    }
    Ok(KappaResult { n1: geometry.n1(), n2: geometry.n2(), kappa: at_point / at_target })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaDecomposition {
    pub eta1: f64,
    pub eta2: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub c_n: f64,
    pub kappa_est: f64,
}

/// Pieces per unit of accumulated phase; keeps each quadrature panel
/// well inside one oscillation.
const PANELS_PER_RADIAN: f64 = 0.25;

fn panel_integral(f: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64, pieces: usize) -> Result<f64> {
    let opts = QuadratureOptions::with_rel_tol(1e-11);
    let width = (hi - lo) / pieces as f64;
    (0..pieces).try_fold(0.0, |acc, i| {
        let a = lo + width * i as f64;
        Ok(acc + integrate_real(f, a, a + width, opts)?)
    })
}

pub fn kappa_integral_decomposition(
    geometry: &ArrayGeometry,
    target: &SphericalPoint,
    point: &SphericalPoint,
) -> Result<KappaDecomposition> {
    if geometry.kind() != ArrayKind::Ula {
        return Err(Error::Unsupported("the integral decomposition is implemented for ULAs only".into()));
    }
    let lambda = geometry.wavelength();
    let delta = geometry.spacing();
    let half = geometry.len() as f64 / 2.0;
    let (st, ct) = point.theta.sin_cos();
    let (stb, ctb) = target.theta.sin_cos();
    let eta1 = 2.0 * PI / lambda * delta * (ctb - ct);
    let eta2 = PI * delta * delta / lambda * (st * st / point.r - stb * stb / target.r);

    let dist = |r: f64, c: f64, n: f64| (r * r - 2.0 * r * n * delta * c + n * n * delta * delta).sqrt();
    let (r, rb) = (point.r, target.r);
    let phase = |n: f64| eta1 * n + eta2 * n * n;

    let swing = eta1.abs() * half + eta2.abs() * half * half;
    let pieces = ((swing * PANELS_PER_RADIAN).ceil() as usize).clamp(1, 100_000);
    let a_n = panel_integral(|n| phase(n).cos() / dist(r, ct, n), -half, half, pieces)?;
    let b_n = panel_integral(|n| phase(n).sin() / dist(r, ct, n), -half, half, pieces)?;
    let c_n = panel_integral(|n| 1.0 / dist(rb, ctb, n), -half, half, 1)?;
    if c_n.is_nan() || c_n <= 0.0 {
        return Err(Error::Numeric(format!("degenerate normalization integral {c_n}")));
    }
    Ok(KappaDecomposition { eta1, eta2, a_n, b_n, c_n, kappa_est: a_n.hypot(b_n) / c_n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = crate::SPEED_OF_LIGHT / 28e9;

    fn ula(n: usize) -> ArrayGeometry {
        ArrayGeometry::ula(n, LAMBDA / 2.0, LAMBDA).unwrap()
    }

    #[test]
    fn coincident_points_give_unity() {
        let t = SphericalPoint::boresight(6.0);
        let k = kappa_direct(&ChannelModel::Nusw, &ula(101), &t, &t).unwrap();
        assert_relative_eq!(k.kappa, 1.0, max_relative = 1e-14);
        let d = kappa_integral_decomposition(&ula(101), &t, &t).unwrap();
        assert_eq!(d.eta1, 0.0);
        assert_eq!(d.eta2, 0.0);
        assert_eq!(d.b_n, 0.0);
        assert_relative_eq!(d.a_n, d.c_n, max_relative = 1e-12);
        assert_relative_eq!(d.kappa_est, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn boresight_normalization_has_closed_form() {
        let g = ula(400);
        let t = SphericalPoint::boresight(6.0);
        let d = kappa_integral_decomposition(&g, &t, &SphericalPoint::boresight(4.0)).unwrap();
        let delta = LAMBDA / 2.0;
        let exact = 2.0 / delta * (delta * 400.0 / 12.0).asinh();
        assert_relative_eq!(d.c_n, exact, max_relative = 1e-10);
    }

    #[test]
    fn integral_tracks_direct_sum() {
        let g = ula(400);
        let t = SphericalPoint::boresight(6.0);
        let p = SphericalPoint::boresight(4.0);
        let direct = kappa_direct(&ChannelModel::Nusw, &g, &t, &p).unwrap().kappa;
        let est = kappa_integral_decomposition(&g, &t, &p).unwrap().kappa_est;
        assert!((est - direct).abs() / direct < 0.1, "direct {direct}, integral {est}");
    }

    #[test]
    fn planar_arrays_are_unsupported() {
        let g = ArrayGeometry::upa(5, 5, LAMBDA / 2.0, LAMBDA).unwrap();
        let t = SphericalPoint::boresight(1.0);
        assert!(matches!(kappa_integral_decomposition(&g, &t, &t), Err(Error::Unsupported(_))));
    }
}
