//! Array layouts and element-to-observation distances.
//!
//! A ULA lies on the z-axis; a UPA lies on the xz-plane with `n1` rows along z
//! and `n2` columns along x. Layouts are centered on the origin: for odd sizes
//! the middle element sits exactly at the origin, for even sizes the elements
//! straddle it at half-spacing offsets.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const ORIGIN: Position3 = Position3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Position3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Position3) -> f64 {
        Position3::new(self.x - other.x, self.y - other.y, self.z - other.z).norm()
    }

    /// Spherical coordinates of this point about the origin. The azimuth is
    /// wrapped into `[0, 2π)`; at the origin the angles are zero.
    pub fn to_spherical(&self) -> SphericalPoint {
        let r = self.norm();
        if r == 0.0 {
            return SphericalPoint { r, theta: 0.0, phi: 0.0 };
        }
        let theta = (self.z / r).clamp(-1.0, 1.0).acos();
        let mut phi = self.y.atan2(self.x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        SphericalPoint { r, theta, phi }
    }
}

/// Observation point `(r, θ, φ)`, θ from the +z axis, φ from +x toward +y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::param(format!("radius must be finite and >= 0, got {r}")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::param(format!("theta must lie in [0, pi], got {theta}")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::param(format!("phi must lie in [0, 2pi), got {phi}")));
        }
        Ok(Self { r, theta, phi })
    }

    /// Point on the broadside direction of a z-axis ULA, in the yz-plane.
    pub fn boresight(r: f64) -> Self {
        Self { r, theta: PI / 2.0, phi: PI / 2.0 }
    }

    /// Unit direction `k(θ, φ)`.
    pub fn direction(&self) -> Position3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Position3::new(st * cp, st * sp, ct)
    }

    pub fn with_radius(&self, r: f64) -> Self {
        Self { r, ..*self }
    }
}

pub fn to_cartesian(point: &SphericalPoint) -> Position3 {
    let k = point.direction();
    Position3::new(point.r * k.x, point.r * k.y, point.r * k.z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayKind {
    Ula,
    Upa,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    kind: ArrayKind,
    n1: usize,
    n2: usize,
    spacing: f64,
    wavelength: f64,
    positions: Vec<Position3>,
    reference: usize,
}

impl ArrayGeometry {
    pub fn ula(n: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        build_array(ArrayKind::Ula, n, 1, spacing, wavelength)
    }

    pub fn upa(n1: usize, n2: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        build_array(ArrayKind::Upa, n1, n2, spacing, wavelength)
    }

    pub fn kind(&self) -> ArrayKind {
        self.kind
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn positions(&self) -> &[Position3] {
        &self.positions
    }

    /// Index of the reference element: the element nearest the array center,
    /// lowest index on ties.
    pub fn reference_index(&self) -> usize {
        self.reference
    }

    /// Largest element-to-element distance: `(n1-1)δ` for a ULA, the grid
    /// diagonal for a UPA.
    pub fn aperture_diameter(&self) -> f64 {
        let a = (self.n1 - 1) as f64;
        let b = (self.n2 - 1) as f64;
        self.spacing * (a * a + b * b).sqrt()
    }

    /// Returns the same layout shifted rigidly by `offset`.
    pub fn translated(&self, offset: Position3) -> Self {
        let positions = self
            .positions
            .iter()
            .map(|p| Position3::new(p.x + offset.x, p.y + offset.y, p.z + offset.z))
            .collect();
        Self { positions, ..self.clone() }
    }

    /// Distance from every element to `point`, via
    /// `r_n = sqrt(r² - 2r kᵀs_n + |s_n|²)`.
    pub fn element_distances(&self, point: &SphericalPoint) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        self.element_distances_into(point, &mut out);
        out
    }

    pub fn element_distances_into(&self, point: &SphericalPoint, out: &mut Vec<f64>) {
        let k = point.direction();
        let r = point.r;
        out.clear();
        out.extend(self.positions.iter().map(|s| {
            let sq = r * r - 2.0 * r * k.dot(s) + s.norm_sq();
            sq.max(0.0).sqrt()
        }));
    }
}

pub fn build_array(
    kind: ArrayKind,
    n1: usize,
    n2: usize,
    spacing: f64,
    wavelength: f64,
) -> Result<ArrayGeometry> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::param("element counts must be at least 1"));
    }
    if kind == ArrayKind::Ula && n2 != 1 {
        return Err(Error::param(format!("a ULA has a single column, got n2 = {n2}")));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::param(format!("spacing must be positive, got {spacing}")));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::param(format!("wavelength must be positive, got {wavelength}")));
    }

    let offset = |i: usize, n: usize| (i as f64 - (n as f64 - 1.0) / 2.0) * spacing;
    let mut positions = Vec::with_capacity(n1 * n2);
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let x = if kind == ArrayKind::Upa { offset(i2, n2) } else { 0.0 };
            positions.push(Position3::new(x, 0.0, offset(i1, n1)));
        }
    }

    let reference = positions
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(best, best_d), (i, p)| {
            let d = p.norm_sq();
            if d < best_d {
                (i, d)
            } else {
                (best, best_d)
            }
        })
        .0;

    Ok(ArrayGeometry { kind, n1, n2, spacing, wavelength, positions, reference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 0.01;

    #[test]
    fn single_element_sits_at_origin() {
        let g = ArrayGeometry::ula(1, LAMBDA / 2.0, LAMBDA).unwrap();
        assert_eq!(g.positions(), &[Position3::ORIGIN]);
        assert_eq!(g.aperture_diameter(), 0.0);
        let p = SphericalPoint::new(3.0, 0.7, 1.1).unwrap();
        assert_relative_eq!(g.element_distances(&p)[0], 3.0, max_relative = 1e-15);
    }

    #[test]
    fn five_element_half_wave_ula() {
        let g = ArrayGeometry::ula(5, LAMBDA / 2.0, LAMBDA).unwrap();
        let z: Vec<f64> = g.positions().iter().map(|p| p.z).collect();
        let expected = [-LAMBDA, -LAMBDA / 2.0, 0.0, LAMBDA / 2.0, LAMBDA];
        for (a, b) in z.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-18);
        }
        assert_relative_eq!(g.aperture_diameter(), 2.0 * LAMBDA, max_relative = 1e-15);
        assert_eq!(g.reference_index(), 2);
    }

    #[test]
    fn even_ula_straddles_origin() {
        let g = ArrayGeometry::ula(4, 1.0, LAMBDA).unwrap();
        let z: Vec<f64> = g.positions().iter().map(|p| p.z).collect();
        assert_eq!(z, vec![-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(g.reference_index(), 1);
    }

    #[test]
    fn large_upa_diagonal() {
        let d = LAMBDA / 2.0;
        let g = ArrayGeometry::upa(100, 100, d, LAMBDA).unwrap();
        assert_eq!(g.len(), 10_000);
        assert_relative_eq!(g.aperture_diameter(), 99.0 * d * 2f64.sqrt(), max_relative = 1e-14);
        assert!((g.aperture_diameter() / LAMBDA - 70.0).abs() < 0.05);
        assert!(g.positions().iter().all(|p| p.y == 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(ArrayGeometry::ula(3, 0.0, LAMBDA), Err(Error::Parameter(_))));
        assert!(matches!(ArrayGeometry::ula(3, 1.0, -1.0), Err(Error::Parameter(_))));
        assert!(matches!(build_array(ArrayKind::Ula, 3, 2, 1.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(ArrayGeometry::ula(0, 1.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn cartesian_conversion() {
        let p = to_cartesian(&SphericalPoint::new(1.0, PI / 2.0, 0.0).unwrap());
        assert_relative_eq!(p.x, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.y, 0.0, epsilon = 1e-15);
        assert_relative_eq!(p.z, 0.0, epsilon = 1e-15);

        let p = to_cartesian(&SphericalPoint::new(2.0, 0.0, 4.0).unwrap());
        assert_relative_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(p.z, 2.0, epsilon = 1e-15);

        let p = to_cartesian(&SphericalPoint::new(1.0, PI / 3.0, PI / 4.0).unwrap());
        assert_relative_eq!(p.x, 0.612_372_435_695_794_5, epsilon = 1e-12);
        assert_relative_eq!(p.y, 0.612_372_435_695_794_5, epsilon = 1e-12);
        assert_relative_eq!(p.z, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn spherical_round_trip() {
        let s = SphericalPoint::new(2.5, 1.2, 4.0).unwrap();
        let back = to_cartesian(&s).to_spherical();
        assert_relative_eq!(back.r, s.r, max_relative = 1e-14);
        assert_relative_eq!(back.theta, s.theta, max_relative = 1e-14);
        assert_relative_eq!(back.phi, s.phi, max_relative = 1e-14);
    }

    #[test]
    fn collinear_distances() {
        let g = ArrayGeometry::ula(5, 0.3, LAMBDA).unwrap();
        let p = SphericalPoint::new(4.0, 0.0, 0.0).unwrap();
        for (d, s) in g.element_distances(&p).iter().zip(g.positions()) {
            assert_relative_eq!(*d, (4.0 - s.z).abs(), max_relative = 1e-14);
        }
    }

    #[test]
    fn boresight_distances_are_symmetric() {
        let g = ArrayGeometry::ula(7, 0.25, LAMBDA).unwrap();
        let d = g.element_distances(&SphericalPoint::boresight(3.0));
        for i in 0..3 {
            assert_relative_eq!(d[i], d[6 - i], max_relative = 1e-15);
        }
    }

    #[test]
    fn translation_moves_every_element() {
        let g = ArrayGeometry::upa(3, 2, 1.0, LAMBDA).unwrap();
        let t = g.translated(Position3::new(0.0, 0.0, 0.5));
        for (a, b) in g.positions().iter().zip(t.positions()) {
            assert_eq!(b.z - a.z, 0.5);
        }
        assert_eq!(t.aperture_diameter(), g.aperture_diameter());
    }

    #[test]
    fn spherical_point_validation() {
        assert!(SphericalPoint::new(-1.0, 0.0, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, 4.0, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, 1.0, 2.0 * PI).is_err());
        assert!(SphericalPoint::new(f64::NAN, 1.0, 0.0).is_err());
    }
}
