//! Near-field sub-region characterization for phased-array antennas.
//!
//! The crate covers three boundaries around an array aperture:
//!
//! - the angle-dependent Fraunhofer distance ([`fraunhofer`]),
//! - the radial beamfocusing region under MRT and the iterative focal-placement
//!   solver ([`focus`]),
//! - the non-radiating distance of a thin-dipole ULA, computed from the exact
//!   near-field integrals ([`dipole`]).
//!
//! All quantities are SI: meters, radians, amperes. Frequency only enters
//! through [`wavelength_from_frequency`].

pub mod channel;
pub mod dipole;
mod error;
pub mod focus;
pub mod fraunhofer;
pub mod geometry;
pub mod quadrature;
pub mod roots;

pub use channel::{Beamformer, ChannelModel, ChannelVector, GainFn};
pub use error::{Error, Result};
pub use geometry::{ArrayGeometry, ArrayKind, Position3, SphericalPoint};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space wave impedance, ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730_313_668;

pub fn wavelength_from_frequency(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}
