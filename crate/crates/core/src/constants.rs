//! Physical constants (CODATA 2018) and unit conversions.

pub use core::f64::consts::PI;

/// 2π
pub const TAU: f64 = 2.0 * PI;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// One gauss in tesla.
pub const GAUSS: f64 = 1.0e-4;

#[inline]
pub fn gauss_to_tesla(b: f64) -> f64 {
    b * GAUSS
}

#[inline]
pub fn tesla_to_gauss(b: f64) -> f64 {
    b / GAUSS
}

#[inline]
pub fn bohr_to_m(a: f64) -> f64 {
    a * BOHR_RADIUS
}

#[inline]
pub fn m_to_bohr(a: f64) -> f64 {
    a / BOHR_RADIUS
}

/// Hz -> rad/s
#[inline]
pub fn hz_to_angular(f: f64) -> f64 {
    TAU * f
}

/// rad/s -> Hz
#[inline]
pub fn angular_to_hz(w: f64) -> f64 {
    w / TAU
}
