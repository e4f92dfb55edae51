//! Physical constants and the SI <-> CGS conversions used at the library edges.
//!
//! Everything inside the crate is Gaussian CGS: lengths in cm, angular
//! frequencies in rad/s, power in erg/s, χ(3) in esu.

use std::f64::consts::PI;

/// Speed of light in vacuum, cm/s.
pub const C_CGS: f64 = 2.997_924_58e10;
/// Reduced Planck constant, erg·s.
pub const HBAR_CGS: f64 = 1.054_571_817e-27;

pub const CM_PER_NM: f64 = 1e-7;
pub const CM_PER_UM: f64 = 1e-4;
pub const CM_PER_MM: f64 = 0.1;
pub const ERG_PER_S_PER_WATT: f64 = 1e7;
pub const SECONDS_PER_PS: f64 = 1e-12;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub fn nm_to_cm(nm: f64) -> f64 {
    nm * CM_PER_NM
}

pub fn mm_to_cm(mm: f64) -> f64 {
    mm * CM_PER_MM
}

pub fn watts_to_cgs(w: f64) -> f64 {
    w * ERG_PER_S_PER_WATT
}

pub fn seconds_to_days(s: f64) -> f64 {
    s / SECONDS_PER_DAY
}

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda_cm`.
pub fn omega_from_wavelength_cm(lambda_cm: f64) -> f64 {
    2.0 * PI * C_CGS / lambda_cm
}

pub fn omega_from_nm(nm: f64) -> f64 {
    omega_from_wavelength_cm(nm_to_cm(nm))
}

/// Vacuum wavelength (cm) for angular frequency `omega`.
pub fn wavelength_cm_from_omega(omega: f64) -> f64 {
    2.0 * PI * C_CGS / omega
}
