//! Transverse mode structure: vacuum Laguerre-Gauss beams, Landau modes,
//! the in-field LG envelope with its width oscillation, and Gouy phases.
//!
//! Lengths at this interface are meters and wavenumbers are the beam
//! momentum in eV; amplitudes are normalized so that
//! `int |Psi|^2 r dr dphi = 1` with `r` in meters.
//!
//! The envelope and phase formulas are written for a negatively charged
//! particle. For a positive charge apply the winding-sign rule ("replace
//! `ell` by `-ell`") before calling.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::beamstate::{magnetic_width, ParticleSpecies};
use crate::constants::{eb_natural, HBARC_EV_M};
use crate::error::{Error, Result};
use crate::laguerre::{laguerre, ln_norm_constant};

/// A sampled complex mode value with the pieces of its phase.
#[derive(Debug, Clone, Copy)]
pub struct ModeAmplitude {
    pub value: Complex64,
    pub n: u32,
    pub ell: i64,
    /// Width w at the sampled z, m.
    pub width_m: f64,
    /// Winding part of the phase, `ell * phi`.
    pub phase_azimuthal: f64,
    /// Wavefront curvature part, `k r^2 / (2 R)`; zero on flat wavefronts.
    pub phase_curvature: f64,
    /// Gouy part (enters the total phase with a minus sign).
    pub phase_gouy: f64,
}

/// Envelope quantities at one z.
///
/// The wavefront curvature is exposed as `1/R` so the flat points
/// (`R -> infinity`) are regular values, not overflows.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopePoint {
    pub width_m: f64,
    pub inv_radius_per_m: f64,
    pub gouy_rad: f64,
}

/// Sampled envelope along z.
#[derive(Debug, Clone, Default)]
pub struct EnvelopeTrace {
    pub z_m: Vec<f64>,
    pub width_m: Vec<f64>,
    pub inv_radius_per_m: Vec<f64>,
    pub gouy_rad: Vec<f64>,
}

impl EnvelopeTrace {
    pub fn push(&mut self, z: f64, p: EnvelopePoint) {
        self.z_m.push(z);
        self.width_m.push(p.width_m);
        self.inv_radius_per_m.push(p.inv_radius_per_m);
        self.gouy_rad.push(p.gouy_rad);
    }
}

fn wavenumber_per_m(k_ev: f64) -> f64 {
    k_ev / HBARC_EV_M
}

/// Magnetic width for a unit-charge particle, m. The envelope formulas in
/// this module all refer to singly charged beams.
pub fn magnetic_width_unit_charge(b_tesla: f64) -> Result<f64> {
    if b_tesla == 0.0 {
        return Err(Error::domain("magnetic width undefined in zero field"));
    }
    Ok(2.0 / eb_natural(1, b_tesla.abs()).sqrt() * HBARC_EV_M)
}

/// Oscillation half-period scale of the in-field envelope, `z_m = k w_m^2 / 2`, m.
pub fn magnetic_rayleigh_length(b_tesla: f64, k_ev: f64) -> Result<f64> {
    let w_m = magnetic_width_unit_charge(b_tesla)?;
    Ok(wavenumber_per_m(k_ev) * w_m * w_m / 2.0)
}

/// Continuous branch of `arctan(a tan x)`, increasing in x for a > 0.
fn unwrapped_arctan_tan(a: f64, x: f64) -> f64 {
    let m = (x / PI).round();
    let xr = x - m * PI;
    m * PI + (a * xr.tan()).atan()
}

/// Radial profile `C/w (sqrt2 r/w)^{|l|} L_n^{|l|}(2r^2/w^2) exp(-r^2/w^2)`,
/// evaluated in log space so large winding numbers do not overflow.
fn radial_profile(n: u32, ell: i64, w: f64, r: f64) -> f64 {
    let m = ell.unsigned_abs() as f64;
    let t = 2.0 * r * r / (w * w);
    let lag = laguerre(n, m, t);
    let log_part = if r == 0.0 {
        if ell == 0 {
            ln_norm_constant(n, ell) - w.ln()
        } else {
            return 0.0;
        }
    } else {
        ln_norm_constant(n, ell) - w.ln() + 0.5 * m * (t.ln()) - 0.5 * t
    };
    lag * log_part.exp()
}

/// Vacuum LG envelope: width, curvature and Gouy phase of the free beam.
pub fn vacuum_envelope(n: u32, ell: i64, w0_m: f64, k_ev: f64, z_m: f64) -> Result<EnvelopePoint> {
    if !(w0_m > 0.0) || !(k_ev > 0.0) {
        return Err(Error::domain("vacuum envelope requires w0 > 0 and k > 0"));
    }
    let k = wavenumber_per_m(k_ev);
    let zr = k * w0_m * w0_m / 2.0; // Rayleigh length
    let ratio = z_m / zr;
    let width = w0_m * (1.0 + ratio * ratio).sqrt();
    // 1/R = z / (z^2 + zr^2), regular at z = 0
    let inv_radius = z_m / (z_m * z_m + zr * zr);
    let pref = (2 * i64::from(n) + ell.abs() + 1) as f64;
    let gouy = pref * ratio.atan();
    Ok(EnvelopePoint { width_m: width, inv_radius_per_m: inv_radius, gouy_rad: gouy })
}

/// Vacuum Laguerre-Gauss mode value at `(r, phi, z)`.
pub fn lg_vacuum_amplitude(
    n: u32,
    ell: i64,
    w0_m: f64,
    k_ev: f64,
    r_m: f64,
    phi: f64,
    z_m: f64,
) -> Result<ModeAmplitude> {
    if r_m < 0.0 {
        return Err(Error::domain("radial coordinate must be non-negative"));
    }
    let env = vacuum_envelope(n, ell, w0_m, k_ev, z_m)?;
    mode_from_envelope(n, ell, k_ev, r_m, phi, env)
}

/// Landau mode transverse profile at `(r, phi)`; the trivial longitudinal
/// plane-wave factor is omitted.
pub fn landau_mode(
    n: u32,
    ell: i64,
    b_tesla: f64,
    species: &ParticleSpecies,
    r_m: f64,
    phi: f64,
) -> Result<ModeAmplitude> {
    if r_m < 0.0 {
        return Err(Error::domain("radial coordinate must be non-negative"));
    }
    let w_m = magnetic_width(b_tesla, species)?;
    let amp = radial_profile(n, ell, w_m, r_m);
    let phase = ell as f64 * phi;
    Ok(ModeAmplitude {
        value: Complex64::from_polar(amp.abs(), phase + if amp < 0.0 { PI } else { 0.0 }),
        n,
        ell,
        width_m: w_m,
        phase_azimuthal: phase,
        phase_curvature: 0.0,
        phase_gouy: 0.0,
    })
}

/// In-field LG envelope: oscillating width, curvature and Gouy phase of a
/// unit-charge beam in a uniform field.
///
/// `w(z)` is periodic with period `pi z_m` and collapses to the constant
/// `w_m` when `w0 = w_m`.
pub fn field_envelope(
    n: u32,
    ell: i64,
    spin_z: f64,
    w0_m: f64,
    b_tesla: f64,
    k_ev: f64,
    z_m: f64,
) -> Result<EnvelopePoint> {
    if !(w0_m > 0.0) || !(k_ev > 0.0) {
        return Err(Error::domain("field envelope requires w0 > 0 and k > 0"));
    }
    let w_mag = magnetic_width_unit_charge(b_tesla)?;
    let z_scale = magnetic_rayleigh_length(b_tesla, k_ev)?;
    let k = wavenumber_per_m(k_ev);
    let u = z_m / z_scale;
    let rho = (w_mag / w0_m).powi(2);
    let (s, c) = u.sin_cos();
    // w^2 = w0^2 (1 + (rho^2 - 1) sin^2 u): exactly w0 at the matched waist
    let shape = 1.0 + (rho * rho - 1.0) * s * s;
    let w = w0_m * shape.sqrt();
    // R(z) = k w_m^2 shape / ((rho^2 - 1) sin 2u); flat where sin 2u = 0
    let denom = (rho * rho - 1.0) * 2.0 * s * c;
    let inv_radius = denom / (k * w_mag * w_mag * shape);
    let pref = (2 * i64::from(n) + ell.abs() + 1) as f64;
    let gouy = pref * unwrapped_arctan_tan(rho, u) + (ell as f64 + 2.0 * spin_z) * u;
    Ok(EnvelopePoint { width_m: w, inv_radius_per_m: inv_radius, gouy_rad: gouy })
}

/// In-field LG mode value at `(r, phi, z)` for a unit-charge beam.
#[allow(clippy::too_many_arguments)]
pub fn lg_field_amplitude(
    n: u32,
    ell: i64,
    spin_z: f64,
    w0_m: f64,
    b_tesla: f64,
    k_ev: f64,
    r_m: f64,
    phi: f64,
    z_m: f64,
) -> Result<ModeAmplitude> {
    if r_m < 0.0 {
        return Err(Error::domain("radial coordinate must be non-negative"));
    }
    let env = field_envelope(n, ell, spin_z, w0_m, b_tesla, k_ev, z_m)?;
    mode_from_envelope(n, ell, k_ev, r_m, phi, env)
}

fn mode_from_envelope(
    n: u32,
    ell: i64,
    k_ev: f64,
    r_m: f64,
    phi: f64,
    env: EnvelopePoint,
) -> Result<ModeAmplitude> {
    let k = wavenumber_per_m(k_ev);
    let amp = radial_profile(n, ell, env.width_m, r_m);
    let phase_azimuthal = ell as f64 * phi;
    let phase_curvature = 0.5 * k * r_m * r_m * env.inv_radius_per_m;
    let phase = phase_azimuthal + phase_curvature - env.gouy_rad;
    Ok(ModeAmplitude {
        value: Complex64::from_polar(amp.abs(), phase + if amp < 0.0 { PI } else { 0.0 }),
        n,
        ell,
        width_m: env.width_m,
        phase_azimuthal,
        phase_curvature,
        phase_gouy: env.gouy_rad,
    })
}

/// Linear-in-z Gouy phase of the paraxial Landau beam,
/// `(2n + 1 + |ell| + ell + 2 s_z) z / z_m`.
pub fn paraxial_gouy(n: u32, ell: i64, spin_z: f64, z_m: f64, z_scale_m: f64) -> Result<f64> {
    if !(z_scale_m > 0.0) {
        return Err(Error::domain("Gouy scale z_m must be positive"));
    }
    let pref = (2 * i64::from(n) + 1 + ell.abs() + ell) as f64 + 2.0 * spin_z;
    Ok(pref * z_m / z_scale_m)
}
