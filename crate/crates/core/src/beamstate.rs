//! Core domain types and the scalar derived quantities of a quantum state
//! in a uniform magnetic field: magnetic width, Landau energy levels, mean
//! square radius, and the basic/nonbasic classification.
//!
//! Sign conventions: the charge `q` is a signed multiple of the elementary
//! charge and every formula is written with the signed value. Quantum
//! numbers `(n, ell, s_z)` are measured along the `+z` axis of the frame in
//! which the field magnitude is quoted; energy formulas here follow the
//! negative-charge statement, with the positive-charge case obtained by the
//! winding-number sign rule built into [`landau_energy`].

use crate::constants::{eb_natural, ELECTRON_MASS_EV, HBARC_EV_M};
use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// A charged (or neutral composite) particle species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleSpecies {
    /// Signed charge in units of the elementary charge (-1 for the electron).
    pub charge: i32,
    /// Rest energy, eV.
    pub mass_ev: f64,
    /// Spin projection on the quantization axis; one of -1/2, 0, +1/2.
    pub spin_z: f64,
}

impl ParticleSpecies {
    pub fn new(charge: i32, mass_ev: f64, spin_z: f64) -> Result<Self> {
        if !(mass_ev > 0.0) {
            return Err(Error::domain(format!("mass must be positive, got {mass_ev} eV")));
        }
        let doubled = 2.0 * spin_z;
        if (doubled - doubled.round()).abs() > 1e-12 || doubled.abs() > 1.0 + 1e-12 {
            return Err(Error::domain(format!(
                "spin projection must be -1/2, 0 or +1/2, got {spin_z}"
            )));
        }
        Ok(ParticleSpecies { charge, mass_ev, spin_z })
    }

    pub fn electron(spin_z: f64) -> Result<Self> {
        Self::new(-1, ELECTRON_MASS_EV, spin_z)
    }

    pub fn positron(spin_z: f64) -> Result<Self> {
        Self::new(1, ELECTRON_MASS_EV, spin_z)
    }

    /// `2 s_z` as an exact integer.
    pub fn two_spin_z(&self) -> i64 {
        (2.0 * self.spin_z).round() as i64
    }

    /// Sign of the charge as an integer; zero for neutral species.
    pub fn charge_sign(&self) -> i64 {
        i64::from(self.charge.signum())
    }

    /// Errors unless the species carries charge.
    pub fn require_charged(&self) -> Result<()> {
        if self.charge == 0 {
            Err(Error::domain("operation requires a charged species"))
        } else {
            Ok(())
        }
    }
}

/// The quantum state transported through field regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamQuantumState {
    pub species: ParticleSpecies,
    /// Radial quantum number, n >= 0.
    pub n: u32,
    /// Winding (orbital angular momentum) quantum number, in hbar units.
    pub ell: i64,
    /// Longitudinal momentum, eV.
    pub p_z_ev: f64,
    /// Beam waist, m.
    pub w0_m: f64,
    /// Offset of the state's symmetry axis from the local solenoid axis, m.
    pub axis_offset_m: Vec2,
    /// Extrinsic transverse kinetic momentum of the beam as a whole, eV.
    pub extrinsic_momentum_ev: Vec2,
}

impl BeamQuantumState {
    pub fn new(
        species: ParticleSpecies,
        n: u32,
        ell: i64,
        p_z_ev: f64,
        w0_m: f64,
    ) -> Result<Self> {
        if !(p_z_ev > 0.0) {
            return Err(Error::domain(format!(
                "longitudinal momentum must be positive, got {p_z_ev} eV"
            )));
        }
        if !(w0_m > 0.0) {
            return Err(Error::domain(format!("beam waist must be positive, got {w0_m} m")));
        }
        Ok(BeamQuantumState {
            species,
            n,
            ell,
            p_z_ev,
            w0_m,
            axis_offset_m: Vec2::ZERO,
            extrinsic_momentum_ev: Vec2::ZERO,
        })
    }

    pub fn with_axis_offset(mut self, offset_m: Vec2) -> Self {
        self.axis_offset_m = offset_m;
        self
    }

    pub fn with_extrinsic_momentum(mut self, pi0_ev: Vec2) -> Self {
        self.extrinsic_momentum_ev = pi0_ev;
        self
    }

    /// Wavenumber of the beam in natural units (equals p_z with hbar = 1).
    pub fn wavenumber_ev(&self) -> f64 {
        self.p_z_ev
    }
}

/// Eligibility of a state for particle production in the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    /// `sgn(e) ell <= 0`: reachable through production in the field.
    Basic,
    /// `sgn(e) ell > 0`: only reachable by injection with matched parameters.
    Nonbasic,
}

/// Transverse magnetic width of the Landau levels, `w_m = 2 sqrt(hbar/(|e| B))`,
/// in meters. Scales as `B^(-1/2)`; 5.1e-8 m for an electron at 1 T.
pub fn magnetic_width(b_tesla: f64, species: &ParticleSpecies) -> Result<f64> {
    species.require_charged()?;
    if b_tesla == 0.0 {
        return Err(Error::domain("magnetic width undefined in zero field"));
    }
    let eb = eb_natural(species.charge.abs(), b_tesla.abs());
    Ok(2.0 / eb.sqrt() * HBARC_EV_M)
}

/// The integer quantum-number sum entering the Landau level energies:
/// `2n + 1 + |ell| - sgn(q) ell + 2 s_z`. Non-negative for |s_z| <= 1/2.
pub fn landau_quantum_sum(species: &ParticleSpecies, n: u32, ell: i64) -> i64 {
    2 * i64::from(n) + 1 + ell.abs() - species.charge_sign() * ell + species.two_spin_z()
}

/// Relativistic Landau level energy, eV.
///
/// `E = sqrt(m^2 + p_z^2 + Q |e| B)` with the quantum-number sum `Q` from
/// [`landau_quantum_sum`]. States with equal `Q` are exactly degenerate.
pub fn landau_energy(state: &BeamQuantumState, b_tesla: f64) -> Result<f64> {
    landau_energy_parts(
        &state.species,
        state.n,
        state.ell,
        state.p_z_ev,
        b_tesla,
    )
}

/// [`landau_energy`] from bare quantum numbers.
pub fn landau_energy_parts(
    species: &ParticleSpecies,
    n: u32,
    ell: i64,
    p_z_ev: f64,
    b_tesla: f64,
) -> Result<f64> {
    species.require_charged()?;
    if b_tesla == 0.0 {
        return Err(Error::domain("Landau energy undefined in zero field"));
    }
    let q_sum = landau_quantum_sum(species, n, ell);
    let eb = eb_natural(species.charge.abs(), b_tesla.abs());
    let radicand = species.mass_ev * species.mass_ev + p_z_ev * p_z_ev + (q_sum as f64) * eb;
    if radicand < 0.0 {
        return Err(Error::domain(format!(
            "negative energy radicand for quantum sum {q_sum} at B = {b_tesla} T"
        )));
    }
    Ok(radicand.sqrt())
}

/// Mean square radius of a Landau state about its symmetry axis, m^2:
/// `<r^2> = 2 (2n + |ell| + 1) / (|e| B) = (2n + |ell| + 1) w_m^2 / 2`.
pub fn mean_square_radius(
    n: u32,
    ell: i64,
    b_tesla: f64,
    species: &ParticleSpecies,
) -> Result<f64> {
    let w_m = magnetic_width(b_tesla, species)?;
    let k = (2 * i64::from(n) + ell.abs() + 1) as f64;
    Ok(k * w_m * w_m / 2.0)
}

/// Classify a state as eligible (basic) or ineligible (nonbasic) for
/// production in the field: basic iff `sgn(e) ell <= 0`.
pub fn classify_state(species: &ParticleSpecies, ell: i64) -> Result<StateClass> {
    species.require_charged()?;
    if species.charge_sign() * ell <= 0 {
        Ok(StateClass::Basic)
    } else {
        Ok(StateClass::Nonbasic)
    }
}
