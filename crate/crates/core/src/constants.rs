//! Physical constants (CODATA 2018) and the natural-unit conversions used
//! throughout the crate.
//!
//! Internally everything is expressed in natural units with `hbar = c = 1`:
//! energies and momenta in eV, lengths and times in 1/eV. Magnetic fields
//! enter formulas only through the product `|e| B`, which in natural units
//! has dimension eV^2; [`eb_natural`] performs that conversion from tesla.
//! SI values appear at I/O boundaries only, via [`UnitContext`].

/// Elementary charge, C (exact since the 2019 SI redefinition).
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Reduced Planck constant, eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Speed of light, m/s (exact).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Electron rest energy, eV.
pub const ELECTRON_MASS_EV: f64 = 510_998.950_00;

/// hbar·c in eV·m; the length of 1/eV in meters.
pub const HBARC_EV_M: f64 = 1.973_269_804e-7;

/// `|e| B` in natural units (eV^2) for a 1 T field and unit charge multiple.
///
/// Equal to `hbar c^2 / e` expressed in eV^2/T. The Landau magnetic width
/// `w_m = 2 / sqrt(|e| B)` built from this value reproduces 5.1e-8 m at 1 T.
pub const EB_PER_TESLA: f64 =
    HBAR_SI * SPEED_OF_LIGHT_SI * SPEED_OF_LIGHT_SI / ELEMENTARY_CHARGE_SI / ELEMENTARY_CHARGE_SI
        * ELEMENTARY_CHARGE_SI;

/// Bohr magneton, eV/T.
pub const BOHR_MAGNETON_EV_PER_T: f64 = EB_PER_TESLA / (2.0 * ELECTRON_MASS_EV);

/// Positronium binding energy, eV (the 6.8 eV dissociation threshold).
pub const POSITRONIUM_BINDING_EV: f64 = 6.8;

/// Convert a signed field (tesla) and signed charge multiple into the
/// natural-unit product `q e B` in eV^2.
#[inline]
pub fn eb_natural(charge: i32, b_tesla: f64) -> f64 {
    f64::from(charge) * b_tesla * EB_PER_TESLA
}

/// Conversions between SI and the internal natural units.
///
/// All methods are pure scale factors; round trips are identities to
/// floating-point precision.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitContext;

impl UnitContext {
    pub fn new() -> Self {
        UnitContext
    }

    /// Length: meters to 1/eV.
    #[inline]
    pub fn m_to_natural(&self, meters: f64) -> f64 {
        meters / HBARC_EV_M
    }

    /// Length: 1/eV to meters.
    #[inline]
    pub fn natural_to_m(&self, inv_ev: f64) -> f64 {
        inv_ev * HBARC_EV_M
    }

    /// Time: seconds to 1/eV.
    #[inline]
    pub fn s_to_natural(&self, seconds: f64) -> f64 {
        seconds / HBAR_EV_S
    }

    /// Time: 1/eV to seconds.
    #[inline]
    pub fn natural_to_s(&self, inv_ev: f64) -> f64 {
        inv_ev * HBAR_EV_S
    }

    /// Field times unit charge: tesla to eV^2.
    #[inline]
    pub fn tesla_to_natural(&self, tesla: f64) -> f64 {
        tesla * EB_PER_TESLA
    }

    /// Field times unit charge: eV^2 to tesla.
    #[inline]
    pub fn natural_to_tesla(&self, ev2: f64) -> f64 {
        ev2 / EB_PER_TESLA
    }

    /// Angular frequency: natural (eV) to rad/s.
    #[inline]
    pub fn natural_to_rad_per_s(&self, ev: f64) -> f64 {
        ev / HBAR_EV_S
    }
}
