//! Canonical/kinetic, intrinsic/extrinsic orbital angular momentum
//! bookkeeping.
//!
//! The canonical OAM `L = r x p` is gauge-dependent but conserved in the
//! situations modeled here; the kinetic OAM `script_L = r x pi` is gauge
//! invariant and generally not conserved. They are connected by
//! `script_L_z = L_z - (e B_z / 2) r^2`. Where the relations are exact
//! integer statements the functions return integers so tests can be sharp.

use crate::beamstate::{classify_state, BeamQuantumState, ParticleSpecies, StateClass};
use crate::constants::{eb_natural, HBARC_EV_M};
use crate::error::Result;


/// Kinetic OAM from the canonical one at a given squared radius:
/// `script_L_z = L_z - (e B_z / 2) r^2`, everything in hbar units.
pub fn kinetic_from_canonical(
    l_z_hbar: f64,
    b_z_tesla: f64,
    species: &ParticleSpecies,
    r_sq_m2: f64,
) -> f64 {
    let r_sq_nat = r_sq_m2 / (HBARC_EV_M * HBARC_EV_M);
    l_z_hbar - 0.5 * eb_natural(species.charge, b_z_tesla) * r_sq_nat
}

/// Landau-state expectation of the kinetic OAM, exact in integer hbar:
/// `<script_L_z> = ell - sgn(e) (2n + |ell| + 1)`.
pub fn landau_kinetic(n: u32, ell: i64, species: &ParticleSpecies) -> Result<i64> {
    species.require_charged()?;
    Ok(ell - species.charge_sign() * (2 * i64::from(n) + ell.abs() + 1))
}

/// The exact integer identity
/// `<script_L_z> - 2 L_z = -sgn(e) [2n + |ell| + sgn(e) ell + 1]`.
pub fn landau_kinetic_minus_twice_canonical(
    n: u32,
    ell: i64,
    species: &ParticleSpecies,
) -> Result<i64> {
    species.require_charged()?;
    let s = species.charge_sign();
    Ok(-s * (2 * i64::from(n) + ell.abs() + s * ell + 1))
}

/// Classical limit of the kinetic/canonical connection (no radial motion):
/// `script_L_z = L_z - sgn(e) |L_z|`, i.e. `2 L_z` on the natural branch
/// and `0` on the other.
pub fn classical_limit_kinetic(l_z_hbar: f64, species: &ParticleSpecies) -> f64 {
    l_z_hbar - species.charge_sign() as f64 * l_z_hbar.abs()
}

/// Intrinsic canonical OAM of a state prepared at radius `r` with azimuthal
/// kinetic momentum `pi_phi`: `L_z^(i) = -sgn(e) r |pi_phi| / 2` in hbar.
///
/// The absolute value assumes the natural rotation sense; nonbasic inputs
/// should be flagged by the caller (see [`OamLedger::for_state_in_field`]).
pub fn intrinsic_canonical(r_m: f64, pi_phi_ev: f64, species: &ParticleSpecies) -> f64 {
    let r_nat = r_m / HBARC_EV_M;
    -(species.charge_sign() as f64) * r_nat * pi_phi_ev.abs() / 2.0
}

/// Time-dependent kinetic OAM of a state whose symmetry axis sits at `R0`
/// from the solenoid axis:
/// `script_L_z = L_z - (e B_z/2) [R0^2 + r^2 + 2 R0 r cos(omega t + phi)]`.
pub fn time_dependent_kinetic(
    l_z_hbar: f64,
    b_z_tesla: f64,
    species: &ParticleSpecies,
    r0_m: f64,
    r_m: f64,
    phase_rad: f64,
) -> f64 {
    let to_nat = 1.0 / HBARC_EV_M;
    let r0 = r0_m * to_nat;
    let r = r_m * to_nat;
    let bracket = r0 * r0 + r * r + 2.0 * r0 * r * phase_rad.cos();
    l_z_hbar - 0.5 * eb_natural(species.charge, b_z_tesla) * bracket
}

/// Which axis a contribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OamComponent {
    /// About the state's own symmetry axis.
    Intrinsic,
    /// About the solenoid axis (motion of the beam as a whole).
    Extrinsic,
}

impl std::fmt::Display for OamComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OamComponent::Intrinsic => write!(f, "intrinsic"),
            OamComponent::Extrinsic => write!(f, "extrinsic"),
        }
    }
}

/// One tagged contribution to the ledger.
#[derive(Debug, Clone)]
pub struct OamContribution {
    pub source: String,
    pub component: OamComponent,
    pub canonical_hbar: f64,
    pub kinetic_hbar: f64,
}

/// The canonical/kinetic x intrinsic/extrinsic OAM bookkeeping of one state.
///
/// Contributions keep their source tags for diagnostics, but only the
/// totals are physical: far from a boundary the split of the intrinsic
/// canonical OAM into production and transition parts is not observable.
#[derive(Debug, Clone, Default)]
pub struct OamLedger {
    pub contributions: Vec<OamContribution>,
    pub notes: Vec<String>,
}

impl OamLedger {
    pub fn add(
        &mut self,
        source: impl Into<String>,
        component: OamComponent,
        canonical_hbar: f64,
        kinetic_hbar: f64,
    ) {
        self.contributions.push(OamContribution {
            source: source.into(),
            component,
            canonical_hbar,
            kinetic_hbar,
        });
    }

    fn sum(&self, component: OamComponent, kinetic: bool) -> f64 {
        self.contributions
            .iter()
            .filter(|c| c.component == component)
            .map(|c| if kinetic { c.kinetic_hbar } else { c.canonical_hbar })
            .sum()
    }

    pub fn canonical_intrinsic(&self) -> f64 {
        self.sum(OamComponent::Intrinsic, false)
    }

    pub fn canonical_extrinsic(&self) -> f64 {
        self.sum(OamComponent::Extrinsic, false)
    }

    pub fn kinetic_intrinsic(&self) -> f64 {
        self.sum(OamComponent::Intrinsic, true)
    }

    pub fn kinetic_extrinsic(&self) -> f64 {
        self.sum(OamComponent::Extrinsic, true)
    }

    pub fn total_canonical(&self) -> f64 {
        self.canonical_intrinsic() + self.canonical_extrinsic()
    }

    pub fn total_kinetic(&self) -> f64 {
        self.kinetic_intrinsic() + self.kinetic_extrinsic()
    }

    /// Ledger of a Landau/LG state resident in a uniform field.
    ///
    /// Intrinsic: canonical `ell`, kinetic from the Landau expectation.
    /// Extrinsic: canonical `(R0 x pi0) + (e B/2) R0^2`, kinetic `R0 x pi0`.
    pub fn for_state_in_field(state: &BeamQuantumState, b_z_tesla: f64) -> Result<OamLedger> {
        let mut ledger = OamLedger::default();
        let kin = landau_kinetic(state.n, state.ell, &state.species)? as f64;
        ledger.add("mode", OamComponent::Intrinsic, state.ell as f64, kin);

        let r0_nat = state.axis_offset_m.scale(1.0 / HBARC_EV_M);
        let orbital_kinetic = r0_nat.cross_z(state.extrinsic_momentum_ev);
        let gauge_part = 0.5
            * eb_natural(state.species.charge, b_z_tesla)
            * r0_nat.norm_sq();
        ledger.add(
            "extrinsic orbit",
            OamComponent::Extrinsic,
            orbital_kinetic + gauge_part,
            orbital_kinetic,
        );

        if classify_state(&state.species, state.ell)? == StateClass::Nonbasic {
            ledger
                .notes
                .push("state is nonbasic (sgn(e) ell > 0): not reachable by production".into());
        }
        Ok(ledger)
    }

    /// Ledger of a free beam: kinetic and canonical coincide, extrinsic
    /// parts vanish in vacuum.
    pub fn for_state_in_vacuum(state: &BeamQuantumState) -> OamLedger {
        let mut ledger = OamLedger::default();
        ledger.add(
            "mode",
            OamComponent::Intrinsic,
            state.ell as f64,
            state.ell as f64,
        );
        ledger.add("extrinsic orbit", OamComponent::Extrinsic, 0.0, 0.0);
        if state.extrinsic_momentum_ev.norm() > 0.0 {
            ledger.notes.push(format!(
                "beam drifts with transverse momentum ({:.6e}, {:.6e}) eV",
                state.extrinsic_momentum_ev.x, state.extrinsic_momentum_ev.y
            ));
        }
        ledger
    }
}
