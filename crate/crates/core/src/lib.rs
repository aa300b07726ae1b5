//! Twisted charged-particle beams in piecewise solenoid magnetic fields.
//!
//! The crate models the mode structure of orbital-angular-momentum-carrying
//! beams in uniform and quasi-uniform fields, the canonical/kinetic OAM
//! bookkeeping, boundary-crossing momentum kicks between solenoids and
//! vacuum, semiclassical trajectory transport, a wave-level radial
//! propagation check, and the twisted-positron / positronium experiment
//! estimates built on top of those pieces.
//!
//! Internal conventions: natural units with `hbar = c = 1` (energies in eV,
//! lengths in 1/eV); meters and tesla at API boundaries. Charges are signed
//! multiples of the elementary charge and all formulas carry the sign.

// `!(x > 0.0)` is the NaN-rejecting form of the positivity guards here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamstate;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fields;
pub mod laguerre;
pub mod modes;
pub mod oam;
pub mod quadrature;
pub mod radial;
pub mod transitions;
pub mod vec2;

pub use beamstate::{
    classify_state, landau_energy, magnetic_width, mean_square_radius, BeamQuantumState,
    ParticleSpecies, StateClass,
};
pub use constants::UnitContext;
pub use error::{Error, Result};
pub use vec2::Vec2;
