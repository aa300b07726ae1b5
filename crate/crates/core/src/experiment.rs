//! Analyzer-experiment estimates: magnetic moments of twisted beams, the
//! gradient force that separates opposite OAM states, centroid deflection
//! through the quadrupole analyzer, effective masses of structured beams,
//! and the positronium stability threshold.
//!
//! The gradient force acts on the beam centroid as an external body force;
//! internal mode distortion is out of scope. Geometry defaults are
//! illustrative: they put the OAM separation an order of magnitude above
//! the source outlet for a slow positron beam.

use crate::beamstate::ParticleSpecies;
use crate::constants::{
    EB_PER_TESLA, ELECTRON_MASS_EV, HBARC_EV_M, POSITRONIUM_BINDING_EV,
};
use crate::error::{Error, Result};
use crate::fields::quadrupole_field;

/// Orbital + spin magnetic moment `mu = e (L_z + 2 s_z) / (2 gamma m)`,
/// eV/T. One Bohr magneton per unit of `L_z + 2 s_z` at `gamma = 1` for
/// electron mass.
pub fn magnetic_moment(
    l_z_hbar: f64,
    spin_z: f64,
    species: &ParticleSpecies,
    gamma: f64,
) -> Result<f64> {
    species.require_charged()?;
    if gamma < 1.0 {
        return Err(Error::domain("gamma must be at least 1"));
    }
    Ok(f64::from(species.charge) * (l_z_hbar + 2.0 * spin_z) * EB_PER_TESLA
        / (2.0 * gamma * species.mass_ev))
}

/// Analyzer gradient force on a twisted beam,
/// `f_x = (e L_z / (2 gamma m)) kappa`, eV/m.
pub fn sg_force(l_z_hbar: f64, kappa_t_per_m: f64, species: &ParticleSpecies, gamma: f64) -> Result<f64> {
    species.require_charged()?;
    if gamma < 1.0 {
        return Err(Error::domain("gamma must be at least 1"));
    }
    Ok(f64::from(species.charge) * l_z_hbar * EB_PER_TESLA * kappa_t_per_m
        / (2.0 * gamma * species.mass_ev))
}

/// Analyzer magnet and target geometry.
#[derive(Debug, Clone, Copy)]
pub struct AnalyzerGeometry {
    /// Uniform axial part of the analyzer field, tesla.
    pub b_tilde: f64,
    /// Gradient `dB_z/dx`, T/m.
    pub kappa: f64,
    /// Magnet length along z, m; the gradient field is centered on the
    /// magnet midplane (`B_x = kappa (z - length/2)` inside).
    pub length_m: f64,
    /// Target plane position, m (>= length; free drift in between).
    pub target_z_m: f64,
    /// Source outlet diameter, m: the resolvability scale.
    pub outlet_diameter_m: f64,
    /// Transverse half-aperture, m; excursions beyond it are flagged.
    pub aperture_m: f64,
}

impl Default for AnalyzerGeometry {
    /// Illustrative defaults for a slow (keV) positron beam with
    /// `|L_z| = 1e4`: zero uniform part (which makes the two OAM branches
    /// exact mirror images), moderate gradient, millimeter magnet and a
    /// 33 cm flight path.
    fn default() -> Self {
        AnalyzerGeometry {
            b_tilde: 0.0,
            kappa: 0.3,
            length_m: 2e-3,
            target_z_m: 0.332,
            outlet_diameter_m: 1e-5,
            aperture_m: 0.12,
        }
    }
}

impl AnalyzerGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0) {
            return Err(Error::domain("analyzer length must be positive"));
        }
        if self.target_z_m < self.length_m {
            return Err(Error::domain("target plane must sit at or past the magnet exit"));
        }
        if self.kappa == 0.0 && self.b_tilde == 0.0 {
            return Err(Error::domain("analyzer needs a field"));
        }
        Ok(())
    }
}

/// Target hit of one beam.
#[derive(Debug, Clone, Copy)]
pub struct HitRecord {
    pub l_z_hbar: f64,
    pub x_m: f64,
    pub y_m: f64,
}

/// Outcome of a two-beam analyzer pass.
#[derive(Debug, Clone)]
pub struct DeflectionOutcome {
    pub hits: Vec<HitRecord>,
    /// |x(+L) - x(-L)| at the target, m.
    pub separation_m: f64,
    /// Common transverse displacement from the Lorentz force, m.
    pub y_deflection_m: f64,
    /// separation / outlet diameter.
    pub outlet_margin: f64,
    /// False if any beam left the transverse aperture.
    pub within_aperture: bool,
    /// False if the traversed region included `B_z <= 0`, where the
    /// field-line construction does not apply.
    pub field_line_domain_ok: bool,
}

/// One beam's centroid state through the analyzer.
#[derive(Debug, Clone, Copy)]
pub struct AnalyzerBeam {
    pub species: ParticleSpecies,
    /// Longitudinal momentum, eV.
    pub p_z_ev: f64,
    /// Intrinsic OAM driving the gradient force, hbar.
    pub l_z_hbar: f64,
    /// Source offset of this beam at the magnet entrance, m.
    pub offset_x_m: f64,
    pub offset_y_m: f64,
}

fn gamma_of(species: &ParticleSpecies, p_z_ev: f64) -> f64 {
    (species.mass_ev * species.mass_ev + p_z_ev * p_z_ev).sqrt() / species.mass_ev
}

/// March one centroid through the magnet (fixed-step RK4, force =
/// gradient force + Lorentz force in the analyzer field) and drift to the
/// target plane. Returns the hit and the excursion bookkeeping.
fn trace_beam(
    beam: &AnalyzerBeam,
    geometry: &AnalyzerGeometry,
) -> Result<(HitRecord, f64, f64, f64)> {
    let sp = beam.species;
    sp.require_charged()?;
    if !(beam.p_z_ev > 0.0) {
        return Err(Error::domain("beam momentum must be positive"));
    }
    let gamma = gamma_of(&sp, beam.p_z_ev);
    let force = sg_force(beam.l_z_hbar, geometry.kappa, &sp, gamma)?;
    let f_nat = force * HBARC_EV_M; // eV/m -> eV^2

    let mass = sp.mass_ev;
    let q = f64::from(sp.charge);
    let z_mid = 0.5 * geometry.length_m;

    // y = (x, y, z, px, py, pz) in natural units
    let mut y = [
        beam.offset_x_m / HBARC_EV_M,
        beam.offset_y_m / HBARC_EV_M,
        0.0,
        0.0,
        0.0,
        beam.p_z_ev,
    ];
    let eps = (mass * mass + beam.p_z_ev * beam.p_z_ev).sqrt();

    let rhs = |y: &[f64; 6]| -> [f64; 6] {
        let e = (mass * mass + y[3] * y[3] + y[4] * y[4] + y[5] * y[5]).sqrt();
        let v = [y[3] / e, y[4] / e, y[5] / e];
        let b = quadrupole_field(
            geometry.b_tilde,
            geometry.kappa,
            y[0] * HBARC_EV_M,
            y[2] * HBARC_EV_M - z_mid,
        );
        let (bx, by, bz) = (
            q * b.x * EB_PER_TESLA,
            q * b.y * EB_PER_TESLA,
            q * b.z * EB_PER_TESLA,
        );
        [
            v[0],
            v[1],
            v[2],
            f_nat + v[1] * bz - v[2] * by,
            v[2] * bx - v[0] * bz,
            v[0] * by - v[1] * bx,
        ]
    };

    let n_steps = 20_000usize;
    let t_total = geometry.length_m / HBARC_EV_M * eps / beam.p_z_ev;
    let dt = t_total / n_steps as f64;
    let z_exit = geometry.length_m / HBARC_EV_M;
    let mut max_excursion = 0.0_f64;
    let mut min_bz = f64::INFINITY;

    let step = |y: &mut [f64; 6], dt: f64| {
        let k1 = rhs(y);
        let mut y2 = *y;
        for i in 0..6 {
            y2[i] += 0.5 * dt * k1[i];
        }
        let k2 = rhs(&y2);
        let mut y3 = *y;
        for i in 0..6 {
            y3[i] += 0.5 * dt * k2[i];
        }
        let k3 = rhs(&y3);
        let mut y4 = *y;
        for i in 0..6 {
            y4[i] += dt * k3[i];
        }
        let k4 = rhs(&y4);
        for i in 0..6 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    };

    let mut iterations = 0usize;
    while y[2] < z_exit {
        step(&mut y, dt);
        iterations += 1;
        if iterations > 4 * n_steps {
            return Err(Error::Integration(
                "analyzer traversal stalled (beam reflected?)".into(),
            ));
        }
        max_excursion = max_excursion.max(y[0].abs().max(y[1].abs()) * HBARC_EV_M);
        let bz_here = geometry.b_tilde + geometry.kappa * y[0] * HBARC_EV_M;
        min_bz = min_bz.min(bz_here);
    }
    // Trim the overshoot past the exit plane and drift to the target.
    let overshoot = (y[2] - z_exit) / (y[5] / eps);
    for i in 0..3 {
        y[i] -= overshoot * [y[3], y[4], y[5]][i] / eps;
    }
    let drift = (geometry.target_z_m - geometry.length_m) / HBARC_EV_M;
    let x_t = y[0] + drift * y[3] / y[5];
    let y_t = y[1] + drift * y[4] / y[5];

    let hit = HitRecord {
        l_z_hbar: beam.l_z_hbar,
        x_m: x_t * HBARC_EV_M,
        y_m: y_t * HBARC_EV_M,
    };
    let target_excursion = hit.x_m.abs().max(hit.y_m.abs());
    Ok((hit, max_excursion.max(target_excursion), min_bz, eps))
}

/// Run the two opposite-OAM beams through the analyzer and report the
/// separation at the target.
///
/// The OAM force deflects along x with opposite signs for the two beams;
/// the Lorentz force from the gradient field deflects both identically in
/// y. With `b_tilde = 0` the two trajectories are exact mirror images.
pub fn deflection_sim(
    beam: &AnalyzerBeam,
    geometry: &AnalyzerGeometry,
) -> Result<DeflectionOutcome> {
    geometry.validate()?;
    let plus = AnalyzerBeam { l_z_hbar: beam.l_z_hbar.abs(), ..*beam };
    let minus = AnalyzerBeam { l_z_hbar: -beam.l_z_hbar.abs(), ..*beam };
    let (hit_p, exc_p, min_bz_p, _) = trace_beam(&plus, geometry)?;
    let (hit_m, exc_m, min_bz_m, _) = trace_beam(&minus, geometry)?;
    let separation = (hit_p.x_m - hit_m.x_m).abs();
    Ok(DeflectionOutcome {
        hits: vec![hit_p, hit_m],
        separation_m: separation,
        y_deflection_m: 0.5 * (hit_p.y_m + hit_m.y_m),
        outlet_margin: separation / geometry.outlet_diameter_m,
        within_aperture: exc_p.max(exc_m) <= geometry.aperture_m,
        field_line_domain_ok: min_bz_p > 0.0 && min_bz_m > 0.0,
    })
}

/// Effective mass of a structured beam in vacuum,
/// `M = sqrt(m^2 + 2 (2n + |ell| + 1) / w0^2)`, eV.
pub fn effective_mass(species: &ParticleSpecies, n: u32, ell: i64, w0_m: f64) -> Result<f64> {
    if !(w0_m > 0.0) {
        return Err(Error::domain("waist must be positive"));
    }
    let w0 = w0_m / HBARC_EV_M;
    let p_perp_sq = 2.0 * (2 * i64::from(n) + ell.abs() + 1) as f64 / (w0 * w0);
    Ok((species.mass_ev * species.mass_ev + p_perp_sq).sqrt())
}

/// Positronium rest mass: twice the electron mass less the binding energy.
pub fn positronium_mass_ev() -> f64 {
    2.0 * ELECTRON_MASS_EV - POSITRONIUM_BINDING_EV
}

/// Boost from the lab frame to the frame in which the annihilation photons
/// carry zero total momentum and total energy `M`. Returns `(gamma, beta)`
/// for a composite of effective mass `m_eff` and lab momentum `p`.
pub fn annihilation_frame(m_eff_ev: f64, p_ev: f64) -> Result<(f64, f64)> {
    if !(m_eff_ev > 0.0) {
        return Err(Error::domain("effective mass must be positive"));
    }
    let energy = (m_eff_ev * m_eff_ev + p_ev * p_ev).sqrt();
    Ok((energy / m_eff_ev, p_ev / energy))
}

/// Surviving OAM after thermalization: deceleration in an electric field
/// conserves it (`retention = 1`), stopping in a medium erodes it. The
/// factor is a user-supplied stand-in for an actual stopping model.
pub fn retained_oam(l_z_hbar: f64, retention: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&retention) {
        return Err(Error::domain(format!(
            "retention factor must lie in [0, 1], got {retention}"
        )));
    }
    Ok(l_z_hbar * retention)
}

/// Stability verdict for a twisted positronium of effective mass `m_eff`:
/// stable against spontaneous dissociation iff `M - m_Ps` is strictly below
/// the binding energy. Returns the verdict and the margin in eV.
pub fn positronium_threshold(m_eff_ev: f64, m_ps_ev: f64) -> (bool, f64) {
    let excess = m_eff_ev - m_ps_ev;
    (excess < POSITRONIUM_BINDING_EV, POSITRONIUM_BINDING_EV - excess)
}
