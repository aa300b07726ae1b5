//! Piecewise magnetic field maps: solenoid interiors with smooth fringe
//! transitions, symmetric-gauge vector potentials, the quadrupole analyzer
//! field, and field-line tracing.
//!
//! All quantities in this module are SI (tesla, meters). The on-axis
//! longitudinal profile interpolates between adjacent region values with a
//! tanh sigmoid of scale `lambda`; the boundary kicks derived elsewhere are
//! profile-independent, so the particular smooth interpolant only matters
//! for the transport oracle.

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// What a region is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionKind {
    Solenoid,
    Vacuum,
    /// Analyzer magnet: uniform part in `b_axis`, gradient `kappa` (T/m).
    Quadrupole { kappa: f64 },
}

/// One segment of the piecewise field environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRegion {
    pub kind: RegionKind,
    /// Signed B_z on axis deep inside, tesla. Zero for vacuum.
    pub b_axis: f64,
    /// Longitudinal extent (z_start, z_end), m.
    pub z_range: (f64, f64),
    /// Offset of this region's symmetry axis from the global axis, m.
    pub axis_offset: Vec2,
    /// Fringe smoothness scale, m; 0 means a sharp boundary.
    pub fringe_length: f64,
}

impl FieldRegion {
    pub fn solenoid(b_tesla: f64, z_range: (f64, f64), fringe_length: f64) -> Self {
        FieldRegion {
            kind: RegionKind::Solenoid,
            b_axis: b_tesla,
            z_range,
            axis_offset: Vec2::ZERO,
            fringe_length,
        }
    }

    pub fn vacuum(z_range: (f64, f64)) -> Self {
        FieldRegion {
            kind: RegionKind::Vacuum,
            b_axis: 0.0,
            z_range,
            axis_offset: Vec2::ZERO,
            fringe_length: 0.0,
        }
    }

    pub fn with_axis_offset(mut self, d: Vec2) -> Self {
        self.axis_offset = d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_range.1 > self.z_range.0) {
            return Err(Error::domain(format!(
                "degenerate z range [{}, {}]",
                self.z_range.0, self.z_range.1
            )));
        }
        if self.fringe_length < 0.0 {
            return Err(Error::domain("fringe length must be non-negative"));
        }
        if matches!(self.kind, RegionKind::Vacuum) && self.b_axis != 0.0 {
            return Err(Error::domain("vacuum region must have zero axial field"));
        }
        Ok(())
    }
}

/// On-axis field value and its z derivatives at one point.
#[derive(Debug, Clone, Copy, Default)]
pub struct AxialProfile {
    /// B_z(0, z), tesla.
    pub b: f64,
    /// dB_z/dz, T/m.
    pub db_dz: f64,
    /// d2B_z/dz2, T/m^2.
    pub d2b_dz2: f64,
    /// d3B_z/dz3, T/m^3 (used by the divergence-free transport field).
    pub d3b_dz3: f64,
}

/// Cylindrical field sample about a region axis.
#[derive(Debug, Clone, Copy, Default)]
pub struct FieldSample {
    pub b_r: f64,
    pub b_phi: f64,
    pub b_z: f64,
}

/// Cartesian field vector, tesla.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A contiguous stack of field regions along z.
#[derive(Debug, Clone)]
pub struct Beamline {
    regions: Vec<FieldRegion>,
}

/// Smooth step `(1 + tanh((z - z0)/lambda))/2` with analytic derivatives;
/// a Heaviside step when `lambda = 0`.
#[derive(Debug, Clone, Copy)]
struct Step {
    z0: f64,
    lambda: f64,
}

impl Step {
    fn value(&self, z: f64) -> f64 {
        if self.lambda == 0.0 {
            return match z.partial_cmp(&self.z0) {
                Some(std::cmp::Ordering::Less) => 0.0,
                Some(std::cmp::Ordering::Greater) => 1.0,
                _ => 0.5,
            };
        }
        0.5 * (1.0 + ((z - self.z0) / self.lambda).tanh())
    }

    /// (value, d1, d2, d3) with respect to z.
    fn derivatives(&self, z: f64) -> (f64, f64, f64, f64) {
        if self.lambda == 0.0 {
            return (self.value(z), 0.0, 0.0, 0.0);
        }
        let u = (z - self.z0) / self.lambda;
        let t = u.tanh();
        let s2 = 1.0 - t * t; // sech^2
        let inv = 1.0 / self.lambda;
        let v = 0.5 * (1.0 + t);
        let d1 = 0.5 * s2 * inv;
        let d2 = -s2 * t * inv * inv;
        let d3 = (2.0 * s2 * t * t - s2 * s2) * inv * inv * inv;
        (v, d1, d2, d3)
    }
}

/// Turn-on/turn-off window of one region: the presence function used to
/// superpose per-region axial profiles.
#[derive(Debug, Clone, Copy)]
struct Window {
    on: Option<Step>,
    off: Option<Step>,
}

impl Window {
    /// Presence `on(z) - off(z)`; a missing `on` counts as 1 (region
    /// extends to the left end) and a missing `off` as 0.
    fn derivatives(&self, z: f64) -> (f64, f64, f64, f64) {
        let (mut v, mut d1, mut d2, mut d3) = match &self.on {
            Some(on) => on.derivatives(z),
            None => (1.0, 0.0, 0.0, 0.0),
        };
        if let Some(off) = &self.off {
            let (a, b, c, d) = off.derivatives(z);
            v -= a;
            d1 -= b;
            d2 -= c;
            d3 -= d;
        }
        (v, d1, d2, d3)
    }
}

impl Beamline {
    /// Build a validated, z-contiguous beamline.
    pub fn new(regions: Vec<FieldRegion>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::domain("beamline needs at least one region"));
        }
        for r in &regions {
            r.validate()?;
        }
        for pair in regions.windows(2) {
            let gap = pair[1].z_range.0 - pair[0].z_range.1;
            if gap.abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "regions are not contiguous: [{}, {}] then [{}, {}]",
                    pair[0].z_range.0, pair[0].z_range.1, pair[1].z_range.0, pair[1].z_range.1
                )));
            }
        }
        Ok(Beamline { regions })
    }

    pub fn single(region: FieldRegion) -> Result<Self> {
        Self::new(vec![region])
    }

    pub fn regions(&self) -> &[FieldRegion] {
        &self.regions
    }

    pub fn z_start(&self) -> f64 {
        self.regions[0].z_range.0
    }

    pub fn z_end(&self) -> f64 {
        self.regions[self.regions.len() - 1].z_range.1
    }

    /// Region index containing z (clamped to the ends).
    pub fn region_index_at(&self, z: f64) -> usize {
        for (i, r) in self.regions.iter().enumerate() {
            if z < r.z_range.1 {
                return i;
            }
        }
        self.regions.len() - 1
    }

    pub fn region_at(&self, z: f64) -> &FieldRegion {
        &self.regions[self.region_index_at(z)]
    }

    /// Boundary fringe scale between regions i and i+1: the larger of the
    /// two adjacent fringe lengths, so a sharp-edged region next to a smooth
    /// solenoid still sees the solenoid's fringe.
    fn boundary_lambda(&self, i: usize) -> f64 {
        self.regions[i].fringe_length.max(self.regions[i + 1].fringe_length)
    }

    fn window(&self, i: usize) -> Window {
        let on = (i > 0).then(|| Step {
            z0: self.regions[i].z_range.0,
            lambda: self.boundary_lambda(i - 1),
        });
        let off = (i + 1 < self.regions.len()).then(|| Step {
            z0: self.regions[i].z_range.1,
            lambda: self.boundary_lambda(i),
        });
        Window { on, off }
    }
}

/// On-axis longitudinal profile `B_z(0, z)` with analytic derivatives.
///
/// Deep inside a region this is `(b_axis, 0, 0)`; across a boundary it
/// interpolates smoothly, and the integral of the first derivative over a
/// crossing equals the field difference exactly.
pub fn fringe_profile(beamline: &Beamline, z: f64) -> AxialProfile {
    let mut p = AxialProfile::default();
    for (i, r) in beamline.regions().iter().enumerate() {
        if r.b_axis == 0.0 {
            continue;
        }
        let (v, d1, d2, d3) = beamline.window(i).derivatives(z);
        p.b += r.b_axis * v;
        p.db_dz += r.b_axis * d1;
        p.d2b_dz2 += r.b_axis * d2;
        p.d3b_dz3 += r.b_axis * d3;
    }
    p
}

/// Near-axis solenoid field about the local region axis:
/// `B_R = -(R/2) B'`, `B_phi = 0`, `B_z = B(0,z) - (R^2/4) B''`.
///
/// Valid for radii much smaller than the solenoid bore.
pub fn solenoid_field(beamline: &Beamline, r: f64, z: f64) -> FieldSample {
    let p = fringe_profile(beamline, z);
    FieldSample {
        b_r: -0.5 * r * p.db_dz,
        b_phi: 0.0,
        b_z: p.b - 0.25 * r * r * p.d2b_dz2,
    }
}

/// Cartesian transport field used by the trajectory integrator.
///
/// Each region's contribution is the axisymmetric near-axis expansion about
/// that region's own axis, extended by the cubic `R^3 B'''/16` closure term
/// that makes every contribution exactly divergence-free and exactly the
/// curl of [`axial_gauge_phi`]. Quadrupole gradients are added inside their
/// region, with `B_x = kappa (z - z_mid)` measured from the region center.
pub fn tracking_field(beamline: &Beamline, x: f64, y: f64, z: f64) -> FieldVector {
    let mut out = FieldVector::default();
    for (i, r) in beamline.regions().iter().enumerate() {
        if r.b_axis != 0.0 {
            let (v, d1, d2, d3) = beamline.window(i).derivatives(z);
            let rx = x - r.axis_offset.x;
            let ry = y - r.axis_offset.y;
            let rho2 = rx * rx + ry * ry;
            // B_R/R stays finite: -(1/2) B' + (rho^2/16) B'''
            let br_over_r = -0.5 * r.b_axis * d1 + rho2 / 16.0 * r.b_axis * d3;
            out.x += br_over_r * rx;
            out.y += br_over_r * ry;
            out.z += r.b_axis * v - 0.25 * rho2 * r.b_axis * d2;
        }
        if let RegionKind::Quadrupole { kappa } = r.kind {
            if z >= r.z_range.0 && z <= r.z_range.1 {
                let z_mid = 0.5 * (r.z_range.0 + r.z_range.1);
                out.x += kappa * (z - z_mid);
                out.z += kappa * (x - r.axis_offset.x);
            }
        }
    }
    out
}

/// Azimuthal gauge potential about a chosen transverse axis, T·m:
/// `A_phi(R, z) = (R/2) B(0,z) - (R^3/16) B''(0,z)`.
///
/// When `gauge_axis` coincides with the (shared) solenoid axis this is
/// exactly the potential whose curl is [`tracking_field`], so the canonical
/// angular momentum about that axis is conserved along trajectories.
pub fn axial_gauge_phi(beamline: &Beamline, gauge_axis: Vec2, x: f64, y: f64, z: f64) -> f64 {
    let p = fringe_profile(beamline, z);
    let rx = x - gauge_axis.x;
    let ry = y - gauge_axis.y;
    let r = (rx * rx + ry * ry).sqrt();
    0.5 * r * p.b - r * r * r / 16.0 * p.d2b_dz2
}

/// Symmetric-gauge vector potential split about a shifted state axis:
/// `A = A_0 + script_A` with `A_0 = B x R0 / 2` and `script_A = B x r / 2`,
/// for a locally uniform field `B = b_z z_hat`. Units: tesla times meters.
pub fn symmetric_gauge_potential(b_z_tesla: f64, r0: Vec2, r: Vec2) -> (Vec2, Vec2) {
    let a0 = r0.zcross().scale(0.5 * b_z_tesla);
    let script_a = r.zcross().scale(0.5 * b_z_tesla);
    (a0, script_a)
}

/// Analyzer field: uniform `b_tilde` plus the quadrupole part,
/// `B_x = kappa z`, `B_y = 0`, `B_z = b_tilde + kappa x`.
pub fn quadrupole_field(b_tilde: f64, kappa: f64, x: f64, z: f64) -> FieldVector {
    FieldVector { x: kappa * z, y: 0.0, z: b_tilde + kappa * x }
}

/// One point of a traced analyzer field line.
#[derive(Debug, Clone, Copy)]
pub struct FieldLinePoint {
    pub z: f64,
    /// Exact implicit solution.
    pub x_exact: f64,
    /// Small-gradient parabolic approximation.
    pub x_parabola: f64,
}

/// Field line of the analyzer through `(x0, 0, z0)`.
///
/// Exact line: `z^2 = (x + 2 b/k) x - (x0 + 2 b/k) x0 + z0^2`, solved for
/// `x(z)` on the branch with `b_tilde + kappa x > 0`. The parabolic form
/// `z^2 = 2 b (x - x0) / k` is returned alongside. `kappa = 0` degenerates
/// to the straight line `x = x0`.
pub fn field_line(
    b_tilde: f64,
    kappa: f64,
    x0: f64,
    z0: f64,
    z: f64,
) -> Result<FieldLinePoint> {
    if kappa == 0.0 {
        return Ok(FieldLinePoint { z, x_exact: x0, x_parabola: x0 });
    }
    let c = b_tilde / kappa;
    if b_tilde + kappa * x0 <= 0.0 {
        return Err(Error::domain(
            "field line seed lies outside the positive-field domain",
        ));
    }
    let radicand = (x0 + c) * (x0 + c) + z * z - z0 * z0;
    if radicand < 0.0 {
        return Err(Error::domain(format!(
            "field line through x0 = {x0} does not reach z = {z}"
        )));
    }
    // Cancellation-free form of -c + sqrt((x0+c)^2 + z^2 - z0^2).
    let x_exact = x0 + (z * z - z0 * z0) / (radicand.sqrt() + (x0 + c));
    if b_tilde + kappa * x_exact <= 0.0 {
        return Err(Error::domain(
            "field line left the domain with positive axial field",
        ));
    }
    let x_parabola = if b_tilde != 0.0 {
        x0 + kappa * (z * z - z0 * z0) / (2.0 * b_tilde)
    } else {
        x_exact
    };
    Ok(FieldLinePoint { z, x_exact, x_parabola })
}
