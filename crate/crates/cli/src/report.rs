//! Text report rendering: the OAM ledger table and transition narratives.

use std::fmt::Write as _;

use twistbeam::oam::OamLedger;
use twistbeam::transitions::{OrbitGeometry, TransitionReport};

/// Ledger as a fixed-width table: (component, canonical, kinetic, source).
pub fn render_ledger(ledger: &OamLedger) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} | {:>18} | {:>18} | source",
        "component", "canonical (hbar)", "kinetic (hbar)"
    );
    let _ = writeln!(out, "{}", "-".repeat(72));
    for c in &ledger.contributions {
        let _ = writeln!(
            out,
            "{:<10} | {:>18.6} | {:>18.6} | {}",
            c.component.to_string(),
            c.canonical_hbar,
            c.kinetic_hbar,
            c.source
        );
    }
    let _ = writeln!(out, "{}", "-".repeat(72));
    let _ = writeln!(
        out,
        "{:<10} | {:>18.6} | {:>18.6} |",
        "intrinsic",
        ledger.canonical_intrinsic(),
        ledger.kinetic_intrinsic()
    );
    let _ = writeln!(
        out,
        "{:<10} | {:>18.6} | {:>18.6} |",
        "extrinsic",
        ledger.canonical_extrinsic(),
        ledger.kinetic_extrinsic()
    );
    let _ = writeln!(
        out,
        "{:<10} | {:>18.6} | {:>18.6} |",
        "total",
        ledger.total_canonical(),
        ledger.total_kinetic()
    );
    for note in &ledger.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

/// One transition rendered as a text block.
pub fn render_transition(index: usize, z_m: f64, report: &TransitionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "boundary {index} at z = {z_m:.6} m");
    let _ = writeln!(
        out,
        "  kick total     = ({:.6e}, {:.6e}) eV",
        report.kick_total_ev.x, report.kick_total_ev.y
    );
    let _ = writeln!(
        out,
        "  kick intrinsic = ({:.6e}, {:.6e}) eV",
        report.kick_intrinsic_ev.x, report.kick_intrinsic_ev.y
    );
    let _ = writeln!(
        out,
        "  kick extrinsic = ({:.6e}, {:.6e}) eV",
        report.kick_extrinsic_ev.x, report.kick_extrinsic_ev.y
    );
    match report.orbit {
        OrbitGeometry::Drift { direction } => {
            let _ = writeln!(
                out,
                "  downstream motion: drift along ({:.4}, {:.4})",
                direction.x, direction.y
            );
        }
        OrbitGeometry::Orbit { radius_m, center_offset_m, delta_kinetic_oam_hbar } => {
            let _ = writeln!(out, "  orbit radius   = {radius_m:.6e} m");
            let _ = writeln!(
                out,
                "  orbit center   = ({:.6e}, {:.6e}) m from the entry point",
                center_offset_m.x, center_offset_m.y
            );
            let _ = writeln!(
                out,
                "  orbital kinetic OAM = {delta_kinetic_oam_hbar:.6e} hbar"
            );
        }
    }
    let _ = writeln!(
        out,
        "  transferred canonical OAM = {} hbar (kinetic counterpart {:.6e} hbar)",
        report.delta_l0_canonical_hbar, report.delta_l0_kinetic_hbar
    );
    let _ = writeln!(
        out,
        "  intrinsic totals: canonical {} hbar, kinetic {:.6e} hbar (mode part {:.6e} hbar)",
        report.total_intrinsic_canonical_hbar,
        report.total_intrinsic_kinetic_hbar,
        report.intrinsic_kinetic_mode_hbar
    );
    for note in &report.notes {
        let _ = writeln!(out, "  note: {note}");
    }
    let _ = writeln!(out, "  ledger after crossing:");
    for line in render_ledger(&report.ledger_after).lines() {
        let _ = writeln!(out, "    {line}");
    }
    out
}
