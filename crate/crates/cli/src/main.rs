use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twistbeam_cli::scenario::{parse_scenario, Analysis, Scenario};
use twistbeam_cli::{run_analysis, run_scenario};

/// Twisted-beam transport through piecewise solenoid fields.
#[derive(Parser)]
#[command(name = "twistbeam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance for oracle-style checks (overrides the config).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Override the first region's axial field, e.g. "0.5 T".
    #[arg(long, value_name = "FIELD")]
    b: Option<String>,
    /// Override the state waist, e.g. "51 nm".
    #[arg(long, value_name = "LENGTH")]
    w0: Option<String>,
    /// Override the winding number.
    #[arg(long)]
    ell: Option<i64>,
    /// Override the radial quantum number.
    #[arg(long)]
    n: Option<u32>,
    /// Override the analyzer gradient, e.g. "0.3 T/m".
    #[arg(long, value_name = "GRADIENT")]
    kappa: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the transverse mode on an (r, phi, z) grid.
    Modes(Common),
    /// Width, curvature and Gouy phase along the first region.
    Envelope(Common),
    /// Boundary-crossing kicks and OAM bookkeeping for every boundary.
    Transition(Common),
    /// Integrate the semiclassical reference trajectory.
    Trajectory(Common),
    /// Propagate the radial wave equation and compare to the envelope.
    Oracle(Common),
    /// Analyzer deflection, moments and the positronium threshold.
    Experiment(Common),
    /// Rotation-phase spread along the first solenoid.
    #[command(name = "phase-spread")]
    PhaseSpread(Common),
    /// Run every analysis listed in the scenario file.
    All(Common),
}

fn apply_overrides(scenario: &mut Scenario, common: &Common) -> anyhow::Result<()> {
    use twistbeam::magnetic_width;
    if let Some(out) = &common.out {
        scenario.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    if let Some(tol) = common.tolerance {
        scenario.tolerance = tol;
    }
    if let Some(n) = common.n {
        scenario.state.n = n;
    }
    if let Some(ell) = common.ell {
        scenario.state.ell = ell;
    }
    if let Some(raw) = &common.b {
        let b = parse_flag_quantity(raw, &[("T", 1.0), ("mT", 1e-3), ("uT", 1e-6)])?;
        let mut regions = scenario.beamline.regions().to_vec();
        regions[0].b_axis = b;
        scenario.beamline = twistbeam::fields::Beamline::new(regions)?;
        // keep the default waist matched to the overridden field
        if common.w0.is_none() && b != 0.0 {
            scenario.state.w0_m = magnetic_width(b, &scenario.state.species)?;
        }
    }
    if let Some(raw) = &common.w0 {
        scenario.state.w0_m = parse_flag_quantity(
            raw,
            &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)],
        )?;
    }
    if let Some(raw) = &common.kappa {
        scenario.analyzer.kappa = parse_flag_quantity(raw, &[("T/m", 1.0), ("mT/m", 1e-3)])?;
    }
    Ok(())
}

fn parse_flag_quantity(raw: &str, units: &[(&str, f64)]) -> anyhow::Result<f64> {
    let raw = raw.trim();
    let split = raw
        .find(|c: char| c.is_alphabetic())
        .ok_or_else(|| anyhow::anyhow!("missing unit on '{raw}'"))?;
    let (num, unit) = raw.split_at(split);
    let value: f64 = num.trim().parse()?;
    for (suffix, scale) in units {
        if unit.trim() == *suffix {
            return Ok(value * scale);
        }
    }
    anyhow::bail!("unknown unit '{}' on '{raw}'", unit.trim());
}

fn run(command: &Command) -> anyhow::Result<i32> {
    let (common, single): (&Common, Option<Analysis>) = match command {
        Command::Modes(c) => (c, Some(Analysis::Modes)),
        Command::Envelope(c) => (c, Some(Analysis::Envelope)),
        Command::Transition(c) => (c, Some(Analysis::Transition)),
        Command::Trajectory(c) => (c, Some(Analysis::Trajectory)),
        Command::Oracle(c) => (c, Some(Analysis::Oracle)),
        Command::Experiment(c) => (c, Some(Analysis::Experiment)),
        Command::PhaseSpread(c) => (c, Some(Analysis::PhaseSpread)),
        Command::All(c) => (c, None),
    };
    let mut scenario = parse_scenario(&common.config)?;
    apply_overrides(&mut scenario, common)?;
    match single {
        Some(analysis) => {
            let outcome = run_analysis(&scenario, analysis)?;
            for line in &outcome.summary {
                println!("{}: {line}", analysis.name());
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            Ok(if outcome.within_tolerance { 0 } else { 2 })
        }
        None => {
            let code = run_scenario(&scenario)?;
            println!(
                "ran {} analyses; summary in {}",
                scenario.analyses.len(),
                scenario.out_dir.join("summary.txt").display()
            );
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
