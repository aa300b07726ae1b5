//! Scenario configuration: a flat, sectioned key-value text format with
//! mandatory unit suffixes on every dimensioned quantity.
//!
//! ```text
//! [scenario]
//! analyses = envelope, transition
//! seed = 42
//!
//! [state]
//! species = electron
//! n = 0
//! ell = 3
//! s_z = -1/2
//! p_z = 1 MeV
//! w0 = 51 nm
//!
//! [region]
//! kind = solenoid
//! B = 1 T
//! z = 0 m .. 0.3 m
//! fringe = 1 mm
//! ```
//!
//! Unit suffixes are required (`B = 1` is rejected with "missing unit");
//! unknown keys and non-contiguous regions are parse errors carrying line
//! numbers.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use twistbeam::beamstate::{BeamQuantumState, ParticleSpecies};
use twistbeam::experiment::AnalyzerGeometry;
use twistbeam::fields::{Beamline, FieldRegion, RegionKind};
use twistbeam::Vec2;

/// One runnable analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Analysis {
    Modes,
    Envelope,
    Transition,
    Trajectory,
    Oracle,
    Experiment,
    PhaseSpread,
}

impl Analysis {
    pub const ALL: [Analysis; 7] = [
        Analysis::Modes,
        Analysis::Envelope,
        Analysis::Transition,
        Analysis::Trajectory,
        Analysis::Oracle,
        Analysis::Experiment,
        Analysis::PhaseSpread,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Modes => "modes",
            Analysis::Envelope => "envelope",
            Analysis::Transition => "transition",
            Analysis::Trajectory => "trajectory",
            Analysis::Oracle => "oracle",
            Analysis::Experiment => "experiment",
            Analysis::PhaseSpread => "phase-spread",
        }
    }

    fn from_name(s: &str) -> Option<Analysis> {
        Analysis::ALL.iter().copied().find(|a| a.name() == s)
    }
}

/// Parsed and validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub analyses: Vec<Analysis>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub tolerance: f64,
    pub state: BeamQuantumState,
    pub beamline: Beamline,
    pub analyzer: AnalyzerGeometry,
    /// Ensemble size for outlet sampling in the experiment analysis.
    pub ensemble: usize,
    /// OAM fraction surviving positron thermalization, in [0, 1].
    pub oam_retention: f64,
    /// Gap field between solenoids used by the transition analysis, tesla.
    pub gap_field_tesla: f64,
    /// Optional longitudinal momentum spread (sigma, number of partial
    /// waves) for the phase-spread analysis.
    pub momentum_sigma_ev: Option<f64>,
    pub momentum_waves: usize,
}

/// Parse error with position information.
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// A dimension with its admissible unit suffixes and scale factors to the
/// canonical unit.
struct Dimension {
    name: &'static str,
    units: &'static [(&'static str, f64)],
}

const LENGTH: Dimension = Dimension {
    name: "length",
    units: &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("nm", 1e-9)],
};
const FIELD: Dimension = Dimension {
    name: "magnetic field",
    units: &[("T", 1.0), ("mT", 1e-3), ("uT", 1e-6), ("µT", 1e-6)],
};
const ENERGY: Dimension = Dimension {
    name: "energy",
    units: &[("eV", 1.0), ("keV", 1e3), ("MeV", 1e6), ("GeV", 1e9)],
};
const GRADIENT: Dimension = Dimension {
    name: "field gradient",
    units: &[("T/m", 1.0), ("mT/m", 1e-3)],
};

/// Parse `<number> <unit>` with a mandatory unit.
fn parse_quantity(line: usize, key: &str, raw: &str, dim: &Dimension) -> Result<f64, ParseError> {
    let raw = raw.trim();
    let split = raw
        .find(|c: char| c.is_alphabetic() || c == 'µ')
        .ok_or_else(|| err(line, format!("'{key}': missing unit on {} value '{raw}'", dim.name)))?;
    let (num, unit) = raw.split_at(split);
    let num = num.trim();
    let unit = unit.trim();
    let value: f64 = num
        .parse()
        .map_err(|_| err(line, format!("'{key}': cannot parse number '{num}'")))?;
    for (suffix, scale) in dim.units {
        if unit == *suffix {
            return Ok(value * scale);
        }
    }
    Err(err(
        line,
        format!(
            "'{key}': unknown {} unit '{unit}' (expected one of {})",
            dim.name,
            dim.units.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn parse_pair(line: usize, key: &str, raw: &str, dim: &Dimension) -> Result<(f64, f64), ParseError> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err(err(line, format!("'{key}': expected two comma-separated values")));
    }
    Ok((
        parse_quantity(line, key, parts[0], dim)?,
        parse_quantity(line, key, parts[1], dim)?,
    ))
}

fn parse_range(line: usize, key: &str, raw: &str, dim: &Dimension) -> Result<(f64, f64), ParseError> {
    let parts: Vec<&str> = raw.split("..").collect();
    if parts.len() != 2 {
        return Err(err(line, format!("'{key}': expected '<start> .. <end>'")));
    }
    Ok((
        parse_quantity(line, key, parts[0], dim)?,
        parse_quantity(line, key, parts[1], dim)?,
    ))
}

fn parse_spin(line: usize, raw: &str) -> Result<f64, ParseError> {
    match raw.trim() {
        "1/2" | "+1/2" | "0.5" | "+0.5" => Ok(0.5),
        "-1/2" | "-0.5" => Ok(-0.5),
        "0" | "0.0" => Ok(0.0),
        other => Err(err(line, format!("'s_z': expected -1/2, 0 or +1/2, got '{other}'"))),
    }
}

#[derive(Default)]
struct RegionDraft {
    start_line: usize,
    kind: Option<String>,
    b: Option<f64>,
    z: Option<(f64, f64)>,
    fringe: Option<f64>,
    offset: Option<(f64, f64)>,
    kappa: Option<f64>,
}

#[derive(Default)]
struct StateDraft {
    species: Option<String>,
    n: Option<u32>,
    ell: Option<i64>,
    s_z: Option<f64>,
    p_z: Option<f64>,
    w0: Option<f64>,
    offset: Option<(f64, f64)>,
    pi0: Option<(f64, f64)>,
}

/// Parse a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
    parse_scenario_str(&text)
}

/// Parse scenario text (exposed for tests).
pub fn parse_scenario_str(text: &str) -> Result<Scenario, ParseError> {
    let mut analyses: Vec<Analysis> = Vec::new();
    let mut seed = 0u64;
    let mut out_dir = PathBuf::from("out");
    let mut tolerance = 0.01;
    let mut state = StateDraft::default();
    let mut regions: Vec<RegionDraft> = Vec::new();
    let mut analyzer = AnalyzerGeometry::default();
    let mut ensemble = 0usize;
    let mut retention = 1.0f64;
    let mut gap_field = 0.0f64;
    let mut momentum_sigma: Option<f64> = None;
    let mut momentum_waves = 5usize;

    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Scenario,
        State,
        Region,
        Analyzer,
        Transition,
        PhaseSpread,
    }
    let mut section = Section::None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "scenario" => Section::Scenario,
                "state" => Section::State,
                "region" => {
                    regions.push(RegionDraft { start_line: line_no, ..Default::default() });
                    Section::Region
                }
                "analyzer" => Section::Analyzer,
                "transition" => Section::Transition,
                "phase-spread" => Section::PhaseSpread,
                other => return Err(err(line_no, format!("unknown section '[{other}]'"))),
            };
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(line_no, format!("'{key}': empty value")));
        }

        match section {
            Section::None => {
                return Err(err(line_no, format!("key '{key}' outside any section")));
            }
            Section::Scenario => match key {
                "analyses" => {
                    let mut seen = BTreeSet::new();
                    for part in value.split(',') {
                        let name = part.trim();
                        let a = Analysis::from_name(name).ok_or_else(|| {
                            err(line_no, format!("unknown analysis '{name}'"))
                        })?;
                        if seen.insert(a) {
                            analyses.push(a);
                        }
                    }
                }
                "seed" => {
                    seed = value
                        .parse()
                        .map_err(|_| err(line_no, format!("'seed': not an integer: '{value}'")))?;
                }
                "out" => out_dir = PathBuf::from(value),
                "tolerance" => {
                    tolerance = value.parse().map_err(|_| {
                        err(line_no, format!("'tolerance': not a number: '{value}'"))
                    })?;
                }
                other => return Err(err(line_no, format!("unknown key '{other}' in [scenario]"))),
            },
            Section::State => match key {
                "species" => state.species = Some(value.to_string()),
                "n" => {
                    state.n = Some(value.parse().map_err(|_| {
                        err(line_no, format!("'n': not a non-negative integer: '{value}'"))
                    })?);
                }
                "ell" => {
                    state.ell = Some(value.parse().map_err(|_| {
                        err(line_no, format!("'ell': not an integer: '{value}'"))
                    })?);
                }
                "s_z" => state.s_z = Some(parse_spin(line_no, value)?),
                "p_z" => state.p_z = Some(parse_quantity(line_no, key, value, &ENERGY)?),
                "w0" => state.w0 = Some(parse_quantity(line_no, key, value, &LENGTH)?),
                "offset" => state.offset = Some(parse_pair(line_no, key, value, &LENGTH)?),
                "pi0" => state.pi0 = Some(parse_pair(line_no, key, value, &ENERGY)?),
                other => return Err(err(line_no, format!("unknown key '{other}' in [state]"))),
            },
            Section::Region => {
                let region = regions.last_mut().expect("region section pushes a draft");
                match key {
                    "kind" => region.kind = Some(value.to_string()),
                    "B" => region.b = Some(parse_quantity(line_no, key, value, &FIELD)?),
                    "z" => region.z = Some(parse_range(line_no, key, value, &LENGTH)?),
                    "fringe" => {
                        region.fringe = Some(parse_quantity(line_no, key, value, &LENGTH)?)
                    }
                    "offset" => region.offset = Some(parse_pair(line_no, key, value, &LENGTH)?),
                    "kappa" => region.kappa = Some(parse_quantity(line_no, key, value, &GRADIENT)?),
                    other => {
                        return Err(err(line_no, format!("unknown key '{other}' in [region]")))
                    }
                }
            }
            Section::Analyzer => match key {
                "B" => analyzer.b_tilde = parse_quantity(line_no, key, value, &FIELD)?,
                "kappa" => analyzer.kappa = parse_quantity(line_no, key, value, &GRADIENT)?,
                "length" => analyzer.length_m = parse_quantity(line_no, key, value, &LENGTH)?,
                "target" => analyzer.target_z_m = parse_quantity(line_no, key, value, &LENGTH)?,
                "outlet" => {
                    analyzer.outlet_diameter_m = parse_quantity(line_no, key, value, &LENGTH)?
                }
                "aperture" => analyzer.aperture_m = parse_quantity(line_no, key, value, &LENGTH)?,
                "ensemble" => {
                    ensemble = value.parse().map_err(|_| {
                        err(line_no, format!("'ensemble': not an integer: '{value}'"))
                    })?;
                }
                "retention" => {
                    retention = value.parse().map_err(|_| {
                        err(line_no, format!("'retention': not a number: '{value}'"))
                    })?;
                    if !(0.0..=1.0).contains(&retention) {
                        return Err(err(line_no, "'retention': must lie in [0, 1]".to_string()));
                    }
                }
                other => return Err(err(line_no, format!("unknown key '{other}' in [analyzer]"))),
            },
            Section::Transition => match key {
                "B0" => gap_field = parse_quantity(line_no, key, value, &FIELD)?,
                other => {
                    return Err(err(line_no, format!("unknown key '{other}' in [transition]")))
                }
            },
            Section::PhaseSpread => match key {
                "sigma" => momentum_sigma = Some(parse_quantity(line_no, key, value, &ENERGY)?),
                "waves" => {
                    momentum_waves = value.parse().map_err(|_| {
                        err(line_no, format!("'waves': not an integer: '{value}'"))
                    })?;
                }
                other => {
                    return Err(err(line_no, format!("unknown key '{other}' in [phase-spread]")))
                }
            },
        }
    }

    // Assemble regions.
    if regions.is_empty() {
        return Err(err(0, "no [region] sections"));
    }
    let mut built = Vec::with_capacity(regions.len());
    for draft in &regions {
        let line = draft.start_line;
        let kind_name = draft.kind.as_deref().unwrap_or("solenoid");
        let z = draft
            .z
            .ok_or_else(|| err(line, "[region] is missing its z range"))?;
        let (kind, b_axis) = match kind_name {
            "solenoid" => {
                let b = draft
                    .b
                    .ok_or_else(|| err(line, "[region] solenoid is missing B"))?;
                (RegionKind::Solenoid, b)
            }
            "vacuum" => {
                if draft.b.is_some_and(|b| b != 0.0) {
                    return Err(err(line, "vacuum region cannot carry B"));
                }
                (RegionKind::Vacuum, 0.0)
            }
            "quadrupole" => {
                let kappa = draft
                    .kappa
                    .ok_or_else(|| err(line, "[region] quadrupole is missing kappa"))?;
                (RegionKind::Quadrupole { kappa }, draft.b.unwrap_or(0.0))
            }
            other => return Err(err(line, format!("unknown region kind '{other}'"))),
        };
        let offset = draft.offset.unwrap_or((0.0, 0.0));
        built.push(FieldRegion {
            kind,
            b_axis,
            z_range: z,
            axis_offset: Vec2::new(offset.0, offset.1),
            fringe_length: draft.fringe.unwrap_or(0.0),
        });
    }
    for (i, pair) in built.windows(2).enumerate() {
        let gap = pair[1].z_range.0 - pair[0].z_range.1;
        if gap.abs() > 1e-12 {
            return Err(err(
                regions[i + 1].start_line,
                format!(
                    "region {} ending at {} m and region {} starting at {} m are not contiguous",
                    i + 1,
                    pair[0].z_range.1,
                    i + 2,
                    pair[1].z_range.0
                ),
            ));
        }
    }
    let beamline = Beamline::new(built).map_err(|e| err(0, e.to_string()))?;

    // Assemble the state.
    let species = match state.species.as_deref() {
        Some("electron") | None => {
            ParticleSpecies::electron(state.s_z.unwrap_or(-0.5)).map_err(|e| err(0, e.to_string()))?
        }
        Some("positron") => {
            ParticleSpecies::positron(state.s_z.unwrap_or(0.5)).map_err(|e| err(0, e.to_string()))?
        }
        Some(other) => return Err(err(0, format!("unknown species '{other}'"))),
    };
    let p_z = state.p_z.ok_or_else(|| err(0, "[state] is missing p_z"))?;
    let w0 = match state.w0 {
        Some(w) => w,
        None => {
            // default to the matched width of the first field-carrying region
            let b = beamline
                .regions()
                .iter()
                .map(|r| r.b_axis)
                .find(|b| *b != 0.0)
                .ok_or_else(|| err(0, "w0 omitted and no region carries a field"))?;
            twistbeam::magnetic_width(b, &species).map_err(|e| err(0, e.to_string()))?
        }
    };
    let mut beam = BeamQuantumState::new(
        species,
        state.n.unwrap_or(0),
        state.ell.unwrap_or(0),
        p_z,
        w0,
    )
    .map_err(|e| err(0, e.to_string()))?;
    if let Some((x, y)) = state.offset {
        beam = beam.with_axis_offset(Vec2::new(x, y));
    }
    if let Some((px, py)) = state.pi0 {
        beam = beam.with_extrinsic_momentum(Vec2::new(px, py));
    }

    if analyses.is_empty() {
        analyses.push(Analysis::Envelope);
    }

    Ok(Scenario {
        analyses,
        seed,
        out_dir,
        tolerance,
        state: beam,
        beamline,
        analyzer,
        ensemble,
        oam_retention: retention,
        gap_field_tesla: gap_field,
        momentum_sigma_ev: momentum_sigma,
        momentum_waves,
    })
}
