//! Scenario pipeline behavior: determinism, artifact formats, error paths.

use std::path::Path;

use twistbeam_cli::scenario::{parse_scenario_str, Analysis};
use twistbeam_cli::{run_analysis, run_scenario};

const TWO_SOLENOIDS: &str = "\
[scenario]
analyses = envelope, transition, experiment
seed = 7

[state]
species = electron
n = 0
ell = 3
s_z = -1/2
p_z = 1 MeV

[region]
kind = solenoid
B = 1 T
z = 0 m .. 0.05 m
fringe = 1 mm

[region]
kind = solenoid
B = -1 T
z = 0.05 m .. 0.1 m
fringe = 1 mm

[analyzer]
ensemble = 6
";

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn same_seed_byte_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut scenario = parse_scenario_str(TWO_SOLENOIDS).unwrap();

    scenario.out_dir = tmp.path().join("a");
    assert_eq!(run_scenario(&scenario).unwrap(), 0);
    scenario.out_dir = tmp.path().join("b");
    assert_eq!(run_scenario(&scenario).unwrap(), 0);

    for name in [
        "envelope.csv",
        "transition.csv",
        "transition_report.txt",
        "experiment_hits.csv",
        "experiment_report.txt",
        "summary.txt",
    ] {
        let a = read(&tmp.path().join("a"), name);
        let b = read(&tmp.path().join("b"), name);
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn different_seed_changes_sampled_hits() {
    let tmp = tempfile::tempdir().unwrap();
    let mut scenario = parse_scenario_str(TWO_SOLENOIDS).unwrap();
    scenario.analyses = vec![Analysis::Experiment];

    scenario.out_dir = tmp.path().join("a");
    run_scenario(&scenario).unwrap();
    scenario.seed = 8;
    scenario.out_dir = tmp.path().join("b");
    run_scenario(&scenario).unwrap();

    let a = read(&tmp.path().join("a"), "experiment_hits.csv");
    let b = read(&tmp.path().join("b"), "experiment_hits.csv");
    assert_ne!(a, b, "ensemble sampling ignored the seed");
}

#[test]
fn envelope_of_matched_waist_is_constant_column() {
    // w0 omitted defaults to the matched width, so the width column is a
    // single repeated value.
    let tmp = tempfile::tempdir().unwrap();
    let mut scenario = parse_scenario_str(TWO_SOLENOIDS).unwrap();
    scenario.out_dir = tmp.path().to_path_buf();
    run_analysis(&scenario, Analysis::Envelope).unwrap();

    let text = String::from_utf8(read(tmp.path(), "envelope.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "z_m,width_m,inv_radius_per_m,gouy_rad");
    let widths: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(widths.len() > 100);
    assert!(
        widths.iter().all(|w| *w == widths[0]),
        "width column not constant"
    );
}

#[test]
fn transition_report_contains_kick_and_orbit() {
    let tmp = tempfile::tempdir().unwrap();
    let mut scenario = parse_scenario_str(TWO_SOLENOIDS).unwrap();
    scenario.out_dir = tmp.path().to_path_buf();
    run_analysis(&scenario, Analysis::Transition).unwrap();

    let text = String::from_utf8(read(tmp.path(), "transition_report.txt")).unwrap();
    assert!(text.contains("kick total"));
    assert!(text.contains("transferred canonical OAM"));
    assert!(text.contains("ledger after crossing"));
    let csv = String::from_utf8(read(tmp.path(), "transition.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.contains("orbit_radius_m"));
    assert!(header.contains("frak_l_hbar"));
    assert_eq!(csv.lines().count(), 2, "one boundary, one row");
}

#[test]
fn every_csv_has_a_header_row() {
    let tmp = tempfile::tempdir().unwrap();
    let mut scenario = parse_scenario_str(TWO_SOLENOIDS).unwrap();
    scenario.analyses = Analysis::ALL.to_vec();
    scenario.out_dir = tmp.path().to_path_buf();
    // Use a short region so the oracle stays quick.
    run_scenario(&scenario).unwrap();
    for entry in std::fs::read_dir(tmp.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let text = std::fs::read_to_string(&path).unwrap();
            let header = text.lines().next().unwrap_or("");
            assert!(
                header.chars().next().is_some_and(|c| c.is_ascii_alphabetic()),
                "{}: missing header",
                path.display()
            );
        }
    }
}

#[test]
fn parse_errors_surface_with_lines() {
    let bad = TWO_SOLENOIDS.replace("B = 1 T", "B = 1");
    let err = parse_scenario_str(&bad).unwrap_err();
    assert!(err.to_string().contains("missing unit"));
    assert!(err.to_string().starts_with("line "));

    let bad_retention = format!("{TWO_SOLENOIDS}retention = 1.5\n");
    let err = parse_scenario_str(&bad_retention).unwrap_err();
    assert!(err.to_string().contains("[0, 1]"), "{err}");
}

#[test]
fn exit_code_two_when_tolerance_exceeded() {
    // An impossible oracle tolerance must fail the run without erroring.
    let config = "\
[scenario]
analyses = oracle
tolerance = 1e-13

[state]
species = electron
ell = 2
p_z = 1 MeV

[region]
kind = solenoid
B = 1 T
z = 0 m .. 2 mm
";
    let tmp = tempfile::tempdir().unwrap();
    let mut scenario = parse_scenario_str(config).unwrap();
    scenario.out_dir = tmp.path().to_path_buf();
    assert_eq!(run_scenario(&scenario).unwrap(), 2);
    let summary = String::from_utf8(read(tmp.path(), "summary.txt")).unwrap();
    assert!(summary.contains("TOLERANCE EXCEEDED"));

    // The same run at the stock tolerance is fine.
    scenario.tolerance = 0.01;
    assert_eq!(run_scenario(&scenario).unwrap(), 0);
}
