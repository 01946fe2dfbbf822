use std::fs;

use tagflow::io::output::{DENSITY_FILE, DENSITY_HEADER, FLUX_FILE, SUMMARY_FILE};
use tagflow::io::write_outputs;
use tagflow::roundabout::{build_roundabout, RoundaboutParams};
use tagflow::{CoefficientMode, SimConfig, Simulator};

fn run_into(dir: &std::path::Path, rho: f64) {
    let net = build_roundabout(&RoundaboutParams::new(0.3, 0.6, rho, rho, 10)).unwrap();
    let cfg = SimConfig {
        t_end: 5.0,
        ..SimConfig::default()
    };
    let traj = Simulator::new(&net, CoefficientMode::Dynamic).unwrap().run(&cfg).unwrap();
    write_outputs(dir, &net, &traj).unwrap();
}

#[test]
fn density_file_has_header_and_sorted_rows() {
    let dir = tempfile::tempdir().unwrap();
    run_into(dir.path(), 0.1);
    let text = fs::read_to_string(dir.path().join(DENSITY_FILE)).unwrap();
    assert_eq!(text.lines().next(), Some(DENSITY_HEADER));
    assert_eq!(text.lines().count(), 1 + 11 * 8 * 10);
    for file in [FLUX_FILE, SUMMARY_FILE] {
        assert!(dir.path().join(file).exists());
    }
}

#[test]
fn zero_inflow_gives_exact_zeros() {
    let dir = tempfile::tempdir().unwrap();
    run_into(dir.path(), 0.0);
    let text = fs::read_to_string(dir.path().join(DENSITY_FILE)).unwrap();
    for line in text.lines().skip(1) {
        let density: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(density, 0.0, "{line}");
    }
    let text = fs::read_to_string(dir.path().join(FLUX_FILE)).unwrap();
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').nth(2).unwrap().parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn identical_runs_write_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_into(a.path(), 0.1);
    run_into(b.path(), 0.1);
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap());
    }
}
