//! CSV time series and a JSON run summary.
//!
//! Rows are ordered by time, then arc (or junction) id in byte order, then
//! cell index. Floats are written in `{:.16e}` form, which round-trips every
//! `f64`, so two identical runs produce identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::network::Network;
use crate::simulator::Trajectory;

pub const DENSITY_FILE: &str = "density.csv";
pub const FLUX_FILE: &str = "fluxes.csv";
pub const COEFFICIENT_FILE: &str = "coefficients.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub const DENSITY_HEADER: &str = "time,arc_id,cell,density,tracer";
pub const FLUX_HEADER: &str = "time,arc_id,flux";
pub const COEFFICIENT_HEADER: &str = "time,junction_id,outgoing,incoming,coefficient";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalSummary {
    pub time: f64,
    pub exit_coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub t_end: f64,
    pub steps: u64,
    pub equilibrium_time: Option<f64>,
    pub final_fluxes: BTreeMap<String, f64>,
    /// Coefficient toward the external exit, for exit-shaped junctions.
    pub exit_coefficients: BTreeMap<String, f64>,
    pub first_arrivals: BTreeMap<String, ArrivalSummary>,
    pub max_mass_residual: f64,
    pub max_junction_imbalance: f64,
}

impl RunSummary {
    pub fn new(net: &Network, traj: &Trajectory) -> Self {
        let state = &traj.final_state;
        let final_fluxes = traj
            .fluxes
            .last()
            .map(|row| net.arcs.iter().map(|a| a.id.clone()).zip(row.iter().copied()).collect())
            .unwrap_or_default();
        let mut exit_coefficients = BTreeMap::new();
        let mut first_arrivals = BTreeMap::new();
        for (k, j) in net.junctions.iter().enumerate() {
            if let Some(c) = state.exit_coefficient(net, k) {
                exit_coefficients.insert(j.id.clone(), c);
            }
            if let Some(fa) = state.first_arrival[k] {
                first_arrivals.insert(
                    j.id.clone(),
                    ArrivalSummary {
                        time: fa.time,
                        exit_coefficient: fa.exit_coefficient,
                    },
                );
            }
        }
        Self {
            t_end: state.time,
            steps: traj.steps,
            equilibrium_time: traj.equilibrium_time,
            final_fluxes,
            exit_coefficients,
            first_arrivals,
            max_mass_residual: traj.max_mass_residual,
            max_junction_imbalance: traj.max_junction_imbalance,
        }
    }
}

fn sorted_by_id<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<(usize, &'a str)> {
    let mut v: Vec<(usize, &str)> = ids.enumerate().collect();
    v.sort_by(|a, b| a.1.cmp(b.1));
    v
}

pub fn density_csv(net: &Network, traj: &Trajectory) -> String {
    let order = sorted_by_id(net.arcs.iter().map(|a| a.id.as_str()));
    let mut out = String::from(DENSITY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        for &(a, id) in &order {
            for (i, (rho, phi)) in s.density[a].iter().zip(&s.tracer[a]).enumerate() {
                let _ = writeln!(out, "{:.16e},{id},{i},{rho:.16e},{phi:.16e}", s.time);
            }
        }
    }
    out
}

pub fn flux_csv(net: &Network, traj: &Trajectory) -> String {
    let order = sorted_by_id(net.arcs.iter().map(|a| a.id.as_str()));
    let mut out = String::from(FLUX_HEADER);
    out.push('\n');
    for (t, row) in traj.fluxes.times.iter().zip(&traj.fluxes.values) {
        for &(a, id) in &order {
            let _ = writeln!(out, "{t:.16e},{id},{:.16e}", row[a]);
        }
    }
    out
}

pub fn coefficient_csv(net: &Network, traj: &Trajectory) -> String {
    let order = sorted_by_id(net.junctions.iter().map(|j| j.id.as_str()));
    let mut out = String::from(COEFFICIENT_HEADER);
    out.push('\n');
    for s in &traj.samples {
        for &(k, id) in &order {
            let j = &net.junctions[k];
            let m = &s.coefficients[k];
            for (o, out_id) in j.outgoing.iter().enumerate() {
                for (i, in_id) in j.incoming.iter().enumerate() {
                    let _ = writeln!(out, "{:.16e},{id},{out_id},{in_id},{:.16e}", s.time, m.get(o, i));
                }
            }
        }
    }
    out
}

pub fn summary_json(net: &Network, traj: &Trajectory) -> String {
    let mut s = serde_json::to_string_pretty(&RunSummary::new(net, traj)).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes the three CSV files and `summary.json` into `dir`, creating it if
/// needed. Returns the paths written.
pub fn write_outputs(dir: &Path, net: &Network, traj: &Trajectory) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files = [
        (DENSITY_FILE, density_csv(net, traj)),
        (FLUX_FILE, flux_csv(net, traj)),
        (COEFFICIENT_FILE, coefficient_csv(net, traj)),
        (SUMMARY_FILE, summary_json(net, traj)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::CoefficientMode;
    use crate::roundabout::{build_roundabout, RoundaboutParams};
    use crate::simulator::{SimConfig, Simulator};

    fn short_run(rho: f64) -> (Network, Trajectory) {
        let net = build_roundabout(&RoundaboutParams::new(0.5, 0.5, rho, rho, 4)).unwrap();
        let traj = Simulator::new(&net, CoefficientMode::Dynamic)
            .unwrap()
            .run(&SimConfig {
                t_end: 1.0,
                ..SimConfig::default()
            })
            .unwrap();
        (net, traj)
    }

    #[test]
    fn density_rows_are_sorted_and_complete() {
        let (net, traj) = short_run(0.1);
        let text = density_csv(&net, &traj);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(DENSITY_HEADER));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 3 * 8 * 4);
        let keys: Vec<(f64, &str, usize)> = rows
            .iter()
            .map(|r| (r[0].parse().unwrap(), r[1], r[2].parse().unwrap()))
            .collect();
        assert!(keys.windows(2).all(|w| w[0].0 < w[1].0
            || (w[0].0 == w[1].0 && (w[0].1, w[0].2) < (w[1].1, w[1].2))));
        assert_eq!(rows[0][1], "S1");
        assert_eq!(rows[4][1], "S1C");
    }

    #[test]
    fn floats_round_trip() {
        let (net, traj) = short_run(0.1);
        let text = density_csv(&net, &traj);
        let last = text.lines().last().unwrap();
        let rho: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
        let s = traj.samples.last().unwrap();
        let (a, _) = net.arcs.iter().enumerate().max_by(|x, y| x.1.id.cmp(&y.1.id)).unwrap();
        assert_eq!(rho, *s.density[a].last().unwrap());
    }

    #[test]
    fn summary_names_exit_junctions() {
        let (net, traj) = short_run(0.1);
        let sum = RunSummary::new(&net, &traj);
        assert_eq!(sum.exit_coefficients.keys().collect::<Vec<_>>(), vec!["J2", "J4"]);
        assert_eq!(sum.final_fluxes.len(), 8);
        assert_eq!(sum.t_end, 1.0);
        let json: serde_json::Value = serde_json::from_str(&summary_json(&net, &traj)).unwrap();
        assert_eq!(json["steps"], traj.steps);
    }

    #[test]
    fn coefficient_rows_cover_every_entry() {
        let (net, traj) = short_run(0.1);
        let text = coefficient_csv(&net, &traj);
        let entries: usize = net.junctions.iter().map(|j| j.incoming.len() * j.outgoing.len()).sum();
        assert_eq!(text.lines().count(), 1 + traj.samples.len() * entries);
    }
}
