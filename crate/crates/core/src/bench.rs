//! Synthetic throughput benchmark on a chain of diamonds.
//!
//! A source arc feeds a sequence of split/merge diamonds (one arc in, two
//! branches, one arc out), followed by plain series arcs to reach the exact
//! requested arc count.

use std::time::{Duration, Instant};

use crate::error::{param, Result};
use crate::flux_model::FluxModel;
use crate::junction::DistributionMatrix;
use crate::network::{Arc, ArcKind, BoundaryCondition, CoefficientMode, Junction, Network, Sink};
use crate::simulator::Simulator;

pub const SOURCE_DENSITY: f64 = 0.2;
pub const INITIAL_DENSITY: f64 = 0.1;

/// Network with exactly `arcs` unit-length arcs of `cells` cells each.
pub fn chain_of_diamonds(arcs: usize, cells: usize) -> Result<Network> {
    if arcs == 0 {
        return Err(param("arcs", 0.0, "must be positive"));
    }
    if cells == 0 {
        return Err(param("cells", 0.0, "must be positive"));
    }
    let mut list = vec![Arc::unit("a0", cells, ArcKind::ExternalIn)];
    let mut junctions = Vec::new();
    let mut tail = "a0".to_string();
    let mut next = 1;
    let mut new_arc = |list: &mut Vec<Arc>| {
        let id = format!("a{next}");
        next += 1;
        list.push(Arc::unit(id.clone(), cells, ArcKind::Generic));
        id
    };
    while list.len() + 3 <= arcs {
        let (l, r) = (new_arc(&mut list), new_arc(&mut list));
        let out = new_arc(&mut list);
        let n = junctions.len();
        junctions.push(Junction::new(
            format!("j{n}"),
            &[tail.as_str()],
            &[l.as_str(), r.as_str()],
            DistributionMatrix::split(&[0.5, 0.5]),
        ));
        junctions.push(Junction::new(
            format!("j{}", n + 1),
            &[l.as_str(), r.as_str()],
            &[out.as_str()],
            DistributionMatrix::merge(2),
        ));
        tail = out;
    }
    while list.len() < arcs {
        let out = new_arc(&mut list);
        junctions.push(Junction::new(
            format!("j{}", junctions.len()),
            &[tail.as_str()],
            &[out.as_str()],
            DistributionMatrix::merge(1),
        ));
        tail = out;
    }
    if arcs == 1 {
        list[0].kind = ArcKind::Generic;
    } else {
        list.last_mut().unwrap().kind = ArcKind::ExternalOut;
    }
    let net = Network {
        model: FluxModel::unit(),
        arcs: list,
        junctions,
        boundaries: vec![BoundaryCondition {
            arc: "a0".into(),
            density: SOURCE_DENSITY,
            tracer: 0.5,
        }],
        sinks: vec![Sink::absorbing(tail)],
        tracer_target: None,
    };
    net.ensure_valid()?;
    Ok(net)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub arcs: usize,
    pub cells: usize,
    pub steps: usize,
    /// Time spent stepping, excluding setup.
    pub wall_time: Duration,
    pub cell_updates_per_sec: f64,
    pub max_mass_residual: f64,
}

/// Runs `steps` CFL-0.5 steps from a uniform initial density.
pub fn bench(arcs: usize, cells: usize, steps: usize) -> Result<BenchReport> {
    let net = chain_of_diamonds(arcs, cells)?;
    let mut sim = Simulator::new(&net, CoefficientMode::Static)?;
    let mut state = sim.init_state();
    for a in 0..net.arcs.len() {
        state.set_density(a, &vec![INITIAL_DENSITY; cells], 0.5);
    }
    let dt = sim.stable_dt(0.5)?;
    let mut max_mass_residual: f64 = 0.0;
    let start = Instant::now();
    for _ in 0..steps {
        let r = sim.step(&mut state, dt)?;
        max_mass_residual = max_mass_residual.max(r.mass_residual.abs());
    }
    let wall_time = start.elapsed();
    let updates = (arcs * cells * steps) as f64;
    Ok(BenchReport {
        arcs,
        cells,
        steps,
        wall_time,
        cell_updates_per_sec: updates / wall_time.as_secs_f64().max(1e-12),
        max_mass_residual,
    })
}
