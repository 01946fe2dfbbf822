#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use tagflow::junction::DistributionMatrix;
use tagflow::{Arc, ArcKind, BoundaryCondition, FluxModel, Junction, JunctionProblem, Network, Sink};

/// Random column-stochastic `m × n` matrix.
pub fn random_distribution(rng: &mut StdRng, m: usize, n: usize) -> DistributionMatrix {
    let mut rows = vec![vec![0.0; n]; m];
    for i in 0..n {
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0_f64)).collect();
        let total: f64 = w.iter().sum();
        for j in 0..m {
            rows[j][i] = if total > 0.0 { w[j] / total } else { 1.0 / m as f64 };
        }
        // make the column sum exact
        let rest: f64 = (0..m - 1).map(|j| rows[j][i]).sum();
        rows[m - 1][i] = (1.0 - rest).max(0.0);
    }
    DistributionMatrix::from_rows(&rows).unwrap()
}

pub fn random_priority(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0_f64)).collect();
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / total).collect();
    let rest: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - rest;
    p
}

/// Junction problem with up to three incoming and three outgoing arcs.
pub fn random_problem(rng: &mut StdRng) -> JunctionProblem {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let demands = (0..n).map(|_| rng.gen_range(0.0..0.25)).collect();
    let supplies = (0..m).map(|_| rng.gen_range(0.0..0.25)).collect();
    let priority = random_priority(rng, n);
    JunctionProblem::new(demands, supplies, random_distribution(rng, m, n)).with_priority(priority)
}

/// Small connected network: one or two sources joined at a first junction,
/// then a few junctions over random subsets of the open arc ends, all
/// remaining ends draining into absorbing sinks.
pub fn random_network(rng: &mut StdRng) -> Network {
    let mut arcs = Vec::new();
    let mut junctions = Vec::new();
    let mut counter = 0;
    let mut new_arc = |arcs: &mut Vec<Arc>, rng: &mut StdRng, kind: ArcKind| {
        let id = format!("e{counter}");
        counter += 1;
        let len = rng.gen_range(0.5..2.0);
        arcs.push(Arc::new(id.clone(), 0.0, len, rng.gen_range(3..=10), kind));
        id
    };

    let sources: Vec<String> = (0..rng.gen_range(1..=2))
        .map(|_| new_arc(&mut arcs, rng, ArcKind::ExternalIn))
        .collect();
    let boundaries = sources
        .iter()
        .map(|s| BoundaryCondition {
            arc: s.clone(),
            density: rng.gen_range(0.0..0.5),
            tracer: rng.gen_range(0.0..=1.0),
        })
        .collect();

    let mut open = sources;
    let layers = rng.gen_range(1..=4);
    for layer in 0..layers {
        let n_in = if layer == 0 { open.len() } else { rng.gen_range(1..=open.len().min(3)) };
        let incoming: Vec<String> = (0..n_in).map(|_| open.remove(rng.gen_range(0..open.len()))).collect();
        let n_out = rng.gen_range(1..=3);
        let outgoing: Vec<String> = (0..n_out)
            .map(|_| new_arc(&mut arcs, rng, ArcKind::Generic))
            .collect();
        let inc: Vec<&str> = incoming.iter().map(String::as_str).collect();
        let out: Vec<&str> = outgoing.iter().map(String::as_str).collect();
        let dist = random_distribution(rng, n_out, n_in);
        let prio = random_priority(rng, n_in);
        junctions.push(Junction::new(format!("j{layer}"), &inc, &out, dist).with_priority(prio));
        open.extend(outgoing);
    }

    let mut sinks = Vec::new();
    for id in &open {
        let arc = arcs.iter_mut().find(|a| &a.id == id).unwrap();
        arc.kind = ArcKind::ExternalOut;
        sinks.push(Sink::absorbing(id.clone()));
    }
    let net = Network {
        model: FluxModel::unit(),
        arcs,
        junctions,
        boundaries,
        sinks,
        tracer_target: None,
    };
    net.ensure_valid().unwrap();
    net
}
