//! Benchmark fixtures shared by the criterion targets.

use tagflow::junction::{DistributionMatrix, JunctionProblem};
use tagflow::roundabout::{build_roundabout, RoundaboutParams};
use tagflow::{FluxModel, Network};

/// The roundabout at the default operating point with `cells` cells per arc.
pub fn roundabout(cells: usize) -> Network {
    let rho = FluxModel::unit().free_flow_density(0.1).expect("0.1 is below capacity");
    build_roundabout(&RoundaboutParams::new(0.5, 0.5, rho, rho, cells)).expect("valid roundabout")
}

/// A 3×3 junction whose maximum needs the general LP path.
pub fn three_by_three() -> JunctionProblem {
    let dist = DistributionMatrix::from_rows(&[
        vec![0.5, 0.2, 0.3],
        vec![0.3, 0.5, 0.3],
        vec![0.2, 0.3, 0.4],
    ])
    .expect("columns sum to one");
    JunctionProblem::new(vec![0.2, 0.25, 0.15], vec![0.1, 0.12, 0.2], dist).with_priority(vec![0.5, 0.3, 0.2])
}
