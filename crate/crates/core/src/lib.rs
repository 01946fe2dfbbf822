//! Macroscopic flow of tags on a directed network.
//!
//! Each arc carries a density obeying the scalar conservation law
//! `∂t ρ + ∂x f(ρ) = 0` with `f(ρ) = ρ v(ρ)`. Arcs meet at junctions where
//! fluxes are allocated by a small linear program. [`roundabout`] builds the
//! two-entry circle whose exit split coefficients adapt over time toward a
//! closed-form equilibrium.

pub mod bench;
pub mod error;
pub mod flux_model;
pub mod io;
pub mod junction;
pub mod network;
pub mod roundabout;
pub mod simulator;

pub use error::{Error, Result};
pub use flux_model::FluxModel;
pub use junction::{DistributionMatrix, JunctionFluxSolution, JunctionProblem};
pub use network::{Arc, ArcKind, BoundaryCondition, CoefficientMode, Junction, Network, Sink};
pub use simulator::{SimConfig, SimState, Simulator, StepReport, Trajectory};
