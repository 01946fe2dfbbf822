use crate::error::{param, Result};
use crate::junction::DistributionMatrix;
use crate::network::{CoefficientMode, Network};

/// Cell mass below which a cell's tracer is undefined.
pub const MASS_EPSILON: f64 = 1e-12;
/// Arriving demand below which dynamic coefficients are left unchanged.
pub const FLUX_EPSILON: f64 = 1e-12;
/// Reported tracer value for cells below [`MASS_EPSILON`].
pub const TRACER_PLACEHOLDER: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub sample_interval: f64,
    pub equilibrium_window: f64,
    pub equilibrium_tol: f64,
    pub coefficient_mode: CoefficientMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            t_end: 100.0,
            sample_interval: 0.5,
            equilibrium_window: 10.0,
            equilibrium_tol: 1e-3,
            coefficient_mode: CoefficientMode::Dynamic,
        }
    }
}

impl SimConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(param("cfl", self.cfl, "must lie in (0, 1]"));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(param("t_end", self.t_end, "must be finite and non-negative"));
        }
        if !(self.sample_interval.is_finite() && self.sample_interval > 0.0) {
            return Err(param("sample_interval", self.sample_interval, "must be positive"));
        }
        if !(self.equilibrium_window.is_finite() && self.equilibrium_window > 0.0) {
            return Err(param("equilibrium_window", self.equilibrium_window, "must be positive"));
        }
        if !(self.equilibrium_tol.is_finite() && self.equilibrium_tol >= 0.0) {
            return Err(param("equilibrium_tol", self.equilibrium_tol, "must be non-negative"));
        }
        Ok(())
    }
}

/// When a dynamic exit first saw traffic, and the coefficient it set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstArrival {
    pub time: f64,
    pub exit_coefficient: f64,
}

/// Mutable simulation state: cell densities and tracer masses for every
/// arc (flat, arc after arc), the current junction coefficients and the clock.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub time: f64,
    pub steps: u64,
    pub(crate) offsets: Vec<usize>,
    pub(crate) rho: Vec<f64>,
    /// `ρ φ` per cell, where `φ` is the fraction bound for the tracer target.
    pub(crate) tracer_mass: Vec<f64>,
    pub coefficients: Vec<DistributionMatrix>,
    pub first_arrival: Vec<Option<FirstArrival>>,
}

impl SimState {
    /// Empty network at `t = 0`, coefficients as declared on the junctions.
    pub fn empty(net: &Network) -> Self {
        let mut offsets = Vec::with_capacity(net.arcs.len() + 1);
        let mut total = 0;
        offsets.push(0);
        for arc in &net.arcs {
            total += arc.cells;
            offsets.push(total);
        }
        Self {
            time: 0.0,
            steps: 0,
            offsets,
            rho: vec![0.0; total],
            tracer_mass: vec![0.0; total],
            coefficients: net.junctions.iter().map(|j| j.distribution.clone()).collect(),
            first_arrival: vec![None; net.junctions.len()],
        }
    }

    pub fn arc_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn density(&self, arc: usize) -> &[f64] {
        &self.rho[self.offsets[arc]..self.offsets[arc + 1]]
    }

    /// Destination fraction per cell; [`TRACER_PLACEHOLDER`] where the cell
    /// is effectively empty.
    pub fn tracer(&self, arc: usize) -> Vec<f64> {
        let r = self.offsets[arc]..self.offsets[arc + 1];
        self.rho[r.clone()]
            .iter()
            .zip(&self.tracer_mass[r])
            .map(|(&rho, &q)| tracer_fraction(rho, q))
            .collect()
    }

    /// Overwrites one arc's densities with a uniform tracer fraction.
    pub fn set_density(&mut self, arc: usize, values: &[f64], tracer: f64) {
        let r = self.offsets[arc]..self.offsets[arc + 1];
        assert_eq!(values.len(), r.len(), "density profile length");
        self.rho[r.clone()].copy_from_slice(values);
        for (q, &v) in self.tracer_mass[r].iter_mut().zip(values) {
            *q = v * tracer;
        }
    }

    /// `Σ ρ Δx` over the whole network.
    pub fn total_mass(&self, net: &Network) -> f64 {
        net.arcs
            .iter()
            .enumerate()
            .map(|(a, arc)| self.density(a).iter().sum::<f64>() * arc.dx())
            .sum()
    }

    /// Coefficient toward the external exit of an exit junction.
    pub fn exit_coefficient(&self, net: &Network, junction: usize) -> Option<f64> {
        let j = &net.junctions[junction];
        let (slot, _) = net.exit_slot(j).ok()?;
        Some(self.coefficients[junction].get(slot, 0))
    }
}

#[inline]
pub(crate) fn tracer_fraction(rho: f64, q: f64) -> f64 {
    if rho >= MASS_EPSILON {
        (q / rho).clamp(0.0, 1.0)
    } else {
        TRACER_PLACEHOLDER
    }
}

/// Tracer carried by flux leaving a donor cell. Any positive mass defines a
/// composition; only a truly empty cell falls back to the placeholder.
#[inline]
pub(crate) fn donor_tracer(rho: f64, q: f64) -> f64 {
    if rho > 0.0 {
        (q / rho).clamp(0.0, 1.0)
    } else {
        TRACER_PLACEHOLDER
    }
}
