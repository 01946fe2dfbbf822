//! Explicit Godunov time stepping on a network.
//!
//! A step has two phases. Phase 1 only reads the state: it computes every
//! interior interface flux, the boundary inflows and sink outflows, and the
//! junction fluxes from demand/supply of the adjacent cells. Phase 2 applies
//! the conservative update `ρ_i ← ρ_i − (dt/Δx)(F_{i+½} − F_{i−½})` to cell
//! densities and, with donor-cell tracer values, to tracer masses. Dynamic
//! exit coefficients are refreshed from the arriving composition last.

mod state;
mod trajectory;

pub use state::{
    FirstArrival, SimConfig, SimState, FLUX_EPSILON, MASS_EPSILON, TRACER_PLACEHOLDER,
};
pub use trajectory::{detect_equilibrium, FluxSeries, Sample, Trajectory};

use crate::error::{Error, Result};
use crate::flux_model::{FluxModel, DENSITY_TOLERANCE};
use crate::junction::{priority_order, solve_into};
use crate::network::{CoefficientMode, Network};
use state::donor_tracer;

/// Largest stable step: `cfl · min Δx / max |f'|`.
pub fn stable_dt(net: &Network, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(crate::error::param("cfl", cfl, "must lie in (0, 1]"));
    }
    let min_dx = net
        .arcs
        .iter()
        .map(|a| a.dx())
        .min_by(f64::total_cmp)
        .ok_or(Error::Empty("network has no arcs"))?;
    Ok(cfl * min_dx / net.model.max_wave_speed())
}

#[derive(Debug, Clone, Copy)]
enum Upstream {
    Reservoir { density: f64, tracer: f64 },
    Junction,
}

#[derive(Debug, Clone, Copy)]
enum Downstream {
    Sink { exterior: Option<f64> },
    Junction,
}

/// How tracer mass leaves a junction.
#[derive(Debug, Clone, Copy)]
enum TracerRouting {
    /// Each outgoing arc receives `Σ_i A[j][i] γ_i φ_i`.
    Mix,
    /// Exit junction sorting tags by destination: the exit arc takes the
    /// mass bound for it first, the circle arc carries the rest.
    Sort { exit: usize, exit_is_target: bool },
}

#[derive(Debug, Clone)]
struct JunctionLayout {
    incoming: Vec<usize>,
    outgoing: Vec<usize>,
    order: Vec<usize>,
    routing: TracerRouting,
    dynamic: bool,
    demands: Vec<f64>,
    supplies: Vec<f64>,
    gamma_in: Vec<f64>,
    gamma_out: Vec<f64>,
}

/// Mass bookkeeping for one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// `Σ_cells Δρ Δx`.
    pub mass_change: f64,
    pub inflow: f64,
    pub outflow: f64,
    /// `mass_change − dt (inflow − outflow)`.
    pub mass_residual: f64,
    /// Largest `|Σ γ_in − Σ γ_out|` over junctions.
    pub junction_imbalance: f64,
}

pub struct Simulator<'a> {
    net: &'a Network,
    model: FluxModel,
    mode: CoefficientMode,
    offsets: Vec<usize>,
    dx: Vec<f64>,
    upstream: Vec<Upstream>,
    downstream: Vec<Downstream>,
    junctions: Vec<JunctionLayout>,
    /// Interface fluxes, arc `a` occupying `offsets[a] + a ..= offsets[a + 1] + a`.
    flux: Vec<f64>,
    tracer_flux: Vec<f64>,
    last_imbalance: f64,
}

impl<'a> Simulator<'a> {
    /// Validates the network and resolves its topology into index form.
    pub fn new(net: &'a Network, mode: CoefficientMode) -> Result<Self> {
        net.ensure_valid()?;
        let index = |id: &str| net.arc_index(id).expect("validated reference");
        let state = SimState::empty(net);
        let offsets = state.offsets.clone();
        let n_arcs = net.arcs.len();

        let mut upstream = vec![Upstream::Junction; n_arcs];
        let mut downstream = vec![Downstream::Junction; n_arcs];
        for bc in &net.boundaries {
            upstream[index(&bc.arc)] = Upstream::Reservoir {
                density: bc.density,
                tracer: bc.tracer,
            };
        }
        for s in &net.sinks {
            downstream[index(&s.arc)] = Downstream::Sink {
                exterior: s.exterior_density,
            };
        }
        let junctions = net
            .junctions
            .iter()
            .map(|j| {
                let routing = match (j.mode, net.exit_slot(j)) {
                    (CoefficientMode::Dynamic, Ok((exit, exit_is_target))) => TracerRouting::Sort {
                        exit,
                        exit_is_target,
                    },
                    _ => TracerRouting::Mix,
                };
                JunctionLayout {
                    incoming: j.incoming.iter().map(|a| index(a)).collect(),
                    outgoing: j.outgoing.iter().map(|a| index(a)).collect(),
                    order: priority_order(&j.priority),
                    routing,
                    dynamic: j.mode == CoefficientMode::Dynamic && mode == CoefficientMode::Dynamic,
                    demands: vec![0.0; j.incoming.len()],
                    supplies: vec![0.0; j.outgoing.len()],
                    gamma_in: vec![0.0; j.incoming.len()],
                    gamma_out: vec![0.0; j.outgoing.len()],
                }
            })
            .collect();
        let interfaces = offsets[n_arcs] + n_arcs;
        Ok(Self {
            net,
            model: net.model,
            mode,
            dx: net.arcs.iter().map(|a| a.dx()).collect(),
            offsets,
            upstream,
            downstream,
            junctions,
            flux: vec![0.0; interfaces],
            tracer_flux: vec![0.0; interfaces],
            last_imbalance: 0.0,
        })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    /// Empty network at `t = 0` with the junctions' initial coefficients.
    pub fn init_state(&self) -> SimState {
        SimState::empty(self.net)
    }

    pub fn stable_dt(&self, cfl: f64) -> Result<f64> {
        stable_dt(self.net, cfl)
    }

    #[inline]
    fn iface(&self, arc: usize, k: usize) -> usize {
        self.offsets[arc] + arc + k
    }

    /// Phase 1: fills the interface flux buffers from `state`.
    fn compute_fluxes(&mut self, state: &SimState) -> Result<()> {
        let m = self.model;
        let (rho, q) = (&state.rho, &state.tracer_mass);
        for a in 0..self.dx.len() {
            let (lo, hi) = (self.offsets[a], self.offsets[a + 1]);
            let base = lo + a;
            let cells = &rho[lo..hi];
            let masses = &q[lo..hi];
            let flux = &mut self.flux[base..=base + cells.len()];
            let tflux = &mut self.tracer_flux[base..=base + cells.len()];
            for k in 1..cells.len() {
                let f = m.godunov_unchecked(cells[k - 1], cells[k]);
                flux[k] = f;
                tflux[k] = f * donor_tracer(cells[k - 1], masses[k - 1]);
            }
            if let Upstream::Reservoir { density, tracer } = self.upstream[a] {
                let f = m.demand_unchecked(density).min(m.supply_unchecked(cells[0]));
                flux[0] = f;
                tflux[0] = f * tracer;
            }
            if let Downstream::Sink { exterior } = self.downstream[a] {
                let last = cells.len() - 1;
                let room = exterior.map_or(m.capacity(), |e| m.supply_unchecked(e));
                let f = m.demand_unchecked(cells[last]).min(room);
                flux[last + 1] = f;
                tflux[last + 1] = f * donor_tracer(cells[last], masses[last]);
            }
        }

        let mut worst: f64 = 0.0;
        for (jk, jl) in self.junctions.iter_mut().enumerate() {
            let a = &state.coefficients[jk];
            for (d, &arc) in jl.demands.iter_mut().zip(&jl.incoming) {
                *d = m.demand_unchecked(rho[self.offsets[arc + 1] - 1]);
            }
            for (s, &arc) in jl.supplies.iter_mut().zip(&jl.outgoing) {
                *s = m.supply_unchecked(rho[self.offsets[arc]]);
            }
            solve_into(&jl.demands, &jl.supplies, a, &jl.order, &mut jl.gamma_in, &mut jl.gamma_out)?;
            worst = worst.max((jl.gamma_in.iter().sum::<f64>() - jl.gamma_out.iter().sum::<f64>()).abs());

            // tracer carried into the junction from each incoming arc
            let mut bound_in = 0.0;
            for (i, &arc) in jl.incoming.iter().enumerate() {
                let last = self.offsets[arc + 1] - 1;
                let g = jl.gamma_in[i];
                let tf = g * donor_tracer(rho[last], q[last]);
                let idx = self.offsets[arc + 1] + arc;
                self.flux[idx] = g;
                self.tracer_flux[idx] = tf;
                bound_in += tf;
            }
            for (j, &arc) in jl.outgoing.iter().enumerate() {
                let idx = self.offsets[arc] + arc;
                self.flux[idx] = jl.gamma_out[j];
            }
            match jl.routing {
                TracerRouting::Mix => {
                    for (j, &arc) in jl.outgoing.iter().enumerate() {
                        let mut tf = 0.0;
                        for (i, &inc) in jl.incoming.iter().enumerate() {
                            let last = self.offsets[inc + 1] - 1;
                            tf += a.get(j, i) * jl.gamma_in[i] * donor_tracer(rho[last], q[last]);
                        }
                        self.tracer_flux[self.offsets[arc] + arc] = tf;
                    }
                }
                TracerRouting::Sort {
                    exit,
                    exit_is_target,
                } => {
                    let cont = 1 - exit;
                    let (e, c) = (jl.gamma_out[exit], jl.gamma_out[cont]);
                    let other_in = (jl.gamma_in[0] - bound_in).max(0.0);
                    let to_exit = if exit_is_target {
                        bound_in.min(e)
                    } else {
                        (e - other_in.min(e)).max(0.0)
                    };
                    let to_cont = (bound_in - to_exit).clamp(0.0, c);
                    self.tracer_flux[self.offsets[jl.outgoing[exit]] + jl.outgoing[exit]] = to_exit;
                    self.tracer_flux[self.offsets[jl.outgoing[cont]] + jl.outgoing[cont]] = to_cont;
                }
            }
        }
        self.last_imbalance = worst;
        Ok(())
    }

    /// Per-arc mean of the interface fluxes for the current state, without
    /// advancing it.
    pub fn arc_fluxes(&mut self, state: &SimState) -> Result<Vec<f64>> {
        self.compute_fluxes(state)?;
        Ok((0..self.dx.len())
            .map(|a| {
                let n = self.offsets[a + 1] - self.offsets[a];
                let base = self.iface(a, 0);
                self.flux[base..=base + n].iter().sum::<f64>() / (n + 1) as f64
            })
            .collect())
    }

    /// Advances `state` by `dt`.
    pub fn step(&mut self, state: &mut SimState, dt: f64) -> Result<StepReport> {
        let limit = self.stable_dt(1.0)?;
        if dt.is_nan() || dt <= 0.0 || dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, stable: limit });
        }
        self.compute_fluxes(state)?;
        let rho_max = self.model.rho_max();

        let mut report = StepReport {
            dt,
            junction_imbalance: self.last_imbalance,
            ..StepReport::default()
        };
        let mut arc_terms = 0.0;
        for a in 0..self.dx.len() {
            let (lo, hi) = (self.offsets[a], self.offsets[a + 1]);
            let base = lo + a;
            let n = hi - lo;
            let lambda = dt / self.dx[a];
            let flux = &self.flux[base..=base + n];
            let tflux = &self.tracer_flux[base..=base + n];
            let mut delta = 0.0;
            for k in 0..n {
                let old = state.rho[lo + k];
                let mut new = old - lambda * (flux[k + 1] - flux[k]);
                if !(new >= -DENSITY_TOLERANCE && new <= rho_max + DENSITY_TOLERANCE) {
                    return Err(Error::InvariantBreach(format!(
                        "density {new} in cell {k} of arc `{}` at t = {}",
                        self.net.arcs[a].id, state.time
                    )));
                }
                new = new.clamp(0.0, rho_max);
                delta += new - old;
                state.rho[lo + k] = new;

                let qn = state.tracer_mass[lo + k] - lambda * (tflux[k + 1] - tflux[k]);
                if qn < -DENSITY_TOLERANCE || qn > new + DENSITY_TOLERANCE {
                    return Err(Error::InvariantBreach(format!(
                        "tracer mass {qn} exceeds density {new} in cell {k} of arc `{}`",
                        self.net.arcs[a].id
                    )));
                }
                state.tracer_mass[lo + k] = qn.clamp(0.0, new);
            }
            let dx = self.dx[a];
            arc_terms += delta * dx - dt * (flux[0] - flux[n]);
            report.mass_change += delta * dx;
            if matches!(self.upstream[a], Upstream::Reservoir { .. }) {
                report.inflow += flux[0];
            }
            if matches!(self.downstream[a], Downstream::Sink { .. }) {
                report.outflow += flux[n];
            }
        }
        // Σ_arcs (Δm − dt(F_in − F_out)) plus what junctions create or lose
        let junction_net: f64 = self
            .junctions
            .iter()
            .map(|j| j.gamma_out.iter().sum::<f64>() - j.gamma_in.iter().sum::<f64>())
            .sum();
        report.mass_residual = arc_terms + dt * junction_net;

        state.time += dt;
        state.steps += 1;
        self.update_coefficients(state);
        Ok(report)
    }

    fn update_coefficients(&self, state: &mut SimState) {
        for (jk, jl) in self.junctions.iter().enumerate() {
            if !jl.dynamic {
                continue;
            }
            let TracerRouting::Sort {
                exit,
                exit_is_target,
            } = jl.routing
            else {
                continue;
            };
            let arc = jl.incoming[0];
            let last = self.offsets[arc + 1] - 1;
            let rho = state.rho[last];
            if self.model.demand_unchecked(rho) < FLUX_EPSILON {
                continue;
            }
            let phi = donor_tracer(rho, state.tracer_mass[last]);
            let c = if exit_is_target { phi } else { 1.0 - phi };
            let a = &mut state.coefficients[jk];
            a.set(exit, 0, c);
            a.set(1 - exit, 0, 1.0 - c);
            if state.first_arrival[jk].is_none() {
                state.first_arrival[jk] = Some(FirstArrival {
                    time: state.time,
                    exit_coefficient: c,
                });
            }
        }
    }

    /// Coefficient pair `(to exit, to circle)` a dynamic exit junction would
    /// adopt for arriving flux `arriving` with target fraction `tracer`.
    /// Returns `None` when the arriving flux is below [`FLUX_EPSILON`].
    pub fn dynamic_exit_coefficients(
        &self,
        junction: usize,
        arriving: f64,
        tracer: f64,
    ) -> Result<Option<(f64, f64)>> {
        let j = &self.net.junctions[junction];
        let (_, exit_is_target) = self.net.exit_slot(j)?;
        if arriving < FLUX_EPSILON {
            return Ok(None);
        }
        let c = if exit_is_target { tracer } else { 1.0 - tracer };
        Ok(Some((c, 1.0 - c)))
    }
}
