use super::{SimConfig, SimState, Simulator};
use crate::error::{Error, Result};
use crate::junction::DistributionMatrix;

/// Snapshot of every cell at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: f64,
    /// Per arc, per cell.
    pub density: Vec<Vec<f64>>,
    pub tracer: Vec<Vec<f64>>,
    /// Per junction coefficient matrices in force at `time`.
    pub coefficients: Vec<DistributionMatrix>,
}

/// Per-arc mean flux at each sample time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FluxSeries {
    pub times: Vec<f64>,
    /// `values[sample][arc]`.
    pub values: Vec<Vec<f64>>,
}

impl FluxSeries {
    pub fn last(&self) -> Option<&[f64]> {
        self.values.last().map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub fluxes: FluxSeries,
    pub equilibrium_time: Option<f64>,
    pub final_state: SimState,
    /// Largest per-step `|Δm − dt (inflow − outflow)|`.
    pub max_mass_residual: f64,
    /// Largest per-step junction flux imbalance.
    pub max_junction_imbalance: f64,
    pub steps: u64,
}

impl Simulator<'_> {
    /// Runs from the empty network to `config.t_end`.
    pub fn run(&mut self, config: &SimConfig) -> Result<Trajectory> {
        let state = self.init_state();
        self.run_from(state, config)
    }

    /// Steps `state` to `config.t_end`, sampling every
    /// `config.sample_interval`. Steps are shortened to land exactly on
    /// sample times.
    pub fn run_from(&mut self, mut state: SimState, config: &SimConfig) -> Result<Trajectory> {
        config.check()?;
        let dt_max = self.stable_dt(config.cfl)?;
        let mut samples = Vec::new();
        let mut fluxes = FluxSeries::default();
        let mut max_mass_residual: f64 = 0.0;
        let mut max_junction_imbalance: f64 = 0.0;

        self.record(&state, &mut samples, &mut fluxes)?;
        let mut k = 1u64;
        while state.time < config.t_end {
            let target = (k as f64 * config.sample_interval).min(config.t_end);
            let dt = dt_max.min(target - state.time);
            let report = self.step(&mut state, dt)?;
            max_mass_residual = max_mass_residual.max(report.mass_residual.abs());
            max_junction_imbalance = max_junction_imbalance.max(report.junction_imbalance);
            if target - state.time <= 1e-12 * target.max(1.0) {
                state.time = target;
                self.record(&state, &mut samples, &mut fluxes)?;
                k += 1;
            }
        }

        let equilibrium_time = detect_equilibrium(
            &fluxes.times,
            &fluxes.values,
            config.equilibrium_window,
            config.equilibrium_tol,
        )?;
        Ok(Trajectory {
            samples,
            fluxes,
            equilibrium_time,
            steps: state.steps,
            final_state: state,
            max_mass_residual,
            max_junction_imbalance,
        })
    }

    fn record(&mut self, state: &SimState, samples: &mut Vec<Sample>, fluxes: &mut FluxSeries) -> Result<()> {
        let arcs = state.arc_count();
        samples.push(Sample {
            time: state.time,
            density: (0..arcs).map(|a| state.density(a).to_vec()).collect(),
            tracer: (0..arcs).map(|a| state.tracer(a)).collect(),
            coefficients: state.coefficients.clone(),
        });
        fluxes.times.push(state.time);
        fluxes.values.push(self.arc_fluxes(state)?);
        Ok(())
    }
}

/// Earliest sample time after which every series stays within relative
/// `tol` of its mean over the final `window`. `None` if the final window
/// itself is not steady.
pub fn detect_equilibrium(times: &[f64], series: &[Vec<f64>], window: f64, tol: f64) -> Result<Option<f64>> {
    if times.is_empty() || series.is_empty() {
        return Err(Error::Empty("flux series"));
    }
    if window.is_nan() || window <= 0.0 {
        return Err(crate::error::param("window", window, "must be positive"));
    }
    if times.len() != series.len() {
        return Err(Error::InvariantBreach(format!(
            "{} sample times for {} flux rows",
            times.len(),
            series.len()
        )));
    }
    let t_last = *times.last().unwrap();
    let start = times.partition_point(|&t| t < t_last - window);
    let tail = &series[start..];
    let width = series[0].len();
    let means: Vec<f64> = (0..width)
        .map(|a| tail.iter().map(|row| row[a]).sum::<f64>() / tail.len() as f64)
        .collect();
    let steady = |row: &Vec<f64>| {
        row.iter()
            .zip(&means)
            .all(|(v, m)| (v - m).abs() <= tol * m.abs())
    };

    let mut first = series.len();
    while first > 0 && steady(&series[first - 1]) {
        first -= 1;
    }
    if first > start {
        return Ok(None);
    }
    Ok(Some(times[first]))
}
