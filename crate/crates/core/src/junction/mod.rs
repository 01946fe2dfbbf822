//! Junction flux allocation.
//!
//! Each step, every junction solves
//!
//! ```text
//! maximize   Σ_i γ_i
//! subject to 0 ≤ γ_i ≤ d_i           (incoming demands)
//!            Σ_i A[j][i] γ_i ≤ s_j    (outgoing supplies)
//! ```
//!
//! and, among maximizers, picks the one that grants incoming arcs as much as
//! possible in descending priority order. The low-degree shapes that occur in
//! practice (1×m and n×1) have closed forms; anything else goes through a
//! lexicographic sequence of small simplex solves.

mod brute;
mod simplex;

pub use brute::brute_force_solve;

use crate::error::{Error, Result};
use simplex::{maximize, Constraint, Relation};

/// Column sums of a distribution matrix must be within this of 1.
pub const COLUMN_MASS_TOLERANCE: f64 = 1e-9;

/// Routing matrix `A[j][i]`: fraction of the flux leaving incoming arc `i`
/// that enters outgoing arc `j`. Stored row-major by outgoing arc.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionMatrix {
    outgoing: usize,
    incoming: usize,
    data: Vec<f64>,
}

impl DistributionMatrix {
    /// Builds from rows, one per outgoing arc, each with one entry per
    /// incoming arc.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let outgoing = rows.len();
        let incoming = rows.first().map_or(0, Vec::len);
        if outgoing == 0 || incoming == 0 {
            return Err(Error::Junction("distribution matrix is empty".into()));
        }
        if rows.iter().any(|r| r.len() != incoming) {
            return Err(Error::Junction("distribution rows have unequal length".into()));
        }
        Ok(Self {
            outgoing,
            incoming,
            data: rows.concat(),
        })
    }

    /// Single column routing one incoming arc over several outgoing arcs.
    pub fn split(fractions: &[f64]) -> Self {
        Self {
            outgoing: fractions.len(),
            incoming: 1,
            data: fractions.to_vec(),
        }
    }

    /// Single row collecting every incoming arc into one outgoing arc.
    pub fn merge(incoming: usize) -> Self {
        Self {
            outgoing: 1,
            incoming,
            data: vec![1.0; incoming],
        }
    }

    pub fn outgoing(&self) -> usize {
        self.outgoing
    }

    pub fn incoming(&self) -> usize {
        self.incoming
    }

    #[inline]
    pub fn get(&self, out: usize, inc: usize) -> f64 {
        self.data[out * self.incoming + inc]
    }

    #[inline]
    pub fn set(&mut self, out: usize, inc: usize, value: f64) {
        self.data[out * self.incoming + inc] = value;
    }

    pub fn column_mass(&self, inc: usize) -> f64 {
        (0..self.outgoing).map(|j| self.get(j, inc)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.incoming).map(<[f64]>::to_vec).collect()
    }

    /// `A γ`.
    pub fn apply(&self, gamma_in: &[f64], gamma_out: &mut [f64]) {
        for (j, out) in gamma_out.iter_mut().enumerate() {
            let row = &self.data[j * self.incoming..(j + 1) * self.incoming];
            *out = row.iter().zip(gamma_in).map(|(a, g)| a * g).sum();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionProblem {
    pub demands: Vec<f64>,
    pub supplies: Vec<f64>,
    pub distribution: DistributionMatrix,
    pub priority: Vec<f64>,
}

impl JunctionProblem {
    /// Problem with equal priority weights.
    pub fn new(demands: Vec<f64>, supplies: Vec<f64>, distribution: DistributionMatrix) -> Self {
        let n = demands.len().max(1);
        Self {
            priority: vec![1.0 / n as f64; demands.len()],
            demands,
            supplies,
            distribution,
        }
    }

    pub fn with_priority(mut self, priority: Vec<f64>) -> Self {
        self.priority = priority;
        self
    }

    pub fn check(&self) -> Result<()> {
        let (n, m) = (self.demands.len(), self.supplies.len());
        if n == 0 || m == 0 {
            return Err(Error::Junction("junction needs at least one incoming and one outgoing arc".into()));
        }
        if self.distribution.incoming() != n || self.distribution.outgoing() != m {
            return Err(Error::Junction(format!(
                "dimension mismatch: {n} demands, {m} supplies, distribution {}x{}",
                self.distribution.outgoing(),
                self.distribution.incoming()
            )));
        }
        if self.priority.len() != n {
            return Err(Error::Junction(format!(
                "dimension mismatch: {} priority weights for {n} incoming arcs",
                self.priority.len()
            )));
        }
        let bad = |v: &f64| !(v.is_finite() && *v >= 0.0);
        if self.demands.iter().any(bad) || self.supplies.iter().any(bad) {
            return Err(Error::Junction("demands and supplies must be finite and non-negative".into()));
        }
        if self.distribution.data.iter().any(bad) || self.priority.iter().any(bad) {
            return Err(Error::Junction("distribution and priority entries must be finite and non-negative".into()));
        }
        for i in 0..n {
            let mass = self.distribution.column_mass(i);
            if (mass - 1.0).abs() > COLUMN_MASS_TOLERANCE {
                return Err(Error::Junction(format!("column {i} has mass {mass}, expected 1")));
            }
        }
        Ok(())
    }

    pub fn objective(&self, gamma_in: &[f64]) -> f64 {
        gamma_in.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionFluxSolution {
    pub gamma_in: Vec<f64>,
    pub gamma_out: Vec<f64>,
}

impl JunctionFluxSolution {
    pub fn throughput(&self) -> f64 {
        self.gamma_in.iter().sum()
    }

    /// `Σ γ_in − Σ γ_out`; zero up to round-off for any solution.
    pub fn imbalance(&self) -> f64 {
        self.gamma_in.iter().sum::<f64>() - self.gamma_out.iter().sum::<f64>()
    }
}

/// Incoming arc indices by descending priority weight, ties in list order.
pub fn priority_order(priority: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..priority.len()).collect();
    order.sort_by(|&a, &b| priority[b].total_cmp(&priority[a]));
    order
}

pub fn solve(p: &JunctionProblem) -> Result<JunctionFluxSolution> {
    p.check()?;
    let order = priority_order(&p.priority);
    let mut gamma_in = vec![0.0; p.demands.len()];
    let mut gamma_out = vec![0.0; p.supplies.len()];
    solve_into(
        &p.demands,
        &p.supplies,
        &p.distribution,
        &order,
        &mut gamma_in,
        &mut gamma_out,
    )?;
    Ok(JunctionFluxSolution {
        gamma_in,
        gamma_out,
    })
}

/// Allocation-free entry point for the simulator. Inputs are assumed to have
/// passed [`JunctionProblem::check`]; `order` comes from [`priority_order`].
pub fn solve_into(
    demands: &[f64],
    supplies: &[f64],
    a: &DistributionMatrix,
    order: &[usize],
    gamma_in: &mut [f64],
    gamma_out: &mut [f64],
) -> Result<()> {
    match (demands.len(), supplies.len()) {
        (1, _) => {
            let mut g = demands[0];
            for (j, &s) in supplies.iter().enumerate() {
                let share = a.get(j, 0);
                if share > 0.0 {
                    g = g.min(s / share);
                }
            }
            gamma_in[0] = g;
        }
        (_, 1) => {
            // every column is the single entry 1: sequential fill
            let mut room = supplies[0];
            for &i in order {
                let g = demands[i].min(room);
                gamma_in[i] = g;
                room = (room - g).max(0.0);
            }
        }
        _ => lexicographic_lp(demands, supplies, a, order, gamma_in)?,
    }
    a.apply(gamma_in, gamma_out);
    repair_feasibility(demands, supplies, a, gamma_in, gamma_out);
    Ok(())
}

/// Scales away round-off overshoot of supplies so that `A γ ≤ s` holds
/// exactly while `Σ γ_in = Σ γ_out` is preserved.
fn repair_feasibility(
    demands: &[f64],
    supplies: &[f64],
    a: &DistributionMatrix,
    gamma_in: &mut [f64],
    gamma_out: &mut [f64],
) {
    let mut clipped = false;
    for (g, &d) in gamma_in.iter_mut().zip(demands) {
        if *g > d {
            *g = d;
            clipped = true;
        }
    }
    if clipped {
        a.apply(gamma_in, gamma_out);
    }
    let mut factor: f64 = 1.0;
    for (&o, &s) in gamma_out.iter().zip(supplies) {
        if o > s {
            factor = factor.min(if o > 0.0 { s / o } else { 0.0 });
        }
    }
    if factor < 1.0 {
        // shave a few ulps so that re-applying A cannot overshoot again
        let factor = factor * (1.0 - 4.0 * f64::EPSILON);
        for g in gamma_in.iter_mut() {
            *g *= factor;
        }
        a.apply(gamma_in, gamma_out);
    }
}

fn lexicographic_lp(
    demands: &[f64],
    supplies: &[f64],
    a: &DistributionMatrix,
    order: &[usize],
    gamma_in: &mut [f64],
) -> Result<()> {
    let n = demands.len();
    let mut constraints = Vec::with_capacity(n + supplies.len() + n + 1);
    for (i, &d) in demands.iter().enumerate() {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        constraints.push(Constraint::new(row, Relation::Le, d));
    }
    for (j, &s) in supplies.iter().enumerate() {
        let row: Vec<f64> = (0..n).map(|i| a.get(j, i)).collect();
        if row.iter().any(|&v| v > 0.0) {
            constraints.push(Constraint::new(row, Relation::Le, s));
        }
    }
    let lp_err = |e| Error::Junction(format!("junction LP failed: {e:?}"));

    let (mut x, total) = maximize(&vec![1.0; n], &constraints).map_err(lp_err)?;
    constraints.push(Constraint::new(vec![1.0; n], Relation::Ge, total));

    // the final stage is fully determined by the earlier ones
    for &k in &order[..n.saturating_sub(1)] {
        let mut c = vec![0.0; n];
        c[k] = 1.0;
        let (xk, vk) = maximize(&c, &constraints).map_err(lp_err)?;
        x = xk;
        let mut row = vec![0.0; n];
        row[k] = 1.0;
        constraints.push(Constraint::new(row, Relation::Ge, vk));
    }
    for (g, (v, &d)) in gamma_in.iter_mut().zip(x.into_iter().zip(demands)) {
        *g = v.clamp(0.0, d);
    }
    // recover round-off left on the table by the stages, best priority first
    for &i in order {
        let mut top = demands[i];
        for (j, &s) in supplies.iter().enumerate() {
            let share = a.get(j, i);
            if share > 0.0 {
                let used: f64 = (0..n).filter(|&k| k != i).map(|k| a.get(j, k) * gamma_in[k]).sum();
                top = top.min(((s - used) / share).max(0.0));
            }
        }
        gamma_in[i] = gamma_in[i].max(top);
    }
    Ok(())
}
