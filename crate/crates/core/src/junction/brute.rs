use super::{priority_order, JunctionFluxSolution, JunctionProblem};
use crate::error::{Error, Result};

const TIE: f64 = 1e-12;

/// Exhaustive grid search over `γ ∈ ∏ [0, d_i]`, used as a reference for
/// [`solve`](super::solve).
///
/// The last incoming arc is not gridded: for each grid point of the others
/// its largest feasible value is taken directly. Feasibility is downward
/// closed and the objective increasing in every coordinate, so this visits
/// exactly the candidates a full enumeration would keep.
pub fn brute_force_solve(p: &JunctionProblem, step: f64) -> Result<JunctionFluxSolution> {
    p.check()?;
    let n = p.demands.len();
    if n > 3 {
        return Err(Error::Junction(format!(
            "brute force limited to 3 incoming arcs, got {n}"
        )));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Junction(format!("grid step must be positive, got {step}")));
    }
    let m = p.supplies.len();
    let a = &p.distribution;
    let order = priority_order(&p.priority);
    let axes: Vec<Vec<f64>> = p.demands[..n - 1]
        .iter()
        .map(|&d| grid_axis(d, step))
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut point = vec![0.0; n];
    let mut idx = vec![0usize; n - 1];
    'outer: loop {
        for (k, &i) in idx.iter().enumerate() {
            point[k] = axes[k][i];
        }
        let last = n - 1;
        let mut top = p.demands[last];
        let mut feasible = true;
        for j in 0..m {
            let used: f64 = (0..last).map(|i| a.get(j, i) * point[i]).sum();
            let room = p.supplies[j] - used;
            if room < -TIE {
                feasible = false;
                break;
            }
            let share = a.get(j, last);
            if share > 0.0 {
                top = top.min(room.max(0.0) / share);
            }
        }
        if feasible {
            point[last] = top;
            let obj: f64 = point.iter().sum();
            let better = match &best {
                None => true,
                Some((b, bp)) => {
                    obj > b + TIE || (obj >= b - TIE && lex_greater(&point, bp, &order))
                }
            };
            if better {
                best = Some((obj, point.clone()));
            }
        }
        // odometer over the gridded axes
        for k in 0..n - 1 {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }

    let gamma_in = best.map(|(_, p)| p).unwrap_or_else(|| vec![0.0; n]);
    let mut gamma_out = vec![0.0; m];
    a.apply(&gamma_in, &mut gamma_out);
    Ok(JunctionFluxSolution {
        gamma_in,
        gamma_out,
    })
}

fn grid_axis(d: f64, step: f64) -> Vec<f64> {
    let count = (d / step).floor() as usize;
    let mut axis: Vec<f64> = (0..=count).map(|k| k as f64 * step).filter(|&v| v <= d).collect();
    if axis.last().is_none_or(|&v| v < d) {
        axis.push(d);
    }
    axis
}

fn lex_greater(a: &[f64], b: &[f64], order: &[usize]) -> bool {
    for &i in order {
        if a[i] > b[i] + TIE {
            return true;
        }
        if a[i] < b[i] - TIE {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::super::{solve, DistributionMatrix};
    use super::*;

    #[test]
    fn axis_covers_endpoint() {
        assert_eq!(grid_axis(0.0, 0.1), vec![0.0]);
        let ax = grid_axis(0.25, 0.1);
        assert_eq!(ax.len(), 4);
        assert_eq!(*ax.last().unwrap(), 0.25);
    }

    #[test]
    fn zero_demand_gives_zero() {
        let p = JunctionProblem::new(
            vec![0.0, 0.0],
            vec![0.1, 0.2],
            DistributionMatrix::from_rows(&[vec![0.5, 0.3], vec![0.5, 0.7]]).unwrap(),
        );
        let sol = brute_force_solve(&p, 1e-3).unwrap();
        assert_eq!(sol.gamma_in, vec![0.0, 0.0]);
    }

    #[test]
    fn single_incoming_matches_solver_exactly() {
        let p = JunctionProblem::new(
            vec![0.21],
            vec![0.07, 0.2, 0.05],
            DistributionMatrix::split(&[0.3, 0.5, 0.2]),
        );
        assert_eq!(
            brute_force_solve(&p, 1e-3).unwrap().gamma_in,
            solve(&p).unwrap().gamma_in
        );
    }

    #[test]
    fn refuses_large_problems() {
        let p = JunctionProblem::new(vec![0.1; 4], vec![0.2], DistributionMatrix::merge(4));
        assert!(brute_force_solve(&p, 1e-2).is_err());
        let p = JunctionProblem::new(vec![0.1], vec![0.2], DistributionMatrix::merge(1));
        assert!(brute_force_solve(&p, 0.0).is_err());
    }
}
