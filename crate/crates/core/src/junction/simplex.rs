//! Dense two-phase simplex with Bland's rule, sized for junction problems
//! (a handful of variables and constraints).

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpError {
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    objective: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let k = row[e];
            if k != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= k * pv;
                }
            }
        }
        let k = self.objective[e];
        if k != 0.0 {
            for (v, pv) in self.objective.iter_mut().zip(&pivot_row) {
                *v -= k * pv;
            }
        }
        self.basis[r] = e;
    }

    /// Runs simplex iterations on the current objective row, never letting
    /// columns at or beyond `allowed` enter the basis.
    fn optimize(&mut self, allowed: usize) -> Result<(), LpError> {
        loop {
            let Some(e) = (0..allowed).find(|&j| self.objective[j] < -EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][e];
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - EPS
                                || (ratio <= lratio + EPS && self.basis[r] < self.basis[lr])
                            {
                                leave = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, e);
        }
    }
}

/// Maximizes `c·x` subject to `constraints` and `x ≥ 0`. Returns the
/// maximizer and the optimal value.
pub(crate) fn maximize(c: &[f64], constraints: &[Constraint]) -> Result<(Vec<f64>, f64), LpError> {
    let n = c.len();
    let m = constraints.len();

    // normalize to non-negative right-hand sides
    let normalized: Vec<(Vec<f64>, Relation, f64)> = constraints
        .iter()
        .map(|con| {
            debug_assert_eq!(con.coeffs.len(), n);
            if con.rhs < 0.0 {
                let rel = match con.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (con.coeffs.iter().map(|v| -v).collect(), rel, -con.rhs)
            } else {
                (con.coeffs.clone(), con.relation, con.rhs)
            }
        })
        .collect();

    let n_slack = normalized
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let n_art = normalized
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let art_start = n + n_slack;
    let width = art_start + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n, art_start);
    for (coeffs, rel, rhs) in &normalized {
        let mut row = vec![0.0; width + 1];
        row[..n].copy_from_slice(coeffs);
        row[width] = *rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        objective: vec![0.0; width + 1],
        basis,
        width,
    };

    if n_art > 0 {
        // phase 1: maximize -(sum of artificials)
        for j in art_start..width {
            t.objective[j] = 1.0;
        }
        for r in 0..m {
            if t.basis[r] >= art_start {
                for j in 0..=width {
                    t.objective[j] -= t.rows[r][j];
                }
            }
        }
        t.optimize(width)?;
        if t.objective[width] < -1e-10 {
            return Err(LpError::Infeasible);
        }
        // drive remaining artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(e) = (0..art_start).find(|&j| t.rows[r][j].abs() > EPS) {
                    t.pivot(r, e);
                }
            }
        }
    }

    // phase 2
    t.objective = vec![0.0; width + 1];
    for (o, cj) in t.objective.iter_mut().zip(c) {
        *o = -cj;
    }
    for r in 0..m {
        let b = t.basis[r];
        let k = t.objective[b];
        if k != 0.0 {
            for j in 0..=width {
                t.objective[j] -= k * t.rows[r][j];
            }
        }
    }
    t.optimize(art_start)?;

    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok((x, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> (2, 6), 36
        let cons = vec![
            Constraint::new(vec![1.0, 0.0], Relation::Le, 4.0),
            Constraint::new(vec![0.0, 2.0], Relation::Le, 12.0),
            Constraint::new(vec![3.0, 2.0], Relation::Le, 18.0),
        ];
        let (x, v) = maximize(&[3.0, 5.0], &cons).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 6.0).abs() < 1e-12);
        assert!((v - 36.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max x, x + y = 1, y ≥ 0.25 -> x = 0.75
        let cons = vec![
            Constraint::new(vec![1.0, 1.0], Relation::Eq, 1.0),
            Constraint::new(vec![0.0, 1.0], Relation::Ge, 0.25),
        ];
        let (x, v) = maximize(&[1.0, 0.0], &cons).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        assert!((x[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = vec![
            Constraint::new(vec![1.0], Relation::Le, 1.0),
            Constraint::new(vec![1.0], Relation::Ge, 2.0),
        ];
        assert_eq!(maximize(&[1.0], &cons), Err(LpError::Infeasible));
        let cons = vec![Constraint::new(vec![1.0, -1.0], Relation::Le, 1.0)];
        assert_eq!(maximize(&[1.0, 0.0], &cons), Err(LpError::Unbounded));
    }

    #[test]
    fn degenerate_zero_rhs() {
        let cons = vec![
            Constraint::new(vec![1.0, 1.0], Relation::Le, 0.0),
            Constraint::new(vec![1.0, 0.0], Relation::Le, 0.0),
        ];
        let (x, v) = maximize(&[1.0, 1.0], &cons).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(x, vec![0.0, 0.0]);
    }
}
