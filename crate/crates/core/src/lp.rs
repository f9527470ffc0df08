//! Exact (dense) solution of explicit matrix games.
//!
//! With nonnegative payoffs and no all-zero column the game value is
//! positive, and Player II's problem rescales to the packing LP
//!
//! ```text
//! max 1ᵀu  s.t.  A u ≤ 1,  u ≥ 0
//! ```
//!
//! whose optimum is `1/V*`; `y* = u/Σu`, and the optimal duals `w` give
//! `x* = w/Σw`. The slack basis is feasible at the origin, so a single
//! phase of the primal simplex suffices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::{normalize, MixedStrategy};

const PIVOT_EPS: f64 = 1e-12;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

/// Optimal strategies and value of an explicit game. `y_star` is keyed by
/// column index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactLpSolution {
    pub x_star: MixedStrategy<usize>,
    pub y_star: MixedStrategy<usize>,
    pub value: f64,
    pub pivots: usize,
}

/// Solves the minimax LP pair for an `n × m` matrix of nonnegative payoffs
/// given as rows.
pub fn solve_lp_exact(matrix: &[Vec<f64>]) -> Result<ExactLpSolution> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::ContractViolation("matrix has no rows".into()));
    }
    let m = matrix[0].len();
    if m == 0 {
        return Err(Error::ContractViolation("matrix has no columns".into()));
    }
    let mut scale: f64 = 0.0;
    for row in matrix {
        if row.len() != m {
            return Err(Error::ContractViolation("ragged matrix".into()));
        }
        for &a in row {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::ContractViolation(format!(
                    "payoff {a} is negative or not finite"
                )));
            }
            scale = scale.max(a);
        }
    }

    // A column of zeros lets Player II hold the payoff at 0.
    if let Some(j) = (0..m).find(|&j| matrix.iter().all(|row| row[j] == 0.0)) {
        return Ok(ExactLpSolution {
            x_star: MixedStrategy::uniform(n)?,
            y_star: MixedStrategy::point(j),
            value: 0.0,
            pivots: 0,
        });
    }

    let scaled: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| row.iter().map(|a| a / scale).collect())
        .collect();
    let mut tableau = Tableau::new(&scaled);
    let pivots = tableau.run()?;
    let (u, w) = tableau.polished(&scaled);

    let total_u: f64 = u.iter().sum();
    if total_u <= 0.0 {
        return Err(Error::Internal("packing LP optimum is zero".into()));
    }
    let y_star = normalize(u.iter().copied().enumerate())?;
    let x_star = normalize(w.iter().copied().enumerate())?;
    Ok(ExactLpSolution {
        x_star,
        y_star,
        value: scale / total_u,
        pivots,
    })
}

/// Row-major tableau for `max 1ᵀu, Bu + s = 1`.
struct Tableau {
    n: usize,
    m: usize,
    /// `n` rows of `m + n` coefficients followed by the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs of all `m + n` variables.
    reduced: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(b: &[Vec<f64>]) -> Self {
        let n = b.len();
        let m = b[0].len();
        let rows = b
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = Vec::with_capacity(m + n + 1);
                r.extend_from_slice(row);
                r.extend((0..n).map(|k| if k == i { 1.0 } else { 0.0 }));
                r.push(1.0);
                r
            })
            .collect();
        let mut reduced = vec![1.0; m];
        reduced.extend(std::iter::repeat_n(0.0, n));
        Tableau {
            n,
            m,
            rows,
            reduced,
            basis: (m..m + n).collect(),
        }
    }

    fn run(&mut self) -> Result<usize> {
        let width = self.m + self.n;
        let guard = 50 * width + 1000;
        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let entering = if bland {
                (0..width).find(|&j| self.reduced[j] > PIVOT_EPS)
            } else {
                (0..width)
                    .filter(|&j| self.reduced[j] > PIVOT_EPS)
                    .max_by(|&a, &b| {
                        self.reduced[a]
                            .total_cmp(&self.reduced[b])
                            .then(b.cmp(&a))
                    })
            };
            let Some(col) = entering else {
                return Ok(pivots);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.n {
                let a = self.rows[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rows[i][width] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - PIVOT_EPS
                                || (ratio <= best + PIVOT_EPS && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Internal(
                    "packing LP unbounded despite a positive entry in every column".into(),
                ));
            };
            degenerate = if ratio <= PIVOT_EPS { degenerate + 1 } else { 0 };
            self.pivot(row, col);
            pivots += 1;
            if pivots > guard {
                return Err(Error::NumericalInstability {
                    iteration: pivots as u64,
                    detail: "simplex cycling guard exceeded".into(),
                });
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        let f = self.reduced[col];
        for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        self.reduced[col] = 0.0;
        self.basis[row] = col;
    }

    /// Primal `u` (length m) and dual `w` (length n) recomputed from the
    /// final basis by direct solves, which removes accumulated tableau
    /// drift. Falls back to tableau values if the basis matrix is singular.
    fn polished(&self, b: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let (n, m) = (self.n, self.m);
        let width = m + n;
        let basis_col = |var: usize| -> Vec<f64> {
            if var < m {
                (0..n).map(|i| b[i][var]).collect()
            } else {
                (0..n).map(|i| if i == var - m { 1.0 } else { 0.0 }).collect()
            }
        };
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&v| basis_col(v)).collect();
        // basis matrix M[i][k] = cols[k][i]
        let mat: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| cols[k][i]).collect()).collect();
        let mat_t: Vec<Vec<f64>> = cols.clone();
        let cost: Vec<f64> = self.basis.iter().map(|&v| if v < m { 1.0 } else { 0.0 }).collect();

        let mut u = vec![0.0; m];
        match solve_dense(mat, vec![1.0; n]) {
            Some(ub) => {
                for (k, &var) in self.basis.iter().enumerate() {
                    if var < m {
                        u[var] = ub[k].max(0.0);
                    }
                }
            }
            None => {
                for (i, &var) in self.basis.iter().enumerate() {
                    if var < m {
                        u[var] = self.rows[i][width].max(0.0);
                    }
                }
            }
        }
        let w = match solve_dense(mat_t, cost) {
            Some(w) => w.into_iter().map(|v| v.max(0.0)).collect(),
            // reduced cost of slack k is -w_k
            None => (0..n).map(|k| (-self.reduced[m + k]).max(0.0)).collect(),
        };
        (u, w)
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn single_entry() {
        let s = solve_lp_exact(&[vec![5.0]]).unwrap();
        assert!(close(s.value, 5.0));
        assert_eq!(s.x_star.entries(), &[(0, 1.0)]);
        assert_eq!(s.y_star.entries(), &[(0, 1.0)]);
    }

    #[test]
    fn symmetric_two_by_two() {
        let s = solve_lp_exact(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(close(s.value, 1.5));
        assert!(close(s.x_star.weight(&0), 0.5) && close(s.x_star.weight(&1), 0.5));
        assert!(close(s.y_star.weight(&0), 0.5) && close(s.y_star.weight(&1), 0.5));
    }

    #[test]
    fn identity_matching_pennies() {
        let s = solve_lp_exact(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(close(s.value, 0.5));
        assert!(close(s.x_star.weight(&0), 0.5));
        assert!(close(s.y_star.weight(&1), 0.5));
    }

    #[test]
    fn dominated_column_gets_no_weight() {
        // column 2 is dominated by column 0
        let s = solve_lp_exact(&[vec![1.0, 3.0, 2.0], vec![3.0, 1.0, 4.0]]).unwrap();
        assert!(close(s.value, 2.0));
        assert_eq!(s.y_star.weight(&2), 0.0);
    }

    #[test]
    fn zero_column_means_zero_value() {
        let s = solve_lp_exact(&[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.y_star.entries(), &[(1, 1.0)]);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(solve_lp_exact(&[]).is_err());
        assert!(solve_lp_exact(&[vec![]]).is_err());
        assert!(solve_lp_exact(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(solve_lp_exact(&[vec![-1.0]]).is_err());
    }

    #[test]
    fn dense_solver() {
        let x = solve_dense(vec![vec![0.0, 2.0], vec![1.0, 1.0]], vec![4.0, 3.0]).unwrap();
        assert!(close(x[0], 1.0) && close(x[1], 2.0));
        assert!(solve_dense(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 1.0]).is_none());
    }
}
