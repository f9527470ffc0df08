use crate::error::{Error, Result};
use crate::game::{check_query, check_row, Game, PureResponse};

/// An explicit payoff matrix; responses are [`PureResponse::Column`].
/// The oracle scans every column, so it is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    rows: Vec<Vec<f64>>,
    mu: f64,
}

impl MatrixGame {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || m == 0 {
            return Err(Error::InvalidInstance("matrix must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidInstance("matrix rows differ in length".into()));
        }
        if rows.iter().flatten().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidInstance(
                "payoffs must be finite and nonnegative".into(),
            ));
        }
        if let Some(j) = (0..m).find(|&j| rows.iter().all(|r| r[j] == 0.0)) {
            return Err(Error::InvalidInstance(format!(
                "column {j} is all zero, so the game value is zero"
            )));
        }
        let mu = rows.iter().flatten().copied().fold(0.0, f64::max);
        Ok(MatrixGame { rows, mu })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.rows[0].len()
    }

    fn column_index(&self, r: &PureResponse) -> Result<usize> {
        match r {
            PureResponse::Column(j) if *j < self.num_columns() => Ok(*j),
            _ => Err(Error::ContractViolation(format!(
                "`{r}` is not a column of this {}-column matrix",
                self.num_columns()
            ))),
        }
    }
}

impl Game for MatrixGame {
    fn n(&self) -> usize {
        self.rows.len()
    }

    fn mu(&self) -> f64 {
        self.mu
    }

    fn alpha(&self) -> f64 {
        1.0
    }

    fn family(&self) -> &'static str {
        "matrix"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        check_row(i, self.n())?;
        Ok(self.rows[i][self.column_index(r)?])
    }

    fn best_response(&self, x: &[f64]) -> Result<PureResponse> {
        check_query(x, self.n())?;
        let mut best = (0, f64::INFINITY);
        for j in 0..self.num_columns() {
            let v: f64 = x.iter().zip(&self.rows).map(|(w, r)| w * r[j]).sum();
            if v < best.1 {
                best = (j, v);
            }
        }
        Ok(PureResponse::Column(best.0))
    }

    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        let m = self.num_columns();
        if m > cap {
            return Err(Error::TooLarge {
                family: "matrix",
                detail: format!("{m} columns exceed cap {cap}"),
                count: Some(m as u128),
            });
        }
        Ok((0..m).map(PureResponse::Column).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_picks_cheapest_column_lowest_index_on_ties() {
        let g = MatrixGame::new(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(g.best_response(&[0.5, 0.5]).unwrap(), PureResponse::Column(0));
        assert_eq!(g.best_response(&[1.0, 0.0]).unwrap(), PureResponse::Column(1));
        assert_eq!(g.mu(), 2.0);
    }

    #[test]
    fn validation() {
        assert!(MatrixGame::new(vec![]).is_err());
        assert!(MatrixGame::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]]).is_err());
        assert!(MatrixGame::new(vec![vec![1.0], vec![-2.0]]).is_err());
        let g = MatrixGame::new(vec![vec![5.0]]).unwrap();
        assert!(g.payoff(1, &PureResponse::Column(0)).is_err());
        assert!(g.payoff(0, &PureResponse::Column(1)).is_err());
        assert!(g.payoff(0, &PureResponse::Subset(vec![0])).is_err());
    }
}
