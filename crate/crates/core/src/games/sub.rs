//! Box search with a submodular cost of the searched set, tabulated over
//! all subsets.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::game::{check_query, check_row, Game, PureResponse};
use crate::games::{
    check_enumerable, factorial, inverse_permutation, PrecGame, MAX_PERMUTATION_N,
};

/// Largest ground set accepted in tabulated form.
pub const MAX_SUB_N: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SubGame {
    n: usize,
    /// `f(S)` indexed by the bitmask of `S`.
    values: Vec<f64>,
}

impl SubGame {
    /// `values[mask]` is the cost of the set whose members are the set bits
    /// of `mask`. Monotonicity and submodularity are checked exhaustively.
    pub fn from_table(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_SUB_N {
            return Err(Error::InvalidInstance(format!(
                "tabulated SUB needs 1 <= n <= {MAX_SUB_N}, got {n}"
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidInstance(format!(
                "expected {} subset values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInstance(
                "set-function values must be finite and nonnegative".into(),
            ));
        }
        let full = values[(1 << n) - 1];
        if full <= 0.0 {
            return Err(Error::InvalidInstance(
                "cost of the full set must be positive".into(),
            ));
        }
        let tol = 1e-9 * full;
        for mask in 0..(1usize << n) {
            for a in (0..n).filter(|a| mask & (1 << a) == 0) {
                let with_a = mask | (1 << a);
                if values[with_a] < values[mask] - tol {
                    return Err(Error::InvalidInstance(format!(
                        "set function decreases when adding {a} to mask {mask:#b}"
                    )));
                }
                for b in (a + 1..n).filter(|b| mask & (1 << b) == 0) {
                    let with_b = mask | (1 << b);
                    let with_ab = with_a | (1 << b);
                    if values[with_a] + values[with_b] < values[with_ab] + values[mask] - tol {
                        return Err(Error::InvalidInstance(format!(
                            "set function is not submodular at mask {mask:#b}, items {a}, {b}"
                        )));
                    }
                }
            }
        }
        Ok(SubGame { n, values })
    }

    /// Tabulates `f` over every subset of `0..n`.
    pub fn from_fn(n: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        if n == 0 || n > MAX_SUB_N {
            return Err(Error::InvalidInstance(format!(
                "tabulated SUB needs 1 <= n <= {MAX_SUB_N}, got {n}"
            )));
        }
        let values = (0..1usize << n)
            .map(|mask| {
                let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                f(&members)
            })
            .collect();
        Self::from_table(n, values)
    }

    /// `f(S) = Σ_{j∈S} c_j`, which makes the game identical to BOX.
    pub fn modular(costs: &[f64]) -> Result<Self> {
        Self::from_fn(costs.len(), |s| s.iter().map(|&j| costs[j]).sum())
    }

    /// `f(S)` = total cost of the predecessor closure of `S`.
    pub fn precedence_closure_cost(prec: &PrecGame) -> Result<Self> {
        let n = prec.costs().len();
        let preds = prec.predecessors();
        Self::from_fn(n, |s| {
            let mut inside = vec![false; n];
            let mut stack: Vec<usize> = s.to_vec();
            while let Some(j) = stack.pop() {
                if !inside[j] {
                    inside[j] = true;
                    stack.extend(preds[j].iter().copied());
                }
            }
            (0..n).filter(|&j| inside[j]).map(|j| prec.costs()[j]).sum()
        })
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn order<'a>(&self, r: &'a PureResponse) -> Result<&'a [usize]> {
        match r {
            PureResponse::Permutation(p) => {
                inverse_permutation(p, self.n)?;
                Ok(p)
            }
            _ => Err(Error::ContractViolation(format!(
                "SUB expects a permutation, got `{r}`"
            ))),
        }
    }
}

impl Game for SubGame {
    fn n(&self) -> usize {
        self.n
    }

    fn mu(&self) -> f64 {
        self.values[(1 << self.n) - 1]
    }

    fn alpha(&self) -> f64 {
        1.0
    }

    fn family(&self) -> &'static str {
        "sub"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        check_row(i, self.n)?;
        let mut mask = 0usize;
        for &b in self.order(r)? {
            mask |= 1 << b;
            if b == i {
                break;
            }
        }
        Ok(self.values[mask])
    }

    fn column(&self, r: &PureResponse) -> Result<Vec<f64>> {
        let mut col = vec![0.0; self.n];
        let mut mask = 0usize;
        for &b in self.order(r)? {
            mask |= 1 << b;
            col[b] = self.values[mask];
        }
        Ok(col)
    }

    /// Exact: dynamic program over searched sets, `best(S) = min_{j∈S}
    /// best(S∖j) + x_j f(S)`.
    fn best_response(&self, x: &[f64]) -> Result<PureResponse> {
        check_query(x, self.n)?;
        let n = self.n;
        let full = (1usize << n) - 1;
        let mut best = vec![f64::INFINITY; full + 1];
        let mut last = vec![usize::MAX; full + 1];
        best[0] = 0.0;
        for mask in 1..=full {
            for j in (0..n).filter(|j| mask & (1 << j) != 0) {
                let v = best[mask ^ (1 << j)] + x[j] * self.values[mask];
                if v < best[mask] {
                    best[mask] = v;
                    last[mask] = j;
                }
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut mask = full;
        while mask != 0 {
            let j = last[mask];
            order.push(j);
            mask ^= 1 << j;
        }
        order.reverse();
        Ok(PureResponse::Permutation(order))
    }

    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        check_enumerable("sub", self.n, MAX_PERMUTATION_N)?;
        let count = factorial(self.n);
        if count > cap as u128 {
            return Err(Error::TooLarge {
                family: "sub",
                detail: format!("{count} permutations exceed cap {cap}"),
                count: Some(count),
            });
        }
        Ok((0..self.n)
            .permutations(self.n)
            .map(PureResponse::Permutation)
            .collect())
    }
}
