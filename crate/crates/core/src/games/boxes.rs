use itertools::Itertools;

use crate::error::{Error, Result};
use crate::game::{check_query, check_row, Game, PureResponse};
use crate::games::{
    check_costs, check_enumerable, factorial, inverse_permutation, MAX_PERMUTATION_N,
};

/// Searching `n` boxes with costs `c_j`; the searcher pays for every box
/// opened up to and including the one holding the object.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGame {
    costs: Vec<f64>,
    total: f64,
}

impl BoxGame {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        check_costs(&costs, "box costs")?;
        let total = costs.iter().sum();
        Ok(BoxGame { costs, total })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    fn order<'a>(&self, r: &'a PureResponse) -> Result<&'a [usize]> {
        match r {
            PureResponse::Permutation(p) => Ok(p),
            _ => Err(Error::ContractViolation(format!(
                "BOX expects a permutation, got `{r}`"
            ))),
        }
    }
}

/// Cost of opening boxes in `order` until `box_index` is opened.
pub fn box_payoff(costs: &[f64], box_index: usize, order: &[usize]) -> Result<f64> {
    let pos = inverse_permutation(order, costs.len())?;
    check_row(box_index, costs.len())?;
    Ok(order[..=pos[box_index]].iter().map(|&b| costs[b]).sum())
}

/// Smith's rule: open boxes by non-increasing `x_j / c_j`, ties by index.
pub fn smith_order(costs: &[f64], x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| {
        (x[b] / costs[b])
            .total_cmp(&(x[a] / costs[a]))
            .then(a.cmp(&b))
    });
    order
}

impl Game for BoxGame {
    fn n(&self) -> usize {
        self.costs.len()
    }

    fn mu(&self) -> f64 {
        self.total
    }

    fn alpha(&self) -> f64 {
        1.0
    }

    fn family(&self) -> &'static str {
        "box"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        box_payoff(&self.costs, i, self.order(r)?)
    }

    fn column(&self, r: &PureResponse) -> Result<Vec<f64>> {
        let order = self.order(r)?;
        inverse_permutation(order, self.n())?;
        let mut col = vec![0.0; self.n()];
        let mut acc = 0.0;
        for &b in order {
            acc += self.costs[b];
            col[b] = acc;
        }
        Ok(col)
    }

    fn best_response(&self, x: &[f64]) -> Result<PureResponse> {
        check_query(x, self.n())?;
        Ok(PureResponse::Permutation(smith_order(&self.costs, x)))
    }

    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        let n = self.n();
        check_enumerable("box", n, MAX_PERMUTATION_N)?;
        let count = factorial(n);
        if count > cap as u128 {
            return Err(Error::TooLarge {
                family: "box",
                detail: format!("{count} permutations exceed cap {cap}"),
                count: Some(count),
            });
        }
        Ok((0..n).permutations(n).map(PureResponse::Permutation).collect())
    }
}
