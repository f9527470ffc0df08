//! Hide-seek and pursuit-evasion with search costs.
//!
//! The searcher inspects a set `S` of locations with `c(S) ≤ k`; a hider at
//! `j ∈ S` is caught with probability `p_j`. Solvers see the escape form
//! `1 − p_j·[j ∈ S]` so the hider (Player I) is the maximizer.

use crate::error::{Error, Result};
use crate::game::{check_query, check_row, Game, PureResponse};
use crate::games::{check_costs, check_enumerable, MAX_SUBSET_N};
use crate::knapsack::knapsack_fptas;

/// Default knapsack accuracy of the searcher oracle.
pub const DEFAULT_HSPE_EPS: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct HspeGame {
    costs: Vec<f64>,
    capture: Vec<f64>,
    budget: f64,
    eps: f64,
}

impl HspeGame {
    pub fn new(costs: Vec<f64>, capture: Vec<f64>, budget: f64, eps: f64) -> Result<Self> {
        check_costs(&costs, "hspe costs")?;
        if capture.len() != costs.len() {
            return Err(Error::InvalidInstance(
                "capture probabilities and costs differ in length".into(),
            ));
        }
        if let Some(p) = capture.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::InvalidInstance(format!(
                "capture probability {p} is outside (0, 1]"
            )));
        }
        let cheapest = costs.iter().copied().fold(f64::INFINITY, f64::min);
        if !budget.is_finite() || budget < cheapest {
            return Err(Error::InvalidInstance(format!(
                "budget {budget} cannot pay for any location (cheapest costs {cheapest})"
            )));
        }
        let affordable_all = costs.iter().sum::<f64>() <= budget;
        if affordable_all && capture.iter().all(|&p| p == 1.0) {
            return Err(Error::InvalidInstance(
                "searcher can inspect every location with certain capture; escape value is zero"
                    .into(),
            ));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidInstance(format!(
                "oracle eps must be positive, got {eps}"
            )));
        }
        Ok(HspeGame {
            costs,
            capture,
            budget,
            eps,
        })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn capture(&self) -> &[f64] {
        &self.capture
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn subset<'a>(&self, r: &'a PureResponse) -> Result<&'a [usize]> {
        let PureResponse::Subset(s) = r else {
            return Err(Error::ContractViolation(format!(
                "HSPE expects a subset, got `{r}`"
            )));
        };
        if s.iter().any(|&j| j >= self.costs.len()) {
            return Err(Error::ContractViolation(format!("`{r}` names an unknown location")));
        }
        let spent: f64 = s.iter().map(|&j| self.costs[j]).sum();
        if spent > self.budget {
            return Err(Error::ContractViolation(format!(
                "`{r}` costs {spent}, over the budget {}",
                self.budget
            )));
        }
        Ok(s)
    }

    /// Probability that a hider at `j` is caught by `r`.
    pub fn capture_payoff(&self, j: usize, r: &PureResponse) -> Result<f64> {
        check_row(j, self.costs.len())?;
        let s = self.subset(r)?;
        Ok(if s.binary_search(&j).is_ok() { self.capture[j] } else { 0.0 })
    }

    /// Knapsack weights `w_j = p_j x_j`.
    pub fn capture_weights(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.capture).map(|(x, p)| x * p).collect()
    }
}

impl Game for HspeGame {
    fn n(&self) -> usize {
        self.costs.len()
    }

    fn mu(&self) -> f64 {
        1.0
    }

    /// Nominal factor `1 + eps`. The knapsack gap is multiplicative in
    /// captured mass, which is additive in escape probability, so this is
    /// not a proven bound for the escape form.
    fn alpha(&self) -> f64 {
        1.0 + self.eps
    }

    fn family(&self) -> &'static str {
        "hspe"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        Ok(1.0 - self.capture_payoff(i, r)?)
    }

    fn column(&self, r: &PureResponse) -> Result<Vec<f64>> {
        let s = self.subset(r)?;
        let mut col = vec![1.0; self.costs.len()];
        for &j in s {
            col[j] = 1.0 - self.capture[j];
        }
        Ok(col)
    }

    fn best_response(&self, x: &[f64]) -> Result<PureResponse> {
        check_query(x, self.n())?;
        let w = self.capture_weights(x);
        Ok(PureResponse::Subset(knapsack_fptas(&w, &self.costs, self.budget, self.eps)?))
    }

    /// Every affordable subset, sorted by canonical key.
    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        let n = self.n();
        check_enumerable("hspe", n, MAX_SUBSET_N)?;
        let mut out = Vec::new();
        for mask in 0..(1usize << n) {
            let spent: f64 = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| self.costs[j]).sum();
            if spent <= self.budget {
                if out.len() == cap {
                    return Err(Error::TooLarge {
                        family: "hspe",
                        detail: format!("more than {cap} affordable subsets"),
                        count: None,
                    });
                }
                out.push(PureResponse::subset((0..n).filter(|j| mask & (1 << j) != 0)));
            }
        }
        out.sort();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payoff_forms() {
        let g = HspeGame::new(vec![2.0, 3.0, 4.0], vec![1.0, 0.5, 0.5], 5.0, 0.1).unwrap();
        let s = PureResponse::subset([0, 1]);
        assert_eq!(g.capture_payoff(2, &s).unwrap(), 0.0);
        assert_eq!(g.payoff(2, &s).unwrap(), 1.0);
        assert_eq!(g.capture_payoff(0, &s).unwrap(), 1.0);
        assert_eq!(g.payoff(0, &s).unwrap(), 0.0);
        assert!(g.payoff(0, &PureResponse::subset([0, 2])).is_err());
    }

    #[test]
    fn enumeration_filters_by_budget() {
        let g = HspeGame::new(vec![2.0, 3.0, 4.0], vec![0.5; 3], 5.0, 0.1).unwrap();
        let all = g.enumerate_responses(100).unwrap();
        let text: Vec<String> = all.iter().map(|r| r.to_string()).collect();
        assert_eq!(text, vec!["set:", "set:0", "set:0,1", "set:1", "set:2"]);
    }

    #[test]
    fn oracle_takes_everything_when_affordable() {
        let g = HspeGame::new(vec![1.0; 4], vec![0.5; 4], 10.0, 0.1).unwrap();
        assert_eq!(
            g.best_response(&[0.25; 4]).unwrap(),
            PureResponse::subset(0..4)
        );
    }

    #[test]
    fn validation() {
        assert!(HspeGame::new(vec![1.0], vec![0.0], 1.0, 0.1).is_err());
        assert!(HspeGame::new(vec![1.0], vec![1.5], 1.0, 0.1).is_err());
        assert!(HspeGame::new(vec![2.0], vec![0.5], 1.0, 0.1).is_err());
        assert!(HspeGame::new(vec![1.0, 1.0], vec![1.0, 1.0], 2.0, 0.1).is_err());
        assert!(HspeGame::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0, 0.1).is_ok());
        assert!(HspeGame::new(vec![1.0], vec![0.5], 1.0, 0.0).is_err());
    }
}
