//! 0/1 knapsack: a profit-scaling FPTAS and an exact reference DP.

use crate::error::{Error, Result};

/// Subset `S` with `c(S) ≤ budget` and `w(S) ≥ OPT/(1+eps)`.
///
/// Profits are scaled by `K = eps·w_max / ((1+eps)·n)` over the items that
/// fit on their own, rounded down, and a min-cost DP over scaled profit
/// picks the best affordable profit level. Leftover budget is then filled
/// with positive-weight items in index order. Returned indices ascend.
pub fn knapsack_fptas(weights: &[f64], costs: &[f64], budget: f64, eps: f64) -> Result<Vec<usize>> {
    check_items(weights, costs, budget)?;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::Config(format!("knapsack eps must be positive, got {eps}")));
    }
    let items: Vec<usize> = (0..weights.len())
        .filter(|&j| costs[j] <= budget && weights[j] > 0.0)
        .collect();
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let w_max = items.iter().map(|&j| weights[j]).fold(0.0, f64::max);
    let k = eps * w_max / ((1.0 + eps) * items.len() as f64);
    let scaled: Vec<usize> = items.iter().map(|&j| (weights[j] / k).floor() as usize).collect();
    let top: usize = scaled.iter().sum();

    // min_cost[q][p]: least cost reaching scaled profit p with the first q items
    let mut min_cost = vec![vec![f64::INFINITY; top + 1]; items.len() + 1];
    min_cost[0][0] = 0.0;
    for q in 0..items.len() {
        let (prev, next) = min_cost.split_at_mut(q + 1);
        let (prev, next) = (&prev[q], &mut next[0]);
        let (sp, c) = (scaled[q], costs[items[q]]);
        for p in 0..=top {
            let mut best = prev[p];
            if p >= sp && prev[p - sp] + c < best {
                best = prev[p - sp] + c;
            }
            next[p] = best;
        }
    }
    let last = &min_cost[items.len()];
    let level = (0..=top).rev().find(|&p| last[p] <= budget).unwrap_or(0);

    let mut chosen = vec![false; weights.len()];
    let mut p = level;
    for q in (0..items.len()).rev() {
        if min_cost[q + 1][p] != min_cost[q][p] {
            chosen[items[q]] = true;
            p -= scaled[q];
        }
    }
    let mut spent: f64 = (0..weights.len()).filter(|&j| chosen[j]).map(|j| costs[j]).sum();
    for &j in &items {
        if !chosen[j] && spent + costs[j] <= budget {
            chosen[j] = true;
            spent += costs[j];
        }
    }
    Ok((0..weights.len()).filter(|&j| chosen[j]).collect())
}

/// Exact optimum by enumerating all subsets; `n ≤ 24`.
pub fn knapsack_exact(weights: &[f64], costs: &[f64], budget: f64) -> Result<(Vec<usize>, f64)> {
    check_items(weights, costs, budget)?;
    let n = weights.len();
    if n > 24 {
        return Err(Error::TooLarge {
            family: "knapsack",
            detail: format!("exact enumeration over {n} items"),
            count: Some(1u128 << n),
        });
    }
    let mut best = (0usize, 0.0);
    for mask in 0..(1usize << n) {
        let (mut w, mut c) = (0.0, 0.0);
        for j in (0..n).filter(|j| mask & (1 << j) != 0) {
            w += weights[j];
            c += costs[j];
        }
        if c <= budget && w > best.1 {
            best = (mask, w);
        }
    }
    Ok(((0..n).filter(|j| best.0 & (1 << j) != 0).collect(), best.1))
}

fn check_items(weights: &[f64], costs: &[f64], budget: f64) -> Result<()> {
    if weights.len() != costs.len() {
        return Err(Error::ContractViolation(
            "weights and costs differ in length".into(),
        ));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::ContractViolation("weights must be nonnegative".into()));
    }
    if costs.iter().any(|c| !c.is_finite() || *c <= 0.0) {
        return Err(Error::ContractViolation("costs must be positive".into()));
    }
    if !budget.is_finite() || budget <= 0.0 {
        return Err(Error::ContractViolation("budget must be positive".into()));
    }
    Ok(())
}
