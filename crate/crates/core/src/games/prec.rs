//! Box search under precedence constraints.
//!
//! The best response is the scheduling problem `1|prec|Σ w_j C_j` with the
//! hiding probabilities as weights. It is NP-hard; the oracle here orders
//! the boxes by a Sidney decomposition, which is within a factor 2.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::game::{check_query, check_row, Game, PureResponse};
use crate::games::{check_costs, check_enumerable, inverse_permutation, MAX_EXTENSION_N};

#[derive(Debug, Clone, PartialEq)]
pub struct PrecGame {
    costs: Vec<f64>,
    edges: Vec<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    total: f64,
}

impl PrecGame {
    /// `edges` holds pairs `(a, b)`: box `a` must be opened before box `b`.
    pub fn new(costs: Vec<f64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_costs(&costs, "prec costs")?;
        let n = costs.len();
        let mut preds = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInstance(format!(
                    "precedence edge ({a}, {b}) out of range for {n} boxes"
                )));
            }
            if a == b {
                return Err(Error::InvalidInstance(format!("self-loop on box {a}")));
            }
            if !preds[b].contains(&a) {
                preds[b].push(a);
            }
        }
        for p in &mut preds {
            p.sort_unstable();
        }
        let all = vec![true; n];
        if topological_order(&preds, &all).len() != n {
            return Err(Error::InvalidInstance(
                "precedence relation contains a cycle".into(),
            ));
        }
        let total = costs.iter().sum();
        Ok(PrecGame {
            costs,
            edges,
            preds,
            total,
        })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Direct predecessors of each box.
    pub fn predecessors(&self) -> &[Vec<usize>] {
        &self.preds
    }

    pub fn is_linear_extension(&self, order: &[usize]) -> bool {
        match inverse_permutation(order, self.costs.len()) {
            Ok(pos) => self.edges.iter().all(|&(a, b)| pos[a] < pos[b]),
            Err(_) => false,
        }
    }

    fn order<'a>(&self, r: &'a PureResponse) -> Result<&'a [usize]> {
        match r {
            PureResponse::Permutation(p) if self.is_linear_extension(p) => Ok(p),
            _ => Err(Error::ContractViolation(format!(
                "`{r}` is not a linear extension of the precedence order"
            ))),
        }
    }

    /// Nonempty predecessor-closed set of maximum density `x(S)/c(S)`,
    /// taking the largest such set on ties.
    pub fn max_density_closure(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_query(x, self.costs.len())?;
        let alive = vec![true; self.costs.len()];
        Ok(max_density_closure(&self.costs, &self.preds, x, &alive))
    }

    /// Sidney decomposition into maximum-density initial blocks; each
    /// block is scheduled in topological order, lowest index first.
    pub fn sidney_order(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_query(x, self.costs.len())?;
        let n = self.costs.len();
        let mut alive = vec![true; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let block = max_density_closure(&self.costs, &self.preds, x, &alive);
            let mut in_block = vec![false; n];
            for &j in &block {
                in_block[j] = true;
            }
            order.extend(topological_order(&self.preds, &in_block));
            for &j in &block {
                alive[j] = false;
            }
        }
        Ok(order)
    }
}

/// Topological order of the boxes flagged in `within`, choosing the lowest
/// available index first. Predecessors outside `within` count as done.
fn topological_order(preds: &[Vec<usize>], within: &[bool]) -> Vec<usize> {
    let n = preds.len();
    let mut pending = vec![0usize; n];
    let mut succs = vec![Vec::new(); n];
    for j in (0..n).filter(|&j| within[j]) {
        for &p in &preds[j] {
            if within[p] {
                pending[j] += 1;
                succs[p].push(j);
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&j| within[j] && pending[j] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::new();
    while let Some(Reverse(j)) = heap.pop() {
        order.push(j);
        for &s in &succs[j] {
            pending[s] -= 1;
            if pending[s] == 0 {
                heap.push(Reverse(s));
            }
        }
    }
    order
}

/// Dinkelbach iteration on the density, each step a maximum-weight
/// closure solved as a minimum cut.
fn max_density_closure(costs: &[f64], preds: &[Vec<usize>], x: &[f64], alive: &[bool]) -> Vec<usize> {
    let members: Vec<usize> = (0..costs.len()).filter(|&j| alive[j]).collect();
    let density = |set: &[usize]| -> f64 {
        let w: f64 = set.iter().map(|&j| x[j]).sum();
        let c: f64 = set.iter().map(|&j| costs[j]).sum();
        w / c
    };
    let scale: f64 = members.iter().map(|&j| x[j] + costs[j]).sum::<f64>().max(1e-300);
    let tol = 1e-12 * scale;

    let mut best = members.clone();
    let mut lambda = density(&best);
    for _ in 0..(4 * members.len() + 16) {
        let (set, weight) = max_weight_closure(costs, preds, x, &members, lambda, tol);
        if weight > tol && !set.is_empty() {
            let d = density(&set);
            if d > lambda {
                best = set;
                lambda = d;
                continue;
            }
        }
        // at the optimal density: take the maximal optimal closure if it
        // is consistent, otherwise keep the set that attains it
        if !set.is_empty() && density(&set) >= lambda - tol && set.len() >= best.len() {
            best = set;
        }
        break;
    }
    best
}

/// Maximum of `Σ_{j∈S} (x_j − λ c_j)` over closed `S ⊆ members`, returning
/// the largest optimal `S` and its weight.
fn max_weight_closure(
    costs: &[f64],
    preds: &[Vec<usize>],
    x: &[f64],
    members: &[usize],
    lambda: f64,
    tol: f64,
) -> (Vec<usize>, f64) {
    let k = members.len();
    let mut local = vec![usize::MAX; costs.len()];
    for (pos, &j) in members.iter().enumerate() {
        local[j] = pos;
    }
    let (s, t) = (k, k + 1);
    let weights: Vec<f64> = members.iter().map(|&j| x[j] - lambda * costs[j]).collect();
    let big = weights.iter().map(|w| w.abs()).sum::<f64>() + 1.0;
    let mut net = FlowNetwork::new(k + 2, tol * 1e-3);
    let mut positive = 0.0;
    for (pos, &j) in members.iter().enumerate() {
        let w = weights[pos];
        if w > 0.0 {
            net.add_edge(s, pos, w);
            positive += w;
        } else if w < 0.0 {
            net.add_edge(pos, t, -w);
        }
        for &p in &preds[j] {
            if local[p] != usize::MAX {
                net.add_edge(pos, local[p], big);
            }
        }
    }
    let cut = net.max_flow(s, t);
    let sink_side = net.reaches_sink(t);
    let set: Vec<usize> = (0..k).filter(|&pos| !sink_side[pos]).map(|pos| members[pos]).collect();
    (set, positive - cut)
}

impl Game for PrecGame {
    fn n(&self) -> usize {
        self.costs.len()
    }

    fn mu(&self) -> f64 {
        self.total
    }

    fn alpha(&self) -> f64 {
        2.0
    }

    fn family(&self) -> &'static str {
        "prec"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        check_row(i, self.n())?;
        let order = self.order(r)?;
        let mut acc = 0.0;
        for &b in order {
            acc += self.costs[b];
            if b == i {
                break;
            }
        }
        Ok(acc)
    }

    fn column(&self, r: &PureResponse) -> Result<Vec<f64>> {
        let order = self.order(r)?;
        let mut col = vec![0.0; self.n()];
        let mut acc = 0.0;
        for &b in order {
            acc += self.costs[b];
            col[b] = acc;
        }
        Ok(col)
    }

    fn best_response(&self, x: &[f64]) -> Result<PureResponse> {
        Ok(PureResponse::Permutation(self.sidney_order(x)?))
    }

    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        let n = self.n();
        check_enumerable("prec", n, MAX_EXTENSION_N)?;
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        if !extend(&self.preds, &mut prefix, &mut placed, &mut out, cap) {
            return Err(Error::TooLarge {
                family: "prec",
                detail: format!("more than {cap} linear extensions"),
                count: None,
            });
        }
        Ok(out)
    }
}

/// Depth-first enumeration of linear extensions in lexicographic order.
/// Returns false once more than `cap` have been found.
fn extend(
    preds: &[Vec<usize>],
    prefix: &mut Vec<usize>,
    placed: &mut [bool],
    out: &mut Vec<PureResponse>,
    cap: usize,
) -> bool {
    let n = preds.len();
    if prefix.len() == n {
        if out.len() == cap {
            return false;
        }
        out.push(PureResponse::Permutation(prefix.clone()));
        return true;
    }
    for j in 0..n {
        if !placed[j] && preds[j].iter().all(|&p| placed[p]) {
            placed[j] = true;
            prefix.push(j);
            let ok = extend(preds, prefix, placed, out, cap);
            prefix.pop();
            placed[j] = false;
            if !ok {
                return false;
            }
        }
    }
    true
}
