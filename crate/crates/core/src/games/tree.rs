//! Expanding search on a rooted tree, by search cost (EXP) and by search
//! ratio (EXPr).
//!
//! Hider strategies are the non-root vertices in ascending id order; row
//! `i` of either game is `hiders()[i]`. A searcher strategy is a full
//! expanding search: every edge exactly once, each edge touching the part
//! of the tree already searched.

use crate::error::{Error, Result};
use crate::game::{check_query, check_row, Game, PureResponse};
use crate::games::{check_enumerable, MAX_EXPANDING_N};

#[derive(Debug, Clone, PartialEq)]
pub struct TreeInstance {
    root: usize,
    edges: Vec<(usize, usize, f64)>,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    depth: Vec<f64>,
    hiders: Vec<usize>,
    hider_row: Vec<Option<usize>>,
    total_cost: f64,
}

impl TreeInstance {
    /// `edges` are undirected `(u, v, cost)` triples over vertices
    /// `0..=edges.len()`; their position in the list is the edge id.
    pub fn new(root: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let vertices = edges.len() + 1;
        if edges.is_empty() {
            return Err(Error::InvalidInstance("tree needs at least one edge".into()));
        }
        if root >= vertices {
            return Err(Error::InvalidInstance(format!("root {root} out of range")));
        }
        let mut adj = vec![Vec::new(); vertices];
        for (id, &(u, v, c)) in edges.iter().enumerate() {
            if u >= vertices || v >= vertices || u == v {
                return Err(Error::InvalidInstance(format!(
                    "edge {id} ({u}, {v}) is out of range or a loop"
                )));
            }
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "edge {id} has non-positive cost {c}"
                )));
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        let mut parent = vec![None; vertices];
        let mut parent_edge = vec![None; vertices];
        let mut depth = vec![f64::NAN; vertices];
        depth[root] = 0.0;
        let mut stack = vec![root];
        let mut seen = 1;
        while let Some(u) = stack.pop() {
            for &(v, id) in &adj[u] {
                if depth[v].is_nan() {
                    depth[v] = depth[u] + edges[id].2;
                    parent[v] = Some(u);
                    parent_edge[v] = Some(id);
                    seen += 1;
                    stack.push(v);
                }
            }
        }
        if seen != vertices {
            return Err(Error::InvalidInstance(
                "edges do not form a tree spanning all vertices".into(),
            ));
        }
        let hiders: Vec<usize> = (0..vertices).filter(|&v| v != root).collect();
        let mut hider_row = vec![None; vertices];
        for (i, &v) in hiders.iter().enumerate() {
            hider_row[v] = Some(i);
        }
        let total_cost = edges.iter().map(|e| e.2).sum();
        Ok(TreeInstance {
            root,
            edges,
            parent,
            parent_edge,
            depth,
            hiders,
            hider_row,
            total_cost,
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Non-root vertices; index `i` is hider strategy `i`.
    pub fn hiders(&self) -> &[usize] {
        &self.hiders
    }

    pub fn hider_row(&self, v: usize) -> Option<usize> {
        self.hider_row.get(v).copied().flatten()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Root-to-`v` path cost.
    pub fn depth(&self, v: usize) -> f64 {
        self.depth[v]
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    /// Checks the expanding-search rule and full coverage.
    pub fn validate_sequence(&self, seq: &[usize]) -> Result<()> {
        let vertices = self.edges.len() + 1;
        if seq.len() != self.edges.len() {
            return Err(Error::ContractViolation(format!(
                "expanding search must list all {} edges, got {}",
                self.edges.len(),
                seq.len()
            )));
        }
        let mut covered = vec![false; vertices];
        covered[self.root] = true;
        let mut used = vec![false; self.edges.len()];
        for (k, &id) in seq.iter().enumerate() {
            if id >= self.edges.len() || used[id] {
                return Err(Error::ContractViolation(format!(
                    "edge {id} at position {k} is unknown or repeated"
                )));
            }
            used[id] = true;
            let (u, v, _) = self.edges[id];
            match (covered[u], covered[v]) {
                (true, false) => covered[v] = true,
                (false, true) => covered[u] = true,
                _ => {
                    return Err(Error::ContractViolation(format!(
                        "edge {id} at position {k} does not extend the searched region"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Search cost up to and including the first edge incident to `v`.
    pub fn exp_payoff(&self, v: usize, seq: &[usize]) -> Result<f64> {
        self.validate_sequence(seq)?;
        if v == self.root || v > self.edges.len() {
            return Err(Error::ContractViolation(format!("{v} is not a hider vertex")));
        }
        let mut acc = 0.0;
        for &id in seq {
            let (a, b, c) = self.edges[id];
            acc += c;
            if a == v || b == v {
                return Ok(acc);
            }
        }
        Err(Error::ContractViolation(format!("vertex {v} is never reached")))
    }

    /// Search cost divided by the root distance of `v`.
    pub fn expr_payoff(&self, v: usize, seq: &[usize]) -> Result<f64> {
        Ok(self.exp_payoff(v, seq)? / self.depth[v])
    }

    /// Search cost for every hider row at once.
    fn cost_column(&self, seq: &[usize]) -> Result<Vec<f64>> {
        self.validate_sequence(seq)?;
        let mut col = vec![f64::NAN; self.hiders.len()];
        let mut acc = 0.0;
        for &id in seq {
            let (a, b, c) = self.edges[id];
            acc += c;
            for v in [a, b] {
                if let Some(i) = self.hider_row[v] {
                    if col[i].is_nan() {
                        col[i] = acc;
                    }
                }
            }
        }
        Ok(col)
    }

    /// Exact minimizer of expected search cost for hider weights `x`
    /// (indexed by hider row). Classical out-tree scheduling: repeatedly
    /// merge the non-root block of highest weight/cost ratio into the block
    /// holding its parent, appending its vertices.
    pub fn best_expanding_search(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_query(x, self.hiders.len())?;
        let vertices = self.edges.len() + 1;
        let mut owner: Vec<usize> = (0..vertices).collect();
        let mut weight = vec![0.0; vertices];
        let mut cost = vec![0.0; vertices];
        let mut blocks: Vec<Vec<usize>> = (0..vertices).map(|v| vec![v]).collect();
        let mut active = vec![true; vertices];
        active[self.root] = false;
        for (i, &v) in self.hiders.iter().enumerate() {
            weight[v] = x[i];
            cost[v] = self.edges[self.parent_edge[v].expect("non-root has a parent")].2;
        }
        fn find(owner: &mut [usize], mut v: usize) -> usize {
            while owner[v] != v {
                owner[v] = owner[owner[v]];
                v = owner[v];
            }
            v
        }
        for _ in 0..self.hiders.len() {
            let mut pick: Option<usize> = None;
            for h in (0..vertices).filter(|&h| active[h]) {
                pick = match pick {
                    // strictly higher ratio wins; ties keep the lower id
                    Some(p) if weight[h] * cost[p] <= weight[p] * cost[h] => Some(p),
                    _ => Some(h),
                };
            }
            let h = pick.expect("an active block remains");
            let into = find(&mut owner, self.parent[h].expect("non-root has a parent"));
            let moved = std::mem::take(&mut blocks[h]);
            blocks[into].extend(moved);
            weight[into] += weight[h];
            cost[into] += cost[h];
            owner[h] = into;
            active[h] = false;
        }
        let root_block = find(&mut owner, self.root);
        Ok(blocks[root_block]
            .iter()
            .filter(|&&v| v != self.root)
            .map(|&v| self.parent_edge[v].expect("non-root has a parent"))
            .collect())
    }

    /// Every expanding search, in lexicographic order of edge ids.
    pub fn enumerate_sequences(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        check_enumerable("tree", self.hiders.len(), MAX_EXPANDING_N)?;
        let mut out = Vec::new();
        let mut covered = vec![false; self.edges.len() + 1];
        covered[self.root] = true;
        let mut used = vec![false; self.edges.len()];
        let mut prefix = Vec::new();
        if !self.extend(&mut covered, &mut used, &mut prefix, &mut out, cap) {
            return Err(Error::TooLarge {
                family: "tree",
                detail: format!("more than {cap} expanding searches"),
                count: None,
            });
        }
        Ok(out)
    }

    fn extend(
        &self,
        covered: &mut [bool],
        used: &mut [bool],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> bool {
        if prefix.len() == self.edges.len() {
            if out.len() == cap {
                return false;
            }
            out.push(prefix.clone());
            return true;
        }
        for id in 0..self.edges.len() {
            if used[id] {
                continue;
            }
            let (u, v, _) = self.edges[id];
            let fresh = match (covered[u], covered[v]) {
                (true, false) => v,
                (false, true) => u,
                _ => continue,
            };
            used[id] = true;
            covered[fresh] = true;
            prefix.push(id);
            let ok = self.extend(covered, used, prefix, out, cap);
            prefix.pop();
            covered[fresh] = false;
            used[id] = false;
            if !ok {
                return false;
            }
        }
        true
    }

    fn sequence<'a>(&self, r: &'a PureResponse) -> Result<&'a [usize]> {
        match r {
            PureResponse::EdgeSequence(s) => Ok(s),
            _ => Err(Error::ContractViolation(format!(
                "expanding search expects an edge sequence, got `{r}`"
            ))),
        }
    }
}

/// EXP: the payoff is the search cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpGame {
    tree: TreeInstance,
}

impl ExpGame {
    pub fn new(tree: TreeInstance) -> Self {
        ExpGame { tree }
    }

    pub fn tree(&self) -> &TreeInstance {
        &self.tree
    }
}

impl Game for ExpGame {
    fn n(&self) -> usize {
        self.tree.hiders.len()
    }

    fn mu(&self) -> f64 {
        self.tree.total_cost
    }

    fn alpha(&self) -> f64 {
        1.0
    }

    fn family(&self) -> &'static str {
        "exp_tree"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        check_row(i, self.n())?;
        self.tree.exp_payoff(self.tree.hiders[i], self.tree.sequence(r)?)
    }

    fn column(&self, r: &PureResponse) -> Result<Vec<f64>> {
        self.tree.cost_column(self.tree.sequence(r)?)
    }

    fn best_response(&self, x: &[f64]) -> Result<PureResponse> {
        Ok(PureResponse::EdgeSequence(self.tree.best_expanding_search(x)?))
    }

    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        Ok(self
            .tree
            .enumerate_sequences(cap)?
            .into_iter()
            .map(PureResponse::EdgeSequence)
            .collect())
    }
}

/// EXPr: the payoff is the search ratio, cost over root distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprGame {
    tree: TreeInstance,
    mu: f64,
}

impl ExprGame {
    pub fn new(tree: TreeInstance) -> Self {
        let nearest = tree
            .hiders
            .iter()
            .map(|&v| tree.depth[v])
            .fold(f64::INFINITY, f64::min);
        let mu = tree.total_cost / nearest;
        ExprGame { tree, mu }
    }

    pub fn tree(&self) -> &TreeInstance {
        &self.tree
    }

    /// Best response to hider distribution `p`: reweight by `p(v)/d(v)`,
    /// normalize, and solve the search-cost problem.
    pub fn reweighted_query(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_query(p, self.n())?;
        let mut w: Vec<f64> = p
            .iter()
            .zip(&self.tree.hiders)
            .map(|(pv, &v)| pv / self.tree.depth[v])
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|v| *v /= total);
        }
        Ok(w)
    }
}

impl Game for ExprGame {
    fn n(&self) -> usize {
        self.tree.hiders.len()
    }

    fn mu(&self) -> f64 {
        self.mu
    }

    fn alpha(&self) -> f64 {
        1.0
    }

    fn family(&self) -> &'static str {
        "expr_tree"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        check_row(i, self.n())?;
        self.tree.expr_payoff(self.tree.hiders[i], self.tree.sequence(r)?)
    }

    fn column(&self, r: &PureResponse) -> Result<Vec<f64>> {
        let mut col = self.tree.cost_column(self.tree.sequence(r)?)?;
        for (c, &v) in col.iter_mut().zip(&self.tree.hiders) {
            *c /= self.tree.depth[v];
        }
        Ok(col)
    }

    fn best_response(&self, p: &[f64]) -> Result<PureResponse> {
        let query = self.reweighted_query(p)?;
        Ok(PureResponse::EdgeSequence(self.tree.best_expanding_search(&query)?))
    }

    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        Ok(self
            .tree
            .enumerate_sequences(cap)?
            .into_iter()
            .map(PureResponse::EdgeSequence)
            .collect())
    }
}
