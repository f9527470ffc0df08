use crate::error::{Error, Result};
use crate::game::{check_query, check_row, Game, PureResponse};

/// Regret version of a game: row `i` is scaled by `k_i > 0`.
///
/// The oracle answers for the scaled game by querying the base oracle with
/// the weights `k_i x_i`, since `Σ_i x_i k_i C(i, j)` is proportional to
/// `C(normalize(k·x), j)` and oracles are scale invariant. The
/// approximation factor carries over unchanged.
#[derive(Debug, Clone)]
pub struct RegretGame<G> {
    base: G,
    weights: Vec<f64>,
    mu: f64,
}

impl<G: Game> RegretGame<G> {
    pub fn new(base: G, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != base.n() {
            return Err(Error::Config(format!(
                "{} regret weights for a game with n = {}",
                weights.len(),
                base.n()
            )));
        }
        if let Some(k) = weights.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(Error::Config(format!(
                "regret weights must be strictly positive, got {k}"
            )));
        }
        let k_max = weights.iter().copied().fold(0.0, f64::max);
        let mu = k_max * base.mu();
        Ok(RegretGame { base, weights, mu })
    }

    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The base-game query answered on behalf of wrapped query `x`.
    pub fn base_query(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_query(x, self.weights.len())?;
        let mut q: Vec<f64> = x.iter().zip(&self.weights).map(|(x, k)| x * k).collect();
        let total: f64 = q.iter().sum();
        if total > 0.0 {
            q.iter_mut().for_each(|v| *v /= total);
        }
        Ok(q)
    }
}

impl<G: Game> Game for RegretGame<G> {
    fn n(&self) -> usize {
        self.base.n()
    }

    fn mu(&self) -> f64 {
        self.mu
    }

    fn alpha(&self) -> f64 {
        self.base.alpha()
    }

    fn family(&self) -> &'static str {
        "regret"
    }

    fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> {
        check_row(i, self.n())?;
        Ok(self.weights[i] * self.base.payoff(i, r)?)
    }

    fn column(&self, r: &PureResponse) -> Result<Vec<f64>> {
        let mut col = self.base.column(r)?;
        for (c, k) in col.iter_mut().zip(&self.weights) {
            *c *= k;
        }
        Ok(col)
    }

    fn best_response(&self, x: &[f64]) -> Result<PureResponse> {
        check_query(x, self.n())?;
        let scaled: Vec<f64> = x.iter().zip(&self.weights).map(|(x, k)| x * k).collect();
        self.base.best_response(&scaled)
    }

    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        self.base.enumerate_responses(cap)
    }
}
