//! Multiplicative weights against an α-approximate best-response oracle.
//!
//! Player I keeps weights `x^(t)` over rows. Each round the oracle answers
//! `j^(t)`, the column is scaled by its largest entry `M^(t)`, and every row
//! is boosted in proportion to its payoff. The run stops once the product
//! of normalizers `f(t)` exceeds `1/(nδ)`; `f` and `δ` live in log space.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{best_row_payoff, dot, Game, PureResponse};
use crate::strategy::{normalize, MixedStrategy};

/// Which player's guarantee fixes `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MwuMode {
    PlayerOne,
    PlayerTwo,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwuConfig {
    pub epsilon: f64,
    pub mode: MwuMode,
    /// Defaults to the iteration bound of the run.
    pub iteration_cap: Option<u64>,
    pub record_history: bool,
}

impl MwuConfig {
    pub fn new(epsilon: f64, mode: MwuMode) -> Self {
        MwuConfig {
            epsilon,
            mode,
            iteration_cap: None,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwuParams {
    pub eta: f64,
    /// `ln δ`.
    pub delta_log: f64,
    pub n: usize,
}

impl MwuParams {
    /// `ln f(T)` must exceed this to stop: `−(ln δ + ln n)`.
    pub fn stop_threshold(&self) -> f64 {
        -(self.delta_log + (self.n as f64).ln())
    }
}

/// One oracle round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub response: PureResponse,
    /// `M^(t)`, the largest entry of the column.
    pub m: f64,
    /// `C(x^(t), j^(t))`.
    pub payoff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MwuState {
    pub t: u64,
    pub x: Vec<f64>,
    pub log_f: f64,
    pub history: Vec<HistoryEntry>,
    pub record_history: bool,
}

impl MwuState {
    pub fn new(n: usize, record_history: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("game has no Player I strategies".into()));
        }
        Ok(MwuState {
            t: 0,
            x: vec![1.0 / n as f64; n],
            log_f: 0.0,
            history: Vec::new(),
            record_history,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwuResult {
    pub x_hat: MixedStrategy<usize>,
    pub y_hat: MixedStrategy<PureResponse>,
    /// `max_t C(x^(t), j^(t)) / α`; `x_hat` guarantees at least this.
    pub lower_bound: f64,
    /// `max_i C(i, y_hat)`, evaluated after the run.
    pub upper_bound_empirical: f64,
    pub iterations: u64,
    pub iteration_bound: u64,
    pub params: MwuParams,
    pub history: Vec<HistoryEntry>,
}

pub fn mwu_params(n: usize, epsilon: f64, alpha: f64, mode: MwuMode) -> Result<MwuParams> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(Error::Config(format!("alpha must be at least 1, got {alpha}")));
    }
    let eta = ((1.0 + epsilon).sqrt() - 1.0) / 2.0;
    let ln_n = (n as f64).ln();
    let delta_log = match mode {
        MwuMode::PlayerTwo => -ln_n / eta,
        MwuMode::PlayerOne | MwuMode::Both => -(1.0 + alpha / eta) * ln_n,
    };
    Ok(MwuParams { eta, delta_log, n })
}

/// `⌊n(1 − ln δ / ln(1+η))⌋`.
pub fn iteration_bound(n: usize, params: &MwuParams) -> u64 {
    let bound = n as f64 * (1.0 - params.delta_log / params.eta.ln_1p());
    bound.floor() as u64
}

/// One round: query the oracle at `x^(t)`, update the weights, extend
/// `log_f`. Returns the round's record.
pub fn mwu_step<G: Game + ?Sized>(
    state: &mut MwuState,
    game: &G,
    params: &MwuParams,
) -> Result<HistoryEntry> {
    if game.n() != params.n || state.x.len() != params.n {
        return Err(Error::Config(format!(
            "game has n = {}, parameters expect {}",
            game.n(),
            params.n
        )));
    }
    state.t += 1;
    let response = game.best_response(&state.x)?;
    let column = game.column(&response)?;
    let m = column.iter().copied().fold(0.0, f64::max);
    if m <= 0.0 {
        return Err(Error::DegenerateColumn { iteration: state.t });
    }
    let payoff = dot(&state.x, &column);
    if payoff <= 0.0 {
        return Err(Error::OracleContract(format!(
            "response `{response}` has payoff {payoff} at iteration {}",
            state.t
        )));
    }
    let eta = params.eta;
    let mut sum = 0.0;
    for (xi, a) in state.x.iter_mut().zip(&column) {
        *xi *= 1.0 + eta * a / m;
        sum += *xi;
    }
    for xi in &mut state.x {
        *xi /= sum;
    }
    state.log_f += (eta * payoff / m).ln_1p();
    let entry = HistoryEntry { response, m, payoff };
    if state.record_history {
        state.history.push(entry.clone());
    }
    Ok(entry)
}

pub fn mwu_solve<G: Game + ?Sized>(game: &G, config: &MwuConfig) -> Result<MwuResult> {
    let n = game.n();
    let params = mwu_params(n, config.epsilon, game.alpha(), config.mode)?;
    let bound = iteration_bound(n, &params);
    let cap = config.iteration_cap.unwrap_or(bound);
    let threshold = params.stop_threshold();

    let mut state = MwuState::new(n, config.record_history)?;
    let mut y_weights: BTreeMap<PureResponse, f64> = BTreeMap::new();
    let mut best_payoff = f64::NEG_INFINITY;
    let mut best_x = state.x.clone();

    while state.log_f <= threshold {
        if state.t >= cap {
            return Err(Error::Internal(format!(
                "no stop after {cap} iterations (bound {bound}); ln f = {}, threshold {threshold}",
                state.log_f
            )));
        }
        let x_before = state.x.clone();
        let entry = mwu_step(&mut state, game, &params)?;
        if entry.payoff > best_payoff {
            best_payoff = entry.payoff;
            best_x = x_before;
        }
        *y_weights.entry(entry.response).or_insert(0.0) += 1.0 / entry.m;
    }

    if state.t > bound {
        return Err(Error::Internal(format!(
            "{} iterations exceed the bound {bound}",
            state.t
        )));
    }
    let x_hat = MixedStrategy::from_dense(&best_x)?;
    let y_hat = normalize(y_weights)?;
    let upper_bound_empirical = best_row_payoff(game, &y_hat)?;
    Ok(MwuResult {
        x_hat,
        y_hat,
        lower_bound: best_payoff / game.alpha(),
        upper_bound_empirical,
        iterations: state.t,
        iteration_bound: bound,
        params,
        history: state.history,
    })
}
