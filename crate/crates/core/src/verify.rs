//! Ground truth for small games: enumerate every Player II strategy, solve
//! the explicit matrix exactly, and measure how far candidate strategies
//! are from optimal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, PureResponse, DEFAULT_TOLERANCE};
use crate::lp::{solve_lp_exact, ExactLpSolution};
use crate::strategy::MixedStrategy;

/// Slack on the ratio bounds checked by [`check_guarantees`].
pub const RATIO_SLACK: f64 = 1e-6;

/// A game written out as a dense matrix; column `j` is `responses[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitGame {
    pub matrix: Vec<Vec<f64>>,
    pub responses: Vec<PureResponse>,
}

impl ExplicitGame {
    /// Evaluates the full payoff matrix over `responses`, dropping repeats.
    pub fn build<G: Game + ?Sized>(game: &G, mut responses: Vec<PureResponse>) -> Result<Self> {
        responses.sort();
        responses.dedup();
        if responses.is_empty() {
            return Err(Error::ContractViolation("no responses to tabulate".into()));
        }
        let mut matrix = vec![Vec::with_capacity(responses.len()); game.n()];
        for r in &responses {
            for (row, a) in matrix.iter_mut().zip(game.column(r)?) {
                row.push(a);
            }
        }
        Ok(ExplicitGame { matrix, responses })
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn m(&self) -> usize {
        self.responses.len()
    }

    /// `C(x, j)` for every column.
    pub fn column_payoffs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        for (xi, row) in x.iter().zip(&self.matrix) {
            for (acc, a) in out.iter_mut().zip(row) {
                *acc += xi * a;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactGameSolution {
    pub lp: ExactLpSolution,
    pub explicit: ExplicitGame,
}

impl ExactGameSolution {
    pub fn value(&self) -> f64 {
        self.lp.value
    }

    pub fn x_star(&self) -> &MixedStrategy<usize> {
        &self.lp.x_star
    }

    /// `y*` with columns named by their responses.
    pub fn y_star(&self) -> Result<MixedStrategy<PureResponse>> {
        self.lp
            .y_star
            .map_keys(|&j| self.explicit.responses[j].clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    pub v_star: f64,
    /// `min_j C(x̂, j)`.
    pub player1_worst: f64,
    /// `max_i C(i, ŷ)`.
    pub player2_worst: f64,
    /// `V* / player1_worst`.
    pub ratio1: f64,
    /// `player2_worst / V*`.
    pub ratio2: f64,
}

/// Every Player II pure strategy, sorted and duplicate free.
pub fn enumerate_responses<G: Game + ?Sized>(game: &G, cap: usize) -> Result<Vec<PureResponse>> {
    let mut all = game.enumerate_responses(cap)?;
    all.sort();
    all.dedup();
    Ok(all)
}

pub fn exact_game_solve<G: Game + ?Sized>(game: &G, cap: usize) -> Result<ExactGameSolution> {
    let explicit = ExplicitGame::build(game, enumerate_responses(game, cap)?)?;
    let lp = solve_lp_exact(&explicit.matrix)?;
    Ok(ExactGameSolution { lp, explicit })
}

/// Worst-case payoffs of `x_hat` and `y_hat` against the full enumeration,
/// compared with the exact value. Fails only if weak duality is broken by
/// more than `tolerance·μ`.
pub fn evaluate_guarantees<G: Game + ?Sized>(
    game: &G,
    x_hat: &MixedStrategy<usize>,
    y_hat: &MixedStrategy<PureResponse>,
    cap: usize,
    tolerance: f64,
) -> Result<GuaranteeReport> {
    let exact = exact_game_solve(game, cap)?;
    evaluate_against(game, &exact, x_hat, y_hat, tolerance)
}

/// As [`evaluate_guarantees`] with an already solved game.
pub fn evaluate_against<G: Game + ?Sized>(
    game: &G,
    exact: &ExactGameSolution,
    x_hat: &MixedStrategy<usize>,
    y_hat: &MixedStrategy<PureResponse>,
    tolerance: f64,
) -> Result<GuaranteeReport> {
    let n = game.n();
    let x = x_hat.to_dense(n)?;
    let player1_worst = exact
        .explicit
        .column_payoffs(&x)
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let mut rows = vec![0.0; n];
    for (r, w) in y_hat.iter() {
        for (acc, a) in rows.iter_mut().zip(game.column(r)?) {
            *acc += w * a;
        }
    }
    let player2_worst = rows.into_iter().fold(f64::NEG_INFINITY, f64::max);

    let v_star = exact.value();
    let slack = tolerance * game.mu();
    if player1_worst > v_star + slack || player2_worst < v_star - slack {
        return Err(Error::Internal(format!(
            "weak duality fails: {player1_worst} <= {v_star} <= {player2_worst} does not hold"
        )));
    }
    Ok(GuaranteeReport {
        v_star,
        player1_worst,
        player2_worst,
        ratio1: v_star / player1_worst,
        ratio2: player2_worst / v_star,
    })
}

/// Requires both ratios to be at most `α(1+ε) + 1e-6`.
pub fn check_guarantees<G: Game + ?Sized>(
    game: &G,
    x_hat: &MixedStrategy<usize>,
    y_hat: &MixedStrategy<PureResponse>,
    alpha: f64,
    epsilon: f64,
    cap: usize,
) -> Result<GuaranteeReport> {
    let report = evaluate_guarantees(game, x_hat, y_hat, cap, DEFAULT_TOLERANCE)?;
    require_ratios(&report, x_hat, y_hat, alpha * (1.0 + epsilon))?;
    Ok(report)
}

/// Fails with [`Error::GuaranteeViolation`] if either ratio exceeds
/// `bound + 1e-6`.
pub fn require_ratios(
    report: &GuaranteeReport,
    x_hat: &MixedStrategy<usize>,
    y_hat: &MixedStrategy<PureResponse>,
    bound: f64,
) -> Result<()> {
    let limit = bound + RATIO_SLACK;
    if report.ratio1.is_nan() || report.ratio1 > limit {
        return Err(Error::GuaranteeViolation {
            detail: format!(
                "Player I ratio {} exceeds {limit}; x = {}",
                report.ratio1,
                serde_json::to_string(x_hat).unwrap_or_default()
            ),
        });
    }
    if report.ratio2.is_nan() || report.ratio2 > limit {
        return Err(Error::GuaranteeViolation {
            detail: format!(
                "Player II ratio {} exceeds {limit}; y = {}",
                report.ratio2,
                serde_json::to_string(y_hat).unwrap_or_default()
            ),
        });
    }
    Ok(())
}

/// Smallest `C(x, j)` over the explicit columns and a column attaining it.
pub fn min_column(explicit: &ExplicitGame, x: &[f64]) -> (usize, f64) {
    explicit
        .column_payoffs(x)
        .into_iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (j, c)| if c < best.1 { (j, c) } else { best })
}
