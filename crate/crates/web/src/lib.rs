//! Browser demo. Each export takes plain values or instance JSON and
//! returns a JSON string for the page to render.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use oracle_games::ellipsoid::{solve_ellipsoid, EllipsoidConfig};
use oracle_games::games::{brute_force_best_response, BoxGame};
use oracle_games::mwu::{mwu_params, mwu_solve, mwu_step, MwuConfig, MwuMode, MwuState};
use oracle_games::verify::{evaluate_guarantees, exact_game_solve};
use oracle_games::{best_response, Game, GameInstanceSpec, MixedStrategy};

/// Enumeration limit for anything run inside the page.
pub const BROWSER_CAP: usize = 50_000;

const TRACE_POINTS: usize = 200;

#[derive(Serialize)]
pub struct TracePoint {
    pub t: u64,
    pub x: Vec<f64>,
    pub payoff: f64,
}

#[derive(Serialize)]
pub struct BoxTrace {
    pub proportional: Vec<f64>,
    pub points: Vec<TracePoint>,
    pub x_hat: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub iterations: u64,
    pub iteration_bound: u64,
}

#[derive(Serialize)]
pub struct Solution {
    pub algorithm: String,
    pub n: usize,
    pub alpha: f64,
    pub x_hat: Vec<f64>,
    pub y_hat: Vec<(String, f64)>,
    pub lower: f64,
    pub upper: f64,
    pub iterations: u64,
    /// Present when the response set fits under [`BROWSER_CAP`].
    pub v_star: Option<f64>,
    pub ratio1: Option<f64>,
    pub ratio2: Option<f64>,
}

#[derive(Serialize)]
pub struct OracleReply {
    pub response: String,
    pub payoff: f64,
    pub alpha: f64,
    pub brute_response: Option<String>,
    pub brute_payoff: Option<f64>,
}

fn text<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// MWU on BOX with the hider's weights sampled along the way, next to the
/// optimal hider `c / Σc`.
pub fn box_trace(costs: &[f64], eps: f64) -> Result<String, String> {
    let game = BoxGame::new(costs.to_vec()).map_err(err)?;
    let n = game.n();
    let params = mwu_params(n, eps, 1.0, MwuMode::Both).map_err(err)?;
    let result = mwu_solve(&game, &MwuConfig::new(eps, MwuMode::Both)).map_err(err)?;
    let stride = result.iterations.div_ceil(TRACE_POINTS as u64).max(1);

    let mut state = MwuState::new(n, false).map_err(err)?;
    let mut points = Vec::new();
    while state.t < result.iterations {
        let x = state.x.clone();
        let entry = mwu_step(&mut state, &game, &params).map_err(err)?;
        if (state.t - 1) % stride == 0 || state.t == result.iterations {
            points.push(TracePoint { t: state.t, x, payoff: entry.payoff });
        }
    }

    let total: f64 = costs.iter().sum();
    let value = exact_game_solve(&game, BROWSER_CAP).map(|e| e.value()).ok();
    text(&BoxTrace {
        proportional: costs.iter().map(|c| c / total).collect(),
        points,
        x_hat: result.x_hat.to_dense(n).map_err(err)?,
        lower: result.lower_bound,
        upper: result.upper_bound_empirical,
        value: value.unwrap_or(f64::NAN),
        iterations: result.iterations,
        iteration_bound: result.iteration_bound,
    })
}

/// Solves an instance with `algorithm` in {mwu, ellipsoid, lp-exact};
/// `param` is ε for MWU and γ/μ for the ellipsoid method.
pub fn solve(instance: &str, algorithm: &str, param: f64) -> Result<String, String> {
    let spec = GameInstanceSpec::from_json(instance).map_err(err)?;
    let game = spec.build().map_err(err)?;
    let game: &dyn Game = &*game;
    let n = game.n();
    let (x, y, lower, upper, iterations) = match algorithm {
        "mwu" => {
            let r = mwu_solve(game, &MwuConfig::new(param, MwuMode::Both)).map_err(err)?;
            (r.x_hat, r.y_hat, r.lower_bound, r.upper_bound_empirical, r.iterations)
        }
        "ellipsoid" => {
            let config = EllipsoidConfig::for_game(game, param * game.mu()).map_err(err)?;
            let r = solve_ellipsoid(game, &config).map_err(err)?;
            let lower = best_response(game, &r.x_hat).map_err(err)?.payoff / game.alpha();
            let iterations = r.total_iterations();
            (r.x_hat, r.y_hat, lower, r.restricted_value, iterations)
        }
        "lp-exact" => {
            let e = exact_game_solve(game, BROWSER_CAP).map_err(err)?;
            let y = e.y_star().map_err(err)?;
            (e.x_star().clone(), y, e.value(), e.value(), e.lp.pivots as u64)
        }
        other => return Err(format!("unknown algorithm `{other}`")),
    };
    let report = evaluate_guarantees(game, &x, &y, BROWSER_CAP, oracle_games::DEFAULT_TOLERANCE).ok();
    text(&Solution {
        algorithm: algorithm.to_string(),
        n,
        alpha: game.alpha(),
        x_hat: x.to_dense(n).map_err(err)?,
        y_hat: y.iter().map(|(r, w)| (r.to_string(), w)).collect(),
        lower,
        upper,
        iterations,
        v_star: report.as_ref().map(|r| r.v_star),
        ratio1: report.as_ref().map(|r| r.ratio1),
        ratio2: report.as_ref().map(|r| r.ratio2),
    })
}

/// The oracle's answer to hider weights `x`, and the true optimum when the
/// response set is small enough to search.
pub fn query_oracle(instance: &str, x: &[f64]) -> Result<String, String> {
    let spec = GameInstanceSpec::from_json(instance).map_err(err)?;
    let game = spec.build().map_err(err)?;
    if x.len() != game.n() {
        return Err(format!("{} weights for a game with n = {}", x.len(), game.n()));
    }
    let x = MixedStrategy::from_dense(x).map_err(err)?;
    let answer = best_response(&*game, &x).map_err(err)?;
    let brute = brute_force_best_response(&*game, &x, BROWSER_CAP).ok();
    text(&OracleReply {
        response: answer.response.to_string(),
        payoff: answer.payoff,
        alpha: answer.alpha,
        brute_response: brute.as_ref().map(|b| b.response.to_string()),
        brute_payoff: brute.map(|b| b.payoff),
    })
}

#[wasm_bindgen(js_name = boxTrace)]
pub fn box_trace_js(costs: Vec<f64>, eps: f64) -> Result<String, JsError> {
    box_trace(&costs, eps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = solve)]
pub fn solve_js(instance: &str, algorithm: &str, param: f64) -> Result<String, JsError> {
    solve(instance, algorithm, param).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = queryOracle)]
pub fn query_oracle_js(instance: &str, x: Vec<f64>) -> Result<String, JsError> {
    query_oracle(instance, &x).map_err(|e| JsError::new(&e))
}
