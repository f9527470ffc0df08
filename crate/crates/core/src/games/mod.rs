//! Concrete search games and their best-response oracles.

mod boxes;
mod hspe;
mod matrix;
mod prec;
mod regret;
mod sub;
mod tree;

pub use boxes::{box_payoff, smith_order, BoxGame};
pub use hspe::{HspeGame, DEFAULT_HSPE_EPS};
pub use matrix::MatrixGame;
pub use prec::PrecGame;
pub use regret::RegretGame;
pub use sub::{SubGame, MAX_SUB_N};
pub use tree::{ExpGame, ExprGame, TreeInstance};

use crate::error::{Error, Result};
use crate::game::{dot, BestResponse, Game};
use crate::strategy::MixedStrategy;

/// Largest `n` whose permutations are enumerated (BOX, SUB).
pub const MAX_PERMUTATION_N: usize = 9;
/// Largest `n` whose linear extensions are enumerated (PREC).
pub const MAX_EXTENSION_N: usize = 8;
/// Largest number of hider vertices whose expanding searches are enumerated.
pub const MAX_EXPANDING_N: usize = 7;
/// Largest `n` whose subsets are enumerated (HSPE).
pub const MAX_SUBSET_N: usize = 20;

/// Default cap on the number of enumerated responses.
pub const DEFAULT_ENUMERATION_CAP: usize = 400_000;

pub(crate) fn check_costs(costs: &[f64], what: &str) -> Result<()> {
    if costs.is_empty() {
        return Err(Error::InvalidInstance(format!("{what}: need at least one location")));
    }
    if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::InvalidInstance(format!(
            "{what}: cost {c} is not strictly positive"
        )));
    }
    Ok(())
}

pub(crate) fn check_enumerable(family: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge {
            family,
            detail: format!("n = {n} exceeds the enumeration limit {limit}"),
            count: None,
        });
    }
    Ok(())
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Positions of each element of `order`; fails unless it is a permutation
/// of `0..n`.
pub(crate) fn inverse_permutation(order: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut pos = vec![usize::MAX; n];
    if order.len() != n {
        return Err(Error::ContractViolation(format!(
            "order has length {}, expected a permutation of {n}",
            order.len()
        )));
    }
    for (k, &b) in order.iter().enumerate() {
        if b >= n || pos[b] != usize::MAX {
            return Err(Error::ContractViolation(format!(
                "order is not a permutation of 0..{n}"
            )));
        }
        pos[b] = k;
    }
    Ok(pos)
}

/// Exact best response by enumerating every response (at most `cap`).
/// Ties go to the smallest canonical key.
pub fn brute_force_best_response<G: Game + ?Sized>(
    game: &G,
    x: &MixedStrategy<usize>,
    cap: usize,
) -> Result<BestResponse> {
    let dense = x.to_dense(game.n())?;
    let mut best: Option<BestResponse> = None;
    for response in game.enumerate_responses(cap)? {
        let payoff = dot(&dense, &game.column(&response)?);
        if best.as_ref().is_none_or(|b| payoff < b.payoff) {
            best = Some(BestResponse {
                response,
                payoff,
                alpha: 1.0,
            });
        }
    }
    best.ok_or_else(|| Error::Internal("game has no responses".into()))
}
