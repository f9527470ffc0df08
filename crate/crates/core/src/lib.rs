//! Approximately optimal mixed strategies for zero-sum games whose column
//! player has exponentially many pure strategies, accessed only through a
//! best-response oracle.
//!
//! Player I (the hider) picks a row and maximizes; Player II (the searcher)
//! picks a [`PureResponse`] and minimizes. Two solvers are provided:
//! multiplicative weights ([`mwu`]) and a central-cut ellipsoid method
//! ([`ellipsoid`]). [`verify`] computes exact values for small games.

pub mod ellipsoid;
pub mod error;
mod flow;
pub mod game;
pub mod games;
pub mod instance;
pub mod knapsack;
pub mod lp;
pub mod mwu;
pub mod strategy;
pub mod verify;

pub use error::{Error, Result};
pub use game::{
    best_response, best_row_payoff, expected_payoff, expected_payoff_mixed, BestResponse, Game,
    PureResponse, DEFAULT_TOLERANCE,
};
pub use instance::{parse_instance, GameInstanceSpec};
pub use lp::{solve_lp_exact, ExactLpSolution};
pub use strategy::{normalize, MixedStrategy};
