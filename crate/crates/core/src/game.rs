//! The game and oracle contract shared by every solver.
//!
//! Player I (the maximizer) has `n` pure strategies indexed `0..n`. Player
//! II (the minimizer) may have exponentially many; they are never listed up
//! front. Solvers only ever see them through [`Game::best_response`] and
//! [`Game::payoff`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::strategy::MixedStrategy;

/// Default payoff comparison tolerance, relative to μ.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A Player II pure strategy.
///
/// The derived ordering agrees with the byte order of
/// [`canonical_key`](PureResponse::canonical_key), so sorting responses and
/// sorting keys give the same sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PureResponse {
    /// Column `j` of an explicit matrix.
    Column(usize),
    /// Search order over locations: element `k` is the `k`-th location opened.
    Permutation(Vec<usize>),
    /// Expanding search: edge identifiers in the order they are searched.
    EdgeSequence(Vec<usize>),
    /// A set of locations, kept sorted and duplicate free.
    Subset(Vec<usize>),
}

impl PureResponse {
    pub fn subset(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PureResponse::Subset(v)
    }

    /// Bytes that identify the response: a tag byte then big-endian `u32`s.
    pub fn canonical_key(&self) -> Vec<u8> {
        let (tag, items): (u8, &[usize]) = match self {
            PureResponse::Column(j) => return [&[0u8][..], &(*j as u32).to_be_bytes()].concat(),
            PureResponse::Permutation(p) => (1, p),
            PureResponse::EdgeSequence(s) => (2, s),
            PureResponse::Subset(s) => (3, s),
        };
        let mut key = Vec::with_capacity(1 + 4 * items.len());
        key.push(tag);
        for &v in items {
            key.extend_from_slice(&(v as u32).to_be_bytes());
        }
        key
    }

    fn kind(&self) -> &'static str {
        match self {
            PureResponse::Column(_) => "col",
            PureResponse::Permutation(_) => "perm",
            PureResponse::EdgeSequence(_) => "seq",
            PureResponse::Subset(_) => "set",
        }
    }
}

impl fmt::Display for PureResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: &[usize] = match self {
            PureResponse::Column(j) => return write!(f, "col:{j}"),
            PureResponse::Permutation(p) => p,
            PureResponse::EdgeSequence(s) => s,
            PureResponse::Subset(s) => s,
        };
        write!(f, "{}:", self.kind())?;
        for (k, v) in items.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for PureResponse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ContractViolation(format!("malformed response `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let items = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        match kind {
            "col" if items.len() == 1 => Ok(PureResponse::Column(items[0])),
            "perm" => Ok(PureResponse::Permutation(items)),
            "seq" => Ok(PureResponse::EdgeSequence(items)),
            "set" => {
                if items.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad());
                }
                Ok(PureResponse::Subset(items))
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for PureResponse {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PureResponse {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A zero-sum game seen through its oracles.
///
/// Implementations are immutable after construction; every method is a pure
/// function of its arguments.
pub trait Game: Send + Sync {
    /// Number of Player I pure strategies.
    fn n(&self) -> usize;

    /// Upper bound on every payoff the game can produce.
    fn mu(&self) -> f64;

    /// Approximation factor of [`best_response`](Game::best_response).
    fn alpha(&self) -> f64;

    /// Short family name used in errors and reports.
    fn family(&self) -> &'static str;

    /// `A[i, response]`.
    fn payoff(&self, i: usize, response: &PureResponse) -> Result<f64>;

    /// α-approximate best response against `x`, a dense vector of
    /// nonnegative weights of length `n`. Oracles are scale invariant;
    /// callers normally pass a distribution.
    fn best_response(&self, x: &[f64]) -> Result<PureResponse>;

    /// The whole payoff column of `response`.
    fn column(&self, response: &PureResponse) -> Result<Vec<f64>> {
        (0..self.n()).map(|i| self.payoff(i, response)).collect()
    }

    /// Every Player II pure strategy, sorted by canonical key. Fails with
    /// [`Error::TooLarge`] when there are more than `cap`.
    fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
        let _ = cap;
        Err(Error::TooLarge {
            family: self.family(),
            detail: "response set is not enumerable".into(),
            count: None,
        })
    }
}

macro_rules! forward_game {
    ($($ty:ty),*) => {$(
        impl<G: Game + ?Sized> Game for $ty {
            fn n(&self) -> usize { (**self).n() }
            fn mu(&self) -> f64 { (**self).mu() }
            fn alpha(&self) -> f64 { (**self).alpha() }
            fn family(&self) -> &'static str { (**self).family() }
            fn payoff(&self, i: usize, r: &PureResponse) -> Result<f64> { (**self).payoff(i, r) }
            fn best_response(&self, x: &[f64]) -> Result<PureResponse> { (**self).best_response(x) }
            fn column(&self, r: &PureResponse) -> Result<Vec<f64>> { (**self).column(r) }
            fn enumerate_responses(&self, cap: usize) -> Result<Vec<PureResponse>> {
                (**self).enumerate_responses(cap)
            }
        }
    )*};
}

forward_game!(&G, Box<G>, Arc<G>);

/// Oracle answer together with its payoff against the query.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub response: PureResponse,
    pub payoff: f64,
    pub alpha: f64,
}

/// `C(x, response) = Σ_i x_i A[i, response]`.
pub fn expected_payoff<G: Game + ?Sized>(
    game: &G,
    x: &MixedStrategy<usize>,
    response: &PureResponse,
) -> Result<f64> {
    let n = game.n();
    let mut total = 0.0;
    for (&i, w) in x.iter() {
        if i >= n {
            return Err(Error::ContractViolation(format!(
                "strategy index {i} out of range for n = {n}"
            )));
        }
        total += w * game.payoff(i, response)?;
    }
    Ok(total)
}

/// Bilinear extension `C(x, y) = Σ_j y_j C(x, j)`.
pub fn expected_payoff_mixed<G: Game + ?Sized>(
    game: &G,
    x: &MixedStrategy<usize>,
    y: &MixedStrategy<PureResponse>,
) -> Result<f64> {
    let mut total = 0.0;
    for (r, w) in y.iter() {
        total += w * expected_payoff(game, x, r)?;
    }
    Ok(total)
}

/// `Σ_i x_i column_i` for a dense `x`.
pub(crate) fn dot(x: &[f64], column: &[f64]) -> f64 {
    x.iter().zip(column).map(|(a, b)| a * b).sum()
}

/// Queries the oracle and evaluates its answer against `x`.
pub fn best_response<G: Game + ?Sized>(game: &G, x: &MixedStrategy<usize>) -> Result<BestResponse> {
    let dense = x.to_dense(game.n())?;
    let response = game.best_response(&dense)?;
    let payoff = expected_payoff(game, x, &response)?;
    Ok(BestResponse {
        response,
        payoff,
        alpha: game.alpha(),
    })
}

/// Max over rows of `C(i, y)`: the most Player I can get against `y`.
pub fn best_row_payoff<G: Game + ?Sized>(game: &G, y: &MixedStrategy<PureResponse>) -> Result<f64> {
    let mut rows = vec![0.0; game.n()];
    for (r, w) in y.iter() {
        for (acc, a) in rows.iter_mut().zip(game.column(r)?) {
            *acc += w * a;
        }
    }
    Ok(rows.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Checks an oracle query vector: right length, finite, nonnegative.
pub(crate) fn check_query(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::ContractViolation(format!(
            "query has length {}, game has n = {n}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::ContractViolation(
            "query weights must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

pub(crate) fn check_row(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::ContractViolation(format!(
            "strategy index {i} out of range for n = {n}"
        )));
    }
    Ok(())
}
