//! Value search with the central-cut ellipsoid method.
//!
//! For a target `v`, Player I's feasibility problem is
//!
//! ```text
//! Σ_i x_i A[i, j] ≥ v  for all j,   Σ_i x_i = 1,   x ≥ 0
//! ```
//!
//! with one constraint per column. The oracle acts as an approximate
//! separation routine: a point is declared feasible when its best response
//! pays at least `v`. A binary search over the grid `{0, γ, 2γ, …, μ}`
//! finds the largest feasible grid value `v^f`; Player II's strategy comes
//! from the exact LP restricted to the columns met along the way.
//!
//! The method runs in `z ∈ R^{n−1}` with `x_n = 1 − Σ z`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{dot, Game, PureResponse};
use crate::lp::solve_lp_exact;
use crate::strategy::MixedStrategy;

/// Default grid step relative to `μ`.
pub const DEFAULT_GAMMA_REL: f64 = 1e-4;
/// Default tolerance on the simplex constraints.
pub const DEFAULT_FEASIBILITY_SLACK: f64 = 1e-12;

/// A column constraint met during the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnConstraint {
    pub response: PureResponse,
    pub column: Vec<f64>,
}

/// A violated simplex constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplexCut {
    /// `x_i ≥ 0`.
    Nonnegative(usize),
    /// `Σ x_i ≤ 1`.
    SumAbove,
    /// `Σ x_i ≥ 1`.
    SumBelow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    /// The oracle's answer pays at least the target.
    Feasible { response: PureResponse, payoff: f64 },
    Simplex(SimplexCut),
    Column(ColumnConstraint),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidConfig {
    /// Grid step `γ`, in payoff units.
    pub gamma: f64,
    /// Lower bound on `ln sqrt(det P)`; below it the ellipsoid is too small
    /// to hold the slackened feasible region and the test reports empty.
    pub shrink_tolerance: f64,
    pub iteration_cap: u64,
    pub feasibility_slack: f64,
}

impl EllipsoidConfig {
    /// Settings for `game` with grid step `gamma` (payoff units).
    ///
    /// If `v ≤ V*`, the region tested at `v − γ/2` holds a ball of radius
    /// `γ/(4μ n^1.5)` in `z`; the shrink threshold uses half of that.
    pub fn for_game<G: Game + ?Sized>(game: &G, gamma: f64) -> Result<Self> {
        let mu = game.mu();
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::Config(format!("game has non-positive mu {mu}")));
        }
        let n = game.n();
        let d = n.saturating_sub(1) as f64;
        let r = gamma / (8.0 * mu * (n as f64).powf(1.5));
        let big_r = (n as f64).sqrt();
        let shrink_tolerance = d * r.ln();
        let steps = 2.0 * (d + 1.0) * d * (big_r / r).ln();
        Ok(EllipsoidConfig {
            gamma,
            shrink_tolerance,
            iteration_cap: steps.ceil() as u64 + 16 * (n as u64) + 16,
            feasibility_slack: DEFAULT_FEASIBILITY_SLACK,
        })
    }

    /// `γ = 1e-4·μ`.
    pub fn default_for<G: Game + ?Sized>(game: &G) -> Result<Self> {
        Self::for_game(game, DEFAULT_GAMMA_REL * game.mu())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A distribution declared feasible and the oracle's answer there.
    Point { x: Vec<f64>, response: PureResponse },
    /// `capped` is set when the iteration cap ended the run.
    Empty { capped: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityRun {
    pub outcome: Feasibility,
    /// Violated column constraints, in the order met, without repeats.
    pub constraints: Vec<ColumnConstraint>,
    pub iterations: u64,
}

impl FeasibilityRun {
    pub fn is_feasible(&self) -> bool {
        matches!(self.outcome, Feasibility::Point { .. })
    }
}

/// One feasibility test of the binary search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridTest {
    pub v: f64,
    pub feasible: bool,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidResult {
    pub x_hat: MixedStrategy<usize>,
    pub y_hat: MixedStrategy<PureResponse>,
    /// Largest grid value declared feasible.
    pub v_final: f64,
    pub discovered: Vec<ColumnConstraint>,
    /// Value of the LP restricted to `discovered`.
    pub restricted_value: f64,
    pub gamma: f64,
    pub trace: Vec<GridTest>,
}

impl EllipsoidResult {
    /// Every tested value below a feasible one was also feasible.
    pub fn trace_is_monotone(&self) -> bool {
        self.trace.iter().all(|a| {
            !a.feasible || self.trace.iter().all(|b| b.v > a.v || b.feasible)
        })
    }

    pub fn total_iterations(&self) -> u64 {
        self.trace.iter().map(|t| t.iterations).sum()
    }
}

/// Columns evaluated so far, keyed by response.
#[derive(Default)]
struct ColumnCache {
    columns: BTreeMap<PureResponse, Vec<f64>>,
}

impl ColumnCache {
    fn get<G: Game + ?Sized>(&mut self, game: &G, r: &PureResponse) -> Result<&[f64]> {
        if !self.columns.contains_key(r) {
            let col = game.column(r)?;
            self.columns.insert(r.clone(), col);
        }
        Ok(&self.columns[r])
    }
}

fn separate<G: Game + ?Sized>(
    game: &G,
    x: &[f64],
    v: f64,
    slack: f64,
    cache: &mut ColumnCache,
) -> Result<Separation> {
    let n = game.n();
    if x.len() != n || x.iter().any(|a| !a.is_finite()) {
        return Err(Error::ContractViolation(format!(
            "separation point must be {n} finite numbers"
        )));
    }
    let sum: f64 = x.iter().sum();
    if sum > 1.0 + slack {
        return Ok(Separation::Simplex(SimplexCut::SumAbove));
    }
    if sum < 1.0 - slack {
        return Ok(Separation::Simplex(SimplexCut::SumBelow));
    }
    if let Some(i) = x.iter().position(|&a| a < -slack) {
        return Ok(Separation::Simplex(SimplexCut::Nonnegative(i)));
    }
    let query = clip_normalize(x);
    let response = game.best_response(&query)?;
    let column = cache.get(game, &response)?;
    let payoff = dot(x, column);
    if payoff < v {
        Ok(Separation::Column(ColumnConstraint {
            column: column.to_vec(),
            response,
        }))
    } else {
        Ok(Separation::Feasible { response, payoff })
    }
}

fn clip_normalize(x: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|&a| a.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    clipped.into_iter().map(|a| a / sum).collect()
}

/// Checks `x` against the simplex, then against the oracle's answer at
/// the clipped and renormalized `x`.
pub fn approximate_separation<G: Game + ?Sized>(
    game: &G,
    x: &[f64],
    v: f64,
    feasibility_slack: f64,
) -> Result<Separation> {
    separate(game, x, v, feasibility_slack, &mut ColumnCache::default())
}

/// Looks for a point of the feasibility region at value `v`, testing the
/// column constraints at `v − γ/2`.
pub fn ellipsoid_feasibility<G: Game + ?Sized>(
    game: &G,
    v: f64,
    config: &EllipsoidConfig,
) -> Result<FeasibilityRun> {
    feasibility(game, v, config, &mut ColumnCache::default())
}

fn feasibility<G: Game + ?Sized>(
    game: &G,
    v: f64,
    config: &EllipsoidConfig,
    cache: &mut ColumnCache,
) -> Result<FeasibilityRun> {
    let n = game.n();
    if n == 0 {
        return Err(Error::Config("game has no Player I strategies".into()));
    }
    let level = v - config.gamma / 2.0;
    let slack = config.feasibility_slack;
    let mut constraints: Vec<ColumnConstraint> = Vec::new();
    let record = |cc: &ColumnConstraint, constraints: &mut Vec<ColumnConstraint>| {
        if !constraints.iter().any(|c| c.response == cc.response) {
            constraints.push(cc.clone());
        }
    };

    if n == 1 {
        let outcome = match separate(game, &[1.0], level, slack, cache)? {
            Separation::Feasible { response, .. } => Feasibility::Point { x: vec![1.0], response },
            Separation::Column(cc) => {
                record(&cc, &mut constraints);
                Feasibility::Empty { capped: false }
            }
            Separation::Simplex(_) => unreachable!("the single point lies on the simplex"),
        };
        return Ok(FeasibilityRun { outcome, constraints, iterations: 1 });
    }

    let d = n - 1;
    let df = d as f64;
    let mut center = vec![1.0 / n as f64; d];
    let mut p = vec![vec![0.0; d]; d];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = n as f64;
    }
    let mut half_logdet = df * 0.5 * (n as f64).ln();
    let step_logdet = if d == 1 {
        -(2f64.ln())
    } else {
        0.5 * (df * (df * df / (df * df - 1.0)).ln() + ((df - 1.0) / (df + 1.0)).ln())
    };

    let mut x = vec![0.0; n];
    let mut g = vec![0.0; d];
    for it in 1..=config.iteration_cap {
        if half_logdet < config.shrink_tolerance {
            return Ok(FeasibilityRun {
                outcome: Feasibility::Empty { capped: false },
                constraints,
                iterations: it - 1,
            });
        }
        x[..d].copy_from_slice(&center);
        x[d] = 1.0 - center.iter().sum::<f64>();

        // Reduced-space cuts keep {z : gᵀz ≤ gᵀc}. Sum cuts cannot occur
        // since x_n absorbs the remainder.
        match separate(game, &x, level, slack, cache)? {
            Separation::Feasible { response, .. } => {
                return Ok(FeasibilityRun {
                    outcome: Feasibility::Point { x: clip_normalize(&x), response },
                    constraints,
                    iterations: it,
                });
            }
            Separation::Simplex(SimplexCut::Nonnegative(i)) if i < d => {
                g.fill(0.0);
                g[i] = -1.0;
            }
            Separation::Simplex(_) => g.fill(1.0),
            Separation::Column(cc) => {
                for (gi, a) in g.iter_mut().zip(&cc.column) {
                    *gi = cc.column[d] - a;
                }
                record(&cc, &mut constraints);
                if g.iter().all(|&a| a == 0.0) {
                    // constant column below the level
                    return Ok(FeasibilityRun {
                        outcome: Feasibility::Empty { capped: false },
                        constraints,
                        iterations: it,
                    });
                }
            }
        }

        let pg: Vec<f64> = p.iter().map(|row| dot(row, &g)).collect();
        let gpg = dot(&g, &pg);
        if !(gpg > 0.0 && gpg.is_finite()) {
            return Err(Error::NumericalInstability {
                iteration: it,
                detail: format!("ellipsoid matrix lost positive definiteness (gᵀPg = {gpg})"),
            });
        }
        let norm = gpg.sqrt();
        let gt: Vec<f64> = pg.iter().map(|a| a / norm).collect();
        if d == 1 {
            center[0] -= gt[0] / 2.0;
            p[0][0] /= 4.0;
        } else {
            for (c, a) in center.iter_mut().zip(&gt) {
                *c -= a / (df + 1.0);
            }
            let scale = df * df / (df * df - 1.0);
            let rank = 2.0 / (df + 1.0);
            for i in 0..d {
                for j in 0..=i {
                    let sym = scale * (0.5 * (p[i][j] + p[j][i]) - rank * gt[i] * gt[j]);
                    p[i][j] = sym;
                    p[j][i] = sym;
                }
            }
        }
        half_logdet += step_logdet;
    }
    Ok(FeasibilityRun {
        outcome: Feasibility::Empty { capped: true },
        constraints,
        iterations: config.iteration_cap,
    })
}

/// Binary search over `{0, γ, …, μ}`, then the exact LP over the columns
/// met during the search.
pub fn solve_ellipsoid<G: Game + ?Sized>(game: &G, config: &EllipsoidConfig) -> Result<EllipsoidResult> {
    let mu = game.mu();
    let gamma = config.gamma;
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
    }
    let top = (mu / gamma).ceil();
    if top > 1e15 {
        return Err(Error::Config(format!("grid μ/γ = {top} is too fine")));
    }
    let top = top as u64;
    let grid = |k: u64| (k as f64 * gamma).min(mu);

    let mut cache = ColumnCache::default();
    let mut discovered: Vec<ColumnConstraint> = Vec::new();
    let mut answers: Vec<PureResponse> = Vec::new();
    let mut trace = Vec::new();
    let mut test = |k: u64| -> Result<Option<Vec<f64>>> {
        let v = grid(k);
        let run = feasibility(game, v, config, &mut cache)?;
        trace.push(GridTest {
            v,
            feasible: run.is_feasible(),
            iterations: run.iterations,
        });
        for cc in run.constraints {
            if !discovered.iter().any(|c| c.response == cc.response) {
                discovered.push(cc);
            }
        }
        Ok(match run.outcome {
            Feasibility::Point { x, response } => {
                answers.push(response);
                Some(x)
            }
            Feasibility::Empty { .. } => None,
        })
    };

    let Some(mut x_hat) = test(0)? else {
        return Err(Error::Internal("feasibility test failed at v = 0".into()));
    };
    let (mut lo, mut hi) = (0u64, top);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match test(mid)? {
            Some(x) => {
                lo = mid;
                x_hat = x;
            }
            None => hi = mid - 1,
        }
    }
    let v_final = grid(lo);

    for r in answers {
        if !discovered.iter().any(|c| c.response == r) {
            let column = cache.get(game, &r)?.to_vec();
            discovered.push(ColumnConstraint { response: r, column });
        }
    }
    let n = game.n();
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|i| discovered.iter().map(|c| c.column[i]).collect())
        .collect();
    let lp = solve_lp_exact(&matrix)?;
    let y_hat = lp.y_star.map_keys(|&j| discovered[j].response.clone())?;

    Ok(EllipsoidResult {
        x_hat: MixedStrategy::from_dense(&x_hat)?,
        y_hat,
        v_final,
        discovered,
        restricted_value: lp.value,
        gamma,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::best_row_payoff;
    use crate::games::{BoxGame, MatrixGame};
    use crate::verify::exact_game_solve;

    fn one_by_one() -> MatrixGame {
        MatrixGame::new(vec![vec![5.0]]).unwrap()
    }

    fn symmetric() -> MatrixGame {
        MatrixGame::new(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()
    }

    #[test]
    fn separation_examples() {
        let g = MatrixGame::new(vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(
            approximate_separation(&g, &[0.6, 0.5, -0.1], 0.5, 1e-12).unwrap(),
            Separation::Simplex(SimplexCut::Nonnegative(2))
        );
        assert_eq!(
            approximate_separation(&g, &[0.6, 0.5, 0.1], 0.5, 1e-12).unwrap(),
            Separation::Simplex(SimplexCut::SumAbove)
        );
        let g = one_by_one();
        assert!(matches!(
            approximate_separation(&g, &[1.0], 4.0, 1e-12).unwrap(),
            Separation::Feasible { payoff, .. } if payoff == 5.0
        ));
        match approximate_separation(&g, &[1.0], 6.0, 1e-12).unwrap() {
            Separation::Column(cc) => assert_eq!(cc.column, vec![5.0]),
            other => panic!("expected a column cut, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_examples() {
        let g = one_by_one();
        let cfg = EllipsoidConfig::for_game(&g, 0.5).unwrap();
        assert!(ellipsoid_feasibility(&g, 4.0, &cfg).unwrap().is_feasible());
        assert!(!ellipsoid_feasibility(&g, 6.0, &cfg).unwrap().is_feasible());

        let g = symmetric();
        let cfg = EllipsoidConfig::for_game(&g, 0.01).unwrap();
        let run = ellipsoid_feasibility(&g, 0.0, &cfg).unwrap();
        assert_eq!(run.iterations, 1);
        match run.outcome {
            Feasibility::Point { x, .. } => assert_eq!(x, vec![0.5, 0.5]),
            other => panic!("{other:?}"),
        }
        assert!(ellipsoid_feasibility(&g, 1.4, &cfg).unwrap().is_feasible());
        assert!(!ellipsoid_feasibility(&g, 1.6, &cfg).unwrap().is_feasible());
    }

    #[test]
    fn solve_one_by_one() {
        let g = one_by_one();
        let r = solve_ellipsoid(&g, &EllipsoidConfig::for_game(&g, 0.5).unwrap()).unwrap();
        assert_eq!(r.v_final, 5.0);
        assert_eq!(r.x_hat, MixedStrategy::point(0));
        assert_eq!(r.y_hat, MixedStrategy::point(PureResponse::Column(0)));
        assert_eq!(r.restricted_value, 5.0);
    }

    #[test]
    fn solve_symmetric() {
        let g = symmetric();
        let r = solve_ellipsoid(&g, &EllipsoidConfig::for_game(&g, 0.01).unwrap()).unwrap();
        assert!(r.v_final >= 1.49 - 1e-12 && r.v_final <= 1.5 + 1e-12, "{}", r.v_final);
        let x = r.x_hat.to_dense(2).unwrap();
        for j in 0..2 {
            assert!(x[0] * g.rows()[0][j] + x[1] * g.rows()[1][j] >= r.v_final - 0.005 - 1e-9);
        }
        assert!(best_row_payoff(&g, &r.y_hat).unwrap() <= 1.5 + 1e-9);
        assert!(r.trace_is_monotone());
    }

    #[test]
    fn solve_box() {
        let g = BoxGame::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let gamma = 1e-3 * g.mu();
        let r = solve_ellipsoid(&g, &EllipsoidConfig::for_game(&g, gamma).unwrap()).unwrap();
        let v_star = exact_game_solve(&g, 100).unwrap().value();
        assert!((r.v_final - v_star).abs() <= gamma, "{} vs {v_star}", r.v_final);
        let upper = best_row_payoff(&g, &r.y_hat).unwrap();
        assert!((upper - r.restricted_value).abs() <= 1e-8 * g.mu());
        assert!(r.trace_is_monotone());
    }
}
