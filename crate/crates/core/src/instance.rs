//! JSON instance files.
//!
//! ```json
//! {"game": "box", "costs": [1, 2, 3]}
//! {"game": "regret", "weights": [1, 2], "base": {"game": "box", "costs": [1, 2]}}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::games::{
    BoxGame, ExpGame, ExprGame, HspeGame, MatrixGame, PrecGame, RegretGame, SubGame,
    TreeInstance, DEFAULT_HSPE_EPS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameInstanceSpec {
    Box {
        costs: Vec<f64>,
    },
    /// `[a, b]`: box `a` is opened before box `b`.
    Prec {
        costs: Vec<f64>,
        #[serde(default)]
        edges: Vec<(usize, usize)>,
    },
    /// `values[mask]` is `f` of the set of bits in `mask`.
    SubModularTabulated {
        n: usize,
        values: Vec<f64>,
    },
    /// Edges are `[u, v, cost]` over vertices `0..=edges.len()`.
    ExpTree {
        #[serde(default)]
        root: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    ExprTree {
        #[serde(default)]
        root: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    Hspe {
        costs: Vec<f64>,
        capture: Vec<f64>,
        budget: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
    },
    Regret {
        weights: Vec<f64>,
        base: Box<GameInstanceSpec>,
    },
    /// Explicit payoff matrix, one row per Player I strategy.
    Matrix {
        rows: Vec<Vec<f64>>,
    },
}

impl GameInstanceSpec {
    /// Constructs the game, enforcing every constructor invariant.
    pub fn build(&self) -> Result<Box<dyn Game>> {
        Ok(match self {
            GameInstanceSpec::Box { costs } => Box::new(BoxGame::new(costs.clone())?),
            GameInstanceSpec::Prec { costs, edges } => {
                Box::new(PrecGame::new(costs.clone(), edges.clone())?)
            }
            GameInstanceSpec::SubModularTabulated { n, values } => {
                Box::new(SubGame::from_table(*n, values.clone())?)
            }
            GameInstanceSpec::ExpTree { root, edges } => {
                Box::new(ExpGame::new(TreeInstance::new(*root, edges.clone())?))
            }
            GameInstanceSpec::ExprTree { root, edges } => {
                Box::new(ExprGame::new(TreeInstance::new(*root, edges.clone())?))
            }
            GameInstanceSpec::Hspe {
                costs,
                capture,
                budget,
                eps,
            } => Box::new(HspeGame::new(
                costs.clone(),
                capture.clone(),
                *budget,
                eps.unwrap_or(DEFAULT_HSPE_EPS),
            )?),
            GameInstanceSpec::Regret { weights, base } => {
                Box::new(RegretGame::new(base.build()?, weights.clone())?)
            }
            GameInstanceSpec::Matrix { rows } => Box::new(MatrixGame::new(rows.clone())?),
        })
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GameInstanceSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInstance(format!("malformed instance: {e}")))?;
        spec.build()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance specs always serialize")
    }
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<GameInstanceSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInstance(format!("cannot read {}: {e}", path.display())))?;
    GameInstanceSpec::from_json(&text)
        .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))
}
