//! The JSON document written by `og solve`.

use serde::{Deserialize, Serialize};

use oracle_games::verify::GuaranteeReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Mwu,
    Ellipsoid,
    LpExact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub epsilon: Option<f64>,
    pub mode: Option<String>,
    /// `γ` relative to `μ`, as given on the command line.
    pub gamma: Option<f64>,
    pub cap: usize,
    pub verify: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Guarantees {
    #[serde(flatten)]
    pub report: GuaranteeReport,
    /// Largest ratio the algorithm's guarantee allows, slack included.
    pub ratio_bound: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReportFile {
    pub algorithm: Algorithm,
    pub config: ConfigEcho,
    pub n: usize,
    pub mu: f64,
    pub alpha: f64,
    /// `[row, weight]` pairs.
    pub x_hat: Vec<(usize, f64)>,
    /// `[response, weight]` pairs, responses in text form.
    pub y_hat: Vec<(String, f64)>,
    pub value_lower: f64,
    pub value_upper: f64,
    pub v_star: Option<f64>,
    pub iterations: u64,
    pub iteration_bound: Option<u64>,
    /// Ellipsoid only: the largest grid value found feasible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v_final: Option<f64>,
    pub wall_time_ms: u64,
    pub guarantees: Option<Guarantees>,
}
