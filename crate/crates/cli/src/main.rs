//! `og`: solve oracle-defined zero-sum games from JSON instance files.

mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use oracle_games::ellipsoid::{solve_ellipsoid, EllipsoidConfig, DEFAULT_GAMMA_REL};
use oracle_games::games::{brute_force_best_response, DEFAULT_ENUMERATION_CAP};
use oracle_games::mwu::{mwu_solve, MwuConfig, MwuMode};
use oracle_games::verify::{evaluate_against, exact_game_solve, ExactGameSolution, RATIO_SLACK};
use oracle_games::{
    best_response, parse_instance, Error, Game, GameInstanceSpec, MixedStrategy, PureResponse,
    DEFAULT_TOLERANCE,
};

use report::{Algorithm, ConfigEcho, Guarantees, SolveReportFile};

const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Parser)]
#[command(name = "og", version, about = "Solve zero-sum search games given by best-response oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute mixed strategies for both players and write a JSON report.
    Solve(SolveArgs),
    /// Ask the game's best-response oracle about a hider distribution.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Mwu,
    Ellipsoid,
    LpExact,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    P1,
    P2,
    Both,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// MWU accuracy ε [default: 0.1].
    #[arg(long)]
    eps: Option<f64>,
    /// Ellipsoid grid step as a fraction of μ [default: 1e-4].
    #[arg(long)]
    gamma: Option<f64>,
    /// MWU: which player's guarantee sets δ [default: both].
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Limit on enumerated Player II strategies (lp-exact, --verify).
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    /// Check the result against the exact game value.
    #[arg(long)]
    verify: bool,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    instance: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Hider weights, comma separated; normalized before use.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    x: Vec<f64>,
    /// Also search all Player II strategies for the exact optimum.
    #[arg(long)]
    brute: bool,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    instance: PathBuf,
}

/// Result of a command that ran to completion; `false` means a guarantee
/// check failed.
type Passed = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = tolerance().and_then(|tol| match cli.command {
        Command::Solve(args) => solve(args, tol),
        Command::Oracle(args) => oracle(args, tol),
    });
    if let Err(e) = &outcome {
        eprintln!("error: {e:#}");
    }
    ExitCode::from(exit_status(&outcome))
}

/// 0 ok, 2 guarantee violated, 1 anything else.
fn exit_status(outcome: &Result<Passed>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => match e.downcast_ref::<Error>() {
            Some(Error::GuaranteeViolation { .. }) => 2,
            _ => 1,
        },
    }
}

/// `OG_TOLERANCE`, relative to μ.
fn tolerance() -> Result<f64> {
    match std::env::var("OG_TOLERANCE") {
        Ok(text) => {
            let tol: f64 = text
                .trim()
                .parse()
                .with_context(|| format!("OG_TOLERANCE={text:?} is not a number"))?;
            if !tol.is_finite() || tol < 0.0 {
                bail!("OG_TOLERANCE must be a nonnegative number, got {tol}");
            }
            Ok(tol)
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_TOLERANCE),
        Err(e) => bail!("OG_TOLERANCE: {e}"),
    }
}

fn load(path: &PathBuf) -> Result<(GameInstanceSpec, Box<dyn Game>)> {
    let spec = parse_instance(path)?;
    let game = spec.build()?;
    Ok((spec, game))
}

struct Solved {
    x_hat: MixedStrategy<usize>,
    y_hat: MixedStrategy<PureResponse>,
    value_lower: f64,
    value_upper: f64,
    iterations: u64,
    iteration_bound: Option<u64>,
    v_final: Option<f64>,
    exact: Option<ExactGameSolution>,
}

fn solve(args: SolveArgs, tol: f64) -> Result<Passed> {
    let algorithm = match args.algo {
        Algo::Mwu => Algorithm::Mwu,
        Algo::Ellipsoid => Algorithm::Ellipsoid,
        Algo::LpExact => Algorithm::LpExact,
    };
    if args.eps.is_some() && !matches!(args.algo, Algo::Mwu) {
        bail!("--eps applies to --algo mwu only");
    }
    if args.mode.is_some() && !matches!(args.algo, Algo::Mwu) {
        bail!("--mode applies to --algo mwu only");
    }
    if args.gamma.is_some() && !matches!(args.algo, Algo::Ellipsoid) {
        bail!("--gamma applies to --algo ellipsoid only");
    }
    let (_, game) = load(&args.instance)?;
    let game: &dyn Game = &*game;
    let (mu, alpha) = (game.mu(), game.alpha());

    let epsilon = args.eps.unwrap_or(DEFAULT_EPSILON);
    let gamma_rel = args.gamma.unwrap_or(DEFAULT_GAMMA_REL);
    let mode = match args.mode.unwrap_or(Mode::Both) {
        Mode::P1 => MwuMode::PlayerOne,
        Mode::P2 => MwuMode::PlayerTwo,
        Mode::Both => MwuMode::Both,
    };

    let start = Instant::now();
    let solved = match args.algo {
        Algo::Mwu => {
            let r = mwu_solve(game, &MwuConfig::new(epsilon, mode))?;
            Solved {
                x_hat: r.x_hat,
                y_hat: r.y_hat,
                value_lower: r.lower_bound,
                value_upper: r.upper_bound_empirical,
                iterations: r.iterations,
                iteration_bound: Some(r.iteration_bound),
                v_final: None,
                exact: None,
            }
        }
        Algo::Ellipsoid => {
            let config = EllipsoidConfig::for_game(game, gamma_rel * mu)?;
            let r = solve_ellipsoid(game, &config)?;
            let certified = best_response(game, &r.x_hat)?.payoff / alpha;
            Solved {
                value_lower: certified,
                value_upper: r.restricted_value,
                iterations: r.total_iterations(),
                iteration_bound: Some(config.iteration_cap * r.trace.len() as u64),
                v_final: Some(r.v_final),
                x_hat: r.x_hat,
                y_hat: r.y_hat,
                exact: None,
            }
        }
        Algo::LpExact => {
            let exact = exact_game_solve(game, args.cap)?;
            Solved {
                x_hat: exact.x_star().clone(),
                y_hat: exact.y_star()?,
                value_lower: exact.value(),
                value_upper: exact.value(),
                iterations: exact.lp.pivots as u64,
                iteration_bound: None,
                v_final: None,
                exact: Some(exact),
            }
        }
    };

    let mut guarantees = None;
    let mut v_star = solved.exact.as_ref().map(|e| e.value());
    if args.verify {
        let exact = match solved.exact {
            Some(e) => e,
            None => exact_game_solve(game, args.cap)?,
        };
        let report = evaluate_against(game, &exact, &solved.x_hat, &solved.y_hat, tol)?;
        v_star = Some(report.v_star);
        let mut failures = Vec::new();
        let ratio_bound = match args.algo {
            Algo::Mwu => alpha * (1.0 + epsilon) + RATIO_SLACK,
            Algo::LpExact => 1.0 + RATIO_SLACK,
            Algo::Ellipsoid => {
                let gamma = gamma_rel * mu;
                let v_final = solved.v_final.unwrap_or_default();
                if v_final < report.v_star - gamma - 1e-6 * mu {
                    failures.push(format!("v_final {v_final} < V* - gamma"));
                }
                if report.player1_worst < v_final / alpha - gamma {
                    failures.push(format!(
                        "min_j C(x_hat, j) = {} < v_final/alpha - gamma",
                        report.player1_worst
                    ));
                }
                if report.player2_worst > alpha * report.v_star + gamma {
                    failures.push(format!(
                        "max_i C(i, y_hat) = {} > alpha V* + gamma",
                        report.player2_worst
                    ));
                }
                alpha
            }
        };
        if !matches!(args.algo, Algo::Ellipsoid) {
            if report.ratio1.is_nan() || report.ratio1 > ratio_bound {
                failures.push(format!("ratio1 {} > {ratio_bound}", report.ratio1));
            }
            if report.ratio2.is_nan() || report.ratio2 > ratio_bound {
                failures.push(format!("ratio2 {} > {ratio_bound}", report.ratio2));
            }
        }
        guarantees = Some(Guarantees {
            report,
            ratio_bound,
            passed: failures.is_empty(),
            failures,
        });
    }
    let wall_time_ms = start.elapsed().as_millis() as u64;

    let file = SolveReportFile {
        algorithm,
        config: ConfigEcho {
            epsilon: matches!(args.algo, Algo::Mwu).then_some(epsilon),
            mode: matches!(args.algo, Algo::Mwu).then(|| {
                match mode {
                    MwuMode::PlayerOne => "p1",
                    MwuMode::PlayerTwo => "p2",
                    MwuMode::Both => "both",
                }
                .to_string()
            }),
            gamma: matches!(args.algo, Algo::Ellipsoid).then_some(gamma_rel),
            cap: args.cap,
            verify: args.verify,
            tolerance: tol,
        },
        n: game.n(),
        mu,
        alpha,
        x_hat: solved.x_hat.iter().map(|(&i, w)| (i, w)).collect(),
        y_hat: solved.y_hat.iter().map(|(r, w)| (r.to_string(), w)).collect(),
        value_lower: solved.value_lower,
        value_upper: solved.value_upper,
        v_star,
        iterations: solved.iterations,
        iteration_bound: solved.iteration_bound,
        v_final: solved.v_final,
        wall_time_ms,
        guarantees,
    };
    emit(&file, args.out.as_ref())?;

    match &file.guarantees {
        Some(g) if !g.passed => {
            for f in &g.failures {
                eprintln!("guarantee violated: {f}");
            }
            Ok(false)
        }
        _ => Ok(true),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleAnswer {
    response: String,
    payoff: f64,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute: Option<BruteAnswer>,
}

#[derive(Serialize)]
struct BruteAnswer {
    response: String,
    payoff: f64,
    /// Oracle payoff over the optimum.
    ratio: f64,
    within_alpha: bool,
    /// HSPE only: captured probability mass of the oracle's choice over
    /// the best possible.
    #[serde(skip_serializing_if = "Option::is_none")]
    capture_ratio: Option<f64>,
}

fn oracle(args: OracleArgs, tol: f64) -> Result<Passed> {
    let (spec, game) = load(&args.instance)?;
    let game: &dyn Game = &*game;
    if args.x.len() != game.n() {
        bail!("--x has {} entries, the game has n = {}", args.x.len(), game.n());
    }
    let x = MixedStrategy::from_dense(&args.x)?;
    let answer = best_response(game, &x)?;
    let mut passed = true;
    let brute = if args.brute {
        let exact = brute_force_best_response(game, &x, args.cap)?;
        let ratio = if exact.payoff > 0.0 {
            answer.payoff / exact.payoff
        } else if answer.payoff <= tol * game.mu() {
            1.0
        } else {
            f64::INFINITY
        };
        // HSPE's factor bounds captured mass, not escape probability
        let capture_ratio = matches!(spec, GameInstanceSpec::Hspe { .. })
            .then(|| (1.0 - answer.payoff) / (1.0 - exact.payoff));
        let within_alpha = match capture_ratio {
            Some(c) => c >= 1.0 / game.alpha() - tol,
            None => answer.payoff <= game.alpha() * exact.payoff + tol * game.mu(),
        };
        passed = within_alpha;
        Some(BruteAnswer {
            response: exact.response.to_string(),
            payoff: exact.payoff,
            ratio,
            within_alpha,
            capture_ratio,
        })
    } else {
        None
    };
    emit(
        &OracleAnswer {
            response: answer.response.to_string(),
            payoff: answer.payoff,
            alpha: answer.alpha,
            brute,
        },
        None,
    )?;
    Ok(passed)
}
