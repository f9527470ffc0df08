//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use oracle_games::ellipsoid::{solve_ellipsoid, EllipsoidConfig};
use oracle_games::games::{
    brute_force_best_response, ExpGame, ExprGame, RegretGame, DEFAULT_ENUMERATION_CAP,
};
use oracle_games::knapsack::knapsack_fptas;
use oracle_games::mwu::{mwu_solve, MwuConfig, MwuMode, MwuResult};
use oracle_games::verify::{
    check_guarantees, evaluate_against, exact_game_solve, ExplicitGame,
};
use oracle_games::{best_response, solve_lp_exact, Game, GameInstanceSpec, MixedStrategy};

const CAP: usize = DEFAULT_ENUMERATION_CAP;
const EPSILONS: [f64; 3] = [0.05, 0.1, 0.3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = fn(&Corpus) -> Outcome;

fn main() {
    let corpus = Corpus::new();
    let criteria: [(&str, &str, Option<Duration>, Criterion); 8] = [
        ("1", "BOX hider optimum", Some(Duration::from_secs(10)), box_hider_optimum),
        ("2", "MWU guarantees", Some(Duration::from_secs(60)), mwu_guarantees),
        ("3", "MWU iteration bound", None, mwu_iteration_bound),
        ("4", "ellipsoid guarantees", Some(Duration::from_secs(120)), ellipsoid_guarantees),
        ("5", "oracle exactness and ratios", Some(Duration::from_secs(60)), oracles),
        ("6", "EXPr reduction", None, expr_reduction),
        ("7", "regret wrapper", None, regret_wrapper),
        ("8", "LP self-consistency", None, lp_self_consistency),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run(&corpus);
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {id} ({name}): {}; {:.2}s{}{}",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default(),
            if in_time { "" } else { " TOO SLOW" },
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

/// The instances of criterion 2, shared with criteria 3 and 4.
struct Corpus {
    matrices: Vec<Box<dyn Game>>,
    boxes: Vec<Box<dyn Game>>,
    precs: Vec<Box<dyn Game>>,
    exprs: Vec<Box<dyn Game>>,
    hspes: Vec<Box<dyn Game>>,
}

impl Corpus {
    fn new() -> Self {
        let mut rng = common::rng(2024);
        let matrices = (0..50)
            .map(|_| Box::new(common::matrix_game(&mut rng, 10)) as Box<dyn Game>)
            .collect();
        let boxes = (0..20)
            .map(|k| Box::new(common::box_game(&mut rng, 1 + k % 6)) as Box<dyn Game>)
            .collect();
        let precs = (0..20)
            .map(|k| Box::new(common::prec_game(&mut rng, 1 + k % 6)) as Box<dyn Game>)
            .collect();
        let exprs = (0..20)
            .map(|k| Box::new(ExprGame::new(common::tree(&mut rng, 1 + k % 6))) as Box<dyn Game>)
            .collect();
        let hspes = (0..10)
            .map(|k| Box::new(common::hspe_game(&mut rng, 1 + k, 0.01)) as Box<dyn Game>)
            .collect();
        Corpus {
            matrices,
            boxes,
            precs,
            exprs,
            hspes,
        }
    }

    fn guaranteed(&self) -> [(&'static str, &[Box<dyn Game>]); 4] {
        [
            ("matrix", &self.matrices),
            ("box", &self.boxes),
            ("prec", &self.precs),
            ("expr", &self.exprs),
        ]
    }
}

fn mwu(game: &dyn Game, eps: f64) -> oracle_games::Result<MwuResult> {
    mwu_solve(game, &MwuConfig::new(eps, MwuMode::Both))
}

fn box_hider_optimum(_: &Corpus) -> Outcome {
    let mut rng = common::rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(3..=6);
        let costs = common::int_costs(&mut rng, n, 1, 10);
        let game = oracle_games::games::BoxGame::new(costs.clone()).unwrap();
        let x = exact_game_solve(&game, CAP).unwrap().x_star().to_dense(n).unwrap();
        let total: f64 = costs.iter().sum();
        for j in 0..n {
            worst = worst.max((x[j] - costs[j] / total).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max |x*_j - c_j/sum c| = {worst:.2e} <= 1e-6 over 20 instances"))
}

fn mwu_guarantees(corpus: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = Vec::new();
    for (family, games) in corpus.guaranteed() {
        let mut max_excess = f64::NEG_INFINITY;
        for (k, game) in games.iter().enumerate() {
            for eps in EPSILONS {
                let game: &dyn Game = &**game;
                let checked = mwu(game, eps).and_then(|r| {
                    check_guarantees(game, &r.x_hat, &r.y_hat, game.alpha(), eps, CAP)
                });
                match checked {
                    Ok(rep) => {
                        let bound = game.alpha() * (1.0 + eps);
                        max_excess = max_excess.max(rep.ratio1.max(rep.ratio2) - bound);
                    }
                    Err(e) => failures.push(format!("{family}#{k} eps={eps}: {e}")),
                }
            }
        }
        worst.push(format!("{family} max(ratio - a(1+e)) = {max_excess:+.3e}"));
    }
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for (k, game) in corpus.hspes.iter().enumerate() {
        for eps in EPSILONS {
            let game: &dyn Game = &**game;
            let exact = exact_game_solve(game, CAP).unwrap();
            match mwu(game, eps).and_then(|r| evaluate_against(game, &exact, &r.x_hat, &r.y_hat, 1e-9)) {
                Ok(rep) => {
                    r1 = r1.max(rep.ratio1);
                    r2 = r2.max(rep.ratio2);
                }
                Err(e) => failures.push(format!("hspe#{k} eps={eps}: {e}")),
            }
        }
    }
    if r2 > 1.25 {
        failures.push(format!("hspe ratio2 {r2} > 1.25"));
    }
    worst.push(format!("hspe max ratio1 = {r1:.4}, max ratio2 = {r2:.4} (<= 1.25)"));
    let detail = if failures.is_empty() {
        worst.join("; ")
    } else {
        format!("{}; first failure: {}", worst.join("; "), failures[0])
    };
    outcome(failures.is_empty(), detail)
}

/// `n(1 − ln δ / ln(1+η))` from the formulas, independent of the solver.
fn round_bound(n: usize, eps: f64, alpha: f64) -> f64 {
    let eta = ((1.0 + eps).sqrt() - 1.0) / 2.0;
    let ln_delta = -(1.0 + alpha / eta) * (n as f64).ln();
    n as f64 * (1.0 - ln_delta / (1.0 + eta).ln())
}

fn mwu_iteration_bound(corpus: &Corpus) -> Outcome {
    let mut runs = 0;
    let mut bad = Vec::new();
    let mut max_fraction: f64 = 0.0;
    let all = corpus.guaranteed().into_iter().chain([("hspe", &corpus.hspes[..])]);
    for (family, games) in all {
        for game in games {
            for eps in EPSILONS {
                let r = mwu(&**game, eps).unwrap();
                let bound = round_bound(game.n(), eps, game.alpha());
                runs += 1;
                max_fraction = max_fraction.max(r.iterations as f64 / bound);
                if r.iterations as f64 > bound || r.iterations > r.iteration_bound {
                    bad.push(format!("{family} n={} eps={eps}: T={} > {bound}", game.n(), r.iterations));
                }
            }
        }
    }
    let six = corpus.boxes.iter().find(|g| g.n() == 6).unwrap();
    let r = mwu(&**six, 0.1).unwrap();
    let bound = round_bound(6, 0.1, 1.0);
    let six_ok = r.iterations > 0 && r.iterations as f64 <= bound;
    outcome(
        bad.is_empty() && six_ok,
        format!(
            "T <= bound on {runs} runs (max T/bound {max_fraction:.3}){}; eps=0.1 n=6: 0 < T={} <= {bound:.1}",
            bad.first().map(|b| format!(", violated: {b}")).unwrap_or_default(),
            r.iterations
        ),
    )
}

fn ellipsoid_guarantees(corpus: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let (mut m1, mut m2, mut m3) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (family, games) in [("matrix", &corpus.matrices), ("box", &corpus.boxes)] {
        for (k, game) in games.iter().enumerate() {
            let game: &dyn Game = &**game;
            let (mu, alpha) = (game.mu(), game.alpha());
            let gamma = 1e-4 * mu;
            let exact = exact_game_solve(game, CAP).unwrap();
            let run = EllipsoidConfig::for_game(game, gamma)
                .and_then(|cfg| solve_ellipsoid(game, &cfg))
                .and_then(|r| {
                    let rep = evaluate_against(game, &exact, &r.x_hat, &r.y_hat, 1e-9)?;
                    Ok((r, rep))
                });
            let (r, rep) = match run {
                Ok(v) => v,
                Err(e) => {
                    failures.push(format!("{family}#{k}: {e}"));
                    continue;
                }
            };
            let v_star = exact.value();
            // each margin is (required − achieved) / μ; ≤ 0 passes
            let e1 = (v_star - gamma - 1e-6 * mu - r.v_final) / mu;
            let e2 = (r.v_final / alpha - 1e-4 * mu - rep.player1_worst) / mu;
            let e3 = (rep.player2_worst - alpha * v_star - 1e-4 * mu) / mu;
            m1 = m1.max(e1);
            m2 = m2.max(e2);
            m3 = m3.max(e3);
            if e1 > 0.0 || e2 > 0.0 || e3 > 0.0 {
                failures.push(format!(
                    "{family}#{k}: V*={v_star} v_f={} p1={} p2={}",
                    r.v_final, rep.player1_worst, rep.player2_worst
                ));
            }
            if !r.trace_is_monotone() {
                failures.push(format!("{family}#{k}: grid search trace is not monotone"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "worst margins over mu (<= 0 passes): v_f {m1:+.2e}, player I {m2:+.2e}, player II {m3:+.2e}{}",
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

/// Independent 0/1 knapsack optimum over integer costs.
fn knapsack_dp(weights: &[f64], costs: &[f64], budget: f64) -> f64 {
    let cap = budget as usize;
    let mut best = vec![0.0f64; cap + 1];
    for (w, c) in weights.iter().zip(costs) {
        let c = *c as usize;
        for b in (c..=cap).rev() {
            best[b] = best[b].max(best[b - c] + w);
        }
    }
    best[cap]
}

fn oracles(_: &Corpus) -> Outcome {
    let mut rng = common::rng(5);
    let mut notes = Vec::new();
    let mut failures = Vec::new();

    let mut box_gap: f64 = 0.0;
    for n in 1..=8 {
        for _ in 0..10 {
            let game = common::box_game(&mut rng, n);
            let explicit =
                ExplicitGame::build(&game, game.enumerate_responses(CAP).unwrap()).unwrap();
            for _ in 0..10 {
                let x = common::distribution(&mut rng, n);
                let xs = MixedStrategy::from_dense(&x).unwrap();
                let got = best_response(&game, &xs).unwrap().payoff;
                let best = explicit.column_payoffs(&x).into_iter().fold(f64::INFINITY, f64::min);
                box_gap = box_gap.max((got - best).abs() / game.mu());
            }
        }
    }
    if box_gap > 1e-12 {
        failures.push(format!("box gap {box_gap}"));
    }
    notes.push(format!("box |oracle - brute|/mu <= {box_gap:.1e} (800 queries)"));

    let mut prec_ratio: f64 = 0.0;
    for k in 0..100 {
        let game = common::prec_game(&mut rng, 2 + k % 7);
        let x = MixedStrategy::from_dense(&common::distribution(&mut rng, game.n())).unwrap();
        let got = best_response(&game, &x).unwrap().payoff;
        let best = brute_force_best_response(&game, &x, CAP).unwrap().payoff;
        prec_ratio = prec_ratio.max(got / best);
    }
    if prec_ratio > 2.0 + 1e-9 {
        failures.push(format!("prec ratio {prec_ratio}"));
    }
    notes.push(format!("prec max ratio {prec_ratio:.4} <= 2 (100 DAGs)"));

    let mut exp_gap: f64 = 0.0;
    for k in 0..50 {
        let game = ExpGame::new(common::tree(&mut rng, 1 + k % 7));
        let x = MixedStrategy::from_dense(&common::distribution(&mut rng, game.n())).unwrap();
        let got = best_response(&game, &x).unwrap().payoff;
        let best = brute_force_best_response(&game, &x, CAP).unwrap().payoff;
        exp_gap = exp_gap.max((got - best).abs() / game.mu());
    }
    if exp_gap > 1e-12 {
        failures.push(format!("exp gap {exp_gap}"));
    }
    notes.push(format!("exp |oracle - brute|/mu <= {exp_gap:.1e} (50 trees)"));

    let mut worst_knap = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.gen_range(1..=30);
        let costs = common::int_costs(&mut rng, n, 1, 10);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let budget = rng.gen_range(1..=costs.iter().sum::<f64>() as u32) as f64;
        let opt = knapsack_dp(&weights, &costs, budget);
        for eps in [0.1, 0.5] {
            let s = knapsack_fptas(&weights, &costs, budget, eps).unwrap();
            let spent: f64 = s.iter().map(|&j| costs[j]).sum();
            let got: f64 = s.iter().map(|&j| weights[j]).sum();
            if spent > budget {
                failures.push(format!("knapsack over budget: {spent} > {budget}"));
            }
            if opt > 0.0 {
                let factor = got * (1.0 + eps) / opt;
                worst_knap = worst_knap.min(factor);
                if factor < 1.0 - 1e-12 {
                    failures.push(format!("knapsack eps={eps}: {got} < {opt}/(1+eps)"));
                }
            }
        }
    }
    notes.push(format!("knapsack min (1+eps) w(S)/OPT = {worst_knap:.4} >= 1 (200 instances)"));
    let detail = match failures.first() {
        Some(f) => format!("{}; first failure: {f}", notes.join("; ")),
        None => notes.join("; "),
    };
    outcome(failures.is_empty(), detail)
}

fn expr_reduction(_: &Corpus) -> Outcome {
    let mut rng = common::rng(6);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 0..50 {
        let game = ExprGame::new(common::tree(&mut rng, 1 + k % 7));
        let r = mwu(&game, 0.1).unwrap();
        match check_guarantees(&game, &r.x_hat, &r.y_hat, 1.0, 0.1, CAP) {
            Ok(rep) => worst = worst.max(rep.ratio1).max(rep.ratio2),
            Err(e) => failures.push(format!("tree#{k}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "max ratio to V* = {worst:.4} <= 1.1 over 50 trees{}",
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

fn og(args: &[&str], instance: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_og"))
        .args(args)
        .arg(instance)
        .output()
        .expect("og runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let without_time: Vec<&str> = text.lines().filter(|l| !l.contains("\"wall_time_ms\"")).collect();
    (out.status.code().unwrap_or(-1), without_time.join("\n"))
}

fn regret_wrapper(_: &Corpus) -> Outcome {
    let mut rng = common::rng(7);
    let dir = tempfile::tempdir().unwrap();
    let tree = common::tree(&mut rng, 4);
    let prec = common::prec_game(&mut rng, 5);
    let bases = [
        GameInstanceSpec::Box { costs: common::int_costs(&mut rng, 5, 1, 10) },
        GameInstanceSpec::Prec { costs: prec.costs().to_vec(), edges: prec.edges().to_vec() },
        GameInstanceSpec::ExpTree { root: tree.root(), edges: tree.edges().to_vec() },
        GameInstanceSpec::ExprTree { root: tree.root(), edges: tree.edges().to_vec() },
        GameInstanceSpec::Hspe {
            costs: vec![2.0, 3.0, 4.0, 1.0],
            capture: vec![0.5, 0.9, 0.3, 0.7],
            budget: 5.0,
            eps: None,
        },
        GameInstanceSpec::Matrix { rows: common::matrix_game(&mut rng, 6).rows().to_vec() },
    ];
    let runs: [&[&str]; 4] = [
        &["solve", "--algo", "mwu", "--eps", "0.1", "--verify"],
        &["solve", "--algo", "mwu", "--eps", "0.3", "--mode", "p2"],
        &["solve", "--algo", "ellipsoid", "--gamma", "1e-3"],
        &["solve", "--algo", "lp-exact"],
    ];
    let mut compared = 0;
    let mut failures = Vec::new();
    for (k, base) in bases.iter().enumerate() {
        let n = base.build().unwrap().n();
        let wrapped = GameInstanceSpec::Regret { weights: vec![1.0; n], base: Box::new(base.clone()) };
        let base_path = dir.path().join(format!("base{k}.json"));
        let wrapped_path = dir.path().join(format!("wrapped{k}.json"));
        std::fs::write(&base_path, base.to_json()).unwrap();
        std::fs::write(&wrapped_path, wrapped.to_json()).unwrap();
        for args in runs {
            let (code_a, a) = og(args, &base_path);
            let (code_b, b) = og(args, &wrapped_path);
            compared += 1;
            if code_a != code_b || a != b || a.is_empty() {
                failures.push(format!("instance {k} {args:?}: exit {code_a} vs {code_b}"));
            }
        }
    }

    let mut max_diff: f64 = 0.0;
    for _ in 0..20 {
        let hiders = rng.gen_range(1..=6);
        let tree = common::tree(&mut rng, hiders);
        let k: Vec<f64> = tree.hiders().iter().map(|&v| 1.0 / tree.depth(v)).collect();
        let wrapped = RegretGame::new(ExpGame::new(tree.clone()), k).unwrap();
        let native = ExprGame::new(tree);
        let responses = native.enumerate_responses(CAP).unwrap();
        let a = ExplicitGame::build(&wrapped, responses.clone()).unwrap();
        let b = ExplicitGame::build(&native, responses).unwrap();
        for (ra, rb) in a.matrix.iter().zip(&b.matrix) {
            for (x, y) in ra.iter().zip(rb) {
                max_diff = max_diff.max((x - y).abs());
            }
        }
    }
    if max_diff > 1e-12 {
        failures.push(format!("EXP regret matrix differs from EXPr by {max_diff}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "{compared} unit-weight report pairs byte-identical without timing; regret(EXP, 1/d) vs EXPr max |diff| = {max_diff:.1e} <= 1e-12 on 20 trees{}",
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

fn lp_self_consistency(_: &Corpus) -> Outcome {
    let mut rng = common::rng(8);
    let (mut gap, mut infeasible): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(1..=12);
        let a = common::matrix(&mut rng, n, m);
        let mu = a.iter().flatten().copied().fold(0.0, f64::max);
        let sol = solve_lp_exact(&a).unwrap();
        let x = sol.x_star.to_dense(n).unwrap();
        let y = sol.y_star.to_dense(m).unwrap();
        let primal = (0..m)
            .map(|j| (0..n).map(|i| x[i] * a[i][j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let dual = (0..n)
            .map(|i| (0..m).map(|j| a[i][j] * y[j]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let scale = if mu > 0.0 { mu } else { 1.0 };
        gap = gap
            .max((primal - dual).abs() / scale)
            .max((primal - sol.value).abs() / scale);
        for v in [&x, &y] {
            let sum: f64 = v.iter().sum();
            infeasible = infeasible.max((sum - 1.0).abs());
            for &w in v.iter() {
                infeasible = infeasible.max(-w);
            }
        }
    }
    outcome(
        gap <= 1e-8 && infeasible <= 1e-9,
        format!("max |primal - dual|/mu = {gap:.1e} <= 1e-8; max infeasibility {infeasible:.1e} <= 1e-9 (200 matrices)"),
    )
}
