//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oracle_games::games::{BoxGame, HspeGame, MatrixGame, PrecGame, TreeInstance};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int_costs(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi) as f64).collect()
}

/// Nonnegative `n × m` matrix; about one entry in five is zero. Integer
/// or real entries with equal odds.
pub fn matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    let integer = rng.gen_bool(0.5);
    (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        0.0
                    } else if integer {
                        rng.gen_range(1..=10) as f64
                    } else {
                        rng.gen_range(0.01..1.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// A matrix game with no all-zero column, size up to `max × max`.
pub fn matrix_game(rng: &mut ChaCha8Rng, max: usize) -> MatrixGame {
    loop {
        let n = rng.gen_range(1..=max);
        let m = rng.gen_range(1..=max);
        if let Ok(g) = MatrixGame::new(matrix(rng, n, m)) {
            return g;
        }
    }
}

pub fn box_game(rng: &mut ChaCha8Rng, n: usize) -> BoxGame {
    BoxGame::new(int_costs(rng, n, 1, 10)).unwrap()
}

/// Random DAG: a hidden topological order, each forward pair joined with
/// probability `p`.
pub fn dag_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((order[a], order[b]));
            }
        }
    }
    edges
}

pub fn prec_game(rng: &mut ChaCha8Rng, n: usize) -> PrecGame {
    let p = rng.gen_range(0.1..0.6);
    let edges = dag_edges(rng, n, p);
    PrecGame::new(int_costs(rng, n, 1, 10), edges).unwrap()
}

/// Random tree with `hiders` non-root vertices, shuffled labels and edge
/// order, integer or real edge costs.
pub fn tree(rng: &mut ChaCha8Rng, hiders: usize) -> TreeInstance {
    let vertices = hiders + 1;
    let mut label: Vec<usize> = (0..vertices).collect();
    label.shuffle(rng);
    let integer = rng.gen_bool(0.5);
    let mut edges: Vec<(usize, usize, f64)> = (1..vertices)
        .map(|v| {
            let parent = rng.gen_range(0..v);
            let cost = if integer {
                rng.gen_range(1..=5) as f64
            } else {
                rng.gen_range(0.1..3.0)
            };
            if rng.gen_bool(0.5) {
                (label[parent], label[v], cost)
            } else {
                (label[v], label[parent], cost)
            }
        })
        .collect();
    edges.shuffle(rng);
    TreeInstance::new(label[0], edges).unwrap()
}

pub fn hspe_game(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> HspeGame {
    loop {
        let costs = int_costs(rng, n, 1, 10);
        let capture: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..=1.0)).collect();
        let lo = costs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = costs.iter().sum::<f64>();
        let budget = rng.gen_range(lo..=lo.max(hi / 2.0)).round().max(lo);
        if let Ok(g) = HspeGame::new(costs, capture, budget, eps) {
            return g;
        }
    }
}

/// Random distribution over `n` rows; sometimes sparse, sometimes with
/// repeated weights to provoke ties.
pub fn distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = match rng.gen_range(0..4) {
        0 => (0..n).map(|_| rng.gen_range(1..=3) as f64).collect(),
        1 => (0..n)
            .map(|_| if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..1.0) })
            .collect(),
        _ => (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
    };
    if x.iter().all(|&v| v == 0.0) {
        x[rng.gen_range(0..n)] = 1.0;
    }
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}
