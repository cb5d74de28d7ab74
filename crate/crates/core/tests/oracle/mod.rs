//! Independent objective evaluation and exhaustive search, used as test oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softcache_core::catalog::{ContentCatalog, RelationCase, UtilityGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_catalog(k: usize, rng: &mut ChaCha8Rng) -> ContentCatalog {
    ContentCatalog::from_weights((0..k).map(|_| rng.gen_range(0.05..1.0)).collect()).unwrap()
}

pub fn random_graph(k: usize, prob: f64, case: RelationCase, rng: &mut ChaCha8Rng) -> UtilityGraph {
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.gen_bool(prob) {
                edges.push((i, j));
            }
        }
    }
    UtilityGraph::from_edges(k, edges, case, true).unwrap()
}

/// Dense 0/1 relation matrix with the diagonal set.
pub fn dense(u: &UtilityGraph) -> Vec<Vec<f64>> {
    let k = u.len();
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        m[i][i] = 1.0;
        for &j in u.row(i) {
            m[i][j] = 1.0;
        }
    }
    m
}

/// Direct evaluation of the three objectives, written independently of the library.
pub fn oracle_value(p: &[f64], rel: &[Vec<f64>], n: &[f64], a: f64, kind: Option<f64>) -> f64 {
    let k = p.len();
    (0..k)
        .map(|i| {
            let own = (-a * n[i]).exp();
            let others: f64 = (0..k).filter(|&j| j != i).map(|j| rel[i][j] * n[j]).sum();
            match kind {
                None => p[i] * (1.0 - own),
                Some(c) => p[i] * ((1.0 - own) + c * own * (1.0 - (-a * others).exp())),
            }
        })
        .sum()
}

/// Best objective over all integer placements with `0 <= n_i <= m` and `Σ n_i <= budget`.
pub fn brute_force(k: usize, m: usize, budget: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut n = vec![0usize; k];
    let mut best = f64::NEG_INFINITY;
    loop {
        if n.iter().sum::<usize>() <= budget {
            let x: Vec<f64> = n.iter().map(|&v| v as f64).collect();
            best = best.max(f(&x));
        }
        let mut d = 0;
        while d < k && n[d] == m {
            n[d] = 0;
            d += 1;
        }
        if d == k {
            return best;
        }
        n[d] += 1;
    }
}

pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, n: &[f64], h: f64) -> Vec<f64> {
    (0..n.len())
        .map(|m| {
            let mut up = n.to_vec();
            let mut down = n.to_vec();
            up[m] += h;
            down[m] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

pub fn max_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let scale = analytic.iter().fold(0.0f64, |s, g| s.max(g.abs())).max(1e-300);
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).abs() / scale)
        .fold(0.0, f64::max)
}
