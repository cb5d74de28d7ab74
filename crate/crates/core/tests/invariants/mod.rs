//! Randomized invariants shared by the property tests and the acceptance run.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError};
use softcache_core::catalog::{
    ingest_related_graph, make_popularity_proportional_u, make_random_u, make_zipf_catalog, CatalogError, RelationCase,
    UtilityGraph,
};
use softcache_core::contact::exponential_trace;
use softcache_core::placement::{g_sch1, AccessModel, IntegerPlacement, PlacementVector};
use softcache_core::protocol::{
    assign_caches, simulate, simulate_outcomes, AccessMode, CacheAssignment, ContactIndex, Outcome, RequestStream,
};

pub type CaseResult = Result<(), TestCaseError>;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Largest gap between the empirical CDF of `samples` and `1 - e^{-rate t}`.
pub fn kolmogorov_distance(mut samples: Vec<f64>, rate: f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Feasible random copy counts for `k` contents on `m` cells of capacity `cap`.
fn copies_strategy(k: usize, m: usize, cap: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..=m, k).prop_map(move |raw| {
        let mut left = m * cap;
        raw.into_iter()
            .map(|c| {
                let c = c.min(left);
                left -= c;
                c
            })
            .collect()
    })
}

fn layout(
    k: std::ops::Range<usize>,
    m: std::ops::Range<usize>,
    cap: std::ops::Range<usize>,
) -> impl Strategy<Value = (usize, usize, usize, Vec<usize>)> {
    (k, m, cap).prop_flat_map(|(k, m, cap)| (Just(k), Just(m), Just(cap), copies_strategy(k, m, cap)))
}

struct Instance {
    u: UtilityGraph,
    index: ContactIndex,
    requests: RequestStream,
    assignment: CacheAssignment,
}

fn instance(k: usize, m: usize, cap: usize, copies: Vec<usize>, degree: f64, seed: u64) -> Instance {
    let cat = make_zipf_catalog(k, 1.0, seed).unwrap();
    let u = make_random_u(&cat, degree, RelationCase::Binary, seed ^ 1).unwrap();
    let trace = exponential_trace(4, m, 0.01, 5_000.0, seed ^ 2).unwrap();
    let requests = RequestStream::fixed_count(&cat, 4, 200, 5_000.0, 150.0, seed ^ 3).unwrap();
    let assignment = assign_caches(&IntegerPlacement::from_copies(copies, m, cap), seed ^ 4).unwrap();
    Instance {
        u,
        index: ContactIndex::new(&trace),
        requests,
        assignment,
    }
}

pub type ConservationCase = ((usize, usize, usize, Vec<usize>), f64, u64);

pub fn conservation_cases() -> impl Strategy<Value = ConservationCase> {
    (layout(5..30, 1..6, 1..4), 0.0f64..4.0, any::<u64>())
}

/// Every request ends in exactly one outcome, SCH1 never loses a hit that
/// mode none had, and SCH2 never pays more than mode none.
pub fn check_conservation(((k, m, cap, copies), degree, seed): ConservationCase) -> CaseResult {
    let inst = instance(k, m, cap, copies, degree, seed);
    let run = |mode| simulate_outcomes(&inst.index, &inst.assignment, &inst.requests, &inst.u, mode, 150.0).unwrap();
    let none = run(AccessMode::None);
    let sch1 = run(AccessMode::Sch1);
    let sch2 = run(AccessMode::Sch2(0.5));
    for ((a, b), c) in none.iter().zip(&sch1).zip(&sch2) {
        prop_assert!(!a.is_hit() || b.is_hit());
        prop_assert!(c.expensive() <= a.expensive());
        // SCH2 keeps looking for the original, so full hits coincide with mode none
        prop_assert_eq!(matches!(a, Outcome::Full { .. }), matches!(c, Outcome::Full { .. }));
    }
    for outcomes in [&none, &sch1, &sch2] {
        let full = outcomes.iter().filter(|o| matches!(o, Outcome::Full { .. })).count();
        let soft = outcomes.iter().filter(|o| matches!(o, Outcome::Soft { .. })).count();
        let miss = outcomes.iter().filter(|o| matches!(o, Outcome::Miss)).count();
        prop_assert_eq!(full + soft + miss, inst.requests.len());
    }
    Ok(())
}

pub type DeterminismCase = ((usize, usize, usize, Vec<usize>), u64, f64);

pub fn determinism_cases() -> impl Strategy<Value = DeterminismCase> {
    (layout(5..20, 1..5, 1..3), any::<u64>(), 0.05f64..0.95)
}

/// Same seeds give identical statistics; counts and utility add up.
pub fn check_determinism(((k, m, cap, copies), seed, c): DeterminismCase) -> CaseResult {
    let build = || {
        let cat = make_zipf_catalog(k, 1.5, seed).unwrap();
        let u = make_random_u(&cat, 2.0, RelationCase::Binary, seed).unwrap();
        let trace = exponential_trace(3, m, 0.02, 2_000.0, seed).unwrap();
        let requests = RequestStream::poisson(&cat, 3, 0.05, 2_000.0, 60.0, seed).unwrap();
        let a = assign_caches(&IntegerPlacement::from_copies(copies.clone(), m, cap), seed).unwrap();
        simulate(&trace, &a, &requests, &u, AccessMode::Sch2(c), 60.0).unwrap()
    };
    let (s1, s2) = (build(), build());
    prop_assert_eq!(&s1, &s2);
    prop_assert_eq!(s1.full_hits + s1.soft_hits + s1.misses, s1.requests);
    prop_assert!((s1.utility - (s1.full_hits as f64 + c * s1.soft_hits as f64)).abs() < 1e-9);
    let per: u64 = s1.per_content.iter().map(|h| h.requests).sum();
    prop_assert_eq!(per, s1.requests);
    Ok(())
}

pub type IngestCase = (Vec<(u8, u8)>, Vec<u32>);

pub fn ingest_cases() -> impl Strategy<Value = IngestCase> {
    (
        proptest::collection::vec((0u8..40, 0u8..40), 1..120),
        proptest::collection::vec(0u32..50, 40),
    )
}

/// Ingested graphs are symmetric, connected and normalized, or rejected as invalid.
pub fn check_ingest((edges, views): IngestCase) -> CaseResult {
    let edge_text: String = edges.iter().map(|(a, b)| format!("v{a} v{b}\n")).collect();
    let pop_text: String = views.iter().enumerate().map(|(i, v)| format!("v{i} {v}\n")).collect();
    match ingest_related_graph(&edge_text, &pop_text) {
        Ok(ds) => {
            prop_assert!(ds.graph.is_symmetric());
            let stats = softcache_core::catalog::graph_stats(&ds.graph);
            prop_assert_eq!(stats.component_sizes, vec![ds.catalog.len()]);
            prop_assert!((ds.catalog.popularity().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert_eq!(ds.ids.len(), ds.catalog.len());
        }
        Err(e) => prop_assert!(matches!(e, CatalogError::InvalidDataset(_)), "{e}"),
    }
    Ok(())
}

pub type GraphCase = (usize, f64, u64, bool);

pub fn graph_cases() -> impl Strategy<Value = GraphCase> {
    (1usize..200, 0.0f64..8.0, any::<u64>(), any::<bool>())
}

pub fn check_generated_graph((k, l, seed, sym): GraphCase) -> CaseResult {
    let cat = make_zipf_catalog(k, 2.0, seed).unwrap();
    let l = l.min((k - 1) as f64);
    let a = make_random_u(&cat, l, RelationCase::Binary, seed).unwrap();
    prop_assert_eq!(&a, &make_random_u(&cat, l, RelationCase::Binary, seed).unwrap());
    prop_assert!(a.is_symmetric());
    let b = make_popularity_proportional_u(&cat, l.max(0.1), RelationCase::Discounted(0.5), seed, sym).unwrap();
    for g in [&a, &b] {
        for (i, row) in g.rows().iter().enumerate() {
            prop_assert!(row.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(row.iter().all(|&j| j != i && j < k));
        }
    }
    if sym {
        prop_assert!(b.is_symmetric());
    }
    Ok(())
}

pub type RelationCaseInput = (usize, u64, (usize, usize), f64);

pub fn relation_cases() -> impl Strategy<Value = RelationCaseInput> {
    (2usize..30, any::<u64>(), (0usize..30, 0usize..30), 0.01f64..2.0)
}

pub fn check_added_relation((k, seed, (i, j), a): RelationCaseInput) -> CaseResult {
    let (i, j) = (i % k, j % k);
    prop_assume!(i != j);
    let cat = make_zipf_catalog(k, 1.0, seed).unwrap();
    let u = make_random_u(&cat, 1.0f64.min((k - 1) as f64), RelationCase::Binary, seed).unwrap();
    let n: Vec<f64> = (0..k).map(|x| ((x as u64 ^ seed) % 4) as f64).collect();
    let pv = PlacementVector::new(n, 3, k).unwrap();
    let model = AccessModel::new(a, 1.0).unwrap();
    let before = g_sch1(&cat, &u, &pv, &model).unwrap();
    let after = g_sch1(&cat, &u.with_relation(i, j), &pv, &model).unwrap();
    prop_assert!(after >= before - 1e-15);
    Ok(())
}

pub type FirstContactCase = (u64, usize);

pub fn first_contact_cases() -> impl Strategy<Value = FirstContactCase> {
    (any::<u64>(), 0usize..3)
}

/// Time to the first contact with any of N cells is exponential with rate Nλ
/// (Kolmogorov distance below 0.02 on 10^4 samples). Returns the distance.
pub fn first_contact_distance((seed, pick): FirstContactCase) -> f64 {
    use rand::{Rng, SeedableRng};
    let cells = [1usize, 5, 10][pick];
    let (users, lambda, horizon) = (100, 0.01, 40_000.0);
    let trace = exponential_trace(users, cells, lambda, horizon, seed).unwrap();
    let index = ContactIndex::new(&trace);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut window = Vec::new();
    let samples: Vec<f64> = (0..10_000)
        .map(|_| {
            let user = rng.gen_range(0..users);
            let t = rng.gen_range(0.0..horizon - 5_000.0);
            index.window(user, t, t + 5_000.0, &mut window);
            window.first().map_or(f64::INFINITY, |&(at, _)| at - t)
        })
        .collect();
    kolmogorov_distance(samples, lambda * cells as f64)
}

pub fn check_first_contact(case: FirstContactCase) -> CaseResult {
    let d = first_contact_distance(case);
    prop_assert!(d < 0.02, "N={}: {d}", [1, 5, 10][case.1]);
    Ok(())
}
