use alloc::vec;
use alloc::vec::Vec;

use super::simulate::tally;
use super::{assign_caches, simulate_outcomes, AccessMode, ContactIndex, HitStats, ProtocolError, RequestStream};
use crate::catalog::{ContentCatalog, RelationCase, UtilityGraph};
use crate::contact::ContactTrace;
use crate::placement::{
    integerize, solve_baseline, solve_u_aware_case1, solve_u_aware_case2, AccessModel, IntegerPlacement,
    PlacementVector, RoundingMode, SolveOptions, SolveReport,
};
use crate::stats::MeanSe;

/// Which optimizer produced the cache contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Policy {
    /// Water-filling placement ignoring relations.
    Base,
    /// Relation-aware placement for binary relations.
    Sch1,
    /// Relation-aware placement for discounted relations.
    Sch2,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Base, Policy::Sch1, Policy::Sch2];

    pub fn name(&self) -> &'static str {
        match self {
            Policy::Base => "base",
            Policy::Sch1 => "sch1",
            Policy::Sch2 => "sch2",
        }
    }

    /// Continuous placement for this policy, with the solver report.
    #[allow(clippy::too_many_arguments)]
    pub fn solve(
        &self,
        catalog: &ContentCatalog,
        u: &UtilityGraph,
        model: &AccessModel,
        cells: usize,
        capacity: usize,
        c: f64,
        opts: &SolveOptions,
    ) -> Result<(PlacementVector, SolveReport), ProtocolError> {
        Ok(match self {
            Policy::Base => solve_baseline(catalog, model, cells, capacity)?,
            Policy::Sch1 => solve_u_aware_case1(
                catalog,
                &u.with_case(RelationCase::Binary)?,
                model,
                cells,
                capacity,
                opts,
            )?,
            Policy::Sch2 => solve_u_aware_case2(
                catalog,
                &u.with_case(RelationCase::Discounted(c))?,
                model,
                cells,
                capacity,
                opts,
            )?,
        })
    }

    /// Continuous placement for this policy, rounded per `rounding`.
    #[allow(clippy::too_many_arguments)]
    pub fn place(
        &self,
        catalog: &ContentCatalog,
        u: &UtilityGraph,
        model: &AccessModel,
        cells: usize,
        capacity: usize,
        c: f64,
        rounding: RoundingMode,
        opts: &SolveOptions,
    ) -> Result<IntegerPlacement, ProtocolError> {
        let (placement, _) = self.solve(catalog, u, model, cells, capacity, c, opts)?;
        Ok(integerize(&placement, rounding))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub cells: usize,
    pub capacity: usize,
    pub ttl: f64,
    /// Utility of a related content in [`AccessMode::Sch2`] and [`Policy::Sch2`].
    pub c: f64,
    pub requests_per_seed: usize,
    pub seeds: Vec<u64>,
    pub policies: Vec<Policy>,
    pub modes: Vec<AccessMode>,
    pub rounding: RoundingMode,
    pub solve: SolveOptions,
}

impl CompareConfig {
    pub fn new(cells: usize, capacity: usize, ttl: f64, c: f64, requests_per_seed: usize, seeds: Vec<u64>) -> Self {
        Self {
            cells,
            capacity,
            ttl,
            c,
            requests_per_seed,
            seeds,
            policies: Policy::ALL.to_vec(),
            modes: vec![AccessMode::None, AccessMode::Sch1, AccessMode::Sch2(c)],
            rounding: RoundingMode::Round,
            solve: SolveOptions::default(),
        }
    }
}

/// One (policy, mode) cell of a comparison, summarized over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub policy: Policy,
    pub mode: AccessMode,
    pub hit_ratio: MeanSe,
    pub utility: MeanSe,
    pub expensive: MeanSe,
    /// Raw counters, in the order of [`CompareConfig::seeds`].
    pub per_seed: Vec<HitStats>,
}

impl ComparisonRow {
    pub fn from_runs(policy: Policy, mode: AccessMode, per_seed: Vec<HitStats>) -> Self {
        let per_request = |f: fn(&HitStats) -> f64| -> Vec<f64> { per_seed.iter().map(f).collect() };
        let hit_ratio = MeanSe::of(&per_request(HitStats::hit_ratio));
        let utility = MeanSe::of(&per_request(HitStats::mean_utility));
        let expensive = MeanSe::of(&per_request(|s| s.expensive_accesses / s.requests.max(1) as f64));
        Self {
            policy,
            mode,
            hit_ratio,
            utility,
            expensive,
            per_seed,
        }
    }
}

/// Simulates every configured mode under every configured placement policy.
///
/// Each seed drives its own request stream and cache assignment, shared by
/// all (policy, mode) pairs so that columns can be compared seed by seed.
/// Rows come out policy-major in the configured order.
pub fn compare_modes(
    trace: &ContactTrace,
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    model: &AccessModel,
    config: &CompareConfig,
) -> Result<Vec<ComparisonRow>, ProtocolError> {
    if config.seeds.is_empty() {
        return Err(ProtocolError::InvalidParameter("at least one seed is required"));
    }
    if u.len() != catalog.len() {
        return Err(ProtocolError::InvalidParameter("graph and catalog sizes differ"));
    }
    let index = ContactIndex::new(trace);
    let streams = config
        .seeds
        .iter()
        .map(|&seed| {
            RequestStream::fixed_count(
                catalog,
                trace.users(),
                config.requests_per_seed,
                trace.horizon(),
                config.ttl,
                seed,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for &policy in &config.policies {
        let placement = policy.place(
            catalog,
            u,
            model,
            config.cells,
            config.capacity,
            config.c,
            config.rounding,
            &config.solve,
        )?;
        let assignments = config
            .seeds
            .iter()
            .map(|&seed| assign_caches(&placement, seed))
            .collect::<Result<Vec<_>, _>>()?;
        for &mode in &config.modes {
            let mut per_seed = Vec::with_capacity(config.seeds.len());
            for (assignment, stream) in assignments.iter().zip(&streams) {
                let outcomes = simulate_outcomes(&index, assignment, stream, u, mode, config.ttl)?;
                per_seed.push(tally(stream, &outcomes, catalog.len()));
            }
            rows.push(ComparisonRow::from_runs(policy, mode, per_seed));
        }
    }
    Ok(rows)
}
