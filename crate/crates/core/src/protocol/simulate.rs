use alloc::vec;
use alloc::vec::Vec;

use super::{CacheAssignment, ProtocolError, RequestStream};
use crate::catalog::UtilityGraph;
use crate::contact::{Contact, ContactTrace};

/// How a waiting user treats related contents found in nearby caches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccessMode {
    /// Only the requested content counts.
    None,
    /// The first cached requested-or-related content ends the wait.
    Sch1,
    /// Keep waiting for the requested content; fall back to a related one
    /// (utility `c`) seen during the wait.
    Sch2(f64),
}

impl AccessMode {
    pub fn name(&self) -> &'static str {
        match self {
            AccessMode::None => "none",
            AccessMode::Sch1 => "sch1",
            AccessMode::Sch2(_) => "sch2",
        }
    }
}

/// Result of a single request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Served by the requested content, possibly with part of it fetched
    /// over the expensive link.
    Full {
        at: f64,
        expensive: f64,
    },
    /// Served by a related content.
    Soft {
        at: f64,
        content: usize,
        utility: f64,
    },
    Miss,
}

impl Outcome {
    pub fn utility(&self) -> f64 {
        match *self {
            Outcome::Full { .. } => 1.0,
            Outcome::Soft { utility, .. } => utility,
            Outcome::Miss => 0.0,
        }
    }

    pub fn expensive(&self) -> f64 {
        match *self {
            Outcome::Full { expensive, .. } => expensive,
            Outcome::Soft { .. } => 0.0,
            Outcome::Miss => 1.0,
        }
    }

    pub fn is_hit(&self) -> bool {
        !matches!(self, Outcome::Miss)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContentHits {
    pub requests: u64,
    pub full_hits: u64,
    pub soft_hits: u64,
}

/// Counters accumulated over a request stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HitStats {
    pub requests: u64,
    pub full_hits: u64,
    pub soft_hits: u64,
    pub misses: u64,
    pub utility: f64,
    pub expensive_accesses: f64,
    pub per_content: Vec<ContentHits>,
}

impl HitStats {
    pub fn new(contents: usize) -> Self {
        Self {
            per_content: vec![ContentHits::default(); contents],
            ..Self::default()
        }
    }

    pub fn record(&mut self, content: usize, outcome: &Outcome) {
        self.requests += 1;
        let slot = &mut self.per_content[content];
        slot.requests += 1;
        match outcome {
            Outcome::Full { .. } => {
                self.full_hits += 1;
                slot.full_hits += 1;
            }
            Outcome::Soft { .. } => {
                self.soft_hits += 1;
                slot.soft_hits += 1;
            }
            Outcome::Miss => self.misses += 1,
        }
        self.utility += outcome.utility();
        self.expensive_accesses += outcome.expensive();
    }

    /// Fraction of requests served locally, by the content or a related one.
    pub fn hit_ratio(&self) -> f64 {
        if self.requests == 0 {
            return 0.0;
        }
        (self.full_hits + self.soft_hits) as f64 / self.requests as f64
    }

    pub fn mean_utility(&self) -> f64 {
        if self.requests == 0 {
            return 0.0;
        }
        self.utility / self.requests as f64
    }
}

/// Per-user contacts with a running maximum of end times, so the contacts
/// overlapping a window can be found by binary search.
#[derive(Debug, Clone)]
pub struct ContactIndex {
    contacts: Vec<Vec<Contact>>,
    max_end: Vec<Vec<f64>>,
    cells: usize,
}

impl ContactIndex {
    pub fn new(trace: &ContactTrace) -> Self {
        let contacts = trace.contacts_by_user();
        let max_end = contacts
            .iter()
            .map(|list| {
                let mut m = f64::NEG_INFINITY;
                list.iter()
                    .map(|c| {
                        m = m.max(c.end);
                        m
                    })
                    .collect()
            })
            .collect();
        Self {
            contacts,
            max_end,
            cells: trace.cells(),
        }
    }

    pub fn users(&self) -> usize {
        self.contacts.len()
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Cells the user can reach during `[from, to]`, as `(time, cell)` pairs
    /// ordered by the first instant of access. A contact already in
    /// progress at `from` is reachable at `from`.
    pub fn window(&self, user: usize, from: f64, to: f64, out: &mut Vec<(f64, usize)>) {
        out.clear();
        let list = &self.contacts[user];
        let first = self.max_end[user].partition_point(|&e| e < from);
        for c in &list[first..] {
            if c.start > to {
                break;
            }
            if c.end >= from {
                out.push((c.start.max(from), c.cell));
            }
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    }
}

fn related_full_copy(assignment: &CacheAssignment, cell: usize, u: &UtilityGraph, content: usize) -> Option<usize> {
    u.row(content)
        .iter()
        .copied()
        .filter(|&j| j != content)
        .find(|&j| assignment.lookup(cell, j) == Some(1.0))
}

fn resolve(
    mode: AccessMode,
    content: usize,
    reachable: &[(f64, usize)],
    assignment: &CacheAssignment,
    u: &UtilityGraph,
) -> Outcome {
    let mut related: Option<(f64, usize)> = None;
    for &(at, cell) in reachable {
        if let Some(fraction) = assignment.lookup(cell, content) {
            return Outcome::Full {
                at,
                expensive: 1.0 - fraction,
            };
        }
        match mode {
            AccessMode::None => {}
            AccessMode::Sch1 => {
                if let Some(j) = related_full_copy(assignment, cell, u, content) {
                    return Outcome::Soft {
                        at,
                        content: j,
                        utility: 1.0,
                    };
                }
            }
            AccessMode::Sch2(_) => {
                if related.is_none() {
                    related = related_full_copy(assignment, cell, u, content).map(|j| (at, j));
                }
            }
        }
    }
    match (mode, related) {
        (AccessMode::Sch2(c), Some((at, j))) => Outcome::Soft {
            at,
            content: j,
            utility: c,
        },
        _ => Outcome::Miss,
    }
}

fn check_inputs(
    index: &ContactIndex,
    assignment: &CacheAssignment,
    requests: &RequestStream,
    u: &UtilityGraph,
    mode: AccessMode,
    ttl: f64,
) -> Result<(), ProtocolError> {
    if index.cells() != assignment.cell_count() {
        return Err(ProtocolError::InvalidParameter(
            "trace and assignment disagree on cell count",
        ));
    }
    if u.len() != assignment.content_count() {
        return Err(ProtocolError::InvalidParameter(
            "graph and assignment disagree on content count",
        ));
    }
    if requests
        .requests()
        .iter()
        .any(|r| r.user >= index.users() || r.content >= u.len())
    {
        return Err(ProtocolError::InvalidParameter(
            "request refers to an unknown user or content",
        ));
    }
    if !(ttl >= 0.0 && ttl.is_finite()) {
        return Err(ProtocolError::InvalidParameter("ttl must be finite and nonnegative"));
    }
    if let AccessMode::Sch2(c) = mode {
        if !(c > 0.0 && c < 1.0) {
            return Err(ProtocolError::InvalidParameter("discounted utility must lie in (0, 1)"));
        }
    }
    Ok(())
}

/// Outcome of every request, in stream order.
pub fn simulate_outcomes(
    index: &ContactIndex,
    assignment: &CacheAssignment,
    requests: &RequestStream,
    u: &UtilityGraph,
    mode: AccessMode,
    ttl: f64,
) -> Result<Vec<Outcome>, ProtocolError> {
    check_inputs(index, assignment, requests, u, mode, ttl)?;
    let mut buf = Vec::new();
    Ok(requests
        .requests()
        .iter()
        .map(|r| {
            index.window(r.user, r.time, r.time + ttl, &mut buf);
            resolve(mode, r.content, &buf, assignment, u)
        })
        .collect())
}

/// Replays the request stream over the trace and tallies hits.
pub fn simulate(
    trace: &ContactTrace,
    assignment: &CacheAssignment,
    requests: &RequestStream,
    u: &UtilityGraph,
    mode: AccessMode,
    ttl: f64,
) -> Result<HitStats, ProtocolError> {
    let index = ContactIndex::new(trace);
    let outcomes = simulate_outcomes(&index, assignment, requests, u, mode, ttl)?;
    Ok(tally(requests, &outcomes, u.len()))
}

pub(crate) fn tally(requests: &RequestStream, outcomes: &[Outcome], contents: usize) -> HitStats {
    let mut stats = HitStats::new(contents);
    for (r, o) in requests.requests().iter().zip(outcomes) {
        stats.record(r.content, o);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::RelationCase;
    use crate::protocol::{Request, StoredCopy};

    fn copy(content: usize) -> StoredCopy {
        StoredCopy { content, fraction: 1.0 }
    }

    fn setup() -> (ContactTrace, CacheAssignment, UtilityGraph) {
        // user 0 meets cell 0 at 10 and cell 1 at 20
        let trace = ContactTrace::from_contacts(
            &[vec![
                Contact {
                    cell: 0,
                    start: 10.0,
                    end: 11.0,
                },
                Contact {
                    cell: 1,
                    start: 20.0,
                    end: 21.0,
                },
            ]],
            100.0,
            2,
        )
        .unwrap();
        let a = CacheAssignment::new(vec![vec![copy(1)], vec![copy(0)]], 1, 3).unwrap();
        let u = UtilityGraph::from_edges(3, [(0, 1)], RelationCase::Binary, true).unwrap();
        (trace, a, u)
    }

    fn one(time: f64, content: usize) -> RequestStream {
        RequestStream::from_requests(vec![Request { time, user: 0, content }], 1.0, 0)
    }

    #[test]
    fn modes_on_a_tiny_trace() {
        let (trace, a, u) = setup();
        let idx = ContactIndex::new(&trace);
        let run = |t, i, mode, ttl| simulate_outcomes(&idx, &a, &one(t, i), &u, mode, ttl).unwrap()[0];

        assert_eq!(
            run(0.0, 0, AccessMode::None, 30.0),
            Outcome::Full {
                at: 20.0,
                expensive: 0.0
            }
        );
        assert_eq!(run(0.0, 0, AccessMode::None, 15.0), Outcome::Miss);
        assert_eq!(
            run(0.0, 0, AccessMode::Sch1, 30.0),
            Outcome::Soft {
                at: 10.0,
                content: 1,
                utility: 1.0
            }
        );
        assert_eq!(
            run(0.0, 0, AccessMode::Sch2(0.5), 30.0),
            Outcome::Full {
                at: 20.0,
                expensive: 0.0
            }
        );
        assert_eq!(
            run(0.0, 0, AccessMode::Sch2(0.5), 15.0),
            Outcome::Soft {
                at: 10.0,
                content: 1,
                utility: 0.5
            }
        );
        // in range at the request instant
        assert_eq!(
            run(10.5, 1, AccessMode::None, 0.0),
            Outcome::Full {
                at: 10.5,
                expensive: 0.0
            }
        );
        // content 2 has no relations and no copies
        assert_eq!(run(0.0, 2, AccessMode::Sch1, 50.0), Outcome::Miss);
    }

    #[test]
    fn partial_copies() {
        let (trace, _, u) = setup();
        let a = CacheAssignment::new(
            vec![
                vec![StoredCopy {
                    content: 1,
                    fraction: 0.25,
                }],
                vec![StoredCopy {
                    content: 0,
                    fraction: 0.5,
                }],
            ],
            1,
            3,
        )
        .unwrap();
        let idx = ContactIndex::new(&trace);
        let o = simulate_outcomes(&idx, &a, &one(0.0, 0), &u, AccessMode::Sch1, 30.0).unwrap()[0];
        // the partial related copy at cell 0 is ignored
        assert_eq!(
            o,
            Outcome::Full {
                at: 20.0,
                expensive: 0.5
            }
        );
    }

    #[test]
    fn empty_caches_all_miss() {
        let (trace, _, u) = setup();
        let a = CacheAssignment::empty(2, 1, 3);
        let reqs = RequestStream::from_requests(
            (0..30)
                .map(|k| Request {
                    time: k as f64,
                    user: 0,
                    content: k % 3,
                })
                .collect(),
            1.0,
            0,
        );
        let s = simulate(&trace, &a, &reqs, &u, AccessMode::Sch2(0.5), 50.0).unwrap();
        assert_eq!(
            (s.requests, s.misses, s.utility, s.expensive_accesses),
            (30, 30, 0.0, 30.0)
        );
    }

    #[test]
    fn sch1_prefers_requested_then_lowest_index() {
        let trace = ContactTrace::from_contacts(
            &[vec![Contact {
                cell: 0,
                start: 1.0,
                end: 2.0,
            }]],
            10.0,
            1,
        )
        .unwrap();
        let u = UtilityGraph::from_edges(4, [(0, 3), (0, 2)], RelationCase::Binary, true).unwrap();
        let idx = ContactIndex::new(&trace);
        let a = CacheAssignment::new(vec![vec![copy(3), copy(2)]], 2, 4).unwrap();
        let o = simulate_outcomes(&idx, &a, &one(0.0, 0), &u, AccessMode::Sch1, 5.0).unwrap()[0];
        assert_eq!(
            o,
            Outcome::Soft {
                at: 1.0,
                content: 2,
                utility: 1.0
            }
        );
        let a = CacheAssignment::new(vec![vec![copy(0), copy(2)]], 2, 4).unwrap();
        let o = simulate_outcomes(&idx, &a, &one(0.0, 0), &u, AccessMode::Sch1, 5.0).unwrap()[0];
        assert_eq!(
            o,
            Outcome::Full {
                at: 1.0,
                expensive: 0.0
            }
        );
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        let (trace, a, u) = setup();
        let bad = RequestStream::from_requests(
            vec![Request {
                time: 0.0,
                user: 3,
                content: 0,
            }],
            1.0,
            0,
        );
        assert!(simulate(&trace, &a, &bad, &u, AccessMode::None, 1.0).is_err());
        assert!(simulate(&trace, &a, &one(0.0, 0), &u, AccessMode::Sch2(1.5), 1.0).is_err());
    }
}
