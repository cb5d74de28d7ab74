use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use super::{CatalogError, ContentCatalog};

/// How much a related content is worth to a user who asked for something else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelationCase {
    /// Any related content is as good as the requested one (utility 1).
    Binary,
    /// Related contents give a fixed utility `c` with `0 < c < 1`.
    Discounted(f64),
}

impl RelationCase {
    pub fn validate(self) -> Result<Self, CatalogError> {
        match self {
            RelationCase::Discounted(c) if !(c > 0.0 && c < 1.0) => {
                Err(CatalogError::InvalidParameter("soft-hit utility c must lie in (0, 1)"))
            }
            other => Ok(other),
        }
    }

    /// Utility of an off-diagonal relation.
    pub fn related_utility(self) -> f64 {
        match self {
            RelationCase::Binary => 1.0,
            RelationCase::Discounted(c) => c,
        }
    }
}

/// Sparse content-relation matrix `U`.
///
/// Row `i` lists the contents related to `i` (sorted, no duplicates, never
/// `i` itself). The diagonal `u_ii = 1` is implicit. Every stored relation
/// carries the utility given by the [`RelationCase`].
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityGraph {
    rows: Vec<Vec<usize>>,
    case: RelationCase,
}

impl UtilityGraph {
    /// Builds a graph from adjacency rows. Rows are sorted; self-loops,
    /// duplicates and out-of-range indices are rejected.
    pub fn new(mut rows: Vec<Vec<usize>>, case: RelationCase) -> Result<Self, CatalogError> {
        let case = case.validate()?;
        let k = rows.len();
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(CatalogError::InvalidParameter("duplicate entry in relation row"));
            }
            if row.iter().any(|&j| j == i || j >= k) {
                return Err(CatalogError::InvalidParameter("self-loop or out-of-range relation"));
            }
        }
        Ok(Self { rows, case })
    }

    /// The identity relation: no content has related contents.
    pub fn empty(k: usize, case: RelationCase) -> Self {
        Self {
            rows: vec![Vec::new(); k],
            case,
        }
    }

    pub fn complete(k: usize, case: RelationCase) -> Self {
        let rows = (0..k).map(|i| (0..k).filter(|&j| j != i).collect()).collect();
        Self { rows, case }
    }

    /// Builds a graph from directed `(i, j)` pairs meaning "j is related to i".
    /// Self pairs and repeats are dropped.
    pub fn from_edges(
        k: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        case: RelationCase,
        symmetric: bool,
    ) -> Result<Self, CatalogError> {
        let mut rows = vec![Vec::new(); k];
        for (i, j) in edges {
            if i >= k || j >= k {
                return Err(CatalogError::InvalidParameter("edge endpoint out of range"));
            }
            if i == j {
                continue;
            }
            rows[i].push(j);
            if symmetric {
                rows[j].push(i);
            }
        }
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
        }
        Self::new(rows, case)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn case(&self) -> RelationCase {
        self.case
    }

    /// Same relations, different utility model.
    pub fn with_case(&self, case: RelationCase) -> Result<Self, CatalogError> {
        Ok(Self {
            rows: self.rows.clone(),
            case: case.validate()?,
        })
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Related contents of `i`, excluding `i`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn is_related(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// `u_ij`, including the implicit unit diagonal.
    pub fn utility(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else if self.is_related(i, j) {
            self.case.related_utility()
        } else {
            0.0
        }
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// True when no content has any related content.
    pub fn is_identity(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|&j| self.is_related(j, i)))
    }

    /// Union of the graph with its transpose.
    pub fn symmetrized(&self) -> Self {
        let mut rows = self.rows.clone();
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                rows[j].push(i);
            }
        }
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
        }
        Self { rows, case: self.case }
    }

    /// Copy of the graph with `j` added to row `i`.
    pub fn with_relation(&self, i: usize, j: usize) -> Self {
        let mut g = self.clone();
        if i != j {
            if let Err(pos) = g.rows[i].binary_search(&j) {
                g.rows[i].insert(pos, j);
            }
        }
        g
    }

    /// Number of rows listing each content.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.len()];
        for row in &self.rows {
            for &j in row {
                deg[j] += 1;
            }
        }
        deg
    }
}

/// Degree statistics and connectivity of a relation graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub content_count: usize,
    /// `E[|R_i|]`, exactly `edge_count / K`.
    pub mean_row_degree: f64,
    pub min_row_degree: usize,
    pub max_row_degree: usize,
    /// Sizes of the connected components of the symmetrized graph, largest first.
    pub component_sizes: Vec<usize>,
}

/// Exact degree statistics and connected components of `u`.
pub fn graph_stats(u: &UtilityGraph) -> GraphStats {
    let k = u.len();
    let degrees = u.rows.iter().map(Vec::len);
    let comps = connected_components(u);
    let mut sizes = vec![0usize; comps.count];
    for &c in &comps.label {
        sizes[c] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    GraphStats {
        content_count: k,
        mean_row_degree: if k == 0 { 0.0 } else { u.edge_count() as f64 / k as f64 },
        min_row_degree: degrees.clone().min().unwrap_or(0),
        max_row_degree: degrees.max().unwrap_or(0),
        component_sizes: sizes,
    }
}

pub(crate) struct Components {
    /// Component label per node, labels numbered by first node in index order.
    pub label: Vec<usize>,
    pub count: usize,
}

/// Connected components treating every relation as undirected.
pub(crate) fn connected_components(u: &UtilityGraph) -> Components {
    let k = u.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, row) in u.rows.iter().enumerate() {
        for &j in row {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    let mut label = vec![usize::MAX; k];
    let mut count = 0;
    for i in 0..k {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = count;
            count += 1;
        }
        label[i] = label[root];
    }
    Components { label, count }
}

/// Random relation graph: each unordered pair is related with probability
/// `L / (K - 1)`, so a content has `L` related contents on average.
pub fn make_random_u(
    catalog: &ContentCatalog,
    mean_degree: f64,
    case: RelationCase,
    seed: u64,
) -> Result<UtilityGraph, CatalogError> {
    let k = catalog.len();
    let case = case.validate()?;
    let max = k.saturating_sub(1) as f64;
    if !(mean_degree >= 0.0 && mean_degree <= max) {
        return Err(CatalogError::InvalidParameter("mean degree L must lie in [0, K-1]"));
    }
    let prob = if k > 1 { (mean_degree / max).min(1.0) } else { 0.0 };
    let mut rng = crate::rng_from_seed(seed);
    let mut rows = vec![Vec::new(); k];
    for i in 0..k {
        for j in (i + 1)..k {
            if rng.gen::<f64>() < prob {
                rows[i].push(j);
                rows[j].push(i);
            }
        }
    }
    for row in &mut rows {
        row.sort_unstable();
    }
    Ok(UtilityGraph { rows, case })
}

/// Popularity-proportional relation graph: `j` enters row `i` with
/// probability `min(1, L' * p_j)`. The result is directed unless
/// `symmetrize` is set, in which case it is replaced by its union with the
/// transpose.
pub fn make_popularity_proportional_u(
    catalog: &ContentCatalog,
    l_prime: f64,
    case: RelationCase,
    seed: u64,
    symmetrize: bool,
) -> Result<UtilityGraph, CatalogError> {
    let case = case.validate()?;
    if !(l_prime > 0.0 && l_prime.is_finite()) {
        return Err(CatalogError::InvalidParameter("normalization L' must be positive"));
    }
    let k = catalog.len();
    let probs: Vec<f64> = catalog.popularity().iter().map(|p| (l_prime * p).min(1.0)).collect();
    let mut rng = crate::rng_from_seed(seed);
    let mut rows = vec![Vec::new(); k];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, &prob) in probs.iter().enumerate() {
            if j != i && rng.gen::<f64>() < prob {
                row.push(j);
            }
        }
    }
    let g = UtilityGraph { rows, case };
    Ok(if symmetrize { g.symmetrized() } else { g })
}

/// Normalization `L'` that gives popularity-proportional rows a mean
/// degree of `mean_degree`, i.e. solves `(K-1)/K * Σ_j min(1, L' p_j) = L`.
pub fn popularity_normalization(catalog: &ContentCatalog, mean_degree: f64) -> Result<f64, CatalogError> {
    let k = catalog.len();
    let max = k.saturating_sub(1) as f64;
    if !(mean_degree > 0.0 && mean_degree < max) {
        return Err(CatalogError::InvalidParameter("mean degree L must lie in (0, K-1)"));
    }
    let scale = max / k as f64;
    let degree = |l: f64| scale * catalog.popularity().iter().map(|p| (l * p).min(1.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, mean_degree / scale);
    while degree(hi) < mean_degree {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if degree(mid) < mean_degree {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_zipf_catalog;

    #[test]
    fn normalization_hits_the_target_degree() {
        let cat = make_zipf_catalog(1000, 2.0, 5).unwrap();
        for l in [1.0, 5.0, 10.0] {
            let lp = popularity_normalization(&cat, l).unwrap();
            let expected: f64 = 0.999 * cat.popularity().iter().map(|p| (lp * p).min(1.0)).sum::<f64>();
            assert!((expected - l).abs() < 1e-9, "{l}: {expected}");
            let mean = (0..20)
                .map(|s| {
                    let g = make_popularity_proportional_u(&cat, lp, RelationCase::Binary, s, false).unwrap();
                    graph_stats(&g).mean_row_degree
                })
                .sum::<f64>()
                / 20.0;
            assert!((mean - l).abs() < 0.1 * l, "{l}: {mean}");
        }
        // uniform popularity needs no capping: L' = L K / (K - 1)
        let lp = popularity_normalization(&uniform(11), 2.0).unwrap();
        assert!((lp - 2.2).abs() < 1e-9);
        assert!(popularity_normalization(&uniform(5), 4.0).is_err());
    }

    fn uniform(k: usize) -> ContentCatalog {
        ContentCatalog::from_weights(vec![1.0; k]).unwrap()
    }

    #[test]
    fn stats_of_empty_complete_and_star() {
        let s = graph_stats(&UtilityGraph::empty(3, RelationCase::Binary));
        assert_eq!(s.mean_row_degree, 0.0);
        assert_eq!(s.component_sizes, vec![1, 1, 1]);

        let s = graph_stats(&UtilityGraph::complete(4, RelationCase::Binary));
        assert_eq!(s.mean_row_degree, 3.0);
        assert_eq!(s.component_sizes, vec![4]);

        let star = UtilityGraph::from_edges(5, (1..5).map(|j| (0, j)), RelationCase::Binary, true).unwrap();
        let s = graph_stats(&star);
        assert_eq!(s.mean_row_degree, 8.0 / 5.0);
        assert_eq!((s.min_row_degree, s.max_row_degree), (1, 4));
        assert_eq!(s.component_sizes, vec![5]);
    }

    #[test]
    fn random_u_extremes() {
        let c = uniform(30);
        let g = make_random_u(&c, 0.0, RelationCase::Binary, 1).unwrap();
        assert!(g.is_identity());
        let g = make_random_u(&c, 29.0, RelationCase::Binary, 1).unwrap();
        assert_eq!(g, UtilityGraph::complete(30, RelationCase::Binary));
        assert!(make_random_u(&c, 29.5, RelationCase::Binary, 1).is_err());
        assert!(make_random_u(&c, -1.0, RelationCase::Binary, 1).is_err());
    }

    #[test]
    fn random_u_is_symmetric_and_deterministic() {
        let c = uniform(200);
        let a = make_random_u(&c, 4.0, RelationCase::Discounted(0.5), 9).unwrap();
        let b = make_random_u(&c, 4.0, RelationCase::Discounted(0.5), 9).unwrap();
        assert_eq!(a, b);
        assert!(a.is_symmetric());
        assert!(make_random_u(&c, 4.0, RelationCase::Discounted(1.0), 9).is_err());
    }

    #[test]
    fn popularity_proportional_tiny_normalization_is_empty() {
        let c = make_zipf_catalog(300, 2.0, 2).unwrap();
        let g = make_popularity_proportional_u(&c, 1e-12, RelationCase::Binary, 5, false).unwrap();
        assert!(g.is_identity());
        assert!(make_popularity_proportional_u(&c, 0.0, RelationCase::Binary, 5, false).is_err());
    }

    #[test]
    fn symmetrize_flag_yields_symmetric_graph() {
        let c = make_zipf_catalog(300, 1.0, 2).unwrap();
        let d = make_popularity_proportional_u(&c, 20.0, RelationCase::Binary, 5, false).unwrap();
        let s = make_popularity_proportional_u(&c, 20.0, RelationCase::Binary, 5, true).unwrap();
        assert!(!d.is_symmetric());
        assert!(s.is_symmetric());
        assert_eq!(s, d.symmetrized());
    }

    #[test]
    fn new_rejects_malformed_rows() {
        assert!(UtilityGraph::new(vec![vec![0]], RelationCase::Binary).is_err());
        assert!(UtilityGraph::new(vec![vec![1, 1], vec![]], RelationCase::Binary).is_err());
        assert!(UtilityGraph::new(vec![vec![2], vec![]], RelationCase::Binary).is_err());
        let g = UtilityGraph::new(vec![vec![2, 1], vec![], vec![]], RelationCase::Binary).unwrap();
        assert_eq!(g.row(0), &[1, 2]);
        assert_eq!(g.utility(0, 0), 1.0);
        assert_eq!(g.utility(1, 0), 0.0);
    }
}
