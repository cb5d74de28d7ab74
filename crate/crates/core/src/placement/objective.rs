use alloc::vec;
use alloc::vec::Vec;

use super::{AccessModel, PlacementError, PlacementVector};
use crate::catalog::{ContentCatalog, RelationCase, UtilityGraph};
use crate::math::exp;

/// Probability that none of `n_holders` caches is met before the deadline.
pub fn p_miss(n_holders: f64, model: &AccessModel) -> f64 {
    exp(-model.rate_ttl() * n_holders)
}

fn check_dims(catalog: &ContentCatalog, u: Option<&UtilityGraph>, n: &[f64]) -> Result<(), PlacementError> {
    if catalog.len() != n.len() {
        return Err(PlacementError::DimensionMismatch("placement length differs from K"));
    }
    if u.is_some_and(|u| u.len() != n.len()) {
        return Err(PlacementError::DimensionMismatch("relation graph size differs from K"));
    }
    Ok(())
}

fn require_binary(u: &UtilityGraph) -> Result<(), PlacementError> {
    match u.case() {
        RelationCase::Binary => Ok(()),
        RelationCase::Discounted(_) => Err(PlacementError::WrongCase("expected binary (Case 1) relations")),
    }
}

fn require_discounted(u: &UtilityGraph) -> Result<f64, PlacementError> {
    match u.case() {
        RelationCase::Discounted(c) => Ok(c),
        RelationCase::Binary => Err(PlacementError::WrongCase("expected discounted (Case 2) relations")),
    }
}

/// Hit ratio without soft hits: `Σ p_i (1 - e^{-λT N_i})`.
pub fn g_base(
    catalog: &ContentCatalog,
    placement: &PlacementVector,
    model: &AccessModel,
) -> Result<f64, PlacementError> {
    check_dims(catalog, None, placement.n())?;
    let a = model.rate_ttl();
    Ok(catalog
        .popularity()
        .iter()
        .zip(placement.n())
        .map(|(p, n)| p * (1.0 - exp(-a * n)))
        .sum())
}

/// Holders of `i` or anything related to it: `N_i + Σ_{j ∈ R_i} N_j`.
fn reachable_copies(u: &UtilityGraph, n: &[f64], i: usize) -> f64 {
    n[i] + u.row(i).iter().map(|&j| n[j]).sum::<f64>()
}

/// Hit ratio when any related content is an acceptable substitute.
pub fn g_sch1(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    placement: &PlacementVector,
    model: &AccessModel,
) -> Result<f64, PlacementError> {
    require_binary(u)?;
    check_dims(catalog, Some(u), placement.n())?;
    let a = model.rate_ttl();
    let n = placement.n();
    Ok((0..n.len())
        .map(|i| catalog.p(i) * (1.0 - exp(-a * reachable_copies(u, n, i))))
        .sum())
}

/// Expected utility when related contents are worth `c` and the user keeps
/// looking for the original until the deadline.
pub fn g_sch2(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    placement: &PlacementVector,
    model: &AccessModel,
) -> Result<f64, PlacementError> {
    let c = require_discounted(u)?;
    check_dims(catalog, Some(u), placement.n())?;
    let a = model.rate_ttl();
    let n = placement.n();
    Ok((0..n.len())
        .map(|i| {
            let own_miss = exp(-a * n[i]);
            let related: f64 = u.row(i).iter().map(|&j| n[j]).sum();
            catalog.p(i) * ((1.0 - own_miss) + c * own_miss * (1.0 - exp(-a * related)))
        })
        .sum())
}

pub fn gradient_base(catalog: &ContentCatalog, n: &[f64], model: &AccessModel) -> Result<Vec<f64>, PlacementError> {
    check_dims(catalog, None, n)?;
    let a = model.rate_ttl();
    Ok(catalog
        .popularity()
        .iter()
        .zip(n)
        .map(|(p, x)| a * p * exp(-a * x))
        .collect())
}

/// `∂g/∂N_m = λT Σ_i p_i u_im e^{-λT Σ_j N_j u_ij}`.
pub fn gradient_sch1(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    n: &[f64],
    model: &AccessModel,
) -> Result<Vec<f64>, PlacementError> {
    require_binary(u)?;
    check_dims(catalog, Some(u), n)?;
    let obj = RelationObjective::new(catalog.popularity(), u, model.rate_ttl(), 1.0);
    let mut g = vec![0.0; n.len()];
    obj.gradient(n, &mut g);
    Ok(g)
}

/// `∂g/∂N_m = λT [p_m (1-c) e^{-λT N_m} + c Σ_i p_i I_im e^{-λT Σ_j N_j I_ij}]`.
pub fn gradient_sch2(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    n: &[f64],
    model: &AccessModel,
) -> Result<Vec<f64>, PlacementError> {
    let c = require_discounted(u)?;
    check_dims(catalog, Some(u), n)?;
    let obj = RelationObjective::new(catalog.popularity(), u, model.rate_ttl(), c);
    let mut g = vec![0.0; n.len()];
    obj.gradient(n, &mut g);
    Ok(g)
}

/// Hessian of the Case 2 objective (dense, row-major `K x K`).
pub fn hessian_case2(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    n: &[f64],
    model: &AccessModel,
) -> Result<Vec<Vec<f64>>, PlacementError> {
    let c = require_discounted(u)?;
    check_dims(catalog, Some(u), n)?;
    Ok(hessian_from_parts(catalog.popularity(), u, n, model.rate_ttl(), c))
}

pub(crate) fn hessian_from_parts(p: &[f64], u: &UtilityGraph, n: &[f64], a: f64, c: f64) -> Vec<Vec<f64>> {
    let k = n.len();
    let a2 = a * a;
    let mut h = vec![vec![0.0; k]; k];
    for m in 0..k {
        h[m][m] -= a2 * p[m] * (1.0 - c) * exp(-a * n[m]);
    }
    for i in 0..k {
        let w = a2 * c * p[i] * exp(-a * reachable_copies(u, n, i));
        if w == 0.0 {
            continue;
        }
        let group = core::iter::once(i).chain(u.row(i).iter().copied());
        for m in group.clone() {
            for q in group.clone() {
                h[m][q] -= w;
            }
        }
    }
    h
}

/// Unified smooth form used by the solvers:
/// `Σ_i p_i [1 - (1-c) e^{-a N_i} - c e^{-a (N_i + Σ_{j∈R_i} N_j)}]`.
///
/// `c = 1` gives the Case 1 objective and an identity graph the baseline.
pub(crate) struct RelationObjective<'a> {
    p: &'a [f64],
    u: &'a UtilityGraph,
    a: f64,
    c: f64,
}

impl<'a> RelationObjective<'a> {
    pub(crate) fn new(p: &'a [f64], u: &'a UtilityGraph, a: f64, c: f64) -> Self {
        Self { p, u, a, c }
    }

    pub(crate) fn value(&self, n: &[f64]) -> f64 {
        let (a, c) = (self.a, self.c);
        (0..n.len())
            .map(|i| {
                let own = if c < 1.0 { (1.0 - c) * exp(-a * n[i]) } else { 0.0 };
                self.p[i] * (1.0 - own - c * exp(-a * reachable_copies(self.u, n, i)))
            })
            .sum()
    }

    pub(crate) fn gradient(&self, n: &[f64], out: &mut [f64]) {
        let (a, c) = (self.a, self.c);
        for (m, g) in out.iter_mut().enumerate() {
            *g = if c < 1.0 {
                a * self.p[m] * (1.0 - c) * exp(-a * n[m])
            } else {
                0.0
            };
        }
        for i in 0..n.len() {
            let w = a * c * self.p[i] * exp(-a * reachable_copies(self.u, n, i));
            out[i] += w;
            for &m in self.u.row(i) {
                out[m] += w;
            }
        }
    }
}
