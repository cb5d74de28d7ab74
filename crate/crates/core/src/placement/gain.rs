use alloc::vec::Vec;

use super::{AccessModel, PlacementError, Thresholds};
use crate::catalog::{ContentCatalog, RelationCase, UtilityGraph};
use crate::math::{exp, ln, powf};

/// Closed-form ratio of miss rates `(1 - g_base(N*)) / (1 - g_sch1(N*))`
/// under the water-filling placement `N*` with multiplier `rho`:
///
/// `K (λT/ρ)^(L_row - 1) / Σ_i p_i Π_{j: u_ij = 1} p_j^-1`
///
/// where `L_row` counts the nonzero entries of a row of `U` *including* the
/// diagonal. Requires every row to have the same number of relations and
/// every popularity to lie strictly between the water-filling thresholds
/// (no clipped copy counts); `cells` is needed for the upper threshold.
pub fn analytic_gain_case1(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    model: &AccessModel,
    cells: usize,
    rho: f64,
) -> Result<f64, PlacementError> {
    if u.case() != RelationCase::Binary {
        return Err(PlacementError::WrongCase("expected binary (Case 1) relations"));
    }
    if u.len() != catalog.len() {
        return Err(PlacementError::DimensionMismatch("relation graph size differs from K"));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(PlacementError::NotApplicable("multiplier must be positive"));
    }
    let degree = u.row(0).len();
    if u.rows().iter().any(|r| r.len() != degree) {
        return Err(PlacementError::NotApplicable("rows have unequal numbers of relations"));
    }
    if !Thresholds::new(rho, model, cells).all_interior(catalog.popularity()) {
        return Err(PlacementError::NotApplicable("some copy count is clipped at 0 or M"));
    }

    let ln_p: Vec<f64> = catalog.popularity().iter().map(|&p| ln(p)).collect();
    // ln(p_i Π_j p_j^-u_ij); the diagonal cancels p_i
    let terms: Vec<f64> = (0..u.len())
        .map(|i| -u.row(i).iter().map(|&j| ln_p[j]).sum::<f64>())
        .collect();
    let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_denominator = peak + ln(terms.iter().map(|t| exp(t - peak)).sum());
    let l_row = (degree + 1) as f64;
    let a = model.rate_ttl();
    Ok(exp(
        ln(catalog.len() as f64) + (l_row - 1.0) * (ln(a) - ln(rho)) - ln_denominator
    ))
}

/// Gain for uniform popularity: `(Kρ/λT)^-(L_row - 1)`.
pub fn uniform_popularity_gain(k: usize, model: &AccessModel, rho: f64, l_row: usize) -> f64 {
    let miss = k as f64 * rho / model.rate_ttl();
    powf(miss, -(l_row as f64 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::{g_base, g_sch1, solve_baseline};

    fn model(a: f64) -> AccessModel {
        AccessModel::new(a, 1.0).unwrap()
    }

    fn ring(k: usize) -> UtilityGraph {
        UtilityGraph::from_edges(k, (0..k).map(|i| (i, (i + 1) % k)), RelationCase::Binary, true).unwrap()
    }

    #[test]
    fn identity_graph_has_unit_gain() {
        let c = ContentCatalog::from_weights(alloc::vec![0.5, 0.3, 0.2]).unwrap();
        let (_, r) = solve_baseline(&c, &model(1.0), 3, 1).unwrap();
        let g = analytic_gain_case1(&c, &UtilityGraph::empty(3, RelationCase::Binary), &model(1.0), 3, r.rho).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_direct_ratio() {
        let c = ContentCatalog::from_weights(alloc::vec![0.5, 0.3, 0.2]).unwrap();
        let u = UtilityGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)], RelationCase::Binary, false).unwrap();
        let m = model(1.0);
        let (n, r) = solve_baseline(&c, &m, 3, 1).unwrap();
        let direct = (1.0 - g_base(&c, &n, &m).unwrap()) / (1.0 - g_sch1(&c, &u, &n, &m).unwrap());
        let closed = analytic_gain_case1(&c, &u, &m, 3, r.rho).unwrap();
        assert!((direct - closed).abs() < 1e-9 * direct, "{direct} vs {closed}");
    }

    #[test]
    fn uniform_corollary() {
        let k = 8;
        let c = ContentCatalog::from_weights(alloc::vec![1.0; k]).unwrap();
        let m = model(0.5);
        let (_, r) = solve_baseline(&c, &m, 4, 2).unwrap();
        let g = analytic_gain_case1(&c, &ring(k), &m, 4, r.rho).unwrap();
        let corollary = uniform_popularity_gain(k, &m, r.rho, 3);
        assert!((g - corollary).abs() < 1e-9 * g);
        assert!(g >= 1.0);
    }

    #[test]
    fn preconditions_are_enforced() {
        let c = ContentCatalog::from_weights(alloc::vec![0.5, 0.3, 0.2]).unwrap();
        let m = model(1.0);
        let uneven = UtilityGraph::from_edges(3, [(0, 1)], RelationCase::Binary, false).unwrap();
        assert!(matches!(
            analytic_gain_case1(&c, &uneven, &m, 3, 0.1),
            Err(PlacementError::NotApplicable(_))
        ));
        // ρ so large that the least popular content would get no copy
        assert!(analytic_gain_case1(&c, &ring(3), &m, 3, 0.3).is_err());
        assert!(analytic_gain_case1(&c, &ring(3), &m, 3, 0.0).is_err());
    }
}
