use alloc::vec;
use alloc::vec::Vec;

use super::objective::RelationObjective;
use super::{
    baseline, check_capacity, objective, project_capped_simplex, AccessModel, PlacementError, PlacementVector,
    SolveOptions, SolveReport,
};
use crate::catalog::{ContentCatalog, RelationCase, UtilityGraph};
use crate::math::sqrt;

/// Norm of the gradient mapping `P(N + ∇g) - N`, zero exactly at a KKT point.
pub(crate) fn projected_gradient_norm(n: &[f64], grad: &[f64], cap: f64, budget: f64) -> f64 {
    let y: Vec<f64> = n.iter().zip(grad).map(|(x, g)| x + g).collect();
    let p = project_capped_simplex(&y, cap, budget);
    sqrt(p.iter().zip(n).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Capacity multiplier implied by a gradient: the mean gradient over
/// unclipped coordinates when the budget binds, zero otherwise.
fn estimate_rho(n: &[f64], grad: &[f64], cap: f64, budget: f64) -> f64 {
    if n.iter().sum::<f64>() < budget * (1.0 - 1e-9) {
        return 0.0;
    }
    let tol = 1e-12 * cap.max(1.0);
    let (mut sum, mut count) = (0.0, 0usize);
    let (mut floor, mut ceil) = (0.0f64, f64::INFINITY);
    for (&x, &g) in n.iter().zip(grad) {
        if x <= tol {
            floor = floor.max(g);
        } else if x >= cap - tol {
            ceil = ceil.min(g);
        } else {
            sum += g;
            count += 1;
        }
    }
    if count > 0 {
        sum / count as f64
    } else if ceil.is_finite() {
        0.5 * (floor + ceil.max(floor))
    } else {
        floor
    }
}

struct Ascent {
    n: Vec<f64>,
    iterations: usize,
    converged: bool,
    pg_norm: f64,
}

/// Projected gradient ascent with Armijo backtracking along the projection
/// arc. Trial steps start from the Barzilai-Borwein estimate of the previous
/// iteration and are halved until sufficient increase holds.
fn ascend(obj: &RelationObjective<'_>, start: Vec<f64>, cap: f64, budget: f64, opts: &SolveOptions) -> Ascent {
    let k = start.len();
    let mut x = project_capped_simplex(&start, cap, budget);
    let mut fx = obj.value(&x);
    let mut gx = vec![0.0; k];
    obj.gradient(&x, &mut gx);
    let mut gy = vec![0.0; k];
    let mut step = 1.0;
    let mut pg = projected_gradient_norm(&x, &gx, cap, budget);

    for it in 0..opts.max_iterations {
        if pg <= opts.tolerance {
            return Ascent {
                n: x,
                iterations: it,
                converged: true,
                pg_norm: pg,
            };
        }
        let mut s = step;
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(&gx).map(|(a, g)| a + s * g).collect();
            let y = project_capped_simplex(&trial, cap, budget);
            let fy = obj.value(&y);
            let gain: f64 = gx.iter().zip(y.iter().zip(&x)).map(|(g, (a, b))| g * (a - b)).sum();
            if fy >= fx + opts.armijo * gain && gain > 0.0 {
                break Some((y, fy));
            }
            s *= 0.5;
            if s < 1e-30 {
                break None;
            }
        };
        let Some((y, fy)) = accepted else {
            // no ascent direction left at floating-point resolution
            return Ascent {
                n: x,
                iterations: it,
                converged: false,
                pg_norm: pg,
            };
        };
        obj.gradient(&y, &mut gy);
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..k {
            let d = y[i] - x[i];
            ss += d * d;
            sy -= d * (gy[i] - gx[i]);
        }
        step = if sy > 0.0 {
            (ss / sy).clamp(1e-12, 1e12)
        } else {
            (2.0 * s).min(1e12)
        };
        x = y;
        fx = fy;
        core::mem::swap(&mut gx, &mut gy);
        pg = projected_gradient_norm(&x, &gx, cap, budget);
    }
    let converged = pg <= opts.tolerance;
    Ascent {
        n: x,
        iterations: opts.max_iterations,
        converged,
        pg_norm: pg,
    }
}

fn solve_relation_aware(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    model: &AccessModel,
    cells: usize,
    capacity: usize,
    opts: &SolveOptions,
    c: f64,
) -> Result<(PlacementVector, Ascent), PlacementError> {
    check_capacity(catalog.len(), cells, capacity)?;
    if u.len() != catalog.len() {
        return Err(PlacementError::DimensionMismatch("relation graph size differs from K"));
    }
    let cap = cells as f64;
    let budget = (cells * capacity) as f64;
    // warm start from the relation-oblivious optimum
    let (start, _) = baseline::solve_baseline(catalog, model, cells, capacity)?;
    let obj = RelationObjective::new(catalog.popularity(), u, model.rate_ttl(), c);
    let result = ascend(&obj, start.into_inner(), cap, budget, opts);
    let placement = PlacementVector::new(result.n.clone(), cells, capacity)?;
    Ok((placement, result))
}

fn finish(
    placement: PlacementVector,
    ascent: Ascent,
    objective_value: f64,
    grad: Vec<f64>,
) -> (PlacementVector, SolveReport) {
    let cap = placement.cells() as f64;
    let budget = placement.budget();
    let rho = estimate_rho(placement.n(), &grad, cap, budget);
    let report = SolveReport {
        objective_value,
        iterations: ascent.iterations,
        kkt_residual: baseline::kkt_residual(&grad, placement.n(), cap, budget, rho),
        rho,
        projected_gradient_norm: ascent.pg_norm,
        converged: ascent.converged,
    };
    (placement, report)
}

/// Placement maximizing the Case 1 soft-hit ratio over feasible placements.
///
/// The problem is concave, so the projected-gradient fixed point reached here
/// is globally optimal up to the stopping tolerance. When the iteration cap is
/// hit the best iterate is returned with `converged = false`.
pub fn solve_u_aware_case1(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    model: &AccessModel,
    cells: usize,
    capacity: usize,
    opts: &SolveOptions,
) -> Result<(PlacementVector, SolveReport), PlacementError> {
    if u.case() != RelationCase::Binary {
        return Err(PlacementError::WrongCase("expected binary (Case 1) relations"));
    }
    let (placement, ascent) = solve_relation_aware(catalog, u, model, cells, capacity, opts, 1.0)?;
    let value = objective::g_sch1(catalog, u, &placement, model)?;
    let grad = objective::gradient_sch1(catalog, u, placement.n(), model)?;
    Ok(finish(placement, ascent, value, grad))
}

/// Placement maximizing the Case 2 expected utility over feasible placements.
pub fn solve_u_aware_case2(
    catalog: &ContentCatalog,
    u: &UtilityGraph,
    model: &AccessModel,
    cells: usize,
    capacity: usize,
    opts: &SolveOptions,
) -> Result<(PlacementVector, SolveReport), PlacementError> {
    let RelationCase::Discounted(c) = u.case() else {
        return Err(PlacementError::WrongCase("expected discounted (Case 2) relations"));
    };
    let (placement, ascent) = solve_relation_aware(catalog, u, model, cells, capacity, opts, c)?;
    let value = objective::g_sch2(catalog, u, &placement, model)?;
    let grad = objective::gradient_sch2(catalog, u, placement.n(), model)?;
    Ok(finish(placement, ascent, value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_random_u, make_zipf_catalog};
    use crate::placement::solve_baseline;

    fn model(a: f64) -> AccessModel {
        AccessModel::new(a, 1.0).unwrap()
    }

    #[test]
    fn identity_graph_reproduces_baseline() {
        let c = make_zipf_catalog(40, 1.2, 3).unwrap();
        let (_, base) = solve_baseline(&c, &model(0.6), 4, 3).unwrap();
        let u1 = UtilityGraph::empty(40, RelationCase::Binary);
        let (_, r1) = solve_u_aware_case1(&c, &u1, &model(0.6), 4, 3, &SolveOptions::default()).unwrap();
        let u2 = UtilityGraph::empty(40, RelationCase::Discounted(0.5));
        let (_, r2) = solve_u_aware_case2(&c, &u2, &model(0.6), 4, 3, &SolveOptions::default()).unwrap();
        assert!((r1.objective_value - base.objective_value).abs() < 1e-6);
        assert!((r2.objective_value - base.objective_value).abs() < 1e-6);
    }

    #[test]
    fn mutual_pair_objective_depends_on_total_only() {
        let c = ContentCatalog::from_weights(alloc::vec![0.8, 0.2]).unwrap();
        let u = UtilityGraph::complete(2, RelationCase::Binary);
        let (n, r) = solve_u_aware_case1(&c, &u, &model(0.9), 3, 1, &SolveOptions::default()).unwrap();
        assert!((n.total() - 3.0).abs() < 1e-9);
        assert!((r.objective_value - (1.0 - libm::exp(-0.9 * 3.0))).abs() < 1e-9);
    }

    #[test]
    fn relation_aware_solution_dominates_baseline() {
        let c = make_zipf_catalog(300, 1.0, 5).unwrap();
        let u = make_random_u(&c, 4.0, RelationCase::Binary, 6).unwrap();
        let m = model(0.2);
        let (base, _) = solve_baseline(&c, &m, 10, 4).unwrap();
        let (n, r) = solve_u_aware_case1(&c, &u, &m, 10, 4, &SolveOptions::default()).unwrap();
        let before = objective::g_sch1(&c, &u, &base, &m).unwrap();
        assert!(r.objective_value >= before - 1e-12);
        assert!(r.converged, "{r:?}");
        assert!(r.kkt_residual < 1e-4, "{r:?}");
        assert!((n.total() - 40.0).abs() < 1e-6);
    }

    #[test]
    fn wrong_case_is_rejected() {
        let c = make_zipf_catalog(5, 1.0, 5).unwrap();
        let u = UtilityGraph::empty(5, RelationCase::Discounted(0.5));
        assert!(solve_u_aware_case1(&c, &u, &model(1.0), 2, 1, &SolveOptions::default()).is_err());
        let u = UtilityGraph::empty(5, RelationCase::Binary);
        assert!(solve_u_aware_case2(&c, &u, &model(1.0), 2, 1, &SolveOptions::default()).is_err());
    }
}
