use alloc::vec::Vec;

/// Euclidean projection of `y` onto `{x : 0 <= x_i <= cap, Σ x_i <= budget}`.
///
/// When clipping to the box already satisfies the budget that is the answer;
/// otherwise the projection is `clamp(y - τ, 0, cap)` for the unique shift
/// `τ > 0` that exhausts the budget. `τ` is located by sweeping the sorted
/// breakpoints of the piecewise-linear map `τ ↦ Σ clamp(y_i - τ, 0, cap)`.
pub fn project_capped_simplex(y: &[f64], cap: f64, budget: f64) -> Vec<f64> {
    let clipped: Vec<f64> = y.iter().map(|&v| v.clamp(0.0, cap)).collect();
    let mut total: f64 = clipped.iter().sum();
    if total <= budget {
        return clipped;
    }
    if budget <= 0.0 {
        return alloc::vec![0.0; y.len()];
    }

    // (position, slope change)
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * y.len());
    let mut slope: i64 = 0;
    for &v in y {
        if v <= 0.0 {
            continue;
        }
        if v - cap <= 0.0 {
            slope -= 1;
        } else {
            events.push((v - cap, -1));
        }
        events.push((v, 1));
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut tau = 0.0;
    let mut shift = None;
    for &(pos, delta) in &events {
        let at_pos = total + slope as f64 * (pos - tau);
        if at_pos <= budget && slope < 0 {
            shift = Some(tau + (budget - total) / slope as f64);
            break;
        }
        total = at_pos;
        tau = pos;
        slope += delta;
    }
    let tau = shift.unwrap_or(tau);
    y.iter().map(|&v| (v - tau).clamp(0.0, cap)).collect()
}
