use super::{ContactError, ContactTrace};

/// Maximum-likelihood exponential rate of the pooled inter-contact gaps
/// (end of one contact to start of the next, per user/cell pair).
pub fn estimate_lambda(trace: &ContactTrace) -> Result<f64, ContactError> {
    let mut by_pair: alloc::collections::BTreeMap<(usize, usize), alloc::vec::Vec<(f64, f64)>> =
        alloc::collections::BTreeMap::new();
    for (user, contacts) in trace.contacts_by_user().into_iter().enumerate() {
        for c in contacts {
            by_pair.entry((user, c.cell)).or_default().push((c.start, c.end));
        }
    }
    let (mut gaps, mut total) = (0usize, 0.0);
    for list in by_pair.values() {
        for w in list.windows(2) {
            gaps += 1;
            total += w[1].0 - w[0].1;
        }
    }
    if gaps == 0 {
        return Err(ContactError::Estimation("no user/cell pair has two contacts"));
    }
    if !(total > 0.0) {
        return Err(ContactError::Estimation("inter-contact gaps sum to zero"));
    }
    Ok(gaps as f64 / total)
}
