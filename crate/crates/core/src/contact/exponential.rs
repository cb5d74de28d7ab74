use alloc::vec::Vec;

use rand::Rng as _;

use super::{Contact, ContactError, ContactTrace};
use crate::math::{ln, quantize_micros};

/// Length of a contact in [`exponential_trace`], in seconds. Downloads are
/// atomic at contact start, so only its positivity matters.
pub const DEFAULT_CONTACT_DURATION: f64 = 1e-3;

/// IID exponential meetings between every user and every cell.
///
/// Gaps between the end of one contact and the start of the next are
/// `Exp(lambda)` for each (user, cell) pair, so the residual time until the
/// next meeting from any instant outside a contact is `Exp(lambda)` as well.
pub fn exponential_trace(
    users: usize,
    cells: usize,
    lambda: f64,
    horizon: f64,
    seed: u64,
) -> Result<ContactTrace, ContactError> {
    exponential_trace_with_duration(users, cells, lambda, horizon, DEFAULT_CONTACT_DURATION, seed)
}

pub fn exponential_trace_with_duration(
    users: usize,
    cells: usize,
    lambda: f64,
    horizon: f64,
    duration: f64,
    seed: u64,
) -> Result<ContactTrace, ContactError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ContactError::Config("meeting rate must be positive"));
    }
    if !(duration > 0.0) {
        return Err(ContactError::Config("contact duration must be positive"));
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut per_user: Vec<Vec<Contact>> = Vec::with_capacity(users);
    for _ in 0..users {
        let mut contacts: Vec<Contact> = Vec::new();
        for cell in 0..cells {
            let mut t = 0.0;
            loop {
                let u: f64 = rng.gen();
                t += -ln(1.0 - u) / lambda;
                let start = quantize_micros(t);
                if start >= horizon {
                    break;
                }
                let end = quantize_micros((t + duration).min(horizon));
                if end <= start {
                    break;
                }
                match contacts.last_mut() {
                    // a gap shorter than the time resolution joins the two contacts
                    Some(prev) if prev.cell == cell && start <= prev.end => prev.end = end,
                    _ => contacts.push(Contact { cell, start, end }),
                }
                t = end;
            }
        }
        per_user.push(contacts);
    }
    ContactTrace::from_contacts(&per_user, horizon.max(0.0), cells)
}
