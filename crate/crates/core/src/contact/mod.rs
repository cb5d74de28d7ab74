//! User/small-cell contact processes.
//!
//! A [`ContactTrace`] is a time-ordered list of enter/exit events between
//! users and cell coverage disks. Traces come from either the IID
//! exponential meeting model ([`exponential_trace`]) or a community-based
//! mobility generator ([`generate_tvcm_trace`]).

mod estimate;
mod exponential;
mod tvcm;

pub use estimate::estimate_lambda;
pub use exponential::{exponential_trace, exponential_trace_with_duration, DEFAULT_CONTACT_DURATION};
pub use tvcm::{
    generate_trajectories, generate_tvcm_trace, trace_from_trajectories, CellLayout, MobilityConfig, Point, Rect,
    Segment, Trajectory,
};

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContactError {
    #[error("invalid trace: {0}")]
    InvalidTrace(&'static str),
    #[error("configuration error: {0}")]
    Config(&'static str),
    #[error("estimation error: {0}")]
    Estimation(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContactKind {
    Enter,
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvent {
    /// Seconds since the start of the trace.
    pub time: f64,
    pub user: usize,
    pub cell: usize,
    pub kind: ContactKind,
}

impl ContactEvent {
    /// Trace order: time, then user, cell, and enters before exits.
    pub fn order(&self, other: &Self) -> core::cmp::Ordering {
        self.time
            .partial_cmp(&other.time)
            .unwrap()
            .then(self.user.cmp(&other.user))
            .then(self.cell.cmp(&other.cell))
            .then(self.kind.cmp(&other.kind))
    }
}

/// One continuous stay of a user inside a cell's coverage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub cell: usize,
    pub start: f64,
    pub end: f64,
}

/// Validated contact trace.
///
/// Events are sorted by `(time, user, cell, kind)` with enters before exits
/// at equal keys, every exit closes an earlier enter of the same pair, no
/// pair is entered twice without an exit in between, and all times lie in
/// `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactTrace {
    events: Vec<ContactEvent>,
    horizon: f64,
    users: usize,
    cells: usize,
}

impl ContactTrace {
    /// Validates events in their given order.
    pub fn new(events: Vec<ContactEvent>, horizon: f64, users: usize, cells: usize) -> Result<Self, ContactError> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(ContactError::InvalidTrace("horizon must be finite and nonnegative"));
        }
        if events.windows(2).any(|w| w[0].order(&w[1]).is_gt()) {
            return Err(ContactError::InvalidTrace("events are not sorted"));
        }
        let mut open = vec![false; users * cells];
        for e in &events {
            if e.user >= users || e.cell >= cells {
                return Err(ContactError::InvalidTrace("user or cell index out of range"));
            }
            if !(e.time >= 0.0 && e.time <= horizon) {
                return Err(ContactError::InvalidTrace("event time outside [0, horizon]"));
            }
            let slot = &mut open[e.user * cells + e.cell];
            match (e.kind, *slot) {
                (ContactKind::Enter, false) => *slot = true,
                (ContactKind::Exit, true) => *slot = false,
                (ContactKind::Enter, true) => return Err(ContactError::InvalidTrace("enter while already inside")),
                (ContactKind::Exit, false) => return Err(ContactError::InvalidTrace("exit without a matching enter")),
            }
        }
        if open.iter().any(|&o| o) {
            return Err(ContactError::InvalidTrace("contact left open at the horizon"));
        }
        Ok(Self {
            events,
            horizon,
            users,
            cells,
        })
    }

    /// Builds a trace from closed contacts per user, sorting the events.
    pub fn from_contacts(contacts: &[Vec<Contact>], horizon: f64, cells: usize) -> Result<Self, ContactError> {
        let mut events = Vec::with_capacity(2 * contacts.iter().map(Vec::len).sum::<usize>());
        for (user, list) in contacts.iter().enumerate() {
            for c in list {
                events.push(ContactEvent {
                    time: c.start,
                    user,
                    cell: c.cell,
                    kind: ContactKind::Enter,
                });
                events.push(ContactEvent {
                    time: c.end,
                    user,
                    cell: c.cell,
                    kind: ContactKind::Exit,
                });
            }
        }
        events.sort_by(ContactEvent::order);
        Self::new(events, horizon, contacts.len(), cells)
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Contacts of every user, sorted by start time (ties by cell).
    pub fn contacts_by_user(&self) -> Vec<Vec<Contact>> {
        let mut open = vec![f64::NAN; self.users * self.cells];
        let mut out = vec![Vec::new(); self.users];
        for e in &self.events {
            let slot = &mut open[e.user * self.cells + e.cell];
            match e.kind {
                ContactKind::Enter => *slot = e.time,
                ContactKind::Exit => out[e.user].push(Contact {
                    cell: e.cell,
                    start: *slot,
                    end: e.time,
                }),
            }
        }
        for list in &mut out {
            list.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap().then(a.cell.cmp(&b.cell)));
        }
        out
    }
}
