//! Community-based mobility (in the spirit of TVCM) with disk-shaped cells.
//!
//! Every user owns a home community. Time alternates between *home* epochs,
//! during which waypoints are drawn inside the home rectangle, and short
//! *roaming* epochs with waypoints anywhere in the area outside it. Epochs
//! only switch between legs, so part of every home epoch is spent travelling
//! back. Roaming epochs are exponential; each home epoch is exponential with
//! a mean chosen from the time actually spent inside the home rectangle so
//! far, which keeps the long-run share of time at home at `home_fraction`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use super::{Contact, ContactError, ContactTrace};
use crate::math::{ln, quantize_micros, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn dist(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        sqrt(dx * dx + dy * dy)
    }

    fn lerp(self, to: Point, s: f64) -> Point {
        Point::new(self.x + (to.x - self.x) * s, self.y + (to.y - self.y) * s)
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn sample(&self, rng: &mut crate::Rng) -> Point {
        Point::new(
            self.x0 + (self.x1 - self.x0) * rng.gen::<f64>(),
            self.y0 + (self.y1 - self.y0) * rng.gen::<f64>(),
        )
    }

    /// Parameter range `[s0, s1] ⊆ [0, 1]` of the segment `a → b` inside the
    /// rectangle (Liang–Barsky clipping).
    fn clip(&self, a: Point, b: Point) -> Option<(f64, f64)> {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for (p, q) in [
            (-dx, a.x - self.x0),
            (dx, self.x1 - a.x),
            (-dy, a.y - self.y0),
            (dy, self.y1 - a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    lo = lo.max(r);
                } else {
                    hi = hi.min(r);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Where cell centers go.
#[derive(Debug, Clone, PartialEq)]
pub enum CellLayout {
    /// Regular `⌈√M⌉`-column grid spanning the area corner to corner.
    Grid,
    /// Uniform rejection sampling with the non-overlap constraint.
    Random,
    Fixed(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityConfig {
    /// Side of the square area, meters.
    pub area: f64,
    pub communities: Vec<Rect>,
    /// Long-run share of time spent in home epochs, in `(0, 1)`.
    pub home_fraction: f64,
    /// Mean length of a roaming epoch, seconds.
    pub roaming_epoch_mean: f64,
    pub cells: usize,
    /// Coverage radius, meters.
    pub cell_range: f64,
    pub cell_layout: CellLayout,
    pub users: usize,
    /// Speed range, meters/second. `(0, 0)` keeps users at their start point.
    pub speed: (f64, f64),
    /// Pause range after each leg, seconds.
    pub pause: (f64, f64),
    pub horizon: f64,
    pub seed: u64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            area: 1000.0,
            communities: vec![
                Rect::new(50.0, 50.0, 350.0, 350.0),
                Rect::new(600.0, 100.0, 900.0, 400.0),
                Rect::new(300.0, 600.0, 600.0, 900.0),
            ],
            home_fraction: 0.6,
            roaming_epoch_mean: 1200.0,
            cells: 25,
            cell_range: 100.0,
            cell_layout: CellLayout::Grid,
            users: 60,
            speed: (1.0, 2.0),
            pause: (0.0, 60.0),
            horizon: 86_400.0,
            seed: 1,
        }
    }
}

impl MobilityConfig {
    fn validate(&self) -> Result<(), ContactError> {
        let bad = |msg| Err(ContactError::Config(msg));
        if !(self.area > 0.0) {
            return bad("area must be positive");
        }
        if self.communities.is_empty() {
            return bad("at least one community is required");
        }
        let whole = Rect::new(0.0, 0.0, self.area, self.area);
        for c in &self.communities {
            if !(c.x0 <= c.x1
                && c.y0 <= c.y1
                && whole.contains(Point::new(c.x0, c.y0))
                && whole.contains(Point::new(c.x1, c.y1)))
            {
                return bad("community rectangle must lie inside the area");
            }
            if c.area() >= whole.area() {
                return bad("a community must leave room for excursions");
            }
        }
        if !(self.home_fraction > 0.0 && self.home_fraction < 1.0) {
            return bad("home fraction must lie in (0, 1)");
        }
        if !(self.roaming_epoch_mean > 0.0) {
            return bad("roaming epoch mean must be positive");
        }
        if !(self.cell_range >= 0.0) {
            return bad("cell range must be nonnegative");
        }
        if !(0.0 <= self.speed.0 && self.speed.0 <= self.speed.1) {
            return bad("invalid speed range");
        }
        if self.speed.0 == 0.0 && self.speed.1 > 0.0 {
            return bad("speed range must exclude zero for moving users");
        }
        if !(0.0 <= self.pause.0 && self.pause.0 <= self.pause.1) {
            return bad("invalid pause range");
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return bad("horizon must be finite and nonnegative");
        }
        Ok(())
    }

    fn place_cells(&self, rng: &mut crate::Rng) -> Result<Vec<Point>, ContactError> {
        let min_gap = 2.0 * self.cell_range;
        let centers = match &self.cell_layout {
            CellLayout::Fixed(points) => {
                if points.len() != self.cells {
                    return Err(ContactError::Config("fixed layout must list one point per cell"));
                }
                points.clone()
            }
            CellLayout::Grid => {
                let mut cols = 1;
                while cols * cols < self.cells {
                    cols += 1;
                }
                let step = if cols > 1 { self.area / (cols - 1) as f64 } else { 0.0 };
                (0..self.cells)
                    .map(|i| {
                        if cols == 1 {
                            Point::new(self.area / 2.0, self.area / 2.0)
                        } else {
                            Point::new((i % cols) as f64 * step, (i / cols) as f64 * step)
                        }
                    })
                    .collect()
            }
            CellLayout::Random => {
                const MAX_ATTEMPTS: usize = 100_000;
                let whole = Rect::new(0.0, 0.0, self.area, self.area);
                let mut pts: Vec<Point> = Vec::with_capacity(self.cells);
                let mut attempts = 0;
                while pts.len() < self.cells {
                    attempts += 1;
                    if attempts > MAX_ATTEMPTS {
                        return Err(ContactError::Config("could not place non-overlapping cells"));
                    }
                    let p = whole.sample(rng);
                    if pts.iter().all(|q| q.dist(p) > min_gap) {
                        pts.push(p);
                    }
                }
                pts
            }
        };
        for (i, a) in centers.iter().enumerate() {
            if centers[i + 1..].iter().any(|b| a.dist(*b) <= min_gap) {
                return Err(ContactError::Config(
                    "cells overlap: centers closer than twice the range",
                ));
            }
        }
        Ok(centers)
    }
}

/// Straight-line motion (or a pause when `from == to`) over `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub from: Point,
    pub to: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub home: usize,
    pub segments: Vec<Segment>,
}

impl Trajectory {
    /// Share of `[0, horizon]` spent inside `rect`.
    pub fn time_fraction_in(&self, rect: &Rect, horizon: f64) -> f64 {
        if horizon <= 0.0 {
            return 0.0;
        }
        let inside: f64 = self
            .segments
            .iter()
            .filter_map(|s| rect.clip(s.from, s.to).map(|(a, b)| (b - a) * (s.t1 - s.t0)))
            .sum();
        inside / horizon
    }
}

/// Cell centers and user trajectories of a mobility configuration.
pub fn generate_trajectories(config: &MobilityConfig) -> Result<(Vec<Point>, Vec<Trajectory>), ContactError> {
    config.validate()?;
    let mut rng = crate::rng_from_seed(config.seed);
    let cells = config.place_cells(&mut rng)?;
    let whole = Rect::new(0.0, 0.0, config.area, config.area);
    let home_mean = config.roaming_epoch_mean * config.home_fraction / (1.0 - config.home_fraction);
    let exp_draw = |rng: &mut crate::Rng, mean: f64| -mean * ln(1.0 - rng.gen::<f64>());
    let moving = config.speed.1 > 0.0;

    let mut trajectories = Vec::with_capacity(config.users);
    for user in 0..config.users {
        let home_idx = user % config.communities.len();
        let home = config.communities[home_idx];
        let mut pos = home.sample(&mut rng);
        let mut segments = Vec::new();
        let mut t = 0.0;
        let mut at_home = true;
        let mut epoch_end = exp_draw(&mut rng, home_mean);
        let mut inside = 0.0;
        if !moving {
            if config.horizon > 0.0 {
                segments.push(Segment {
                    t0: 0.0,
                    t1: config.horizon,
                    from: pos,
                    to: pos,
                });
            }
            trajectories.push(Trajectory {
                home: home_idx,
                segments,
            });
            continue;
        }
        while t < config.horizon {
            while t >= epoch_end {
                at_home = !at_home;
                let mean = if at_home {
                    // home time H such that (inside + H) / (t + H + R) = h
                    let h = config.home_fraction;
                    let target = (h * (t + config.roaming_epoch_mean) - inside) / (1.0 - h);
                    target.clamp(0.1 * home_mean, 10.0 * home_mean)
                } else {
                    config.roaming_epoch_mean
                };
                epoch_end = t + exp_draw(&mut rng, mean);
            }
            let dest = if at_home {
                home.sample(&mut rng)
            } else {
                loop {
                    let p = whole.sample(&mut rng);
                    if !home.contains(p) {
                        break p;
                    }
                }
            };
            let speed = rng.gen_range(config.speed.0..=config.speed.1);
            let travel = pos.dist(dest) / speed;
            let t1 = (t + travel).min(config.horizon);
            let s = if travel > 0.0 { (t1 - t) / travel } else { 1.0 };
            let end = pos.lerp(dest, s);
            let seg = Segment {
                t0: t,
                t1,
                from: pos,
                to: end,
            };
            inside += home.clip(pos, end).map_or(0.0, |(a, b)| (b - a) * (t1 - t));
            segments.push(seg);
            t = t1;
            pos = end;
            if t >= config.horizon {
                break;
            }
            let pause = rng.gen_range(config.pause.0..=config.pause.1);
            let t1 = (t + pause).min(config.horizon);
            if t1 > t {
                if home.contains(pos) {
                    inside += t1 - t;
                }
                segments.push(Segment {
                    t0: t,
                    t1,
                    from: pos,
                    to: pos,
                });
            }
            t = t1;
        }
        trajectories.push(Trajectory {
            home: home_idx,
            segments,
        });
    }
    Ok((cells, trajectories))
}

/// Time interval `[a, b] ⊆ [t0, t1]` during which a segment is within
/// `range` of `center`.
fn disk_interval(seg: &Segment, center: Point, range: f64) -> Option<(f64, f64)> {
    let (dx, dy) = (seg.to.x - seg.from.x, seg.to.y - seg.from.y);
    let (fx, fy) = (seg.from.x - center.x, seg.from.y - center.y);
    let a = dx * dx + dy * dy;
    let c = fx * fx + fy * fy - range * range;
    let (s0, s1) = if a == 0.0 {
        if c > 0.0 {
            return None;
        }
        (0.0, 1.0)
    } else {
        let b = 2.0 * (fx * dx + fy * dy);
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let root = sqrt(disc);
        let (r0, r1) = ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a));
        let (s0, s1) = (r0.max(0.0), r1.min(1.0));
        if s0 > s1 {
            return None;
        }
        (s0, s1)
    };
    let span = seg.t1 - seg.t0;
    Some((seg.t0 + s0 * span, seg.t0 + s1 * span))
}

/// Enter/exit events of every user against every cell disk.
pub fn trace_from_trajectories(
    cells: &[Point],
    range: f64,
    trajectories: &[Trajectory],
    horizon: f64,
) -> Result<ContactTrace, ContactError> {
    const EPS: f64 = 1e-9;
    let mut per_user = Vec::with_capacity(trajectories.len());
    for traj in trajectories {
        let mut contacts = Vec::new();
        if range > 0.0 {
            let mut open: Vec<Option<f64>> = vec![None; cells.len()];
            for seg in &traj.segments {
                for (cell, &center) in cells.iter().enumerate() {
                    let hit = disk_interval(seg, center, range);
                    if let Some(start) = open[cell] {
                        if hit.is_none_or(|(a, _)| a > seg.t0 + EPS) {
                            contacts.push((cell, start, seg.t0));
                            open[cell] = None;
                        }
                    }
                    if let Some((a, b)) = hit {
                        if open[cell].is_none() {
                            open[cell] = Some(a);
                        }
                        if b < seg.t1 - EPS {
                            contacts.push((cell, open[cell].take().unwrap(), b));
                        }
                    }
                }
            }
            for (cell, slot) in open.iter().enumerate() {
                if let Some(start) = slot {
                    contacts.push((cell, *start, horizon));
                }
            }
        }
        let mut list: Vec<Contact> = contacts
            .into_iter()
            .map(|(cell, s, e)| Contact {
                cell,
                start: quantize_micros(s),
                end: quantize_micros(e),
            })
            .filter(|c| c.end > c.start)
            .collect();
        list.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap().then(a.cell.cmp(&b.cell)));
        per_user.push(list);
    }
    ContactTrace::from_contacts(&per_user, horizon, cells.len())
}

/// Synthetic mobility trace: users wander between their home community and
/// the rest of the area; a contact lasts while a user is within
/// `cell_range` of a cell center.
pub fn generate_tvcm_trace(config: &MobilityConfig) -> Result<ContactTrace, ContactError> {
    let (cells, trajectories) = generate_trajectories(config)?;
    trace_from_trajectories(&cells, config.cell_range, &trajectories, config.horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::ContactKind;

    #[test]
    fn zero_range_has_no_contacts() {
        let cfg = MobilityConfig {
            cell_range: 0.0,
            horizon: 3_600.0,
            users: 5,
            ..Default::default()
        };
        assert!(generate_tvcm_trace(&cfg).unwrap().is_empty());
    }

    #[test]
    fn static_user_inside_one_cell() {
        let cfg = MobilityConfig {
            communities: vec![Rect::new(500.0, 500.0, 501.0, 501.0)],
            cells: 1,
            cell_layout: CellLayout::Fixed(vec![Point::new(500.0, 500.0)]),
            users: 1,
            speed: (0.0, 0.0),
            horizon: 7_200.0,
            ..Default::default()
        };
        let t = generate_tvcm_trace(&cfg).unwrap();
        assert_eq!(t.events().len(), 2);
        assert_eq!((t.events()[0].time, t.events()[0].kind), (0.0, ContactKind::Enter));
        assert_eq!((t.events()[1].time, t.events()[1].kind), (7_200.0, ContactKind::Exit));
    }

    #[test]
    fn grid_cells_do_not_overlap() {
        let cfg = MobilityConfig::default();
        let (cells, _) = generate_trajectories(&MobilityConfig {
            users: 0,
            ..cfg.clone()
        })
        .unwrap();
        assert_eq!(cells.len(), 25);
        for (i, a) in cells.iter().enumerate() {
            for b in &cells[i + 1..] {
                assert!(a.dist(*b) > 2.0 * cfg.cell_range);
            }
        }
    }

    #[test]
    fn overcrowded_layouts_fail() {
        let cfg = MobilityConfig {
            cells: 60,
            cell_layout: CellLayout::Random,
            users: 0,
            ..Default::default()
        };
        assert!(matches!(generate_tvcm_trace(&cfg), Err(ContactError::Config(_))));
        let cfg = MobilityConfig {
            cells: 36,
            users: 0,
            ..Default::default()
        };
        assert!(matches!(generate_tvcm_trace(&cfg), Err(ContactError::Config(_))));
    }

    #[test]
    fn trajectories_are_continuous() {
        let cfg = MobilityConfig {
            users: 6,
            horizon: 20_000.0,
            ..Default::default()
        };
        let (_, trajs) = generate_trajectories(&cfg).unwrap();
        for tr in &trajs {
            assert_eq!(tr.segments[0].t0, 0.0);
            assert_eq!(tr.segments.last().unwrap().t1, cfg.horizon);
            for w in tr.segments.windows(2) {
                assert_eq!(w[0].t1, w[1].t0);
                assert_eq!(w[0].to, w[1].from);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = MobilityConfig {
            users: 4,
            horizon: 10_000.0,
            ..Default::default()
        };
        assert_eq!(generate_tvcm_trace(&cfg).unwrap(), generate_tvcm_trace(&cfg).unwrap());
    }
}
