//! Relative soft-hit gains from per-seed run records.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::{bail, Result};
use softcache_core::stats::{relative_gain, MeanSe};

use crate::formats::RunRecord;

/// `hit_sch1 / hit_none - 1` for one grid cell and placement policy.
#[derive(Debug, Clone, PartialEq)]
pub struct GainRow {
    pub keys: Vec<(String, String)>,
    pub policy: String,
    pub hit_none: MeanSe,
    pub hit_sch1: MeanSe,
    pub gain: f64,
    pub gain_se: f64,
}

#[derive(Default)]
struct Group {
    none: BTreeMap<u64, f64>,
    sch1: BTreeMap<u64, f64>,
}

/// Pairs `none` and `sch1` runs by grid cell, policy and seed.
///
/// Runs in other modes are ignored. Every group must hold both modes over
/// exactly the same seeds; anything else is an error. Rows keep the order in
/// which their groups first appear.
pub fn report_gains(runs: &[RunRecord]) -> Result<Vec<GainRow>> {
    let mut order: Vec<(Vec<(String, String)>, String)> = Vec::new();
    let mut groups: BTreeMap<(Vec<(String, String)>, String), Group> = BTreeMap::new();
    for r in runs {
        let slot = match r.mode.as_str() {
            "none" => 0,
            "sch1" => 1,
            _ => continue,
        };
        let key = (r.keys.clone(), r.policy.clone());
        let group = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            Group::default()
        });
        let map = if slot == 0 { &mut group.none } else { &mut group.sch1 };
        if map.insert(r.seed, r.hit_ratio()).is_some() {
            bail!("duplicate run for {} seed {} mode {}", describe(&key), r.seed, r.mode);
        }
    }
    if order.is_empty() {
        bail!("no none/sch1 runs to compare");
    }
    let mut rows = Vec::with_capacity(order.len());
    for key in order {
        let g = &groups[&key];
        if g.none.is_empty() || g.sch1.is_empty() {
            bail!("unmatched runs for {}: need both none and sch1", describe(&key));
        }
        if let Some(seed) = g.none.keys().find(|s| !g.sch1.contains_key(s)) {
            bail!("unmatched runs for {}: seed {seed} has no sch1 run", describe(&key));
        }
        if let Some(seed) = g.sch1.keys().find(|s| !g.none.contains_key(s)) {
            bail!("unmatched runs for {}: seed {seed} has no none run", describe(&key));
        }
        let none: Vec<f64> = g.none.values().copied().collect();
        let sch1: Vec<f64> = g.sch1.values().copied().collect();
        let hit_none = MeanSe::of(&none);
        let hit_sch1 = MeanSe::of(&sch1);
        let (gain, gain_se) = relative_gain(hit_sch1, hit_none);
        rows.push(GainRow {
            keys: key.0,
            policy: key.1,
            hit_none,
            hit_sch1,
            gain,
            gain_se,
        });
    }
    Ok(rows)
}

fn describe((keys, policy): &(Vec<(String, String)>, String)) -> String {
    let mut parts: Vec<String> = keys.iter().map(|(k, v)| format!("{k}={v}")).collect();
    parts.push(format!("policy={policy}"));
    parts.join(" ")
}

pub fn write_gains(w: impl Write, rows: &[GainRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = rows
        .first()
        .map_or(Vec::new(), |r| r.keys.iter().map(|(k, _)| k.clone()).collect());
    header.extend(
        [
            "policy",
            "seeds",
            "hit_none",
            "hit_none_se",
            "hit_sch1",
            "hit_sch1_se",
            "gain",
            "gain_se",
        ]
        .map(String::from),
    );
    out.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.keys.iter().map(|(_, v)| v.clone()).collect();
        rec.push(r.policy.clone());
        rec.push(r.hit_none.n.to_string());
        for x in [
            r.hit_none.mean,
            r.hit_none.se,
            r.hit_sch1.mean,
            r.hit_sch1.se,
            r.gain,
            r.gain_se,
        ] {
            rec.push(format!("{x:.6}"));
        }
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
