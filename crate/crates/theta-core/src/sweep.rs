//! Height-bounded enumeration of valid maps, parallel classification,
//! tally per portrait class, and hard failure on any theorem violation.

use crate::arith::{FactorBudget, Rat};
use crate::classify::{periodic_inventory, portrait_from_inventory, ClassifyError, PortraitClass};
use crate::dynamics::ThetaMap;
use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub max_height_d: u32,
    pub max_height_k: u32,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_height_d: 12,
            max_height_k: 8,
            jobs: 1,
            out: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub d: Rat,
    pub k: Rat,
    pub class: PortraitClass,
    pub count: usize,
    pub fixed: usize,
    pub two_cycle: bool,
    pub three_cycle: bool,
    pub ms: u64,
}

/// Result of classifying one map: a record, or a factorization budget
/// failure (recorded, not fatal).
#[derive(Clone, Debug)]
pub enum SweepOutcome {
    Classified(SweepRecord),
    Unresolved { d: Rat, k: Rat, reason: String },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepSummary {
    pub maps: usize,
    pub tally: BTreeMap<PortraitClass, usize>,
    pub unresolved: Vec<(Rat, Rat, String)>,
}

/// All reduced p/q with max(|p|, q) ≤ h, ascending by (height, numerator,
/// denominator).
pub fn rationals_up_to_height(h: u32) -> Vec<Rat> {
    let h = h as i64;
    let mut out = vec![Rat::zero()];
    for q in 1..=h {
        for p in -h..=h {
            if p != 0 && p.unsigned_abs().gcd(&(q as u64)) == 1 {
                out.push(Rat::new(BigInt::from(p), BigInt::from(q)));
            }
        }
    }
    out.sort_by(|a, b| {
        a.height()
            .cmp(&b.height())
            .then_with(|| a.cmp(b))
    });
    out
}

/// Reference inputs exercising every nonempty portrait shape; always
/// appended to a sweep regardless of its height bounds.
pub fn example_fixtures() -> Vec<ThetaMap> {
    [
        ("2", "7/5"),
        ("49/324", "-1/2"),
        ("-100/2187", "-1/3"),
        ("-3", "0"),
        ("-13417569/640747969", "1"),
        ("-1", "0"),
        ("-1031116321/672121026723", "1"),
    ]
    .iter()
    .map(|(d, k)| ThetaMap::new(d.parse().unwrap(), k.parse().unwrap()).unwrap())
    .collect()
}

/// Every valid (d, k) within the height bounds, each exactly once, in a
/// deterministic order, with the example fixtures appended (deduplicated).
pub fn enumerate_maps(cfg: &SweepConfig) -> Vec<ThetaMap> {
    let ds = rationals_up_to_height(cfg.max_height_d);
    let ks = rationals_up_to_height(cfg.max_height_k);
    let mut maps = Vec::new();
    let mut seen: HashSet<(Rat, Rat)> = HashSet::new();
    for d in &ds {
        if d.is_zero() {
            continue;
        }
        for k in &ks {
            if let Ok(m) = ThetaMap::new(d.clone(), k.clone()) {
                seen.insert((d.clone(), k.clone()));
                maps.push(m);
            }
        }
    }
    for m in example_fixtures() {
        if seen.insert((m.d().clone(), m.k().clone())) {
            maps.push(m);
        }
    }
    maps
}

/// Classifies one map into a sweep outcome. Budget exhaustion is recorded;
/// a theorem violation or unlisted portrait shape is escalated.
pub fn classify_map(map: &ThetaMap, budget: &FactorBudget) -> Result<SweepOutcome, ClassifyError> {
    let start = Instant::now();
    let inv = match periodic_inventory(map, budget) {
        Ok(inv) => inv,
        Err(ClassifyError::Budget(e)) => {
            return Ok(SweepOutcome::Unresolved {
                d: map.d().clone(),
                k: map.k().clone(),
                reason: e.to_string(),
            })
        }
        Err(e) => return Err(e),
    };
    let portrait = match portrait_from_inventory(map, &inv) {
        Ok(p) => p,
        Err(ClassifyError::Budget(e)) => {
            return Ok(SweepOutcome::Unresolved {
                d: map.d().clone(),
                k: map.k().clone(),
                reason: e.to_string(),
            })
        }
        Err(e) => return Err(e),
    };
    if portrait.class == PortraitClass::Unexpected {
        return Err(ClassifyError::TheoremViolation {
            d: map.d().clone(),
            k: map.k().clone(),
            detail: "portrait shape outside the catalogue".into(),
        });
    }
    Ok(SweepOutcome::Classified(SweepRecord {
        d: map.d().clone(),
        k: map.k().clone(),
        class: portrait.class,
        count: portrait.vertices.len(),
        fixed: inv.fixed.len(),
        two_cycle: inv.two_cycle.is_some(),
        three_cycle: inv.three_cycle.is_some(),
        ms: start.elapsed().as_millis() as u64,
    }))
}

/// Runs the full sweep: enumerate, classify in parallel, stream records to
/// the configured output (JSON lines), and tally. Aborts on the first
/// theorem violation; budget failures are collected as unresolved.
pub fn run_sweep(cfg: &SweepConfig, budget: &FactorBudget) -> Result<SweepSummary, ClassifyError> {
    let maps = enumerate_maps(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .expect("thread pool");
    let outcomes: Vec<Result<SweepOutcome, ClassifyError>> = pool.install(|| {
        maps.par_iter()
            .map(|m| classify_map(m, budget))
            .collect()
    });

    let mut writer: Option<Box<dyn Write>> = match &cfg.out {
        Some(path) => Some(Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).expect("sweep output file"),
        ))),
        None => None,
    };
    let mut summary = SweepSummary {
        maps: maps.len(),
        ..SweepSummary::default()
    };
    for outcome in outcomes {
        match outcome? {
            SweepOutcome::Classified(rec) => {
                *summary.tally.entry(rec.class).or_insert(0) += 1;
                if let Some(w) = writer.as_mut() {
                    serde_json::to_writer(&mut *w, &rec).expect("serialize record");
                    writeln!(w).expect("write record");
                }
            }
            SweepOutcome::Unresolved { d, k, reason } => {
                summary.unresolved.push((d, k, reason));
            }
        }
    }
    if let Some(w) = writer.as_mut() {
        w.flush().expect("flush sweep output");
    }
    Ok(summary)
}
