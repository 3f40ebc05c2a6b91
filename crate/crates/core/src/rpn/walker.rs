//! Level-by-level computation of the exact star complexity of every graph
//! reachable within a bounded number of operations.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use super::enumerate::{check_universe, mask_to_edgeset, star_masks, Cursor, EdgeMask, Machine, Sink, Unit};
use super::{EnumOptions, RpnError, RpnProgram, RpnSymbol};
use crate::automorphism::{canonical_certificate, isomorphism};
use crate::edgespace::{EdgeSet, GraphUniverse};

const UNITS_PER_BATCH: usize = 512;

fn split_len(s: usize) -> usize {
    (2 * s + 1).min(7)
}

#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub s_max: usize,
    /// Upper bound on the number of emitted programs; checked between batches.
    pub budget: Option<u64>,
    pub options: EnumOptions,
}

impl WalkConfig {
    pub fn new(s_max: usize) -> Self {
        WalkConfig {
            s_max,
            budget: None,
            options: EnumOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StarEntry {
    pub star: usize,
    pub witness: Option<RpnProgram>,
    /// Representative labeled graph: the value of the witness.
    pub graph: EdgeSet,
}

/// Isomorphism classes keyed by canonical certificate, each with its
/// minimal operation count.
#[derive(Debug, Clone)]
pub struct StarTable {
    pub n: usize,
    pub s_max: usize,
    pub entries: BTreeMap<Vec<u8>, StarEntry>,
    pub truncated: bool,
    /// Number of programs emitted.
    pub visited: u64,
    /// New classes found at each completed level.
    pub level_counts: Vec<usize>,
}

impl StarTable {
    pub fn star_of(&self, g: &EdgeSet) -> Option<usize> {
        self.entries.get(&canonical_certificate(g)).map(|e| e.star)
    }

    /// Classes grouped by their minimal operation count.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in self.entries.values() {
            *h.entry(e.star).or_default() += 1;
        }
        h
    }
}

struct UnitScan<'a> {
    previous: &'a HashSet<EdgeMask>,
    local: HashSet<EdgeMask>,
    fresh: Vec<(EdgeMask, Vec<RpnSymbol>)>,
    visited: u64,
}

impl Sink for UnitScan<'_> {
    fn leaf(&mut self, c: &Cursor) -> bool {
        self.visited += 1;
        let m = c.stack[0];
        if !self.previous.contains(&m) && self.local.insert(m) {
            self.fresh.push((m, c.syms.clone()));
        }
        true
    }
}

/// Exact star complexity for all graphs with at most `s_max` operations.
///
/// Work is split into prefix units that run in parallel and are merged in
/// enumeration order, so the table (witnesses included) does not depend on
/// the thread count. A budget cutoff applies only at batch boundaries.
pub fn walk_star_table(universe: &Arc<GraphUniverse>, config: &WalkConfig) -> Result<StarTable, RpnError> {
    check_universe(universe.n())?;
    let mut table = StarTable {
        n: universe.n(),
        s_max: config.s_max,
        entries: BTreeMap::new(),
        truncated: false,
        visited: 0,
        level_counts: Vec::new(),
    };
    let mut previous: HashSet<EdgeMask> = HashSet::new();
    'levels: for s in 0..=config.s_max {
        let machine = Machine::new(universe, s, config.options);
        let units = machine.split(split_len(s));
        let mut level: Vec<(EdgeMask, Vec<RpnSymbol>)> = Vec::new();
        let mut level_seen: HashSet<EdgeMask> = HashSet::new();
        let mut stop = false;
        for batch in units.chunks(UNITS_PER_BATCH) {
            if let Some(b) = config.budget {
                if table.visited >= b {
                    stop = true;
                    break;
                }
            }
            let results: Vec<UnitScan> = batch
                .par_iter()
                .map(|unit| {
                    let mut scan = UnitScan {
                        previous: &previous,
                        local: HashSet::new(),
                        fresh: Vec::new(),
                        visited: 0,
                    };
                    machine.run_unit(unit, &mut scan);
                    scan
                })
                .collect();
            for r in results {
                table.visited += r.visited;
                for (m, syms) in r.fresh {
                    if level_seen.insert(m) {
                        level.push((m, syms));
                    }
                }
            }
        }
        let certs: Vec<Vec<u8>> = level
            .par_iter()
            .map(|(m, _)| canonical_certificate(&mask_to_edgeset(universe, *m)))
            .collect();
        let mut new_classes = 0;
        for ((m, syms), cert) in level.iter().zip(certs) {
            if let std::collections::btree_map::Entry::Vacant(v) = table.entries.entry(cert) {
                v.insert(StarEntry {
                    star: s,
                    witness: Some(RpnProgram::new(syms.clone())),
                    graph: mask_to_edgeset(universe, *m),
                });
                new_classes += 1;
            }
        }
        previous.extend(level.iter().map(|(m, _)| *m));
        if stop {
            table.truncated = true;
            break 'levels;
        }
        table.level_counts.push(new_classes);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FindOutcome {
    Found { program: RpnProgram, ops: usize },
    NotFound,
    BudgetExceeded { visited: u64 },
}

struct Target {
    edges: u32,
    degrees: Vec<u32>,
    cert: Vec<u8>,
}

struct FindScan<'a> {
    universe: &'a Arc<GraphUniverse>,
    stars: &'a [EdgeMask],
    target: &'a Target,
    rejected: HashSet<EdgeMask>,
    hit: Option<Vec<RpnSymbol>>,
    visited: u64,
}

fn degree_profile(stars: &[EdgeMask], m: EdgeMask) -> Vec<u32> {
    let mut d: Vec<u32> = stars.iter().map(|s| (s & m).count_ones()).collect();
    d.sort_unstable();
    d
}

impl Sink for FindScan<'_> {
    fn leaf(&mut self, c: &Cursor) -> bool {
        self.visited += 1;
        let m = c.stack[0];
        if m.count_ones() != self.target.edges || self.rejected.contains(&m) {
            return true;
        }
        let ok = degree_profile(self.stars, m) == self.target.degrees
            && canonical_certificate(&mask_to_edgeset(self.universe, m)) == self.target.cert;
        if ok {
            self.hit = Some(c.syms.clone());
            return false;
        }
        self.rejected.insert(m);
        true
    }
}

/// Searches for a minimal program whose value is isomorphic to `target`,
/// trying `s = 0, 1, …, max_ops` in order. Deterministic: the first witness
/// in enumeration order at the smallest `s` is returned.
pub fn find_witness(
    target: &EdgeSet,
    max_ops: usize,
    budget: Option<u64>,
    options: EnumOptions,
) -> Result<FindOutcome, RpnError> {
    let universe = target.universe().clone();
    check_universe(universe.n())?;
    let stars = star_masks(&universe);
    let tm = super::enumerate::edgeset_to_mask(target);
    let t = Target {
        edges: tm.count_ones(),
        degrees: degree_profile(&stars, tm),
        cert: canonical_certificate(target),
    };
    let mut visited = 0u64;
    for s in 0..=max_ops {
        let machine = Machine::new(&universe, s, options);
        let units: Vec<Unit> = machine.split(split_len(s));
        for batch in units.chunks(UNITS_PER_BATCH) {
            if let Some(b) = budget {
                if visited >= b {
                    return Ok(FindOutcome::BudgetExceeded { visited });
                }
            }
            let results: Vec<(Option<Vec<RpnSymbol>>, u64)> = batch
                .par_iter()
                .map(|unit| {
                    let mut scan = FindScan {
                        universe: &universe,
                        stars: &stars,
                        target: &t,
                        rejected: HashSet::new(),
                        hit: None,
                        visited: 0,
                    };
                    machine.run_unit(unit, &mut scan);
                    (scan.hit, scan.visited)
                })
                .collect();
            for (hit, v) in results {
                visited += v;
                if let Some(syms) = hit {
                    // The hit matches up to isomorphism; relabel it so the
                    // witness denotes the target itself.
                    let found = RpnProgram::new(syms);
                    let value = found.eval(&universe)?;
                    let map = isomorphism(&value, target).expect("certificates matched");
                    return Ok(FindOutcome::Found {
                        program: found.relabeled(&map),
                        ops: s,
                    });
                }
            }
        }
    }
    Ok(FindOutcome::NotFound)
}
