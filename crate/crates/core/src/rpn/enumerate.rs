//! Depth-first enumeration of stack programs with a fixed number of logic
//! operations.
//!
//! Labels are canonical: the first push is star 0, the second star 1, and
//! every later push is either a label already used or the next fresh one.
//! An optional rotation may follow each `&`, `|` or `d` that leaves at least
//! two entries on the stack.

use std::sync::Arc;

use super::{RpnError, RpnProgram, RpnSymbol};
use crate::edgespace::{EdgeSet, GraphUniverse};

/// Largest vertex count for the bit-mask search (`C(16,2) = 120` slots).
pub const MAX_SEARCH_N: usize = 16;

/// Edge set as a bit mask; bit `k` is edge slot `k`.
pub type EdgeMask = u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub allow_dup: bool,
    pub allow_rot: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            allow_dup: true,
            allow_rot: true,
        }
    }
}

impl EnumOptions {
    /// Tree-shaped formulas only: no duplication, no rotation.
    pub fn formula() -> Self {
        EnumOptions {
            allow_dup: false,
            allow_rot: false,
        }
    }
}

/// A program with its rotations removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Skeleton(pub Vec<RpnSymbol>);

impl Skeleton {
    pub fn of(symbols: &[RpnSymbol]) -> Self {
        Skeleton(symbols.iter().copied().filter(|s| *s != RpnSymbol::Rot).collect())
    }
}

pub(crate) fn check_universe(n: usize) -> Result<(), RpnError> {
    if n == 0 || n > MAX_SEARCH_N {
        return Err(RpnError::UnsupportedUniverse { n, max: MAX_SEARCH_N });
    }
    Ok(())
}

pub(crate) fn star_masks(universe: &GraphUniverse) -> Vec<EdgeMask> {
    let n = universe.n();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .fold(0u128, |m, j| m | 1u128 << universe.slot(i.min(j), i.max(j)))
        })
        .collect()
}

pub(crate) fn mask_to_edgeset(universe: &Arc<GraphUniverse>, mask: EdgeMask) -> EdgeSet {
    EdgeSet::from_words(universe, vec![mask as u64, (mask >> 64) as u64])
}

pub(crate) fn edgeset_to_mask(g: &EdgeSet) -> EdgeMask {
    g.words()
        .iter()
        .take(2)
        .enumerate()
        .fold(0u128, |m, (k, &w)| m | (w as u128) << (64 * k))
}

#[derive(Clone)]
pub(crate) struct Cursor {
    pub stack: Vec<EdgeMask>,
    pub syms: Vec<RpnSymbol>,
    pushes: u32,
    distinct: u32,
    incs: u32,
    ops: u32,
}

impl Cursor {
    pub fn new() -> Self {
        Cursor {
            stack: Vec::new(),
            syms: Vec::new(),
            pushes: 0,
            distinct: 0,
            incs: 0,
            ops: 0,
        }
    }
}

pub(crate) trait Sink {
    /// Called on each complete program; returns `false` to abort the walk.
    fn leaf(&mut self, c: &Cursor) -> bool;
    /// Returns `true` if the subtree below `c` is taken over by the sink.
    fn cut(&mut self, _c: &Cursor) -> bool {
        false
    }
}

pub(crate) struct Machine {
    n: u32,
    s: u32,
    stars: Vec<EdgeMask>,
    opts: EnumOptions,
}

impl Machine {
    pub fn new(universe: &GraphUniverse, s: usize, opts: EnumOptions) -> Self {
        Machine {
            n: universe.n() as u32,
            s: s as u32,
            stars: star_masks(universe),
            opts,
        }
    }

    pub fn run<S: Sink>(&self, c: &mut Cursor, sink: &mut S) -> bool {
        self.step(c, sink)
    }

    fn step<S: Sink>(&self, c: &mut Cursor, sink: &mut S) -> bool {
        if c.incs == self.s + 1 && c.ops == self.s {
            return sink.leaf(c);
        }
        if sink.cut(c) {
            return true;
        }
        let depth = c.stack.len();
        if c.incs < self.s + 1 {
            let labels = match c.pushes {
                0 => 0..=0,
                1 => 1..=1,
                _ => 0..=c.distinct,
            };
            for l in labels {
                if l >= self.n {
                    continue;
                }
                let saved = (c.pushes, c.distinct);
                c.stack.push(self.stars[l as usize]);
                c.syms.push(RpnSymbol::Push(l));
                c.pushes += 1;
                c.distinct = c.distinct.max(l + 1);
                c.incs += 1;
                let go = self.step(c, sink);
                c.incs -= 1;
                (c.pushes, c.distinct) = saved;
                c.syms.pop();
                c.stack.pop();
                if !go {
                    return false;
                }
            }
            if self.opts.allow_dup && depth >= 1 {
                c.stack.push(c.stack[depth - 1]);
                c.syms.push(RpnSymbol::Dup);
                c.incs += 1;
                let go = self.after_eligible(c, sink);
                c.incs -= 1;
                c.syms.pop();
                c.stack.pop();
                if !go {
                    return false;
                }
            }
        }
        if c.ops < self.s && depth >= 2 {
            let b = c.stack.pop().unwrap();
            let a = c.stack.pop().unwrap();
            for sym in [RpnSymbol::And, RpnSymbol::Or] {
                c.stack.push(if sym == RpnSymbol::And { a & b } else { a | b });
                c.syms.push(sym);
                c.ops += 1;
                let go = self.after_eligible(c, sink);
                c.ops -= 1;
                c.syms.pop();
                c.stack.pop();
                if !go {
                    c.stack.push(a);
                    c.stack.push(b);
                    return false;
                }
            }
            c.stack.push(a);
            c.stack.push(b);
        }
        true
    }

    fn after_eligible<S: Sink>(&self, c: &mut Cursor, sink: &mut S) -> bool {
        if !self.step(c, sink) {
            return false;
        }
        if self.opts.allow_rot && c.stack.len() >= 2 {
            let top = c.stack.pop().unwrap();
            c.stack.insert(0, top);
            c.syms.push(RpnSymbol::Rot);
            let go = self.step(c, sink);
            c.syms.pop();
            c.stack.remove(0);
            c.stack.push(top);
            return go;
        }
        true
    }
}

/// A slice of the enumeration: either a finished program or an open prefix
/// whose subtree is still to be walked.
pub(crate) enum Unit {
    Done(Vec<RpnSymbol>, EdgeMask),
    Open(Cursor),
}

struct Splitter {
    at: usize,
    units: Vec<Unit>,
}

impl Sink for Splitter {
    fn leaf(&mut self, c: &Cursor) -> bool {
        self.units.push(Unit::Done(c.syms.clone(), c.stack[0]));
        true
    }

    fn cut(&mut self, c: &Cursor) -> bool {
        if c.syms.len() >= self.at {
            self.units.push(Unit::Open(c.clone()));
            true
        } else {
            false
        }
    }
}

impl Machine {
    /// Work units in enumeration order, cut at prefix length `at`.
    pub fn split(&self, at: usize) -> Vec<Unit> {
        let mut sp = Splitter { at, units: Vec::new() };
        self.run(&mut Cursor::new(), &mut sp);
        sp.units
    }

    /// Runs every complete program below a unit.
    pub fn run_unit<S: Sink>(&self, unit: &Unit, sink: &mut S) -> bool {
        match unit {
            Unit::Done(syms, mask) => {
                let c = Cursor {
                    stack: vec![*mask],
                    syms: syms.clone(),
                    pushes: 0,
                    distinct: 0,
                    incs: self.s + 1,
                    ops: self.s,
                };
                sink.leaf(&c)
            }
            Unit::Open(c) => self.run(&mut c.clone(), sink),
        }
    }
}

struct FnSink<F>(F);

impl<F: FnMut(&[RpnSymbol], EdgeMask) -> bool> Sink for FnSink<F> {
    fn leaf(&mut self, c: &Cursor) -> bool {
        (self.0)(&c.syms, c.stack[0])
    }
}

/// Visits, in a fixed deterministic order, every canonical program with
/// exactly `s` logic operations, together with its value as an edge mask.
/// The visitor returns `false` to stop early.
pub fn enumerate_programs<F>(universe: &GraphUniverse, s: usize, opts: EnumOptions, visitor: F) -> Result<(), RpnError>
where
    F: FnMut(&[RpnSymbol], EdgeMask) -> bool,
{
    check_universe(universe.n())?;
    let m = Machine::new(universe, s, opts);
    m.run(&mut Cursor::new(), &mut FnSink(visitor));
    Ok(())
}

/// Collects all programs for `s` as [`RpnProgram`] values.
pub fn collect_programs(universe: &GraphUniverse, s: usize, opts: EnumOptions) -> Result<Vec<RpnProgram>, RpnError> {
    let mut out = Vec::new();
    enumerate_programs(universe, s, opts, |syms, _| {
        out.push(RpnProgram::new(syms.to_vec()));
        true
    })?;
    Ok(out)
}
