//! Gate-count reducing rewrites. Every pass preserves the denoted graph
//! exactly and never increases the gate count.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use super::netlist::{external_optimize, ExternalError, ExternalReport};
use super::{denoted_graph, gate_count, CircuitBuilder, CircuitDag, CircuitError, Gate, GateOp, Signal};
use crate::edgespace::{EdgeSet, GraphUniverse};
use crate::greedy::{baseline_cover, star_upper_greedy};

/// Rebuilds a working gate list (children may refer to later entries, and
/// entries may have a single child) into
/// topological order, dropping dead gates, duplicate children and
/// single-child gates.
fn rebuild(n: usize, gates: &[Gate], output: Signal) -> CircuitDag {
    let mut map: Vec<Option<Signal>> = vec![None; gates.len()];
    let mut b = CircuitBuilder::new(n);
    let root = match output {
        Signal::Gate(g) => g as usize,
        s => return b.finish(s).unwrap(),
    };
    let mut stack = vec![(root, false)];
    while let Some((k, expanded)) = stack.pop() {
        if map[k].is_some() {
            continue;
        }
        if !expanded {
            stack.push((k, true));
            for c in gates[k].children.iter().rev() {
                if let Signal::Gate(j) = *c {
                    if map[j as usize].is_none() {
                        stack.push((j as usize, false));
                    }
                }
            }
            continue;
        }
        let mut ch: Vec<Signal> = gates[k]
            .children
            .iter()
            .map(|c| match *c {
                Signal::Gate(j) => map[j as usize].expect("cycle in working circuit"),
                s => s,
            })
            .collect();
        ch.sort_unstable();
        ch.dedup();
        map[k] = Some(b.gate(gates[k].op, ch));
    }
    b.finish(map[root].unwrap()).unwrap()
}

fn never_worse(before: &CircuitDag, after: CircuitDag) -> CircuitDag {
    if gate_count(&after) <= gate_count(before) {
        after
    } else {
        before.compact()
    }
}

/// Merges gates with the same op and child multiset; children are sorted.
pub fn structural_hash(c: &CircuitDag) -> CircuitDag {
    let mut b = CircuitBuilder::hashed(c.n());
    let mut map = Vec::with_capacity(c.gates().len());
    let remap = |s: Signal, map: &[Signal]| match s {
        Signal::Gate(g) => map[g as usize],
        s => s,
    };
    for g in c.gates() {
        let ch = g.children.iter().map(|&s| remap(s, &map)).collect();
        map.push(b.gate(g.op, ch));
    }
    let out = remap(c.output(), &map);
    b.finish(out).unwrap().compact()
}

fn lattice_sweep(c: &CircuitDag, universe: &Arc<GraphUniverse>) -> CircuitDag {
    let old_vals = c.gate_values(universe).unwrap();
    let live = c.reachable();
    let fanout = c.fanout();
    let stars: Vec<EdgeSet> = (0..c.n()).map(|i| EdgeSet::star(universe, i).unwrap()).collect();

    let mut b = CircuitBuilder::new(c.n());
    let mut new_vals: Vec<EdgeSet> = Vec::new();
    let mut map: Vec<Signal> = vec![Signal::Input(0); c.gates().len()];
    let mut by_value: HashMap<EdgeSet, Signal> = HashMap::new();
    for (i, s) in stars.iter().enumerate() {
        by_value.entry(s.clone()).or_insert(Signal::Input(i as u32));
    }
    let value = |s: Signal, new_vals: &[EdgeSet]| -> EdgeSet {
        match s {
            Signal::Input(i) => stars[i as usize].clone(),
            Signal::Gate(g) => new_vals[g as usize].clone(),
        }
    };

    // A gate whose single parent has the same op is spliced into that
    // parent; its child list is handed over without being materialized.
    let mut internal = vec![false; c.gates().len()];
    for (k, g) in c.gates().iter().enumerate() {
        if live[k] {
            for &s in &g.children {
                if let Signal::Gate(j) = s {
                    let j = j as usize;
                    if fanout[j] == 1 && c.gates()[j].op == g.op {
                        internal[j] = true;
                    }
                }
            }
        }
    }
    let mut pending: Vec<Option<Vec<Signal>>> = vec![None; c.gates().len()];

    for (k, g) in c.gates().iter().enumerate() {
        if !live[k] {
            continue;
        }
        if let Some(&s) = by_value.get(&old_vals[k]) {
            map[k] = s;
            continue;
        }
        let mut ch: Vec<Signal> = Vec::new();
        for &s in &g.children {
            match s {
                Signal::Gate(j) => match pending[j as usize].take() {
                    Some(list) => ch.extend(list),
                    None => ch.push(map[j as usize]),
                },
                s => ch.push(s),
            }
        }
        if internal[k] {
            pending[k] = Some(ch);
            continue;
        }
        ch.sort_unstable();
        ch.dedup();
        // Absorption, decided on denoted values: drop a child the others
        // already imply. Later children are tried first, against everything
        // before them combined with the kept ones after.
        let combine = |mut a: EdgeSet, v: &EdgeSet| {
            match g.op {
                GateOp::Or => a.union_with(v),
                GateOp::And => a.intersect_with(v),
            }
            a
        };
        let vals: Vec<EdgeSet> = ch.iter().map(|&s| value(s, &new_vals)).collect();
        let mut prefix: Vec<Option<EdgeSet>> = vec![None];
        for v in &vals {
            let p = match prefix.last().unwrap() {
                None => v.clone(),
                Some(p) => combine(p.clone(), v),
            };
            prefix.push(Some(p));
        }
        let mut kept_after: Option<EdgeSet> = None;
        let mut keep = vec![true; ch.len()];
        for idx in (0..ch.len()).rev() {
            let rest = match (&prefix[idx], &kept_after) {
                (None, None) => None,
                (Some(p), None) => Some(p.clone()),
                (None, Some(k)) => Some(k.clone()),
                (Some(p), Some(k)) => Some(combine(p.clone(), k)),
            };
            let redundant = rest.is_some_and(|r| match g.op {
                GateOp::Or => vals[idx].is_subset(&r),
                GateOp::And => r.is_subset(&vals[idx]),
            });
            if redundant {
                keep[idx] = false;
            } else {
                kept_after = Some(match kept_after {
                    None => vals[idx].clone(),
                    Some(k) => combine(k, &vals[idx]),
                });
            }
        }
        let ch: Vec<Signal> = ch.into_iter().zip(keep).filter(|(_, k)| *k).map(|(s, _)| s).collect();
        let s = b.gate(g.op, ch);
        if let Signal::Gate(ng) = s {
            if ng as usize == new_vals.len() {
                new_vals.push(old_vals[k].clone());
            }
        }
        by_value.entry(old_vals[k].clone()).or_insert(s);
        map[k] = s;
    }
    let out = match c.output() {
        Signal::Gate(g) => map[g as usize],
        s => s,
    };
    b.finish(out).unwrap().compact()
}

/// Lattice identities to a fixpoint: flattening of same-op chains,
/// duplicate removal, absorption, single-child collapse, and reuse of any
/// earlier gate or input with the same denoted edge set.
pub fn simplify_lattice(c: &CircuitDag) -> CircuitDag {
    let universe = GraphUniverse::new(c.n()).expect("circuit input count is a valid universe");
    let mut cur = c.compact();
    for _ in 0..64 {
        let next = lattice_sweep(&cur, &universe);
        if next == cur {
            break;
        }
        cur = next;
    }
    never_worse(c, cur)
}

type PairKey = (GateOp, Signal, Signal);

fn pair(op: GateOp, a: Signal, b: Signal) -> PairKey {
    if a < b {
        (op, a, b)
    } else {
        (op, b, a)
    }
}

struct PairIndex {
    counts: HashMap<PairKey, usize>,
    heap: BinaryHeap<(usize, Reverse<PairKey>)>,
    /// Gates containing each signal, per op.
    holders: HashMap<(GateOp, Signal), BTreeSet<usize>>,
}

impl PairIndex {
    fn bump(&mut self, key: PairKey, delta: isize) {
        let e = self.counts.entry(key).or_insert(0);
        *e = (*e as isize + delta) as usize;
        if *e >= 2 {
            self.heap.push((*e, Reverse(key)));
        }
    }
}

/// Greedy divisor extraction: repeatedly materialize the child pair shared
/// by the most same-op gates, while some pair occurs in at least two.
pub fn extract_common_pairs(c: &CircuitDag) -> CircuitDag {
    let c0 = c.compact();
    let mut gates: Vec<(GateOp, BTreeSet<Signal>)> = c0
        .gates()
        .iter()
        .map(|g| (g.op, g.children.iter().copied().collect()))
        .collect();
    let mut idx = PairIndex {
        counts: HashMap::new(),
        heap: BinaryHeap::new(),
        holders: HashMap::new(),
    };
    for (k, (op, ch)) in gates.iter().enumerate() {
        for &s in ch {
            idx.holders.entry((*op, s)).or_default().insert(k);
        }
    }
    // Only signals held by two or more gates can be part of a repeated pair.
    // The candidate set only grows, which keeps the counts consistent.
    let mut cand: HashSet<(GateOp, Signal)> = idx
        .holders
        .iter()
        .filter(|(_, h)| h.len() >= 2)
        .map(|(k, _)| *k)
        .collect();
    for (op, ch) in &gates {
        let cand: Vec<Signal> = ch.iter().copied().filter(|&s| cand.contains(&(*op, s))).collect();
        for (i, &a) in cand.iter().enumerate() {
            for &b in &cand[i + 1..] {
                idx.bump(pair(*op, a, b), 1);
            }
        }
    }
    while let Some((cnt, Reverse(key))) = idx.heap.pop() {
        if idx.counts.get(&key) != Some(&cnt) || cnt < 2 {
            continue;
        }
        let (op, a, b) = key;
        let users: Vec<usize> = {
            let ha = &idx.holders[&(op, a)];
            let hb = &idx.holders[&(op, b)];
            ha.intersection(hb).copied().collect()
        };
        if users.len() < 2 {
            continue;
        }
        let p = Signal::Gate(gates.len() as u32);
        let pk = gates.len();
        gates.push((op, [a, b].into_iter().collect()));
        for &u in &users {
            let others: Vec<Signal> = gates[u].1.iter().copied().filter(|&s| s != a && s != b).collect();
            for &x in &others {
                if cand.contains(&(op, x)) {
                    idx.bump(pair(op, a, x), -1);
                    idx.bump(pair(op, b, x), -1);
                }
            }
            idx.bump(key, -1);
            gates[u].1.remove(&a);
            gates[u].1.remove(&b);
            gates[u].1.insert(p);
            idx.holders.get_mut(&(op, a)).unwrap().remove(&u);
            idx.holders.get_mut(&(op, b)).unwrap().remove(&u);
            idx.holders.entry((op, p)).or_default().insert(u);
        }
        idx.holders.get_mut(&(op, a)).unwrap().insert(pk);
        idx.holders.get_mut(&(op, b)).unwrap().insert(pk);
        idx.bump(key, 1);
        cand.insert((op, p));
        for &u in &users {
            let others: Vec<Signal> = gates[u].1.iter().copied().filter(|&s| s != p).collect();
            for x in others {
                if cand.contains(&(op, x)) {
                    idx.bump(pair(op, p, x), 1);
                }
            }
        }
    }
    let working: Vec<Gate> = gates
        .into_iter()
        .map(|(op, ch)| Gate {
            op,
            children: ch.into_iter().collect(),
        })
        .collect();
    never_worse(c, rebuild(c0.n(), &working, c0.output()))
}

/// Distributive factoring: an OR of fanout-1 ANDs that share a child `g`
/// becomes `AND(g, OR(rests))`, and dually. Saves `m - 1` for `m` sharers.
pub fn factor_distributive(c: &CircuitDag) -> CircuitDag {
    let c0 = c.compact();
    let fan = c0.fanout();
    let mut gates: Vec<Gate> = c0.gates().to_vec();
    let mut fanout: Vec<usize> = fan;
    let original = gates.len();
    for k in 0..original {
        loop {
            let op = gates[k].op;
            let inner = op.dual();
            let mut holders: HashMap<Signal, Vec<Signal>> = HashMap::new();
            let own: BTreeSet<Signal> = gates[k].children.iter().copied().collect();
            for s in own {
                if let Signal::Gate(j) = s {
                    let j = j as usize;
                    if fanout[j] == 1 && gates[j].op == inner {
                        let distinct: BTreeSet<Signal> = gates[j].children.iter().copied().collect();
                        for x in distinct {
                            holders.entry(x).or_default().push(s);
                        }
                    }
                }
            }
            let best = holders
                .into_iter()
                .filter(|(_, v)| v.len() >= 2)
                .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)));
            let Some((g, sharers)) = best else { break };
            let mut rests = Vec::new();
            for &s in &sharers {
                let Signal::Gate(j) = s else { unreachable!() };
                let rest: Vec<Signal> = gates[j as usize].children.iter().copied().filter(|&x| x != g).collect();
                if rest.len() == 1 {
                    rests.push(rest[0]);
                } else {
                    gates.push(Gate {
                        op: inner,
                        children: rest,
                    });
                    fanout.push(1);
                    rests.push(Signal::Gate(gates.len() as u32 - 1));
                }
            }
            gates.push(Gate { op, children: rests });
            fanout.push(1);
            let joined = Signal::Gate(gates.len() as u32 - 1);
            gates.push(Gate {
                op: inner,
                children: vec![g, joined],
            });
            fanout.push(1);
            let factored = Signal::Gate(gates.len() as u32 - 1);
            let mut ch: Vec<Signal> = gates[k]
                .children
                .iter()
                .copied()
                .filter(|s| !sharers.contains(s))
                .collect();
            ch.push(factored);
            gates[k].children = ch;
        }
    }
    never_worse(c, rebuild(c0.n(), &gates, c0.output()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pass {
    Hash,
    Lattice,
    ExtractPairs,
    Distribute,
}

impl Pass {
    pub fn apply(self, c: &CircuitDag) -> CircuitDag {
        match self {
            Pass::Hash => structural_hash(c),
            Pass::Lattice => simplify_lattice(c),
            Pass::ExtractPairs => extract_common_pairs(c),
            Pass::Distribute => factor_distributive(c),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeConfig {
    pub max_rounds: usize,
    pub passes: Vec<Pass>,
    pub external_command: Option<String>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            max_rounds: 100,
            passes: vec![Pass::Hash, Pass::Lattice, Pass::ExtractPairs, Pass::Distribute],
            external_command: None,
        }
    }
}

/// Runs rounds of the configured passes until a round brings no
/// reduction or `max_rounds` is reached.
pub fn optimize(c: &CircuitDag, cfg: &OptimizeConfig) -> CircuitDag {
    let mut best = c.compact();
    let mut best_count = gate_count(&best);
    for _ in 0..cfg.max_rounds {
        let mut cur = best.clone();
        for p in &cfg.passes {
            cur = p.apply(&cur);
        }
        let k = gate_count(&cur);
        if k < best_count {
            best = cur;
            best_count = k;
        } else {
            break;
        }
    }
    best
}

#[derive(Debug, Serialize)]
pub struct OptResult {
    pub count: usize,
    pub circuit: CircuitDag,
    pub greedy_count: usize,
    pub baseline_count: usize,
    /// Count reported by the external synthesizer; never merged into `count`.
    pub external: Option<Result<ExternalReport, String>>,
}

/// Optimized upper bound seeded by the greedy and baseline circuits.
/// Always at most the greedy bound.
pub fn star_upper_opt(g: &EdgeSet, cfg: &OptimizeConfig) -> Result<OptResult, CircuitError> {
    let greedy = star_upper_greedy(g)?;
    let baseline = baseline_cover(g)?;
    let (a, b) = rayon::join(|| optimize(&greedy.circuit, cfg), || optimize(&baseline.circuit, cfg));
    let best = if gate_count(&b) < gate_count(&a) { b } else { a };
    if denoted_graph(&best, g.universe())? != *g {
        return Err(CircuitError::GraphChanged);
    }
    let external = cfg
        .external_command
        .as_ref()
        .map(|t| external_optimize(&greedy.circuit, t).map_err(|e: ExternalError| e.to_string()));
    Ok(OptResult {
        count: gate_count(&best),
        circuit: best,
        greedy_count: greedy.op_count,
        baseline_count: baseline.op_count,
        external,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::tests::{wheel_circuit, wheel_graph, x};

    fn graph_of(c: &CircuitDag) -> EdgeSet {
        denoted_graph(c, &GraphUniverse::new(c.n()).unwrap()).unwrap()
    }

    #[test]
    fn hashing_shares_wheel_subterms() {
        let tree = {
            let mut b = CircuitBuilder::new(5);
            let a1 = b.or(vec![x(1), x(2)]);
            let c1 = b.or(vec![x(3), x(4)]);
            let rim = b.or(vec![a1, c1]);
            let hub = b.and(vec![x(0), rim]);
            let a2 = b.or(vec![x(1), x(2)]);
            let c2 = b.or(vec![x(3), x(4)]);
            let cross = b.and(vec![a2, c2]);
            let o = b.or(vec![hub, cross]);
            b.finish(o).unwrap()
        };
        assert_eq!(gate_count(&tree), 8);
        let h = structural_hash(&tree);
        assert_eq!(gate_count(&h), 6);
        assert_eq!(graph_of(&h), wheel_graph());
        assert_eq!(structural_hash(&h), h);
    }

    #[test]
    fn lattice_examples() {
        let mut b = CircuitBuilder::new(3);
        let a = b.and(vec![x(0), x(1)]);
        let o = b.or(vec![x(0), a]);
        let c = simplify_lattice(&b.finish(o).unwrap());
        assert_eq!(c.output(), x(0));

        let g = Gate {
            op: GateOp::And,
            children: vec![x(0), x(0)],
        };
        let c = simplify_lattice(&CircuitDag::new(3, vec![g], Signal::Gate(0)).unwrap());
        assert_eq!(c.output(), x(0));

        let mut b = CircuitBuilder::new(3);
        let p = b.and(vec![x(0), x(1)]);
        let q = b.and(vec![x(0), x(1)]);
        let o = b.or(vec![p, q]);
        let c = simplify_lattice(&b.finish(o).unwrap());
        assert_eq!(gate_count(&c), 1);
        assert_eq!(c.gates()[0].children, vec![x(0), x(1)]);
    }

    #[test]
    fn pair_extraction() {
        let mut b = CircuitBuilder::new(8);
        let p = b.or(vec![x(1), x(2), x(5)]);
        let q = b.or(vec![x(1), x(2), x(7)]);
        let o = b.and(vec![p, q]);
        let c = b.finish(o).unwrap();
        let e = extract_common_pairs(&c);
        assert_eq!(gate_count(&e), gate_count(&c) - 1);
        assert_eq!(graph_of(&e), graph_of(&c));

        let mut b = CircuitBuilder::new(4);
        let p = b.or(vec![x(0), x(1)]);
        let q = b.or(vec![x(2), x(3)]);
        let o = b.and(vec![p, q]);
        let c = b.finish(o).unwrap();
        assert_eq!(extract_common_pairs(&c), c);
    }

    #[test]
    fn distributive_factoring() {
        // (x0∧x1) ∨ (x0∧x2) ∨ (x0∧x3) → x0 ∧ (x1∨x2∨x3).
        let mut b = CircuitBuilder::new(4);
        let t: Vec<Signal> = (1..4).map(|j| b.and(vec![x(0), x(j)])).collect();
        let o = b.or(t);
        let c = b.finish(o).unwrap();
        let f = factor_distributive(&c);
        assert_eq!(gate_count(&c), 5);
        assert_eq!(gate_count(&f), 3);
        assert_eq!(graph_of(&f), graph_of(&c));
    }

    #[test]
    fn optimize_wheel() {
        let tree = wheel_circuit(false);
        let o = optimize(&tree, &OptimizeConfig::default());
        assert!(gate_count(&o) <= 6);
        assert_eq!(graph_of(&o), wheel_graph());
        let again = optimize(&o, &OptimizeConfig::default());
        assert_eq!(gate_count(&again), gate_count(&o));

        let r = star_upper_opt(&wheel_graph(), &OptimizeConfig::default()).unwrap();
        assert!(r.count <= 6, "{}", r.count);
        assert!(r.count <= r.greedy_count);
    }

    #[test]
    fn optimize_trivial() {
        let c = CircuitDag::input(10, 4).unwrap();
        assert_eq!(optimize(&c, &OptimizeConfig::default()), c);
        let u = GraphUniverse::new(6).unwrap();
        let e = EdgeSet::from_edges(&u, [(2, 5)]).unwrap();
        assert_eq!(star_upper_opt(&e, &OptimizeConfig::default()).unwrap().count, 1);
    }
}
