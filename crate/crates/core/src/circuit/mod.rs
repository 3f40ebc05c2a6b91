//! Monotone AND/OR circuits over the star inputs `x_0 … x_{n-1}`.
//!
//! A circuit denotes a graph: input `x_i` stands for the star `S_i`, AND is
//! intersection and OR is union. Equivalently, edge `{i,j}` is present iff
//! the circuit is true on the assignment with exactly `x_i = x_j = 1`.
//! Gates may have any arity of at least two; a gate of arity `k` costs
//! `k - 1` binary operations.

mod netlist;
mod passes;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::edgespace::{EdgeSet, GraphUniverse};

pub use netlist::{export_netlist, external_optimize, parse_gate_count, ExternalError, ExternalReport, EXT_SYNTH_ENV};
pub use passes::{
    extract_common_pairs, factor_distributive, optimize, simplify_lattice, star_upper_opt, structural_hash, OptResult,
    OptimizeConfig, Pass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GateOp {
    And,
    Or,
}

impl GateOp {
    pub fn dual(self) -> GateOp {
        match self {
            GateOp::And => GateOp::Or,
            GateOp::Or => GateOp::And,
        }
    }
}

/// A reference to an input or to an earlier gate. Inputs order before gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Signal {
    Input(u32),
    Gate(u32),
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Input(i) => write!(f, "x{i}"),
            Signal::Gate(g) => write!(f, "g{g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Gate {
    pub op: GateOp,
    pub children: Vec<Signal>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("input x{input} out of range for {n} inputs")]
    InputOutOfRange { input: u32, n: usize },
    #[error("gate {gate} references g{child}, which does not precede it")]
    NotTopological { gate: usize, child: u32 },
    #[error("gate {gate} has arity {arity}; at least 2 required")]
    Arity { gate: usize, arity: usize },
    #[error("circuit has {circuit} inputs but the universe has {universe} vertices")]
    InputCountMismatch { circuit: usize, universe: usize },
    #[error("circuit does not denote the expected graph")]
    GraphChanged,
    #[error("the empty graph on {n} vertices has no star formula")]
    EmptyUnrepresentable { n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitDag {
    n: usize,
    gates: Vec<Gate>,
    output: Signal,
}

impl CircuitDag {
    pub fn new(n: usize, gates: Vec<Gate>, output: Signal) -> Result<Self, CircuitError> {
        let check = |s: Signal, at: usize| match s {
            Signal::Input(i) if i as usize >= n => Err(CircuitError::InputOutOfRange { input: i, n }),
            Signal::Gate(g) if g as usize >= at => Err(CircuitError::NotTopological { gate: at, child: g }),
            _ => Ok(()),
        };
        for (k, g) in gates.iter().enumerate() {
            if g.children.len() < 2 {
                return Err(CircuitError::Arity {
                    gate: k,
                    arity: g.children.len(),
                });
            }
            for &c in &g.children {
                check(c, k)?;
            }
        }
        check(output, gates.len())?;
        Ok(CircuitDag { n, gates, output })
    }

    pub fn input(n: usize, i: u32) -> Result<Self, CircuitError> {
        CircuitDag::new(n, Vec::new(), Signal::Input(i))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> Signal {
        self.output
    }

    /// Which gates the output depends on.
    pub fn reachable(&self) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        if let Signal::Gate(g) = self.output {
            live[g as usize] = true;
        }
        for k in (0..self.gates.len()).rev() {
            if live[k] {
                for c in &self.gates[k].children {
                    if let Signal::Gate(g) = c {
                        live[*g as usize] = true;
                    }
                }
            }
        }
        live
    }

    /// Number of parents of each gate among reachable gates (the output
    /// reference counts as one).
    pub fn fanout(&self) -> Vec<usize> {
        let live = self.reachable();
        let mut f = vec![0; self.gates.len()];
        for (k, g) in self.gates.iter().enumerate() {
            if live[k] {
                for c in &g.children {
                    if let Signal::Gate(x) = c {
                        f[*x as usize] += 1;
                    }
                }
            }
        }
        if let Signal::Gate(g) = self.output {
            f[g as usize] += 1;
        }
        f
    }

    /// Drops unreachable gates and renumbers the rest in order.
    pub fn compact(&self) -> CircuitDag {
        let live = self.reachable();
        let mut map = vec![u32::MAX; self.gates.len()];
        let mut gates = Vec::new();
        let remap = |s: Signal, map: &[u32]| match s {
            Signal::Gate(g) => Signal::Gate(map[g as usize]),
            s => s,
        };
        for (k, g) in self.gates.iter().enumerate() {
            if live[k] {
                map[k] = gates.len() as u32;
                gates.push(Gate {
                    op: g.op,
                    children: g.children.iter().map(|&c| remap(c, &map)).collect(),
                });
            }
        }
        CircuitDag {
            n: self.n,
            gates,
            output: remap(self.output, &map),
        }
    }

    /// Values of every gate as edge sets.
    pub fn gate_values(&self, universe: &Arc<GraphUniverse>) -> Result<Vec<EdgeSet>, CircuitError> {
        if universe.n() != self.n {
            return Err(CircuitError::InputCountMismatch {
                circuit: self.n,
                universe: universe.n(),
            });
        }
        let stars: Vec<EdgeSet> = (0..self.n).map(|i| EdgeSet::star(universe, i).unwrap()).collect();
        let mut vals: Vec<EdgeSet> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let get = |s: &Signal, vals: &[EdgeSet]| match *s {
                Signal::Input(i) => stars[i as usize].clone(),
                Signal::Gate(k) => vals[k as usize].clone(),
            };
            let mut acc = get(&g.children[0], &vals);
            for c in &g.children[1..] {
                let v = get(c, &vals);
                match g.op {
                    GateOp::And => acc.intersect_with(&v),
                    GateOp::Or => acc.union_with(&v),
                }
            }
            vals.push(acc);
        }
        Ok(vals)
    }

    /// Boolean evaluation on an input assignment.
    pub fn eval_bool(&self, assignment: &[bool]) -> bool {
        let mut vals: Vec<bool> = Vec::with_capacity(self.gates.len());
        let get = |s: Signal, vals: &[bool]| match s {
            Signal::Input(i) => assignment[i as usize],
            Signal::Gate(k) => vals[k as usize],
        };
        for g in &self.gates {
            let v = match g.op {
                GateOp::And => g.children.iter().all(|&c| get(c, &vals)),
                GateOp::Or => g.children.iter().any(|&c| get(c, &vals)),
            };
            vals.push(v);
        }
        get(self.output, &vals)
    }
}

impl fmt::Display for CircuitDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.gates.iter().enumerate() {
            let op = match g.op {
                GateOp::And => "AND",
                GateOp::Or => "OR",
            };
            let ch: Vec<String> = g.children.iter().map(|c| c.to_string()).collect();
            writeln!(f, "g{k} = {op}({})", ch.join(", "))?;
        }
        write!(f, "out = {}", self.output)
    }
}

/// The graph a circuit denotes over `universe`.
pub fn denoted_graph(c: &CircuitDag, universe: &Arc<GraphUniverse>) -> Result<EdgeSet, CircuitError> {
    let vals = c.gate_values(universe)?;
    Ok(match c.output {
        Signal::Input(i) => EdgeSet::star(universe, i as usize).unwrap(),
        Signal::Gate(g) => vals[g as usize].clone(),
    })
}

/// Binary operations after binarizing: the sum of `arity - 1` over gates the
/// output depends on.
pub fn gate_count(c: &CircuitDag) -> usize {
    let live = c.reachable();
    c.gates
        .iter()
        .zip(live)
        .filter(|(_, l)| *l)
        .map(|(g, _)| g.children.len() - 1)
        .sum()
}

/// Incremental construction, optionally merging structurally identical
/// gates (same op, same sorted child list).
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n: usize,
    gates: Vec<Gate>,
    table: Option<HashMap<Gate, u32>>,
}

impl CircuitBuilder {
    pub fn new(n: usize) -> Self {
        CircuitBuilder {
            n,
            gates: Vec::new(),
            table: None,
        }
    }

    pub fn hashed(n: usize) -> Self {
        CircuitBuilder {
            n,
            gates: Vec::new(),
            table: Some(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds a gate; a single child is returned as is.
    pub fn gate(&mut self, op: GateOp, mut children: Vec<Signal>) -> Signal {
        assert!(!children.is_empty(), "gate needs at least one child");
        if children.len() == 1 {
            return children[0];
        }
        if let Some(t) = &self.table {
            children.sort_unstable();
            let key = Gate { op, children };
            if let Some(&k) = t.get(&key) {
                return Signal::Gate(k);
            }
            let k = self.gates.len() as u32;
            self.gates.push(key.clone());
            self.table.as_mut().unwrap().insert(key, k);
            return Signal::Gate(k);
        }
        self.gates.push(Gate { op, children });
        Signal::Gate(self.gates.len() as u32 - 1)
    }

    pub fn and(&mut self, children: Vec<Signal>) -> Signal {
        self.gate(GateOp::And, children)
    }

    pub fn or(&mut self, children: Vec<Signal>) -> Signal {
        self.gate(GateOp::Or, children)
    }

    pub fn finish(self, output: Signal) -> Result<CircuitDag, CircuitError> {
        CircuitDag::new(self.n, self.gates, output)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn x(i: u32) -> Signal {
        Signal::Input(i)
    }

    /// S0∩(S1∪S2∪S3∪S4) ∪ (S1∪S2)∩(S3∪S4), with or without sharing.
    pub(crate) fn wheel_circuit(shared: bool) -> CircuitDag {
        let mut b = CircuitBuilder::new(5);
        let (a, c) = if shared {
            let a = b.or(vec![x(1), x(2)]);
            let c = b.or(vec![x(3), x(4)]);
            let rim = b.or(vec![a, c]);
            let hub = b.and(vec![x(0), rim]);
            let cross = b.and(vec![a, c]);
            (hub, cross)
        } else {
            let rim = b.or(vec![x(1), x(2), x(3), x(4)]);
            let hub = b.and(vec![x(0), rim]);
            let a = b.or(vec![x(1), x(2)]);
            let c = b.or(vec![x(3), x(4)]);
            let cross = b.and(vec![a, c]);
            (hub, cross)
        };
        let out = b.or(vec![a, c]);
        b.finish(out).unwrap()
    }

    pub(crate) fn wheel_graph() -> EdgeSet {
        let u = GraphUniverse::new(5).unwrap();
        EdgeSet::from_edges(&u, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4)]).unwrap()
    }

    #[test]
    fn denotation_examples() {
        let u = GraphUniverse::new(5).unwrap();
        let c = CircuitDag::input(5, 3).unwrap();
        assert_eq!(denoted_graph(&c, &u).unwrap(), EdgeSet::star(&u, 3).unwrap());
        assert_eq!(gate_count(&c), 0);

        let mut b = CircuitBuilder::new(5);
        let o = b.and(vec![x(0), x(1)]);
        let c = b.finish(o).unwrap();
        assert_eq!(
            denoted_graph(&c, &u).unwrap(),
            EdgeSet::from_edges(&u, [(0, 1)]).unwrap()
        );

        for shared in [false, true] {
            let w = wheel_circuit(shared);
            assert_eq!(denoted_graph(&w, &u).unwrap(), wheel_graph());
            assert_eq!(gate_count(&w), if shared { 6 } else { 8 });
        }
    }

    #[test]
    fn weight_two_assignments_agree() {
        let u = GraphUniverse::new(5).unwrap();
        let w = wheel_circuit(true);
        let g = denoted_graph(&w, &u).unwrap();
        for i in 0..5 {
            for j in i + 1..5 {
                let mut a = vec![false; 5];
                a[i] = true;
                a[j] = true;
                assert_eq!(w.eval_bool(&a), g.contains(i, j).unwrap());
            }
        }
    }

    #[test]
    fn validation() {
        let g = Gate {
            op: GateOp::And,
            children: vec![x(0)],
        };
        assert!(matches!(
            CircuitDag::new(3, vec![g], Signal::Gate(0)),
            Err(CircuitError::Arity { .. })
        ));
        let g = Gate {
            op: GateOp::And,
            children: vec![x(0), Signal::Gate(0)],
        };
        assert!(matches!(
            CircuitDag::new(3, vec![g], Signal::Gate(0)),
            Err(CircuitError::NotTopological { .. })
        ));
        assert!(matches!(
            CircuitDag::input(3, 3),
            Err(CircuitError::InputOutOfRange { .. })
        ));
        let u = GraphUniverse::new(4).unwrap();
        assert!(denoted_graph(&CircuitDag::input(3, 0).unwrap(), &u).is_err());
    }

    #[test]
    fn hashed_builder_merges() {
        let mut b = CircuitBuilder::hashed(4);
        let p = b.and(vec![x(1), x(0)]);
        let q = b.and(vec![x(0), x(1)]);
        assert_eq!(p, q);
        let o = b.or(vec![p, q]);
        let c = b.finish(o).unwrap();
        assert_eq!(c.gates().len(), 2);
    }

    #[test]
    fn compact_drops_dead_gates() {
        let mut b = CircuitBuilder::new(4);
        b.and(vec![x(2), x(3)]);
        let o = b.or(vec![x(0), x(1)]);
        let c = b.finish(o).unwrap();
        let d = c.compact();
        assert_eq!(d.gates().len(), 1);
        assert_eq!(d.output(), Signal::Gate(0));
        assert_eq!(gate_count(&c), gate_count(&d));
    }
}
