//! Fast upper bounds on star complexity.
//!
//! The baseline cover is the union of every star the graph contains plus
//! one `S_i ∩ S_j` per remaining edge. Greedy factoring instead peels off
//! terms `S_r ∩ (S_j ∪ …)` for a vertex `r` of maximal residual degree;
//! on the first step every maximal-degree vertex is tried, later steps
//! take the lowest-indexed one. This factoring procedure is a
//! reconstruction, not a published algorithm.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{denoted_graph, gate_count, CircuitBuilder, CircuitDag, CircuitError, Signal};
use crate::edgespace::EdgeSet;

/// `S_root ∩ (∪_{j ∈ leaves} S_j)`, i.e. the edges `{root, j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorTerm {
    pub root: usize,
    pub leaves: Vec<usize>,
}

impl FactorTerm {
    pub fn cost(&self) -> usize {
        self.leaves.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Term {
    Star(usize),
    Factor(FactorTerm),
    /// `S_0 ∩ S_1 ∩ S_2`, the empty edge set.
    Empty,
}

impl Term {
    fn cost(&self) -> usize {
        match self {
            Term::Star(_) => 0,
            Term::Factor(f) => f.cost(),
            Term::Empty => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Baseline,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TraceStep {
    CoveredStar(usize),
    EdgeTerm(usize, usize),
    Candidate { root: usize, op_count: usize },
    Chosen { root: usize },
    Factor(FactorTerm),
    EmptyConvention,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyResult {
    pub op_count: usize,
    pub method: Method,
    pub terms: Vec<Term>,
    pub circuit: CircuitDag,
    pub trace: Vec<TraceStep>,
}

fn total_cost(terms: &[Term]) -> usize {
    terms.iter().map(Term::cost).sum::<usize>() + terms.len().saturating_sub(1)
}

/// Builds the circuit for a union of terms, joined left to right.
fn circuit_of(n: usize, terms: &[Term]) -> CircuitDag {
    let mut b = CircuitBuilder::new(n);
    let mut acc: Option<Signal> = None;
    for t in terms {
        let x = |i: usize| Signal::Input(i as u32);
        let s = match t {
            Term::Star(i) => x(*i),
            Term::Factor(f) => {
                let leaves = b.or(f.leaves.iter().map(|&j| x(j)).collect());
                b.and(vec![x(f.root), leaves])
            }
            Term::Empty => b.and(vec![x(0), x(1), x(2)]),
        };
        acc = Some(match acc {
            None => s,
            Some(a) => b.or(vec![a, s]),
        });
    }
    b.finish(acc.expect("at least one term")).unwrap()
}

/// Terms for a graph without edges, or `None` if no star formula exists.
fn empty_terms(g: &EdgeSet) -> Result<(Vec<Term>, Vec<TraceStep>), CircuitError> {
    match g.n() {
        1 => Ok((vec![Term::Star(0)], vec![TraceStep::CoveredStar(0)])),
        2 => Err(CircuitError::EmptyUnrepresentable { n: 2 }),
        _ => Ok((vec![Term::Empty], vec![TraceStep::EmptyConvention])),
    }
}

fn finish(g: &EdgeSet, method: Method, terms: Vec<Term>, trace: Vec<TraceStep>) -> Result<GreedyResult, CircuitError> {
    let circuit = circuit_of(g.n(), &terms);
    if denoted_graph(&circuit, g.universe())? != *g {
        return Err(CircuitError::GraphChanged);
    }
    let op_count = gate_count(&circuit);
    debug_assert_eq!(op_count, total_cost(&terms));
    Ok(GreedyResult {
        op_count,
        method,
        terms,
        circuit,
        trace,
    })
}

/// Union of covered stars plus one intersection per remaining edge.
pub fn baseline_cover(g: &EdgeSet) -> Result<GreedyResult, CircuitError> {
    if g.is_empty() {
        let (terms, trace) = empty_terms(g)?;
        return finish(g, Method::Baseline, terms, trace);
    }
    let n = g.n();
    let deg = g.degrees();
    let covered: Vec<bool> = deg.iter().map(|&d| d + 1 == n).collect();
    let mut terms = Vec::new();
    let mut trace = Vec::new();
    for (i, _) in covered.iter().enumerate().filter(|(_, c)| **c) {
        terms.push(Term::Star(i));
        trace.push(TraceStep::CoveredStar(i));
    }
    for (i, j) in g.edges() {
        if !covered[i] && !covered[j] {
            terms.push(Term::Factor(FactorTerm {
                root: i,
                leaves: vec![j],
            }));
            trace.push(TraceStep::EdgeTerm(i, j));
        }
    }
    finish(g, Method::Baseline, terms, trace)
}

struct Residual {
    adj: Vec<BTreeSet<usize>>,
    edges: usize,
}

impl Residual {
    fn new(g: &EdgeSet) -> Self {
        Residual {
            adj: g
                .adjacency()
                .into_iter()
                .map(|a| a.into_iter().map(|v| v as usize).collect())
                .collect(),
            edges: g.len(),
        }
    }

    fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    fn take(&mut self, root: usize) -> FactorTerm {
        let leaves: Vec<usize> = std::mem::take(&mut self.adj[root]).into_iter().collect();
        for &j in &leaves {
            self.adj[j].remove(&root);
        }
        self.edges -= leaves.len();
        FactorTerm { root, leaves }
    }

    /// Factors the rest, always at the lowest-indexed maximal-degree vertex.
    fn complete(&mut self, terms: &mut Vec<Term>) {
        while self.edges > 0 {
            let m = self.max_degree();
            let root = (0..self.adj.len()).find(|&v| self.adj[v].len() == m).unwrap();
            terms.push(Term::Factor(self.take(root)));
        }
    }
}

/// Greedy star factoring, branching over every maximal-degree vertex on
/// the first step only.
pub fn greedy_factor(g: &EdgeSet) -> Result<GreedyResult, CircuitError> {
    if g.is_empty() {
        let (terms, trace) = empty_terms(g)?;
        return finish(g, Method::Greedy, terms, trace);
    }
    let start = Residual::new(g);
    let m = start.max_degree();
    let roots: Vec<usize> = (0..g.n()).filter(|&v| start.adj[v].len() == m).collect();
    let candidates: Vec<(usize, Vec<Term>)> = roots
        .par_iter()
        .map(|&root| {
            let mut r = Residual::new(g);
            let mut terms = vec![Term::Factor(r.take(root))];
            r.complete(&mut terms);
            (root, terms)
        })
        .collect();
    let mut trace: Vec<TraceStep> = candidates
        .iter()
        .map(|(root, t)| TraceStep::Candidate {
            root: *root,
            op_count: total_cost(t),
        })
        .collect();
    let (root, terms) = candidates.into_iter().min_by_key(|(_, t)| total_cost(t)).unwrap();
    trace.push(TraceStep::Chosen { root });
    trace.extend(terms.iter().filter_map(|t| match t {
        Term::Factor(f) => Some(TraceStep::Factor(f.clone())),
        _ => None,
    }));
    finish(g, Method::Greedy, terms, trace)
}

/// The better of the baseline cover and greedy factoring (baseline on ties).
pub fn star_upper_greedy(g: &EdgeSet) -> Result<GreedyResult, CircuitError> {
    let base = baseline_cover(g)?;
    let greedy = greedy_factor(g)?;
    Ok(if greedy.op_count < base.op_count { greedy } else { base })
}
