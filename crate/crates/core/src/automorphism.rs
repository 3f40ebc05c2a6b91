//! Automorphism group order and canonical certificates by
//! individualization–refinement.
//!
//! The search keeps the first leaf reached by always individualizing the
//! smallest vertex of the first largest non-singleton cell. Every later leaf
//! whose relabeled graph equals the first (or the current best) leaf yields an
//! automorphism. Orbits of the discovered generators prune siblings, and
//! |Aut| is the product, along the first path, of the orbit sizes of the
//! individualized vertices.
//!
//! Leaves are ranked by their refinement trace sequence (larger wins), then
//! by the relabeled edge bit field (smaller wins); the certificate is the
//! bit field of the best leaf.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::BigUint;
use thiserror::Error;

use crate::edgespace::{EdgeSet, GraphUniverse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("vertex {0} appears in more than one cell")]
    Repeated(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("partition covers {covered} of {n} vertices")]
    Incomplete { covered: usize, n: usize },
    #[error("empty cell at index {0}")]
    EmptyCell(usize),
}

/// Ordered list of disjoint vertex cells covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedPartition {
    cells: Vec<Vec<usize>>,
}

impl OrderedPartition {
    pub fn new(n: usize, cells: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; n];
        let mut covered = 0;
        for (k, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(PartitionError::EmptyCell(k));
            }
            for &v in cell {
                if v >= n {
                    return Err(PartitionError::OutOfRange { vertex: v, n });
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(PartitionError::Repeated(v));
                }
                covered += 1;
            }
        }
        if covered != n {
            return Err(PartitionError::Incomplete { covered, n });
        }
        Ok(OrderedPartition { cells })
    }

    pub fn unit(n: usize) -> Self {
        OrderedPartition {
            cells: vec![(0..n).collect()],
        }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }
}

/// Result of the automorphism search.
#[derive(Debug, Clone)]
pub struct AutResult {
    pub group_order: BigUint,
    pub log2_group_order: f64,
    pub certificate: Vec<u8>,
    /// Position of each vertex in the canonical relabeling.
    pub canonical_labeling: Vec<u32>,
    /// Number of search-tree nodes refined.
    pub nodes: u64,
    /// Number of automorphisms discovered (not necessarily independent).
    pub generators: usize,
}

struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    fn new(g: &EdgeSet) -> Self {
        let edges: Vec<_> = g.edges().map(|(i, j)| (i as u32, j as u32)).collect();
        Graph {
            n: g.n(),
            adj: g.adjacency(),
            edges,
        }
    }
}

/// Cells are contiguous runs of `order`; `len` is meaningful at cell starts.
#[derive(Clone)]
struct Part {
    order: Vec<u32>,
    cell_of: Vec<u32>,
    len: Vec<u32>,
    ncells: usize,
}

impl Part {
    fn from_cells(n: usize, cells: &[Vec<usize>]) -> Self {
        let mut p = Part {
            order: Vec::with_capacity(n),
            cell_of: vec![0; n],
            len: vec![0; n],
            ncells: cells.len(),
        };
        for cell in cells {
            let start = p.order.len();
            p.len[start] = cell.len() as u32;
            for &v in cell {
                p.cell_of[v] = start as u32;
                p.order.push(v as u32);
            }
        }
        p
    }

    fn starts(&self) -> impl Iterator<Item = usize> + '_ {
        let mut k = 0;
        std::iter::from_fn(move || {
            (k < self.order.len()).then(|| {
                let s = k;
                k += self.len[s] as usize;
                s
            })
        })
    }

    fn to_partition(&self) -> OrderedPartition {
        OrderedPartition {
            cells: self
                .starts()
                .map(|s| {
                    let mut c: Vec<usize> = self.order[s..s + self.len[s] as usize]
                        .iter()
                        .map(|&v| v as usize)
                        .collect();
                    c.sort_unstable();
                    c
                })
                .collect(),
        }
    }

    fn is_discrete(&self) -> bool {
        self.ncells == self.order.len()
    }

    /// First largest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<(usize, u32)> = None;
        for s in self.starts() {
            let l = self.len[s];
            if l > 1 && best.is_none_or(|(_, bl)| l > bl) {
                best = Some((s, l));
            }
        }
        best.map(|(s, _)| s)
    }

    fn cell(&self, start: usize) -> &[u32] {
        &self.order[start..start + self.len[start] as usize]
    }

    /// Splits `v` off the front of its cell; returns the singleton's start.
    fn individualize(&mut self, v: u32) -> usize {
        let c = self.cell_of[v as usize] as usize;
        let l = self.len[c] as usize;
        let at = self.order[c..c + l].iter().position(|&x| x == v).unwrap();
        self.order[c..c + l].swap(0, at);
        self.order[c + 1..c + l].sort_unstable();
        self.len[c] = 1;
        self.len[c + 1] = (l - 1) as u32;
        for k in c + 1..c + l {
            self.cell_of[self.order[k] as usize] = (c + 1) as u32;
        }
        self.ncells += 1;
        c
    }
}

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    let mut z = h ^ x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Refines `p` to the coarsest equitable partition reachable from the given
/// splitter cells, returning a hash of the refinement process.
fn refine(g: &Graph, p: &mut Part, splitters: &[usize]) -> u64 {
    let n = g.n;
    let mut h = mix(0, splitters.len() as u64);
    let mut queue = VecDeque::new();
    let mut in_queue = vec![false; n];
    for &c in splitters {
        h = mix(h, c as u64);
        if !in_queue[c] {
            in_queue[c] = true;
            queue.push_back(c);
        }
    }
    let mut count = vec![0u32; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut cells: Vec<usize> = Vec::new();
    let mut fragments: Vec<(usize, u32, u32)> = Vec::new();
    let mut members: Vec<u32> = Vec::new();

    while let Some(ws) = queue.pop_front() {
        in_queue[ws] = false;
        if p.is_discrete() {
            break;
        }
        members.clear();
        members.extend_from_slice(p.cell(ws));
        h = mix(h, ((ws as u64) << 32) | members.len() as u64);
        for &w in &members {
            for &u in &g.adj[w as usize] {
                if count[u as usize] == 0 {
                    touched.push(u);
                }
                count[u as usize] += 1;
            }
        }
        cells.clear();
        cells.extend(touched.iter().map(|&u| p.cell_of[u as usize] as usize));
        cells.sort_unstable();
        cells.dedup();
        for &c in &cells {
            let l = p.len[c] as usize;
            let slice = &mut p.order[c..c + l];
            slice.sort_unstable_by_key(|&v| (count[v as usize], v));
            let lo = count[slice[0] as usize];
            let hi = count[slice[l - 1] as usize];
            if lo == hi {
                h = mix(h, ((c as u64) << 32) | lo as u64);
                continue;
            }
            fragments.clear();
            let mut start = c;
            for k in c..c + l {
                let cnt = count[p.order[k] as usize];
                if k + 1 == c + l || count[p.order[k + 1] as usize] != cnt {
                    fragments.push((start, (k + 1 - start) as u32, cnt));
                    start = k + 1;
                }
            }
            for &(f, fl, cnt) in &fragments {
                p.len[f] = fl;
                for k in f..f + fl as usize {
                    p.cell_of[p.order[k] as usize] = f as u32;
                }
                h = mix(h, ((f as u64) << 40) ^ ((fl as u64) << 20) ^ cnt as u64);
            }
            p.ncells += fragments.len() - 1;
            let skip = if in_queue[c] {
                c
            } else {
                let mut largest = fragments[0];
                for &fr in &fragments[1..] {
                    if fr.1 > largest.1 {
                        largest = fr;
                    }
                }
                largest.0
            };
            for &(f, _, _) in &fragments {
                if f != skip && !in_queue[f] {
                    in_queue[f] = true;
                    queue.push_back(f);
                }
            }
        }
        for &u in &touched {
            count[u as usize] = 0;
        }
        touched.clear();
    }
    mix(h, p.ncells as u64)
}

/// Coarsest equitable partition refining `p`.
pub fn equitable_refine(g: &EdgeSet, p: &OrderedPartition) -> OrderedPartition {
    let graph = Graph::new(g);
    let mut part = Part::from_cells(g.n(), p.cells());
    let starts: Vec<usize> = part.starts().collect();
    refine(&graph, &mut part, &starts);
    part.to_partition()
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }

    fn absorb(&mut self, perm: &[u32]) {
        for (v, &w) in perm.iter().enumerate() {
            self.union(v as u32, w);
        }
    }

    fn class_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
}

#[derive(Clone)]
struct Leaf {
    order: Vec<u32>,
    lab: Vec<u32>,
    graph: Vec<u64>,
    traces: Vec<u64>,
}

enum Outcome {
    Continue,
    FoundFirst,
}

struct Search<'a> {
    g: &'a Graph,
    universe: &'a GraphUniverse,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<u32>>,
    nodes: u64,
}

/// Lexicographic order of a trace path against a leaf's traces, treating a
/// proper prefix as equal (the path may still reach that leaf).
fn cmp_prefix(cur: &[u64], other: &[u64]) -> Ordering {
    for (a, b) in cur.iter().zip(other) {
        match a.cmp(b) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    if cur.len() <= other.len() {
        Ordering::Equal
    } else {
        Ordering::Greater
    }
}

impl<'a> Search<'a> {
    fn make_leaf(&self, p: &Part, traces: &[u64]) -> Leaf {
        let n = self.g.n;
        let mut lab = vec![0u32; n];
        for (pos, &v) in p.order.iter().enumerate() {
            lab[v as usize] = pos as u32;
        }
        let mut graph = vec![0u64; self.universe.words()];
        for &(i, j) in &self.g.edges {
            let (a, b) = (lab[i as usize] as usize, lab[j as usize] as usize);
            let s = self.universe.slot(a.min(b), a.max(b));
            graph[s / 64] |= 1 << (s % 64);
        }
        Leaf {
            order: p.order.clone(),
            lab,
            graph,
            traces: traces.to_vec(),
        }
    }

    /// Automorphism carrying leaf `from` onto `to` (their graphs must agree).
    fn automorphism(from: &Leaf, to: &Leaf) -> Vec<u32> {
        from.lab.iter().map(|&pos| to.order[pos as usize]).collect()
    }

    fn record(&mut self, gamma: Vec<u32>) {
        if gamma.iter().enumerate().any(|(v, &w)| v as u32 != w) {
            self.gens.push(gamma);
        }
    }

    fn explore(&mut self, part: Part, prefix: &mut Vec<u32>, traces: &mut Vec<u64>) -> Outcome {
        self.nodes += 1;
        let first = self.first.as_ref().unwrap();
        let eq_first = traces.len() <= first.traces.len() && first.traces[..traces.len()] == traces[..];
        let best_cmp = cmp_prefix(traces, &self.best.as_ref().unwrap().traces);
        if !eq_first && best_cmp == Ordering::Less {
            return Outcome::Continue;
        }
        if part.is_discrete() {
            let leaf = self.make_leaf(&part, traces);
            if eq_first && traces.len() == first.traces.len() && leaf.graph == first.graph {
                let gamma = Self::automorphism(first, &leaf);
                self.record(gamma);
                return Outcome::FoundFirst;
            }
            let best = self.best.as_ref().unwrap();
            let full = traces[..].cmp(&best.traces[..]);
            match full {
                Ordering::Greater => self.best = Some(leaf),
                Ordering::Less => {}
                Ordering::Equal => match leaf.graph.cmp(&best.graph) {
                    Ordering::Less => self.best = Some(leaf),
                    Ordering::Equal => {
                        let gamma = Self::automorphism(best, &leaf);
                        self.record(gamma);
                    }
                    Ordering::Greater => {}
                },
            }
            return Outcome::Continue;
        }

        let target = part.target_cell().unwrap();
        let mut cell: Vec<u32> = part.cell(target).to_vec();
        cell.sort_unstable();
        let mut uf = UnionFind::new(self.g.n);
        let mut absorbed = 0;
        let mut explored: Vec<u32> = Vec::new();
        for &x in &cell {
            while absorbed < self.gens.len() {
                let gamma = &self.gens[absorbed];
                if prefix.iter().all(|&v| gamma[v as usize] == v) {
                    uf.absorb(gamma);
                }
                absorbed += 1;
            }
            let rx = uf.find(x);
            if explored.iter().any(|&y| uf.find(y) == rx) {
                continue;
            }
            let mut child = part.clone();
            let c = child.individualize(x);
            let t = mix(refine(self.g, &mut child, &[c]), c as u64);
            prefix.push(x);
            traces.push(t);
            let out = self.explore(child, prefix, traces);
            prefix.pop();
            traces.pop();
            if let Outcome::FoundFirst = out {
                return out;
            }
            explored.push(x);
        }
        Outcome::Continue
    }
}

/// |Aut(G)| together with the canonical certificate.
pub fn aut_order(g: &EdgeSet) -> AutResult {
    let graph = Graph::new(g);
    let n = graph.n;
    let universe = g.universe();
    let mut part = Part::from_cells(n, &[(0..n).collect()]);
    let mut traces = vec![refine(&graph, &mut part, &[0])];
    let mut prefix: Vec<u32> = Vec::new();
    let mut levels: Vec<(Part, Vec<u32>, u32)> = Vec::new();
    let mut nodes = 1;
    while let Some(target) = part.target_cell() {
        let mut cell = part.cell(target).to_vec();
        cell.sort_unstable();
        let v = cell[0];
        levels.push((part.clone(), cell, v));
        let c = part.individualize(v);
        traces.push(mix(refine(&graph, &mut part, &[c]), c as u64));
        prefix.push(v);
        nodes += 1;
    }
    let mut search = Search {
        g: &graph,
        universe,
        first: None,
        best: None,
        gens: Vec::new(),
        nodes,
    };
    let first = search.make_leaf(&part, &traces);
    search.best = Some(first.clone());
    search.first = Some(first);

    let mut order = BigUint::from(1u32);
    let mut log2 = 0.0;
    for (i, (p_i, cell, v)) in levels.iter().enumerate().rev() {
        let mut uf = UnionFind::new(n);
        let mut absorbed = 0;
        let mut explored = vec![*v];
        let mut path_prefix = prefix[..i].to_vec();
        let mut path_traces = traces[..=i].to_vec();
        for &w in cell.iter().filter(|&&w| w != *v) {
            while absorbed < search.gens.len() {
                uf.absorb(&search.gens[absorbed]);
                absorbed += 1;
            }
            let rw = uf.find(w);
            if explored.iter().any(|&y| uf.find(y) == rw) {
                continue;
            }
            let mut child = p_i.clone();
            let c = child.individualize(w);
            let t = mix(refine(&graph, &mut child, &[c]), c as u64);
            path_prefix.push(w);
            path_traces.push(t);
            search.explore(child, &mut path_prefix, &mut path_traces);
            path_prefix.pop();
            path_traces.pop();
            explored.push(w);
        }
        while absorbed < search.gens.len() {
            uf.absorb(&search.gens[absorbed]);
            absorbed += 1;
        }
        let orbit = uf.class_size(*v);
        order *= orbit;
        log2 += (orbit as f64).log2();
    }

    let best = search.best.as_ref().unwrap();
    let mut certificate = Vec::with_capacity(4 + 8 * best.graph.len());
    certificate.extend_from_slice(&(n as u32).to_le_bytes());
    for w in &best.graph {
        certificate.extend_from_slice(&w.to_le_bytes());
    }
    AutResult {
        group_order: order,
        log2_group_order: log2,
        certificate,
        canonical_labeling: best.lab.clone(),
        nodes: search.nodes,
        generators: search.gens.len(),
    }
}

/// Isomorphism-invariant byte string: equal iff the graphs are isomorphic
/// (within the same vertex count).
pub fn canonical_certificate(g: &EdgeSet) -> Vec<u8> {
    aut_order(g).certificate
}

/// A vertex map `σ` with `σ(from) = to`, if the graphs are isomorphic.
pub fn isomorphism(from: &EdgeSet, to: &EdgeSet) -> Option<Vec<usize>> {
    let (a, b) = (aut_order(from), aut_order(to));
    if a.certificate != b.certificate {
        return None;
    }
    let mut inv = vec![0usize; b.canonical_labeling.len()];
    for (v, &pos) in b.canonical_labeling.iter().enumerate() {
        inv[pos as usize] = v;
    }
    Some(a.canonical_labeling.iter().map(|&pos| inv[pos as usize]).collect())
}

/// Decodes a certificate back into the canonical representative graph.
pub fn certificate_graph(cert: &[u8]) -> Option<EdgeSet> {
    let n = u32::from_le_bytes(cert.get(..4)?.try_into().ok()?) as usize;
    let universe = GraphUniverse::new(n).ok()?;
    let words: Vec<u64> = cert[4..]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    (words.len() == universe.words()).then(|| EdgeSet::from_words(&universe, words))
}
