//! Labeled graphs on a fixed vertex set, stored as bit fields over the
//! edge slots of the complete graph.
//!
//! Slots are numbered row-major over the upper triangle:
//! `(0,1), (0,2), …, (0,n-1), (1,2), …, (n-2,n-1)`.

use std::fmt;
use std::fmt::Write as _;
use std::ops::{BitAnd, BitOr};
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 2048;

/// Star masks are cached per universe up to this many vertices.
const STAR_CACHE_LIMIT: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex count {0} outside supported range 1..={MAX_VERTICES}")]
    UnsupportedSize(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge sets from different universes (n = {left} vs n = {right})")]
    UniverseMismatch { left: usize, right: usize },
    #[error("edge probability {0} not in [0, 1]")]
    InvalidProbability(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate edge {i} {j}")]
    DuplicateEdge { line: usize, i: usize, j: usize },
}

/// The complete graph on `n` labeled vertices.
pub struct GraphUniverse {
    n: usize,
    edge_slots: usize,
    words: usize,
    // slot -> (i, j)
    pairs: Vec<(u32, u32)>,
    // row_offset[i] = slot of (i, i+1)
    row_offset: Vec<usize>,
    stars: Option<Vec<Vec<u64>>>,
}

impl fmt::Debug for GraphUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphUniverse")
            .field("n", &self.n)
            .field("edge_slots", &self.edge_slots)
            .finish()
    }
}

impl GraphUniverse {
    pub fn new(n: usize) -> Result<Arc<Self>, GraphError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(GraphError::UnsupportedSize(n));
        }
        let edge_slots = n * (n - 1) / 2;
        let words = edge_slots.div_ceil(64);
        let mut pairs = Vec::with_capacity(edge_slots);
        let mut row_offset = Vec::with_capacity(n);
        for i in 0..n {
            row_offset.push(pairs.len());
            for j in i + 1..n {
                pairs.push((i as u32, j as u32));
            }
        }
        let mut u = GraphUniverse {
            n,
            edge_slots,
            words,
            pairs,
            row_offset,
            stars: None,
        };
        if n <= STAR_CACHE_LIMIT {
            u.stars = Some((0..n).map(|i| u.star_words(i)).collect());
        }
        Ok(Arc::new(u))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_slots(&self) -> usize {
        self.edge_slots
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Slot of the unordered pair `{i, j}`.
    pub fn edge_index(&self, i: usize, j: usize) -> Result<usize, GraphError> {
        for v in [i, j] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        Ok(self.slot(i.min(j), i.max(j)))
    }

    /// Unchecked slot lookup; requires `i < j < n`.
    #[inline]
    pub fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        self.row_offset[i] + (j - i - 1)
    }

    /// The endpoints `(i, j)`, `i < j`, of a slot.
    #[inline]
    pub fn pair(&self, slot: usize) -> (usize, usize) {
        let (i, j) = self.pairs[slot];
        (i as usize, j as usize)
    }

    fn star_words(&self, i: usize) -> Vec<u64> {
        let mut w = vec![0u64; self.words];
        for j in 0..self.n {
            if j != i {
                let s = self.slot(i.min(j), i.max(j));
                w[s / 64] |= 1 << (s % 64);
            }
        }
        w
    }
}

/// A subset of the edge slots of a [`GraphUniverse`].
#[derive(Clone)]
pub struct EdgeSet {
    universe: Arc<GraphUniverse>,
    words: Vec<u64>,
}

impl PartialEq for EdgeSet {
    fn eq(&self, other: &Self) -> bool {
        self.universe.n == other.universe.n && self.words == other.words
    }
}

impl Eq for EdgeSet {}

impl std::hash::Hash for EdgeSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.universe.n.hash(state);
        self.words.hash(state);
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.edges().map(|(i, j)| format!("{i}-{j}")))
            .finish()
    }
}

impl EdgeSet {
    pub fn empty(universe: &Arc<GraphUniverse>) -> Self {
        EdgeSet {
            universe: Arc::clone(universe),
            words: vec![0; universe.words],
        }
    }

    pub fn complete(universe: &Arc<GraphUniverse>) -> Self {
        let mut e = EdgeSet::empty(universe);
        for s in 0..universe.edge_slots {
            e.words[s / 64] |= 1 << (s % 64);
        }
        e
    }

    /// All edges incident to vertex `i`.
    pub fn star(universe: &Arc<GraphUniverse>, i: usize) -> Result<Self, GraphError> {
        if i >= universe.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: i,
                n: universe.n,
            });
        }
        let words = match &universe.stars {
            Some(stars) => stars[i].clone(),
            None => universe.star_words(i),
        };
        Ok(EdgeSet {
            universe: Arc::clone(universe),
            words,
        })
    }

    pub fn from_edges<I>(universe: &Arc<GraphUniverse>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut e = EdgeSet::empty(universe);
        for (i, j) in edges {
            e.insert(i, j)?;
        }
        Ok(e)
    }

    /// Builds an edge set from raw words; bits beyond the slot count are cleared.
    pub fn from_words(universe: &Arc<GraphUniverse>, mut words: Vec<u64>) -> Self {
        words.resize(universe.words, 0);
        let tail = universe.edge_slots % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        EdgeSet {
            universe: Arc::clone(universe),
            words,
        }
    }

    pub fn universe(&self) -> &Arc<GraphUniverse> {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.universe.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool, GraphError> {
        let s = self.universe.edge_index(i, j)?;
        let fresh = !self.contains_slot(s);
        self.words[s / 64] |= 1 << (s % 64);
        Ok(fresh)
    }

    pub fn contains(&self, i: usize, j: usize) -> Result<bool, GraphError> {
        Ok(self.contains_slot(self.universe.edge_index(i, j)?))
    }

    #[inline]
    pub fn contains_slot(&self, slot: usize) -> bool {
        self.words[slot / 64] >> (slot % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn check_same(&self, other: &EdgeSet) -> Result<(), GraphError> {
        if self.universe.n != other.universe.n {
            return Err(GraphError::UniverseMismatch {
                left: self.universe.n,
                right: other.universe.n,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &EdgeSet) -> Result<EdgeSet, GraphError> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.union_with(other);
        Ok(out)
    }

    pub fn intersect(&self, other: &EdgeSet) -> Result<EdgeSet, GraphError> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.intersect_with(other);
        Ok(out)
    }

    /// In-place union. Panics if the universes differ.
    pub fn union_with(&mut self, other: &EdgeSet) {
        assert_eq!(self.universe.n, other.universe.n, "universe mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// In-place intersection. Panics if the universes differ.
    pub fn intersect_with(&mut self, other: &EdgeSet) {
        assert_eq!(self.universe.n, other.universe.n, "universe mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Edges of `self` not in `other`.
    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        assert_eq!(self.universe.n, other.universe.n, "universe mismatch");
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        out
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Set slots in ascending order.
    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Edges `(i, j)` with `i < j`, in ascending slot order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.slots().map(|s| self.universe.pair(s))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.universe.n];
        for (i, j) in self.edges() {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.universe.n];
        for (i, j) in self.edges() {
            adj[i].push(j as u32);
            adj[j].push(i as u32);
        }
        adj
    }

    /// The image of this graph under the vertex map `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> EdgeSet {
        assert_eq!(perm.len(), self.universe.n);
        let mut out = EdgeSet::empty(&self.universe);
        for (i, j) in self.edges() {
            let (a, b) = (perm[i], perm[j]);
            let s = self.universe.slot(a.min(b), a.max(b));
            out.words[s / 64] |= 1 << (s % 64);
        }
        out
    }

    /// Parses the edge-list text format: a header line `n m`, then `m` lines `i j`
    /// with `0 <= i < j < n`.
    pub fn from_edge_list(text: &str) -> Result<EdgeSet, GraphError> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
        let parse_err = |line: usize, message: &str| GraphError::Parse {
            line,
            message: message.to_string(),
        };
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| parse_err(1, "missing header"))?;
        let (n, m) = parse_pair(header).ok_or_else(|| parse_err(hline, "expected `n m`"))?;
        let universe = GraphUniverse::new(n).map_err(|e| parse_err(hline, &e.to_string()))?;
        let mut g = EdgeSet::empty(&universe);
        let mut seen = 0;
        for (line, l) in lines {
            if l.is_empty() {
                continue;
            }
            let (i, j) = parse_pair(l).ok_or_else(|| parse_err(line, "expected `i j`"))?;
            if j >= n {
                return Err(parse_err(line, &format!("vertex {j} >= n = {n}")));
            }
            if i >= j {
                return Err(parse_err(line, "edge must satisfy i < j"));
            }
            if !g.insert(i, j).map_err(|e| parse_err(line, &e.to_string()))? {
                return Err(GraphError::DuplicateEdge { line, i, j });
            }
            seen += 1;
        }
        if seen != m {
            return Err(parse_err(hline, &format!("header declares {m} edges, found {seen}")));
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.universe.n, self.len());
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

impl BitOr for &EdgeSet {
    type Output = EdgeSet;

    /// Panics on universe mismatch; use [`EdgeSet::union`] for a checked variant.
    fn bitor(self, rhs: &EdgeSet) -> EdgeSet {
        let mut out = self.clone();
        out.union_with(rhs);
        out
    }
}

impl BitAnd for &EdgeSet {
    type Output = EdgeSet;

    fn bitand(self, rhs: &EdgeSet) -> EdgeSet {
        let mut out = self.clone();
        out.intersect_with(rhs);
        out
    }
}

/// Erdős–Rényi sample: each slot present independently with probability `p`.
pub fn er_random<R: Rng + ?Sized>(universe: &Arc<GraphUniverse>, p: f64, rng: &mut R) -> Result<EdgeSet, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut g = EdgeSet::empty(universe);
    for s in 0..universe.edge_slots {
        if rng.gen::<f64>() < p {
            g.words[s / 64] |= 1 << (s % 64);
        }
    }
    Ok(g)
}

/// Deterministic per-graph stream keyed by `(master seed, graph index)`.
pub fn graph_rng(master_seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wheel() -> EdgeSet {
        let u = GraphUniverse::new(5).unwrap();
        let s: Vec<_> = (0..5).map(|i| EdgeSet::star(&u, i).unwrap()).collect();
        let x1 = &s[1] | &s[2];
        let x2 = &s[3] | &s[4];
        &(&s[0] & &(&x1 | &x2)) | &(&x1 & &x2)
    }

    #[test]
    fn edge_index_convention() {
        let u = GraphUniverse::new(4).unwrap();
        assert_eq!(u.edge_index(0, 1).unwrap(), 0);
        assert_eq!(u.edge_index(2, 3).unwrap(), 5);
        assert_eq!(u.edge_index(1, 0).unwrap(), u.edge_index(0, 1).unwrap());
        assert_eq!(u.edge_index(1, 1), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            u.edge_index(0, 4),
            Err(GraphError::VertexOutOfRange { vertex: 4, .. })
        ));
    }

    #[test]
    fn edge_index_bijection() {
        let u = GraphUniverse::new(10).unwrap();
        let mut seen = std::collections::HashSet::new();
        for i in 0..10 {
            for j in i + 1..10 {
                seen.insert(u.edge_index(i, j).unwrap());
            }
        }
        assert_eq!(seen.len(), 45);
        for s in 0..u.edge_slots() {
            let (i, j) = u.pair(s);
            assert_eq!(u.edge_index(i, j).unwrap(), s);
        }
    }

    #[test]
    fn stars() {
        let u = GraphUniverse::new(5).unwrap();
        let s0 = EdgeSet::star(&u, 0).unwrap();
        assert_eq!(s0.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
        let u3 = GraphUniverse::new(3).unwrap();
        let e = &EdgeSet::star(&u3, 0).unwrap() & &EdgeSet::star(&u3, 1).unwrap();
        assert_eq!(e.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let u4 = GraphUniverse::new(4).unwrap();
        let mut k4 = EdgeSet::empty(&u4);
        for i in 0..4 {
            k4.union_with(&EdgeSet::star(&u4, i).unwrap());
        }
        assert_eq!(k4, EdgeSet::complete(&u4));
        assert_eq!(k4.len(), 6);
        assert!(EdgeSet::star(&u4, 4).is_err());
    }

    #[test]
    fn uncached_stars_match() {
        let u = GraphUniverse::new(600).unwrap();
        assert!(u.stars.is_none());
        let s = EdgeSet::star(&u, 599).unwrap();
        assert_eq!(s.len(), 599);
        assert!(s.contains(0, 599).unwrap());
    }

    #[test]
    fn wheel_edges() {
        let w = wheel();
        // Hub 0 with rim cycle 1-3-2-4: the shared-subexpression formula
        // yields a relabeled wheel.
        let expect = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4)];
        let u = w.universe().clone();
        assert_eq!(w, EdgeSet::from_edges(&u, expect).unwrap());
    }

    #[test]
    fn universe_mismatch() {
        let a = EdgeSet::empty(&GraphUniverse::new(4).unwrap());
        let b = EdgeSet::empty(&GraphUniverse::new(5).unwrap());
        assert_eq!(a.union(&b), Err(GraphError::UniverseMismatch { left: 4, right: 5 }));
        assert!(a.intersect(&b).is_err());
    }

    #[test]
    fn er_extremes_and_determinism() {
        let u = GraphUniverse::new(20).unwrap();
        assert!(er_random(&u, 0.0, &mut graph_rng(1, 0)).unwrap().is_empty());
        assert_eq!(er_random(&u, 1.0, &mut graph_rng(1, 0)).unwrap(), EdgeSet::complete(&u));
        assert_eq!(
            er_random(&u, 0.3, &mut graph_rng(9, 4)).unwrap(),
            er_random(&u, 0.3, &mut graph_rng(9, 4)).unwrap()
        );
        assert!(er_random(&u, 1.5, &mut graph_rng(1, 0)).is_err());
        assert!(er_random(&u, f64::NAN, &mut graph_rng(1, 0)).is_err());
    }

    #[test]
    fn er_binomial_spread() {
        // Binomial(4950, 0.5): mean 2475, sd = sqrt(4950 / 4) ≈ 35.18.
        let u = GraphUniverse::new(100).unwrap();
        let sd = (4950.0f64 * 0.25).sqrt();
        let mut total = 0.0;
        for seed in 0..1000 {
            let m = er_random(&u, 0.5, &mut graph_rng(seed, 0)).unwrap().len() as f64;
            assert!((m - 2475.0).abs() <= 4.0 * sd, "seed {seed}: {m}");
            total += m;
        }
        // Mean of 1000 draws has sd ≈ 1.11.
        assert!((total / 1000.0 - 2475.0).abs() < 5.0);
    }

    #[test]
    fn edge_list_io() {
        let g = EdgeSet::from_edge_list("5 2\n0 1\n2 3\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
        let text = wheel().to_edge_list();
        assert_eq!(EdgeSet::from_edge_list(&text).unwrap().to_edge_list(), text);
        assert!(matches!(
            EdgeSet::from_edge_list("5 2\n0 1\n0 1\n"),
            Err(GraphError::DuplicateEdge { line: 3, i: 0, j: 1 })
        ));
        assert!(EdgeSet::from_edge_list("5 1\n1 0\n").is_err());
        assert!(EdgeSet::from_edge_list("5 1\n1 5\n").is_err());
        assert!(EdgeSet::from_edge_list("5 1\n1 x\n").is_err());
        assert!(EdgeSet::from_edge_list("5 2\n0 1\n").is_err());
        assert!(EdgeSet::from_edge_list("").is_err());
    }

    #[test]
    fn from_words_masks_tail() {
        let u = GraphUniverse::new(4).unwrap();
        let e = EdgeSet::from_words(&u, vec![u64::MAX]);
        assert_eq!(e, EdgeSet::complete(&u));
    }
}
