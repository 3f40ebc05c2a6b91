//! Brute-force reference computations over all vertex permutations.
//!
//! Exponential in `n`; intended for cross-checking the fast paths on small
//! graphs.

use crate::edgespace::EdgeSet;

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Number of vertex permutations fixing the edge set.
pub fn aut_count(g: &EdgeSet) -> u64 {
    permutations(g.n()).iter().filter(|p| g.relabel(p) == *g).count() as u64
}

pub fn isomorphic(a: &EdgeSet, b: &EdgeSet) -> bool {
    a.n() == b.n() && a.len() == b.len() && permutations(a.n()).iter().any(|p| a.relabel(p) == *b)
}

/// Number of distinct labeled graphs obtained by relabeling `g`.
pub fn labeled_copies(g: &EdgeSet) -> u64 {
    let mut seen = std::collections::HashSet::new();
    for p in permutations(g.n()) {
        seen.insert(g.relabel(&p).words().to_vec());
    }
    seen.len() as u64
}
