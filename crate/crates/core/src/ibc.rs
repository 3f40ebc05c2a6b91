//! Information-based complexity of a graph under the edge-list encoding.
//!
//! A description is a header of `κ(n) = ⌈log2(n+1)⌉` bits followed by `L`
//! records of two `⌈log2 n⌉`-bit vertex ids. It is valid when it has no
//! self-loops and repeats no undirected edge, and two descriptions are
//! equivalent when their edge sets are isomorphic. The number of
//! descriptions equivalent to `G` is
//!
//! ```text
//! ω = (n! / |Aut(G)|) · L! · 2^L
//! ```
//!
//! and the complexity is `C = κ(n) + 2·L·⌈log2 n⌉ − log2 ω`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::automorphism::{aut_order, AutResult};
use crate::edgespace::EdgeSet;
use crate::oracle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IbcError {
    #[error("brute-force enumeration limited to n <= 4 and L <= 3 (got n = {n}, L = {edges})")]
    BoundsExceeded { n: usize, edges: usize },
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// Bit costs of the edge-list description language for a fixed `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EncodingModel {
    pub n: usize,
    pub bits_per_vertex: u32,
    pub header_bits: u32,
}

impl EncodingModel {
    pub fn new(n: usize) -> Self {
        EncodingModel {
            n,
            bits_per_vertex: ceil_log2(n),
            header_bits: ceil_log2(n + 1),
        }
    }

    /// Length in bits of a description with `edges` records.
    pub fn description_bits(&self, edges: usize) -> f64 {
        self.header_bits as f64 + 2.0 * edges as f64 * self.bits_per_vertex as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityValue {
    pub c_bits: f64,
    pub log2_omega: f64,
    pub edge_count: usize,
    pub kappa: f64,
    pub log2_aut: f64,
}

/// `log2` of an exact integer, a function of the value alone.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// `log2 ω = log2(n!/|Aut|) + log2(L!) + L`, taken from the exact integer
/// so that equal values give identical floats. Clamped at zero.
pub fn description_count_log2(g: &EdgeSet, aut: &AutResult) -> f64 {
    log2_biguint(&omega_exact(g.n(), g.len(), &aut.group_order)).max(0.0)
}

/// Exact `ω` for the closed form; `|Aut|` divides `n!`.
pub fn omega_exact(n: usize, edges: usize, group_order: &BigUint) -> BigUint {
    let fact = |k: usize| (1..=k as u64).fold(BigUint::one(), |acc, i| acc * i);
    let labeled = fact(n) / group_order;
    (labeled * fact(edges)) << edges
}

pub fn complexity_from(g: &EdgeSet, aut: &AutResult) -> ComplexityValue {
    let model = EncodingModel::new(g.n());
    let l = g.len();
    let log2_omega = description_count_log2(g, aut);
    ComplexityValue {
        c_bits: model.description_bits(l) - log2_omega,
        log2_omega,
        edge_count: l,
        kappa: model.header_bits as f64,
        log2_aut: log2_biguint(&aut.group_order),
    }
}

pub fn complexity_c(g: &EdgeSet) -> ComplexityValue {
    complexity_from(g, &aut_order(g))
}

/// Counts, by exhaustive enumeration, the ordered-pair sequences of length
/// `L` (no self-loops, no repeated undirected edge) whose edge set is
/// isomorphic to `g`.
pub fn brute_force_omega(g: &EdgeSet) -> Result<u64, IbcError> {
    let n = g.n();
    let l = g.len();
    if n > 4 || l > 3 {
        return Err(IbcError::BoundsExceeded { n, edges: l });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut count = 0;
    let mut seq = Vec::with_capacity(l);
    fn walk(g: &EdgeSet, pairs: &[(usize, usize)], seq: &mut Vec<(usize, usize)>, count: &mut u64) {
        if seq.len() == g.len() {
            let mut h = EdgeSet::empty(g.universe());
            for &(a, b) in seq.iter() {
                if !h.insert(a, b).unwrap() {
                    return;
                }
            }
            if oracle::isomorphic(&h, g) {
                *count += 1;
            }
            return;
        }
        for &p in pairs {
            seq.push(p);
            walk(g, pairs, seq, count);
            seq.pop();
        }
    }
    walk(g, &pairs, &mut seq, &mut count);
    Ok(count)
}
