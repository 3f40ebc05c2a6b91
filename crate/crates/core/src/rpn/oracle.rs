//! Reference search for exact star complexity: a shortest-path search over
//! machine states where logic operations cost one and everything else is
//! free. Labels are unrestricted, so this also checks that canonical
//! labeling in the enumerator loses nothing. Small universes only.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use super::RpnError;
use crate::automorphism::canonical_certificate;
use crate::edgespace::{EdgeSet, GraphUniverse};

pub const ORACLE_MAX_N: usize = 6;
pub const ORACLE_MAX_OPS: usize = 4;

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    stack: Vec<EdgeSet>,
    rot_ok: bool,
}

/// Minimal operation count per isomorphism class (keyed by certificate) for
/// every class reachable with at most `s_max` operations.
pub fn oracle_star_bfs(universe: &Arc<GraphUniverse>, s_max: usize) -> Result<BTreeMap<Vec<u8>, usize>, RpnError> {
    let n = universe.n();
    if n > ORACLE_MAX_N || s_max > ORACLE_MAX_OPS {
        return Err(RpnError::BoundsExceeded(format!(
            "oracle limited to n <= {ORACLE_MAX_N} and s <= {ORACLE_MAX_OPS}"
        )));
    }
    let stars: Vec<EdgeSet> = (0..n).map(|i| EdgeSet::star(universe, i).unwrap()).collect();
    let mut visited: HashSet<State> = HashSet::new();
    let mut best: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut finals: HashSet<EdgeSet> = HashSet::new();
    let mut frontier = vec![State {
        stack: Vec::new(),
        rot_ok: false,
    }];
    for k in 0..=s_max {
        let bound = s_max - k + 1;
        // Close the frontier under the free moves.
        let mut level = Vec::new();
        let mut todo: Vec<State> = Vec::new();
        for st in frontier.drain(..) {
            if visited.insert(st.clone()) {
                todo.push(st);
            }
        }
        while let Some(st) = todo.pop() {
            let d = st.stack.len();
            let mut next = Vec::new();
            if d < bound {
                for s in &stars {
                    let mut stack = st.stack.clone();
                    stack.push(s.clone());
                    next.push(State { stack, rot_ok: false });
                }
                if d >= 1 {
                    let mut stack = st.stack.clone();
                    stack.push(st.stack[d - 1].clone());
                    next.push(State { stack, rot_ok: true });
                }
            }
            if st.rot_ok && d >= 2 {
                let mut stack = st.stack.clone();
                let top = stack.pop().unwrap();
                stack.insert(0, top);
                next.push(State { stack, rot_ok: false });
            }
            for s in next {
                if visited.insert(s.clone()) {
                    todo.push(s);
                }
            }
            level.push(st);
        }
        for st in &level {
            if st.stack.len() == 1 && finals.insert(st.stack[0].clone()) {
                best.entry(canonical_certificate(&st.stack[0])).or_insert(k);
            }
        }
        if k == s_max {
            break;
        }
        for st in &level {
            let d = st.stack.len();
            if d < 2 || d - 1 > bound - 1 {
                continue;
            }
            let (a, b) = (&st.stack[d - 2], &st.stack[d - 1]);
            for v in [a & b, a | b] {
                let mut stack = st.stack[..d - 2].to_vec();
                stack.push(v);
                frontier.push(State { stack, rot_ok: true });
            }
        }
    }
    Ok(best)
}
