use std::collections::HashSet;

use num_bigint::BigUint;
use rand::Rng;
use starc_core::edgespace::graph_rng;
use starc_core::oracle::{aut_count, isomorphic};
use starc_core::{aut_order, canonical_certificate, isomorphism, EdgeSet, GraphUniverse};

fn all_graphs(n: usize) -> Vec<EdgeSet> {
    let u = GraphUniverse::new(n).unwrap();
    let m = u.edge_slots();
    (0u64..1 << m)
        .map(|bits| EdgeSet::from_edges(&u, (0..m).filter(|k| bits >> k & 1 == 1).map(|k| u.pair(k))).unwrap())
        .collect()
}

#[test]
fn exhaustive_small_orders() {
    for n in 1..=5 {
        for g in all_graphs(n) {
            let r = aut_order(&g);
            assert_eq!(r.group_order, BigUint::from(aut_count(&g)), "{}", g.to_edge_list());
        }
    }
}

#[test]
fn class_counts_from_certificates() {
    // Unlabeled graph counts on 1..=5 vertices.
    for (n, classes) in [(1, 1), (2, 2), (3, 4), (4, 11), (5, 34)] {
        let certs: HashSet<Vec<u8>> = all_graphs(n).iter().map(canonical_certificate).collect();
        assert_eq!(certs.len(), classes, "n={n}");
    }
}

#[test]
fn random_six_vertex_graphs() {
    let u = GraphUniverse::new(6).unwrap();
    for k in 0..500 {
        let mut rng = graph_rng(99, k);
        let p = rng.gen::<f64>();
        let g = starc_core::er_random(&u, p, &mut rng).unwrap();
        assert_eq!(aut_order(&g).group_order, BigUint::from(aut_count(&g)));
        let perm = {
            let mut p: Vec<usize> = (0..6).collect();
            for i in (1..6).rev() {
                p.swap(i, rng.gen_range(0..=i));
            }
            p
        };
        let h = g.relabel(&perm);
        assert_eq!(canonical_certificate(&g), canonical_certificate(&h));
        let s = isomorphism(&g, &h).unwrap();
        assert_eq!(g.relabel(&s), h);
    }
}

#[test]
fn certificates_separate_non_isomorphic_pairs() {
    let mut rng = graph_rng(5, 0);
    let u = GraphUniverse::new(6).unwrap();
    for _ in 0..300 {
        let a = starc_core::er_random(&u, 0.5, &mut rng).unwrap();
        let b = starc_core::er_random(&u, 0.5, &mut rng).unwrap();
        assert_eq!(
            canonical_certificate(&a) == canonical_certificate(&b),
            isomorphic(&a, &b)
        );
    }
}

#[test]
fn named_graphs() {
    let k4 = EdgeSet::complete(&GraphUniverse::new(4).unwrap());
    assert_eq!(aut_order(&k4).group_order, BigUint::from(24u32));
    let w4 = EdgeSet::from_edge_list("5 8\n0 1\n0 2\n0 3\n0 4\n1 2\n2 3\n3 4\n1 4\n").unwrap();
    assert_eq!(aut_order(&w4).group_order, BigUint::from(8u32));
    for n in 1..=30usize {
        let fact = (1..=n as u32).fold(BigUint::from(1u32), |a, i| a * i);
        assert_eq!(
            aut_order(&EdgeSet::empty(&GraphUniverse::new(n).unwrap())).group_order,
            fact
        );
    }
}
