use proptest::prelude::*;
use starc_core::{EdgeSet, GraphUniverse};

fn graph(n: usize, bits: &[bool]) -> EdgeSet {
    let u = GraphUniverse::new(n).unwrap();
    let edges = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| u.pair(k))
        .collect::<Vec<_>>();
    EdgeSet::from_edges(&u, edges).unwrap()
}

fn triple() -> impl Strategy<Value = (EdgeSet, EdgeSet, EdgeSet)> {
    (2usize..=24).prop_flat_map(|n| {
        let m = n * (n - 1) / 2;
        let v = || proptest::collection::vec(any::<bool>(), m);
        (v(), v(), v()).prop_map(move |(a, b, c)| (graph(n, &a), graph(n, &b), graph(n, &c)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lattice_laws((a, b, c) in triple()) {
        let or = |x: &EdgeSet, y: &EdgeSet| x.union(y).unwrap();
        let and = |x: &EdgeSet, y: &EdgeSet| x.intersect(y).unwrap();
        prop_assert_eq!(or(&a, &b), or(&b, &a));
        prop_assert_eq!(and(&a, &b), and(&b, &a));
        prop_assert_eq!(or(&or(&a, &b), &c), or(&a, &or(&b, &c)));
        prop_assert_eq!(and(&and(&a, &b), &c), and(&a, &and(&b, &c)));
        prop_assert_eq!(or(&a, &a), a.clone());
        prop_assert_eq!(and(&a, &a), a.clone());
        prop_assert_eq!(or(&a, &and(&a, &b)), a.clone());
        prop_assert_eq!(and(&a, &or(&a, &b)), a.clone());
        prop_assert_eq!(and(&a, &or(&b, &c)), or(&and(&a, &b), &and(&a, &c)));
        prop_assert_eq!(or(&a, &and(&b, &c)), and(&or(&a, &b), &or(&a, &c)));
        let u = a.universe();
        prop_assert_eq!(or(&a, &EdgeSet::empty(u)), a.clone());
        prop_assert_eq!(and(&a, &EdgeSet::complete(u)), a.clone());
        prop_assert!(and(&a, &b).is_subset(&a) && a.is_subset(&or(&a, &b)));
        prop_assert_eq!(or(&a, &b).len() + and(&a, &b).len(), a.len() + b.len());
    }

    #[test]
    fn edge_index_is_a_bijection(n in 2usize..200) {
        let u = GraphUniverse::new(n).unwrap();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                prop_assert_eq!(u.slot(i, j), k);
                prop_assert_eq!(u.pair(k), (i, j));
                prop_assert_eq!(u.edge_index(j, i).unwrap(), k);
                k += 1;
            }
        }
        prop_assert_eq!(k, u.edge_slots());
    }

    #[test]
    fn stars_are_the_incident_edges(n in 2usize..40, i in 0usize..40) {
        let i = i % n;
        let u = GraphUniverse::new(n).unwrap();
        let s = EdgeSet::star(&u, i).unwrap();
        prop_assert_eq!(s.len(), n - 1);
        prop_assert!(s.edges().all(|(a, b)| a == i || b == i));
    }
}
