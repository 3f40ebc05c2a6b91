use std::collections::BTreeMap;
use std::str::FromStr;

use proptest::prelude::*;
use starc_core::circuit::denoted_graph;
use starc_core::greedy::star_upper_greedy;
use starc_core::rpn::{
    collect_programs, enumerate_programs, oracle_star_bfs, walk_star_table, EnumOptions, RpnProgram, RpnSymbol,
    WalkConfig,
};
use starc_core::GraphUniverse;

#[test]
fn walker_matches_oracle() {
    for n in 1..=5 {
        let u = GraphUniverse::new(n).unwrap();
        for s in 0..=4 {
            let table = walk_star_table(&u, &WalkConfig::new(s)).unwrap();
            let walked: BTreeMap<Vec<u8>, usize> = table.entries.iter().map(|(c, e)| (c.clone(), e.star)).collect();
            let oracle = oracle_star_bfs(&u, s).unwrap();
            assert_eq!(walked, oracle, "n={n} s={s}");
        }
    }
}

#[test]
fn oracle_agrees_at_six_vertices() {
    let u = GraphUniverse::new(6).unwrap();
    let table = walk_star_table(&u, &WalkConfig::new(3)).unwrap();
    let walked: BTreeMap<Vec<u8>, usize> = table.entries.iter().map(|(c, e)| (c.clone(), e.star)).collect();
    assert_eq!(walked, oracle_star_bfs(&u, 3).unwrap());
}

#[test]
fn enumerated_masks_match_evaluation() {
    let u = GraphUniverse::new(6).unwrap();
    for s in 0..=3 {
        let mut checked = 0;
        enumerate_programs(&u, s, EnumOptions::default(), |syms, mask| {
            let g = RpnProgram::new(syms.to_vec()).eval(&u).unwrap();
            let want: u128 = g.slots().fold(0, |m, k| m | 1 << k);
            assert_eq!(mask, want);
            checked += 1;
            true
        })
        .unwrap();
        assert!(checked > 0);
    }
}

#[test]
fn every_program_is_valid_and_counted() {
    let u = GraphUniverse::new(7).unwrap();
    for s in 0..=3 {
        for p in collect_programs(&u, s, EnumOptions::default()).unwrap() {
            let stats = p.validate().unwrap();
            assert_eq!((p.ops(), stats.ops), (s, s));
            assert_eq!(stats.length, p.symbols().len());
        }
    }
}

#[test]
fn greedy_bounds_dominate_walk() {
    let u = GraphUniverse::new(8).unwrap();
    let table = walk_star_table(&u, &WalkConfig::new(4)).unwrap();
    for e in table.entries.values() {
        let r = star_upper_greedy(&e.graph).unwrap();
        assert!(r.op_count >= e.star, "{}", e.graph.to_edge_list());
        assert_eq!(denoted_graph(&r.circuit, &u).unwrap(), e.graph);
    }
}

fn symbol() -> impl Strategy<Value = RpnSymbol> {
    prop_oneof![
        (0u32..40).prop_map(RpnSymbol::Push),
        Just(RpnSymbol::And),
        Just(RpnSymbol::Or),
        Just(RpnSymbol::Dup),
        Just(RpnSymbol::Rot),
    ]
}

proptest! {
    #[test]
    fn print_parse_round_trip(symbols in proptest::collection::vec(symbol(), 0..40)) {
        let p = RpnProgram::new(symbols);
        let text = p.to_string();
        prop_assert_eq!(RpnProgram::from_str(&text).unwrap(), p.clone());
        prop_assert_eq!(RpnProgram::from_str(&text).unwrap().to_string(), text);
    }

    #[test]
    fn unicode_tokens_parse_alike(a in 0u32..5, b in 0u32..5) {
        let ascii = RpnProgram::from_str(&format!("{a} d {b} | r &")).unwrap();
        let uni = RpnProgram::from_str(&format!("{a} ⇓ {b} ∪ ↕ ∩")).unwrap();
        prop_assert_eq!(ascii, uni);
    }
}

#[test]
fn junk_tokens_are_rejected() {
    for bad in ["0 x", "+1", "1.0", "0 1 &&"] {
        assert!(RpnProgram::from_str(bad).is_err(), "{bad}");
    }
}
