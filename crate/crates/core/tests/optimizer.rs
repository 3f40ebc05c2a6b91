use rand::Rng;
use starc_core::circuit::{denoted_graph, gate_count, optimize, star_upper_opt, CircuitDag, OptimizeConfig, Pass};
use starc_core::edgespace::graph_rng;
use starc_core::greedy::{baseline_cover, greedy_factor};
use starc_core::{er_random, EdgeSet, GraphUniverse};

fn random_graphs(count: u64, n: usize) -> Vec<EdgeSet> {
    let u = GraphUniverse::new(n).unwrap();
    (0..count)
        .map(|k| {
            let mut rng = graph_rng(2024, k);
            let p = 0.02 + 0.96 * rng.gen::<f64>();
            er_random(&u, p, &mut rng).unwrap()
        })
        .collect()
}

fn seeds(g: &EdgeSet) -> Vec<CircuitDag> {
    vec![baseline_cover(g).unwrap().circuit, greedy_factor(g).unwrap().circuit]
}

const PASSES: [Pass; 4] = [Pass::Hash, Pass::Lattice, Pass::ExtractPairs, Pass::Distribute];

#[test]
fn every_pass_preserves_the_graph_and_never_grows() {
    for g in random_graphs(200, 30) {
        let u = g.universe();
        for seed in seeds(&g) {
            let mut c = seed;
            for round in 0..3 {
                for pass in PASSES {
                    let next = pass.apply(&c);
                    assert_eq!(denoted_graph(&next, u).unwrap(), g, "{pass:?} round {round}");
                    assert!(gate_count(&next) <= gate_count(&c), "{pass:?} grew the circuit");
                    c = next;
                }
            }
        }
    }
}

#[test]
fn optimize_is_idempotent_and_never_worse() {
    let cfg = OptimizeConfig::default();
    for g in random_graphs(200, 30) {
        let u = g.universe();
        for seed in seeds(&g) {
            let once = optimize(&seed, &cfg);
            assert!(gate_count(&once) <= gate_count(&seed));
            assert_eq!(denoted_graph(&once, u).unwrap(), g);
            let twice = optimize(&once, &cfg);
            assert_eq!(gate_count(&twice), gate_count(&once));
            assert_eq!(denoted_graph(&twice, u).unwrap(), g);
        }
        let r = star_upper_opt(&g, &cfg).unwrap();
        assert!(r.count <= r.greedy_count && r.count <= r.baseline_count);
        assert_eq!(gate_count(&r.circuit), r.count);
    }
}

#[test]
fn zero_rounds_returns_the_seed() {
    let cfg = OptimizeConfig {
        max_rounds: 0,
        ..OptimizeConfig::default()
    };
    for g in random_graphs(5, 20) {
        for seed in seeds(&g) {
            assert_eq!(gate_count(&optimize(&seed, &cfg)), gate_count(&seed));
        }
    }
}

#[test]
fn external_failures_fall_back_to_native() {
    let g = EdgeSet::from_edge_list("5 8\n0 1\n0 2\n0 3\n0 4\n1 2\n2 3\n3 4\n1 4\n").unwrap();
    let native = star_upper_opt(&g, &OptimizeConfig::default()).unwrap();
    for cmd in ["no-such-synthesis-tool-xyz {in}", "exit 7", "echo nothing useful"] {
        let cfg = OptimizeConfig {
            external_command: Some(cmd.into()),
            ..OptimizeConfig::default()
        };
        let r = star_upper_opt(&g, &cfg).unwrap();
        assert_eq!(r.count, native.count);
        assert!(matches!(r.external, Some(Err(_))), "{cmd}");
    }
    let cfg = OptimizeConfig {
        external_command: Some("echo 'and = 5'; test -s {in}".into()),
        ..OptimizeConfig::default()
    };
    let r = star_upper_opt(&g, &cfg).unwrap();
    assert_eq!(r.external.unwrap().unwrap().count, 5);
    assert_eq!(r.count, native.count);
}
