use std::collections::HashSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use taut_core::graphs::{enumerate_stable_graphs, enumerate_weightings};
use taut_core::StableGraph;

const PAIRS: [(u32, usize); 8] = [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1)];

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn relabel(gr: &StableGraph, rng: &mut StdRng) -> StableGraph {
    let v = gr.num_vertices();
    let mut perm: Vec<usize> = (0..v).collect();
    perm.shuffle(rng);
    let mut genera = vec![0; v];
    for (old, &new) in perm.iter().enumerate() {
        genera[new] = gr.genera()[old];
    }
    let legs = gr.legs().iter().map(|&x| perm[x]).collect();
    let mut edges: Vec<(usize, usize)> = gr
        .edges()
        .iter()
        .map(|&(a, b)| {
            if rng.gen_bool(0.5) {
                (perm[a], perm[b])
            } else {
                (perm[b], perm[a])
            }
        })
        .collect();
    edges.shuffle(rng);
    StableGraph::new(genera, legs, edges).unwrap()
}

#[test]
fn canonical_key_survives_random_relabeling() {
    let graphs = enumerate_stable_graphs(2, 3).unwrap();
    let mut rng = StdRng::seed_from_u64(0x2_3);
    for _ in 0..1000 {
        let gr = graphs.choose(&mut rng).unwrap();
        let other = relabel(gr, &mut rng);
        assert_eq!(other.canonical_key(), gr.canonical_key());
        assert!(other.isomorphic(gr));
    }
}

#[test]
fn enumeration_is_duplicate_free_and_stable() {
    for (g, n) in PAIRS.into_iter().chain([(2, 2), (3, 0)]) {
        let graphs = enumerate_stable_graphs(g, n).unwrap();
        let keys: HashSet<_> = graphs.iter().map(|gr| gr.canonical_key()).collect();
        assert_eq!(keys.len(), graphs.len(), "duplicates for ({g},{n})");
        for gr in &graphs {
            assert!(gr.validate().is_ok());
            assert_eq!(gr.genus(), g);
            assert_eq!(gr.n(), n);
            let sum: u32 = gr.genera().iter().sum();
            assert_eq!(sum as usize + gr.h1(), g as usize);
            for v in 0..gr.num_vertices() {
                assert!(2 * gr.genera()[v] as usize + gr.val(v) > 2);
            }
        }
    }
}

#[test]
fn automorphism_order_is_bounded() {
    for (g, n) in PAIRS {
        for gr in enumerate_stable_graphs(g, n).unwrap() {
            let genus_classes = {
                let mut counts = std::collections::BTreeMap::new();
                for &x in gr.genera() {
                    *counts.entry(x).or_insert(0usize) += 1;
                }
                counts.values().map(|&c| factorial(c)).product::<usize>()
            };
            let bound = genus_classes * (1usize << gr.num_edges()) * factorial(gr.num_edges());
            assert_eq!(bound % gr.automorphism_order(), 0, "({g},{n}) {:?}", gr.to_json());
        }
    }
}

#[test]
fn weightings_form_torsors_under_the_cycle_space() {
    let cases: [(u32, &[i64], i64); 6] = [
        (1, &[0], 0),
        (1, &[1, -1], 0),
        (1, &[2, 1, -3], 0),
        (2, &[0], 0),
        (2, &[3], 1),
        (1, &[3, -1], 1),
    ];
    for r in [3u32, 4, 5] {
        for (g, a, k) in cases {
            let graphs = enumerate_stable_graphs(g, a.len()).unwrap();
            let total: usize = graphs.iter().map(|gr| enumerate_weightings(gr, a, k, r).len()).sum();
            let expected: usize = graphs.iter().map(|gr| (r as usize).pow(gr.h1() as u32)).sum();
            assert_eq!(total, expected, "g={g} A={a:?} k={k} r={r}");
            // shifting one marking breaks the global congruence everywhere
            let mut bad = a.to_vec();
            bad[0] += 1;
            assert!(graphs.iter().all(|gr| enumerate_weightings(gr, &bad, k, r).is_empty()));
        }
    }
}
