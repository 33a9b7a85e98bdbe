use std::collections::BTreeSet;

use taut_core::arith::rational::rat;
use taut_core::graphs::enumerate_stable_graphs;
use taut_core::pixton::pixton_class;
use taut_core::strata::generators_of_codim;
use taut_core::verify::{verify_dr_vanishing, verify_relation};
use taut_core::{Decoration, Generator, PixtonInput, RSamplePolicy, StableGraph, TautClass};

/// Move marking `i` to `sigma[i]`.
fn relabel_generator(gen: &Generator, sigma: &[usize]) -> Generator {
    let gr = &gen.graph.graph;
    let n = gr.n();
    let mut legs = vec![0; n];
    let mut psi = gen.deco.psi.clone();
    for i in 0..n {
        legs[sigma[i]] = gr.legs()[i];
        psi[sigma[i]] = gen.deco.psi[i];
    }
    let graph = StableGraph::new(gr.genera().to_vec(), legs, gr.edges().to_vec()).unwrap();
    let deco = Decoration {
        weights: Vec::new(),
        kappa: gen.deco.kappa.clone(),
        psi,
    };
    Generator::new(&graph, deco).expect("relabeling keeps the generator admissible")
}

fn relabel(t: &TautClass, sigma: &[usize]) -> TautClass {
    let mut out = TautClass::zero(t.genus(), t.n());
    for (gen, c) in t.terms() {
        out.add_generator(relabel_generator(gen, sigma), c.clone());
    }
    out
}

#[test]
fn pixton_class_is_equivariant_under_relabeling() {
    let policy = RSamplePolicy::default();
    let cases: [(u32, &[i64], i64, usize); 3] = [
        (1, &[2, 1, -3], 0, 3),
        (0, &[3, -1, -1, -1], 0, 1),
        (1, &[4, -1, 0], 1, 2),
    ];
    for (g, a, k, d) in cases {
        let base = pixton_class(&PixtonInput::new(g, a, k).unwrap().with_max_codim(d).unwrap(), &policy).unwrap();
        let n = a.len();
        let sigma: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let mut moved = vec![0; n];
        for i in 0..n {
            moved[sigma[i]] = a[i];
        }
        let other = pixton_class(
            &PixtonInput::new(g, &moved, k).unwrap().with_max_codim(d).unwrap(),
            &policy,
        )
        .unwrap();
        assert_eq!(relabel(&base, &sigma), other, "g={g} A={a:?}");
    }
}

#[test]
fn certificates_do_not_depend_on_thread_count() {
    let run = || {
        let certs = verify_dr_vanishing(1, &[2, 1, -3], 0, None, &RSamplePolicy::default()).unwrap();
        certs.iter().map(|c| c.to_json(false).to_string()).collect::<Vec<_>>()
    };
    let reference = run();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        assert_eq!(pool.install(run), reference, "{threads} threads");
    }
}

#[test]
fn non_relations_fail_on_every_tested_type() {
    for (g, n) in [(1u32, 1usize), (1, 2), (1, 3), (2, 0), (2, 1)] {
        let dim = 3 * g as usize + n - 3;
        let kappa_top = TautClass::kappa(g, n, 1).pow(dim as u32);
        let cert = verify_relation(&kappa_top, dim).unwrap();
        assert!(!cert.holds, "kappa_1^dim on ({g},{n})");
        let one = verify_relation(&TautClass::one(g, n), 0).unwrap();
        assert!(!one.holds, "fundamental class on ({g},{n})");
    }
    let cert = verify_relation(&TautClass::psi(1, 1, 1, 1), 1).unwrap();
    assert_eq!(
        cert.nonzero_pairings().map(|(_, v)| v.clone()).collect::<Vec<_>>(),
        vec![rat(1, 24)]
    );
}

/// Number of (psi exponent vector, kappa partition) pairs of total degree d on one vertex.
fn smooth_monomials(n: usize, d: usize) -> usize {
    fn partitions(d: usize, max: usize) -> usize {
        if d == 0 {
            return 1;
        }
        (1..=max.min(d)).map(|p| partitions(d - p, p)).sum()
    }
    fn compositions(slots: usize, d: usize) -> usize {
        if slots == 0 {
            return (d == 0) as usize;
        }
        (0..=d).map(|x| compositions(slots - 1, d - x)).sum()
    }
    (0..=d).map(|j| compositions(n, j) * partitions(d - j, d - j)).sum()
}

#[test]
fn pairing_partners_are_complete() {
    for (g, n) in [(0u32, 5usize), (1, 2), (1, 3), (2, 1), (2, 2)] {
        let dim = 3 * g as usize + n - 3;
        let graphs = enumerate_stable_graphs(g, n).unwrap();
        let keys: BTreeSet<_> = graphs.iter().map(|gr| gr.canonical_key()).collect();
        for d in 0..=dim {
            let gens = generators_of_codim(g, n, d).unwrap();
            let smooth = gens.iter().filter(|x| x.graph.graph.num_edges() == 0).count();
            assert_eq!(smooth, smooth_monomials(n, d), "({g},{n}) d={d}");
            for x in &gens {
                assert!(keys.contains(&x.graph.graph.canonical_key()));
                assert_eq!(x.codim(), d);
            }
            // every stratum of codimension d appears undecorated
            let strata: BTreeSet<_> = gens
                .iter()
                .filter(|x| x.deco.degree() == 0)
                .map(|x| x.graph.graph.canonical_key())
                .collect();
            let expected: BTreeSet<_> = graphs
                .iter()
                .filter(|gr| gr.num_edges() == d)
                .map(|gr| gr.canonical_key())
                .collect();
            assert_eq!(strata, expected, "({g},{n}) d={d}");
        }
    }
}
