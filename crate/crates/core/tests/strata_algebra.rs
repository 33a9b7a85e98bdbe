use proptest::prelude::*;
use taut_core::arith::rational::{int, rat};
use taut_core::strata::{generators_of_codim, Generator, TautClass};
use taut_core::Rational;

const TYPES: [(u32, usize); 6] = [(0, 4), (0, 5), (1, 1), (1, 2), (2, 0), (2, 1)];

fn all_generators(g: u32, n: usize) -> Vec<Generator> {
    let dim = 3 * g as usize + n - 3;
    (0..=dim).flat_map(|d| generators_of_codim(g, n, d).unwrap()).collect()
}

fn class_of(g: u32, n: usize, gens: &[Generator], picks: &[(usize, i64)]) -> TautClass {
    let mut t = TautClass::zero(g, n);
    for &(i, c) in picks {
        t.add_generator(gens[i % gens.len()].clone(), Rational::from_integer(c.into()));
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_is_commutative_and_associative(
        ty in 0usize..TYPES.len(),
        a in prop::collection::vec((0usize..400, -3i64..4), 1..3),
        b in prop::collection::vec((0usize..400, -3i64..4), 1..3),
        c in prop::collection::vec((0usize..400, -3i64..4), 1..3),
    ) {
        let (g, n) = TYPES[ty];
        let gens = all_generators(g, n);
        let (x, y, z) = (class_of(g, n, &gens, &a), class_of(g, n, &gens, &b), class_of(g, n, &gens, &c));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y).integrate(), y.mul(&x).integrate());
    }
}

#[test]
fn boundary_divisor_pairings_on_m12_are_symmetric() {
    let divisors: Vec<Generator> = generators_of_codim(1, 2, 1)
        .unwrap()
        .into_iter()
        .filter(|g| g.graph.graph.num_edges() == 1)
        .collect();
    assert_eq!(divisors.len(), 2);
    for d1 in &divisors {
        for d2 in &divisors {
            let mut x = TautClass::zero(1, 2);
            x.add_generator(d1.clone(), int(1));
            let mut y = TautClass::zero(1, 2);
            y.add_generator(d2.clone(), int(1));
            assert_eq!(x.mul(&y).integrate(), y.mul(&x).integrate());
        }
    }
}

#[test]
fn irreducible_divisor_on_m11() {
    // the loop stratum is the pushforward of the point class of M_{0,3}; the
    // irreducible boundary divisor is half of it and psi_1 = delta_irr / 12
    let gens = generators_of_codim(1, 1, 1).unwrap();
    let lp = gens.iter().find(|g| g.graph.graph.num_edges() == 1).unwrap();
    assert_eq!(lp.integral(), int(1));
    assert_eq!(lp.graph.aut_order(), 2);
    assert_eq!(
        rat(1, 12) * rat(1, 2) * lp.integral(),
        TautClass::psi(1, 1, 1, 1).integrate()
    );
}

#[test]
fn divisor_triples_associate_on_genus_two() {
    let divs = generators_of_codim(2, 1, 1).unwrap();
    let single = |g: &Generator| {
        let mut t = TautClass::zero(2, 1);
        t.add_generator(g.clone(), int(1));
        t
    };
    let mut nonzero = 0;
    for (i, a) in divs.iter().enumerate().step_by(2) {
        for b in divs.iter().skip(i).step_by(3) {
            let (x, y) = (single(a), single(b));
            let z = single(&divs[(i + 1) % divs.len()]);
            let left = x.mul(&y).mul(&z);
            assert_eq!(left, x.mul(&y.mul(&z)));
            assert_eq!(x.mul(&y), y.mul(&x));
            nonzero += !left.is_zero() as usize;
        }
    }
    assert!(nonzero > 0);
}
