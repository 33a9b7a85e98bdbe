use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use taut_core::intersect::{cache, kappa_psi_integral, psi_integral, IntegralCache, MonomialKey};
use taut_core::Rational;

/// Cycle decompositions of all permutations of `0..m`, as lists of cycles.
fn permutation_cycles(m: usize) -> Vec<Vec<Vec<usize>>> {
    fn perms(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            perms(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut all = Vec::new();
    perms(&mut (0..m).collect(), &mut Vec::new(), &mut all);
    all.into_iter()
        .map(|p| {
            let mut seen = vec![false; m];
            let mut cycles = Vec::new();
            for s in 0..m {
                if seen[s] {
                    continue;
                }
                let mut c = Vec::new();
                let mut x = s;
                while !seen[x] {
                    seen[x] = true;
                    c.push(x);
                    x = p[x];
                }
                cycles.push(c);
            }
            cycles
        })
        .collect()
}

/// Forget m extra points carrying ψ^{a_i + 1}: the pure psi integral upstairs
/// equals the sum over permutations of products of kappa classes indexed by
/// cycle sums.
#[test]
fn kappa_integrals_match_forgetful_pushforward() {
    let cases: Vec<(u32, Vec<u32>, Vec<u32>)> = vec![
        (1, vec![0], vec![1]),
        (0, vec![0, 0, 0, 0], vec![1]),
        (0, vec![0, 0, 0, 0, 0], vec![1, 1]),
        (1, vec![0, 0], vec![1, 1]),
        (1, vec![1], vec![1, 1, 0]),
        (2, vec![], vec![1, 1, 1]),
        (2, vec![], vec![2, 1]),
        (2, vec![1], vec![1, 2]),
        (2, vec![0], vec![1, 1, 1, 1]),
        (3, vec![], vec![2, 2, 2]),
        (3, vec![1], vec![3, 1, 1]),
    ];
    for (g, b, a) in cases {
        let mut upstairs = b.clone();
        upstairs.extend(a.iter().map(|x| x + 1));
        let lhs = psi_integral(g, &upstairs);
        let mut rhs = Rational::default();
        for cycles in permutation_cycles(a.len()) {
            let kappa: Vec<u32> = cycles.iter().map(|c| c.iter().map(|&i| a[i]).sum()).collect();
            rhs += kappa_psi_integral(g, &kappa, &b);
        }
        assert_eq!(lhs, rhs, "g={g} psi={b:?} kappa={a:?}");
    }
}

#[test]
fn known_kappa_values() {
    assert_eq!(kappa_psi_integral(2, &[1, 1, 1], &[]).to_string(), "43/2880");
    assert_eq!(kappa_psi_integral(2, &[3], &[]).to_string(), "1/1152");
    assert_eq!(kappa_psi_integral(0, &[2], &[0, 0, 0, 0, 0]).to_string(), "1");
}

fn random_key(rng: &mut StdRng) -> MonomialKey {
    loop {
        let g = rng.gen_range(0..=3u32);
        let n = rng.gen_range(0..=4usize);
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            continue;
        }
        let mut left = 3 * g as usize + n - 3;
        let mut psi = vec![0u32; n];
        let mut kappa = Vec::new();
        while left > 0 {
            let x = rng.gen_range(1..=left) as u32;
            if n > 0 && rng.gen_bool(0.6) {
                psi[rng.gen_range(0..n)] += x;
            } else {
                kappa.push(x);
            }
            left -= x as usize;
        }
        return MonomialKey::new(g, &psi, &kappa);
    }
}

#[test]
fn cache_round_trip() {
    let mut rng = StdRng::seed_from_u64(100);
    let keys: Vec<MonomialKey> = (0..100).map(|_| random_key(&mut rng)).collect();
    let values: Vec<Rational> = keys.iter().map(|k| kappa_psi_integral(k.g, &k.kappa, &k.psi)).collect();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.txt");
    cache().persist(&path).unwrap();
    let reloaded = IntegralCache::default();
    let count = reloaded.load(&path).unwrap();
    assert!(count > 0);
    for (k, v) in keys.iter().zip(&values) {
        let stored = reloaded
            .get(k)
            .unwrap_or_else(|| panic!("{} missing after reload", k.encode()));
        assert_eq!(&stored, v, "{}", k.encode());
        assert_eq!(&kappa_psi_integral(k.g, &k.kappa, &k.psi), v);
    }
    let persisted: Vec<_> = reloaded.entries();
    for (k, v) in &persisted {
        assert_eq!(&kappa_psi_integral(k.g, &k.kappa, &k.psi), v, "{}", k.encode());
    }
    assert!(persisted.iter().any(|(k, _)| !k.kappa.is_empty()));
}
