//! Witten–Kontsevich intersection numbers and kappa/psi integrals on the
//! moduli spaces of stable curves.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::{Mutex, RwLock};

use crate::arith::rational::{self, Rational};
use crate::error::{Error, Result};

/// Key of a kappa/psi monomial: genus, sorted psi exponents, sorted kappa indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialKey {
    pub g: u32,
    pub psi: Vec<u32>,
    pub kappa: Vec<u32>,
}

impl MonomialKey {
    pub fn new(g: u32, psi: &[u32], kappa: &[u32]) -> Self {
        let mut psi = psi.to_vec();
        psi.sort_unstable();
        let mut kappa = kappa.to_vec();
        kappa.sort_unstable();
        MonomialKey { g, psi, kappa }
    }

    /// `g;b_1,..,b_n;K` as used in the cache file.
    pub fn encode(&self) -> String {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        format!("{};{};{}", self.g, join(&self.psi), join(&self.kappa))
    }

    pub fn decode(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad monomial key {s:?}"));
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let list = |p: &str| -> Result<Vec<u32>> {
            if p.is_empty() {
                return Ok(Vec::new());
            }
            p.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
        };
        Ok(MonomialKey::new(
            parts[0].parse().map_err(|_| bad())?,
            &list(parts[1])?,
            &list(parts[2])?,
        ))
    }
}

/// Memo of computed integrals. Reads are concurrent; writes are serialized.
/// Entries computed since the last [`IntegralCache::persist`] are tracked so the
/// backing file can be appended to.
#[derive(Default)]
pub struct IntegralCache {
    map: RwLock<HashMap<MonomialKey, Rational>>,
    fresh: Mutex<Vec<MonomialKey>>,
}

impl IntegralCache {
    pub fn get(&self, key: &MonomialKey) -> Option<Rational> {
        self.map.read().get(key).cloned()
    }

    pub fn insert(&self, key: MonomialKey, value: Rational) {
        let mut map = self.map.write();
        if !map.contains_key(&key) {
            map.insert(key.clone(), value);
            self.fresh.lock().push(key);
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self) -> Vec<(MonomialKey, Rational)> {
        let mut v: Vec<_> = self.map.read().iter().map(|(k, x)| (k.clone(), x.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Load `g;b;K -> p/q` lines. Loaded entries are not re-appended on persist.
    pub fn load(&self, path: &Path) -> Result<usize> {
        if !path.exists() {
            return Ok(0);
        }
        let file = std::fs::File::open(path).map_err(|e| Error::Io(e.to_string()))?;
        let mut count = 0;
        let mut map = self.map.write();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("bad cache line {line:?}")))?;
            map.insert(MonomialKey::decode(k)?, rational::parse(v)?);
            count += 1;
        }
        Ok(count)
    }

    /// Append every entry computed since the last persist (sorted, so the file
    /// content is deterministic for a given workload).
    pub fn persist(&self, path: &Path) -> Result<usize> {
        let mut fresh = std::mem::take(&mut *self.fresh.lock());
        fresh.sort();
        fresh.dedup();
        let map = self.map.read();
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::Io(e.to_string()))?;
        for k in &fresh {
            writeln!(file, "{} -> {}", k.encode(), rational::to_string(&map[k]))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        Ok(fresh.len())
    }
}

static CACHE: Lazy<IntegralCache> = Lazy::new(IntegralCache::default);

/// The process-wide integral cache.
pub fn cache() -> &'static IntegralCache {
    &CACHE
}

fn double_factorial(n: i64) -> Rational {
    // (-1)!! = 1
    let mut acc = rational::one();
    let mut k = n;
    while k > 1 {
        acc *= rational::int(k);
        k -= 2;
    }
    acc
}

/// `<tau_{b_1} ... tau_{b_n}>_g`; zero unless the dimension constraint holds.
pub fn psi_integral(g: u32, b: &[u32]) -> Rational {
    let n = b.len();
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return rational::zero();
    }
    if b.iter().map(|&x| x as usize).sum::<usize>() != 3 * g as usize + n - 3 {
        return rational::zero();
    }
    let key = MonomialKey::new(g, b, &[]);
    if let Some(v) = CACHE.get(&key) {
        return v;
    }
    let value = psi_recursion(g, &key.psi);
    CACHE.insert(key, value.clone());
    value
}

fn psi_recursion(g: u32, b: &[u32]) -> Rational {
    let n = b.len();
    if g == 0 && n == 3 {
        return rational::one();
    }
    if g == 1 && n == 1 {
        return rational::rat(1, 24);
    }
    // string equation
    if let Some(pos) = b.iter().position(|&x| x == 0) {
        let mut rest = b.to_vec();
        rest.remove(pos);
        let mut total = rational::zero();
        for i in 0..rest.len() {
            if rest[i] > 0 {
                let mut c = rest.clone();
                c[i] -= 1;
                total += psi_integral(g, &c);
            }
        }
        return total;
    }
    // dilaton equation
    if let Some(pos) = b.iter().position(|&x| x == 1) {
        let mut rest = b.to_vec();
        rest.remove(pos);
        return rational::int(2 * g as i64 - 2 + n as i64 - 1) * psi_integral(g, &rest);
    }
    // DVV, peeling off the largest exponent k + 1
    let (&top, rest) = b.split_last().expect("nonempty");
    let k = top as i64 - 1;
    let mut total = rational::zero();
    for j in 0..rest.len() {
        let dj = rest[j] as i64;
        let mut c: Vec<u32> = rest.to_vec();
        c[j] = (k + dj) as u32;
        total += double_factorial(2 * k + 2 * dj + 1) / double_factorial(2 * dj - 1) * psi_integral(g, &c);
    }
    let half = rational::rat(1, 2);
    for a in 0..k {
        let bb = k - 1 - a;
        let w = double_factorial(2 * a + 1) * double_factorial(2 * bb + 1) * &half;
        if g >= 1 {
            let mut c = rest.to_vec();
            c.push(a as u32);
            c.push(bb as u32);
            total += &w * psi_integral(g - 1, &c);
        }
        let m = rest.len();
        for mask in 0u32..(1 << m) {
            let (mut left, mut right) = (vec![a as u32], vec![bb as u32]);
            for (i, &x) in rest.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(x);
                } else {
                    right.push(x);
                }
            }
            for g1 in 0..=g {
                let l = psi_integral(g1, &left);
                if l.is_zero() {
                    continue;
                }
                total += &w * l * psi_integral(g - g1, &right);
            }
        }
    }
    total / double_factorial(2 * k + 3)
}

/// `\int kappa_{K} prod psi_i^{b_i}` over the moduli space of genus `g` with
/// `b.len()` markings. Each kappa factor is traded for an extra marked point,
/// with inclusion-exclusion over the kappas it collides with.
pub fn kappa_psi_integral(g: u32, kappa: &[u32], b: &[u32]) -> Rational {
    let n = b.len();
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return rational::zero();
    }
    let deg: usize = kappa.iter().chain(b).map(|&x| x as usize).sum();
    if deg != 3 * g as usize + n - 3 {
        return rational::zero();
    }
    if kappa.is_empty() {
        return psi_integral(g, b);
    }
    let key = MonomialKey::new(g, b, kappa);
    if let Some(v) = CACHE.get(&key) {
        return v;
    }
    let (&last, others) = key.kappa.split_last().unwrap();
    let m = others.len();
    let mut total = rational::zero();
    for mask in 0u32..(1 << m) {
        let mut extra = last + 1;
        let mut remaining = Vec::new();
        for (i, &a) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                extra += a;
            } else {
                remaining.push(a);
            }
        }
        let mut psi = key.psi.clone();
        psi.push(extra);
        let term = kappa_psi_integral(g, &remaining, &psi);
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    CACHE.insert(key, total.clone());
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{factorial, int, rat};

    #[test]
    fn known_values() {
        assert_eq!(psi_integral(0, &[0, 0, 0]), int(1));
        assert_eq!(psi_integral(1, &[1]), rat(1, 24));
        assert_eq!(psi_integral(2, &[4]), rat(1, 1152));
        assert_eq!(psi_integral(2, &[2, 3]), rat(29, 5760));
        assert_eq!(psi_integral(2, &[2, 2, 2]), rat(7, 240));
        assert_eq!(psi_integral(3, &[7]), rat(1, 82944));
        assert_eq!(psi_integral(1, &[0]), int(0));
        assert_eq!(psi_integral(0, &[1, 0, 0]), int(0));
    }

    #[test]
    fn genus_zero_closed_formula() {
        // (n-3)! / prod b_i!
        fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
            if parts == 1 {
                return vec![vec![total]];
            }
            (0..=total)
                .flat_map(|x| {
                    compositions(total - x, parts - 1).into_iter().map(move |mut v| {
                        v.push(x);
                        v
                    })
                })
                .collect()
        }
        for n in 3..=8usize {
            for b in compositions(n as u32 - 3, n) {
                let expected = b.iter().fold(factorial(n as u32 - 3), |acc, &x| acc / factorial(x));
                assert_eq!(psi_integral(0, &b), expected, "b = {b:?}");
            }
        }
    }

    #[test]
    fn kappa_conversion() {
        assert_eq!(kappa_psi_integral(1, &[1], &[0]), rat(1, 24));
        assert_eq!(kappa_psi_integral(0, &[1], &[0, 0, 0, 0]), int(1));
        assert_eq!(kappa_psi_integral(2, &[], &[4]), psi_integral(2, &[4]));
        // kappa_1 on M_{0,5}: integral of kappa_1^2 is 5
        assert_eq!(kappa_psi_integral(0, &[1, 1], &[0; 5]), int(5));
        // lambda_1 = kappa_1/12 on M_{1,1}... <kappa_1>_{1,1} = 1/24
        assert_eq!(kappa_psi_integral(2, &[3], &[]), rat(1, 1152));
    }

    #[test]
    fn monomial_key_round_trip() {
        let k = MonomialKey::new(2, &[3, 0, 1], &[2, 1]);
        assert_eq!(MonomialKey::decode(&k.encode()).unwrap(), k);
        let e = MonomialKey::new(0, &[], &[]);
        assert_eq!(MonomialKey::decode(&e.encode()).unwrap(), e);
    }
}
