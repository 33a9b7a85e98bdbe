//! Certification of relations by exact pairing against every generator of
//! complementary codimension, and cross-checks between constructions.

use std::time::Instant;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::rational::{self, Rational};
use crate::cohft::{chern_exponential_rmatrix, ChernKind};
use crate::error::{Error, Result};
use crate::pixton::{
    hain_class, hain_power, pixton_class, rpoly_from_samples, sample_points_for, PixtonInput, RSamplePolicy,
};
use crate::strata::{generators_of_codim, Generator, TautClass};

#[derive(Clone, Debug)]
pub struct RelationCertificate {
    pub g: u32,
    pub n: usize,
    pub a: Option<Vec<i64>>,
    pub k: Option<i64>,
    pub d: usize,
    pub pairings: Vec<(Generator, Rational)>,
    pub holds: bool,
    pub elapsed_ms: u128,
}

impl RelationCertificate {
    pub fn nonzero_pairings(&self) -> impl Iterator<Item = &(Generator, Rational)> {
        self.pairings.iter().filter(|(_, v)| !v.is_zero())
    }

    /// JSON with every pairing value; timing only on request so that output is reproducible.
    pub fn to_json(&self, with_timing: bool) -> Value {
        let pairings: Vec<Value> = self
            .pairings
            .iter()
            .map(|(gen, v)| {
                let mut j = gen.to_json();
                j["pairing"] = json!(rational::to_string(v));
                j
            })
            .collect();
        let mut out = json!({
            "g": self.g,
            "n": self.n,
            "A": self.a,
            "k": self.k,
            "d": self.d,
            "verdict": if self.holds { "holds" } else { "fails" },
            "pairings": pairings,
        });
        if with_timing {
            out["elapsed_ms"] = json!(self.elapsed_ms);
        }
        out
    }
}

/// Pair the codim-`d` part of `t` with all generators of codim `dim - d`.
pub fn verify_relation(t: &TautClass, d: usize) -> Result<RelationCertificate> {
    let start = Instant::now();
    let (g, n) = (t.genus(), t.n());
    let dim = t.dim();
    if d > dim {
        return Err(Error::InvalidInput(format!("degree {d} exceeds the dimension {dim}")));
    }
    let part = t.graded_part(d);
    let others = generators_of_codim(g, n, dim - d)?;
    let pairings: Vec<(Generator, Rational)> = others
        .into_par_iter()
        .map(|gen| {
            let v = if part.is_zero() {
                rational::zero()
            } else {
                let mut single = TautClass::zero(g, n);
                single.add_generator(gen.clone(), rational::one());
                part.mul(&single).integrate()
            };
            (gen, v)
        })
        .collect();
    let holds = pairings.iter().all(|(_, v)| v.is_zero());
    Ok(RelationCertificate {
        g,
        n,
        a: None,
        k: None,
        d,
        pairings,
        holds,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Certificates for `[Ω_{g,A,k}]_d`, `d` ranging over `degrees` (default `g+1..=dim`).
pub fn verify_dr_vanishing(
    g: u32,
    a: &[i64],
    k: i64,
    degrees: Option<Vec<usize>>,
    policy: &RSamplePolicy,
) -> Result<Vec<RelationCertificate>> {
    let input = PixtonInput::new(g, a, k)?;
    input.check_balanced()?;
    let degrees = degrees.unwrap_or_else(|| (g as usize + 1..=input.dim()).collect());
    if degrees.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(&bad) = degrees.iter().find(|&&d| d <= g as usize || d > input.dim()) {
        return Err(Error::InvalidInput(format!("degree {bad} is outside g+1..=3g-3+n")));
    }
    let top = *degrees.iter().max().expect("nonempty");
    let start = Instant::now();
    let omega = pixton_class(&input.with_max_codim(top)?, policy)?;
    let setup = start.elapsed().as_millis();
    degrees
        .iter()
        .map(|&d| {
            let mut c = verify_relation(&omega, d)?;
            c.a = Some(a.to_vec());
            c.k = Some(k);
            c.elapsed_ms += setup;
            Ok(c)
        })
        .collect()
}

/// Outcome of comparing classes built in different ways.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub name: String,
    pub equal: bool,
    /// Per-degree lines describing agreement.
    pub report: Vec<String>,
    pub diff: Option<TautClass>,
}

impl Comparison {
    pub fn to_json(&self) -> Value {
        json!({
            "comparison": self.name,
            "equal": self.equal,
            "report": self.report,
            "difference": self.diff.as_ref().map(|d| d.to_json()),
        })
    }
}

fn degreewise(name: &str, x: &TautClass, y: &TautClass, max_codim: usize) -> Comparison {
    let mut report = Vec::new();
    let mut equal = true;
    for d in 0..=max_codim {
        let (a, b) = (x.graded_part(d), y.graded_part(d));
        let same = a == b;
        equal &= same;
        report.push(format!(
            "degree {d}: {} ({} terms)",
            if same { "equal" } else { "DIFFERENT" },
            a.len()
        ));
    }
    let diff = x.truncate(max_codim).sub(&y.truncate(max_codim));
    Comparison {
        name: name.to_string(),
        equal,
        report,
        diff: (!diff.is_zero()).then_some(diff),
    }
}

/// `Ω_{g,A,k}` against the `r = 0` value of `r^{-g}` times the R-matrix action
/// of the linear Bernoulli R-matrix, interpolated in `r`.
pub fn compare_pixton_zvonkine(
    g: u32,
    a: &[i64],
    k: i64,
    max_codim: usize,
    policy: &RSamplePolicy,
) -> Result<Comparison> {
    let input = PixtonInput::new(g, a, k)?.with_max_codim(max_codim)?;
    input.check_balanced()?;
    let omega = pixton_class(&input, policy)?;
    let rs = sample_points_for(&input, policy)?;
    let samples: Vec<(u32, TautClass)> = rs
        .par_iter()
        .map(|&r| chern_exponential_rmatrix(ChernKind::Zvonkine, g, a, k, r, max_codim).map(|t| (r, t)))
        .collect::<Result<_>>()?;
    let zv = rpoly_from_samples(g, a.len(), &samples)?.constant_term();
    Ok(degreewise("pixton vs zvonkine", &omega, &zv, max_codim))
}

/// Three-way comparison on compact type: the tree restriction of `Ω_{g,A,0}`,
/// the tree graph sum, and (in degree `g`) the power `Θ^g / g!`.
pub fn compare_hain(g: u32, a: &[i64], max_codim: usize, policy: &RSamplePolicy) -> Result<Comparison> {
    let input = PixtonInput::new(g, a, 0)?.with_max_codim(max_codim)?;
    input.check_balanced()?;
    let ct = pixton_class(&input, policy)?.restrict_compact_type();
    let tree = hain_class(g, a, max_codim)?;
    let mut cmp = degreewise("compact-type pixton vs hain graph sum", &ct, &tree, max_codim);
    if (g as usize) <= max_codim {
        let power = hain_power(g, a)?.graded_part(g as usize);
        let same = power == tree.graded_part(g as usize);
        cmp.equal &= same;
        cmp.report.push(format!(
            "degree {g} power formula: {}",
            if same { "equal" } else { "DIFFERENT" }
        ));
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn zero_class_holds_vacuously() {
        let c = verify_relation(&TautClass::zero(1, 2), 2).unwrap();
        assert!(c.holds);
        assert!(c.pairings.iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn psi_is_not_a_relation() {
        let c = verify_relation(&TautClass::psi(1, 1, 1, 1), 1).unwrap();
        assert!(!c.holds);
        assert_eq!(c.nonzero_pairings().count(), 1);
        assert_eq!(c.nonzero_pairings().next().unwrap().1, rat(1, 24));
        assert_eq!(c.to_json(false)["verdict"], "fails");
    }

    #[test]
    fn genus_one_vanishing() {
        let certs = verify_dr_vanishing(1, &[1, -1], 0, None, &RSamplePolicy::default()).unwrap();
        assert_eq!(certs.len(), 1);
        assert!(certs[0].holds);
        assert_eq!(certs[0].d, 2);
    }

    #[test]
    fn degrees_at_most_g_are_refused() {
        assert!(verify_dr_vanishing(1, &[1, -1], 0, Some(vec![1]), &RSamplePolicy::default()).is_err());
    }

    #[test]
    fn trivial_comparisons() {
        let p = RSamplePolicy::default();
        assert!(compare_pixton_zvonkine(0, &[1, -1, 0], 0, 0, &p).unwrap().equal);
        assert!(compare_hain(1, &[0, 0], 2, &p).unwrap().equal);
    }
}
