//! Pixton's classes `Ω^r_{g,A,k}` as exact graph sums, their polynomial
//! dependence on `r`, the constant term `Ω_{g,A,k}`, the DR cycle, and Hain's
//! compact-type class.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::poly::{interpolate, UniPoly};
use crate::arith::rational::{self, Rational};
use crate::error::{Error, Result};
use crate::graphs::{self, enumerate_weightings, GraphData, StableGraph};
use crate::strata::{DecoPoly, Decoration, Generator, TautClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixtonInput {
    pub g: u32,
    pub a: Vec<i64>,
    pub k: i64,
    pub max_codim: usize,
}

impl PixtonInput {
    /// Input with `max_codim` defaulting to the dimension.
    pub fn new(g: u32, a: &[i64], k: i64) -> Result<Self> {
        let n = a.len();
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::UnstablePair { g, n });
        }
        Ok(PixtonInput {
            g,
            a: a.to_vec(),
            k,
            max_codim: 3 * g as usize + n - 3,
        })
    }

    pub fn with_max_codim(mut self, d: usize) -> Result<Self> {
        if d > self.dim() {
            return Err(Error::InvalidInput(format!(
                "max codimension {d} exceeds the dimension {}",
                self.dim()
            )));
        }
        self.max_codim = d;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        3 * self.g as usize + self.n() - 3
    }

    /// `k(2g - 2 + n)`, the value `Σ a_i` must take.
    pub fn expected_sum(&self) -> i64 {
        self.k * (2 * self.g as i64 - 2 + self.n() as i64)
    }

    pub fn check_balanced(&self) -> Result<()> {
        let s: i64 = self.a.iter().sum();
        if s != self.expected_sum() {
            return Err(Error::InvalidInput(format!(
                "sum of A is {s} but k(2g-2+n) = {}",
                self.expected_sum()
            )));
        }
        Ok(())
    }

    /// Smallest `r` used by default when sampling: one above
    /// `max(Σ|a_i|, n|k|(2g-2+n))`.
    pub fn default_r_min(&self) -> u32 {
        let s: i64 = self.a.iter().map(|x| x.abs()).sum();
        let t = self.n() as i64 * self.k.abs() * (2 * self.g as i64 - 2 + self.n() as i64);
        (s.max(t) + 1) as u32
    }
}

/// `Σ_j c^j x^j / j!` for `j ≤ max`, as coefficients.
fn exp_coeffs(c: &Rational, max: usize) -> Vec<Rational> {
    let mut out = vec![rational::one()];
    for j in 1..=max {
        let next = &out[j - 1] * c / rational::int(j as i64);
        out.push(next);
    }
    out
}

/// Leg and vertex factors: `Π_i e^{a_i^2 ψ_i / 2} Π_v e^{-k^2 κ_1 / 2}`.
fn leg_vertex_factor(gr: &StableGraph, a: &[i64], k: i64, budget: usize) -> DecoPoly {
    let mut acc = DecoPoly::one(gr);
    for (i, &ai) in a.iter().enumerate() {
        let coeffs = exp_coeffs(&rational::rat(ai * ai, 2), budget);
        let mut f = DecoPoly::default();
        for (j, c) in coeffs.into_iter().enumerate() {
            let mut d = Decoration::empty(gr);
            d.psi[i] = j as u32;
            f.add_term(d, c);
        }
        acc = acc.mul(&f, budget);
    }
    if k != 0 {
        let coeffs = exp_coeffs(&rational::rat(-k * k, 2), budget);
        for v in 0..gr.num_vertices() {
            let mut f = DecoPoly::default();
            for (j, c) in coeffs.iter().enumerate() {
                let mut d = Decoration::empty(gr);
                d.kappa[v] = vec![1; j];
                f.add_term(d, c.clone());
            }
            acc = acc.mul(&f, budget);
        }
    }
    acc
}

/// All `m ∈ N^len` with `Σ m ≤ budget`.
fn multi_indices(len: usize, budget: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for m in &out {
            let used: usize = m.iter().sum();
            for x in 0..=budget - used {
                let mut m2 = m.clone();
                m2.push(x);
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

/// `Π_e (ψ_h + ψ_h')^{m_e}` expanded.
fn edge_monomials(gr: &StableGraph, m: &[usize]) -> DecoPoly {
    let mut acc = DecoPoly::one(gr);
    let budget: usize = m.iter().sum();
    for (e, &me) in m.iter().enumerate() {
        if me == 0 {
            continue;
        }
        let (s, t) = gr.edge_slots(e);
        let mut f = DecoPoly::default();
        for j in 0..=me {
            let mut d = Decoration::empty(gr);
            d.psi[s] = j as u32;
            d.psi[t] = (me - j) as u32;
            f.add_term(d, rational::binomial(me as u32, j as u32));
        }
        acc = acc.mul(&f, budget);
    }
    acc
}

/// The contribution of one graph at modulus `r`, divided by `|Aut Γ|` but not
/// by `r^{h1}`.
fn raw_graph_sum(data: &GraphData, input: &PixtonInput, r: u32) -> DecoPoly {
    let gr = &data.graph;
    let ne = gr.num_edges();
    if ne > input.max_codim {
        return DecoPoly::default();
    }
    let budget = input.max_codim - ne;
    let weightings = enumerate_weightings(gr, &input.a, input.k, r);
    if weightings.is_empty() {
        return DecoPoly::default();
    }
    let indices = multi_indices(ne, budget);
    // Σ_w Π_e c_e^{m_e+1} with c_e = w(h) w(h')
    let mut sums = vec![BigInt::zero(); indices.len()];
    for w in &weightings {
        let mut powers: Vec<Vec<BigInt>> = Vec::with_capacity(ne);
        for e in 0..ne {
            let (s, t) = gr.edge_slots(e);
            let c = BigInt::from(w[s] as u64 * w[t] as u64);
            let mut p = vec![BigInt::one()];
            for j in 1..=budget + 1 {
                let next = &p[j - 1] * &c;
                p.push(next);
            }
            powers.push(p);
        }
        for (i, m) in indices.iter().enumerate() {
            let mut term = BigInt::one();
            for (e, &me) in m.iter().enumerate() {
                term *= &powers[e][me + 1];
            }
            sums[i] += term;
        }
    }
    // edge factor (1 - e^{y s})/s = -Σ_m y^{m+1} s^m/(m+1)!, y = -c/2
    let mut edges = DecoPoly::default();
    for (m, sum) in indices.iter().zip(sums) {
        if sum.is_zero() {
            continue;
        }
        let mut c = Rational::from_integer(sum);
        for &me in m {
            let y = rational::pow(&rational::rat(-1, 2), me as u32 + 1);
            c *= -y / rational::factorial(me as u32 + 1);
        }
        edges.add(&edge_monomials(gr, m).scale(&c));
    }
    let lv = leg_vertex_factor(gr, &input.a, input.k, budget);
    lv.mul(&edges, budget).scale(&rational::rat(1, data.aut_order() as i64))
}

fn graphs_for(input: &PixtonInput) -> Result<Arc<Vec<Arc<GraphData>>>> {
    graphs::enumerate_interned(input.g, input.n())
}

/// `Ω^r_{g,A,k}` up to codimension `max_codim`.
pub fn pixton_fixed_r(input: &PixtonInput, r: u32) -> Result<TautClass> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let all = graphs_for(input)?;
    let parts: Vec<(Arc<GraphData>, DecoPoly)> = all
        .par_iter()
        .map(|d| (d.clone(), raw_graph_sum(d, input, r)))
        .collect();
    let mut out = TautClass::zero(input.g, input.n());
    for (data, poly) in parts {
        let norm = rational::pow(&rational::rat(1, r as i64), data.graph.h1() as u32);
        out.add_graph_poly(&data, &poly, &norm);
    }
    Ok(out)
}

/// How the `r` values for interpolation are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSamplePolicy {
    pub r_min: Option<u32>,
    pub samples: Option<usize>,
    pub oversample: usize,
}

impl Default for RSamplePolicy {
    fn default() -> Self {
        RSamplePolicy {
            r_min: None,
            samples: None,
            oversample: 3,
        }
    }
}

impl RSamplePolicy {
    pub fn sample_points(&self, input: &PixtonInput, max_bound: usize) -> Result<Vec<u32>> {
        let needed = max_bound + 1 + self.oversample;
        let count = self.samples.unwrap_or(needed);
        if count < needed {
            return Err(Error::TooFewSamples { needed, got: count });
        }
        let start = self.r_min.unwrap_or_else(|| input.default_r_min()).max(1);
        Ok((start..start + count as u32).collect())
    }
}

/// Generators with coefficients that are polynomials in `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPolyClass {
    pub g: u32,
    pub n: usize,
    pub polys: BTreeMap<Generator, UniPoly>,
    pub samples: Vec<u32>,
}

impl RPolyClass {
    pub fn eval(&self, r: &Rational) -> TautClass {
        let mut out = TautClass::zero(self.g, self.n);
        for (gen, p) in &self.polys {
            out.add_generator(gen.clone(), p.eval(r));
        }
        out
    }

    pub fn constant_term(&self) -> TautClass {
        self.eval(&rational::zero())
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .polys
            .iter()
            .map(|(gen, p)| {
                let mut v = gen.to_json();
                v["coefficients"] = json!(p.coeffs().iter().map(rational::to_string).collect::<Vec<_>>());
                v
            })
            .collect();
        json!({ "g": self.g, "n": self.n, "variable": "r", "samples": self.samples, "terms": terms })
    }
}

/// Degree bound in `r` for the raw (pre-normalization) sum of a generator.
fn raw_degree_bound(gen: &Generator) -> usize {
    2 * gen.codim() + gen.graph.graph.h1()
}

/// Interpolate a family of classes in `r`. Each sampled class must carry the
/// normalization `r^{-h1(Γ)}` on generators over `Γ`; the raw values
/// `r^{h1} · coefficient` are interpolated with the bound `2 codim + h1`, checked
/// against every surplus sample, and divided by `r^{h1}` exactly.
pub fn rpoly_from_samples(g: u32, n: usize, samples: &[(u32, TautClass)]) -> Result<RPolyClass> {
    let mut values: BTreeMap<Generator, BTreeMap<u32, Rational>> = BTreeMap::new();
    for (r, class) in samples {
        for (gen, c) in class.terms() {
            let raw = c * rational::pow(&rational::int(*r as i64), gen.graph.graph.h1() as u32);
            values.entry(gen.clone()).or_default().insert(*r, raw);
        }
    }
    let mut polys = BTreeMap::new();
    for (gen, by_r) in values {
        let pts: Vec<(Rational, Rational)> = samples
            .iter()
            .map(|(r, _)| {
                (
                    rational::int(*r as i64),
                    by_r.get(r).cloned().unwrap_or_else(rational::zero),
                )
            })
            .collect();
        let h1 = gen.graph.graph.h1();
        let raw = interpolate("r", &pts, raw_degree_bound(&gen))?;
        let p = raw.div_by_power(h1).ok_or(Error::NotDivisible { h1 })?;
        if !p.is_zero() {
            polys.insert(gen, p);
        }
    }
    Ok(RPolyClass {
        g,
        n,
        polys,
        samples: samples.iter().map(|(r, _)| *r).collect(),
    })
}

/// Sample points covering the largest degree bound of a computation up to `max_codim`.
pub fn sample_points_for(input: &PixtonInput, policy: &RSamplePolicy) -> Result<Vec<u32>> {
    let all = graphs_for(input)?;
    let max_h1 = all
        .iter()
        .filter(|d| d.graph.num_edges() <= input.max_codim)
        .map(|d| d.graph.h1())
        .max()
        .unwrap_or(0);
    policy.sample_points(input, 2 * input.max_codim + max_h1)
}

/// Interpolate `Ω^r` in `r` from consecutive samples above the threshold.
pub fn pixton_rpoly(input: &PixtonInput, policy: &RSamplePolicy) -> Result<RPolyClass> {
    input.check_balanced()?;
    let rs = sample_points_for(input, policy)?;
    let classes: Vec<(u32, TautClass)> = rs
        .par_iter()
        .map(|&r| pixton_fixed_r(input, r).map(|t| (r, t)))
        .collect::<Result<_>>()?;
    rpoly_from_samples(input.g, input.n(), &classes)
}

/// `Ω_{g,A,k}`: the `r = 0` value of the interpolated class.
pub fn pixton_class(input: &PixtonInput, policy: &RSamplePolicy) -> Result<TautClass> {
    Ok(pixton_rpoly(input, policy)?.constant_term())
}

/// `DR_g(A)` as the degree-`g` part of `Ω_{g,A,0}`.
pub fn dr_cycle(g: u32, a: &[i64]) -> Result<TautClass> {
    dr_cycle_with(g, a, &RSamplePolicy::default())
}

pub fn dr_cycle_with(g: u32, a: &[i64], policy: &RSamplePolicy) -> Result<TautClass> {
    let input = PixtonInput::new(g, a, 0)?;
    if g as usize > input.dim() {
        return Ok(TautClass::zero(g, a.len()));
    }
    let input = input.with_max_codim(g as usize)?;
    Ok(pixton_class(&input, policy)?.graded_part(g as usize))
}

/// The tree part of the graph sum with integer weights `w(h) = a_I`: a
/// compact-type class whose degree-`g` part is given by Hain's formula.
pub fn hain_class(g: u32, a: &[i64], max_codim: usize) -> Result<TautClass> {
    let input = PixtonInput::new(g, a, 0)?.with_max_codim(max_codim)?;
    input.check_balanced()?;
    let mut out = TautClass::zero(g, a.len());
    for data in graphs_for(&input)?.iter().filter(|d| d.graph.is_tree()) {
        let gr = &data.graph;
        let ne = gr.num_edges();
        if ne > max_codim {
            continue;
        }
        let budget = max_codim - ne;
        let w = integer_tree_weights(gr, a);
        let mut acc = leg_vertex_factor(gr, a, 0, budget);
        for e in 0..ne {
            let (s, t) = gr.edge_slots(e);
            let y = rational::rat(-w[s] * w[t], 2);
            let mut f = DecoPoly::default();
            for m in 0..=budget {
                let c = -rational::pow(&y, m as u32 + 1) / rational::factorial(m as u32 + 1);
                let mut mono = vec![0usize; ne];
                mono[e] = m;
                f.add(&edge_monomials(gr, &mono).scale(&c));
            }
            acc = acc.mul(&f, budget);
        }
        out.add_graph_poly(data, &acc, &rational::rat(1, data.aut_order() as i64));
    }
    Ok(out)
}

/// On a tree, the half-edge weight is the sum of `a_i` over the legs beyond it.
fn integer_tree_weights(gr: &StableGraph, a: &[i64]) -> Vec<i64> {
    let n = gr.n();
    let mut w = vec![0i64; gr.num_slots()];
    w[..n].copy_from_slice(a);
    for e in 0..gr.num_edges() {
        let (s, t) = gr.edge_slots(e);
        let mut cut = vec![false; gr.num_edges()];
        cut[e] = true;
        // legs on the far side of slot s, i.e. in the component of the other endpoint
        let far = component_without(gr, gr.slot_vertex(t), e);
        let a_far: i64 = (0..n).filter(|&i| far[gr.slot_vertex(i)]).map(|i| a[i]).sum();
        w[s] = a_far;
        w[t] = -a_far;
    }
    w
}

fn component_without(gr: &StableGraph, start: usize, removed: usize) -> Vec<bool> {
    let mut seen = vec![false; gr.num_vertices()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for (e, &(x, y)) in gr.edges().iter().enumerate() {
            if e == removed {
                continue;
            }
            for (p, q) in [(x, y), (y, x)] {
                if p == v && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen
}

/// `Θ^g / g!` with `Θ = Σ_i a_i^2 ψ_i / 2 - Σ_D a_D^2 [D] / 2` over separating
/// boundary divisors `D`, computed with the strata product.
pub fn hain_power(g: u32, a: &[i64]) -> Result<TautClass> {
    let n = a.len();
    let input = PixtonInput::new(g, a, 0)?;
    input.check_balanced()?;
    let mut theta = TautClass::zero(g, n);
    for (i, &ai) in a.iter().enumerate() {
        theta = theta.add(&TautClass::psi(g, n, i + 1, 1).scale(&rational::rat(ai * ai, 2)));
    }
    for data in graphs_for(&input)?
        .iter()
        .filter(|d| d.graph.num_edges() == 1 && d.graph.is_tree())
    {
        let w = integer_tree_weights(&data.graph, a);
        let (s, _) = data.graph.edge_slots(0);
        let coeff = rational::rat(-w[s] * w[s], 2) / rational::int(data.aut_order() as i64);
        theta.add_graph_poly(data, &DecoPoly::one(&data.graph), &coeff);
    }
    if g as usize > input.dim() {
        return Ok(TautClass::zero(g, n));
    }
    Ok(theta.pow(g).scale(&(rational::one() / rational::factorial(g))))
}
