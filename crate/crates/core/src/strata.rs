//! The strata algebra: formal sums of decorated stable graphs `[Γ, γ]`, each
//! standing for the pushforward `ι_Γ*(γ)` (no automorphism factor), with the
//! excess-intersection product.
//!
//! Generators may also carry a mod-r weighting of their slots. Products of
//! weighted generators keep only common degenerations on which the two
//! weightings agree and remain admissible.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::rational::{self, Rational};
use crate::error::{Error, Result};
use crate::graphs::{self, GraphData, Iso, StableGraph};
use crate::intersect::kappa_psi_integral;

/// Per-vertex kappa monomials, per-slot psi exponents, and (for weighted
/// generators) per-slot residues. `weights` is empty when unweighted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decoration {
    pub weights: Vec<u32>,
    pub kappa: Vec<Vec<u32>>,
    pub psi: Vec<u32>,
}

impl Decoration {
    pub fn empty(graph: &StableGraph) -> Self {
        Decoration {
            weights: Vec::new(),
            kappa: vec![Vec::new(); graph.num_vertices()],
            psi: vec![0; graph.num_slots()],
        }
    }

    pub fn degree(&self) -> usize {
        self.kappa.iter().flatten().chain(&self.psi).map(|&x| x as usize).sum()
    }

    fn vertex_degree(&self, slots: &[usize], v: usize) -> usize {
        self.kappa[v].iter().map(|&x| x as usize).sum::<usize>()
            + slots.iter().map(|&s| self.psi[s] as usize).sum::<usize>()
    }

    /// The decoration seen through `iso` (source frame to target frame).
    pub fn transport(&self, iso: &Iso) -> Decoration {
        let mut kappa = vec![Vec::new(); self.kappa.len()];
        for (v, k) in self.kappa.iter().enumerate() {
            kappa[iso.vertex_map[v]] = k.clone();
        }
        let mut psi = vec![0; self.psi.len()];
        for (s, &p) in self.psi.iter().enumerate() {
            psi[iso.slot_map[s]] = p;
        }
        let mut weights = vec![0; self.weights.len()];
        for (s, &w) in self.weights.iter().enumerate() {
            weights[iso.slot_map[s]] = w;
        }
        Decoration { weights, kappa, psi }
    }
}

/// Lexicographically smallest image of `deco` under the automorphisms of a canonical graph.
fn canonicalize(data: &GraphData, deco: Decoration) -> Decoration {
    if data.automorphisms.len() == 1 {
        return deco;
    }
    data.automorphisms
        .iter()
        .map(|a| deco.transport(a))
        .min()
        .expect("identity present")
}

/// Zero by dimension: total codimension too large, or some vertex factor above its dimension.
fn vanishes(data: &GraphData, deco: &Decoration, dim: usize) -> bool {
    let g = &data.graph;
    if g.num_edges() + deco.degree() > dim {
        return true;
    }
    (0..g.num_vertices()).any(|v| deco.vertex_degree(&data.slots_by_vertex[v], v) > g.vertex_dim(v))
}

/// A canonical generator `[Γ, γ]`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub graph: Arc<GraphData>,
    pub deco: Decoration,
}

impl Generator {
    /// Canonical generator for a decorated graph in any labelling; `None` if it
    /// vanishes for dimension reasons.
    pub fn new(graph: &StableGraph, deco: Decoration) -> Option<Generator> {
        let (data, iso) = graphs::intern(graph);
        Self::from_canonical(data, deco.transport(&iso))
    }

    pub fn from_canonical(data: Arc<GraphData>, deco: Decoration) -> Option<Generator> {
        let g = &data.graph;
        if vanishes(&data, &deco, 3 * g.genus() as usize + g.n() - 3) {
            return None;
        }
        let deco = canonicalize(&data, deco);
        Some(Generator { graph: data, deco })
    }

    pub fn codim(&self) -> usize {
        self.graph.graph.num_edges() + self.deco.degree()
    }

    /// Integral over the ambient space: product of the vertex integrals.
    pub fn integral(&self) -> Rational {
        let g = &self.graph.graph;
        let mut acc = rational::one();
        for v in 0..g.num_vertices() {
            let psi: Vec<u32> = self.graph.slots_by_vertex[v]
                .iter()
                .map(|&s| self.deco.psi[s])
                .collect();
            acc *= kappa_psi_integral(g.genera()[v], &self.deco.kappa[v], &psi);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let g = &self.graph.graph;
        let label = |s: usize| s + 1;
        let psi: Vec<Value> = self
            .deco
            .psi
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0)
            .map(|(s, &p)| json!([label(s), p]))
            .collect();
        let mut deco = json!({ "kappa": self.deco.kappa, "psi": psi });
        if !self.deco.weights.is_empty() {
            deco["weights"] = json!(self
                .deco
                .weights
                .iter()
                .enumerate()
                .map(|(s, &w)| json!([label(s), w]))
                .collect::<Vec<_>>());
        }
        json!({ "graph": g.to_json(), "decoration": deco })
    }
}

impl PartialEq for Generator {
    fn eq(&self, other: &Self) -> bool {
        self.graph.graph == other.graph.graph && self.deco == other.deco
    }
}
impl Eq for Generator {}
impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Generator {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&*self.graph, &self.deco).cmp(&(&*other.graph, &other.deco))
    }
}

/// Admissibility data for weighted generators: modulus, leg residues, twist residue.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightContext {
    pub r: u32,
    pub a: Vec<u32>,
    pub k: u32,
}

impl WeightContext {
    pub fn new(r: u32, a: &[i64], k: i64) -> Self {
        let rr = r as i64;
        WeightContext {
            r,
            a: a.iter().map(|&x| x.rem_euclid(rr) as u32).collect(),
            k: k.rem_euclid(rr) as u32,
        }
    }

    pub fn admissible(&self, graph: &StableGraph, w: &[u32]) -> bool {
        let r = self.r as u64;
        if (0..graph.n()).any(|i| w[i] != self.a[i]) {
            return false;
        }
        if (0..graph.num_edges()).any(|e| {
            let (s, t) = graph.edge_slots(e);
            !(w[s] as u64 + w[t] as u64).is_multiple_of(r)
        }) {
            return false;
        }
        let mut sums = vec![0u64; graph.num_vertices()];
        for (s, &x) in w.iter().enumerate() {
            sums[graph.slot_vertex(s)] += x as u64;
        }
        (0..graph.num_vertices()).all(|v| {
            let target =
                (self.k as i64 * (2 * graph.genera()[v] as i64 - 2 + graph.val(v) as i64)).rem_euclid(r as i64) as u64;
            sums[v] % r == target
        })
    }
}

/// An element of the strata algebra of type (g, n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautClass {
    g: u32,
    n: usize,
    weighting: Option<WeightContext>,
    terms: BTreeMap<Generator, Rational>,
}

impl TautClass {
    pub fn zero(g: u32, n: usize) -> Self {
        assert!(2 * g as i64 - 2 + n as i64 > 0, "unstable type ({g},{n})");
        TautClass {
            g,
            n,
            weighting: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_weighted(g: u32, n: usize, ctx: WeightContext) -> Self {
        TautClass {
            weighting: Some(ctx),
            ..Self::zero(g, n)
        }
    }

    pub fn zero_like(&self) -> Self {
        TautClass {
            g: self.g,
            n: self.n,
            weighting: self.weighting.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(g: u32, n: usize) -> Self {
        let mut t = Self::zero(g, n);
        let triv = StableGraph::trivial(g, n);
        t.add_term(&triv, Decoration::empty(&triv), rational::one());
        t
    }

    pub fn scalar(g: u32, n: usize, c: Rational) -> Self {
        Self::one(g, n).scale(&c)
    }

    /// `ψ_i^e` for the marking `i` (1-based).
    pub fn psi(g: u32, n: usize, i: usize, e: u32) -> Self {
        let mut t = Self::zero(g, n);
        let triv = StableGraph::trivial(g, n);
        let mut d = Decoration::empty(&triv);
        d.psi[i - 1] = e;
        t.add_term(&triv, d, rational::one());
        t
    }

    /// `κ_a` on the trivial graph; `κ_0` is the scalar `2g - 2 + n`.
    pub fn kappa(g: u32, n: usize, a: u32) -> Self {
        if a == 0 {
            return Self::scalar(g, n, rational::int(2 * g as i64 - 2 + n as i64));
        }
        let mut t = Self::zero(g, n);
        let triv = StableGraph::trivial(g, n);
        let mut d = Decoration::empty(&triv);
        d.kappa[0].push(a);
        t.add_term(&triv, d, rational::one());
        t
    }

    /// The pushforward of the fundamental class of a boundary stratum.
    pub fn stratum(graph: &StableGraph) -> Self {
        let mut t = Self::zero(graph.genus(), graph.n());
        t.add_term(graph, Decoration::empty(graph), rational::one());
        t
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        3 * self.g as usize + self.n - 3
    }

    pub fn weighting(&self) -> Option<&WeightContext> {
        self.weighting.as_ref()
    }

    pub fn terms(&self) -> &BTreeMap<Generator, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, gen: &Generator) -> Rational {
        self.terms.get(gen).cloned().unwrap_or_else(rational::zero)
    }

    /// Add `c · [graph, deco]`; the graph may be in any labelling.
    pub fn add_term(&mut self, graph: &StableGraph, deco: Decoration, c: Rational) {
        assert_eq!(
            (graph.genus(), graph.n()),
            (self.g, self.n),
            "generator of the wrong type"
        );
        if let Some(gen) = Generator::new(graph, deco) {
            self.add_generator(gen, c);
        }
    }

    pub fn add_generator(&mut self, gen: Generator, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(gen) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &TautClass) {
        assert_eq!(
            (self.g, self.n),
            (other.g, other.n),
            "classes on different moduli spaces"
        );
        assert_eq!(
            self.weighting, other.weighting,
            "classes with different weight contexts"
        );
    }

    pub fn add(&self, other: &TautClass) -> TautClass {
        self.check_compatible(other);
        let mut out = self.clone();
        for (gen, c) in &other.terms {
            out.add_generator(gen.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TautClass) -> TautClass {
        self.add(&other.scale(&-rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> TautClass {
        if c.is_zero() {
            return self.zero_like();
        }
        TautClass {
            terms: self.terms.iter().map(|(g, x)| (g.clone(), x * c)).collect(),
            ..self.zero_like()
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&Generator, &Rational) -> Rational) -> TautClass {
        let mut out = self.zero_like();
        for (gen, c) in &self.terms {
            out.add_generator(gen.clone(), f(gen, c));
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&Generator) -> bool) -> TautClass {
        TautClass {
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| keep(g))
                .map(|(g, c)| (g.clone(), c.clone()))
                .collect(),
            ..self.zero_like()
        }
    }

    pub fn graded_part(&self, d: usize) -> TautClass {
        self.filter(|g| g.codim() == d)
    }

    pub fn truncate(&self, max_codim: usize) -> TautClass {
        self.filter(|g| g.codim() <= max_codim)
    }

    pub fn restrict_compact_type(&self) -> TautClass {
        self.filter(|g| g.graph.graph.is_tree())
    }

    /// Sum of top-degree coefficients times generator integrals. Lower-degree
    /// terms integrate to zero; [`TautClass::has_lower_terms`] reports them.
    pub fn integrate(&self) -> Rational {
        let dim = self.dim();
        self.terms
            .iter()
            .filter(|(g, _)| g.codim() == dim)
            .map(|(g, c)| c * g.integral())
            .fold(rational::zero(), |a, b| a + b)
    }

    pub fn has_lower_terms(&self) -> bool {
        self.terms.keys().any(|g| g.codim() < self.dim())
    }

    /// Forget weights, with the coefficient transform supplied by the caller.
    pub fn unweighted(&self, f: impl Fn(&Generator, &Rational) -> Rational) -> TautClass {
        let mut out = TautClass::zero(self.g, self.n);
        for (gen, c) in &self.terms {
            let deco = Decoration {
                weights: Vec::new(),
                ..gen.deco.clone()
            };
            let data = gen.graph.clone();
            if let Some(g2) = Generator::from_canonical(data, deco) {
                out.add_generator(g2, f(gen, c));
            }
        }
        out
    }

    pub fn mul(&self, other: &TautClass) -> TautClass {
        self.check_compatible(other);
        let dim = self.dim();
        let rhs: Vec<(&Generator, &Rational)> = other.terms.iter().collect();
        let ctx = self.weighting.as_ref();
        let partial: Vec<BTreeMap<Generator, Rational>> = self
            .terms
            .par_iter()
            .map(|(x, cx)| {
                let mut acc = TautClass {
                    terms: BTreeMap::new(),
                    ..self.zero_like()
                };
                for &(y, cy) in &rhs {
                    if x.codim() + y.codim() > dim {
                        continue;
                    }
                    multiply_generators(x, y, &(cx * cy), ctx, dim, &mut acc);
                }
                acc.terms
            })
            .collect();
        let mut out = self.zero_like();
        for part in partial {
            for (g, c) in part {
                out.add_generator(g, c);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> TautClass {
        let mut acc = TautClass {
            terms: BTreeMap::new(),
            ..self.zero_like()
        };
        let triv = StableGraph::trivial(self.g, self.n);
        let mut unit = Decoration::empty(&triv);
        if let Some(ctx) = &self.weighting {
            unit.weights = ctx.a.clone();
        }
        acc.add_term(&triv, unit, rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `exp(T)` for `T` without a degree-zero part, truncated at `max_codim`.
    pub fn exp_nilpotent(&self, max_codim: usize) -> Result<TautClass> {
        if self.terms.keys().any(|g| g.codim() == 0) {
            return Err(Error::InvalidInput(
                "exponential of a class with a degree-zero part".into(),
            ));
        }
        let x = self.truncate(max_codim);
        let mut term = x.pow(0);
        let mut total = term.clone();
        for m in 1..=max_codim.min(self.dim()) {
            term = term.mul(&x).truncate(max_codim).scale(&rational::rat(1, m as i64));
            if term.is_zero() {
                break;
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Value {
        let mut list = Vec::new();
        for (gen, c) in &self.terms {
            let mut v = gen.to_json();
            v["coefficient"] = json!(rational::to_string(c));
            list.push(v);
        }
        json!({ "g": self.g, "n": self.n, "terms": list })
    }
}

/// A polynomial in the kappa and psi classes of one fixed graph, with monomials
/// written as decorations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecoPoly {
    pub terms: BTreeMap<Decoration, Rational>,
}

impl DecoPoly {
    pub fn one(graph: &StableGraph) -> Self {
        Self::monomial(Decoration::empty(graph), rational::one())
    }

    pub fn monomial(d: Decoration, c: Rational) -> Self {
        let mut p = DecoPoly::default();
        p.add_term(d, c);
        p
    }

    pub fn add_term(&mut self, d: Decoration, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(d).or_insert_with(rational::zero);
        *e += c;
    }

    pub fn add(&mut self, other: &DecoPoly) {
        for (d, c) in &other.terms {
            self.add_term(d.clone(), c.clone());
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn scale(&self, c: &Rational) -> DecoPoly {
        DecoPoly {
            terms: self
                .terms
                .iter()
                .map(|(d, x)| (d.clone(), x * c))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    /// Product with all monomials of degree above `max_degree` discarded.
    pub fn mul(&self, other: &DecoPoly, max_degree: usize) -> DecoPoly {
        let mut out = DecoPoly::default();
        for (a, ca) in &self.terms {
            let da = a.degree();
            for (b, cb) in &other.terms {
                if da + b.degree() > max_degree {
                    continue;
                }
                let psi = a.psi.iter().zip(&b.psi).map(|(x, y)| x + y).collect();
                let kappa = a
                    .kappa
                    .iter()
                    .zip(&b.kappa)
                    .map(|(x, y)| {
                        let mut k: Vec<u32> = x.iter().chain(y).copied().collect();
                        k.sort_unstable();
                        k
                    })
                    .collect();
                let weights = if a.weights.is_empty() {
                    b.weights.clone()
                } else {
                    a.weights.clone()
                };
                out.add_term(Decoration { weights, kappa, psi }, ca * cb);
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn graded_part(&self, d: usize) -> DecoPoly {
        DecoPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl TautClass {
    /// Add `factor · ι_*(poly)` for a canonical graph.
    pub fn add_graph_poly(&mut self, data: &Arc<GraphData>, poly: &DecoPoly, factor: &Rational) {
        for (d, c) in &poly.terms {
            if let Some(gen) = Generator::from_canonical(data.clone(), d.clone()) {
                self.add_generator(gen, c * factor);
            }
        }
    }
}

/// One way of realizing a common degeneration of two canonical graphs.
struct Structure {
    target: Arc<GraphData>,
    factor: Rational,
    pre1: Vec<Vec<usize>>,
    slot1: Vec<usize>,
    pre2: Vec<Vec<usize>>,
    slot2: Vec<usize>,
    common: Vec<(usize, usize)>,
}

type StructureKey = (StableGraph, StableGraph);
static STRUCTURES: Lazy<RwLock<HashMap<StructureKey, Arc<Vec<Structure>>>>> = Lazy::new(Default::default);

/// An edge subset `S` of `G` whose complement contracts onto a given canonical
/// graph, with the vertex and slot maps of that contraction.
struct Contraction {
    mask: u64,
    vmap: Vec<usize>,
    slot_back: Vec<usize>,
}

fn contractions_onto(gd: &GraphData, target: &StableGraph) -> Vec<Contraction> {
    let g = &gd.graph;
    let ne = g.num_edges();
    let keep = target.num_edges();
    let mut out = Vec::new();
    for mask in 0u64..(1 << ne) {
        if mask.count_ones() as usize != keep {
            continue;
        }
        let contract: Vec<bool> = (0..ne).map(|e| mask >> e & 1 == 0).collect();
        let (h, vmap, smap) = g.contract(&contract);
        if h.num_vertices() != target.num_vertices() {
            continue;
        }
        let (canon, iso) = h.canonical_form();
        if canon != *target {
            continue;
        }
        let vmap = vmap.iter().map(|&v| iso.vertex_map[v]).collect();
        let mut slot_back = vec![usize::MAX; target.num_slots()];
        for (s, t) in smap.iter().enumerate() {
            if let Some(t) = t {
                slot_back[iso.slot_map[*t]] = s;
            }
        }
        out.push(Contraction { mask, vmap, slot_back });
    }
    out
}

fn structures(d1: &GraphData, d2: &GraphData) -> Arc<Vec<Structure>> {
    let key = (d1.graph.clone(), d2.graph.clone());
    if let Some(s) = STRUCTURES.read().get(&key) {
        return s.clone();
    }
    let (g, n) = (d1.graph.genus(), d1.graph.n());
    let dim = 3 * g as usize + n - 3;
    let (e1, e2) = (d1.graph.num_edges(), d2.graph.num_edges());
    let mut out = Vec::new();
    let all = graphs::enumerate_interned(g, n).expect("stable type");
    for gd in all.iter() {
        let ne = gd.graph.num_edges();
        if ne < e1.max(e2) || ne > (e1 + e2).min(dim) {
            continue;
        }
        let c1 = contractions_onto(gd, &d1.graph);
        if c1.is_empty() {
            continue;
        }
        let c2 = contractions_onto(gd, &d2.graph);
        let full = (1u64 << ne) - 1;
        let factor = rational::rat(1, gd.aut_order() as i64);
        for a in &c1 {
            for b in &c2 {
                if a.mask | b.mask != full {
                    continue;
                }
                let both = a.mask & b.mask;
                let common: Vec<(usize, usize)> = (0..ne)
                    .filter(|e| both >> e & 1 == 1)
                    .map(|e| gd.graph.edge_slots(e))
                    .collect();
                for s1 in &d1.automorphisms {
                    let (pre1, slot1) = compose_maps(a, s1, d1.graph.num_vertices());
                    for s2 in &d2.automorphisms {
                        let (pre2, slot2) = compose_maps(b, s2, d2.graph.num_vertices());
                        out.push(Structure {
                            target: gd.clone(),
                            factor: factor.clone(),
                            pre1: pre1.clone(),
                            slot1: slot1.clone(),
                            pre2,
                            slot2,
                            common: common.clone(),
                        });
                    }
                }
            }
        }
    }
    let out = Arc::new(out);
    STRUCTURES.write().entry(key).or_insert(out).clone()
}

/// Preimages of target vertices and target-slot-to-source-slot map after
/// following a contraction by an automorphism of the target.
fn compose_maps(c: &Contraction, aut: &Iso, nv: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut pre = vec![Vec::new(); nv];
    for (w, &u) in c.vmap.iter().enumerate() {
        pre[aut.vertex_map[u]].push(w);
    }
    let mut slots = vec![usize::MAX; c.slot_back.len()];
    for (t, &s) in c.slot_back.iter().enumerate() {
        slots[aut.slot_map[t]] = s;
    }
    (pre, slots)
}

/// Every way of distributing kappa factors of `deco` over vertex preimages.
fn kappa_pullbacks(deco: &Decoration, pre: &[Vec<usize>], out: &mut Vec<Vec<(usize, u32)>>) {
    let factors: Vec<(usize, u32)> = deco
        .kappa
        .iter()
        .enumerate()
        .flat_map(|(u, ks)| ks.iter().map(move |&a| (u, a)))
        .collect();
    let mut acc = vec![Vec::new()];
    for (u, a) in factors {
        let mut next = Vec::with_capacity(acc.len() * pre[u].len());
        for partial in &acc {
            for &w in &pre[u] {
                let mut p: Vec<(usize, u32)> = partial.clone();
                p.push((w, a));
                next.push(p);
            }
        }
        acc = next;
    }
    *out = acc;
}

fn multiply_generators(
    x: &Generator,
    y: &Generator,
    coeff: &Rational,
    ctx: Option<&WeightContext>,
    dim: usize,
    acc: &mut TautClass,
) {
    let sts = structures(&x.graph, &y.graph);
    let mut kx = Vec::new();
    let mut ky = Vec::new();
    for st in sts.iter() {
        let gg = &st.target.graph;
        let ns = gg.num_slots();
        let mut weights = Vec::new();
        if let Some(ctx) = ctx {
            weights = vec![u32::MAX; ns];
            for (s, &t) in st.slot1.iter().enumerate() {
                weights[t] = x.deco.weights[s];
            }
            let mut clash = false;
            for (s, &t) in st.slot2.iter().enumerate() {
                if weights[t] != u32::MAX && weights[t] != y.deco.weights[s] {
                    clash = true;
                    break;
                }
                weights[t] = y.deco.weights[s];
            }
            if clash || !ctx.admissible(gg, &weights) {
                continue;
            }
        }
        let mut psi = vec![0u32; ns];
        for (s, &t) in st.slot1.iter().enumerate() {
            psi[t] += x.deco.psi[s];
        }
        for (s, &t) in st.slot2.iter().enumerate() {
            psi[t] += y.deco.psi[s];
        }
        kappa_pullbacks(&x.deco, &st.pre1, &mut kx);
        kappa_pullbacks(&y.deco, &st.pre2, &mut ky);
        let base = coeff * &st.factor;
        let nc = st.common.len();
        let sign = if nc % 2 == 0 { base.clone() } else { -base.clone() };
        for ka in &kx {
            for kb in &ky {
                let mut kappa = vec![Vec::new(); gg.num_vertices()];
                for &(w, a) in ka.iter().chain(kb) {
                    kappa[w].push(a);
                }
                for k in kappa.iter_mut() {
                    k.sort_unstable();
                }
                for choice in 0u32..(1 << nc) {
                    let mut p = psi.clone();
                    for (i, &(h, h2)) in st.common.iter().enumerate() {
                        p[if choice >> i & 1 == 0 { h } else { h2 }] += 1;
                    }
                    let deco = Decoration {
                        weights: weights.clone(),
                        kappa: kappa.clone(),
                        psi: p,
                    };
                    if vanishes(&st.target, &deco, dim) {
                        continue;
                    }
                    let deco = canonicalize(&st.target, deco);
                    acc.add_generator(
                        Generator {
                            graph: st.target.clone(),
                            deco,
                        },
                        sign.clone(),
                    );
                }
            }
        }
    }
}

/// The pushforward along the gluing map of `graph` of per-vertex classes. The
/// class at vertex `v` lives on type `(g(v), val(v))`, its marking `i` being
/// the `i`-th slot of `v` in increasing slot order.
pub fn push_glue(graph: &StableGraph, vertex_classes: &[TautClass]) -> Result<TautClass> {
    graph.validate()?;
    let nv = graph.num_vertices();
    if vertex_classes.len() != nv {
        return Err(Error::DimensionMismatch(format!(
            "{} vertex classes for {} vertices",
            vertex_classes.len(),
            nv
        )));
    }
    let slots: Vec<Vec<usize>> = (0..nv).map(|v| graph.slots_at(v)).collect();
    for (v, t) in vertex_classes.iter().enumerate() {
        if (t.genus(), t.n()) != (graph.genera()[v], slots[v].len()) {
            return Err(Error::DimensionMismatch(format!(
                "vertex {v} has type ({}, {}) but its class has type ({}, {})",
                graph.genera()[v],
                slots[v].len(),
                t.genus(),
                t.n()
            )));
        }
    }
    let mut out = TautClass::zero(graph.genus(), graph.n());
    let mut choice: Vec<(Generator, Rational)> = Vec::new();
    glue_rec(graph, &slots, vertex_classes, 0, &mut choice, &mut out);
    Ok(out)
}

fn glue_rec(
    graph: &StableGraph,
    slots: &[Vec<usize>],
    classes: &[TautClass],
    v: usize,
    choice: &mut Vec<(Generator, Rational)>,
    out: &mut TautClass,
) {
    if v == classes.len() {
        let (g, deco, c) = substitute(graph, slots, choice);
        out.add_term(&g, deco, c);
        return;
    }
    for (gen, c) in classes[v].terms() {
        choice.push((gen.clone(), c.clone()));
        glue_rec(graph, slots, classes, v + 1, choice, out);
        choice.pop();
    }
}

/// Replace every vertex of `graph` by the decorated graph chosen for it.
fn substitute(
    graph: &StableGraph,
    slots: &[Vec<usize>],
    choice: &[(Generator, Rational)],
) -> (StableGraph, Decoration, Rational) {
    let n = graph.n();
    let mut genera = Vec::new();
    let mut offset = Vec::new();
    let mut kappa = Vec::new();
    for (gen, _) in choice {
        offset.push(genera.len());
        genera.extend_from_slice(gen.graph.graph.genera());
        kappa.extend(gen.deco.kappa.iter().cloned());
    }
    // where each outer slot lands: (inner vertex, psi exponent)
    let mut outer: Vec<(usize, u32)> = vec![(0, 0); graph.num_slots()];
    for (v, (gen, _)) in choice.iter().enumerate() {
        let h = &gen.graph.graph;
        for (i, &s) in slots[v].iter().enumerate() {
            outer[s] = (offset[v] + h.slot_vertex(i), gen.deco.psi[i]);
        }
    }
    let (legs, mut psi): (Vec<_>, Vec<_>) = outer[..n].iter().cloned().unzip();
    let mut edges = Vec::new();
    let mut edge_psi = Vec::new();
    for e in 0..graph.num_edges() {
        let (s, t) = graph.edge_slots(e);
        edges.push((outer[s].0, outer[t].0));
        edge_psi.push((outer[s].1, outer[t].1));
    }
    for (v, (gen, _)) in choice.iter().enumerate() {
        let h = &gen.graph.graph;
        for e in 0..h.num_edges() {
            let (a, b) = h.edges()[e];
            let (s, t) = h.edge_slots(e);
            edges.push((offset[v] + a, offset[v] + b));
            edge_psi.push((gen.deco.psi[s], gen.deco.psi[t]));
        }
    }
    for (p, q) in edge_psi {
        psi.push(p);
        psi.push(q);
    }
    let coeff = choice.iter().fold(rational::one(), |acc, (_, c)| acc * c);
    let g = StableGraph::new(genera, legs, edges).expect("gluing stable pieces gives a stable graph");
    (
        g,
        Decoration {
            weights: Vec::new(),
            kappa,
            psi,
        },
        coeff,
    )
}

/// All unweighted generators of codimension `d` on type (g, n), sorted.
pub fn generators_of_codim(g: u32, n: usize, d: usize) -> Result<Vec<Generator>> {
    let dim = 3 * g as usize + n - 3;
    let mut out = BTreeSet::new();
    if d > dim {
        return Ok(Vec::new());
    }
    for data in graphs::enumerate_interned(g, n)?.iter() {
        let gr = &data.graph;
        let ne = gr.num_edges();
        if ne > d {
            continue;
        }
        let nv = gr.num_vertices();
        let caps: Vec<usize> = (0..nv).map(|v| gr.vertex_dim(v)).collect();
        let mut per_vertex: Vec<Vec<(Vec<u32>, Vec<u32>)>> = Vec::new();
        let mut totals = vec![0usize; nv];
        distribute(d - ne, &caps, 0, &mut totals, &mut |totals| {
            per_vertex.clear();
            for (v, &t) in totals.iter().enumerate() {
                per_vertex.push(vertex_monomials(t, data.slots_by_vertex[v].len()));
            }
            let mut idx = vec![0usize; nv];
            loop {
                let mut deco = Decoration::empty(gr);
                for v in 0..nv {
                    let (k, p) = &per_vertex[v][idx[v]];
                    deco.kappa[v] = k.clone();
                    for (i, &s) in data.slots_by_vertex[v].iter().enumerate() {
                        deco.psi[s] = p[i];
                    }
                }
                if let Some(gen) = Generator::from_canonical(data.clone(), deco) {
                    out.insert(gen);
                }
                let mut v = 0;
                while v < nv {
                    idx[v] += 1;
                    if idx[v] < per_vertex[v].len() {
                        break;
                    }
                    idx[v] = 0;
                    v += 1;
                }
                if v == nv {
                    break;
                }
            }
        });
    }
    Ok(out.into_iter().collect())
}

fn distribute(total: usize, caps: &[usize], v: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if v == caps.len() {
        if total == 0 {
            f(cur);
        }
        return;
    }
    for t in 0..=total.min(caps[v]) {
        cur[v] = t;
        distribute(total - t, caps, v + 1, cur, f);
    }
}

/// Kappa partitions and psi compositions with the given total degree.
fn vertex_monomials(deg: usize, slots: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    for kdeg in 0..=deg {
        for part in partitions(kdeg as u32, kdeg as u32) {
            for comp in compositions((deg - kdeg) as u32, slots) {
                out.push((part.clone(), comp));
            }
        }
    }
    out
}

/// Partitions of `m` into parts at most `max`, as sorted ascending lists.
fn partitions(m: u32, max: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(m)).rev() {
        for mut rest in partitions(m - first, first) {
            rest.push(first);
            out.push(rest);
        }
    }
    out
}

fn compositions(m: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if m == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for x in 0..=m {
        for mut rest in compositions(m - x, parts - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

impl std::ops::Add for &TautClass {
    type Output = TautClass;
    fn add(self, rhs: &TautClass) -> TautClass {
        TautClass::add(self, rhs)
    }
}

impl std::ops::Mul for &TautClass {
    type Output = TautClass;
    fn mul(self, rhs: &TautClass) -> TautClass {
        TautClass::mul(self, rhs)
    }
}
