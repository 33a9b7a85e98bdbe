//! Stable graphs: validation, canonical forms, automorphisms, enumeration up to
//! isomorphism, and mod-r weightings.
//!
//! Slots index legs and half-edges together: slot `i < n` is the leg of marking
//! `i + 1`; edge `e` owns slots `n + 2e` and `n + 2e + 1`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StableGraph {
    genera: Vec<u32>,
    legs: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// A bijection between two graphs, as maps on vertices and slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iso {
    pub vertex_map: Vec<usize>,
    pub slot_map: Vec<usize>,
}

impl Iso {
    pub fn compose(&self, then: &Iso) -> Iso {
        Iso {
            vertex_map: self.vertex_map.iter().map(|&v| then.vertex_map[v]).collect(),
            slot_map: self.slot_map.iter().map(|&s| then.slot_map[s]).collect(),
        }
    }

    pub fn inverse(&self) -> Iso {
        let mut vertex_map = vec![0; self.vertex_map.len()];
        for (a, &b) in self.vertex_map.iter().enumerate() {
            vertex_map[b] = a;
        }
        let mut slot_map = vec![0; self.slot_map.len()];
        for (a, &b) in self.slot_map.iter().enumerate() {
            slot_map[b] = a;
        }
        Iso { vertex_map, slot_map }
    }
}

impl StableGraph {
    /// Build and validate a graph.
    pub fn new(genera: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = StableGraph { genera, legs, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn trivial(g: u32, n: usize) -> Self {
        StableGraph {
            genera: vec![g],
            legs: vec![0; n],
            edges: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.genera.len();
        let bad = |m: &str| Err(Error::InvalidInput(format!("invalid stable graph: {m}")));
        if nv == 0 {
            return bad("no vertices");
        }
        if self
            .legs
            .iter()
            .chain(self.edges.iter().flat_map(|(a, b)| [a, b]))
            .any(|&v| v >= nv)
        {
            return bad("vertex index out of range");
        }
        if !self.is_connected() {
            return bad("not connected");
        }
        for v in 0..nv {
            if 2 * self.genera[v] as i64 - 2 + self.val(v) as i64 <= 0 {
                return bad("unstable vertex");
            }
        }
        Ok(())
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n(&self) -> usize {
        self.legs.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_slots(&self) -> usize {
        self.legs.len() + 2 * self.edges.len()
    }

    pub fn edge_slots(&self, e: usize) -> (usize, usize) {
        let n = self.n();
        (n + 2 * e, n + 2 * e + 1)
    }

    pub fn slot_vertex(&self, s: usize) -> usize {
        let n = self.n();
        if s < n {
            self.legs[s]
        } else {
            let (a, b) = self.edges[(s - n) / 2];
            if (s - n).is_multiple_of(2) {
                a
            } else {
                b
            }
        }
    }

    /// Slot on the other side of an edge; `None` for legs.
    pub fn partner(&self, s: usize) -> Option<usize> {
        let n = self.n();
        (s >= n).then(|| if (s - n).is_multiple_of(2) { s + 1 } else { s - 1 })
    }

    pub fn slots_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_slots()).filter(|&s| self.slot_vertex(s) == v).collect()
    }

    pub fn val(&self, v: usize) -> usize {
        self.legs.iter().filter(|&&x| x == v).count()
            + self
                .edges
                .iter()
                .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
                .sum::<usize>()
    }

    pub fn h1(&self) -> usize {
        self.edges.len() + 1 - self.genera.len()
    }

    pub fn genus(&self) -> u32 {
        self.genera.iter().sum::<u32>() + self.h1() as u32
    }

    /// Dimension of the vertex moduli space `3g(v) - 3 + val(v)`.
    pub fn vertex_dim(&self, v: usize) -> usize {
        (3 * self.genera[v] as usize + self.val(v)) - 3
    }

    pub fn is_tree(&self) -> bool {
        self.h1() == 0
    }

    fn is_connected(&self) -> bool {
        let nv = self.genera.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Apply a vertex relabeling; edges are re-sorted, each oriented low-to-high.
    /// Returns the relabeled graph and the slot map from `self`.
    fn relabel(&self, perm: &[usize]) -> (StableGraph, Vec<usize>) {
        let n = self.n();
        let legs: Vec<usize> = self.legs.iter().map(|&v| perm[v]).collect();
        let mut oriented: Vec<((usize, usize), usize, bool)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| {
                let (pa, pb) = (perm[a], perm[b]);
                if pa <= pb {
                    ((pa, pb), e, false)
                } else {
                    ((pb, pa), e, true)
                }
            })
            .collect();
        oriented.sort();
        let mut genera = vec![0; self.genera.len()];
        for (v, &g) in self.genera.iter().enumerate() {
            genera[perm[v]] = g;
        }
        let mut slot_map: Vec<usize> = (0..n).collect();
        slot_map.resize(self.num_slots(), 0);
        for (new_e, &(_, old_e, flipped)) in oriented.iter().enumerate() {
            let (o0, o1) = self.edge_slots(old_e);
            let (n0, n1) = (n + 2 * new_e, n + 2 * new_e + 1);
            if flipped {
                slot_map[o0] = n1;
                slot_map[o1] = n0;
            } else {
                slot_map[o0] = n0;
                slot_map[o1] = n1;
            }
        }
        let edges = oriented.into_iter().map(|(p, _, _)| p).collect();
        (StableGraph { genera, legs, edges }, slot_map)
    }

    /// Isomorphism-invariant vertex signature used to restrict permutations.
    fn vertex_invariant(&self, v: usize) -> (u32, Vec<usize>, usize, usize) {
        let legs: Vec<usize> = (0..self.n()).filter(|&i| self.legs[i] == v).collect();
        let loops = self.edges.iter().filter(|&&(a, b)| a == v && b == v).count();
        (self.genera[v], legs, self.val(v), loops)
    }

    /// Vertex orderings compatible with the invariant blocks: each returned
    /// vector maps old vertex -> new vertex.
    fn candidate_perms(&self) -> Vec<Vec<usize>> {
        let nv = self.num_vertices();
        let mut blocks: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for v in 0..nv {
            blocks.entry(self.vertex_invariant(v)).or_default().push(v);
        }
        let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
        let mut out = Vec::new();
        let mut perm = vec![usize::MAX; nv];
        fn rec(blocks: &[Vec<usize>], base: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let Some((first, rest)) = blocks.split_first() else {
                out.push(perm.clone());
                return;
            };
            for order in permutations(first.len()) {
                for (i, &o) in order.iter().enumerate() {
                    perm[first[o]] = base + i;
                }
                rec(rest, base + first.len(), perm, out);
            }
        }
        rec(&blocks, 0, &mut perm, &mut out);
        out
    }

    /// Canonical representative of the isomorphism class and an isomorphism onto it.
    pub fn canonical_form(&self) -> (StableGraph, Iso) {
        let mut best: Option<(StableGraph, Iso)> = None;
        for perm in self.candidate_perms() {
            let (cand, slot_map) = self.relabel(&perm);
            if best.as_ref().is_none_or(|(b, _)| cand < *b) {
                best = Some((
                    cand,
                    Iso {
                        vertex_map: perm,
                        slot_map,
                    },
                ));
            }
        }
        best.expect("at least one vertex ordering")
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        CanonicalKey(self.canonical_form().0)
    }

    pub fn isomorphic(&self, other: &StableGraph) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// Full automorphism group (vertices, edges, half-edge swaps; legs fixed).
    pub fn automorphisms(&self) -> Vec<Iso> {
        let n = self.n();
        let mut classes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            classes.entry((a.min(b), a.max(b))).or_default().push(e);
        }
        let mut out = Vec::new();
        for perm in self.candidate_perms() {
            if self.relabel(&perm).0 != self.relabel(&identity(self.num_vertices())).0 {
                continue;
            }
            // extend by bijections between matching edge classes, with loop flips
            let mut partial: Vec<Vec<usize>> = vec![(0..n)
                .chain(std::iter::repeat_n(usize::MAX, 2 * self.num_edges()))
                .collect()];
            for (&(a, b), src) in &classes {
                let (ta, tb) = (perm[a], perm[b]);
                let target = &classes[&(ta.min(tb), ta.max(tb))];
                let is_loop = a == b;
                let mut next = Vec::new();
                for order in permutations(src.len()) {
                    let flips: Vec<u32> = if is_loop {
                        (0..1u32 << src.len()).collect()
                    } else {
                        vec![0]
                    };
                    for mask in flips {
                        for base in &partial {
                            let mut m = base.clone();
                            for (i, &e) in src.iter().enumerate() {
                                let te = target[order[i]];
                                let (s0, s1) = self.edge_slots(e);
                                let (t0, t1) = self.edge_slots(te);
                                let swap = if is_loop {
                                    mask >> i & 1 == 1
                                } else {
                                    // half at vertex x goes to the half at perm[x]
                                    self.slot_vertex(t0) != perm[self.slot_vertex(s0)]
                                };
                                if swap {
                                    m[s0] = t1;
                                    m[s1] = t0;
                                } else {
                                    m[s0] = t0;
                                    m[s1] = t1;
                                }
                            }
                            next.push(m);
                        }
                    }
                }
                partial = next;
            }
            for slot_map in partial {
                out.push(Iso {
                    vertex_map: perm.clone(),
                    slot_map,
                });
            }
        }
        out
    }

    pub fn automorphism_order(&self) -> usize {
        self.automorphisms().len()
    }

    /// Contract every edge with `contract[e] == true`. Returns the contracted graph,
    /// the vertex map, and for each slot of `self` its slot in the result (if it survives).
    pub fn contract(&self, contract: &[bool]) -> (StableGraph, Vec<usize>, Vec<Option<usize>>) {
        let nv = self.num_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if contract[e] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let roots: Vec<usize> = (0..nv).map(|v| find(&mut parent, v)).collect();
        let mut index = HashMap::new();
        let mut vmap = vec![0; nv];
        for v in 0..nv {
            let next = index.len();
            vmap[v] = *index.entry(roots[v]).or_insert(next);
        }
        let nnew = index.len();
        let mut genera = vec![0u32; nnew];
        let mut counts = vec![(0i64, 0i64); nnew]; // (vertices, contracted edges)
        for v in 0..nv {
            genera[vmap[v]] += self.genera[v];
            counts[vmap[v]].0 += 1;
        }
        for (e, &(a, _)) in self.edges.iter().enumerate() {
            if contract[e] {
                counts[vmap[a]].1 += 1;
            }
        }
        for (g, (v, e)) in genera.iter_mut().zip(counts) {
            *g += (e - v + 1) as u32;
        }
        let n = self.n();
        let legs = self.legs.iter().map(|&v| vmap[v]).collect();
        let mut edges = Vec::new();
        let mut slot_map: Vec<Option<usize>> = (0..n).map(Some).collect();
        slot_map.resize(self.num_slots(), None);
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if !contract[e] {
                let ne = edges.len();
                edges.push((vmap[a], vmap[b]));
                let (s0, s1) = self.edge_slots(e);
                slot_map[s0] = Some(n + 2 * ne);
                slot_map[s1] = Some(n + 2 * ne + 1);
            }
        }
        (StableGraph { genera, legs, edges }, vmap, slot_map)
    }

    /// Canonical JSON encoding; half-edge labels continue after the leg labels.
    pub fn to_json(&self) -> Value {
        let n = self.n();
        json!({
            "vertices": self.genera,
            "legs": self.legs.iter().enumerate().map(|(i, &v)| json!([i + 1, v])).collect::<Vec<_>>(),
            "edges": self.edges.iter().enumerate().map(|(e, &(a, b))| {
                json!([[a, n + 2 * e + 1], [b, n + 2 * e + 2]])
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<StableGraph> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<u32>,
            legs: Vec<(usize, usize)>,
            edges: Vec<((usize, usize), (usize, usize))>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut legs = vec![usize::MAX; raw.legs.len()];
        for (label, vtx) in raw.legs {
            if label == 0 || label > legs.len() || legs[label - 1] != usize::MAX {
                return Err(Error::Parse(format!("bad leg label {label}")));
            }
            legs[label - 1] = vtx;
        }
        let edges = raw.edges.into_iter().map(|((a, _), (b, _))| (a, b)).collect();
        StableGraph::new(raw.vertices, legs, edges)
    }
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// All permutations of `0..k`, in lexicographic order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(k, &mut cur, &mut used, &mut out);
    out
}

/// Isomorphism-invariant, totally ordered key: the canonical representative itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CanonicalKey(pub StableGraph);

impl Serialize for StableGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// A canonical graph together with its automorphism group, shared process-wide.
#[derive(Debug)]
pub struct GraphData {
    pub graph: StableGraph,
    pub automorphisms: Vec<Iso>,
    /// Slots grouped by vertex, in increasing slot order.
    pub slots_by_vertex: Vec<Vec<usize>>,
}

impl PartialEq for GraphData {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph
    }
}
impl Eq for GraphData {}
impl PartialOrd for GraphData {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for GraphData {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // coarse strata first: fewer edges, then the canonical encoding
        (self.graph.num_edges(), &self.graph).cmp(&(other.graph.num_edges(), &other.graph))
    }
}
impl std::hash::Hash for GraphData {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.graph.hash(state)
    }
}

impl GraphData {
    pub fn aut_order(&self) -> usize {
        self.automorphisms.len()
    }
}

static REGISTRY: Lazy<RwLock<HashMap<StableGraph, Arc<GraphData>>>> = Lazy::new(Default::default);

/// Intern an arbitrary graph; returns the shared canonical data and the
/// isomorphism from `graph` onto the canonical representative.
pub fn intern(graph: &StableGraph) -> (Arc<GraphData>, Iso) {
    let (canon, iso) = graph.canonical_form();
    (intern_canonical(canon), iso)
}

pub fn intern_canonical(canon: StableGraph) -> Arc<GraphData> {
    if let Some(d) = REGISTRY.read().get(&canon) {
        return d.clone();
    }
    let automorphisms = canon.automorphisms();
    let slots_by_vertex = (0..canon.num_vertices()).map(|v| canon.slots_at(v)).collect();
    let data = Arc::new(GraphData {
        graph: canon.clone(),
        automorphisms,
        slots_by_vertex,
    });
    REGISTRY.write().entry(canon).or_insert(data).clone()
}

type GraphList = Arc<Vec<Arc<GraphData>>>;

static ENUM_CACHE: Lazy<RwLock<HashMap<(u32, usize), GraphList>>> = Lazy::new(Default::default);

/// One representative per isomorphism class of stable graphs of type (g, n),
/// sorted by edge count then canonical key.
pub fn enumerate_stable_graphs(g: u32, n: usize) -> Result<Vec<StableGraph>> {
    Ok(enumerate_interned(g, n)?.iter().map(|d| d.graph.clone()).collect())
}

pub fn enumerate_interned(g: u32, n: usize) -> Result<GraphList> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::UnstablePair { g, n });
    }
    if let Some(v) = ENUM_CACHE.read().get(&(g, n)) {
        return Ok(v.clone());
    }
    let max_edges = 3 * g as usize + n - 3;
    let mut all: BTreeSet<StableGraph> = BTreeSet::new();
    let mut layer: BTreeSet<StableGraph> = BTreeSet::new();
    layer.insert(StableGraph::trivial(g, n).canonical_form().0);
    for _ in 0..=max_edges {
        let mut next = BTreeSet::new();
        for gr in &layer {
            for d in degenerations(gr) {
                next.insert(d.canonical_form().0);
            }
        }
        all.extend(std::mem::replace(&mut layer, next));
    }
    let out: Vec<Arc<GraphData>> = {
        let mut v: Vec<StableGraph> = all.into_iter().collect();
        v.sort_by(|a, b| (a.num_edges(), a).cmp(&(b.num_edges(), b)));
        v.into_iter().map(intern_canonical).collect()
    };
    let out = Arc::new(out);
    ENUM_CACHE.write().insert((g, n), out.clone());
    Ok(out)
}

/// All graphs with one more edge that contract back onto `gr`.
fn degenerations(gr: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let nv = gr.num_vertices();
    for v in 0..nv {
        let gv = gr.genera[v];
        // self-loop lowering the genus
        if gv >= 1 {
            let mut genera = gr.genera.clone();
            genera[v] -= 1;
            let mut edges = gr.edges.clone();
            edges.push((v, v));
            let cand = StableGraph {
                genera,
                legs: gr.legs.clone(),
                edges,
            };
            if cand.validate().is_ok() {
                out.push(cand);
            }
        }
        // split v into v and a new vertex w joined by an edge
        let slots = gr.slots_at(v);
        let k = slots.len();
        for mask in 0u64..(1 << k) {
            for g1 in 0..=gv {
                let w = nv;
                let mut genera = gr.genera.clone();
                genera[v] = g1;
                genera.push(gv - g1);
                let mut legs = gr.legs.clone();
                let mut edges = gr.edges.clone();
                for (i, &s) in slots.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        if s < gr.n() {
                            legs[s] = w;
                        } else {
                            let e = (s - gr.n()) / 2;
                            if (s - gr.n()).is_multiple_of(2) {
                                edges[e].0 = w;
                            } else {
                                edges[e].1 = w;
                            }
                        }
                    }
                }
                edges.push((v, w));
                let cand = StableGraph { genera, legs, edges };
                if cand.validate().is_ok() {
                    out.push(cand);
                }
            }
        }
    }
    out
}

pub fn automorphism_order(graph: &StableGraph) -> usize {
    graph.automorphism_order()
}

/// All weightings w: slots -> {0..r-1} with w(leg i) = a_i mod r, w(h) + w(h') = 0
/// mod r on each edge, and the vertex sums congruent to k(2g(v) - 2 + val(v)).
/// Free residues live on the edges outside a spanning tree; the tree is forced.
pub fn enumerate_weightings(graph: &StableGraph, a: &[i64], k: i64, r: u32) -> Vec<Vec<u32>> {
    assert!(r >= 1, "modulus must be positive");
    assert_eq!(a.len(), graph.n(), "one marking value per leg");
    let rr = r as i64;
    let nv = graph.num_vertices();
    let target: Vec<i64> = (0..nv)
        .map(|v| (k * (2 * graph.genera[v] as i64 - 2 + graph.val(v) as i64)).rem_euclid(rr))
        .collect();

    // BFS spanning tree rooted at vertex 0
    let mut parent_edge: Vec<Option<usize>> = vec![None; nv];
    let mut seen = vec![false; nv];
    let mut order = vec![0];
    let mut in_tree = vec![false; graph.num_edges()];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for (e, &(x, y)) in graph.edges.iter().enumerate() {
            for (p, q) in [(x, y), (y, x)] {
                if p == v && !seen[q] {
                    seen[q] = true;
                    parent_edge[q] = Some(e);
                    in_tree[e] = true;
                    order.push(q);
                }
            }
        }
    }
    let free: Vec<usize> = (0..graph.num_edges()).filter(|&e| !in_tree[e]).collect();

    let mut out = Vec::new();
    let total = (rr as u64).pow(free.len() as u32);
    for code in 0..total {
        let mut w = vec![u32::MAX; graph.num_slots()];
        for (i, &ai) in a.iter().enumerate() {
            w[i] = ai.rem_euclid(rr) as u32;
        }
        let mut c = code;
        for &e in &free {
            let q = (c % rr as u64) as u32;
            c /= rr as u64;
            let (s0, s1) = graph.edge_slots(e);
            w[s0] = q;
            w[s1] = ((rr - q as i64) % rr) as u32;
        }
        // leaves first: fix each tree edge from the child side
        for &v in order.iter().skip(1).rev() {
            let e = parent_edge[v].unwrap();
            let (s0, s1) = graph.edge_slots(e);
            let (child, par) = if graph.slot_vertex(s0) == v { (s0, s1) } else { (s1, s0) };
            let known: i64 = graph
                .slots_at(v)
                .into_iter()
                .filter(|&s| s != child)
                .map(|s| w[s] as i64)
                .sum();
            let wc = (target[v] - known).rem_euclid(rr);
            w[child] = wc as u32;
            w[par] = ((rr - wc) % rr) as u32;
        }
        let root_sum: i64 = graph.slots_at(0).into_iter().map(|s| w[s] as i64).sum();
        if root_sum.rem_euclid(rr) == target[0] {
            out.push(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> StableGraph {
        StableGraph::new(vec![0, 0], vec![], vec![(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_stable_graphs(0, 3).unwrap().len(), 1);
        assert_eq!(enumerate_stable_graphs(1, 1).unwrap().len(), 2);
        assert_eq!(enumerate_stable_graphs(2, 0).unwrap().len(), 7);
        assert_eq!(enumerate_stable_graphs(0, 4).unwrap().len(), 4);
        assert!(matches!(enumerate_stable_graphs(1, 0), Err(Error::UnstablePair { .. })));
        assert!(matches!(enumerate_stable_graphs(0, 2), Err(Error::UnstablePair { .. })));
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(theta().automorphism_order(), 12);
        let loop_leg = StableGraph::new(vec![0], vec![0], vec![(0, 0)]).unwrap();
        assert_eq!(loop_leg.automorphism_order(), 2);
        assert_eq!(StableGraph::trivial(2, 3).automorphism_order(), 1);
        // genus-0 vertex with two loops in genus 2
        let two_loops = StableGraph::new(vec![0], vec![], vec![(0, 0), (0, 0)]).unwrap();
        assert_eq!(two_loops.automorphism_order(), 8);
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert!(StableGraph::new(vec![0], vec![0, 0], vec![]).is_err());
        assert!(StableGraph::new(vec![1, 1], vec![], vec![]).is_err());
        assert!(StableGraph::new(vec![0, 1], vec![0, 0], vec![(0, 1)]).is_ok());
    }

    #[test]
    fn relabeled_graph_same_key() {
        let a = StableGraph::new(vec![0, 1], vec![0, 0, 1], vec![(0, 1)]).unwrap();
        let b = StableGraph::new(vec![1, 0], vec![1, 1, 0], vec![(1, 0)]).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
        let g11 = enumerate_stable_graphs(1, 1).unwrap();
        assert_ne!(g11[0].canonical_key(), g11[1].canonical_key());
    }

    #[test]
    fn contraction_recovers_genus() {
        let t = theta();
        let (c, vmap, smap) = t.contract(&[true, false, false]);
        assert_eq!(c.genera(), &[0]);
        assert_eq!(c.num_edges(), 2);
        assert_eq!(c.genus(), 2);
        assert_eq!(vmap, vec![0, 0]);
        assert_eq!(smap[0], None);
        let (c, _, _) = t.contract(&[true, true, true]);
        assert_eq!(c, StableGraph::trivial(2, 0));
    }

    #[test]
    fn weightings_on_tree_are_unique() {
        let g = StableGraph::new(vec![0, 1], vec![0, 0, 1], vec![(0, 1)]).unwrap();
        let ws = enumerate_weightings(&g, &[2, 3, -5], 0, 11);
        assert_eq!(ws.len(), 1);
        // edge weight on the vertex-0 side cancels legs 1, 2
        assert_eq!(ws[0][3], (11 - 5) as u32);
        assert_eq!(ws[0][4], 5);
    }

    #[test]
    fn loop_weightings() {
        let g = StableGraph::new(vec![0], vec![0], vec![(0, 0)]).unwrap();
        let ws = enumerate_weightings(&g, &[0], 0, 7);
        assert_eq!(ws.len(), 7);
        for w in &ws {
            assert_eq!((w[1] + w[2]) % 7, 0);
        }
    }

    #[test]
    fn global_congruence_failure_gives_nothing() {
        for gr in enumerate_stable_graphs(1, 2).unwrap() {
            assert!(enumerate_weightings(&gr, &[1, 1], 0, 5).is_empty());
        }
    }

    #[test]
    fn json_round_trip() {
        for gr in enumerate_stable_graphs(1, 2).unwrap() {
            let back = StableGraph::from_json(&gr.to_json()).unwrap();
            assert_eq!(back, gr);
        }
    }
}
