//! The r-spin CohFT as an R-matrix graph sum over its TFT, next to Chiodo's
//! Chern characters. Classes built both ways are required to coincide.

use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::bernoulli::bernoulli_at;
use crate::arith::poly::UniPoly;
use crate::arith::rational::{self, Rational};
use crate::arith::series::TruncSeries;
use crate::error::{Error, Result};
use crate::graphs::{self, enumerate_weightings, GraphData, StableGraph};
use crate::strata::{DecoPoly, Decoration, TautClass, WeightContext};

/// The r-spin TFT: `r^g` when `Σ ρ_i ≡ k(2g - 2 + n) mod r`, zero otherwise.
pub fn tft_value(r: u32, g: u32, residues: &[u32], k: i64) -> Rational {
    let n = residues.len() as i64;
    let rr = r as i64;
    let s: i64 = residues.iter().map(|&x| x as i64).sum();
    if (s - k * (2 * g as i64 - 2 + n)).rem_euclid(rr) == 0 {
        rational::pow(&rational::int(rr), g)
    } else {
        rational::zero()
    }
}

/// Structure constants of the degree-zero product: `ζ_i * ζ_j = Σ_c M[c] ζ_c`,
/// read off from three-point genus-zero values and the pairing.
pub fn quantum_product(r: u32, i: u32, j: u32, k: i64) -> Vec<Rational> {
    (0..r)
        .map(|c| {
            // pairing partner of ζ_c is ζ_{-c}
            let partner = (r - c) % r;
            tft_value(r, 0, &[i, j, partner], k)
        })
        .collect()
}

/// Characteristic polynomial of multiplication by `ζ_1` (unit `ζ_0`), computed
/// by the Faddeev–LeVerrier recursion.
pub fn zeta1_characteristic_polynomial(r: u32) -> UniPoly {
    let n = r as usize;
    let mut m = vec![vec![rational::zero(); n]; n];
    for j in 0..r {
        for (c, x) in quantum_product(r, 1, j, 0).into_iter().enumerate() {
            m[c][j as usize] = x;
        }
    }
    let matmul = |a: &Vec<Vec<Rational>>, b: &Vec<Vec<Rational>>| {
        let mut out = vec![vec![rational::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if a[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
        out
    };
    let mut coeffs = vec![rational::zero(); n + 1];
    coeffs[n] = rational::one();
    let mut mk = vec![vec![rational::zero(); n]; n];
    for kk in 1..=n {
        let mut prev = mk.clone();
        for (i, row) in prev.iter_mut().enumerate() {
            row[i] += &coeffs[n - kk + 1];
        }
        mk = matmul(&m, &prev);
        let trace: Rational = (0..n).map(|i| mk[i][i].clone()).fold(rational::zero(), |a, b| a + b);
        coeffs[n - kk] = -trace / rational::int(kk as i64);
    }
    UniPoly::new("x", coeffs)
}

/// A diagonal R-matrix `R_i(z) = exp(u_i(z))` on the basis `ζ_0..ζ_{r-1}`, with
/// pairing `η(ζ_i, ζ_j) = [i + j ≡ 0]` and unit `ζ_unit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrixSpec {
    pub r: u32,
    pub unit: u32,
    pub log_entries: Vec<TruncSeries>,
}

impl RMatrixSpec {
    pub fn order(&self) -> usize {
        self.log_entries[0].order()
    }

    pub fn with_unit(mut self, k: i64) -> Self {
        self.unit = k.rem_euclid(self.r as i64) as u32;
        self
    }

    pub fn entry(&self, i: u32) -> TruncSeries {
        self.log_entries[i as usize].exp()
    }

    pub fn tft(&self, g: u32, residues: &[u32]) -> Rational {
        tft_value(self.r, g, residues, self.unit as i64)
    }

    /// `R(z) R*(-z) = 1` to the truncation order, `*` being the η-adjoint.
    pub fn is_symplectic(&self) -> bool {
        let r = self.r;
        (0..r).all(|i| {
            let adj = self.entry((r - i) % r).rescale(&rational::int(-1));
            let prod = self.entry(i).mul(&adj);
            prod == TruncSeries::one(self.order())
        })
    }
}

fn diagonal_spec(r: u32, order: usize, entry: impl Fn(&Rational, usize) -> Rational) -> RMatrixSpec {
    let log_entries = (0..r)
        .map(|i| {
            let x = rational::rat(i as i64, r as i64);
            let mut c = vec![rational::zero()];
            c.extend((1..=order).map(|d| entry(&x, d)));
            TruncSeries::new(order, c)
        })
        .collect();
    RMatrixSpec {
        r,
        unit: 0,
        log_entries,
    }
}

/// `u_i(z) = -(r^2/2) B_2(i/r) z`.
pub fn rmatrix_zvonkine(r: u32, order: usize) -> RMatrixSpec {
    let r2 = rational::int((r * r) as i64);
    diagonal_spec(r, order, |x, d| {
        if d == 1 {
            -&r2 / rational::int(2) * bernoulli_at(2, x)
        } else {
            rational::zero()
        }
    })
}

/// `u_i(z) = Σ_d B_{d+1}(i/r) / (d(d+1)) · (-r^2 z)^d`.
pub fn rmatrix_chern(r: u32, order: usize) -> RMatrixSpec {
    let mr2 = rational::int(-((r * r) as i64));
    diagonal_spec(r, order, |x, d| {
        bernoulli_at(d + 1, x) / rational::int((d * (d + 1)) as i64) * rational::pow(&mr2, d as u32)
    })
}

/// Polynomial in two variables, truncated by total degree.
#[derive(Clone, Debug)]
struct Bivariate {
    max: usize,
    c: Vec<Vec<Rational>>,
}

impl Bivariate {
    fn zero(max: usize) -> Self {
        Bivariate {
            max,
            c: vec![vec![rational::zero(); max + 1]; max + 1],
        }
    }

    fn mul(&self, o: &Bivariate) -> Bivariate {
        let mut out = Bivariate::zero(self.max);
        for a in 0..=self.max {
            for b in 0..=self.max - a {
                if self.c[a][b].is_zero() {
                    continue;
                }
                for x in 0..=self.max - a - b {
                    for y in 0..=self.max - a - b - x {
                        if !o.c[x][y].is_zero() {
                            out.c[a + x][b + y] += &self.c[a][b] * &o.c[x][y];
                        }
                    }
                }
            }
        }
        out
    }

    /// `exp(f)` for `f` without constant term.
    fn exp(&self) -> Bivariate {
        let mut total = Bivariate::zero(self.max);
        total.c[0][0] = rational::one();
        let mut term = total.clone();
        for m in 1..=self.max {
            term = term.mul(self);
            let scale = rational::rat(1, m as i64);
            for row in term.c.iter_mut() {
                for x in row.iter_mut() {
                    *x *= &scale;
                }
            }
            for a in 0..=self.max {
                for b in 0..=self.max - a {
                    total.c[a][b] += &term.c[a][b];
                }
            }
        }
        total
    }

    /// Exact quotient by `x + y`; panics on a nonzero remainder.
    fn div_x_plus_y(&self) -> Bivariate {
        let mut h = Bivariate::zero(self.max);
        for deg in 1..=self.max {
            // g[a][deg-a] = h[a-1][deg-a] + h[a][deg-a-1]
            let mut carry = rational::zero();
            for a in (1..=deg).rev() {
                let b = deg - a;
                let v = &self.c[a][b] - &carry;
                h.c[a - 1][b] = v.clone();
                carry = v;
            }
            assert_eq!(self.c[0][deg], carry, "numerator not divisible by x + y");
        }
        assert!(self.c[0][0].is_zero(), "numerator has a constant term");
        h
    }
}

/// `(1 - exp(-u_i(x) - u_j(y))) / (x + y)` up to total degree `budget`.
fn edge_series(spec: &RMatrixSpec, i: u32, j: u32, budget: usize) -> Bivariate {
    let max = budget + 1;
    let mut f = Bivariate::zero(max);
    for d in 1..=max.min(spec.order()) {
        f.c[d][0] -= spec.log_entries[i as usize].coeff(d);
        f.c[0][d] -= spec.log_entries[j as usize].coeff(d);
    }
    let mut num = f.exp();
    for row in num.c.iter_mut() {
        for x in row.iter_mut() {
            *x = -x.clone();
        }
    }
    num.c[0][0] += rational::one();
    let q = num.div_x_plus_y();
    let mut out = Bivariate::zero(budget);
    for a in 0..=budget {
        for b in 0..=budget - a {
            out.c[a][b] = q.c[a][b].clone();
        }
    }
    out
}

/// `Σ_m 1/m! p_{m*}(Π_{j≤m} T(ψ_{n+j}))` with `T(z) = z(1 - e^{-u(z)})`, as a
/// polynomial in kappa classes (sorted index lists). The pushforward of a psi
/// monomial at forgotten points is a sum over set partitions of the points,
/// each block `B` contributing `(|B|-1)! κ_{Σ_B (j_i - 1)}`.
pub fn translation_kappa_poly(u: &TruncSeries, budget: usize) -> Vec<(Vec<u32>, Rational)> {
    let order = u.order().min(budget);
    let u = TruncSeries::new(order, u.coeffs().to_vec());
    let t_over_z = TruncSeries::one(order).add(&u.neg().exp().neg()); // 1 - e^{-u}
                                                                      // t_j = coefficient of z^j in T, i.e. of z^{j-1} in 1 - e^{-u}
    let t: Vec<Rational> = (0..=order + 1)
        .map(|j| {
            if j == 0 {
                rational::zero()
            } else {
                t_over_z.coeff(j - 1).clone()
            }
        })
        .collect();
    let mut acc: std::collections::BTreeMap<Vec<u32>, Rational> = std::collections::BTreeMap::new();
    acc.insert(Vec::new(), rational::one());
    let mut seqs: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), rational::one())];
    for m in 1..=budget {
        let mut next = Vec::new();
        for (seq, w) in &seqs {
            let used: u32 = seq.iter().map(|j| j - 1).sum();
            for j in 2..=order as u32 + 1 {
                if used + j - 1 > budget as u32 || t[j as usize].is_zero() {
                    continue;
                }
                let mut s = seq.clone();
                s.push(j);
                next.push((s, w * &t[j as usize]));
            }
        }
        seqs = next;
        let inv_fact = rational::one() / rational::factorial(m as u32);
        for (seq, w) in &seqs {
            for (kappa, mult) in set_partition_kappas(seq) {
                *acc.entry(kappa).or_insert_with(rational::zero) += w * &inv_fact * rational::int(mult);
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// For exponents `j_1..j_m`, every set partition with its kappa monomial and
/// weight `Π (|B| - 1)!`.
fn set_partition_kappas(seq: &[u32]) -> Vec<(Vec<u32>, i64)> {
    fn rec(seq: &[u32], i: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<(Vec<u32>, i64)>) {
        if i == seq.len() {
            let mut kappa: Vec<u32> = blocks.iter().map(|b| b.iter().map(|&x| seq[x] - 1).sum()).collect();
            kappa.sort_unstable();
            let w = blocks.iter().map(|b| (1..b.len() as i64).product::<i64>()).product();
            out.push((kappa, w));
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(seq, i + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(seq, i + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(seq, 0, &mut Vec::new(), &mut out);
    out
}

fn graphs_up_to(g: u32, n: usize, max_codim: usize) -> Result<Vec<Arc<GraphData>>> {
    Ok(graphs::enumerate_interned(g, n)?
        .iter()
        .filter(|d| d.graph.num_edges() <= max_codim)
        .cloned()
        .collect())
}

/// The R-matrix action on the TFT: a graph sum with leg factors `R^{-1}(ψ)`,
/// edge factors `(η^{-1} - R^{-1}(ψ) η^{-1} R^{-1}(ψ')^t)/(ψ + ψ')`, and vertex
/// factors the translated TFT, with basis indices summed over every edge.
pub fn rmatrix_action(spec: &RMatrixSpec, g: u32, residues: &[u32], max_codim: usize) -> Result<TautClass> {
    let n = residues.len();
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::UnstablePair { g, n });
    }
    if spec.order() < max_codim {
        return Err(Error::TruncationTooSmall {
            have: spec.order(),
            need: max_codim,
        });
    }
    if residues.iter().any(|&x| x >= spec.r) {
        return Err(Error::InvalidInput("residues must lie in 0..r".into()));
    }
    let a: Vec<i64> = residues.iter().map(|&x| x as i64).collect();
    let translation = translation_kappa_poly(&spec.log_entries[spec.unit as usize], max_codim);
    let parts: Vec<(Arc<GraphData>, DecoPoly)> = graphs_up_to(g, n, max_codim)?
        .into_par_iter()
        .map(|data| {
            let poly = action_on_graph(spec, &data, &a, residues, &translation, max_codim);
            (data, poly)
        })
        .collect();
    let mut out = TautClass::zero(g, n);
    for (data, poly) in parts {
        out.add_graph_poly(&data, &poly, &rational::rat(1, data.aut_order() as i64));
    }
    Ok(out)
}

fn action_on_graph(
    spec: &RMatrixSpec,
    data: &GraphData,
    a: &[i64],
    residues: &[u32],
    translation: &[(Vec<u32>, Rational)],
    max_codim: usize,
) -> DecoPoly {
    let gr = &data.graph;
    let budget = max_codim - gr.num_edges();
    let weightings = enumerate_weightings(gr, a, spec.unit as i64, spec.r);
    if weightings.is_empty() {
        return DecoPoly::default();
    }
    let mut base = DecoPoly::one(gr);
    for (l, &ai) in residues.iter().enumerate() {
        let inv = spec.log_entries[ai as usize].neg().exp();
        let mut f = DecoPoly::default();
        for d in 0..=budget.min(inv.order()) {
            let mut m = Decoration::empty(gr);
            m.psi[l] = d as u32;
            f.add_term(m, inv.coeff(d).clone());
        }
        base = base.mul(&f, budget);
    }
    for v in 0..gr.num_vertices() {
        let mut f = DecoPoly::default();
        for (kappa, c) in translation {
            let mut m = Decoration::empty(gr);
            m.kappa[v] = kappa.clone();
            f.add_term(m, c.clone());
        }
        base = base.mul(&f, budget);
    }
    let tft: Rational = gr
        .genera()
        .iter()
        .map(|&gv| rational::pow(&rational::int(spec.r as i64), gv))
        .product();
    let mut edge_cache: std::collections::HashMap<(usize, u32), DecoPoly> = std::collections::HashMap::new();
    let mut sum = DecoPoly::default();
    for w in &weightings {
        let mut prod = DecoPoly::one(gr);
        for e in 0..gr.num_edges() {
            let (s, t) = gr.edge_slots(e);
            let poly = edge_cache.entry((e, w[s])).or_insert_with(|| {
                let b = edge_series(spec, w[s], w[t], budget);
                let mut p = DecoPoly::default();
                for x in 0..=budget {
                    for y in 0..=budget - x {
                        let mut m = Decoration::empty(gr);
                        m.psi[s] = x as u32;
                        m.psi[t] = y as u32;
                        p.add_term(m, b.c[x][y].clone());
                    }
                }
                p
            });
            prod = prod.mul(poly, budget);
        }
        sum.add(&prod);
    }
    base.mul(&sum, budget).scale(&tft)
}

/// Input to Chiodo's formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiodoInput {
    pub g: u32,
    pub a: Vec<i64>,
    pub k: i64,
    pub r: u32,
    pub d: usize,
}

impl ChiodoInput {
    pub fn context(&self) -> WeightContext {
        WeightContext::new(self.r, &self.a, self.k)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.a.len();
        if 2 * self.g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::UnstablePair { g: self.g, n });
        }
        if self.r == 0 {
            return Err(Error::InvalidInput("r must be positive".into()));
        }
        let s: i64 = self.a.iter().sum();
        if (s - self.k * (2 * self.g as i64 - 2 + n as i64)).rem_euclid(self.r as i64) != 0 {
            return Err(Error::InvalidInput(
                "sum of A is not congruent to k(2g-2+n) mod r".into(),
            ));
        }
        Ok(())
    }
}

fn bern_over_fact(d: usize, num: u32, r: u32) -> Rational {
    bernoulli_at(d + 1, &rational::rat(num as i64, r as i64)) / rational::factorial(d as u32 + 1)
}

/// `ch_d` of the r-th root bundle as a weighted class: generators carry the
/// mod-r weights of their slots.
pub fn chiodo_weighted(input: &ChiodoInput) -> Result<TautClass> {
    input.check()?;
    let ctx = input.context();
    let (g, n, r, d) = (input.g, input.a.len(), input.r, input.d);
    let dim = 3 * g as usize + n - 3;
    let mut out = TautClass::zero_weighted(g, n, ctx.clone());
    if d > dim {
        return Ok(out);
    }
    let triv = StableGraph::trivial(g, n);
    let (tdata, _) = graphs::intern(&triv);
    let mut smooth = DecoPoly::default();
    let unit = Decoration {
        weights: ctx.a.clone(),
        ..Decoration::empty(&triv)
    };
    let kcoef = bern_over_fact(d, ctx.k, r);
    if d == 0 {
        smooth.add_term(unit.clone(), kcoef * rational::int(2 * g as i64 - 2 + n as i64));
    } else {
        let mut m = unit.clone();
        m.kappa[0] = vec![d as u32];
        smooth.add_term(m, kcoef);
    }
    for (i, &ai) in ctx.a.iter().enumerate() {
        let mut m = unit.clone();
        m.psi[i] = d as u32;
        smooth.add_term(m, -bern_over_fact(d, ai, r));
    }
    out.add_graph_poly(&tdata, &smooth, &rational::one());
    if d == 0 {
        return Ok(out);
    }
    // boundary: half the sum over both branches of the node
    let half = rational::rat(1, 2);
    for data in graphs::enumerate_interned(g, n)?
        .iter()
        .filter(|x| x.graph.num_edges() == 1)
    {
        let gr = &data.graph;
        let (s0, s1) = gr.edge_slots(0);
        for w in enumerate_weightings(gr, &input.a, input.k, r) {
            let mut poly = DecoPoly::default();
            for (b, o) in [(s0, s1), (s1, s0)] {
                let c = bern_over_fact(d, w[b], r) * &half;
                // the residue w(b) is paired with γ_{d-1}(ψ_o, ψ_b) = Σ_{i+j=d-1} (-ψ_o)^i ψ_b^j
                for i in 0..d {
                    let mut m = Decoration {
                        weights: w.clone(),
                        ..Decoration::empty(gr)
                    };
                    m.psi[o] = i as u32;
                    m.psi[b] = (d - 1 - i) as u32;
                    let sign = if i % 2 == 0 { c.clone() } else { -c.clone() };
                    poly.add_term(m, sign);
                }
            }
            out.add_graph_poly(data, &poly, &rational::rat(1, data.aut_order() as i64));
        }
    }
    Ok(out)
}

/// Downstairs image of a weighted class: `[Γ, w, γ] ↦ r^{-h1(Γ)} [Γ, γ]`.
pub fn project_weighted(t: &TautClass) -> TautClass {
    let r = t.weighting().map(|c| c.r).unwrap_or(1);
    let inv = rational::rat(1, r as i64);
    t.unweighted(|gen, c| c * rational::pow(&inv, gen.graph.graph.h1() as u32))
}

/// `ch_d(R π_* L)` pushed to the strata algebra of `M_{g,n}`.
pub fn chiodo_chern_character(input: &ChiodoInput) -> Result<TautClass> {
    Ok(project_weighted(&chiodo_weighted(input)?))
}

/// Which exponential of Chern characters is being formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChernKind {
    /// `exp(-r^2 ch_1)`, matched by [`rmatrix_zvonkine`].
    Zvonkine,
    /// `exp(Σ_d (-r^2)^d (d-1)! ch_d)`, matched by [`rmatrix_chern`].
    TotalChern,
}

/// Route (i): exponentiate in the weighted algebra, then project.
pub fn chern_exponential_chiodo(
    kind: ChernKind,
    g: u32,
    a: &[i64],
    k: i64,
    r: u32,
    max_codim: usize,
) -> Result<TautClass> {
    let base = ChiodoInput {
        g,
        a: a.to_vec(),
        k,
        r,
        d: 0,
    };
    base.check()?;
    let mut exponent = TautClass::zero_weighted(g, a.len(), base.context());
    let mr2 = rational::int(-((r * r) as i64));
    let top = match kind {
        ChernKind::Zvonkine => 1.min(max_codim),
        ChernKind::TotalChern => max_codim,
    };
    for d in 1..=top {
        let ch = chiodo_weighted(&ChiodoInput { d, ..base.clone() })?;
        let c = rational::pow(&mr2, d as u32) * rational::factorial(d as u32 - 1);
        exponent = exponent.add(&ch.scale(&c));
    }
    Ok(project_weighted(&exponent.exp_nilpotent(max_codim)?))
}

/// Route (ii): `r^{-g}` times the R-matrix action with unit `ζ_k`.
pub fn chern_exponential_rmatrix(
    kind: ChernKind,
    g: u32,
    a: &[i64],
    k: i64,
    r: u32,
    max_codim: usize,
) -> Result<TautClass> {
    let order = max_codim.max(1);
    let spec = match kind {
        ChernKind::Zvonkine => rmatrix_zvonkine(r, order),
        ChernKind::TotalChern => rmatrix_chern(r, order),
    }
    .with_unit(k);
    let residues: Vec<u32> = a.iter().map(|&x| x.rem_euclid(r as i64) as u32).collect();
    let t = rmatrix_action(&spec, g, &residues, max_codim)?;
    Ok(t.scale(&(rational::one() / rational::pow(&rational::int(r as i64), g))))
}

/// Build the class of `kind` along the Chiodo route and the R-matrix route; error if they differ.
pub fn both_routes(kind: ChernKind, g: u32, a: &[i64], k: i64, r: u32, max_codim: usize) -> Result<TautClass> {
    let max_codim = max_codim.min((3 * g as usize + a.len()).saturating_sub(3));
    let one = chern_exponential_chiodo(kind, g, a, k, r, max_codim)?;
    let two = chern_exponential_rmatrix(kind, g, a, k, r, max_codim)?;
    if one != two {
        let diff = one.sub(&two);
        return Err(Error::MismatchBetweenConstructions(format!(
            "{kind:?} class for g={g}, A={a:?}, k={k}, r={r}: {} differing generators",
            diff.len()
        )));
    }
    Ok(one)
}

/// `r^{-g}`-normalized pushforward of `exp(r^2 c_1(-Rπ_* L))`, built along both
/// routes and required to agree.
pub fn zvonkine_class(g: u32, a: &[i64], k: i64, r: u32, max_codim: usize) -> Result<TautClass> {
    both_routes(ChernKind::Zvonkine, g, a, k, r, max_codim)
}

/// The normalized total Chern class `Σ_i r^{2i} c_i(-Rπ_* L)`, built along both
/// routes and required to agree.
pub fn chern_class_weighted(g: u32, a: &[i64], k: i64, r: u32, max_codim: usize) -> Result<TautClass> {
    both_routes(ChernKind::TotalChern, g, a, k, r, max_codim)
}

/// The trivial-graph part of a class as a kappa/psi polynomial.
pub fn smooth_part(t: &TautClass) -> DecoPoly {
    let mut p = DecoPoly::default();
    for (gen, c) in t.terms() {
        if gen.graph.graph.num_edges() == 0 {
            p.add_term(gen.deco.clone(), c.clone());
        }
    }
    p
}

/// `log(1 + X)` of a polynomial with constant term one, truncated at `max_degree`.
pub fn log_one_plus(p: &DecoPoly, graph: &StableGraph, max_degree: usize) -> Result<DecoPoly> {
    let one = Decoration::empty(graph);
    if p.terms.get(&one) != Some(&rational::one()) {
        return Err(Error::InvalidInput("logarithm needs constant term one".into()));
    }
    let mut x = p.clone();
    x.terms.remove(&one);
    let mut out = DecoPoly::default();
    let mut power = DecoPoly::one(graph);
    for m in 1..=max_degree {
        power = power.mul(&x, max_degree);
        let c = rational::rat(if m % 2 == 1 { 1 } else { -1 }, m as i64);
        out.add(&power.scale(&c));
    }
    Ok(out)
}

/// Whether, for `1 ≤ d ≤ max_d`, the degree-`d` part of `log` of the smooth
/// part of `r^{-g} · R.ω` (total Chern spec) equals `(-r^2)^d (d-1)!` times the
/// smooth part of `ch_d`.
pub fn chiodo_smooth_consistency(g: u32, a: &[i64], k: i64, r: u32, max_d: usize) -> Result<bool> {
    let n = a.len();
    let t = chern_exponential_rmatrix(ChernKind::TotalChern, g, a, k, r, max_d)?;
    let triv = StableGraph::trivial(g, n);
    let log = log_one_plus(&smooth_part(&t), &triv, max_d)?;
    let mr2 = rational::int(-((r * r) as i64));
    for d in 1..=max_d {
        let ch = chiodo_chern_character(&ChiodoInput {
            g,
            a: a.to_vec(),
            k,
            r,
            d,
        })?;
        let expected = smooth_part(&ch).scale(&(rational::pow(&mr2, d as u32) * rational::factorial(d as u32 - 1)));
        if log.graded_part(d) != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shift the single negative entry of `A` up by `r`.
pub fn shifted_markings(a: &[i64], r: u32) -> Result<Vec<i64>> {
    let neg: Vec<usize> = (0..a.len()).filter(|&i| a[i] < 0).collect();
    if neg.len() != 1 {
        return Err(Error::InvalidInput("exactly one marking must be negative".into()));
    }
    let mut out = a.to_vec();
    out[neg[0]] += r as i64;
    Ok(out)
}

/// Coefficients of `λ^{g-d}` in the degree-zero localization vertex,
/// `Σ_d (λ/r)^{g-d} φ_*(c_d(-Rπ_* L_{A'}))`, as `(g - d, class)` pairs. In the
/// normalization of [`chern_class_weighted`] the coefficient is
/// `r^{g-1-d} [chern]_d`.
pub fn localization_vertex_class(g: u32, a: &[i64], r: u32, max_codim: usize) -> Result<Vec<(i64, TautClass)>> {
    let shifted = shifted_markings(a, r)?;
    let total = chern_class_weighted(g, &shifted, 0, r, max_codim)?;
    let rr = rational::int(r as i64);
    Ok((0..=max_codim)
        .map(|d| {
            let e = g as i64 - 1 - d as i64;
            let factor = if e >= 0 {
                rational::pow(&rr, e as u32)
            } else {
                rational::one() / rational::pow(&rr, (-e) as u32)
            };
            (g as i64 - d as i64, total.graded_part(d).scale(&factor))
        })
        .collect())
}
