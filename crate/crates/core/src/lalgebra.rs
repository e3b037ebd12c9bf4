//! L-algebras presented by their top matrix correlators.
//!
//! The index set lists the `T` basis first (`t1, t2, …`, black) and then the
//! `F` basis (`f1, f2, …`, white). A correlator `⟨Δ_{a1}…Δ_{an}⟩` is the
//! endomorphism of `F` obtained from a one-vertex tree by feeding `Δ_{ai}` to
//! `n` inputs and keeping one further white input (the special slot) free.
//! Correlators are stored under multisets, written as exponent vectors.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{basis_for, GradedClass};
use crate::error::{Error, Result};
use crate::functors::{fstar_edge_class, VertexTensorClass};
use crate::linalg::Mat;
use crate::par::{self, Execution};
use crate::rational::{binomial, q, Q};
use crate::series::monomials;
use crate::trees::{enumerate_stable_partitions, EdgeSplit, Flag, GoodFamily, Label, PaintedSet, Side, TreeStructure, TwoPartition};

/// An even L-algebra on `(T, F)` given by top matrix correlators of arity
/// `1..=order`. Missing multisets are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LAlgebra {
    dim_t: usize,
    dim_f: usize,
    order: usize,
    correlators: BTreeMap<Vec<u32>, Mat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelatorJson {
    pub indices: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LAlgebraJson {
    #[serde(rename = "dimT")]
    pub dim_t: usize,
    #[serde(rename = "dimF")]
    pub dim_f: usize,
    pub order: usize,
    #[serde(default = "even")]
    pub parity: String,
    pub correlators: Vec<CorrelatorJson>,
}

fn even() -> String {
    "even".into()
}

impl LAlgebra {
    pub fn new(dim_t: usize, dim_f: usize, order: usize) -> Self {
        LAlgebra { dim_t, dim_f, order, correlators: BTreeMap::new() }
    }

    pub fn dim_t(&self) -> usize {
        self.dim_t
    }

    pub fn dim_f(&self) -> usize {
        self.dim_f
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of indices, `dimT + dimF`.
    pub fn num_indices(&self) -> usize {
        self.dim_t + self.dim_f
    }

    /// Nonzero correlators keyed by exponent vector.
    pub fn correlators(&self) -> &BTreeMap<Vec<u32>, Mat> {
        &self.correlators
    }

    pub fn is_white_index(&self, a: usize) -> bool {
        a >= self.dim_t
    }

    pub fn index_name(&self, a: usize) -> String {
        if a < self.dim_t {
            format!("t{}", a + 1)
        } else {
            format!("f{}", a - self.dim_t + 1)
        }
    }

    pub fn index_names(&self) -> Vec<String> {
        (0..self.num_indices()).map(|a| self.index_name(a)).collect()
    }

    pub fn parse_index(&self, s: &str) -> Result<usize> {
        let bad = || Error::Parse(format!("bad index '{s}'"));
        let (kind, rest) = s.split_at(s.len().min(1));
        let n: usize = rest.parse().map_err(|_| bad())?;
        match kind {
            "t" if (1..=self.dim_t).contains(&n) => Ok(n - 1),
            "f" if (1..=self.dim_f).contains(&n) => Ok(self.dim_t + n - 1),
            _ => Err(bad()),
        }
    }

    /// Index names of a multiset, with repetition, in index order.
    pub fn multiset_names(&self, exp: &[u32]) -> Vec<String> {
        exp.iter().enumerate().flat_map(|(a, &k)| std::iter::repeat(self.index_name(a)).take(k as usize)).collect()
    }

    pub fn exponent_of(&self, indices: &[usize]) -> Vec<u32> {
        let mut e = vec![0u32; self.num_indices()];
        for &a in indices {
            e[a] += 1;
        }
        e
    }

    /// Sets the correlator of a multiset; zero matrices are dropped.
    pub fn set(&mut self, exp: Vec<u32>, m: Mat) -> Result<()> {
        if exp.len() != self.num_indices() {
            return Err(Error::Dimension(format!("multiset over {} indices, expected {}", exp.len(), self.num_indices())));
        }
        let size = exp.iter().sum::<u32>() as usize;
        if size == 0 || size > self.order {
            return Err(Error::Arity { arity: size, order: self.order });
        }
        if m.rows() != self.dim_f || m.cols() != self.dim_f {
            return Err(Error::Dimension(format!("correlator must be {0}x{0}", self.dim_f)));
        }
        if m.is_zero() {
            self.correlators.remove(&exp);
        } else {
            self.correlators.insert(exp, m);
        }
        Ok(())
    }

    /// Correlator of a multiset (zero when absent).
    pub fn get(&self, exp: &[u32]) -> Mat {
        self.correlators.get(exp).cloned().unwrap_or_else(|| Mat::zeros(self.dim_f, self.dim_f))
    }

    pub fn get_ref(&self, exp: &[u32]) -> Option<&Mat> {
        self.correlators.get(exp)
    }

    pub fn to_json(&self) -> LAlgebraJson {
        LAlgebraJson {
            dim_t: self.dim_t,
            dim_f: self.dim_f,
            order: self.order,
            parity: even(),
            correlators: self
                .correlators
                .iter()
                .map(|(e, m)| CorrelatorJson { indices: self.multiset_names(e), matrix: m.to_strings() })
                .collect(),
        }
    }

    pub fn from_json(j: &LAlgebraJson) -> Result<Self> {
        if j.parity != "even" {
            return Err(Error::Parse(format!("only even L-algebras are supported, got parity '{}'", j.parity)));
        }
        let mut l = LAlgebra::new(j.dim_t, j.dim_f, j.order);
        let mut seen = BTreeSet::new();
        for c in &j.correlators {
            let idx: Vec<usize> = c.indices.iter().map(|s| l.parse_index(s)).collect::<Result<_>>()?;
            let e = l.exponent_of(&idx);
            if !seen.insert(e.clone()) {
                return Err(Error::Parse(format!("multiset {:?} listed twice", c.indices)));
            }
            l.set(e, Mat::from_strings(&c.matrix)?)?;
        }
        Ok(l)
    }

    /// The theory whose correlators are all `(1)` on a one-dimensional `F`
    /// and a `T` of dimension `dim_t` (0 or 1). With `dim_t = 1` it is a unit
    /// for [`tensor`]; with `dim_t = 0` only for theories with `T = 0`.
    pub fn unit(dim_t: usize, order: usize) -> Result<Self> {
        if dim_t > 1 {
            return Err(Error::Precondition("the unit theory has dimT 0 or 1".into()));
        }
        let mut l = LAlgebra::new(dim_t, 1, order);
        for e in monomials(dim_t + 1, 1, order as u32) {
            l.set(e, Mat::identity(1))?;
        }
        Ok(l)
    }
}

/// A violated instance of the quadratic relation for the multiset `multiset`
/// and the index pair `(i, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationViolation {
    pub multiset: Vec<String>,
    pub i: String,
    pub k: String,
    pub defect: Vec<Vec<String>>,
}

/// Failure of symmetry between the special slot and an `F`-argument:
/// `⟨A f⟩ e_g ≠ ⟨A g⟩ e_f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryViolation {
    pub args: Vec<String>,
    pub f: String,
    pub g: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    pub violations: Vec<RelationViolation>,
    /// Reported separately: the quadratic relations do not depend on it,
    /// but tree evaluation with a white input in a non-special slot does.
    pub f_symmetry_violations: Vec<SymmetryViolation>,
}

impl VerifyReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fully_symmetric(&self) -> bool {
        self.f_symmetry_violations.is_empty()
    }
}

fn with_added(e: &[u32], a: usize) -> Vec<u32> {
    let mut out = e.to_vec();
    out[a] += 1;
    out
}

/// All sub-multisets of `e` with their binomial weights `Π C(e_a, s_a)`.
fn sub_multisets(e: &[u32]) -> Vec<(Vec<u32>, Q)> {
    let mut out = vec![(Vec::new(), Q::one())];
    for &k in e {
        let mut next = Vec::with_capacity(out.len() * (k as usize + 1));
        for (s, w) in &out {
            for x in 0..=k {
                let mut s2 = s.clone();
                s2.push(x);
                next.push((s2, w * binomial(k, x)));
            }
        }
        out = next;
    }
    out
}

/// The defect `Σ_{A ⊆ M'} C(M', A) (⟨A i⟩⟨M'−A k⟩ − ⟨A k⟩⟨M'−A i⟩)` of the
/// quadratic relation at `M = M' + i + k`.
pub fn relation_defect(l: &LAlgebra, m_prime: &[u32], i: usize, k: usize) -> Mat {
    let mut acc = Mat::zeros(l.dim_f, l.dim_f);
    for (a, w) in sub_multisets(m_prime) {
        let b: Vec<u32> = m_prime.iter().zip(&a).map(|(x, y)| x - y).collect();
        let (ai, ak, bi, bk) = (with_added(&a, i), with_added(&a, k), with_added(&b, i), with_added(&b, k));
        if let (Some(x), Some(y)) = (l.get_ref(&ai), l.get_ref(&bk)) {
            acc.add_scaled(&x.mul(y), &w);
        }
        if let (Some(x), Some(y)) = (l.get_ref(&ak), l.get_ref(&bi)) {
            acc.add_scaled(&x.mul(y), &-w);
        }
    }
    acc
}

/// Checks the quadratic relations for every multiset of size `2..=order` and
/// every pair of distinct indices in it (the quadruple is `i`, the root, `k`
/// and the special input), plus the separate `F`-symmetry report.
pub fn verify(l: &LAlgebra) -> VerifyReport {
    verify_with(l, Execution::default())
}

pub fn verify_with(l: &LAlgebra, exec: Execution) -> VerifyReport {
    let n = l.num_indices();
    let order = l.order as u32;
    let ms = if order >= 2 { monomials(n, 0, order - 2) } else { Vec::new() };
    let per = par::map(exec, &ms, |mp| {
        let mut found = Vec::new();
        let mut checked = 0usize;
        for i in 0..n {
            for k in i + 1..n {
                checked += 1;
                let d = relation_defect(l, mp, i, k);
                if !d.is_zero() {
                    let full = with_added(&with_added(mp, i), k);
                    found.push(RelationViolation {
                        multiset: l.multiset_names(&full),
                        i: l.index_name(i),
                        k: l.index_name(k),
                        defect: d.to_strings(),
                    });
                }
            }
        }
        (checked, found)
    });
    let mut checked = 0;
    let mut violations = Vec::new();
    for (c, v) in per {
        checked += c;
        violations.extend(v);
    }
    VerifyReport { checked, violations, f_symmetry_violations: f_symmetry(l, exec) }
}

fn f_symmetry(l: &LAlgebra, exec: Execution) -> Vec<SymmetryViolation> {
    if l.dim_f < 2 || l.order == 0 {
        return Vec::new();
    }
    let n = l.num_indices();
    let args = monomials(n, 0, l.order as u32 - 1);
    par::map(exec, &args, |a| {
        let mut out = Vec::new();
        for f in 0..l.dim_f {
            for g in f + 1..l.dim_f {
                let mf = l.get(&with_added(a, l.dim_t + f));
                let mg = l.get(&with_added(a, l.dim_t + g));
                if (0..l.dim_f).any(|r| mf.get(r, g) != mg.get(r, f)) {
                    out.push(SymmetryViolation {
                        args: l.multiset_names(a),
                        f: l.index_name(l.dim_t + f),
                        g: l.index_name(l.dim_t + g),
                    });
                }
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Which white input of a vertex receives the free argument.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpecialSlot {
    /// The first white input in the canonical flag order.
    #[default]
    First,
    /// The last white input in the canonical flag order.
    Last,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Edges in cutting order; each must end at a vertex whose other edges
    /// away from the root are already cut. Default: innermost first.
    pub cut_order: Option<Vec<TwoPartition>>,
    pub special: SpecialSlot,
}

/// Evaluates the correlator of the tree `g`, rooted at `w1`, on the given
/// inputs: an `F`-vector for every other white label and a `T`-vector for
/// every black label.
pub fn evaluate_tree_correlator(l: &LAlgebra, g: &GoodFamily, inputs: &BTreeMap<Label, Vec<Q>>) -> Result<Vec<Q>> {
    evaluate_with(l, g, inputs, &EvalOptions::default())
}

pub fn evaluate_with(l: &LAlgebra, g: &GoodFamily, inputs: &BTreeMap<Label, Vec<Q>>, opts: &EvalOptions) -> Result<Vec<Q>> {
    let t = TreeStructure::expand(g)?;
    let s = g.ground();
    for p in 1..s.len() {
        let label = s.label_at(p);
        let want = if label.is_white() { l.dim_f } else { l.dim_t };
        match inputs.get(&label) {
            Some(v) if v.len() == want => {}
            Some(v) => return Err(Error::Dimension(format!("input {label} has length {}, expected {want}", v.len()))),
            None => return Err(Error::Precondition(format!("missing input for {label}"))),
        }
    }
    let order = match &opts.cut_order {
        Some(o) => o.clone(),
        None => {
            let mut edges = t.edge_partitions();
            edges.sort_by_key(|e| (e.part_other().count_ones(), e.part_min()));
            edges
        }
    };
    let edges = t.edges();
    if order.len() != edges.len() || order.iter().collect::<BTreeSet<_>>().len() != edges.len() {
        return Err(Error::Precondition("cut order must list every edge once".into()));
    }
    let mut values: BTreeMap<TwoPartition, Vec<Q>> = BTreeMap::new();
    for sigma in &order {
        let e = t.edge(sigma).ok_or(Error::NotAnEdge)?;
        let v = e.b;
        let out = eval_vertex(l, &t, v, inputs, &values, opts.special)?
            .ok_or_else(|| Error::Precondition(format!("edge {sigma} is not an end edge when cut")))?;
        values.insert(*sigma, out);
    }
    let root = t.vertex_of(&Flag::Tail(Label::white(1))).expect("w1 is a tail");
    eval_vertex(l, &t, root, inputs, &values, opts.special)?
        .ok_or_else(|| Error::Precondition("edges left uncut".into()))
}

/// Value at the outgoing flag of `v`, or `None` if an incoming edge has not
/// been cut yet.
fn eval_vertex(
    l: &LAlgebra,
    t: &TreeStructure,
    v: usize,
    inputs: &BTreeMap<Label, Vec<Q>>,
    values: &BTreeMap<TwoPartition, Vec<Q>>,
    special: SpecialSlot,
) -> Result<Option<Vec<Q>>> {
    let mut args: Vec<(bool, &Vec<Q>)> = Vec::new();
    for rec in &t.vertex(v).flags {
        if rec.branch & 1 == 1 {
            continue;
        }
        match rec.flag {
            Flag::Tail(label) => args.push((label.is_white(), &inputs[&label])),
            Flag::Half { edge, .. } => match values.get(&edge) {
                Some(x) => args.push((true, x)),
                None => return Ok(None),
            },
        }
    }
    let whites: Vec<usize> = (0..args.len()).filter(|&i| args[i].0).collect();
    let slot = match special {
        SpecialSlot::First => whites.first(),
        SpecialSlot::Last => whites.last(),
    }
    .copied()
    .ok_or_else(|| Error::Precondition(format!("vertex {v} has no white input")))?;
    let special_vec = args[slot].1.clone();
    args.remove(slot);
    if args.len() > l.order {
        return Err(Error::Arity { arity: args.len(), order: l.order });
    }
    // Polylinear expansion of the arguments into multiset coefficients.
    let mut expansion: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    expansion.insert(vec![0; l.num_indices()], Q::one());
    for (white, vec) in &args {
        let offset = if *white { l.dim_t } else { 0 };
        let mut next = BTreeMap::new();
        for (e, c) in &expansion {
            for (a, x) in vec.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let entry = next.entry(with_added(e, offset + a)).or_insert_with(Q::zero);
                *entry += c * x;
            }
        }
        expansion = next;
    }
    let mut out = vec![Q::zero(); l.dim_f];
    for (e, c) in expansion {
        if let Some(m) = l.get_ref(&e) {
            for (o, y) in out.iter_mut().zip(m.mul_vec(&special_vec)) {
                *o += c.clone() * y;
            }
        }
    }
    Ok(Some(out))
}

/// All assignments of basis vectors to the non-root labels of `s`, in
/// lexicographic order of the index tuples.
pub fn basis_inputs(l: &LAlgebra, s: PaintedSet) -> Vec<BTreeMap<Label, Vec<Q>>> {
    let labels: Vec<Label> = s.labels().skip(1).collect();
    let mut out = vec![BTreeMap::new()];
    for label in labels {
        let n = if label.is_white() { l.dim_f } else { l.dim_t };
        let mut next = Vec::with_capacity(out.len() * n);
        for m in &out {
            for a in 0..n {
                let mut v = vec![Q::zero(); n];
                v[a] = Q::one();
                let mut m2 = m.clone();
                m2.insert(label, v);
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRelationViolation {
    pub degree: usize,
    pub relation: usize,
    pub input: Vec<usize>,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRelationsReport {
    pub relations_checked: usize,
    pub violations: Vec<LinearRelationViolation>,
}

impl LinearRelationsReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every standard relation among trees with at most
/// `max_edges + 1` edges (relations generated at trees with at most
/// `max_edges` edges) is killed by the correlators, on all basis inputs.
pub fn verify_linear_relations(l: &LAlgebra, s: PaintedSet, max_edges: usize) -> Result<LinearRelationsReport> {
    verify_linear_relations_with(l, s, max_edges, Execution::default())
}

pub fn verify_linear_relations_with(l: &LAlgebra, s: PaintedSet, max_edges: usize, exec: Execution) -> Result<LinearRelationsReport> {
    let basis = basis_for(s)?;
    let inputs = basis_inputs(l, s);
    let mut report = LinearRelationsReport { relations_checked: 0, violations: Vec::new() };
    for d in 1..=(max_edges + 1).min(basis.top_degree()) {
        let rels = basis.relations(d);
        let trees: Vec<GoodFamily> = rels.iter().flat_map(|r| r.terms().keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        let evals = par::map(exec, &trees, |g| inputs.iter().map(|inp| evaluate_tree_correlator(l, g, inp)).collect::<Result<Vec<_>>>());
        let mut table: BTreeMap<&GoodFamily, Vec<Vec<Q>>> = BTreeMap::new();
        for (g, e) in trees.iter().zip(evals) {
            table.insert(g, e?);
        }
        for (ri, rel) in rels.iter().enumerate() {
            report.relations_checked += 1;
            for (ii, _) in inputs.iter().enumerate() {
                let mut acc = vec![Q::zero(); l.dim_f];
                for (g, c) in rel.terms() {
                    for (a, x) in acc.iter_mut().zip(&table[g][ii]) {
                        *a += c * x;
                    }
                }
                if acc.iter().any(|x| !x.is_zero()) {
                    report.violations.push(LinearRelationViolation {
                        degree: d,
                        relation: ri,
                        input: input_indices(l, s, &inputs[ii]),
                        value: acc.iter().map(crate::rational::fmt_q).collect(),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn input_indices(l: &LAlgebra, s: PaintedSet, inp: &BTreeMap<Label, Vec<Q>>) -> Vec<usize> {
    let _ = l;
    s.labels().skip(1).map(|lab| inp[&lab].iter().position(|x| !x.is_zero()).unwrap_or(0)).collect()
}

/// Tensor product on `(T1⊗T2, F1⊗F2)`: the correlator of a multiset of index
/// pairs is the Kronecker product of the correlators of its two projections.
/// Index `(a, b)` becomes `a·dim2 + b` within each color.
pub fn tensor(l1: &LAlgebra, l2: &LAlgebra) -> Result<LAlgebra> {
    if l1.order != l2.order {
        return Err(Error::Precondition(format!("orders differ: {} and {}", l1.order, l2.order)));
    }
    let (t1, t2, f1, f2) = (l1.dim_t, l2.dim_t, l1.dim_f, l2.dim_f);
    let mut out = LAlgebra::new(t1 * t2, f1 * f2, l1.order);
    let n = out.num_indices();
    // Component indices of every product index.
    let parts: Vec<(usize, usize)> = (0..n)
        .map(|p| if p < t1 * t2 { (p / t2, p % t2) } else { let r = p - t1 * t2; (t1 + r / f2, t2 + r % f2) })
        .collect();
    for e in monomials(n, 1, l1.order as u32) {
        let mut e1 = vec![0u32; l1.num_indices()];
        let mut e2 = vec![0u32; l2.num_indices()];
        for (p, &k) in e.iter().enumerate() {
            e1[parts[p].0] += k;
            e2[parts[p].1] += k;
        }
        if let (Some(a), Some(b)) = (l1.get_ref(&e1), l2.get_ref(&e2)) {
            out.set(e, a.kron(b))?;
        }
    }
    Ok(out)
}

/// A scalar product on `F` and its Casimir element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicData {
    dim_t: usize,
    metric: Mat,
    casimir: Mat,
}

impl CyclicData {
    pub fn new(dim_t: usize, metric: Mat) -> Result<Self> {
        if !metric.is_square() || metric.transpose() != metric {
            return Err(Error::Precondition("scalar product must be a symmetric square matrix".into()));
        }
        let casimir = metric.inverse().ok_or_else(|| Error::Precondition("scalar product is degenerate".into()))?;
        Ok(CyclicData { dim_t, metric, casimir })
    }

    pub fn dim_t(&self) -> usize {
        self.dim_t
    }

    pub fn dim_f(&self) -> usize {
        self.metric.rows()
    }

    pub fn metric(&self) -> &Mat {
        &self.metric
    }

    pub fn casimir(&self) -> &Mat {
        &self.casimir
    }
}

/// Values of a cyclic morphism: for each painted set and each tuple of basis
/// indices (one per label, `F` indices at whites and `T` indices at blacks),
/// a cohomology class. Missing tuples are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CyclicMaps {
    pub maps: BTreeMap<PaintedSet, BTreeMap<Vec<usize>, GradedClass>>,
}

impl CyclicMaps {
    fn value(&self, s: PaintedSet, a: &[usize]) -> Option<&GradedClass> {
        self.maps.get(&s).and_then(|m| m.get(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicReport {
    pub squares_checked: usize,
    pub symmetries_checked: usize,
    pub failures: Vec<String>,
}

impl CyclicReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Index tuples for `s`: `dim_f` choices at whites, `dim_t` at blacks.
pub fn index_tuples(s: PaintedSet, dim_t: usize, dim_f: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for p in 0..s.len() {
        let n = if s.is_white_pos(p) { dim_f } else { dim_t };
        out = out.iter().flat_map(|t| (0..n).map(move |a| { let mut t2 = t.clone(); t2.push(a); t2 })).collect();
    }
    out
}

/// Painted sets a cyclic morphism must be given on, up to size `cap`.
pub fn cyclic_domains(dim_t: usize, cap: usize) -> Vec<PaintedSet> {
    let mut out = Vec::new();
    for n in 3..=cap {
        for w in 2..=n {
            let b = n - w;
            if b > 0 && dim_t == 0 {
                continue;
            }
            out.push(PaintedSet::new(w as u32, b as u32).expect("small painted set"));
        }
    }
    out
}

/// Checks compatibility of a cyclic morphism with gluing along every stable
/// 2-partition, and equivariance under transpositions of same-colored labels,
/// for all painted sets of size at most `cap`.
pub fn verify_cyclic(c: &CyclicData, maps: &CyclicMaps, cap: usize) -> Result<CyclicReport> {
    let (dim_t, dim_f) = (c.dim_t, c.dim_f());
    let mut report = CyclicReport { squares_checked: 0, symmetries_checked: 0, failures: Vec::new() };
    let domains = cyclic_domains(dim_t, cap);
    for &s in &domains {
        if !maps.maps.contains_key(&s) {
            return Err(Error::MissingCyclicMap { whites: s.whites(), blacks: s.blacks() });
        }
    }
    for &s in &domains {
        let tuples = index_tuples(s, dim_t, dim_f);
        let zero = GradedClass::zero(s, 0);
        for sigma in enumerate_stable_partitions(s) {
            let split = EdgeSplit::new(sigma)?;
            let tree = GoodFamily::new(s, [sigma])?;
            let (left, right) = (split.left(), split.right());
            for a in &tuples {
                report.squares_checked += 1;
                let x = maps.value(s, a).unwrap_or(&zero);
                let lhs = fstar_edge_class(&split, x)?;
                let mut rhs = VertexTensorClass::zero(&tree)?;
                for e in 0..dim_f {
                    for f in 0..dim_f {
                        let w = c.casimir.get(e, f);
                        if w.is_zero() {
                            continue;
                        }
                        let la = side_tuple(&split, Side::Left, a, e);
                        let ra = side_tuple(&split, Side::Right, a, f);
                        let (Some(x1), Some(x2)) = (maps.value(left, &la), maps.value(right, &ra)) else { continue };
                        for (g1, c1) in x1.terms() {
                            for (g2, c2) in x2.terms() {
                                rhs.add_term(vec![g1.clone(), g2.clone()], w * c1 * c2)?;
                            }
                        }
                    }
                }
                if !lhs.equals(&rhs)? {
                    report.failures.push(format!("gluing square fails for {s}, partition {sigma}, indices {a:?}"));
                }
            }
        }
        let basis = basis_for(s)?;
        for p in 0..s.len().saturating_sub(1) {
            if s.is_white_pos(p) != s.is_white_pos(p + 1) {
                continue;
            }
            let mut map: Vec<usize> = (0..s.len()).collect();
            map.swap(p, p + 1);
            for a in &tuples {
                report.symmetries_checked += 1;
                let mut b = a.clone();
                b.swap(p, p + 1);
                let x = maps.value(s, a).unwrap_or(&zero);
                let y = maps.value(s, &b).unwrap_or(&zero);
                let moved = x.relabel(&map);
                let same = if moved.grade() == y.grade() {
                    basis.equal_classes(&moved, y)?
                } else {
                    basis.is_zero_class(&moved)? && basis.is_zero_class(y)?
                };
                if !same {
                    report.failures.push(format!("not equivariant under swapping positions {p},{} on {s}, indices {a:?}", p + 1));
                }
            }
        }
    }
    Ok(report)
}

/// Indices of one side of a split, with `glued` at the new white.
fn side_tuple(split: &EdgeSplit, side: Side, a: &[usize], glued: usize) -> Vec<usize> {
    (0..split.side_set(side).len()).map(|q| split.to_ground(side, q).map_or(glued, |p| a[p])).collect()
}

/// The cyclic maps `I_S(a) = g_{a1 a2} κ^{|S|-2} · 1` for a one-dimensional
/// `F` with scalar product `g` and all-white painted sets.
pub fn scaled_fundamental_maps(g: &Q, kappa: &Q, cap: usize) -> CyclicMaps {
    let mut maps = CyclicMaps::default();
    for s in cyclic_domains(0, cap) {
        let mut m = BTreeMap::new();
        let mut coeff = g.clone();
        for _ in 2..s.len() {
            coeff *= kappa;
        }
        m.insert(vec![0; s.len()], GradedClass::unit(s).scale(&coeff));
        maps.maps.insert(s, m);
    }
    maps
}

fn small_int(rng: &mut ChaCha8Rng, range: i64) -> Q {
    q(rng.gen_range(-range..=range))
}

/// A unimodular integer matrix and its inverse, as a product of random unit
/// lower- and upper-triangular factors.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Mat, Mat) {
    let mut lo = Mat::identity(n);
    let mut up = Mat::identity(n);
    for r in 0..n {
        for c in 0..r {
            lo.set(r, c, small_int(rng, 2));
            up.set(c, r, small_int(rng, 2));
        }
    }
    let p = lo.mul(&up);
    let inv = p.inverse().expect("unimodular");
    (p, inv)
}

/// A random valid L-algebra whose correlators are simultaneously
/// diagonalizable: `⟨M⟩ = P·diag(d_M)·P⁻¹` with a random unimodular `P`.
pub fn random_commuting(seed: u64, dim_t: usize, dim_f: usize, order: usize) -> LAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, pinv) = random_unimodular(&mut rng, dim_f);
    let mut l = LAlgebra::new(dim_t, dim_f, order);
    for e in monomials(dim_t + dim_f, 1, order as u32) {
        if rng.gen_bool(0.4) {
            continue;
        }
        let d: Vec<Q> = (0..dim_f).map(|_| small_int(&mut rng, 3)).collect();
        l.set(e, p.mul(&Mat::diagonal(&d)).mul(&pinv)).expect("well-formed correlator");
    }
    l
}

/// A random family with the same support pattern but independent random
/// matrices; almost always invalid once `dim_f ≥ 2`.
pub fn random_generic(seed: u64, dim_t: usize, dim_f: usize, order: usize) -> LAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut l = LAlgebra::new(dim_t, dim_f, order);
    for e in monomials(dim_t + dim_f, 1, order as u32) {
        let rows = (0..dim_f).map(|_| (0..dim_f).map(|_| small_int(&mut rng, 2)).collect()).collect();
        l.set(e, Mat::from_rows(rows).expect("square")).expect("well-formed correlator");
    }
    l
}
