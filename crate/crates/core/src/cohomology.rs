//! The ring `H*_S`: generators `l_σ`, relation generators, good monomials,
//! the multiplication table, standard relations and normal forms.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, Mat, SparseVec};
use crate::par::{self, Execution};
use crate::rational::{fmt_q, parse_q, Q};
use crate::trees::{
    enumerate_stable_partitions, enumerate_trees, epsilon_by, quadruple_allowed, EdgeQuad, Flag,
    GoodFamily, Label, PaintedSet, PartitionJson, TreeStructure, TwoPartition,
};

/// A linear combination of generators `l_σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    ground: PaintedSet,
    terms: BTreeMap<TwoPartition, Q>,
}

impl LinearForm {
    pub fn zero(ground: PaintedSet) -> Self {
        LinearForm { ground, terms: BTreeMap::new() }
    }

    pub fn ground(&self) -> PaintedSet {
        self.ground
    }

    pub fn terms(&self) -> &BTreeMap<TwoPartition, Q> {
        &self.terms
    }

    pub fn coeff(&self, sigma: &TwoPartition) -> Q {
        self.terms.get(sigma).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, sigma: TwoPartition, c: Q) {
        add_into(&mut self.terms, sigma, c);
    }
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, c: Q) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// The relation generator `R_ijkl = Σ_σ ε(σ; i,j,k,l) l_σ`.
pub fn r_ijkl(s: PaintedSet, i: Label, j: Label, k: Label, l: Label) -> Result<LinearForm> {
    let (pi, pj, pk, pl) = (s.position_checked(i)?, s.position_checked(j)?, s.position_checked(k)?, s.position_checked(l)?);
    let distinct = pi != pj && pi != pk && pi != pl && pj != pk && pj != pl && pk != pl;
    if !distinct || !quadruple_allowed(i.is_white(), j.is_white(), k.is_white(), l.is_white()) {
        return Err(Error::QuadrupleNotAllowed(format!("({i},{j},{k},{l})")));
    }
    let mut out = LinearForm::zero(s);
    for sigma in enumerate_stable_partitions(s) {
        let e = epsilon_by(|a, b| sigma.same_side(a, b), pi, pj, pk, pl);
        if e != 0 {
            out.add_term(sigma, Q::from_integer(e.into()));
        }
    }
    Ok(out)
}

/// All unordered pairs of stable partitions at distance two, whose products
/// are the quadratic relation generators.
pub fn quadratic_pairs(s: PaintedSet) -> Vec<(TwoPartition, TwoPartition)> {
    let parts = enumerate_stable_partitions(s);
    let mut out = Vec::new();
    for (a, x) in parts.iter().enumerate() {
        for y in &parts[a + 1..] {
            if x.delta_unchecked(y) == 2 {
                out.push((*x, *y));
            }
        }
    }
    out
}

/// A homogeneous element: a sparse combination of trees with `grade` edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedClass {
    ground: PaintedSet,
    grade: usize,
    terms: BTreeMap<GoodFamily, Q>,
}

impl GradedClass {
    pub fn zero(ground: PaintedSet, grade: usize) -> Self {
        GradedClass { ground, grade, terms: BTreeMap::new() }
    }

    /// The class of the one-vertex tree.
    pub fn unit(ground: PaintedSet) -> Self {
        GradedClass::monomial(GoodFamily::empty(ground))
    }

    /// The good monomial `m(τ)`.
    pub fn monomial(g: GoodFamily) -> Self {
        let mut terms = BTreeMap::new();
        let (ground, grade) = (g.ground(), g.edges());
        terms.insert(g, Q::one());
        GradedClass { ground, grade, terms }
    }

    pub fn from_terms(ground: PaintedSet, grade: usize, terms: impl IntoIterator<Item = (GoodFamily, Q)>) -> Result<Self> {
        let mut out = GradedClass::zero(ground, grade);
        for (g, c) in terms {
            out.add_term(g, c)?;
        }
        Ok(out)
    }

    pub fn ground(&self) -> PaintedSet {
        self.ground
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> &BTreeMap<GoodFamily, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &GoodFamily) -> Q {
        self.terms.get(g).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, g: GoodFamily, c: Q) -> Result<()> {
        if g.ground() != self.ground {
            return Err(Error::GroundMismatch);
        }
        if g.edges() != self.grade {
            return Err(Error::Dimension(format!("tree with {} edges in a class of grade {}", g.edges(), self.grade)));
        }
        add_into(&mut self.terms, g, c);
        Ok(())
    }

    pub(crate) fn add_term_unchecked(&mut self, g: GoodFamily, c: Q) {
        add_into(&mut self.terms, g, c);
    }

    pub fn add_scaled(&mut self, other: &GradedClass, c: &Q) -> Result<()> {
        if other.ground != self.ground || other.grade != self.grade {
            return Err(Error::GroundMismatch);
        }
        for (g, x) in &other.terms {
            add_into(&mut self.terms, g.clone(), x * c);
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedClass) -> Result<GradedClass> {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &GradedClass) -> Result<GradedClass> {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> GradedClass {
        let mut out = GradedClass::zero(self.ground, self.grade);
        for (g, x) in &self.terms {
            add_into(&mut out.terms, g.clone(), x * c);
        }
        out
    }

    /// Relabels every tree along a bijection of positions.
    pub fn relabel(&self, map: &[usize]) -> GradedClass {
        let mut out = GradedClass::zero(self.ground, self.grade);
        for (g, x) in &self.terms {
            add_into(&mut out.terms, g.relabel(self.ground, map), x.clone());
        }
        out
    }

    pub fn to_json(&self) -> ClassJson {
        ClassJson {
            grade: self.grade,
            terms: self.terms.iter().map(|(g, c)| TermJson { tree: g.to_json(), coeff: fmt_q(c) }).collect(),
        }
    }

    pub fn from_json(ground: PaintedSet, j: &ClassJson) -> Result<Self> {
        let mut out = GradedClass::zero(ground, j.grade);
        for t in &j.terms {
            out.add_term(GoodFamily::from_json(ground, &t.tree)?, parse_q(&t.coeff)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let items: Vec<String> = self.terms.iter().map(|(g, c)| format!("{}·{}", fmt_q(c), g)).collect();
        write!(f, "{}", items.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub tree: Vec<PartitionJson>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub grade: usize,
    pub terms: Vec<TermJson>,
}

fn check_quad_at_vertex(t: &TreeStructure, v: usize, quad: [usize; 4]) -> Result<()> {
    let flags = &t.vertex(v).flags;
    let n = flags.len();
    let [i, j, k, l] = quad;
    let distinct = i != j && i != k && i != l && j != k && j != l && k != l;
    if !distinct || quad.iter().any(|&x| x >= n) {
        return Err(Error::QuadrupleNotAllowed(format!("{quad:?} are not four distinct flags at vertex {v}")));
    }
    let w = |x: usize| flags[x].flag.is_white();
    if !quadruple_allowed(w(i), w(j), w(k), w(l)) {
        return Err(Error::QuadrupleNotAllowed(format!("{quad:?} at vertex {v}")));
    }
    Ok(())
}

/// The standard relation `Σ_α ε(α; I,J,K,L) μ(τ(α))` at vertex `v`, with the
/// quadruple given as flag positions at `v`.
pub fn standard_relation(t: &TreeStructure, v: usize, quad: [usize; 4]) -> Result<GradedClass> {
    check_quad_at_vertex(t, v, quad)?;
    let g = t.family();
    let mut out = GradedClass::zero(g.ground(), g.edges() + 1);
    for vp in t.vertex_partitions(v) {
        let e = epsilon_by(|a, b| (vp.alpha >> a & 1) == (vp.alpha >> b & 1), quad[0], quad[1], quad[2], quad[3]);
        if e != 0 {
            out.add_term_unchecked(g.with_unchecked(vp.sigma.part_min()), Q::from_integer(e.into()));
        }
    }
    Ok(out)
}

/// Signed relation rows of one tree, as `(tree index, ±1)` lists with a
/// positive leading entry. The swaps `I ↔ K` and `J ↔ L` only flip the sign,
/// so only `I < K` and `J < L` are visited.
fn tree_relations(g: &GoodFamily, index: &HashMap<GoodFamily, usize>) -> Vec<Vec<(usize, i8)>> {
    let t = TreeStructure::expand(g).expect("enumerated trees are good");
    let mut out = Vec::new();
    for v in 0..t.vertices().len() {
        let vps = t.vertex_partitions(v);
        if vps.is_empty() {
            continue;
        }
        let columns: Vec<usize> = vps.iter().map(|vp| index[&g.with_unchecked(vp.sigma.part_min())]).collect();
        for [i, j, k, l] in t.allowed_vertex_quadruples(v) {
            if i > k || j > l {
                continue;
            }
            let mut row: Vec<(usize, i8)> = Vec::new();
            for (vp, &col) in vps.iter().zip(&columns) {
                let e = epsilon_by(|a, b| (vp.alpha >> a & 1) == (vp.alpha >> b & 1), i, j, k, l);
                if e != 0 {
                    row.push((col, e));
                }
            }
            if row.is_empty() {
                continue;
            }
            row.sort_unstable();
            if row[0].1 < 0 {
                for x in row.iter_mut() {
                    x.1 = -x.1;
                }
            }
            out.push(row);
        }
    }
    out
}

/// Relations and reduction data of one degree.
#[derive(Clone, Debug)]
pub struct DegreeData {
    trees: Vec<GoodFamily>,
    index: HashMap<GoodFamily, usize>,
    relations: Vec<Vec<(usize, i8)>>,
    echelon: Echelon,
    basis: Vec<usize>,
}

impl DegreeData {
    pub fn trees(&self) -> &[GoodFamily] {
        &self.trees
    }

    pub fn basis_trees(&self) -> Vec<GoodFamily> {
        self.basis.iter().map(|&i| self.trees[i].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Graded bases of `H*_S` with the row-reduced relation matrices.
///
/// Basis trees are the non-pivot columns of the relation matrix under the
/// canonical tree order; since the pivot set depends only on the row space,
/// normal forms are unique.
#[derive(Debug)]
pub struct GradedBasis {
    ground: PaintedSet,
    degrees: Vec<DegreeData>,
    pub(crate) top_check: OnceLock<std::result::Result<(), Error>>,
    pub(crate) pairings: OnceLock<std::result::Result<Vec<Mat>, Error>>,
}

/// Deduplicated standard relations landing in degree `d`.
fn relations_in_degree(
    s: PaintedSet,
    lower: &[GoodFamily],
    index: &HashMap<GoodFamily, usize>,
    exec: Execution,
) -> Vec<Vec<(usize, i8)>> {
    let per_tree = par::map(exec, lower, |g| tree_relations(g, index));
    let _ = s;
    let mut seen: HashSet<Vec<(usize, i8)>> = HashSet::new();
    let mut out = Vec::new();
    for rows in per_tree {
        for r in rows {
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
    }
    out
}

impl GradedBasis {
    pub fn ground(&self) -> PaintedSet {
        self.ground
    }

    pub fn top_degree(&self) -> usize {
        self.ground.top_degree()
    }

    /// Graded dimensions from degree 0 to the top degree.
    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(DegreeData::dim).collect()
    }

    pub fn degree(&self, d: usize) -> Option<&DegreeData> {
        self.degrees.get(d)
    }

    pub fn dim(&self, d: usize) -> usize {
        self.degrees.get(d).map_or(0, DegreeData::dim)
    }

    pub fn basis_trees(&self, d: usize) -> Vec<GoodFamily> {
        self.degrees.get(d).map_or_else(Vec::new, DegreeData::basis_trees)
    }

    /// Standard relations of degree `d` as classes.
    pub fn relations(&self, d: usize) -> Vec<GradedClass> {
        let Some(dd) = self.degrees.get(d) else { return Vec::new() };
        dd.relations
            .iter()
            .map(|row| {
                let mut c = GradedClass::zero(self.ground, d);
                for &(col, e) in row {
                    c.add_term_unchecked(dd.trees[col].clone(), Q::from_integer(e.into()));
                }
                c
            })
            .collect()
    }

    fn to_sparse(&self, x: &GradedClass) -> Result<SparseVec> {
        let dd = &self.degrees[x.grade];
        let mut v = SparseVec::new();
        for (g, c) in &x.terms {
            let col = *dd.index.get(g).ok_or_else(|| Error::NotGood(format!("{g} is not a tree of {}", self.ground)))?;
            v.insert(col, c.clone());
        }
        Ok(v)
    }

    /// The unique representative supported on basis trees.
    pub fn normal_form(&self, x: &GradedClass) -> Result<GradedClass> {
        if x.ground != self.ground {
            return Err(Error::GroundMismatch);
        }
        if x.grade > self.top_degree() {
            return Ok(GradedClass::zero(self.ground, x.grade));
        }
        let mut v = self.to_sparse(x)?;
        let dd = &self.degrees[x.grade];
        dd.echelon.reduce(&mut v);
        let mut out = GradedClass::zero(self.ground, x.grade);
        for (col, c) in v {
            out.add_term_unchecked(dd.trees[col].clone(), c);
        }
        Ok(out)
    }

    /// Coordinates of the normal form in the basis of its degree.
    pub fn coords(&self, x: &GradedClass) -> Result<Vec<Q>> {
        let nf = self.normal_form(x)?;
        let Some(dd) = self.degrees.get(x.grade) else { return Ok(Vec::new()) };
        Ok(dd.basis.iter().map(|&i| nf.coeff(&dd.trees[i])).collect())
    }

    /// The class with the given coordinates in degree `d`.
    pub fn from_coords(&self, d: usize, coords: &[Q]) -> GradedClass {
        let mut out = GradedClass::zero(self.ground, d);
        if let Some(dd) = self.degrees.get(d) {
            for (&i, c) in dd.basis.iter().zip(coords) {
                out.add_term_unchecked(dd.trees[i].clone(), c.clone());
            }
        }
        out
    }

    pub fn is_zero_class(&self, x: &GradedClass) -> Result<bool> {
        Ok(self.normal_form(x)?.is_zero())
    }

    pub fn equal_classes(&self, x: &GradedClass, y: &GradedClass) -> Result<bool> {
        Ok(self.normal_form(&x.sub(y)?)?.is_zero())
    }
}

/// Builds the graded basis with the default execution strategy.
pub fn build_basis(s: PaintedSet) -> Result<GradedBasis> {
    build_basis_with(s, Execution::default())
}

/// Builds the graded basis; relation assembly runs under `exec`, reduction is
/// sequential so the result does not depend on the strategy.
pub fn build_basis_with(s: PaintedSet, exec: Execution) -> Result<GradedBasis> {
    s.check_ring_ready()?;
    let top = s.top_degree();
    let by_degree: Vec<Vec<GoodFamily>> = (0..=top).map(|d| enumerate_trees(s, Some(d))).collect();
    let mut degrees = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let trees = by_degree[d].clone();
        let index: HashMap<GoodFamily, usize> = trees.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let relations = if d == 0 { Vec::new() } else { relations_in_degree(s, &by_degree[d - 1], &index, exec) };
        let mut echelon = Echelon::new(trees.len());
        for row in &relations {
            let v: SparseVec = row.iter().map(|&(c, e)| (c, Q::from_integer(e.into()))).collect();
            echelon.insert(v);
        }
        let basis: Vec<usize> = (0..trees.len()).filter(|&c| !echelon.is_pivot(c)).collect();
        degrees.push(DegreeData { trees, index, relations, echelon, basis });
    }
    Ok(GradedBasis { ground: s, degrees, top_check: OnceLock::new(), pairings: OnceLock::new() })
}

static CACHE: OnceLock<RwLock<HashMap<PaintedSet, Arc<GradedBasis>>>> = OnceLock::new();

/// Shared, lazily built basis for `s`.
pub fn basis_for(s: PaintedSet) -> Result<Arc<GradedBasis>> {
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().expect("basis cache poisoned").get(&s) {
        return Ok(b.clone());
    }
    let built = Arc::new(build_basis(s)?);
    let mut w = cache.write().expect("basis cache poisoned");
    Ok(w.entry(s).or_insert(built).clone())
}

fn check_edge_quad(t: &TreeStructure, sigma: &TwoPartition, q: &EdgeQuad) -> Result<(usize, usize)> {
    let e = *t.edge(sigma).ok_or(Error::NotAnEdge)?;
    let halves = [Flag::Half { edge: *sigma, near_min: true }, Flag::Half { edge: *sigma, near_min: false }];
    let bad = || Error::QuadrupleNotAllowed(format!("{q:?} for edge {sigma}"));
    let vi = t.vertex_of(&q.i).ok_or_else(bad)?;
    let (v1, v2) = if vi == e.a { (e.a, e.b) } else if vi == e.b { (e.b, e.a) } else { return Err(bad()) };
    let ok = t.vertex_of(&q.j) == Some(v1)
        && t.vertex_of(&q.k) == Some(v2)
        && t.vertex_of(&q.l) == Some(v2)
        && q.i != q.j
        && q.k != q.l
        && [q.i, q.j, q.k, q.l].iter().all(|f| !halves.contains(f))
        && quadruple_allowed(q.i.is_white(), q.j.is_white(), q.k.is_white(), q.l.is_white());
    if !ok {
        return Err(bad());
    }
    Ok((v1, v2))
}

/// The lexicographically least allowed quadruple at an edge.
pub fn default_edge_quad(t: &TreeStructure, sigma: &TwoPartition) -> Result<EdgeQuad> {
    t.allowed_edge_quadruples(sigma)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::QuadrupleNotAllowed(format!("no allowed quadruple at edge {sigma}")))
}

/// `l_σ · m(τ)` as a combination of good monomials (not reduced).
///
/// When `σ` is an edge the product is expanded with the quadruple `quad`
/// (the least allowed one if omitted): minus the sum over valid `α` at the
/// vertex of `I, J` separating `I, J` from the edge, minus the analogous sum
/// at the other end separating the edge from `K, L`.
pub fn multiply_generator(sigma: &TwoPartition, g: &GoodFamily, quad: Option<&EdgeQuad>) -> Result<GradedClass> {
    if sigma.ground() != g.ground() {
        return Err(Error::GroundMismatch);
    }
    sigma.require_stable()?;
    let s = g.ground();
    let grade = g.edges() + 1;
    if g.contains(sigma) {
        let t = TreeStructure::expand(g)?;
        let q = match quad {
            Some(q) => *q,
            None => default_edge_quad(&t, sigma)?,
        };
        return Ok(edge_expansion(&t, sigma, &q)?);
    }
    if quad.is_some() {
        return Err(Error::Precondition("a quadruple is only used when σ is an edge".into()));
    }
    if g.partitions().all(|p| p.delta_unchecked(sigma) == 1) {
        return Ok(GradedClass::monomial(g.with_unchecked(sigma.part_min())));
    }
    Ok(GradedClass::zero(s, grade))
}

fn edge_expansion(t: &TreeStructure, sigma: &TwoPartition, q: &EdgeQuad) -> Result<GradedClass> {
    let (v1, v2) = check_edge_quad(t, sigma, q)?;
    let e = *t.edge(sigma).ok_or(Error::NotAnEdge)?;
    let g = t.family();
    let mut out = GradedClass::zero(g.ground(), g.edges() + 1);
    let minus = -Q::one();
    for (v, a, b) in [(v1, q.i, q.j), (v2, q.k, q.l)] {
        let half = Flag::Half { edge: *sigma, near_min: v == e.a };
        let vert = t.vertex(v);
        let pa = vert.position_of(&a).expect("checked");
        let pb = vert.position_of(&b).expect("checked");
        let ph = vert.position_of(&half).expect("edge half present");
        for vp in t.vertex_partitions(v) {
            let side = |p: usize| vp.alpha >> p & 1;
            if side(pa) == side(pb) && side(pa) != side(ph) {
                out.add_term_unchecked(g.with_unchecked(vp.sigma.part_min()), minus.clone());
            }
        }
    }
    Ok(out)
}

/// Reduced product `l_σ · x`.
pub fn apply_generator(basis: &GradedBasis, sigma: &TwoPartition, x: &GradedClass) -> Result<GradedClass> {
    let mut acc = GradedClass::zero(basis.ground(), x.grade() + 1);
    if x.grade() + 1 > basis.top_degree() {
        return Ok(acc);
    }
    for (g, c) in x.terms() {
        let p = multiply_generator(sigma, g, None)?;
        acc.add_scaled(&p, c)?;
    }
    basis.normal_form(&acc)
}

/// Reduced product `x · m(τ)`, multiplying by one edge generator at a time.
pub fn multiply_by_monomial(basis: &GradedBasis, x: &GradedClass, g: &GoodFamily) -> Result<GradedClass> {
    let mut cur = basis.normal_form(x)?;
    for rho in g.partitions() {
        cur = apply_generator(basis, &rho, &cur)?;
    }
    Ok(cur)
}

/// Reduced product of two classes.
pub fn multiply(x: &GradedClass, y: &GradedClass, basis: &GradedBasis) -> Result<GradedClass> {
    if x.ground() != basis.ground() || y.ground() != basis.ground() {
        return Err(Error::GroundMismatch);
    }
    let grade = x.grade() + y.grade();
    let mut out = GradedClass::zero(basis.ground(), grade);
    if grade > basis.top_degree() {
        return Ok(out);
    }
    for (g, c) in y.terms() {
        out.add_scaled(&multiply_by_monomial(basis, x, g)?, c)?;
    }
    basis.normal_form(&out)
}

/// Reduced product of a linear form with a class.
pub fn multiply_linear(basis: &GradedBasis, f: &LinearForm, x: &GradedClass) -> Result<GradedClass> {
    let mut out = GradedClass::zero(basis.ground(), x.grade() + 1);
    for (sigma, c) in f.terms() {
        out.add_scaled(&apply_generator(basis, sigma, x)?, c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn s(w: u32, b: u32) -> PaintedSet {
        PaintedSet::new(w, b).unwrap()
    }

    fn p(ground: PaintedSet, labels: &[&str]) -> TwoPartition {
        let ls: Vec<Label> = labels.iter().map(|x| x.parse().unwrap()).collect();
        TwoPartition::from_labels(ground, &ls).unwrap()
    }

    fn lab(x: &str) -> Label {
        x.parse().unwrap()
    }

    #[test]
    fn relation_generator_examples() {
        let s4 = s(4, 0);
        let r = r_ijkl(s4, lab("w1"), lab("w2"), lab("w3"), lab("w4")).unwrap();
        assert_eq!(r.terms().len(), 2);
        assert_eq!(r.coeff(&p(s4, &["w1", "w2"])), q(1));
        assert_eq!(r.coeff(&p(s4, &["w2", "w3"])), q(-1));

        let s23 = s(2, 3);
        let r = r_ijkl(s23, lab("b1"), lab("w1"), lab("b2"), lab("w2")).unwrap();
        assert_eq!(r.terms().len(), 4);
        assert_eq!(r.coeff(&p(s23, &["w1", "b1"])), q(1));
        assert_eq!(r.coeff(&p(s23, &["w1", "b1", "b3"])), q(1));
        assert_eq!(r.coeff(&p(s23, &["w1", "b2"])), q(-1));
        assert_eq!(r.coeff(&p(s23, &["w1", "b2", "b3"])), q(-1));
        assert!(r_ijkl(s23, lab("w1"), lab("w2"), lab("b1"), lab("b2")).is_err());
    }

    #[test]
    fn quadratic_pair_counts() {
        assert_eq!(quadratic_pairs(s(4, 0)).len(), 3);
        assert_eq!(quadratic_pairs(s(2, 2)).len(), 1);
    }

    #[test]
    fn standard_relation_example() {
        let s5 = s(5, 0);
        let t = TreeStructure::expand(&GoodFamily::empty(s5)).unwrap();
        let r = standard_relation(&t, 0, [0, 1, 2, 3]).unwrap();
        let one = |labels: &[&str]| GoodFamily::new(s5, [p(s5, labels)]).unwrap();
        assert_eq!(r.terms().len(), 4);
        assert_eq!(r.coeff(&one(&["w1", "w2"])), q(1));
        assert_eq!(r.coeff(&one(&["w3", "w4"])), q(1));
        assert_eq!(r.coeff(&one(&["w2", "w3"])), q(-1));
        assert_eq!(r.coeff(&one(&["w1", "w4"])), q(-1));
    }

    #[test]
    fn dimension_tables() {
        assert_eq!(build_basis(s(3, 0)).unwrap().dims(), vec![1]);
        assert_eq!(build_basis(s(4, 0)).unwrap().dims(), vec![1, 1]);
        assert_eq!(build_basis(s(5, 0)).unwrap().dims(), vec![1, 5, 1]);
        assert_eq!(build_basis(s(2, 2)).unwrap().dims(), vec![1, 1]);
        assert_eq!(build_basis(s(2, 3)).unwrap().dims(), vec![1, 4, 1]);
        assert!(build_basis(s(1, 3)).is_err());
    }

    #[test]
    fn edge_product_example() {
        let s5 = s(5, 0);
        let a = p(s5, &["w1", "w2"]);
        let g = GoodFamily::new(s5, [a]).unwrap();
        let t = TreeStructure::expand(&g).unwrap();
        let quad = EdgeQuad {
            i: Flag::Tail(lab("w1")),
            j: Flag::Tail(lab("w2")),
            k: Flag::Tail(lab("w3")),
            l: Flag::Tail(lab("w4")),
        };
        assert_eq!(default_edge_quad(&t, &a).unwrap(), quad);
        let x = multiply_generator(&a, &g, Some(&quad)).unwrap();
        let chain = GoodFamily::new(s5, [a, p(s5, &["w3", "w4"])]).unwrap();
        assert_eq!(x, GradedClass::monomial(chain).scale(&q(-1)));
        let quad2 = EdgeQuad { l: Flag::Tail(lab("w5")), ..quad };
        let y = multiply_generator(&a, &g, Some(&quad2)).unwrap();
        let other = GoodFamily::new(s5, [a, p(s5, &["w3", "w5"])]).unwrap();
        assert_eq!(y, GradedClass::monomial(other).scale(&q(-1)));
        let b = build_basis(s5).unwrap();
        assert!(b.equal_classes(&x, &y).unwrap());
    }

    #[test]
    fn small_products() {
        let s4 = s(4, 0);
        let b = build_basis(s4).unwrap();
        let l = |labels: &[&str]| GradedClass::monomial(GoodFamily::new(s4, [p(s4, labels)]).unwrap());
        let x = l(&["w1", "w2"]);
        assert!(multiply(&x, &l(&["w1", "w3"]), &b).unwrap().is_zero());
        assert!(multiply(&x, &x, &b).unwrap().is_zero());
        let one = GradedClass::unit(s4);
        assert_eq!(multiply(&one, &x, &b).unwrap(), b.normal_form(&x).unwrap());
    }

    #[test]
    fn standard_relations_reduce_to_zero() {
        let b = build_basis(s(2, 3)).unwrap();
        for d in 0..=b.top_degree() {
            for r in b.relations(d) {
                assert!(b.normal_form(&r).unwrap().is_zero());
            }
        }
    }
}
