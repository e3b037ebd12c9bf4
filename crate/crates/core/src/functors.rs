//! `H*` and `H_*` as functors on trees and contractions: vertex tensor
//! classes, the pullback `f*` along edge contractions and the gluing map
//! `f_*`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cohomology::{apply_generator, basis_for, multiply, GradedBasis, GradedClass};
use crate::error::{Error, Result};
use crate::homology::{cap, HomologyClass};
use crate::rational::Q;
use crate::trees::{
    quadruple_allowed, EdgeSplit, Flag, GoodFamily, PaintedSet, Side, TreeStructure, TwoPartition,
};

/// A sparse combination of pure tensors `⊗_v m(τ_v)` (or `μ(τ_v)`) over the
/// vertices of a tree, factors listed in the tree's vertex order.
///
/// The factor at `v` lives over the flags of `v`, with edge halves as whites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexTensorClass {
    tree: GoodFamily,
    grounds: Vec<PaintedSet>,
    terms: BTreeMap<Vec<GoodFamily>, Q>,
}

fn add_into(map: &mut BTreeMap<Vec<GoodFamily>, Q>, key: Vec<GoodFamily>, c: Q) {
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

impl VertexTensorClass {
    pub fn zero(tree: &GoodFamily) -> Result<Self> {
        let t = TreeStructure::expand(tree)?;
        let grounds = (0..t.vertices().len()).map(|v| t.vertex_ground(v)).collect();
        Ok(VertexTensorClass { tree: tree.clone(), grounds, terms: BTreeMap::new() })
    }

    /// `1 ⊗ … ⊗ 1`.
    pub fn unit(tree: &GoodFamily) -> Result<Self> {
        let mut out = VertexTensorClass::zero(tree)?;
        let key = out.grounds.iter().map(|g| GoodFamily::empty(*g)).collect();
        out.terms.insert(key, Q::one());
        Ok(out)
    }

    /// A single pure tensor with coefficient one.
    pub fn pure(tree: &GoodFamily, factors: Vec<GoodFamily>) -> Result<Self> {
        let mut out = VertexTensorClass::zero(tree)?;
        out.add_term(factors, Q::one())?;
        Ok(out)
    }

    pub fn tree(&self) -> &GoodFamily {
        &self.tree
    }

    pub fn grounds(&self) -> &[PaintedSet] {
        &self.grounds
    }

    pub fn terms(&self) -> &BTreeMap<Vec<GoodFamily>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, factors: Vec<GoodFamily>, c: Q) -> Result<()> {
        if factors.len() != self.grounds.len() || factors.iter().zip(&self.grounds).any(|(f, g)| f.ground() != *g) {
            return Err(Error::GroundMismatch);
        }
        add_into(&mut self.terms, factors, c);
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &VertexTensorClass, c: &Q) -> Result<()> {
        if other.tree != self.tree {
            return Err(Error::GroundMismatch);
        }
        for (k, x) in &other.terms {
            add_into(&mut self.terms, k.clone(), x * c);
        }
        Ok(())
    }

    pub fn sub(&self, other: &VertexTensorClass) -> Result<VertexTensorClass> {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one())?;
        Ok(out)
    }

    fn bases(&self) -> Result<Vec<std::sync::Arc<GradedBasis>>> {
        self.grounds.iter().map(|g| basis_for(*g)).collect()
    }

    /// Expands every factor into its normal form.
    pub fn normalize(&self) -> Result<VertexTensorClass> {
        let bases = self.bases()?;
        let mut out = VertexTensorClass { tree: self.tree.clone(), grounds: self.grounds.clone(), terms: BTreeMap::new() };
        for (factors, c) in &self.terms {
            let mut partial: Vec<(Vec<GoodFamily>, Q)> = vec![(Vec::new(), c.clone())];
            for (f, b) in factors.iter().zip(&bases) {
                let nf = b.normal_form(&GradedClass::monomial(f.clone()))?;
                let mut next = Vec::with_capacity(partial.len() * nf.terms().len());
                for (k, x) in &partial {
                    for (g, y) in nf.terms() {
                        let mut k2 = k.clone();
                        k2.push(g.clone());
                        next.push((k2, x * y));
                    }
                }
                partial = next;
            }
            for (k, x) in partial {
                add_into(&mut out.terms, k, x);
            }
        }
        Ok(out)
    }

    /// Equality of the classes after reduction of every factor.
    pub fn equals(&self, other: &VertexTensorClass) -> Result<bool> {
        Ok(self.sub(other)?.normalize()?.is_zero())
    }

    /// Factor-wise product in `⊗_v H*_{F(v)}`.
    pub fn mul(&self, other: &VertexTensorClass) -> Result<VertexTensorClass> {
        self.combine(other, |b, x, y| multiply(x, y, b))
    }

    /// Factor-wise action of the cohomology tensor `self` on the homology tensor `h`.
    pub fn cap(&self, h: &VertexTensorClass) -> Result<VertexTensorClass> {
        self.combine(h, |b, x, y| Ok(cap(b, x, &HomologyClass::from_vector(y.clone()))?.vector().clone()))
    }

    fn combine(
        &self,
        other: &VertexTensorClass,
        op: impl Fn(&GradedBasis, &GradedClass, &GradedClass) -> Result<GradedClass>,
    ) -> Result<VertexTensorClass> {
        if other.tree != self.tree {
            return Err(Error::GroundMismatch);
        }
        let bases = self.bases()?;
        let mut out = VertexTensorClass { tree: self.tree.clone(), grounds: self.grounds.clone(), terms: BTreeMap::new() };
        for (fa, ca) in &self.terms {
            for (fb, cb) in &other.terms {
                let mut partial: Vec<(Vec<GoodFamily>, Q)> = vec![(Vec::new(), ca * cb)];
                for ((a, b), basis) in fa.iter().zip(fb).zip(&bases) {
                    let prod = op(basis, &GradedClass::monomial(a.clone()), &GradedClass::monomial(b.clone()))?;
                    let mut next = Vec::new();
                    for (k, x) in &partial {
                        for (g, y) in prod.terms() {
                            let mut k2 = k.clone();
                            k2.push(g.clone());
                            next.push((k2, x * y));
                        }
                    }
                    partial = next;
                }
                for (k, x) in partial {
                    add_into(&mut out.terms, k, x);
                }
            }
        }
        Ok(out)
    }
}

/// The least allowed label quadruple with `i, j` in the part containing the
/// minimal label and `k, l` in the other part, as ground positions.
fn default_split_quad(split: &EdgeSplit) -> Result<[usize; 4]> {
    let s = split.ground();
    let sigma = split.sigma();
    let p1: Vec<usize> = (0..s.len()).filter(|p| sigma.part_min() >> p & 1 == 1).collect();
    let p2: Vec<usize> = (0..s.len()).filter(|p| sigma.part_min() >> p & 1 == 0).collect();
    for &i in &p1 {
        for &j in p1.iter().filter(|&&j| j != i) {
            for &k in &p2 {
                for &l in p2.iter().filter(|&&l| l != k) {
                    if quadruple_allowed(s.is_white_pos(i), s.is_white_pos(j), s.is_white_pos(k), s.is_white_pos(l)) {
                        return Ok([i, j, k, l]);
                    }
                }
            }
        }
    }
    Err(Error::QuadrupleNotAllowed(format!("no allowed quadruple across {sigma}")))
}

/// Stable partitions of `side`'s vertex set putting positions `a, b` on one
/// side and the glued white on the other.
fn separating(split: &EdgeSplit, side: Side, a: usize, b: usize) -> Vec<TwoPartition> {
    let set = split.side_set(side);
    let e = split.e_position(side);
    crate::trees::enumerate_stable_partitions(set)
        .into_iter()
        .filter(|r| r.same_side(a, b) && !r.same_side(a, e))
        .collect()
}

/// Image of `l_ρ` under the pullback to the one-edge tree `σ`, as a class
/// over that tree (vertex 0 is the side holding the minimal label).
///
/// For `ρ = σ` the quadruple `(i, j, k, l)` of ground positions (default:
/// the least allowed one with `i, j` on the first side) gives
/// `−Σ_{α: ij α e1} l_α ⊗ 1 − Σ_{β: e2 β kl} 1 ⊗ l_β`.
pub fn fstar_edge(split: &EdgeSplit, rho: &TwoPartition, quad: Option<[usize; 4]>) -> Result<VertexTensorClass> {
    let s = split.ground();
    if rho.ground() != s {
        return Err(Error::GroundMismatch);
    }
    rho.require_stable()?;
    let sigma = split.sigma();
    let tree = GoodFamily::new(s, [sigma])?;
    let mut out = VertexTensorClass::zero(&tree)?;
    let (left, right) = (split.left(), split.right());
    if *rho == sigma {
        let [i, j, k, l] = match quad {
            Some(q) => q,
            None => default_split_quad(split)?,
        };
        let (si, pi) = split.locate(i);
        let (sj, pj) = split.locate(j);
        let (sk, pk) = split.locate(k);
        let (sl, pl) = split.locate(l);
        let ok = si == Side::Left
            && sj == Side::Left
            && sk == Side::Right
            && sl == Side::Right
            && i != j
            && k != l
            && quadruple_allowed(s.is_white_pos(i), s.is_white_pos(j), s.is_white_pos(k), s.is_white_pos(l));
        if !ok {
            return Err(Error::QuadrupleNotAllowed(format!("({i},{j},{k},{l}) across {sigma}")));
        }
        let minus = -Q::one();
        for a in separating(split, Side::Left, pi, pj) {
            out.add_term(vec![GoodFamily::new(left, [a])?, GoodFamily::empty(right)], minus.clone())?;
        }
        for b in separating(split, Side::Right, pk, pl) {
            out.add_term(vec![GoodFamily::empty(left), GoodFamily::new(right, [b])?], minus.clone())?;
        }
        return Ok(out);
    }
    if quad.is_some() {
        return Err(Error::Precondition("a quadruple is only used for ρ = σ".into()));
    }
    if rho.delta_unchecked(&sigma) == 2 {
        return Ok(out);
    }
    match split.restrict(rho)? {
        (Side::Left, r) => out.add_term(vec![GoodFamily::new(left, [r])?, GoodFamily::empty(right)], Q::one())?,
        (Side::Right, r) => out.add_term(vec![GoodFamily::empty(left), GoodFamily::new(right, [r])?], Q::one())?,
    }
    Ok(out)
}

/// The ring map `f*: H*_S → H*_{S1∪e1} ⊗ H*_{S2∪e2}` on a class, computed as
/// the product of the images of the edge generators of each monomial.
pub fn fstar_edge_class(split: &EdgeSplit, x: &GradedClass) -> Result<VertexTensorClass> {
    if x.ground() != split.ground() {
        return Err(Error::GroundMismatch);
    }
    let tree = GoodFamily::new(split.ground(), [split.sigma()])?;
    let unit = VertexTensorClass::unit(&tree)?;
    let mut out = VertexTensorClass::zero(&tree)?;
    for (g, c) in x.terms() {
        let mut cur = unit.clone();
        for rho in g.partitions() {
            let img = fstar_edge(split, &rho, None)?;
            cur = mul_generators(&cur, &img)?;
            if cur.is_zero() {
                break;
            }
        }
        out.add_scaled(&cur, c)?;
    }
    out.normalize()
}

/// Product of a normalized class with a combination of degree-one pure
/// tensors `l ⊗ 1`, `1 ⊗ l`, reduced after every step.
fn mul_generators(cur: &VertexTensorClass, gens: &VertexTensorClass) -> Result<VertexTensorClass> {
    let bases = cur.bases()?;
    let mut out = VertexTensorClass { tree: cur.tree.clone(), grounds: cur.grounds.clone(), terms: BTreeMap::new() };
    for (gk, gc) in &gens.terms {
        let (slot, sigma) = gk
            .iter()
            .enumerate()
            .find_map(|(v, f)| (f.edges() == 1).then(|| (v, f.partitions().next().expect("one edge"))))
            .expect("generator tensors have one degree-one factor");
        for (k, c) in &cur.terms {
            let prod = apply_generator(&bases[slot], &sigma, &GradedClass::monomial(k[slot].clone()))?;
            for (g, y) in prod.terms() {
                let mut k2 = k.clone();
                k2[slot] = g.clone();
                add_into(&mut out.terms, k2, c * gc * y);
            }
        }
    }
    Ok(out)
}

/// Pullback along the contraction of the single edge `rho`, which must break
/// `x`'s tree at a vertex.
pub fn fstar_insert(x: &VertexTensorClass, rho: &TwoPartition) -> Result<VertexTensorClass> {
    let t = TreeStructure::expand(&x.tree)?;
    let target = x.tree.star_insert(rho)?;
    let t2 = TreeStructure::expand(&target)?;
    let v = match t.classify_break(rho)? {
        crate::trees::BreakResult::AtVertex(v) => v,
        _ => return Err(Error::Precondition(format!("{rho} does not break the tree at a vertex"))),
    };
    let vground = t.vertex_ground(v);
    let sigma_v = TwoPartition::from_part(vground, t.alpha_of(v, rho))?;
    let split = EdgeSplit::new(sigma_v)?;
    let left_labels = t.lift_flag_mask(v, sigma_v.part_min());
    let new_half = |side: Side| {
        let near_min_side = left_labels & 1 == 1;
        let near_min = if side == Side::Left { near_min_side } else { !near_min_side };
        Flag::Half { edge: *rho, near_min }
    };
    let v_left = t2.vertex_of(&new_half(Side::Left)).expect("new edge present");
    let v_right = t2.vertex_of(&new_half(Side::Right)).expect("new edge present");
    let side_map = |side: Side, target_v: usize| -> Vec<usize> {
        let set = split.side_set(side);
        (0..set.len())
            .map(|q| {
                let flag = match split.to_ground(side, q) {
                    Some(p) => t.vertex(v).flags[p].flag,
                    None => new_half(side),
                };
                t2.vertex(target_v).position_of(&flag).expect("flag survives the insertion")
            })
            .collect()
    };
    let map_l = side_map(Side::Left, v_left);
    let map_r = side_map(Side::Right, v_right);
    // other vertices keep their flags
    let mut carry: Vec<Option<usize>> = vec![None; t.vertices().len()];
    for (u, slot) in carry.iter_mut().enumerate() {
        if u != v {
            *slot = t2.vertex_of(&t.vertex(u).flags[0].flag);
        }
    }
    let mut out = VertexTensorClass::zero(&target)?;
    for (factors, c) in &x.terms {
        let img = fstar_edge_class(&split, &GradedClass::monomial(factors[v].clone()))?;
        for (pair, d) in &img.terms {
            let mut key: Vec<GoodFamily> = out.grounds.iter().map(|g| GoodFamily::empty(*g)).collect();
            for (u, f) in factors.iter().enumerate() {
                if let Some(u2) = carry[u] {
                    key[u2] = f.clone();
                }
            }
            key[v_left] = pair[0].relabel(out.grounds[v_left], &map_l);
            key[v_right] = pair[1].relabel(out.grounds[v_right], &map_r);
            add_into(&mut out.terms, key, c * d);
        }
    }
    out.normalize()
}

/// Pullback along a contraction from `target` onto `x`'s tree, done one edge
/// at a time in `order` (default: canonical edge order).
pub fn fstar(x: &VertexTensorClass, target: &GoodFamily, order: Option<&[TwoPartition]>) -> Result<VertexTensorClass> {
    if target.ground() != x.tree.ground() {
        return Err(Error::GroundMismatch);
    }
    if x.tree.partitions().any(|p| !target.contains(&p)) {
        return Err(Error::Precondition("not a contraction: the source has an edge the target lacks".into()));
    }
    let missing: Vec<TwoPartition> = target.partitions().filter(|p| !x.tree.contains(p)).collect();
    let steps: Vec<TwoPartition> = match order {
        Some(o) => {
            let mut sorted_o = o.to_vec();
            sorted_o.sort();
            if sorted_o != missing {
                return Err(Error::Precondition("order must list exactly the contracted edges".into()));
            }
            o.to_vec()
        }
        None => missing,
    };
    let mut cur = x.normalize()?;
    for rho in &steps {
        cur = fstar_insert(&cur, rho)?;
    }
    Ok(cur)
}

/// The gluing map `f_*: ⊗_v H_*F(v) → H_*S`, `⊗ μ(τ_v) ↦ μ(τ ∘ (τ_v))`.
pub fn flowerstar(y: &VertexTensorClass) -> Result<HomologyClass> {
    let t = TreeStructure::expand(&y.tree)?;
    let s = y.tree.ground();
    let mut grade: Option<usize> = None;
    let mut acc = GradedClass::zero(s, 0);
    for (factors, c) in &y.terms {
        let mut parts: Vec<TwoPartition> = y.tree.partitions().collect();
        for (v, f) in factors.iter().enumerate() {
            for r in f.partitions() {
                parts.push(TwoPartition::from_part(s, t.lift_flag_mask(v, r.part_min()))?);
            }
        }
        let g = GoodFamily::new(s, parts)?;
        match grade {
            None => {
                grade = Some(g.edges());
                acc = GradedClass::zero(s, g.edges());
            }
            Some(d) if d != g.edges() => {
                return Err(Error::Precondition(format!("inhomogeneous input: grades {d} and {}", g.edges())));
            }
            _ => {}
        }
        acc.add_term(g, c.clone())?;
    }
    if grade.is_none() {
        acc = GradedClass::zero(s, y.tree.edges());
    }
    HomologyClass::from_vector(acc).normal_form(&*basis_for(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::trees::Label;

    fn p(s: PaintedSet, labels: &[&str]) -> TwoPartition {
        let ls: Vec<Label> = labels.iter().map(|x| x.parse().unwrap()).collect();
        TwoPartition::from_labels(s, &ls).unwrap()
    }

    #[test]
    fn edge_pullback_examples() {
        let s5 = PaintedSet::new(5, 0).unwrap();
        let sigma = p(s5, &["w1", "w2"]);
        let split = EdgeSplit::new(sigma).unwrap();
        let right = split.right();
        // right factor: w1..w3 are 3,4,5 and w4 is e2
        let l34 = GoodFamily::new(right, [p(right, &["w1", "w2"])]).unwrap();
        let left_one = GoodFamily::empty(split.left());

        let a = fstar_edge(&split, &p(s5, &["w3", "w4"]), None).unwrap();
        assert_eq!(a.terms().len(), 1);
        assert_eq!(a.terms()[&vec![left_one.clone(), l34.clone()]], q(1));

        assert!(fstar_edge(&split, &p(s5, &["w1", "w3"]), None).unwrap().is_zero());

        let c = fstar_edge(&split, &sigma, Some([0, 1, 2, 3])).unwrap();
        assert_eq!(c.terms().len(), 1);
        assert_eq!(c.terms()[&vec![left_one, l34]], q(-1));
    }

    #[test]
    fn surjectivity_on_a_chain() {
        let s5 = PaintedSet::new(5, 0).unwrap();
        let sigma = p(s5, &["w1", "w2"]);
        let split = EdgeSplit::new(sigma).unwrap();
        let right = split.right();
        let g2 = GoodFamily::new(right, [p(right, &["w1", "w2"])]).unwrap();
        let g1 = GoodFamily::empty(split.left());
        let g = split.graft(&g1, &g2).unwrap().contract_edge(&sigma).unwrap();
        let img = fstar_edge_class(&split, &GradedClass::monomial(g)).unwrap();
        let want = VertexTensorClass::pure(&GoodFamily::new(s5, [sigma]).unwrap(), vec![g1, g2]).unwrap();
        assert!(img.equals(&want).unwrap());
    }

    #[test]
    fn identity_contraction() {
        let s5 = PaintedSet::new(5, 0).unwrap();
        let tree = GoodFamily::new(s5, [p(s5, &["w1", "w2"])]).unwrap();
        let x = VertexTensorClass::unit(&tree).unwrap();
        assert_eq!(fstar(&x, &tree, None).unwrap(), x.normalize().unwrap());
    }

    #[test]
    fn gluing_units() {
        let s5 = PaintedSet::new(5, 0).unwrap();
        let tree = GoodFamily::new(s5, [p(s5, &["w1", "w2"])]).unwrap();
        let h = flowerstar(&VertexTensorClass::unit(&tree).unwrap()).unwrap();
        assert_eq!(h, HomologyClass::of_tree(tree).normal_form(&basis_for(s5).unwrap()).unwrap());
    }
}
