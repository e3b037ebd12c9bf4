//! The homology module `H_*S`, the action of `H*_S` on it, integration over
//! the top degree, the pairing on complementary degrees and the coproduct.

use std::fmt;

use num_traits::{One, Zero};

use crate::cohomology::{apply_generator, multiply, ClassJson, GradedBasis, GradedClass};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rational::{fmt_q, Q};
use crate::trees::{GoodFamily, PaintedSet, TwoPartition};

/// A homogeneous homology class: a combination of tree classes `μ(τ)`.
///
/// It is reduced against the same relation matrices as cohomology, so the
/// maps `s: [μ(τ)] ↦ [m(τ)]` and `t: x ↦ x·1` are the identity on
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomologyClass {
    inner: GradedClass,
}

impl HomologyClass {
    /// The class `1 = μ(one-vertex tree)`.
    pub fn fundamental(ground: PaintedSet) -> Self {
        HomologyClass { inner: GradedClass::unit(ground) }
    }

    /// The class `μ(τ)`.
    pub fn of_tree(g: GoodFamily) -> Self {
        HomologyClass { inner: GradedClass::monomial(g) }
    }

    pub fn zero(ground: PaintedSet, grade: usize) -> Self {
        HomologyClass { inner: GradedClass::zero(ground, grade) }
    }

    /// Reinterprets a vector of trees as a homology class.
    pub fn from_vector(v: GradedClass) -> Self {
        HomologyClass { inner: v }
    }

    pub fn vector(&self) -> &GradedClass {
        &self.inner
    }

    pub fn ground(&self) -> PaintedSet {
        self.inner.ground()
    }

    pub fn grade(&self) -> usize {
        self.inner.grade()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn add(&self, other: &HomologyClass) -> Result<HomologyClass> {
        Ok(HomologyClass { inner: self.inner.add(&other.inner)? })
    }

    pub fn sub(&self, other: &HomologyClass) -> Result<HomologyClass> {
        Ok(HomologyClass { inner: self.inner.sub(&other.inner)? })
    }

    pub fn scale(&self, c: &Q) -> HomologyClass {
        HomologyClass { inner: self.inner.scale(c) }
    }

    pub fn normal_form(&self, basis: &GradedBasis) -> Result<HomologyClass> {
        Ok(HomologyClass { inner: basis.normal_form(&self.inner)? })
    }

    pub fn to_json(&self) -> ClassJson {
        self.inner.to_json()
    }

    pub fn from_json(ground: PaintedSet, j: &ClassJson) -> Result<Self> {
        Ok(HomologyClass { inner: GradedClass::from_json(ground, j)? })
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "μ[{}]", self.inner)
    }
}

/// The action of `l_σ` on a homology class, reduced.
pub fn act(basis: &GradedBasis, sigma: &TwoPartition, h: &HomologyClass) -> Result<HomologyClass> {
    Ok(HomologyClass { inner: apply_generator(basis, sigma, &h.inner)? })
}

/// `x · h` for a cohomology class `x`, one edge generator at a time.
pub fn cap(basis: &GradedBasis, x: &GradedClass, h: &HomologyClass) -> Result<HomologyClass> {
    if x.ground() != h.ground() {
        return Err(Error::GroundMismatch);
    }
    let start = h.normal_form(basis)?;
    let mut out = HomologyClass::zero(h.ground(), x.grade() + h.grade());
    for (g, c) in x.terms() {
        let mut cur = start.clone();
        for rho in g.partitions() {
            cur = act(basis, &rho, &cur)?;
        }
        out = out.add(&cur.scale(c))?;
    }
    out.normal_form(basis)
}

/// The map `s: [μ(τ)] ↦ [m(τ)]`.
pub fn s_map(basis: &GradedBasis, h: &HomologyClass) -> Result<GradedClass> {
    basis.normal_form(&h.inner)
}

/// The map `t: x ↦ x · 1`.
pub fn t_map(basis: &GradedBasis, x: &GradedClass) -> Result<HomologyClass> {
    cap(basis, x, &HomologyClass::fundamental(basis.ground()))
}

/// Verifies that the top degree is one-dimensional and that every maximal
/// tree has the same class.
pub fn check_top_degree(basis: &GradedBasis) -> Result<()> {
    basis
        .top_check
        .get_or_init(|| {
            let top = basis.top_degree();
            let dd = basis.degree(top).expect("top degree present");
            if dd.dim() != 1 {
                return Err(Error::TopDegree(format!("top degree has dimension {}", dd.dim())));
            }
            let reference = GradedClass::monomial(dd.basis_trees()[0].clone());
            for g in dd.trees() {
                let nf = basis.normal_form(&GradedClass::monomial(g.clone()))?;
                if nf != reference {
                    return Err(Error::TopDegree(format!("maximal tree {g} has class {nf}")));
                }
            }
            Ok(())
        })
        .clone()
}

/// Integral of a top-degree class, normalized to one on every maximal tree.
pub fn integrate(basis: &GradedBasis, x: &GradedClass) -> Result<Q> {
    if x.is_zero() {
        return Ok(Q::zero());
    }
    if x.grade() != basis.top_degree() {
        return Err(Error::Precondition(format!(
            "integration needs a class of degree {}, got {}",
            basis.top_degree(),
            x.grade()
        )));
    }
    check_top_degree(basis)?;
    Ok(basis.coords(x)?.into_iter().next().unwrap_or_else(Q::zero))
}

/// Matrix of `∫ b_i b'_j` over the bases of degrees `d` and `D - d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingMatrix {
    pub degree: usize,
    pub matrix: Mat,
}

impl PairingMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.matrix.rows() {
            let row: Vec<String> = (0..self.matrix.cols()).map(|c| fmt_q(self.matrix.get(r, c))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.matrix.is_square() && self.matrix.rank() == self.matrix.rows()
    }
}

fn all_pairings(basis: &GradedBasis) -> Result<Vec<Mat>> {
    basis
        .pairings
        .get_or_init(|| {
            let top = basis.top_degree();
            let mut mats = Vec::with_capacity(top + 1);
            for d in 0..=top {
                let left = basis.basis_trees(d);
                let right = basis.basis_trees(top - d);
                let mut m = Mat::zeros(left.len(), right.len());
                for (i, a) in left.iter().enumerate() {
                    for (j, b) in right.iter().enumerate() {
                        let prod = multiply(&GradedClass::monomial(a.clone()), &GradedClass::monomial(b.clone()), basis)?;
                        m.set(i, j, integrate(basis, &prod)?);
                    }
                }
                mats.push(m);
            }
            Ok(mats)
        })
        .clone()
}

/// The pairing matrix in degree `d`.
pub fn pairing(basis: &GradedBasis, d: usize) -> Result<PairingMatrix> {
    let mats = all_pairings(basis)?;
    let matrix = mats
        .get(d)
        .cloned()
        .ok_or_else(|| Error::Precondition(format!("degree {d} exceeds the top degree {}", basis.top_degree())))?;
    Ok(PairingMatrix { degree: d, matrix })
}

/// Fails with the first degenerate degree, if any.
pub fn check_pairings(basis: &GradedBasis) -> Result<()> {
    for d in 0..=basis.top_degree() {
        if !pairing(basis, d)?.is_nondegenerate() {
            return Err(Error::DegeneratePairing(d));
        }
    }
    Ok(())
}

/// Kronecker pairing of a homology class with a cohomology class of the
/// same degree: basis trees `μ(b_i)` and `m(b_j)` pair to `δ_ij`.
pub fn kronecker(basis: &GradedBasis, h: &HomologyClass, x: &GradedClass) -> Result<Q> {
    if h.grade() != x.grade() {
        return Ok(Q::zero());
    }
    let a = basis.coords(&h.inner)?;
    let b = basis.coords(x)?;
    Ok(a.iter().zip(&b).map(|(p, q)| p * q).sum())
}

/// The coproduct dual to multiplication: `⟨Δh, a ⊗ b⟩ = ⟨h, a·b⟩`.
///
/// Terms are `(μ(b_i), μ(b_j), coefficient)` over basis trees, in
/// canonical order.
pub fn coproduct(basis: &GradedBasis, h: &HomologyClass) -> Result<Vec<(HomologyClass, HomologyClass, Q)>> {
    check_pairings(basis)?;
    let k = h.grade();
    let hc = basis.coords(&h.inner)?;
    let mut out = Vec::new();
    for d1 in 0..=k {
        let d2 = k - d1;
        let left = basis.basis_trees(d1);
        let right = basis.basis_trees(d2);
        for a in &left {
            for b in &right {
                let prod = multiply(&GradedClass::monomial(a.clone()), &GradedClass::monomial(b.clone()), basis)?;
                let pc = basis.coords(&prod)?;
                let c: Q = hc.iter().zip(&pc).map(|(x, y)| x * y).sum();
                if !c.is_zero() {
                    out.push((HomologyClass::of_tree(a.clone()), HomologyClass::of_tree(b.clone()), c));
                }
            }
        }
    }
    Ok(out)
}

/// The counit: the degree-zero coordinate.
pub fn counit(basis: &GradedBasis, h: &HomologyClass) -> Result<Q> {
    if h.grade() != 0 {
        return Ok(Q::zero());
    }
    Ok(basis.coords(&h.inner)?.into_iter().next().unwrap_or_else(Q::zero))
}

/// Applies `counit ⊗ id` to a coproduct expansion.
pub fn counit_left(basis: &GradedBasis, terms: &[(HomologyClass, HomologyClass, Q)], grade: usize) -> Result<HomologyClass> {
    let mut out = HomologyClass::zero(basis.ground(), grade);
    for (a, b, c) in terms {
        let e = counit(basis, a)?;
        if !e.is_zero() {
            out = out.add(&b.scale(&(e * c)))?;
        }
    }
    out.normal_form(basis)
}

/// Checks `counit(1) = 1` on a basis; used as a smoke test.
pub fn counit_of_fundamental(basis: &GradedBasis) -> Result<bool> {
    Ok(counit(basis, &HomologyClass::fundamental(basis.ground()))? == Q::one())
}
