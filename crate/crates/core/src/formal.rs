//! Formal geometry of L-algebras: the generating series `B`, the
//! commutativity equations `[∂_a B, ∂_b B] = 0`, oriented associativity,
//! the conversions between vector fields `A` and series `B`, gluing, formal
//! projections and truncated maximality tests.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lalgebra::LAlgebra;
use crate::linalg::{solve_sparse, Echelon, Mat, SparseVec};
use crate::par::{self, Execution};
use crate::rational::{fmt_q, Q};
use crate::series::{degree, exp_factorial, monomials, render_scalar, MatrixSeries, ScalarSeries, Series, VectorFieldSeries};

/// `B = Σ_M x^M / M! · ⟨M⟩`, with variables named after the indices.
pub fn build_b(l: &LAlgebra) -> MatrixSeries {
    let n = l.num_indices();
    let mut s = Series::zero(n, l.order() as u32);
    for (e, m) in l.correlators() {
        s.add_term(e.clone(), m.scale(&(Q::one() / exp_factorial(e))));
    }
    MatrixSeries::new(l.index_names(), l.dim_t(), l.dim_f(), s).expect("index names are distinct")
}

/// Reads correlators back from the coefficients of `B`. The first `dim_t`
/// variables are the `T`-directions, the rest must match `F`.
pub fn extract_lalgebra(b: &MatrixSeries) -> Result<LAlgebra> {
    if b.series.constant_term().is_some() {
        return Err(Error::ConstantTerm);
    }
    if b.nvars() != b.dim_t + b.dim_f {
        return Err(Error::Dimension(format!(
            "{} variables for dimT = {} and dimF = {}",
            b.nvars(),
            b.dim_t,
            b.dim_f
        )));
    }
    let mut l = LAlgebra::new(b.dim_t, b.dim_f, b.order() as usize);
    for (e, m) in b.series.terms() {
        l.set(e.clone(), m.scale(&exp_factorial(e)))?;
    }
    Ok(l)
}

fn exp_json(vars: &[String], e: &[u32]) -> BTreeMap<String, u32> {
    vars.iter().zip(e).filter(|(_, &k)| k > 0).map(|(v, &k)| (v.clone(), k)).collect()
}

/// First nonzero coefficient of a commutator `[∂_a B, ∂_b B]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommWitness {
    pub a: String,
    pub b: String,
    pub exp: BTreeMap<String, u32>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommReport {
    pub status: &'static str,
    /// Total degree through which the commutators were checked (`N − 2`).
    pub verified_order: i64,
    pub pairs_checked: usize,
    pub witness: Option<CommWitness>,
}

impl CommReport {
    pub fn passes(&self) -> bool {
        self.witness.is_none()
    }
}

/// Lowest-degree nonzero term, ties broken by exponent order.
fn first_term<C: crate::series::Coeff>(s: &Series<C>) -> Option<(&Vec<u32>, &C)> {
    s.terms().iter().min_by_key(|(e, _)| (degree(e), (*e).clone()))
}

/// Checks `[∂_a B, ∂_b B] = 0` for all pairs `a < b` through order `N − 2`.
pub fn check_comm(b: &MatrixSeries) -> CommReport {
    check_comm_with(b, Execution::default())
}

pub fn check_comm_with(b: &MatrixSeries, exec: Execution) -> CommReport {
    let n = b.nvars();
    let order = b.order() as i64 - 2;
    let derivs: Vec<Series<Mat>> = (0..n).map(|i| b.series.derivative(i)).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results = if order < 0 {
        Vec::new()
    } else {
        par::map(exec, &pairs, |&(i, j)| {
            let o = order as u32;
            let c = derivs[i].mul_to(&derivs[j], o).sub(&derivs[j].mul_to(&derivs[i], o));
            first_term(&c).map(|(e, m)| CommWitness {
                a: b.vars[i].clone(),
                b: b.vars[j].clone(),
                exp: exp_json(&b.vars, e),
                matrix: m.to_strings(),
            })
        })
    };
    let witness = results.into_iter().flatten().next();
    CommReport {
        status: if witness.is_none() { "pass" } else { "fail" },
        verified_order: order,
        pairs_checked: if order < 0 { 0 } else { pairs.len() },
        witness,
    }
}

/// First failure of `(∂_a∘∂_b)∘∂_c = ∂_a∘(∂_b∘∂_c)` in the `∂_f` component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssocWitness {
    pub a: String,
    pub b: String,
    pub c: String,
    pub f: String,
    pub exp: BTreeMap<String, u32>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssocReport {
    pub status: &'static str,
    /// Total degree through which the equations were checked (`N − 3`).
    pub verified_order: i64,
    pub witness: Option<AssocWitness>,
}

impl AssocReport {
    pub fn passes(&self) -> bool {
        self.witness.is_none()
    }
}

/// Structure constants `A_{ab}^c = ∂_a ∂_b A^c`, indexed `[a][b][c]`.
pub fn structure_constants(a: &VectorFieldSeries) -> Vec<Vec<Vec<ScalarSeries>>> {
    let n = a.dim();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|c| a.components[c].derivative(i).derivative(j)).collect()).collect())
        .collect()
}

/// Checks `Σ_e A_{ab}^e A_{ec}^f = Σ_e A_{bc}^e A_{ea}^f` coefficientwise
/// through order `N − 3`.
pub fn assoc_check(a: &VectorFieldSeries) -> AssocReport {
    assoc_check_with(a, Execution::default())
}

pub fn assoc_check_with(a: &VectorFieldSeries, exec: Execution) -> AssocReport {
    let n = a.dim();
    let order = a.order() as i64 - 3;
    let k = structure_constants(a);
    let triples: Vec<(usize, usize, usize)> =
        (0..n).flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z)))).collect();
    let results = if order < 0 {
        Vec::new()
    } else {
        par::map(exec, &triples, |&(i, j, c)| {
            let o = order as u32;
            for f in 0..n {
                let mut d = ScalarSeries::zero(n, o);
                for e in 0..n {
                    d = d.add(&k[i][j][e].mul_to(&k[e][c][f], o));
                    d = d.sub(&k[j][c][e].mul_to(&k[e][i][f], o));
                }
                if let Some((ex, v)) = first_term(&d) {
                    return Some(AssocWitness {
                        a: a.vars[i].clone(),
                        b: a.vars[j].clone(),
                        c: a.vars[c].clone(),
                        f: a.vars[f].clone(),
                        exp: exp_json(&a.vars, ex),
                        value: fmt_q(v),
                    });
                }
            }
            None
        })
    };
    let witness = results.into_iter().flatten().next();
    AssocReport { status: if witness.is_none() { "pass" } else { "fail" }, verified_order: order, witness }
}

/// Whether `∂_e` is a flat identity: `A_{ae}^c = δ_a^c` exactly.
pub fn has_flat_identity(a: &VectorFieldSeries, e: usize) -> bool {
    let n = a.dim();
    let k = structure_constants(a);
    (0..n).all(|i| {
        (0..n).all(|c| {
            let want = if i == c { ScalarSeries::one(n, k[i][e][c].order()) } else { ScalarSeries::zero(n, k[i][e][c].order()) };
            k[i][e][c] == want
        })
    })
}

/// `B_b^c = ∂_b A^c`: row `c`, column `b`. The result has order `N − 1`.
pub fn b_from_a(a: &VectorFieldSeries) -> MatrixSeries {
    let n = a.dim();
    let order = a.order().saturating_sub(1);
    let mut s = Series::zero(n, order);
    for c in 0..n {
        for b in 0..n {
            for (e, x) in a.components[c].derivative(b).terms() {
                s.add_term(e.clone(), Mat::unit(n, c, b).scale(x));
            }
        }
    }
    MatrixSeries::new(a.vars.clone(), 0, n, s).expect("vector field variables are distinct")
}

/// Inverts a coordinate change `x ↦ φ(x)` with zero constant term and
/// invertible linear part by fixed-point iteration.
fn invert_map(phi: &[ScalarSeries], order: u32) -> Result<Vec<ScalarSeries>> {
    let n = phi.len();
    let mut jac = Mat::zeros(n, n);
    for (c, f) in phi.iter().enumerate() {
        for a in 0..n {
            let mut e = vec![0; n];
            e[a] = 1;
            if let Some(x) = f.coeff(&e) {
                jac.set(c, a, x.clone());
            }
        }
    }
    let inv = jac.inverse().ok_or_else(|| Error::NotPrimitive("t ↦ B(t)h has a singular linear part".into()))?;
    let nonlinear: Vec<ScalarSeries> = phi.iter().map(|f| f.truncate(order)).map(|f| {
        let mut g = ScalarSeries::zero(n, order);
        for (e, x) in f.terms() {
            if degree(e) >= 2 {
                g.add_term(e.clone(), x.clone());
            }
        }
        g
    }).collect();
    let vars: Vec<ScalarSeries> = (0..n).map(|i| ScalarSeries::var(n, order, i)).collect();
    // x = J⁻¹ (t − N(x)), each round fixes one more degree.
    let mut x: Vec<ScalarSeries> = (0..n).map(|_| ScalarSeries::zero(n, order)).collect();
    for _ in 0..=order {
        let nx: Vec<ScalarSeries> = nonlinear.iter().map(|g| g.compose(&x)).collect::<Result<_>>()?;
        let rhs: Vec<ScalarSeries> = (0..n).map(|c| vars[c].sub(&nx[c])).collect();
        x = (0..n)
            .map(|r| (0..n).fold(ScalarSeries::zero(n, order), |acc, c| acc.add(&rhs[c].scale(inv.get(r, c)))))
            .collect();
    }
    Ok(x)
}

/// Integrates the closed 1-form `Σ_b ω_b dt^b` to the function vanishing at 0.
fn integrate_form(omega: &[ScalarSeries], order: u32) -> ScalarSeries {
    let n = omega.len();
    let mut out = ScalarSeries::zero(n, order);
    for (b, w) in omega.iter().enumerate() {
        for (e, x) in w.terms() {
            let mut e2 = e.clone();
            e2[b] += 1;
            out.add_term(e2, x / Q::from_integer((degree(e) + 1).into()));
        }
    }
    out
}

/// Recovers a vector field `A` from a solution `B` and a primitive vector
/// `h`: changes coordinates to `t = B(x)h − B(0)h`, checks that the forms
/// `ω^c = Σ_b B_b^c dt^b` are closed and integrates them with `A^c(0) = 0`.
pub fn a_from_b(b: &MatrixSeries, h: &[Q]) -> Result<VectorFieldSeries> {
    let n = b.nvars();
    if b.dim_f != n || h.len() != n {
        return Err(Error::Dimension(format!(
            "need as many variables as dimF (got {n} variables, dimF = {}, |h| = {})",
            b.dim_f,
            h.len()
        )));
    }
    let order = b.order();
    let bh = b.series.apply(h);
    let phi: Vec<ScalarSeries> = bh
        .iter()
        .map(|s| {
            let mut s = s.clone();
            if let Some(c) = s.constant_term().cloned() {
                s.add_term(vec![0; n], -c);
            }
            s
        })
        .collect();
    let psi = invert_map(&phi, order)?;
    let bt = b.series.compose(&psi)?;
    let mut components = Vec::with_capacity(n);
    for c in 0..n {
        let omega: Vec<ScalarSeries> = (0..n).map(|col| bt.entry(c, col)).collect();
        for i in 0..n {
            for j in i + 1..n {
                let o = order.saturating_sub(1);
                if !omega[j].derivative(i).agrees_through(&omega[i].derivative(j), o) {
                    return Err(Error::NotClosed(format!("ω^{} is not closed in ({}, {})", b.vars[c], b.vars[i], b.vars[j])));
                }
            }
        }
        components.push(integrate_form(&omega, order + 1));
    }
    VectorFieldSeries::new(b.vars.clone(), components)
}

/// `B(t, θ) = B2(θ + B1(t)h)` over the variables of `B1` followed by those of
/// `B2`; the first ones are the `T`-directions of the result.
pub fn glue_series(b1: &MatrixSeries, b2: &MatrixSeries, h: &[Q]) -> Result<MatrixSeries> {
    if let Some(v) = b1.vars.iter().find(|v| b2.vars.contains(v)) {
        return Err(Error::VariableCollision(v.clone()));
    }
    if b1.series.constant_term().is_some() {
        return Err(Error::ConstantTerm);
    }
    if b1.dim_f != b2.dim_f || b2.nvars() != b2.dim_f || h.len() != b1.dim_f {
        return Err(Error::Dimension("B2 must live on F-coordinates and share F with B1".into()));
    }
    let (n1, n2) = (b1.nvars(), b2.nvars());
    let n = n1 + n2;
    let order = b1.order().min(b2.order());
    let lifted: Vec<ScalarSeries> =
        b1.series.apply(h).iter().map(|s| s.embed(n, &(0..n1).collect::<Vec<_>>()).truncate(order)).collect();
    let subs: Vec<ScalarSeries> = (0..n2).map(|j| ScalarSeries::var(n, order, n1 + j).add(&lifted[j])).collect();
    let s = b2.series.truncate(order).compose(&subs)?;
    let vars = b1.vars.iter().chain(&b2.vars).cloned().collect();
    MatrixSeries::new(vars, n1, b2.dim_f, s)
}

/// Gluing with the second factor given by a vector field with flat identity.
pub fn glue(b1: &MatrixSeries, a2: &VectorFieldSeries, h: &[Q]) -> Result<MatrixSeries> {
    glue_series(b1, &b_from_a(a2), h)
}

/// Restricts to the named variables, setting all others to zero.
pub fn restrict(b: &MatrixSeries, keep: &[&str]) -> Result<MatrixSeries> {
    let idx: Vec<usize> = keep
        .iter()
        .map(|k| b.vars.iter().position(|v| v == k).ok_or_else(|| Error::Parse(format!("unknown variable '{k}'"))))
        .collect::<Result<_>>()?;
    let dim_t = idx.iter().filter(|&&i| i < b.dim_t).count();
    let vars = idx.iter().map(|&i| b.vars[i].clone()).collect();
    MatrixSeries::new(vars, dim_t, b.dim_f, b.series.restrict_to(&idx))
}

/// One coefficient series `λ^i_μ(t)` of a formal projection.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTerm {
    pub var: usize,
    pub theta: Vec<u32>,
    pub series: ScalarSeries,
}

/// A formal projection `t^i ↦ t^i + Σ_μ λ^i_μ(t) θ^μ` with `B ∘ φ = B′`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub base_vars: Vec<String>,
    pub theta_vars: Vec<String>,
    pub order: u32,
    pub lambdas: Vec<LambdaTerm>,
    /// Dimension of the solution space left free at each θ-degree.
    pub kernel_dims: Vec<usize>,
}

impl Projection {
    pub fn is_unique(&self) -> bool {
        self.kernel_dims.iter().all(|&k| k == 0)
    }

    /// `λ^i_μ(t)`, zero if absent.
    pub fn lambda(&self, var: usize, theta: &[u32]) -> ScalarSeries {
        self.lambdas
            .iter()
            .find(|l| l.var == var && l.theta == theta)
            .map(|l| l.series.clone())
            .unwrap_or_else(|| ScalarSeries::zero(self.base_vars.len(), self.order))
    }

    /// Substitutions `t^i + Σ_μ λ^i_μ(t) θ^μ` over the total variables.
    pub fn substitutions(&self) -> Vec<ScalarSeries> {
        let nt = self.base_vars.len();
        let n = nt + self.theta_vars.len();
        (0..nt)
            .map(|i| {
                let mut s = ScalarSeries::var(n, self.order, i);
                for l in self.lambdas.iter().filter(|l| l.var == i) {
                    for (e, x) in l.series.terms() {
                        let mut full = vec![0; n];
                        full[..nt].copy_from_slice(e);
                        full[nt..].copy_from_slice(&l.theta);
                        s.add_term(full, x.clone());
                    }
                }
                s
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .lambdas
            .iter()
            .map(|l| {
                serde_json::json!({
                    "var": self.base_vars[l.var],
                    "theta": exp_json(&self.theta_vars, &l.theta),
                    "series": render_scalar(&l.series, &self.base_vars),
                })
            })
            .collect();
        serde_json::json!({
            "status": "pass",
            "unique": self.is_unique(),
            "kernel_dims": self.kernel_dims,
            "lambda": entries,
        })
    }
}

/// Finds a formal projection `φ` with `B ∘ φ = B′` degree by degree in `θ`.
/// The variables of `B′` are those of `B` (the `t`) plus extra ones (the `θ`).
pub fn formal_projection(base: &MatrixSeries, total: &MatrixSeries) -> Result<Projection> {
    if base.dim_f != total.dim_f {
        return Err(Error::Dimension("B and B′ act on different spaces".into()));
    }
    let nt = base.nvars();
    let pos: Vec<usize> = base
        .vars
        .iter()
        .map(|v| total.vars.iter().position(|w| w == v).ok_or_else(|| Error::Precondition(format!("variable '{v}' missing from B′"))))
        .collect::<Result<_>>()?;
    let theta_pos: Vec<usize> = (0..total.nvars()).filter(|i| !pos.contains(i)).collect();
    let theta_vars: Vec<String> = theta_pos.iter().map(|&i| total.vars[i].clone()).collect();
    let nth = theta_pos.len();
    let n = nt + nth;
    let order = base.order().min(total.order());
    // Reorder B′ so the t-variables come first.
    let perm: Vec<usize> = pos.iter().chain(&theta_pos).copied().collect();
    let mut bp = Series::zero(n, order);
    for (e, m) in total.series.terms() {
        bp.add_term(perm.iter().map(|&i| e[i]).collect(), m.clone());
    }
    let tpos: Vec<usize> = (0..nt).collect();
    if !bp.restrict_to(&tpos).agrees_through(&base.series, order) {
        return Err(Error::Precondition("B′ does not restrict to B at θ = 0".into()));
    }
    let derivs: Vec<Series<Mat>> = (0..nt).map(|j| base.series.derivative(j)).collect();
    let d = base.dim_f;
    let mut proj = Projection { base_vars: base.vars.clone(), theta_vars, order, lambdas: Vec::new(), kernel_dims: Vec::new() };
    for k in 1..=order {
        let subs = proj.substitutions();
        let composed = base.series.truncate(order).compose(&subs)?;
        let defect = bp.sub(&composed);
        let tdeg = order - k;
        let tmonos = monomials(nt, 0, tdeg);
        let tindex: BTreeMap<Vec<u32>, usize> = tmonos.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut kernel = 0;
        for mu in monomials(nth, k, k) {
            // Unknowns: coefficient of t^α in λ^j_μ, column j·|monos| + α.
            let ncols = nt * tmonos.len();
            let mut rows: BTreeMap<(usize, usize, usize), SparseVec> = BTreeMap::new();
            for j in 0..nt {
                for (ai, alpha) in tmonos.iter().enumerate() {
                    for (beta, m) in derivs[j].terms() {
                        let gamma: Vec<u32> = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
                        let Some(&gi) = tindex.get(&gamma) else { continue };
                        for r in 0..d {
                            for c in 0..d {
                                let x = m.get(r, c);
                                if !x.is_zero() {
                                    let row = rows.entry((gi, r, c)).or_default();
                                    *row.entry(j * tmonos.len() + ai).or_insert_with(Q::zero) += x;
                                }
                            }
                        }
                    }
                }
            }
            let mut rhs: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
            for (e, m) in defect.terms() {
                if e[nt..] != mu[..] {
                    continue;
                }
                let Some(&gi) = tindex.get(&e[..nt].to_vec()) else { continue };
                for r in 0..d {
                    for c in 0..d {
                        if !m.get(r, c).is_zero() {
                            rhs.insert((gi, r, c), m.get(r, c).clone());
                        }
                    }
                }
            }
            let mut system: Vec<(SparseVec, Q)> = Vec::new();
            for key in rows.keys().chain(rhs.keys()).collect::<std::collections::BTreeSet<_>>() {
                let row = rows.get(key).cloned().unwrap_or_default();
                let b = rhs.get(key).cloned().unwrap_or_else(Q::zero);
                system.push((row.into_iter().filter(|(_, x)| !x.is_zero()).collect(), b));
            }
            let sol = solve_sparse(ncols, &system).map_err(|_| {
                Error::Inconsistent(format!("θ-degree {k} defect is not in the span of the ∂B (θ exponent {mu:?})"))
            })?;
            kernel += sol.kernel.len();
            for j in 0..nt {
                let mut s = ScalarSeries::zero(nt, tdeg);
                for (ai, alpha) in tmonos.iter().enumerate() {
                    s.add_term(alpha.clone(), sol.particular[j * tmonos.len() + ai].clone());
                }
                if !s.is_zero() {
                    proj.lambdas.push(LambdaTerm { var: j, theta: mu.clone(), series: s });
                }
            }
        }
        proj.kernel_dims.push(kernel);
    }
    let check = base.series.truncate(order).compose(&proj.substitutions())?;
    if !check.agrees_through(&bp, order) {
        return Err(Error::Inconsistent("B′ is not a pullback of B through the requested order".into()));
    }
    Ok(proj)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Strict,
    MaximalNotStrict,
    NotMaximal,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalityReport {
    pub verdict: Verdict,
    /// The test at `t = 0` alone.
    pub degree_zero: Verdict,
    pub tested_degree: u32,
    pub centralizer_dim: usize,
    pub span_dim: usize,
}

struct Truncated {
    verdict: Verdict,
    centralizer: usize,
    span: usize,
}

fn maximality_at(derivs: &[Series<Mat>], nvars: usize, d: usize, deg: u32) -> Truncated {
    let monos = monomials(nvars, 0, deg);
    let index: BTreeMap<Vec<u32>, usize> = monos.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let cell = |gi: usize, r: usize, c: usize| (gi * d + r) * d + c;
    let ncols = monos.len() * d * d;
    // Coefficient vector of t^α·b, truncated at `deg`.
    let shifted = |b: &Series<Mat>, alpha: &[u32]| -> SparseVec {
        let mut v = SparseVec::new();
        for (beta, m) in b.terms() {
            let gamma: Vec<u32> = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
            let Some(&gi) = index.get(&gamma) else { continue };
            for r in 0..d {
                for c in 0..d {
                    if !m.get(r, c).is_zero() {
                        *v.entry(cell(gi, r, c)).or_insert_with(Q::zero) += m.get(r, c);
                    }
                }
            }
        }
        v.retain(|_, x| !x.is_zero());
        v
    };
    // Span of t^α b_i, truncated.
    let mut span = Echelon::new(ncols);
    let mut free = true;
    for b in derivs {
        for alpha in &monos {
            let v = shifted(b, alpha);
            if !span.insert(v) {
                free = false;
            }
        }
    }
    // Centralizer: c(t) with [c, b_i] ≡ 0 through degree `deg`.
    let mut rows: BTreeMap<(usize, usize, usize, usize), SparseVec> = BTreeMap::new();
    for (i, b) in derivs.iter().enumerate() {
        for (ai, alpha) in monos.iter().enumerate() {
            for (beta, m) in b.terms() {
                let gamma: Vec<u32> = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
                let Some(&gi) = index.get(&gamma) else { continue };
                // ([E_pq, m])_{rc} contributions from unknown c_α[p][q].
                for p in 0..d {
                    for qq in 0..d {
                        let col = cell(ai, p, qq);
                        for c in 0..d {
                            let x = m.get(qq, c);
                            if !x.is_zero() {
                                *rows.entry((i, gi, p, c)).or_default().entry(col).or_insert_with(Q::zero) += x;
                            }
                        }
                        for r in 0..d {
                            let x = m.get(r, p);
                            if !x.is_zero() {
                                *rows.entry((i, gi, r, qq)).or_default().entry(col).or_insert_with(Q::zero) -= x;
                            }
                        }
                    }
                }
            }
        }
    }
    let system: Vec<(SparseVec, Q)> =
        rows.into_values().map(|r| (r.into_iter().filter(|(_, x)| !x.is_zero()).collect(), Q::zero())).collect();
    let centralizer = solve_sparse(ncols, &system).expect("homogeneous systems are consistent").kernel;
    let span_dim = span.rank();
    // The span lies in the centralizer iff adding the span does not raise its rank.
    let mut both = Echelon::new(ncols);
    for k in &centralizer {
        both.insert(k.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect());
    }
    let zdim = both.rank();
    let mut contains = true;
    for b in derivs {
        for alpha in &monos {
            let v = shifted(b, alpha);
            if both.insert(v) {
                contains = false;
            }
        }
    }
    let verdict = if !contains || zdim != span_dim {
        Verdict::NotMaximal
    } else if free {
        Verdict::Strict
    } else {
        Verdict::MaximalNotStrict
    };
    Truncated { verdict, centralizer: zdim, span: span_dim }
}

/// Compares the centralizer of the `b_i = ∂_i B` with their span over
/// scalar series, both truncated at degree `min(order, N − 1)`. A passing
/// test below degree `N − 1` is reported as inconclusive.
pub fn check_maximality(b: &MatrixSeries, order: u32) -> MaximalityReport {
    let n = b.nvars();
    let top = b.order().saturating_sub(1);
    let deg = order.min(top);
    let derivs: Vec<Series<Mat>> = (0..n).map(|i| b.series.derivative(i)).collect();
    let full = maximality_at(&derivs, n, b.dim_f, deg);
    let zero = maximality_at(&derivs, n, b.dim_f, 0);
    let verdict = if full.verdict != Verdict::NotMaximal && order < top { Verdict::Inconclusive } else { full.verdict };
    MaximalityReport { verdict, degree_zero: zero.verdict, tested_degree: deg, centralizer_dim: full.centralizer, span_dim: full.span }
}
