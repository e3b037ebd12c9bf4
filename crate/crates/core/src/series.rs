//! Multivariate power series truncated by total degree, with scalar or
//! square-matrix coefficients.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rational::{fmt_q, parse_q, Q};

/// Coefficient ring of a [`Series`].
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn is_zero_coeff(&self) -> bool;
    fn add_to(&mut self, other: &Self);
    fn scaled(&self, c: &Q) -> Self;
    fn times(&self, other: &Self) -> Self;
}

impl Coeff for Q {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_to(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, c: &Q) -> Self {
        self * c
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for Mat {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_to(&mut self, other: &Self) {
        self.add_assign(other);
    }
    fn scaled(&self, c: &Q) -> Self {
        self.scale(c)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

/// Total degree of an exponent vector.
pub fn degree(exp: &[u32]) -> u32 {
    exp.iter().sum()
}

/// All exponent vectors in `nvars` variables with total degree in
/// `min..=max`, ordered by degree, then lexicographically.
pub fn monomials(nvars: usize, min: u32, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in min..=max {
        let mut cur = vec![0u32; nvars];
        fill(&mut cur, 0, d, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if i == cur.len() {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for x in (0..=left).rev() {
        cur[i] = x;
        fill(cur, i + 1, left - x, out);
    }
    cur[i] = 0;
}

/// Product of the factorials of the exponents.
pub fn exp_factorial(exp: &[u32]) -> Q {
    exp.iter().map(|&e| crate::rational::factorial(e)).product()
}

/// A power series in `nvars` variables known through total degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C: Coeff> {
    nvars: usize,
    order: u32,
    terms: BTreeMap<Vec<u32>, C>,
}

pub type ScalarSeries = Series<Q>;

impl<C: Coeff> Series<C> {
    pub fn zero(nvars: usize, order: u32) -> Self {
        Series { nvars, order, terms: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> Option<&C> {
        self.terms.get(exp)
    }

    /// Adds `c·x^exp`; terms above the order are dropped.
    pub fn add_term(&mut self, exp: Vec<u32>, c: C) {
        assert_eq!(exp.len(), self.nvars, "exponent length mismatch");
        if degree(&exp) > self.order || c.is_zero_coeff() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_to(&c);
                if e.get().is_zero_coeff() {
                    e.remove();
                }
            }
        }
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.terms.get(&vec![0; self.nvars])
    }

    /// Drops everything above degree `order` and lowers the recorded order.
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let terms = self.terms.iter().filter(|(e, _)| degree(e) <= order).map(|(e, c)| (e.clone(), c.clone())).collect();
        Series { nvars: self.nvars, order, terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.truncate(other.order);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Series::zero(self.nvars, self.order);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.scaled(c));
        }
        out
    }

    /// Truncated product; the result is known through the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_to(other, self.order.min(other.order))
    }

    /// Product computed only through degree `order`.
    pub fn mul_to(&self, other: &Self, order: u32) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Series::zero(self.nvars, order);
        for (ea, a) in &self.terms {
            let da = degree(ea);
            if da > order {
                continue;
            }
            for (eb, b) in &other.terms {
                if da + degree(eb) > order {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, a.times(b));
            }
        }
        out
    }

    /// `∂/∂x_i`; the result is known through one degree less.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Series::zero(self.nvars, self.order.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.scaled(&Q::from_integer(e[i].into())));
        }
        out
    }

    /// Multiplies every coefficient by a scalar series.
    pub fn scalar_mul(&self, s: &ScalarSeries) -> Self {
        assert_eq!(self.nvars, s.nvars, "variable count mismatch");
        let order = self.order.min(s.order);
        let mut out = Series::zero(self.nvars, order);
        for (ea, a) in &s.terms {
            for (eb, b) in &self.terms {
                if degree(ea) + degree(eb) > order {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, b.scaled(a));
            }
        }
        out
    }

    /// Substitutes `x_j ↦ subs[j]`; every substituted series must have zero
    /// constant term.
    pub fn compose(&self, subs: &[ScalarSeries]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::Dimension(format!("{} substitutions for {} variables", subs.len(), self.nvars)));
        }
        let Some(first) = subs.first() else { return Ok(self.clone()) };
        let target = first.nvars;
        if subs.iter().any(|s| s.nvars != target) {
            return Err(Error::Dimension("substitutions live in different variable sets".into()));
        }
        if subs.iter().any(|s| s.constant_term().is_some()) {
            return Err(Error::ConstantTerm);
        }
        let order = subs.iter().map(|s| s.order).min().unwrap_or(0).min(self.order);
        let mut powers: HashMap<(usize, u32), ScalarSeries> = HashMap::new();
        let mut out = Series::zero(target, order);
        for (e, c) in &self.terms {
            if degree(e) > order {
                continue;
            }
            let mut prod = ScalarSeries::one(target, order);
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = power(&mut powers, &subs[j], j, k, order);
                prod = prod.mul_to(&p, order);
            }
            for (pe, pc) in &prod.terms {
                out.add_term(pe.clone(), c.scaled(pc));
            }
        }
        Ok(out)
    }

    /// Sets the listed variables to zero and removes them.
    pub fn restrict_to(&self, keep: &[usize]) -> Self {
        let mut out = Series::zero(keep.len(), self.order);
        for (e, c) in &self.terms {
            let dropped = (0..self.nvars).any(|i| !keep.contains(&i) && e[i] != 0);
            if !dropped {
                out.add_term(keep.iter().map(|&i| e[i]).collect(), c.clone());
            }
        }
        out
    }

    /// Re-embeds into `nvars` variables, variable `i` going to `positions[i]`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Self {
        let mut out = Series::zero(nvars, self.order);
        for (e, c) in &self.terms {
            let mut e2 = vec![0u32; nvars];
            for (i, &p) in positions.iter().enumerate() {
                e2[p] = e[i];
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut out = Series::zero(self.nvars, self.order);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Equality of the parts through degree `order`.
    pub fn agrees_through(&self, other: &Self, order: u32) -> bool {
        self.truncate(order).terms == other.truncate(order).terms
    }
}

fn power(cache: &mut HashMap<(usize, u32), ScalarSeries>, s: &ScalarSeries, j: usize, k: u32, order: u32) -> ScalarSeries {
    if let Some(p) = cache.get(&(j, k)) {
        return p.clone();
    }
    let p = if k == 1 { s.truncate(order) } else { power(cache, s, j, k - 1, order).mul_to(s, order) };
    cache.insert((j, k), p.clone());
    p
}

impl ScalarSeries {
    pub fn one(nvars: usize, order: u32) -> Self {
        ScalarSeries::constant(nvars, order, Q::from_integer(1.into()))
    }

    pub fn constant(nvars: usize, order: u32, c: Q) -> Self {
        let mut s = Series::zero(nvars, order);
        s.add_term(vec![0; nvars], c);
        s
    }

    pub fn var(nvars: usize, order: u32, i: usize) -> Self {
        let mut s = Series::zero(nvars, order);
        let mut e = vec![0; nvars];
        e[i] = 1;
        s.add_term(e, Q::from_integer(1.into()));
        s
    }

    /// Multiplies by a constant matrix.
    pub fn times_matrix(&self, m: &Mat) -> Series<Mat> {
        self.map_coeffs(|c| m.scale(c))
    }
}

impl Series<Mat> {
    /// Applies every coefficient to a constant vector, one scalar series per entry.
    pub fn apply(&self, v: &[Q]) -> Vec<ScalarSeries> {
        let n = v.len();
        let mut out = vec![ScalarSeries::zero(self.nvars, self.order); n];
        for (e, m) in &self.terms {
            let w = m.mul_vec(v);
            for (r, x) in w.into_iter().enumerate() {
                out[r].add_term(e.clone(), x);
            }
        }
        out
    }

    /// Entry `(r, c)` as a scalar series.
    pub fn entry(&self, r: usize, c: usize) -> ScalarSeries {
        self.map_coeffs(|m| m.get(r, c).clone())
    }
}

/// One term of the JSON series encoding: exponents keyed by variable name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixTermJson {
    pub exp: BTreeMap<String, u32>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarTermJson {
    pub exp: BTreeMap<String, u32>,
    pub coeff: String,
}

/// JSON encoding of a matrix series. The first `dimT` variables are the
/// even directions of `T`; the remaining ones are coordinates on `F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSeriesJson {
    pub vars: Vec<String>,
    pub order: u32,
    #[serde(rename = "dimF")]
    pub dim_f: usize,
    #[serde(rename = "dimT", default)]
    pub dim_t: usize,
    pub terms: Vec<MatrixTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorFieldJson {
    pub vars: Vec<String>,
    pub order: u32,
    pub components: Vec<Vec<ScalarTermJson>>,
}

fn exp_to_json(vars: &[String], e: &[u32]) -> BTreeMap<String, u32> {
    vars.iter().zip(e).filter(|(_, &k)| k > 0).map(|(v, &k)| (v.clone(), k)).collect()
}

fn exp_from_json(vars: &[String], m: &BTreeMap<String, u32>) -> Result<Vec<u32>> {
    let mut e = vec![0u32; vars.len()];
    for (name, &k) in m {
        let i = vars.iter().position(|v| v == name).ok_or_else(|| Error::Parse(format!("unknown variable '{name}'")))?;
        e[i] = k;
    }
    Ok(e)
}

fn check_vars(vars: &[String]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::VariableCollision(v.clone()));
        }
    }
    Ok(())
}

/// A matrix-valued series with named variables, the first `dim_t` of which
/// are `T`-directions.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSeries {
    pub vars: Vec<String>,
    pub dim_t: usize,
    pub dim_f: usize,
    pub series: Series<Mat>,
}

impl MatrixSeries {
    pub fn new(vars: Vec<String>, dim_t: usize, dim_f: usize, series: Series<Mat>) -> Result<Self> {
        check_vars(&vars)?;
        if series.nvars() != vars.len() || dim_t > vars.len() {
            return Err(Error::Dimension("variable list does not match the series".into()));
        }
        if series.terms().values().any(|m| m.rows() != dim_f || m.cols() != dim_f) {
            return Err(Error::Dimension(format!("coefficients must be {dim_f}x{dim_f}")));
        }
        Ok(MatrixSeries { vars, dim_t, dim_f, series })
    }

    pub fn order(&self) -> u32 {
        self.series.order()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn to_json(&self) -> MatrixSeriesJson {
        MatrixSeriesJson {
            vars: self.vars.clone(),
            order: self.series.order(),
            dim_f: self.dim_f,
            dim_t: self.dim_t,
            terms: self
                .series
                .terms()
                .iter()
                .map(|(e, m)| MatrixTermJson { exp: exp_to_json(&self.vars, e), matrix: m.to_strings() })
                .collect(),
        }
    }

    pub fn from_json(j: &MatrixSeriesJson) -> Result<Self> {
        check_vars(&j.vars)?;
        let mut s = Series::zero(j.vars.len(), j.order);
        for t in &j.terms {
            let e = exp_from_json(&j.vars, &t.exp)?;
            if degree(&e) > j.order {
                return Err(Error::Parse(format!("term of degree {} above order {}", degree(&e), j.order)));
            }
            s.add_term(e, Mat::from_strings(&t.matrix)?);
        }
        MatrixSeries::new(j.vars.clone(), j.dim_t, j.dim_f, s)
    }
}

/// A vector field `Σ_c A^c ∂_c` on the coordinates `vars`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSeries {
    pub vars: Vec<String>,
    pub components: Vec<ScalarSeries>,
}

impl VectorFieldSeries {
    pub fn new(vars: Vec<String>, components: Vec<ScalarSeries>) -> Result<Self> {
        check_vars(&vars)?;
        if components.len() != vars.len() || components.iter().any(|c| c.nvars() != vars.len()) {
            return Err(Error::Dimension("one component per coordinate is required".into()));
        }
        Ok(VectorFieldSeries { vars, components })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> u32 {
        self.components.iter().map(Series::order).min().unwrap_or(0)
    }

    pub fn to_json(&self) -> VectorFieldJson {
        VectorFieldJson {
            vars: self.vars.clone(),
            order: self.order(),
            components: self
                .components
                .iter()
                .map(|c| {
                    c.terms()
                        .iter()
                        .map(|(e, x)| ScalarTermJson { exp: exp_to_json(&self.vars, e), coeff: fmt_q(x) })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &VectorFieldJson) -> Result<Self> {
        let n = j.vars.len();
        let mut comps = Vec::with_capacity(n);
        for terms in &j.components {
            let mut s = ScalarSeries::zero(n, j.order);
            for t in terms {
                s.add_term(exp_from_json(&j.vars, &t.exp)?, parse_q(&t.coeff)?);
            }
            comps.push(s);
        }
        VectorFieldSeries::new(j.vars.clone(), comps)
    }
}

/// Renders a scalar series like `1 + t0^2/2`.
pub fn render_scalar(s: &ScalarSeries, vars: &[String]) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (e, c) in s.terms() {
        let mono: Vec<String> = vars
            .iter()
            .zip(e)
            .filter(|(_, &k)| k > 0)
            .map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
            .collect();
        let body = mono.join("*");
        let coeff = fmt_q(c);
        parts.push(match (body.is_empty(), coeff.as_str()) {
            (true, _) => coeff,
            (false, "1") => body,
            (false, "-1") => format!("-{body}"),
            _ => format!("{coeff}*{body}"),
        });
    }
    parts.join(" + ").replace("+ -", "- ")
}
