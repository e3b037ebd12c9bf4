//! Brute-force oracles shared by the integration tests. Everything here is
//! written directly from the definitions with bitmasks and plain loops, and
//! only borrows the library's rationals and echelon form.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use painted_operad::lalgebra::{random_unimodular, LAlgebra};
use painted_operad::linalg::{Echelon, Mat, SparseVec};
use painted_operad::rational::q;
use painted_operad::series::{monomials, MatrixSeries, ScalarSeries, Series, VectorFieldSeries};
use painted_operad::trees::PaintedSet;
use painted_operad::Q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Painted set with whites at bits `0..whites` and blacks after them.
#[derive(Clone, Copy, Debug)]
pub struct Set {
    pub whites: usize,
    pub blacks: usize,
}

impl Set {
    pub fn new(whites: usize, blacks: usize) -> Self {
        Set { whites, blacks }
    }

    pub fn n(&self) -> usize {
        self.whites + self.blacks
    }

    pub fn full(&self) -> u64 {
        (1u64 << self.n()) - 1
    }

    pub fn white_mask(&self) -> u64 {
        (1u64 << self.whites) - 1
    }

    pub fn is_white(&self, p: usize) -> bool {
        p < self.whites
    }

    /// A part is admissible if it has two labels and a white one.
    fn good_part(&self, part: u64) -> bool {
        part.count_ones() >= 2 && part & self.white_mask() != 0
    }

    /// Stable 2-partitions, each named by its part containing label 0.
    pub fn stable_partitions(&self) -> Vec<u64> {
        let full = self.full();
        (1..full).filter(|&p| p & 1 == 1 && self.good_part(p) && self.good_part(full & !p)).collect()
    }

    /// Number of nonempty pairwise intersections minus two.
    pub fn delta(&self, a: u64, b: u64) -> i32 {
        let full = self.full();
        let (a2, b2) = (full & !a, full & !b);
        [a & b, a & b2, a2 & b, a2 & b2].iter().filter(|&&x| x != 0).count() as i32 - 2
    }

    pub fn same_side(part: u64, x: usize, y: usize) -> bool {
        (part >> x & 1) == (part >> y & 1)
    }

    /// `+1` if `ij|kl`, `-1` if `kj|il`, else `0`.
    pub fn epsilon(part: u64, i: usize, j: usize, k: usize, l: usize) -> i32 {
        let s = |x, y| Self::same_side(part, x, y);
        if s(i, j) && s(k, l) && !s(i, k) {
            1
        } else if s(k, j) && s(i, l) && !s(i, k) {
            -1
        } else {
            0
        }
    }

    pub fn allowed(&self, i: usize, j: usize, k: usize, l: usize) -> bool {
        (self.is_white(j) && self.is_white(l)) || (self.is_white(i) && self.is_white(k))
    }
}

/// Trees counted by edges (index = number of edges): sets of stable
/// partitions with pairwise `δ = 1`, grown by increasing index.
pub fn tree_counts(s: Set) -> Vec<usize> {
    let parts = s.stable_partitions();
    let mut counts = vec![0usize];
    fn grow(s: Set, parts: &[u64], start: usize, chosen: &mut Vec<u64>, counts: &mut Vec<usize>) {
        if chosen.len() >= counts.len() {
            counts.resize(chosen.len() + 1, 0);
        }
        counts[chosen.len()] += 1;
        for i in start..parts.len() {
            if chosen.iter().all(|&c| s.delta(c, parts[i]) == 1) {
                chosen.push(parts[i]);
                grow(s, parts, i + 1, chosen, counts);
                chosen.pop();
            }
        }
    }
    grow(s, &parts, 0, &mut Vec::new(), &mut counts);
    counts
}

/// Linear forms `R_ijkl` over all allowed ordered quadruples of distinct
/// labels, as sparse rows over the generator indices.
pub fn linear_relations(s: Set, gens: &[u64]) -> Vec<BTreeMap<usize, i64>> {
    let n = s.n();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let d = [i, j, k, l];
                    if d.iter().collect::<BTreeSet<_>>().len() < 4 || !s.allowed(i, j, k, l) {
                        continue;
                    }
                    let mut row = BTreeMap::new();
                    for (g, &p) in gens.iter().enumerate() {
                        let e = Set::epsilon(p, i, j, k, l) as i64;
                        if e != 0 {
                            row.insert(g, e);
                        }
                    }
                    if !row.is_empty() {
                        out.insert(row.into_iter().collect::<Vec<_>>());
                    }
                }
            }
        }
    }
    out.into_iter().map(|r| r.into_iter().collect()).collect()
}

fn multisets(ngen: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(ngen: usize, d: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for g in start..ngen {
            cur.push(g);
            rec(ngen, d, g, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(ngen, d, 0, &mut Vec::new(), &mut out);
    out
}

/// A basis of the span of the linear forms, so the ideal expansion below
/// multiplies each independent generator only once.
fn independent(rows: &[BTreeMap<usize, i64>], ngen: usize) -> Vec<SparseVec> {
    let mut ech = Echelon::new(ngen);
    for r in rows {
        ech.insert(r.iter().map(|(&g, &c)| (g, Q::from_integer(c.into()))).collect());
    }
    ech.rref_rows()
        .into_iter()
        .map(|(pivot, mut v)| {
            v.insert(pivot, Q::one());
            v
        })
        .collect()
}

/// Dimensions of `Q[l_σ] / (R_ijkl, l_σ l_τ for δ(σ,τ) = 2)` in degrees
/// `0..=max_degree`, by expanding the ideal over all monomials.
pub fn quotient_dims(s: Set, max_degree: usize) -> Vec<usize> {
    let gens = s.stable_partitions();
    let lin = independent(&linear_relations(s, &gens), gens.len());
    let mut quad = Vec::new();
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            if s.delta(gens[a], gens[b]) == 2 {
                quad.push((a, b));
            }
        }
    }
    let mut dims = Vec::new();
    for d in 0..=max_degree {
        let monos = multisets(gens.len(), d);
        let index: BTreeMap<Vec<usize>, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let key = |mut m: Vec<usize>| {
            m.sort_unstable();
            index[&m]
        };
        let mut ech = Echelon::new(monos.len());
        if d >= 1 {
            for m in multisets(gens.len(), d - 1) {
                for r in &lin {
                    let mut v = SparseVec::new();
                    for (&g, c) in r {
                        let mut mm = m.clone();
                        mm.push(g);
                        *v.entry(key(mm)).or_insert_with(Q::zero) += c;
                    }
                    v.retain(|_, x| !x.is_zero());
                    ech.insert(v);
                }
            }
        }
        if d >= 2 {
            for m in multisets(gens.len(), d - 2) {
                for &(a, b) in &quad {
                    let mut mm = m.clone();
                    mm.push(a);
                    mm.push(b);
                    let mut v = SparseVec::new();
                    v.insert(key(mm), Q::one());
                    ech.insert(v);
                }
            }
        }
        dims.push(monos.len() - ech.rank());
    }
    dims
}

/// The quadratic relation of an L-algebra written over ordered argument
/// positions: arguments `args` (index list) plus `i` and `k`, summing over
/// all subsets `A` of the positions of `args` that go with `i`.
pub fn ordered_defect(l: &LAlgebra, args: &[usize], i: usize, k: usize) -> Mat {
    let d = l.dim_f();
    let mut acc = Mat::zeros(d, d);
    let n = args.len();
    for mask in 0u32..(1 << n) {
        let mut first: Vec<usize> = vec![];
        let mut second: Vec<usize> = vec![];
        for (p, &a) in args.iter().enumerate() {
            if mask >> p & 1 == 1 {
                first.push(a);
            } else {
                second.push(a);
            }
        }
        let get = |idx: &[usize], extra: usize| {
            let mut v = idx.to_vec();
            v.push(extra);
            l.get(&l.exponent_of(&v))
        };
        acc.add_assign(&get(&first, i).mul(&get(&second, k)));
        acc.add_assign(&get(&first, k).mul(&get(&second, i)).neg());
    }
    acc
}

/// Every ring-ready painted set (two whites, at least three labels) with
/// `min..=max` labels.
pub fn painted_sets(min: usize, max: usize) -> Vec<PaintedSet> {
    let mut out = Vec::new();
    for n in min.max(3)..=max {
        for w in 2..=n {
            out.push(PaintedSet::new(w as u32, (n - w) as u32).unwrap());
        }
    }
    out
}

pub fn oracle_set(s: PaintedSet) -> Set {
    Set::new(s.whites() as usize, s.blacks() as usize)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(rng: &mut ChaCha8Rng, r: i64) -> Q {
    q(rng.gen_range(-r..=r))
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random polynomial with monomials of degree `min..=max`, each present
/// with probability one half.
pub fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, min: u32, max: u32, order: u32) -> ScalarSeries {
    let mut p = ScalarSeries::zero(nvars, order);
    for e in monomials(nvars, min, max) {
        if rng.gen_bool(0.5) {
            let c = small(rng, 3);
            p.add_term(e, c);
        }
    }
    p
}

/// `A⁰ = t0²/2 + F(t1, …)`, `Aⁱ = t0·tⁱ`: `∂0` is a flat identity; the
/// family is associative for two coordinates.
pub fn t0_family(seed: u64, n: usize, order: u32) -> VectorFieldSeries {
    let mut rng = rng(seed);
    let t0 = ScalarSeries::var(n, order, 0);
    let rest = random_poly(&mut rng, n - 1, 3, order, order).embed(n, &(1..n).collect::<Vec<_>>());
    let mut comps = vec![t0.mul(&t0).scale(&painted_operad::rational::qr(1, 2)).add(&rest)];
    for i in 1..n {
        comps.push(t0.mul(&ScalarSeries::var(n, order, i)));
    }
    VectorFieldSeries::new(names("t", n), comps).unwrap()
}

/// `Aᵏ = p_k(u_k)` in coordinates `u = P⁻¹ t`, pushed back to `t`. The
/// multiplication is diagonal in `u`, hence associative.
pub fn semisimple(seed: u64, n: usize, order: u32) -> VectorFieldSeries {
    let mut rng = rng(seed);
    let (p, pinv) = random_unimodular(&mut rng, n);
    let u: Vec<ScalarSeries> = (0..n)
        .map(|k| {
            (0..n).fold(ScalarSeries::zero(n, order), |acc, j| acc.add(&ScalarSeries::var(n, order, j).scale(pinv.get(k, j))))
        })
        .collect();
    let in_u: Vec<ScalarSeries> = (0..n)
        .map(|k| random_poly(&mut rng, 1, 2, order, order).compose(&[u[k].clone()]).unwrap())
        .collect();
    let comps = (0..n)
        .map(|c| (0..n).fold(ScalarSeries::zero(n, order), |acc, k| acc.add(&in_u[k].scale(p.get(c, k)))))
        .collect();
    VectorFieldSeries::new(names("t", n), comps).unwrap()
}

/// Components with random monomials of degree `2..=order`.
pub fn random_field(seed: u64, n: usize, order: u32) -> VectorFieldSeries {
    let mut rng = rng(seed);
    let comps = (0..n).map(|_| random_poly(&mut rng, n, 2, order, order)).collect();
    VectorFieldSeries::new(names("t", n), comps).unwrap()
}

/// A random matrix series without constant term over `vars`.
pub fn random_matrix_series(seed: u64, vars: Vec<String>, dim_t: usize, dim_f: usize, order: u32) -> MatrixSeries {
    let mut rng = rng(seed);
    let mut s = Series::zero(vars.len(), order);
    for e in monomials(vars.len(), 1, order) {
        if rng.gen_bool(0.6) {
            let rows = (0..dim_f).map(|_| (0..dim_f).map(|_| small(&mut rng, 2)).collect()).collect();
            s.add_term(e, Mat::from_rows(rows).unwrap());
        }
    }
    MatrixSeries::new(vars, dim_t, dim_f, s).unwrap()
}

/// The series with the given `(exponent, matrix)` terms.
pub fn matrix_series(vars: &[&str], dim_t: usize, order: u32, terms: &[(&[u32], Mat)]) -> MatrixSeries {
    let dim_f = terms.first().map_or(1, |(_, m)| m.rows());
    let mut s = Series::zero(vars.len(), order);
    for (e, m) in terms {
        s.add_term(e.to_vec(), m.clone());
    }
    MatrixSeries::new(vars.iter().map(|v| v.to_string()).collect(), dim_t, dim_f, s).unwrap()
}
