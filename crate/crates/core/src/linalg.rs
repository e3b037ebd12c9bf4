//! Exact linear algebra over [`Q`]: a sparse incremental echelon form used for
//! the relation matrices, and a small dense matrix type used for correlators
//! and series coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};

/// Sparse vector keyed by column.
pub type SparseVec = BTreeMap<usize, Q>;

/// Row echelon form built one row at a time.
///
/// Each stored row has leading coefficient one at its pivot column and no
/// entries to the left of it. The set of pivot columns does not depend on the
/// insertion order: it is the set of leading columns of the row space.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    rows: BTreeMap<usize, Vec<(usize, Q)>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduces `v` in place until no pivot column remains in its support.
    pub fn reduce(&self, v: &mut SparseVec) {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(c, _)| *c).find(|c| self.rows.contains_key(c));
            let Some(col) = next else { break };
            let coef = v.remove(&col).expect("present");
            let row = &self.rows[&col];
            for (c, x) in row.iter().skip(1) {
                let entry = v.entry(*c).or_insert_with(Q::zero);
                *entry -= &coef * x;
                if entry.is_zero() {
                    v.remove(c);
                }
            }
            cursor = col + 1;
        }
    }

    /// Adds a row; returns `true` when it raised the rank.
    pub fn insert(&mut self, mut v: SparseVec) -> bool {
        self.reduce(&mut v);
        let Some((&lead, lead_coef)) = v.iter().next() else { return false };
        let inv = Q::one() / lead_coef;
        let row: Vec<(usize, Q)> = v.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        debug_assert!(lead < self.ncols);
        self.rows.insert(lead, row);
        true
    }

    /// Fully reduced rows, keyed by pivot column.
    pub fn rref_rows(&self) -> BTreeMap<usize, SparseVec> {
        let mut out: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut v: SparseVec = row.iter().skip(1).cloned().collect();
            let later: Vec<usize> = v.keys().copied().filter(|c| out.contains_key(c)).collect();
            for c in later {
                let coef = v.remove(&c).expect("present");
                for (cc, x) in &out[&c] {
                    let entry = v.entry(*cc).or_insert_with(Q::zero);
                    *entry -= &coef * x;
                    if entry.is_zero() {
                        v.remove(cc);
                    }
                }
            }
            out.insert(p, v);
        }
        out
    }
}

/// Solution of a linear system: one particular solution (free variables set to
/// zero) and a basis of the homogeneous solution space.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution {
    pub particular: Vec<Q>,
    pub kernel: Vec<Vec<Q>>,
}

/// Solves `A x = b` where `A` is given as sparse rows over `ncols` unknowns.
pub fn solve_sparse(ncols: usize, rows: &[(SparseVec, Q)]) -> Result<AffineSolution> {
    let mut ech = Echelon::new(ncols + 1);
    for (r, rhs) in rows {
        let mut v = r.clone();
        if !rhs.is_zero() {
            v.insert(ncols, rhs.clone());
        }
        ech.insert(v);
    }
    if ech.is_pivot(ncols) {
        return Err(Error::Inconsistent("right-hand side outside the column span".into()));
    }
    let rref = ech.rref_rows();
    let mut particular = vec![Q::zero(); ncols];
    for (&p, row) in &rref {
        if let Some(x) = row.get(&ncols) {
            particular[p] = x.clone();
        }
    }
    let mut kernel = Vec::new();
    for free in (0..ncols).filter(|c| !rref.contains_key(c)) {
        let mut k = vec![Q::zero(); ncols];
        k[free] = Q::one();
        for (&p, row) in &rref {
            if let Some(x) = row.get(&free) {
                k[p] = -x.clone();
            }
        }
        kernel.push(k);
    }
    Ok(AffineSolution { particular, kernel })
}

/// Dense matrix with rational entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|c| fmt_q(self.get(r, c))).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    /// The matrix unit `E_{rc}` of size `n`.
    pub fn unit(n: usize, r: usize, c: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        m.set(r, c, Q::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(entries: &[Q]) -> Self {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Q) {
        self.data[r * self.cols + c] = x;
    }

    pub fn entries(&self) -> &[Q] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Mat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Mat, c: &Q) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Kronecker product; row `(i1, i2)` of the result is `i1 * rows2 + i2`.
    pub fn kron(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let b = other.get(r2, c2);
                        if !b.is_zero() {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else { continue };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = Q::one() / m.get(row, col);
            for c in 0..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let f = m.get(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.get(r, c) - &f * m.get(row, c);
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Q::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut out = Mat::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, red.get(r, n + c).clone());
            }
        }
        Some(out)
    }

    /// Basis of `{x : self x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (red, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut k = vec![Q::zero(); self.cols];
            k[free] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                k[p] = -red.get(r, free).clone();
            }
            out.push(k);
        }
        out
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| fmt_q(self.get(r, c))).collect()).collect()
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<Mat> {
        let parsed: Result<Vec<Vec<Q>>> =
            rows.iter().map(|r| r.iter().map(|s| parse_q(s)).collect()).collect();
        Mat::from_rows(parsed?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(c, x)| (c, q(x))).collect()
    }

    #[test]
    fn echelon_pivots_are_order_independent() {
        let rows = [sv(&[(0, 1), (1, -1)]), sv(&[(1, 1), (2, -1)]), sv(&[(0, 1), (2, -1)])];
        let mut a = Echelon::new(3);
        let mut b = Echelon::new(3);
        for r in &rows {
            a.insert(r.clone());
        }
        for r in rows.iter().rev() {
            b.insert(r.clone());
        }
        assert_eq!(a.rank(), 2);
        assert_eq!(a.pivots().collect::<Vec<_>>(), b.pivots().collect::<Vec<_>>());
        let mut v = sv(&[(0, 3)]);
        let mut w = v.clone();
        a.reduce(&mut v);
        b.reduce(&mut w);
        assert_eq!(v, w);
        assert_eq!(v, sv(&[(2, 3)]));
    }

    #[test]
    fn sparse_solve_reports_kernel_and_inconsistency() {
        let rows = vec![(sv(&[(0, 1), (1, 1)]), q(2))];
        let sol = solve_sparse(2, &rows).unwrap();
        assert_eq!(sol.particular, vec![q(2), q(0)]);
        assert_eq!(sol.kernel, vec![vec![q(-1), q(1)]]);
        let bad = vec![(sv(&[(0, 1)]), q(1)), (sv(&[(0, 2)]), q(3))];
        assert!(solve_sparse(1, &bad).is_err());
    }

    #[test]
    fn dense_inverse_and_kron() {
        let m = Mat::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
        let k = Mat::identity(2).kron(&Mat::unit(2, 0, 1));
        assert_eq!(k.get(0, 1), &q(1));
        assert_eq!(k.get(2, 3), &q(1));
        assert_eq!(k.rank(), 2);
        assert!(Mat::zeros(2, 2).inverse().is_none());
    }

    #[test]
    fn commutator_of_matrix_units() {
        let e11 = Mat::unit(2, 0, 0);
        let e12 = Mat::unit(2, 0, 1);
        assert_eq!(e11.commutator(&e12), e12);
    }
}
