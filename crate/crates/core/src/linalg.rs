//! Exact sparse linear algebra over the rationals.
//!
//! Rows are cleared of denominators and eliminated fraction-free, kept
//! primitive by dividing out their content after every combination. Sparse
//! rows are inserted first. Elimination runs on checked `i64` and restarts on
//! big integers when a product overflows.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::Q;

pub type SparseVec = Vec<(usize, Q)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("subspace B is not contained in span(Z)")]
    NotContained,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("representatives are linearly dependent modulo the subspace")]
    Dependent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

fn clean(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, d)) if *j == i => *d += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Sparse vector from `(index, value)` pairs; merges duplicates, drops zeros.
pub fn sparse_vec(entries: impl IntoIterator<Item = (usize, Q)>) -> SparseVec {
    clean(entries.into_iter().collect())
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Q::one()));
        }
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j, Q::from_integer(x.into()))).collect())
            .collect();
        SparseMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        let data: Vec<SparseVec> = rows.into_iter().map(clean).collect();
        debug_assert!(data.iter().all(|r| r.iter().all(|(j, _)| *j < cols)));
        SparseMatrix { rows: data.len(), cols, data }
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut data = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, c) in col {
                if !c.is_zero() {
                    data[*i].push((j, c.clone()));
                }
            }
        }
        SparseMatrix { rows, cols: columns.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.data[i].iter().find(|(k, _)| *k == j).map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.cols, &self.data)
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn mul_vec(&self, v: &[(usize, Q)]) -> SparseVec {
        let dense: BTreeMap<usize, &Q> = v.iter().map(|(i, c)| (*i, c)).collect();
        let mut out = Vec::new();
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = Q::zero();
            for (j, c) in row {
                if let Some(x) = dense.get(j) {
                    acc += c * *x;
                }
            }
            if !acc.is_zero() {
                out.push((i, acc));
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let rows = self
            .data
            .iter()
            .map(|r| {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (k, a) in r {
                    for (j, b) in &other.data[*k] {
                        *acc.entry(*j).or_insert_with(Q::zero) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: other.cols, data: rows }
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> SparseMatrix {
        SparseMatrix { rows: keep.len(), cols: self.cols, data: keep.iter().map(|&i| self.data[i].clone()).collect() }
    }

    /// Keeps only the listed columns, renumbered in the given order.
    pub fn select_cols(&self, keep: &[usize]) -> SparseMatrix {
        let pos: std::collections::HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &j)| (j, a)).collect();
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut v: SparseVec = r.iter().filter_map(|(j, c)| pos.get(j).map(|&a| (a, c.clone()))).collect();
                v.sort_by_key(|(a, _)| *a);
                v
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: keep.len(), data }
    }

    pub fn rank(&self) -> usize {
        echelon(&self.data, false).pivots.len()
    }

    pub fn rref(&self) -> Rref {
        echelon(&self.data, true)
    }

    /// Canonical kernel basis: one vector per free column of the reduced
    /// echelon form.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.rref().kernel_basis(self.cols)
    }

    /// A vector `w` with `self · w = b`, or `None` when `b` is not in the image.
    pub fn image_membership(&self, b: &[(usize, Q)]) -> Option<SparseVec> {
        let mut rows = self.data.clone();
        for (i, c) in b {
            if !c.is_zero() {
                rows[*i].push((self.cols, c.clone()));
            }
        }
        let r = echelon(&rows, true);
        let mut w = Vec::new();
        for (p, row) in r.pivots.iter().zip(&r.rows) {
            if *p == self.cols {
                return None;
            }
            if let Some((_, c)) = row.iter().find(|(j, _)| *j == self.cols) {
                w.push((*p, c.clone()));
            }
        }
        Some(clean(w))
    }
}

/// Reduced row echelon form: pivot columns ascending, rows with pivot entry 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub pivots: Vec<usize>,
    pub rows: Vec<SparseVec>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn kernel_basis(&self, cols: usize) -> Vec<SparseVec> {
        let is_pivot: std::collections::HashSet<usize> = self.pivots.iter().copied().collect();
        let mut out = Vec::new();
        for f in (0..cols).filter(|c| !is_pivot.contains(c)) {
            let mut v = vec![(f, Q::one())];
            for (p, row) in self.pivots.iter().zip(&self.rows) {
                if let Some((_, c)) = row.iter().find(|(j, _)| *j == f) {
                    v.push((*p, -c.clone()));
                }
            }
            out.push(clean(v));
        }
        out
    }

    /// Reduces `v` modulo the row space; the result vanishes on pivot columns.
    pub fn reduce(&self, v: &[(usize, Q)]) -> SparseVec {
        let mut acc: BTreeMap<usize, Q> = v.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
        for (p, row) in self.pivots.iter().zip(&self.rows) {
            let Some(c) = acc.get(p).cloned() else { continue };
            for (j, x) in row {
                let e = acc.entry(*j).or_insert_with(Q::zero);
                *e -= &c * x;
                if e.is_zero() {
                    acc.remove(j);
                }
            }
        }
        acc.into_iter().collect()
    }

    pub fn contains(&self, v: &[(usize, Q)]) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank of the span of a list of vectors.
pub fn span_rank(vectors: &[SparseVec]) -> usize {
    echelon(vectors, false).pivots.len()
}

pub fn span_rref(vectors: &[SparseVec]) -> Rref {
    echelon(vectors, true)
}

/// Representatives of `span(Z) / span(B)`. They are the reduced echelon basis
/// of `Z` reduced modulo `B`, so they vanish on the pivot columns of `B`.
pub fn quotient_representatives(z: &[SparseVec], b: &[SparseVec]) -> Result<Vec<SparseVec>, LinalgError> {
    let rz = span_rref(z);
    if b.iter().any(|v| !rz.contains(v)) {
        return Err(LinalgError::NotContained);
    }
    let rb = span_rref(b);
    let residuals: Vec<SparseVec> = z.iter().map(|v| rb.reduce(v)).collect();
    let out = span_rref(&residuals).rows;
    debug_assert_eq!(out.len(), rz.rank() - rb.rank());
    Ok(out)
}

/// Coordinates modulo a subspace with respect to fixed representatives.
#[derive(Debug, Clone)]
pub struct QuotientBasis {
    modulus: Rref,
    reps: Rref,
    /// Row `i` of `reps` as a combination of the original representatives.
    combos: Vec<SparseVec>,
}

impl QuotientBasis {
    /// Fails when the representatives are dependent modulo `modulus`.
    pub fn new(reps: &[SparseVec], modulus: &[SparseVec]) -> Result<Self, LinalgError> {
        let m = span_rref(modulus);
        let width = reps.iter().chain(modulus).flat_map(|v| v.iter().map(|(j, _)| j + 1)).max().unwrap_or(0);
        let tagged: Vec<SparseVec> = reps
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut t = m.reduce(v);
                t.push((width + i, Q::one()));
                t
            })
            .collect();
        let r = span_rref(&tagged);
        if r.pivots.iter().any(|&p| p >= width) {
            return Err(LinalgError::Dependent);
        }
        let mut rows = Vec::with_capacity(r.rows.len());
        let mut combos = Vec::with_capacity(r.rows.len());
        for row in &r.rows {
            rows.push(row.iter().filter(|(j, _)| *j < width).cloned().collect());
            combos.push(row.iter().filter(|(j, _)| *j >= width).map(|(j, x)| (j - width, x.clone())).collect());
        }
        Ok(QuotientBasis { modulus: m, reps: Rref { pivots: r.pivots, rows }, combos })
    }

    pub fn dim(&self) -> usize {
        self.combos.len()
    }

    /// Coefficients of `v` in the representatives modulo the subspace, or
    /// `None` when `v` is outside their span.
    pub fn coordinates(&self, v: &[(usize, Q)]) -> Option<SparseVec> {
        let mut res: BTreeMap<usize, Q> = self.modulus.reduce(v).into_iter().collect();
        let mut coeffs: BTreeMap<usize, Q> = BTreeMap::new();
        for ((p, row), combo) in self.reps.pivots.iter().zip(&self.reps.rows).zip(&self.combos) {
            let Some(a) = res.get(p).cloned() else { continue };
            for (j, x) in row {
                let e = res.entry(*j).or_insert_with(Q::zero);
                *e -= &a * x;
                if e.is_zero() {
                    res.remove(j);
                }
            }
            for (j, x) in combo {
                *coeffs.entry(*j).or_insert_with(Q::zero) += &a * x;
            }
        }
        if !res.is_empty() {
            return None;
        }
        Some(clean(coeffs.into_iter().collect()))
    }
}

trait Ring: Clone {
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Self;
    /// `a*x - b*y`
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn mul(a: &Self, x: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, g: &Self) -> Self;
    fn is_one(&self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Ring for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?).filter(|v| *v != i64::MIN)
    }
    fn mul(a: &Self, x: &Self) -> Option<Self> {
        a.checked_mul(*x).filter(|v| *v != i64::MIN)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Ring for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn mul(a: &Self, x: &Self) -> Option<Self> {
        Some(a * x)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

type IRow<T> = Vec<(usize, T)>;

fn make_primitive<T: Ring>(row: &mut IRow<T>) {
    let Some((_, first)) = row.first() else { return };
    let mut g = first.clone();
    for (_, x) in row.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    if row[0].1.is_negative() {
        g = g.neg();
    }
    if !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
}

/// `a*r - b*p` where `a` is `p`'s entry and `b` is `r`'s entry at the
/// eliminated column.
fn combine<T: Ring>(r: &IRow<T>, p: &IRow<T>, a: &T, b: &T) -> Option<IRow<T>> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    let nb = b.neg();
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map(|e| e.0);
        let cj = p.get(j).map(|e| e.0);
        let v = match (ci, cj) {
            (Some(x), Some(y)) if x == y => {
                let v = T::lin(a, &r[i].1, b, &p[j].1)?;
                i += 1;
                j += 1;
                (x, v)
            }
            (Some(x), Some(y)) if x < y => {
                i += 1;
                (x, T::mul(a, &r[i - 1].1)?)
            }
            (Some(x), None) => {
                i += 1;
                (x, T::mul(a, &r[i - 1].1)?)
            }
            (_, Some(y)) => {
                j += 1;
                (y, T::mul(&nb, &p[j - 1].1)?)
            }
            (None, None) => unreachable!(),
        };
        if !v.1.is_zero() {
            out.push(v);
        }
    }
    make_primitive(&mut out);
    Some(out)
}

fn entry_at<T: Ring>(row: &IRow<T>, c: usize) -> Option<&T> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|k| &row[k].1)
}

fn eliminate<T: Ring>(rows: Vec<IRow<T>>, reduced: bool) -> Option<(Vec<usize>, Vec<IRow<T>>)> {
    let mut pivots: BTreeMap<usize, IRow<T>> = BTreeMap::new();
    for mut r in rows {
        make_primitive(&mut r);
        while let Some((c, b)) = r.first().cloned() {
            match pivots.get(&c) {
                Some(p) => {
                    let a = p[0].1.clone();
                    r = combine(&r, p, &a, &b)?;
                }
                None => {
                    pivots.insert(c, r);
                    break;
                }
            }
        }
    }
    let cols: Vec<usize> = pivots.keys().copied().collect();
    if reduced {
        for (k, &c) in cols.iter().enumerate().rev() {
            let p = pivots[&c].clone();
            let a = p[0].1.clone();
            for &other in &cols[..k] {
                let r = pivots.get(&other).expect("pivot row");
                if let Some(b) = entry_at(r, c).cloned() {
                    let nr = combine(r, &p, &a, &b)?;
                    pivots.insert(other, nr);
                }
            }
        }
    }
    Some((cols, pivots.into_values().collect()))
}

fn to_integer_row(v: &[(usize, Q)]) -> IRow<BigInt> {
    let mut l = BigInt::one();
    for (_, c) in v {
        l = l.lcm(c.denom());
    }
    v.iter().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (*j, c.numer() * (&l / c.denom()))).collect()
}

fn echelon(rows: &[SparseVec], reduced: bool) -> Rref {
    let mut big: Vec<IRow<BigInt>> = rows.iter().map(|r| to_integer_row(&clean(r.clone()))).filter(|r| !r.is_empty()).collect();
    // Sparsest rows first, stable on the original order.
    big.sort_by_key(Vec::len);
    let small: Option<Vec<IRow<i64>>> =
        big.iter().map(|r| r.iter().map(|(j, x)| x.to_i64().filter(|v| v.unsigned_abs() < (1 << 62)).map(|v| (*j, v))).collect()).collect();
    let (pivots, irows): (Vec<usize>, Vec<IRow<BigInt>>) = match small.and_then(|s| eliminate(s, reduced)) {
        Some((p, r)) => (p, r.into_iter().map(|row| row.into_iter().map(|(j, x)| (j, x.to_big())).collect()).collect()),
        None => eliminate(big, reduced).expect("big integer elimination cannot overflow"),
    };
    let rows = irows
        .into_iter()
        .map(|row| {
            let lead = Q::from_integer(row[0].1.clone());
            row.into_iter().map(|(j, x)| (j, Q::from_integer(x) / &lead)).collect()
        })
        .collect();
    Rref { pivots, rows }
}
