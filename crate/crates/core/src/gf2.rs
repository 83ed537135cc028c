//! Exact linear algebra over F₂ and homology of finite graded chain complexes.
//!
//! Matrices act on column vectors: an `r × c` matrix maps `F₂^c → F₂^r`. Rows
//! are bit-packed when the column count is at most [`SPARSE_THRESHOLD`] and kept
//! as sorted index lists above it. Every elimination pivots on the lowest
//! available column index, so all bases returned here are deterministic.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

/// Column count above which matrices switch to sparse row storage.
pub const SPARSE_THRESHOLD: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("d∘d ≠ 0: column {column} of the incoming map is not killed by the outgoing map")]
    NonzeroComposite { column: usize },
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("d∘d ≠ 0 at degree {degree}, basis element `{label}`")]
    ComplexNotClosed { degree: i64, label: String },
}

/// A dense bit vector over F₂.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct F2Vec {
    len: usize,
    words: Vec<u64>,
}

impl F2Vec {
    pub fn zeros(len: usize) -> Self {
        F2Vec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.toggle(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        let m = 1u64 << (i & 63);
        if b {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &F2Vec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn dot(&self, other: &F2Vec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Lowest set index.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Sorted list of set indices; used for wide sparse rows.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseRow(pub Vec<u32>);

impl SparseRow {
    fn xor_assign(&mut self, other: &SparseRow) {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.0 = out;
    }

    fn get(&self, i: usize) -> bool {
        self.0.binary_search(&(i as u32)).is_ok()
    }

    fn toggle(&mut self, i: usize) {
        match self.0.binary_search(&(i as u32)) {
            Ok(p) => {
                self.0.remove(p);
            }
            Err(p) => self.0.insert(p, i as u32),
        }
    }
}

trait Row: Clone + Send + Sync {
    fn lead(&self) -> Option<usize>;
    fn bit(&self, i: usize) -> bool;
    fn add(&mut self, other: &Self);
}

impl Row for F2Vec {
    fn lead(&self) -> Option<usize> {
        self.first_one()
    }
    fn bit(&self, i: usize) -> bool {
        self.get(i)
    }
    fn add(&mut self, other: &Self) {
        self.xor_assign(other)
    }
}

impl Row for SparseRow {
    fn lead(&self) -> Option<usize> {
        self.0.first().map(|&i| i as usize)
    }
    fn bit(&self, i: usize) -> bool {
        self.get(i)
    }
    fn add(&mut self, other: &Self) {
        self.xor_assign(other)
    }
}

/// Fully reduced row echelon form. Returns the nonzero reduced rows and their
/// pivot columns, pivots increasing.
fn rref<R: Row>(mut rows: Vec<R>) -> (Vec<R>, Vec<usize>) {
    let mut basis: Vec<R> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut r in rows.drain(..) {
        // basis rows vanish at every other pivot, so one pass reduces fully
        for (k, &p) in pivots.iter().enumerate() {
            if r.bit(p) {
                r.add(&basis[k]);
            }
        }
        let Some(l) = r.lead() else { continue };
        for b in basis.iter_mut() {
            if b.bit(l) {
                b.add(&r);
            }
        }
        let pos = pivots.binary_search(&l).unwrap_err();
        pivots.insert(pos, l);
        basis.insert(pos, r);
    }
    (basis, pivots)
}

#[derive(Clone, PartialEq, Eq)]
enum Storage {
    Dense(Vec<F2Vec>),
    Sparse(Vec<SparseRow>),
}

/// A matrix over F₂ with fixed dimensions.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let storage = if cols > SPARSE_THRESHOLD {
            Storage::Sparse(vec![SparseRow::default(); rows])
        } else {
            Storage::Dense(vec![F2Vec::zeros(cols); rows])
        };
        F2Matrix {
            rows,
            cols,
            storage,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from 0/1 rows.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds an `rows × cols` matrix whose column `j` has ones at `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<usize>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for &i in col {
                m.toggle(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        match &self.storage {
            Storage::Dense(v) => v[r].get(c),
            Storage::Sparse(v) => v[r].get(c),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        if self.get(r, c) != b {
            self.toggle(r, c);
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        match &mut self.storage {
            Storage::Dense(v) => v[r].toggle(c),
            Storage::Sparse(v) => v[r].toggle(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.storage {
            Storage::Dense(v) => v.iter().all(F2Vec::is_zero),
            Storage::Sparse(v) => v.iter().all(|r| r.0.is_empty()),
        }
    }

    pub fn row_vec(&self, r: usize) -> F2Vec {
        match &self.storage {
            Storage::Dense(v) => v[r].clone(),
            Storage::Sparse(v) => {
                F2Vec::from_indices(self.cols, v[r].0.iter().map(|&i| i as usize))
            }
        }
    }

    pub fn column(&self, c: usize) -> F2Vec {
        F2Vec::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.toggle(c, r);
            }
        }
        t
    }

    fn row_ones(&self, r: usize) -> Vec<usize> {
        match &self.storage {
            Storage::Dense(v) => v[r].ones().collect(),
            Storage::Sparse(v) => v[r].0.iter().map(|&i| i as usize).collect(),
        }
    }

    /// `self · x`.
    pub fn apply(&self, x: &F2Vec) -> F2Vec {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        let mut out = F2Vec::zeros(self.rows);
        for r in 0..self.rows {
            let bit = match &self.storage {
                Storage::Dense(v) => v[r].dot(x),
                Storage::Sparse(v) => v[r].0.iter().filter(|&&i| x.get(i as usize)).count() & 1 == 1,
            };
            if bit {
                out.set(r, true);
            }
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::Shape(format!(
                "{}x{} · {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        let other_rows: Vec<F2Vec> = (0..other.rows).map(|k| other.row_vec(k)).collect();
        for r in 0..self.rows {
            let mut acc = F2Vec::zeros(other.cols);
            for k in self.row_ones(r) {
                acc.xor_assign(&other_rows[k]);
            }
            for c in acc.ones() {
                out.toggle(r, c);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &F2Matrix) -> Result<F2Matrix, Gf2Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Gf2Error::Shape(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for r in 0..other.rows {
            for c in other.row_ones(r) {
                out.toggle(r, c);
            }
        }
        Ok(out)
    }

    /// Row-permuted / column-permuted copy: entry `(perm_r[i], perm_c[j]) ← (i, j)`.
    pub fn permuted(&self, perm_r: &[usize], perm_c: &[usize]) -> F2Matrix {
        let mut out = F2Matrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                out.toggle(perm_r[r], perm_c[c]);
            }
        }
        out
    }

    fn reduced(&self) -> (Vec<F2Vec>, Vec<usize>) {
        match &self.storage {
            Storage::Dense(v) => rref(v.clone()),
            Storage::Sparse(v) => {
                let (rows, piv) = rref(v.clone());
                let dense = rows
                    .into_iter()
                    .map(|r| F2Vec::from_indices(self.cols, r.0.into_iter().map(|i| i as usize)))
                    .collect();
                (dense, piv)
            }
        }
    }
}

/// F₂ rank.
pub fn rank(m: &F2Matrix) -> usize {
    match &m.storage {
        Storage::Dense(v) => rref(v.clone()).1.len(),
        Storage::Sparse(v) => rref(v.clone()).1.len(),
    }
}

/// Basis of `{x : m·x = 0}`, one vector per free column in increasing order.
pub fn kernel_basis(m: &F2Matrix) -> Vec<F2Vec> {
    let (rows, pivots) = m.reduced();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = F2Vec::unit(m.cols, free);
            for (row, &p) in rows.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Incrementally built row-echelon basis of a subspace of `F₂^n`.
#[derive(Clone, Debug)]
pub struct Echelon {
    len: usize,
    rows: Vec<F2Vec>,
    pivots: Vec<usize>,
    // expression of each basis row in terms of inserted vectors
    origin: Vec<F2Vec>,
    inserted: usize,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Echelon {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
            origin: Vec::new(),
            inserted: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce_with_origin(&self, v: &F2Vec) -> (F2Vec, Vec<usize>) {
        let mut r = v.clone();
        let mut used = Vec::new();
        for (k, &p) in self.pivots.iter().enumerate() {
            if r.get(p) {
                r.xor_assign(&self.rows[k]);
                used.push(k);
            }
        }
        (r, used)
    }

    /// Inserts `v`; returns `true` when it was independent of the span so far.
    pub fn insert(&mut self, v: &F2Vec) -> bool {
        assert_eq!(v.len(), self.len);
        let idx = self.inserted;
        self.inserted += 1;
        for o in self.origin.iter_mut() {
            o.words.resize(self.inserted.div_ceil(64).max(1), 0);
            o.len = self.inserted;
        }
        let (r, used) = self.reduce_with_origin(v);
        let Some(l) = r.first_one() else { return false };
        let mut orig = F2Vec::unit(self.inserted, idx);
        for k in used {
            orig.xor_assign(&self.origin[k]);
        }
        // keep rows reduced at the new pivot
        for k in 0..self.rows.len() {
            if self.rows[k].get(l) {
                let (row, o) = (r.clone(), orig.clone());
                self.rows[k].xor_assign(&row);
                self.origin[k].xor_assign(&o);
            }
        }
        let pos = self.pivots.binary_search(&l).unwrap_err();
        self.pivots.insert(pos, l);
        self.rows.insert(pos, r);
        self.origin.insert(pos, orig);
        true
    }

    pub fn contains(&self, v: &F2Vec) -> bool {
        self.reduce_with_origin(v).0.is_zero()
    }

    /// Reduces `v` modulo the span; the result has no pivot positions set.
    pub fn reduce(&self, v: &F2Vec) -> F2Vec {
        self.reduce_with_origin(v).0
    }

    /// Coefficients over the inserted vectors (in insertion order) expressing
    /// `v`, or `None` when `v` is outside the span.
    pub fn solve(&self, v: &F2Vec) -> Option<F2Vec> {
        let (r, used) = self.reduce_with_origin(v);
        if !r.is_zero() {
            return None;
        }
        let mut out = F2Vec::zeros(self.inserted);
        for k in used {
            out.xor_assign(&self.origin[k]);
        }
        Some(out)
    }
}

/// Homology at a spot `· --d_in--> V --d_out--> ·`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub dimension: usize,
    pub representatives: Vec<F2Vec>,
}

/// Homology `ker(d_out) / im(d_in)` with deterministic representatives:
/// kernel vectors are taken in free-column order and kept when independent
/// of the image and the representatives already chosen.
pub fn homology_basis(d_out: &F2Matrix, d_in: &F2Matrix) -> Result<Homology, Gf2Error> {
    if d_out.cols() != d_in.rows() {
        return Err(Gf2Error::Shape(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols(),
            d_in.rows()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if !comp.is_zero() {
        let column = (0..comp.cols())
            .find(|&c| !comp.column(c).is_zero())
            .unwrap_or(0);
        return Err(Gf2Error::NonzeroComposite { column });
    }
    let n = d_out.cols();
    let mut span = Echelon::new(n);
    for c in 0..d_in.cols() {
        span.insert(&d_in.column(c));
    }
    let mut representatives = Vec::new();
    for k in kernel_basis(d_out) {
        if span.insert(&k) {
            representatives.push(k);
        }
    }
    Ok(Homology {
        dimension: representatives.len(),
        representatives,
    })
}

/// A finite chain complex over F₂ with `d: C_n → C_{n−1}`.
#[derive(Clone, Debug)]
pub struct GradedComplexF2 {
    lo: i64,
    basis: Vec<Vec<String>>,
    // differentials[k] : degree lo+k → lo+k−1
    differentials: Vec<F2Matrix>,
}

impl GradedComplexF2 {
    /// `basis[k]` labels degree `lo + k`; `differentials[k]` maps degree `lo + k`
    /// to degree `lo + k − 1` (the map out of degree `lo` must have zero rows).
    pub fn new(
        lo: i64,
        basis: Vec<Vec<String>>,
        differentials: Vec<F2Matrix>,
    ) -> Result<Self, Gf2Error> {
        if basis.len() != differentials.len() {
            return Err(Gf2Error::Shape("one differential per degree required".into()));
        }
        for (k, d) in differentials.iter().enumerate() {
            let target = if k == 0 { 0 } else { basis[k - 1].len() };
            if d.cols() != basis[k].len() || d.rows() != target {
                return Err(Gf2Error::Shape(format!(
                    "differential out of degree {} is {}x{}, expected {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    target,
                    basis[k].len()
                )));
            }
        }
        for k in 1..differentials.len() {
            let comp = differentials[k - 1].mul(&differentials[k])?;
            if let Some(c) = (0..comp.cols()).find(|&c| !comp.column(c).is_zero()) {
                return Err(Gf2Error::ComplexNotClosed {
                    degree: lo + k as i64,
                    label: basis[k][c].clone(),
                });
            }
        }
        Ok(GradedComplexF2 {
            lo,
            basis,
            differentials,
        })
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.lo + self.basis.len() as i64 - 1
    }

    fn index(&self, n: i64) -> Option<usize> {
        if n < self.lo {
            return None;
        }
        let k = (n - self.lo) as usize;
        (k < self.basis.len()).then_some(k)
    }

    pub fn dim(&self, n: i64) -> usize {
        self.index(n).map_or(0, |k| self.basis[k].len())
    }

    pub fn labels(&self, n: i64) -> &[String] {
        self.index(n).map_or(&[], |k| &self.basis[k])
    }

    /// `d: C_n → C_{n−1}`; an empty matrix outside the range.
    pub fn differential(&self, n: i64) -> F2Matrix {
        match self.index(n) {
            Some(k) => self.differentials[k].clone(),
            None => F2Matrix::zeros(self.dim(n - 1), 0),
        }
    }

    pub fn homology(&self, n: i64) -> Homology {
        let d_out = self.differential(n);
        let d_in = match self.index(n + 1) {
            Some(k) => self.differentials[k].clone(),
            None => F2Matrix::zeros(self.dim(n), 0),
        };
        homology_basis(&d_out, &d_in).expect("validated at construction")
    }

    /// Homology of every degree, computed in parallel.
    pub fn all_homology(&self) -> Vec<(i64, Homology)> {
        self.degrees()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|n| (n, self.homology(n)))
            .collect()
    }
}
