//! Bit-packed linear algebra over the two-element field.
//!
//! Chain groups of a simplicial complex with coefficients in F_2 are plain
//! bit vectors indexed by simplices, so ranks, kernels and subspace
//! intersections reduce to word-parallel Gaussian elimination.

/// Dense bit vector of fixed length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in ones {
            v.set(i, true);
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
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit.
    pub fn first_set(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// True when every set bit of `self` is also set in `mask`.
    pub fn is_subset_of(&self, mask: &BitVec) -> bool {
        debug_assert_eq!(self.len, mask.len);
        self.words
            .iter()
            .zip(&mask.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn and_not(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
            len: self.len,
        }
    }
}

/// Row-echelon basis maintained incrementally, one pivot per row.
pub struct Echelon {
    ncols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    pivot_row: Vec<u32>, // ncols entries, u32::MAX when the column is free
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![u32::MAX; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis in place; a zero result means membership.
    pub fn reduce(&self, v: &mut BitVec) {
        while let Some(p) = v.first_set() {
            let r = self.pivot_row[p];
            if r == u32::MAX {
                return;
            }
            v.xor_assign(&self.rows[r as usize]);
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Inserts a vector, returning true when it enlarged the span.
    pub fn insert(&mut self, mut v: BitVec) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        self.reduce(&mut v);
        match v.first_set() {
            None => false,
            Some(p) => {
                self.pivot_row[p] = self.rows.len() as u32;
                self.pivots.push(p);
                self.rows.push(v);
                true
            }
        }
    }

    /// Consumes the basis, returning rows sorted by pivot column.
    pub fn into_sorted_rows(self) -> Vec<BitVec> {
        let mut tagged: Vec<(usize, BitVec)> =
            self.pivots.into_iter().zip(self.rows).collect();
        tagged.sort_by_key(|(p, _)| *p);
        tagged.into_iter().map(|(_, r)| r).collect()
    }
}

/// Rank of the span of the given vectors.
pub fn rank(ncols: usize, vectors: &[BitVec]) -> usize {
    let mut e = Echelon::new(ncols);
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

/// Basis of the kernel of the linear map whose j-th column (a vector over
/// `nrows`) is `columns[j]`; kernel vectors live over `columns.len()`.
///
/// Works by echelonizing the rows [column_j | e_j]; combinations whose left
/// half vanishes record a dependency among the columns.
pub fn kernel_basis(nrows: usize, columns: &[BitVec]) -> Vec<BitVec> {
    let ncols = columns.len();
    let total = nrows + ncols;
    let mut e = Echelon::new(total);
    for (j, col) in columns.iter().enumerate() {
        debug_assert_eq!(col.len(), nrows);
        let mut row = BitVec::zeros(total);
        for i in col.iter_ones() {
            row.set(i, true);
        }
        row.set(nrows + j, true);
        e.insert(row);
    }
    let mut kernel = Vec::new();
    for (p, row) in e.pivots().iter().zip(e.rows()) {
        if *p >= nrows {
            let mut v = BitVec::zeros(ncols);
            for i in row.iter_ones() {
                debug_assert!(i >= nrows);
                v.set(i - nrows, true);
            }
            kernel.push(v);
        }
    }
    kernel
}

/// Basis of span(a) ∩ span(b) via the Zassenhaus doubling trick.
pub fn intersection_basis(ncols: usize, a: &[BitVec], b: &[BitVec]) -> Vec<BitVec> {
    let mut e = Echelon::new(2 * ncols);
    for u in a {
        let mut row = BitVec::zeros(2 * ncols);
        for i in u.iter_ones() {
            row.set(i, true);
            row.set(ncols + i, true);
        }
        e.insert(row);
    }
    for v in b {
        let mut row = BitVec::zeros(2 * ncols);
        for i in v.iter_ones() {
            row.set(i, true);
        }
        e.insert(row);
    }
    let mut out = Vec::new();
    for (p, row) in e.pivots().iter().zip(e.rows()) {
        if *p >= ncols {
            let mut v = BitVec::zeros(ncols);
            for i in row.iter_ones() {
                v.set(i - ncols, true);
            }
            out.push(v);
        }
    }
    out
}

/// Basis of span(rows) ∩ {v : v_i = 0 for every i outside `allowed`}.
///
/// Eliminates the forbidden coordinates first; whatever rows survive have
/// support inside `allowed` and span exactly the intersection.
pub fn coordinate_intersection_basis(rows: &[BitVec], allowed: &BitVec) -> Vec<BitVec> {
    let mut work: Vec<BitVec> = rows.to_vec();
    for c in 0..allowed.len() {
        if allowed.get(c) {
            continue;
        }
        let Some(k) = work.iter().position(|r| r.get(c)) else {
            continue;
        };
        let pivot = work.swap_remove(k);
        for r in work.iter_mut() {
            if r.get(c) {
                r.xor_assign(&pivot);
            }
        }
    }
    work.retain(|r| !r.is_zero());
    debug_assert!(work.iter().all(|r| r.is_subset_of(allowed)));
    work
}
