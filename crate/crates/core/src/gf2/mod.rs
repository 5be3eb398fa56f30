//! Bit-packed GF(2) linear algebra over matrices whose columns carry exactly
//! `k` ones.
//!
//! Columns are exchanged in sparse form ([`ColumnSet`], a sorted list of row
//! indices) and densified into machine words whenever elimination needs them.
//! Three rank routes live here:
//!
//! - [`rank`]: batch row-echelon elimination with lowest-bit pivots;
//! - [`RankEngine`]: streaming, fully reduced pivot form, one column at a time;
//! - [`lazy_rank`]: structured ("lazy") elimination for large sparse systems.
//!
//! [`span_size_oracle`] enumerates the whole span and is only meant as an
//! independent check for tiny matrices.

mod bitvec;
mod engine;
mod lazy;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use bitvec::{words_for, BitVec};
pub use engine::RankEngine;
pub use lazy::{lazy_rank, LazyRank};

pub(crate) use bitvec::{lowest_one, test_bit, xor_words};

/// Inline capacity of a column before it spills to the heap.
pub(crate) type Indices = SmallVec<[u32; 8]>;

/// One column of a 0/1 matrix: the strictly increasing list of rows holding a 1.
///
/// Ordering is lexicographic on the index list, which is the canonical column
/// order used for tie-breaking.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnSet {
    indices: Indices,
    n: usize,
}

impl ColumnSet {
    /// Validates that `indices` is strictly increasing and bounded by `n`.
    pub fn new(n: usize, indices: &[u32]) -> Result<Self> {
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidColumn(format!(
                "indices must be strictly increasing, found {} before {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = indices.last() {
            if last as usize >= n {
                return Err(Error::InvalidColumn(format!(
                    "row index {last} out of range for n={n}"
                )));
            }
        }
        Ok(Self {
            indices: Indices::from_slice(indices),
            n,
        })
    }

    /// Sorts the indices first; duplicates are still rejected.
    pub fn from_unsorted(n: usize, indices: &[u32]) -> Result<Self> {
        let mut v = Indices::from_slice(indices);
        v.sort_unstable();
        Self::new(n, &v)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, indices: Indices) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&i| (i as usize) < n));
        Self { indices, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of ones in the column.
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn contains(&self, row: u32) -> bool {
        self.indices.binary_search(&row).is_ok()
    }

    pub fn to_bitvec(&self) -> BitVec {
        BitVec::from_indices(self.n, self.indices.iter().map(|&i| i as usize))
    }

    /// Canonical text form: comma-separated 0-based indices, e.g. `0,3,7`.
    pub fn encode(&self) -> String {
        self.to_string()
    }

    /// Parses the canonical text form.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::new(n, &[]);
        }
        let idx = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::InvalidColumn(format!("bad index {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, &idx)
    }
}

impl fmt::Display for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, i) in self.indices.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}/{}", self.n)
    }
}

/// An `n`-row matrix given by its columns. Duplicate columns are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Gf2Matrix {
    n: usize,
    columns: Vec<ColumnSet>,
}

impl Gf2Matrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            columns: Vec::new(),
        }
    }

    pub fn from_columns(n: usize, columns: Vec<ColumnSet>) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.n != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.n,
            });
        }
        Ok(Self { n, columns })
    }

    /// Convenience constructor from index slices.
    pub fn from_index_lists(n: usize, columns: &[&[u32]]) -> Result<Self> {
        let cols = columns
            .iter()
            .map(|c| ColumnSet::new(n, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, columns: cols })
    }

    pub fn push(&mut self, column: ColumnSet) -> Result<()> {
        if column.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: column.n,
            });
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[ColumnSet] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<ColumnSet> {
        self.columns
    }

    /// Common column weight, or `None` if the matrix is empty or mixed.
    pub fn uniform_k(&self) -> Option<usize> {
        let k = self.columns.first()?.k();
        self.columns.iter().all(|c| c.k() == k).then_some(k)
    }
}

/// Echelon basis keyed by lowest set bit. Vectors are stored densely in one
/// flat buffer; reduction only touches words at or above the pivot word.
pub(crate) struct EchelonBasis {
    words: usize,
    slot_of_bit: Vec<u32>,
    store: Vec<u64>,
    rank: usize,
}

const NO_SLOT: u32 = u32::MAX;

impl EchelonBasis {
    pub(crate) fn new(bits: usize) -> Self {
        Self {
            words: words_for(bits),
            slot_of_bit: vec![NO_SLOT; bits],
            store: Vec::new(),
            rank: 0,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }

    /// Reduces `v` in place; returns true (and keeps it) if it was independent.
    pub(crate) fn insert(&mut self, v: &mut [u64]) -> bool {
        debug_assert_eq!(v.len(), self.words);
        let mut from = 0;
        loop {
            let Some(off) = lowest_one(&v[from..]) else {
                return false;
            };
            let p = from * 64 + off;
            from = p >> 6;
            let slot = self.slot_of_bit[p];
            if slot == NO_SLOT {
                self.slot_of_bit[p] = self.rank as u32;
                self.store.extend_from_slice(v);
                self.rank += 1;
                return true;
            }
            let base = slot as usize * self.words;
            xor_words(&mut v[from..], &self.store[base + from..base + self.words]);
        }
    }
}

/// Dimension of the span of the columns over GF(2).
pub fn rank(matrix: &Gf2Matrix) -> usize {
    let mut basis = EchelonBasis::new(matrix.n);
    let mut buf = vec![0u64; words_for(matrix.n)];
    for col in &matrix.columns {
        if basis.rank() == matrix.n {
            break;
        }
        buf.fill(0);
        for &i in col.indices() {
            buf[i as usize >> 6] ^= 1 << (i & 63);
        }
        basis.insert(&mut buf);
    }
    basis.rank()
}

/// Largest column count accepted by [`span_size_oracle`].
pub const SPAN_ORACLE_MAX_COLUMNS: usize = 20;

/// Size of the span, by enumerating all `2^m` subset sums (Gray-code order).
pub fn span_size_oracle(matrix: &Gf2Matrix) -> Result<u64> {
    let m = matrix.m();
    if m > SPAN_ORACLE_MAX_COLUMNS {
        return Err(Error::TooLarge {
            what: "column count for span enumeration",
            value: m as u128,
            limit: SPAN_ORACLE_MAX_COLUMNS as u128,
        });
    }
    let cols: Vec<BitVec> = matrix.columns.iter().map(ColumnSet::to_bitvec).collect();
    let mut acc = BitVec::zeros(matrix.n);
    let mut seen = HashSet::with_capacity(1 << m);
    seen.insert(acc.clone());
    for g in 1u64..(1u64 << m) {
        acc.xor_assign(&cols[g.trailing_zeros() as usize]);
        seen.insert(acc.clone());
    }
    Ok(seen.len() as u64)
}

/// Largest rank reachable with `k` ones per column: for even `k` every
/// column lies in the even-weight subspace, which has dimension `n - 1`.
pub fn n_star(n: usize, k: usize) -> usize {
    if k.is_multiple_of(2) {
        n.saturating_sub(1)
    } else {
        n
    }
}

/// Number of rows that appear in no column.
pub fn zero_rows(matrix: &Gf2Matrix) -> usize {
    let mut covered = vec![false; matrix.n];
    for col in &matrix.columns {
        for &i in col.indices() {
            covered[i as usize] = true;
        }
    }
    covered.iter().filter(|&&c| !c).count()
}
