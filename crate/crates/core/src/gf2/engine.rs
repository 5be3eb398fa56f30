use super::{lowest_one, test_bit, words_for, xor_words, BitVec, ColumnSet};

const NO_SLOT: u32 = u32::MAX;

/// Streaming rank computation in fully reduced (Jordan) pivot form.
///
/// Every stored vector has a 1 in its own pivot row and 0 in every other
/// pivot row. An offered column is therefore reduced by XOR-ing in exactly
/// the pivots of the rows it touches; if something is left, its lowest set
/// bit becomes a new pivot and is cleared from the existing vectors.
///
/// A single engine is not meant to be shared mid-stream; run one engine per
/// thread.
#[derive(Clone, Debug)]
pub struct RankEngine {
    n: usize,
    words: usize,
    /// Flat storage of pivot vectors, `words` u64s each, in insertion order.
    store: Vec<u64>,
    pivot_rows: Vec<u32>,
    slot_of_row: Vec<u32>,
    columns_seen: u64,
    scratch: Vec<u64>,
}

impl RankEngine {
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        Self {
            n,
            words,
            store: Vec::new(),
            pivot_rows: Vec::new(),
            slot_of_row: vec![NO_SLOT; n],
            columns_seen: 0,
            scratch: vec![0; words],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    pub fn columns_seen(&self) -> u64 {
        self.columns_seen
    }

    /// Pivot rows in the order they were created.
    pub fn pivot_rows(&self) -> &[u32] {
        &self.pivot_rows
    }

    /// Offers a column; returns true iff it was independent of everything
    /// offered before (and the rank went up by one).
    ///
    /// # Panics
    /// If `column.n()` differs from the engine's row count.
    pub fn offer(&mut self, column: &ColumnSet) -> bool {
        assert_eq!(
            column.n(),
            self.n,
            "column has n={}, engine has n={}",
            column.n(),
            self.n
        );
        self.columns_seen += 1;
        let mut v = std::mem::take(&mut self.scratch);
        v.fill(0);
        for &i in column.indices() {
            v[i as usize >> 6] ^= 1 << (i & 63);
        }
        for &i in column.indices() {
            let slot = self.slot_of_row[i as usize];
            if slot != NO_SLOT {
                let base = slot as usize * self.words;
                xor_words(&mut v, &self.store[base..base + self.words]);
            }
        }
        let added = self.absorb_reduced(&v);
        self.scratch = v;
        added
    }

    /// Offers an arbitrary dense vector of length `n`.
    pub fn offer_bits(&mut self, vector: &BitVec) -> bool {
        assert_eq!(vector.len(), self.n, "vector length differs from engine n");
        self.columns_seen += 1;
        let mut v = std::mem::take(&mut self.scratch);
        v.copy_from_slice(vector.words());
        for (slot, &row) in self.pivot_rows.iter().enumerate() {
            if test_bit(&v, row as usize) {
                let base = slot * self.words;
                xor_words(&mut v, &self.store[base..base + self.words]);
            }
        }
        let added = self.absorb_reduced(&v);
        self.scratch = v;
        added
    }

    /// `v` has no bits left in any pivot row.
    fn absorb_reduced(&mut self, v: &[u64]) -> bool {
        let Some(p) = lowest_one(v) else {
            return false;
        };
        let (pw, pb) = (p >> 6, 1u64 << (p & 63));
        for chunk in self.store.chunks_exact_mut(self.words) {
            if chunk[pw] & pb != 0 {
                xor_words(chunk, v);
            }
        }
        self.slot_of_row[p] = self.pivot_rows.len() as u32;
        self.pivot_rows.push(p as u32);
        self.store.extend_from_slice(v);
        true
    }

    /// Whether `column` lies in the span of the columns offered so far.
    pub fn in_span(&self, column: &ColumnSet) -> bool {
        let mut v = vec![0u64; self.words];
        for &i in column.indices() {
            v[i as usize >> 6] ^= 1 << (i & 63);
        }
        for &i in column.indices() {
            let slot = self.slot_of_row[i as usize];
            if slot != NO_SLOT {
                let base = slot as usize * self.words;
                xor_words(&mut v, &self.store[base..base + self.words]);
            }
        }
        v.iter().all(|&w| w == 0)
    }

    /// Checks the reduced-form invariants; used by tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.rank() > self.n.min(self.columns_seen as usize) {
            return Err(format!(
                "rank {} exceeds min(n={}, seen={})",
                self.rank(),
                self.n,
                self.columns_seen
            ));
        }
        for (slot, chunk) in self.store.chunks_exact(self.words).enumerate() {
            for (other, &row) in self.pivot_rows.iter().enumerate() {
                let bit = test_bit(chunk, row as usize);
                if bit != (other == slot) {
                    return Err(format!(
                        "vector {slot} has bit {bit} in pivot row {row} of vector {other}"
                    ));
                }
            }
        }
        for (row, &slot) in self.slot_of_row.iter().enumerate() {
            if slot != NO_SLOT && self.pivot_rows[slot as usize] as usize != row {
                return Err(format!("row {row} maps to the wrong slot"));
            }
        }
        Ok(())
    }
}
