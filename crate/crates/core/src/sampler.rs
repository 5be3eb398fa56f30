//! Seeded generation of the column models.
//!
//! # Seeding
//!
//! Every random object is a pure function of its inputs and a [`SeedSpec`]
//! `(master_seed, stream_id)`. The generator is xoshiro256++ whose 256-bit
//! state is derived as follows (all arithmetic wrapping on `u64`):
//!
//! ```text
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!          z ^ (z >> 31)
//! s  = mix(master_seed) ^ mix(stream_id + 0x9E3779B97F4A7C15)
//! state[i] = mix(s + (i + 1) * 0x9E3779B97F4A7C15),  i = 0..4
//! ```
//!
//! i.e. a SplitMix64 stream started from the combined key. Bounded integers
//! use Lemire's multiply-and-reject method on `next_u64`; uniform reals are
//! `(next_u64 >> 11) * 2^-53`. Binomial counts come from `rand_distr`.

use std::collections::HashSet;

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::{Binomial, Distribution};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{ColumnSet, Indices};
use crate::hypergraph::Hypergraph;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Identifies one independent, reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// The 256-bit generator state for this stream.
    pub fn state(&self) -> [u64; 4] {
        let s = mix64(self.master_seed) ^ mix64(self.stream_id.wrapping_add(GOLDEN));
        std::array::from_fn(|i| mix64(s.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN))))
    }

    pub fn rng(&self) -> SeededRng {
        let mut bytes = [0u8; 32];
        for (chunk, w) in bytes.chunks_exact_mut(8).zip(self.state()) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        SeededRng(Xoshiro256PlusPlus::from_seed(bytes))
    }
}

/// The generator behind a [`SeedSpec`].
#[derive(Clone, Debug)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

impl SeededRng {
    /// Uniform integer in `0..bound` (Lemire, unbiased).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform dyadic in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniformly random `k`-subset of `0..n`, sorted (Floyd's algorithm).
    pub fn k_subset(&mut self, n: usize, k: usize) -> Indices {
        assert!(k <= n, "k={k} > n={n}");
        let mut out = Indices::new();
        for j in (n - k)..n {
            let t = self.below(j as u64 + 1) as u32;
            if out.contains(&t) {
                out.push(j as u32);
            } else {
                out.push(t);
            }
        }
        out.sort_unstable();
        out
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let Some(next) = acc.checked_mul((n - i) as u128) else {
            return u128::MAX;
        };
        acc = next / (i as u128 + 1);
    }
    acc
}

/// Column universes at most this large are sampled by partial shuffle when
/// more than half of them are requested.
const ENUMERATE_LIMIT: u128 = 1 << 20;

/// All `k`-subsets of `0..n` in lexicographic (canonical) order.
pub fn all_columns(n: usize, k: usize) -> impl Iterator<Item = ColumnSet> {
    let mut cur: Option<Indices> = (k <= n).then(|| (0..k as u32).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if (c[i] as usize) < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(ColumnSet::from_sorted_unchecked(n, out))
    })
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::Precondition(format!("k={k} exceeds n={n}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::TooLarge {
            what: "n",
            value: n as u128,
            limit: u32::MAX as u128,
        });
    }
    Ok(())
}

fn m_subset_with(n: usize, k: usize, m: usize, rng: &mut SeededRng) -> Result<Hypergraph> {
    check_shape(n, k)?;
    let total = binomial(n, k);
    if m as u128 > total {
        return Err(Error::TooLarge {
            what: "m",
            value: m as u128,
            limit: total,
        });
    }
    let edges = if total <= ENUMERATE_LIMIT && 2 * m as u128 > total {
        let mut all: Vec<ColumnSet> = all_columns(n, k).collect();
        for i in 0..m {
            let j = i + rng.below((all.len() - i) as u64) as usize;
            all.swap(i, j);
        }
        all.truncate(m);
        all
    } else {
        let mut seen = HashSet::with_capacity(m);
        let mut edges = Vec::with_capacity(m);
        while edges.len() < m {
            let c = ColumnSet::from_sorted_unchecked(n, rng.k_subset(n, k));
            if seen.insert(c.clone()) {
                edges.push(c);
            }
        }
        edges
    };
    Ok(Hypergraph::from_distinct_unchecked(n, k, edges))
}

/// `m` distinct uniformly random `k`-subsets of `0..n`.
pub fn sample_m_subset(n: usize, k: usize, m: usize, seed: SeedSpec) -> Result<Hypergraph> {
    m_subset_with(n, k, m, &mut seed.rng())
}

/// Every `k`-subset kept independently with probability `p`: the edge count
/// is drawn from `Binomial(C(n,k), p)`, then that many distinct subsets are
/// sampled uniformly.
pub fn sample_binomial(n: usize, k: usize, p: f64, seed: SeedSpec) -> Result<Hypergraph> {
    check_shape(n, k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Precondition(format!("p={p} outside [0, 1]")));
    }
    let total = binomial(n, k);
    let trials = u64::try_from(total).map_err(|_| Error::TooLarge {
        what: "C(n,k)",
        value: total,
        limit: u64::MAX as u128,
    })?;
    let mut rng = seed.rng();
    let m = Binomial::new(trials, p)
        .map_err(|e| Error::Precondition(e.to_string()))?
        .sample(&mut rng);
    m_subset_with(n, k, m as usize, &mut rng)
}

/// Endless supply of distinct uniformly random columns: each new column is
/// uniform over the ones not yet emitted.
#[derive(Clone, Debug)]
pub struct ColumnStream {
    n: usize,
    k: usize,
    total: u128,
    rng: SeededRng,
    seen: HashSet<ColumnSet>,
}

impl ColumnStream {
    pub fn new(n: usize, k: usize, seed: SeedSpec) -> Result<Self> {
        check_shape(n, k)?;
        Ok(Self {
            n,
            k,
            total: binomial(n, k),
            rng: seed.rng(),
            seen: HashSet::new(),
        })
    }

    pub fn emitted(&self) -> usize {
        self.seen.len()
    }

    pub fn next_column(&mut self) -> Result<ColumnSet> {
        if self.seen.len() as u128 >= self.total {
            return Err(Error::Exhausted(self.total));
        }
        loop {
            let c = ColumnSet::from_sorted_unchecked(self.n, self.rng.k_subset(self.n, self.k));
            if self.seen.insert(c.clone()) {
                return Ok(c);
            }
        }
    }
}

impl Iterator for ColumnStream {
    type Item = ColumnSet;

    fn next(&mut self) -> Option<ColumnSet> {
        self.next_column().ok()
    }
}

pub fn column_stream(n: usize, k: usize, seed: SeedSpec) -> Result<ColumnStream> {
    ColumnStream::new(n, k, seed)
}

/// A column together with its `U[0,1]` weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedColumn {
    pub column: ColumnSet,
    pub weight: f64,
}

/// Largest universe accepted by [`weighted_enumeration`].
pub const WEIGHTED_ENUMERATION_LIMIT: u128 = 10_000_000;

/// All `C(n,k)` columns with i.i.d. uniform weights, sorted by weight.
///
/// Weights are drawn in canonical column order; equal weights keep canonical
/// order.
pub fn weighted_enumeration(n: usize, k: usize, seed: SeedSpec) -> Result<Vec<WeightedColumn>> {
    check_shape(n, k)?;
    let total = binomial(n, k);
    if total > WEIGHTED_ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "C(n,k) for full enumeration",
            value: total,
            limit: WEIGHTED_ENUMERATION_LIMIT,
        });
    }
    let mut rng = seed.rng();
    let mut out: Vec<WeightedColumn> = all_columns(n, k)
        .map(|column| WeightedColumn {
            column,
            weight: rng.unit(),
        })
        .collect();
    out.sort_by(|a, b| a.weight.total_cmp(&b.weight));
    Ok(out)
}

/// Random order helper used by tests of order-independence.
pub fn shuffle<T>(items: &mut [T], rng: &mut SeededRng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
