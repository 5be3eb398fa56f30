//! `k`-uniform hypergraphs, 2-core peeling and the peel/rank decomposition.
//!
//! Column `c` of the incidence matrix is the edge `{i : c_i = 1}`, so a
//! [`Hypergraph`] and a duplicate-free [`Gf2Matrix`] are the same object.
//!
//! Peeling repeatedly removes an edge that contains a vertex of degree 1.
//! Such an edge owns a row nobody else touches, so removing it lowers the
//! rank by exactly one; hence `rank(A) = m1 + rank(core)` holds for every
//! instance, not just with high probability.

use std::collections::{HashSet, VecDeque};

use rand::Rng;

use crate::error::{Error, Result};
use crate::format::{self, Instance};
use crate::gf2::{lazy_rank, rank, ColumnSet, Gf2Matrix, Indices, LazyRank};

/// A `k`-uniform hypergraph on vertices `0..n` with pairwise distinct edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<ColumnSet>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize, edges: Vec<ColumnSet>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: e.n(),
                });
            }
            if e.k() != k {
                return Err(Error::InvalidColumn(format!(
                    "edge {e} has {} vertices, expected k={k}",
                    e.k()
                )));
            }
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.encode()));
            }
        }
        Ok(Self { n, k, edges })
    }

    pub(crate) fn from_distinct_unchecked(n: usize, k: usize, edges: Vec<ColumnSet>) -> Self {
        Self { n, k, edges }
    }

    pub fn empty(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            edges: Vec::new(),
        }
    }

    /// Builds the hypergraph from 0-based index lists.
    pub fn from_index_lists(n: usize, k: usize, edges: &[&[u32]]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|e| ColumnSet::new(n, e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, k, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[ColumnSet] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<ColumnSet> {
        self.edges
    }

    pub fn incidence_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_columns(self.n, self.edges.clone()).expect("edges share n")
    }

    pub fn from_instance(inst: Instance) -> Result<Self> {
        Self::new(inst.n, inst.k, inst.columns)
    }

    /// Canonical text encoding (see [`crate::format`]).
    pub fn to_text(&self) -> String {
        format::to_string(self.n, self.k, &self.edges)
    }

    pub fn from_text(s: &str) -> Result<Self> {
        Self::from_instance(format::from_str(s)?)
    }
}

/// Degree of every vertex (index = vertex).
pub fn degrees(h: &Hypergraph) -> Vec<usize> {
    let mut deg = vec![0usize; h.n];
    for e in &h.edges {
        for &v in e.indices() {
            deg[v as usize] += 1;
        }
    }
    deg
}

/// Outcome of peeling a hypergraph down to its 2-core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelResult {
    /// Removed edges in removal order, each with the degree-1 vertex that
    /// triggered the removal.
    pub peeled: Vec<(ColumnSet, u32)>,
    /// Surviving edges, in input order.
    pub core_edges: Vec<ColumnSet>,
    /// Vertices incident to the surviving edges, ascending.
    pub core_vertices: Vec<u32>,
    pub m1: usize,
}

impl PeelResult {
    pub fn core(&self, n: usize, k: usize) -> Hypergraph {
        Hypergraph::from_distinct_unchecked(n, k, self.core_edges.clone())
    }
}

trait PeelQueue {
    fn push(&mut self, v: u32);
    fn pop(&mut self) -> Option<u32>;
}

impl PeelQueue for VecDeque<u32> {
    fn push(&mut self, v: u32) {
        self.push_back(v);
    }
    fn pop(&mut self) -> Option<u32> {
        self.pop_front()
    }
}

struct RandomQueue<'a, R: Rng> {
    items: Vec<u32>,
    rng: &'a mut R,
}

impl<R: Rng> PeelQueue for RandomQueue<'_, R> {
    fn push(&mut self, v: u32) {
        self.items.push(v);
    }
    fn pop(&mut self) -> Option<u32> {
        if self.items.is_empty() {
            return None;
        }
        let i = self.rng.random_range(0..self.items.len());
        Some(self.items.swap_remove(i))
    }
}

/// Index-level peel: returns `(edge index, trigger)` pairs and the final
/// per-vertex degrees.
fn peel_indices<Q: PeelQueue>(h: &Hypergraph, queue: &mut Q) -> (Vec<(u32, u32)>, Vec<u32>) {
    let mut deg = vec![0u32; h.n];
    // XOR of incident edge ids; identifies the last remaining edge of a
    // degree-1 vertex without adjacency lists
    let mut xor_ids = vec![0u32; h.n];
    for (id, e) in h.edges.iter().enumerate() {
        for &v in e.indices() {
            deg[v as usize] += 1;
            xor_ids[v as usize] ^= id as u32;
        }
    }
    for (v, &d) in deg.iter().enumerate() {
        if d == 1 {
            queue.push(v as u32);
        }
    }
    let mut peeled = Vec::new();
    while let Some(v) = queue.pop() {
        if deg[v as usize] != 1 {
            continue;
        }
        let id = xor_ids[v as usize];
        let edge = h.edges[id as usize].indices();
        let trigger = *edge
            .iter()
            .find(|&&u| deg[u as usize] == 1)
            .expect("edge of a degree-1 vertex");
        for &u in edge {
            let u = u as usize;
            deg[u] -= 1;
            xor_ids[u] ^= id;
            if deg[u] == 1 {
                queue.push(u as u32);
            }
        }
        peeled.push((id, trigger));
    }
    (peeled, deg)
}

fn assemble(h: &Hypergraph, peeled: Vec<(u32, u32)>, deg: Vec<u32>) -> PeelResult {
    let mut removed = vec![false; h.edges.len()];
    for &(id, _) in &peeled {
        removed[id as usize] = true;
    }
    let core_edges = h
        .edges
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(e, _)| e.clone())
        .collect();
    let core_vertices = (0..h.n as u32).filter(|&v| deg[v as usize] > 0).collect();
    let m1 = peeled.len();
    PeelResult {
        peeled: peeled
            .into_iter()
            .map(|(id, t)| (h.edges[id as usize].clone(), t))
            .collect(),
        core_edges,
        core_vertices,
        m1,
    }
}

/// Peels edges through degree-1 vertices until none are left.
///
/// Degree-1 vertices are processed first-in first-out (initially in
/// ascending order); the recorded trigger is the smallest degree-1 vertex of
/// the removed edge. Vertices whose degree drops to 0 are not in the core.
pub fn peel_two_core(h: &Hypergraph) -> PeelResult {
    let (peeled, deg) = peel_indices(h, &mut VecDeque::new());
    assemble(h, peeled, deg)
}

/// Same as [`peel_two_core`] but picks the next degree-1 vertex at random.
/// The core does not depend on the order; the trace does.
pub fn peel_two_core_random_order<R: Rng>(h: &Hypergraph, rng: &mut R) -> PeelResult {
    let (peeled, deg) = peel_indices(
        h,
        &mut RandomQueue {
            items: Vec::new(),
            rng,
        },
    );
    assemble(h, peeled, deg)
}

/// Largest vertex count accepted by [`two_core_oracle`].
pub const TWO_CORE_ORACLE_MAX_N: usize = 16;

/// 2-core by exhaustive search: the union of all vertex sets whose induced
/// sub-hypergraph has minimum degree at least 2 (itself such a set).
pub fn two_core_oracle(h: &Hypergraph) -> Result<Vec<u32>> {
    if h.n > TWO_CORE_ORACLE_MAX_N {
        return Err(Error::TooLarge {
            what: "vertex count for the exhaustive 2-core",
            value: h.n as u128,
            limit: TWO_CORE_ORACLE_MAX_N as u128,
        });
    }
    let masks: Vec<u32> = h
        .edges
        .iter()
        .map(|e| e.indices().iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();
    let mut union = 0u32;
    let mut deg = vec![0u32; h.n];
    for set in 1u32..(1u32 << h.n) {
        deg.fill(0);
        for &em in &masks {
            if em & set == em {
                let mut b = em;
                while b != 0 {
                    deg[b.trailing_zeros() as usize] += 1;
                    b &= b - 1;
                }
            }
        }
        let ok = (0..h.n).filter(|&v| set >> v & 1 == 1).all(|v| deg[v] >= 2);
        if ok {
            union |= set;
        }
    }
    Ok((0..h.n as u32).filter(|&v| union >> v & 1 == 1).collect())
}

/// The three sides of `rank(A) = m1 + rank(core)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeelRankIdentity {
    pub total_rank: usize,
    pub m1: usize,
    pub core_rank: usize,
}

/// Computes both ranks by dense elimination and checks the identity.
pub fn peel_rank_identity_check(h: &Hypergraph) -> Result<PeelRankIdentity> {
    let total_rank = rank(&h.incidence_matrix());
    let peel = peel_two_core(h);
    let core_rank = rank(&peel.core(h.n, h.k).incidence_matrix());
    if total_rank != peel.m1 + core_rank {
        return Err(Error::IdentityViolation {
            total_rank,
            m1: peel.m1,
            core_rank,
            instance: h.to_text(),
        });
    }
    Ok(PeelRankIdentity {
        total_rank,
        m1: peel.m1,
        core_rank,
    })
}

/// Rank obtained as `m1 + rank(core)`, with the core handled by lazy
/// elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoreRank {
    pub rank: usize,
    pub m1: usize,
    pub core_vertices: usize,
    pub core_edges: usize,
    pub core_rank: usize,
    pub elimination: LazyRank,
}

/// Rank of the incidence matrix, fast path for large instances.
///
/// After peeling, the core edges are eliminated as equations over the core
/// vertices. Each equation has exactly `k` variables, which keeps the dense
/// remainder of the lazy elimination small on both sides of the threshold.
pub fn rank_via_core(h: &Hypergraph) -> CoreRank {
    let (peeled, deg) = peel_indices(h, &mut VecDeque::new());
    let mut removed = vec![false; h.edges.len()];
    for &(id, _) in &peeled {
        removed[id as usize] = true;
    }
    let mut label = vec![u32::MAX; h.n];
    let mut nv = 0u32;
    for (v, &d) in deg.iter().enumerate() {
        if d > 0 {
            label[v] = nv;
            nv += 1;
        }
    }
    let core: Vec<&ColumnSet> = h
        .edges
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(e, _)| e)
        .collect();
    let nv = nv as usize;
    let ne = core.len();
    let eqs: Vec<Indices> = core
        .iter()
        .map(|e| e.indices().iter().map(|&v| label[v as usize]).collect())
        .collect();
    let elimination = lazy_rank(nv, &eqs);
    CoreRank {
        rank: peeled.len() + elimination.rank,
        m1: peeled.len(),
        core_vertices: nv,
        core_edges: ne,
        core_rank: elimination.rank,
        elimination,
    }
}
