//! Lazy (structured) Gaussian elimination for large sparse systems.
//!
//! Equations are sparse sets of variables. Variables start *idle*. An
//! equation with a single idle variable is *solved* on it: the variable
//! becomes its pivot and is eliminated from every other equation that
//! contains it. When no equation is solvable, the idle variable with the most
//! occurrences is made *active*; active variables are kept as dense bit
//! columns. Equations that run out of idle variables without being solved end
//! up in a small dense system over the active variables.
//!
//! Solved equations form a triangular block (each pivot appears in no later
//! equation after elimination), so
//! `rank = #solved + rank(dense system)`.
//!
//! The symbolic pass only tracks idle counts, which do not depend on the
//! active parts; the numeric pass then rebuilds the active parts in solve
//! order.

use super::{words_for, xor_words, EchelonBasis};

/// Outcome of [`lazy_rank`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LazyRank {
    pub rank: usize,
    pub solved: usize,
    pub active: usize,
    pub dense_equations: usize,
    pub dense_rank: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarState {
    Idle,
    Active(u32),
    Solved(u32),
}

/// Rank of a set of sparse GF(2) equations over `nvars` variables.
///
/// Every equation must list distinct variables, each `< nvars`.
pub fn lazy_rank<E: AsRef<[u32]>>(nvars: usize, equations: &[E]) -> LazyRank {
    let neq = equations.len();

    // occurrence lists, CSR
    let mut offsets = vec![0u32; nvars + 1];
    for eq in equations {
        for &v in eq.as_ref() {
            debug_assert!((v as usize) < nvars);
            offsets[v as usize + 1] += 1;
        }
    }
    for i in 0..nvars {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut occ = vec![0u32; offsets[nvars] as usize];
    for (e, eq) in equations.iter().enumerate() {
        for &v in eq.as_ref() {
            occ[fill[v as usize] as usize] = e as u32;
            fill[v as usize] += 1;
        }
    }
    let occurrences = |v: usize| &occ[offsets[v] as usize..offsets[v + 1] as usize];

    let mut activation_order: Vec<u32> = (0..nvars as u32)
        .filter(|&v| offsets[v as usize + 1] > offsets[v as usize])
        .collect();
    activation_order.sort_by_key(|&v| {
        std::cmp::Reverse(offsets[v as usize + 1] - offsets[v as usize])
    });
    let mut next_activation = 0;

    let mut state = vec![VarState::Idle; nvars];
    let mut idle: Vec<u32> = equations.iter().map(|e| e.as_ref().len() as u32).collect();
    let mut done = vec![false; neq];
    let mut stack: Vec<u32> = (0..neq as u32).filter(|&e| idle[e as usize] <= 1).collect();
    stack.reverse();
    let mut solved: Vec<(u32, u32)> = Vec::new();
    let mut dense: Vec<u32> = Vec::new();
    let mut n_active = 0u32;
    let mut remaining = neq;

    while remaining > 0 {
        if let Some(e) = stack.pop() {
            let eu = e as usize;
            if done[eu] {
                continue;
            }
            done[eu] = true;
            remaining -= 1;
            if idle[eu] == 0 {
                dense.push(e);
                continue;
            }
            let pivot = *equations[eu]
                .as_ref()
                .iter()
                .find(|&&v| state[v as usize] == VarState::Idle)
                .expect("equation with one idle variable");
            state[pivot as usize] = VarState::Solved(solved.len() as u32);
            solved.push((e, pivot));
            for &f in occurrences(pivot as usize) {
                let fu = f as usize;
                if !done[fu] {
                    idle[fu] -= 1;
                    if idle[fu] <= 1 {
                        stack.push(f);
                    }
                }
            }
            continue;
        }
        // nothing solvable: activate the heaviest idle variable
        let v = loop {
            let v = activation_order[next_activation];
            next_activation += 1;
            if state[v as usize] == VarState::Idle {
                break v;
            }
        };
        state[v as usize] = VarState::Active(n_active);
        n_active += 1;
        for &f in occurrences(v as usize) {
            let fu = f as usize;
            if !done[fu] {
                idle[fu] -= 1;
                if idle[fu] <= 1 {
                    stack.push(f);
                }
            }
        }
    }

    // numeric pass
    let active = n_active as usize;
    let words = words_for(active).max(1);
    // pivots that occur in a single equation are never eliminated elsewhere
    let mut slot: Vec<u32> = vec![u32::MAX; solved.len()];
    let mut store: Vec<u64> = Vec::new();
    let mut row = vec![0u64; words];
    let build_row = |eq: &[u32], skip: u32, row: &mut Vec<u64>, slot: &[u32], store: &[u64]| {
        row.fill(0);
        for &v in eq {
            match state[v as usize] {
                VarState::Active(a) => row[a as usize >> 6] ^= 1 << (a & 63),
                VarState::Solved(s) if v != skip => {
                    let base = slot[s as usize];
                    debug_assert!(base != u32::MAX, "solved pivot needed but not stored");
                    let base = base as usize * words;
                    xor_words(row, &store[base..base + words]);
                }
                _ => {}
            }
        }
    };
    let mut stored = 0u32;
    for (s, &(e, pivot)) in solved.iter().enumerate() {
        if occurrences(pivot as usize).len() < 2 {
            continue;
        }
        build_row(equations[e as usize].as_ref(), pivot, &mut row, &slot, &store);
        slot[s] = stored;
        stored += 1;
        store.extend_from_slice(&row);
    }

    let mut basis = EchelonBasis::new(words * 64);
    for &e in &dense {
        if basis.rank() == active {
            break;
        }
        build_row(equations[e as usize].as_ref(), u32::MAX, &mut row, &slot, &store);
        basis.insert(&mut row);
    }

    LazyRank {
        rank: solved.len() + basis.rank(),
        solved: solved.len(),
        active,
        dense_equations: dense.len(),
        dense_rank: basis.rank(),
    }
}
