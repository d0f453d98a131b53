//! Approximating sets of a σ-field by sets of a coarser one.
//!
//! Given an event `A` and a partition `aN`, the union of `aN`-blocks closest
//! to `A` in `P(A △ B)` takes each block `C` iff `P(A ∩ C) > P(C) / 2`; the
//! resulting error is `sum_C min(P(A ∩ C), P(C) - P(A ∩ C))`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::partition::{Filtration, Partition};
use crate::space::{Event, FiniteSpace};

/// Largest number of `a`-blocks accepted by [`worst_case_error`].
pub const MAX_SEARCH_BLOCKS: usize = 20;

/// Half-mass ties within this distance exclude the block.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationResult {
    pub best_set: Event,
    /// `P(A △ best_set)`.
    pub error: f64,
    /// Filtration level (1-indexed) the approximation was taken from, if any.
    pub level: Option<usize>,
}

/// Closest union of `a_n`-blocks to `event`.
pub fn best_approximation(space: &FiniteSpace, event: &Event, a_n: &Partition) -> Result<ApproximationResult> {
    a_n.check_size(space.len())?;
    event.check(space.len())?;
    let mut chosen = Vec::new();
    for (b, block) in a_n.blocks().iter().enumerate() {
        let total = space.mass(block);
        let hit: f64 = block
            .iter()
            .filter(|&&i| event.contains(i))
            .map(|&i| space.weight(i))
            .sum();
        if hit - total / 2.0 > TIE_TOL {
            chosen.push(b);
        }
    }
    let best_set = a_n.union_of_blocks(&chosen);
    let error = space.prob(&event.sym_diff(&best_set))?;
    Ok(ApproximationResult {
        best_set,
        error,
        level: None,
    })
}

/// [`best_approximation`] against level `n` (1-indexed) of a filtration.
pub fn best_approximation_at(
    space: &FiniteSpace,
    event: &Event,
    filtration: &Filtration,
    n: usize,
) -> Result<ApproximationResult> {
    let level = filtration.level(n).ok_or_else(|| {
        Error::InvalidArgument(format!("level {n} not in 1..={}", filtration.len()))
    })?;
    let mut r = best_approximation(space, event, level)?;
    r.level = Some(n);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    /// The `a`-set with the largest approximation error.
    pub worst_set: Event,
    /// Indices of the `a`-blocks making up `worst_set`.
    pub blocks: Vec<usize>,
    pub error: f64,
}

/// Largest best-approximation error over all `a`-sets, by exhaustive search
/// over unions of `a`-blocks. Ties go to the lexicographically smallest list
/// of block indices.
pub fn worst_case_error(space: &FiniteSpace, a: &Partition, a_n: &Partition) -> Result<WorstCase> {
    a.check_size(space.len())?;
    a_n.check_size(space.len())?;
    let k = a.num_blocks();
    if k > MAX_SEARCH_BLOCKS {
        return Err(Error::OutOfRange {
            what: "number of a-blocks",
            value: k,
            range: "0..=20",
        });
    }
    // overlap[c][i] = P(a_i ∩ C_c); columns with no mass are dropped
    let mut overlap = vec![vec![0.0; k]; a_n.num_blocks()];
    for i in 0..space.len() {
        overlap[a_n.block_of(i)][a.block_of(i)] += space.weight(i);
    }
    let totals: Vec<f64> = overlap.iter().map(|row| row.iter().sum()).collect();
    let cols: Vec<usize> = (0..overlap.len()).filter(|&c| totals[c] > 0.0).collect();

    // split the block set in two halves and tabulate subset sums per half, so
    // each mask's value is a fixed function of the mask
    let lo_bits = k / 2;
    let hi_bits = k - lo_bits;
    let table = |offset: usize, bits: usize| -> Vec<Vec<f64>> {
        let mut t = vec![vec![0.0; cols.len()]; 1 << bits];
        for mask in 1usize..1 << bits {
            let low = mask.trailing_zeros() as usize;
            let prev = mask & (mask - 1);
            for (j, &c) in cols.iter().enumerate() {
                t[mask][j] = t[prev][j] + overlap[c][offset + low];
            }
        }
        t
    };
    let lo = table(0, lo_bits);
    let hi = table(lo_bits, hi_bits);

    let mut best_mask = 0usize;
    let mut best_err = f64::NEG_INFINITY;
    for mask in 0usize..1 << k {
        let (l, h) = (&lo[mask & ((1 << lo_bits) - 1)], &hi[mask >> lo_bits]);
        let err: f64 = cols
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let hit = l[j] + h[j];
                hit.min(totals[c] - hit).max(0.0)
            })
            .sum();
        let better = match err.partial_cmp(&best_err) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => lex_less(mask, best_mask),
            _ => false,
        };
        if better {
            best_err = err;
            best_mask = mask;
        }
    }
    let blocks: Vec<usize> = (0..k).filter(|&i| best_mask >> i & 1 == 1).collect();
    let worst_set = a.union_of_blocks(&blocks);
    let error = best_approximation(space, &worst_set, a_n)?.error;
    Ok(WorstCase {
        worst_set,
        blocks,
        error,
    })
}

/// Lexicographic order on the sorted index lists encoded by two masks.
fn lex_less(s: usize, t: usize) -> bool {
    let list = |m: usize| (0..usize::BITS as usize).filter(move |&i| m >> i & 1 == 1);
    list(s).lt(list(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelError {
    /// 1-indexed level.
    pub level: usize,
    pub worst: WorstCase,
}

/// Worst-case approximation error of `a`-sets at every filtration level.
pub fn approximation_table(space: &FiniteSpace, filtration: &Filtration, a: &Partition) -> Result<Vec<LevelError>> {
    filtration
        .levels()
        .iter()
        .enumerate()
        .map(|(k, level)| {
            Ok(LevelError {
                level: k + 1,
                worst: worst_case_error(space, a, level)?,
            })
        })
        .collect()
}

/// Smallest level (1-indexed) whose worst-case error is below `eps`, or
/// `None` if no level gets there.
pub fn uniform_level(space: &FiniteSpace, filtration: &Filtration, a: &Partition, eps: f64) -> Result<Option<usize>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} not in (0, 1]")));
    }
    for (k, level) in filtration.levels().iter().enumerate() {
        if worst_case_error(space, a, level)?.error < eps {
            return Ok(Some(k + 1));
        }
    }
    Ok(None)
}
