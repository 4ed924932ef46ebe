//! Zero-sum subset search.
//!
//! Returns the smallest nonempty subset whose values sum to zero, breaking
//! ties by lexicographic order of the sorted index list. Up to
//! [`ENUMERATION_LIMIT`] values are handled by direct enumeration; larger
//! inputs (up to [`MAX_VALUES`]) go through meet-in-the-middle.

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

pub const ENUMERATION_LIMIT: usize = 20;
pub const MAX_VALUES: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubsetSumError {
    #[error("subset-sum input has {0} values; at most {MAX_VALUES} are supported")]
    TooMany(usize),
    #[error("subset sum overflowed 128-bit arithmetic")]
    Overflow,
}

pub fn zero_sum_subset(values: &[i128]) -> Result<Option<Vec<usize>>, SubsetSumError> {
    let n = values.len();
    if n > MAX_VALUES {
        return Err(SubsetSumError::TooMany(n));
    }
    if n <= ENUMERATION_LIMIT {
        enumerate(values)
    } else {
        meet_in_the_middle(values)
    }
}

fn enumerate(values: &[i128]) -> Result<Option<Vec<usize>>, SubsetSumError> {
    let n = values.len();
    for size in 1..=n {
        for combo in (0..n).combinations(size) {
            let mut sum: i128 = 0;
            for &i in &combo {
                sum = sum.checked_add(values[i]).ok_or(SubsetSumError::Overflow)?;
            }
            if sum == 0 {
                return Ok(Some(combo));
            }
        }
    }
    Ok(None)
}

// Bit i of a mask selects element i of the half.
fn half_sums(values: &[i128]) -> Result<Vec<i128>, SubsetSumError> {
    let m = values.len();
    let mut sums = vec![0i128; 1 << m];
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)]
            .checked_add(values[low])
            .ok_or(SubsetSumError::Overflow)?;
    }
    Ok(sums)
}

// For equal-size sets, the lexicographically smaller sorted list owns the
// lowest differing element.
fn lex_less_same_size(a: u64, b: u64) -> bool {
    let d = a ^ b;
    d != 0 && (a & (d & d.wrapping_neg())) != 0
}

fn mask_to_indices(mask: u64, offset: usize) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + offset).collect()
}

fn meet_in_the_middle(values: &[i128]) -> Result<Option<Vec<usize>>, SubsetSumError> {
    let n = values.len();
    let split = n / 2;
    let (left, right) = values.split_at(split);
    let left_sums = half_sums(left)?;
    let right_sums = half_sums(right)?;

    // (sum, size) -> lexicographically smallest right subset with that profile.
    let mut best_right: HashMap<(i128, u32), u64> = HashMap::new();
    for (mask, &s) in right_sums.iter().enumerate() {
        let mask = mask as u64;
        let size = mask.count_ones();
        best_right
            .entry((s, size))
            .and_modify(|m| {
                if lex_less_same_size(mask, *m) {
                    *m = mask;
                }
            })
            .or_insert(mask);
    }

    for total in 1..=n as u32 {
        let mut best: Option<Vec<usize>> = None;
        for (lmask, &ls) in left_sums.iter().enumerate() {
            let lsize = (lmask as u64).count_ones();
            if lsize > total {
                continue;
            }
            let need = ls.checked_neg().ok_or(SubsetSumError::Overflow)?;
            if let Some(&rmask) = best_right.get(&(need, total - lsize)) {
                let mut cand = mask_to_indices(lmask as u64, 0);
                cand.extend(mask_to_indices(rmask, split));
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}
