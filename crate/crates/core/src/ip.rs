//! Finite sums and products of generator sequences, and window statistics.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IpError {
    #[error("generators must be positive and strictly increasing")]
    NotIncreasing,
    #[error("k = {k} is out of range 1..={len}")]
    KOutOfRange { k: usize, len: usize },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("{0} is outside [1..N]")]
    OutOfBounds(u64),
    #[error("window length {n} must be between 1 and N = {big_n}")]
    BadWindow { n: u64, big_n: u64 },
    #[error("N must be at least 1")]
    EmptyRange,
}

/// Strictly increasing positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct GeneratorSequence(Vec<u64>);

impl GeneratorSequence {
    pub fn new(generators: Vec<u64>) -> Result<Self, IpError> {
        if generators.first() == Some(&0) || generators.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IpError::NotIncreasing);
        }
        Ok(GeneratorSequence(generators))
    }

    pub fn generators(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn prefix(&self, k: usize) -> Result<&[u64], IpError> {
        if k == 0 || k > self.0.len() {
            return Err(IpError::KOutOfRange { k, len: self.0.len() });
        }
        Ok(&self.0[..k])
    }
}

impl TryFrom<Vec<u64>> for GeneratorSequence {
    type Error = IpError;

    fn try_from(v: Vec<u64>) -> Result<Self, IpError> {
        GeneratorSequence::new(v)
    }
}

impl From<GeneratorSequence> for Vec<u64> {
    fn from(g: GeneratorSequence) -> Self {
        g.0
    }
}

fn combine(gens: &[u64], op: impl Fn(u64, u64) -> Option<u64>) -> Result<Vec<u64>, IpError> {
    let mut out: BTreeSet<u64> = BTreeSet::new();
    for &g in gens {
        let mut next = out.clone();
        next.insert(g);
        for &s in &out {
            next.insert(op(s, g).ok_or(IpError::Overflow)?);
        }
        out = next;
    }
    Ok(out.into_iter().collect())
}

/// Sums over nonempty subsets of the first `k` generators, sorted.
pub fn finite_sums(g: &GeneratorSequence, k: usize) -> Result<Vec<u64>, IpError> {
    combine(g.prefix(k)?, u64::checked_add)
}

/// Products over nonempty subsets of the first `k` generators, sorted.
pub fn finite_products(g: &GeneratorSequence, k: usize) -> Result<Vec<u64>, IpError> {
    combine(g.prefix(k)?, u64::checked_mul)
}

/// Greedy subsequence whose finite sums are pairwise distinct: each next
/// generator is the least one exceeding the sum of those already taken.
pub fn injective_sub_ip(g: &GeneratorSequence) -> GeneratorSequence {
    let mut out = Vec::new();
    let mut total: u64 = 0;
    for &x in g.generators() {
        if out.is_empty() || x > total {
            out.push(x);
            match total.checked_add(x) {
                Some(t) => total = t,
                None => break,
            }
        }
    }
    GeneratorSequence(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "generators", rename_all = "snake_case")]
pub enum IpLargeness {
    Found(GeneratorSequence),
    /// Nothing within `[1..N]`; says nothing about the infinite set.
    NotFoundAtScale,
}

/// Looks for `k` generators whose finite sums all lie in `a ⊆ [1..n]`.
pub fn is_ip_large_at_scale(a: &BTreeSet<u64>, k: usize, n: u64) -> Result<IpLargeness, IpError> {
    if k == 0 {
        return Err(IpError::KOutOfRange { k, len: 0 });
    }
    if let Some(&x) = a.iter().find(|&&x| x == 0 || x > n) {
        return Err(IpError::OutOfBounds(x));
    }
    let candidates: Vec<u64> = a.iter().copied().collect();
    let mut chosen = Vec::with_capacity(k);
    let sums = BTreeSet::new();
    if extend(a, &candidates, 0, k, &mut chosen, &sums) {
        return Ok(IpLargeness::Found(GeneratorSequence(chosen)));
    }
    Ok(IpLargeness::NotFoundAtScale)
}

fn extend(
    a: &BTreeSet<u64>,
    candidates: &[u64],
    from: usize,
    k: usize,
    chosen: &mut Vec<u64>,
    sums: &BTreeSet<u64>,
) -> bool {
    if chosen.len() == k {
        return true;
    }
    for (i, &g) in candidates.iter().enumerate().skip(from) {
        if !sums.iter().all(|s| a.contains(&(s + g))) {
            continue;
        }
        let mut next = sums.clone();
        next.insert(g);
        next.extend(sums.iter().map(|s| s + g));
        chosen.push(g);
        if extend(a, candidates, i + 1, k, chosen, &next) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn count_in(a: &BTreeSet<u64>, lo: u64, hi: u64) -> u64 {
    a.range(lo..=hi).count() as u64
}

/// `|A ∩ [1..N]| / N`.
pub fn upper_density_window(a: &BTreeSet<u64>, n: u64) -> Result<Ratio<u64>, IpError> {
    if n == 0 {
        return Err(IpError::EmptyRange);
    }
    Ok(Ratio::new(count_in(a, 1, n), n))
}

/// Largest `|A ∩ I| / len` over intervals `I ⊆ [1..N]` of length `len`.
pub fn banach_density_window(a: &BTreeSet<u64>, n: u64, len: u64) -> Result<Ratio<u64>, IpError> {
    if len == 0 || len > n {
        return Err(IpError::BadWindow { n: len, big_n: n });
    }
    let mut count = count_in(a, 1, len);
    let mut best = count;
    for start in 2..=n - len + 1 {
        if a.contains(&(start - 1)) {
            count -= 1;
        }
        if a.contains(&(start + len - 1)) {
            count += 1;
        }
        best = best.max(count);
    }
    Ok(Ratio::new(best, len))
}
