use std::collections::HashSet;
use std::ops::ControlFlow;

use super::solutions::{ipow, Compiled, Enumerator};
use super::{Coloring, Mode, VerifierError, DEFAULT_TUPLE_BUDGET};
use crate::poly::Polynomial;

/// First monochromatic solution under `mode` in lexicographic order, if any.
pub fn check_coloring(
    p: &Polynomial,
    coloring: &Coloring,
    mode: &Mode,
) -> Result<Option<Vec<u64>>, VerifierError> {
    let c = Compiled::new(p)?;
    let resolved = mode.resolve(&c.vars)?;
    let n = coloring.n();
    if n == 0 {
        return Ok(None);
    }
    let split = Split::new(&c);
    let known_to_exist = match &split {
        Some(s) => match s.any_monochromatic(&c, coloring)? {
            Some(false) => return Ok(None),
            Some(true) => true,
            None => false,
        },
        None => false,
    };
    if !known_to_exist {
        let estimate = c.estimate(n);
        if estimate > DEFAULT_TUPLE_BUDGET {
            return Err(VerifierError::BudgetExceeded {
                estimate,
                budget: DEFAULT_TUPLE_BUDGET,
            });
        }
    }
    let colors = coloring.colors();
    let color = |v: u64| colors[v as usize - 1];
    let mut found = None;
    Enumerator::new(&c, n).run(
        |depth, partial, v| depth == 0 || color(v) == color(partial[0]),
        |t| {
            if resolved.accepts(t) {
                found = Some(t.to_vec());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    )?;
    Ok(found)
}

/// Variables split into two groups that share no monomial, so
/// `P = A(group) + B(rest)`.
struct Split {
    group: Vec<usize>,
    rest: Vec<usize>,
}

// Largest tuple count enumerated per side and color class.
const SIDE_LIMIT: u128 = 200_000_000;
// Largest value range stored as a bitmap.
const BITMAP_LIMIT: i128 = 1 << 30;

impl Split {
    fn new(c: &Compiled) -> Option<Split> {
        let nv = c.num_vars();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        for (_, e) in &c.terms {
            let vars: Vec<usize> = (0..nv).filter(|&i| e[i] > 0).collect();
            for w in vars.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        let (group, rest): (Vec<usize>, Vec<usize>) =
            (0..nv).partition(|&i| find(&mut parent, i) == root);
        (!rest.is_empty() && nv >= 3).then_some(Split { group, rest })
    }

    // Terms (with the constant) belonging to one side.
    fn side_terms<'a>(&self, c: &'a Compiled, first: bool) -> Vec<&'a (i128, Vec<u32>)> {
        c.terms
            .iter()
            .filter(|(_, e)| {
                let in_group = self.group.iter().any(|&i| e[i] > 0);
                let constant = e.iter().all(|&k| k == 0);
                if first {
                    in_group
                } else {
                    !in_group || constant
                }
            })
            .collect()
    }

    /// Whether any solution (ignoring mode) is monochromatic; `None` when
    /// the classes are too large to tabulate.
    fn any_monochromatic(&self, c: &Compiled, coloring: &Coloring) -> Result<Option<bool>, VerifierError> {
        let a_terms = self.side_terms(c, true);
        let b_terms = self.side_terms(c, false);
        for class in coloring.classes().values() {
            let size = class.len() as u128;
            if size.saturating_pow(self.group.len() as u32) > SIDE_LIMIT
                || size.saturating_pow(self.rest.len() as u32) > SIDE_LIMIT
            {
                return Ok(None);
            }
            let (lo, hi) = range(&a_terms, &self.group, class)?;
            let mut table = ValueTable::new(lo, hi);
            for_each_value(&a_terms, &self.group, class, |v| {
                table.insert(v);
                ControlFlow::Continue(())
            })?;
            let mut hit = false;
            for_each_value(&b_terms, &self.rest, class, |v| {
                if v.checked_neg().is_some_and(|t| table.contains(t)) {
                    hit = true;
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            if hit {
                return Ok(Some(true));
            }
        }
        Ok(Some(false))
    }
}

// Bounds of Σ terms with every variable in [min, max] of the class.
fn range(terms: &[&(i128, Vec<u32>)], vars: &[usize], class: &[u64]) -> Result<(i128, i128), VerifierError> {
    let (lo_v, hi_v) = (class[0] as i128, *class.last().expect("nonempty class") as i128);
    let (mut lo, mut hi) = (0i128, 0i128);
    for (coef, e) in terms {
        let mut small = *coef;
        let mut big = *coef;
        for &i in vars {
            small = small.checked_mul(ipow(lo_v, e[i])?).ok_or(VerifierError::Overflow)?;
            big = big.checked_mul(ipow(hi_v, e[i])?).ok_or(VerifierError::Overflow)?;
        }
        lo = lo.checked_add(small.min(big)).ok_or(VerifierError::Overflow)?;
        hi = hi.checked_add(small.max(big)).ok_or(VerifierError::Overflow)?;
    }
    Ok((lo, hi))
}

fn for_each_value(
    terms: &[&(i128, Vec<u32>)],
    vars: &[usize],
    class: &[u64],
    mut f: impl FnMut(i128) -> ControlFlow<()>,
) -> Result<(), VerifierError> {
    let k = vars.len();
    let mut idx = vec![0usize; k];
    loop {
        let mut total: i128 = 0;
        for (coef, e) in terms {
            let mut t = *coef;
            for (j, &i) in vars.iter().enumerate() {
                if e[i] > 0 {
                    t = t
                        .checked_mul(ipow(class[idx[j]] as i128, e[i])?)
                        .ok_or(VerifierError::Overflow)?;
                }
            }
            total = total.checked_add(t).ok_or(VerifierError::Overflow)?;
        }
        if f(total).is_break() {
            return Ok(());
        }
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < class.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

enum ValueTable {
    Bits { lo: i128, bits: Vec<u64> },
    Hash(HashSet<i128>),
}

impl ValueTable {
    fn new(lo: i128, hi: i128) -> Self {
        if hi - lo < BITMAP_LIMIT {
            ValueTable::Bits {
                lo,
                bits: vec![0; ((hi - lo) as usize >> 6) + 1],
            }
        } else {
            ValueTable::Hash(HashSet::new())
        }
    }

    fn insert(&mut self, v: i128) {
        match self {
            ValueTable::Bits { lo, bits } => {
                let k = (v - *lo) as usize;
                bits[k >> 6] |= 1 << (k & 63);
            }
            ValueTable::Hash(h) => {
                h.insert(v);
            }
        }
    }

    fn contains(&self, v: i128) -> bool {
        match self {
            ValueTable::Bits { lo, bits } => {
                let Some(k) = v.checked_sub(*lo).filter(|k| *k >= 0) else {
                    return false;
                };
                let k = k as u128;
                (k >> 6) < bits.len() as u128 && bits[(k >> 6) as usize] >> (k & 63) & 1 == 1
            }
            ValueTable::Hash(h) => h.contains(&v),
        }
    }
}

/// Colors `k ∈ [1..n]` by the parity of the exponent of `base` in `k`.
pub fn valuation_parity_coloring(n: u64, base: u64) -> Result<Coloring, VerifierError> {
    if base < 2 {
        return Err(VerifierError::InvalidProblem("base must be at least 2".into()));
    }
    Ok(Coloring::new(
        (1..=n)
            .map(|mut k| {
                let mut v = 0u32;
                while k % base == 0 {
                    k /= base;
                    v += 1;
                }
                v % 2
            })
            .collect(),
    ))
}
