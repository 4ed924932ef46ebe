use std::collections::BTreeSet;
use std::ops::ControlFlow;

use num_traits::ToPrimitive;

use super::{Mode, VerifierError, DEFAULT_TUPLE_BUDGET};
use crate::poly::Polynomial;

/// A polynomial with machine-integer coefficients, ready for fast evaluation.
pub(crate) struct Compiled {
    pub vars: Vec<String>,
    /// `(coefficient, exponent per variable)`.
    pub terms: Vec<(i128, Vec<u32>)>,
}

impl Compiled {
    pub fn new(p: &Polynomial) -> Result<Self, VerifierError> {
        p.require_polynomial_mode()?;
        if p.num_vars() == 0 {
            return Err(VerifierError::NoVariables);
        }
        let terms = p
            .terms()
            .map(|(alpha, c)| {
                let c = c.to_i128().ok_or(VerifierError::Overflow)?;
                let e = alpha.exponents().iter().map(|&a| a as u32).collect();
                Ok((c, e))
            })
            .collect::<Result<_, VerifierError>>()?;
        Ok(Compiled {
            vars: p.variables().to_vec(),
            terms,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    #[cfg(test)]
    pub fn eval(&self, tuple: &[u64]) -> Result<i128, VerifierError> {
        let mut total: i128 = 0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.checked_mul(ipow(tuple[i] as i128, k)?).ok_or(VerifierError::Overflow)?;
                }
            }
            total = total.checked_add(t).ok_or(VerifierError::Overflow)?;
        }
        Ok(total)
    }

    /// `N^(n−1)`: partial tuples visited without pruning (the last variable
    /// is solved for, not enumerated).
    pub fn estimate(&self, n: u64) -> u128 {
        let mut est: u128 = 1;
        for _ in 1..self.num_vars() {
            est = est.saturating_mul(n as u128);
        }
        est
    }
}

pub(crate) fn ipow(base: i128, e: u32) -> Result<i128, VerifierError> {
    base.checked_pow(e).ok_or(VerifierError::Overflow)
}

/// Depth-first enumeration of `[1..n]^vars` in lexicographic order with
/// interval pruning.
pub(crate) struct Enumerator<'a> {
    c: &'a Compiled,
    n: u64,
    // suffix_max[k][t]: largest value of term t's monomial over variables ≥ k
    suffix_max: Vec<Vec<i128>>,
}

impl<'a> Enumerator<'a> {
    pub fn new(c: &'a Compiled, n: u64) -> Self {
        let nv = c.num_vars();
        let mut suffix_max = vec![vec![1i128; c.terms.len()]; nv + 1];
        for k in (0..nv).rev() {
            for (t, (_, e)) in c.terms.iter().enumerate() {
                let f = (n as i128).saturating_pow(e[k]);
                suffix_max[k][t] = suffix_max[k + 1][t].saturating_mul(f);
            }
        }
        Enumerator { c, n, suffix_max }
    }

    /// Calls `visit` on every solution whose values pass `allowed(depth,
    /// partial, value)`. Stops early when `visit` breaks.
    pub fn run<F, G>(&self, allowed: F, mut visit: G) -> Result<(), VerifierError>
    where
        F: Fn(usize, &[u64], u64) -> bool,
        G: FnMut(&[u64]) -> ControlFlow<()>,
    {
        let acc: Vec<i128> = self.c.terms.iter().map(|(c, _)| *c).collect();
        let mut partial = Vec::with_capacity(self.c.num_vars());
        let _ = self.rec(0, &mut partial, &acc, &allowed, &mut visit)?;
        Ok(())
    }

    fn rec<F, G>(
        &self,
        k: usize,
        partial: &mut Vec<u64>,
        acc: &[i128],
        allowed: &F,
        visit: &mut G,
    ) -> Result<ControlFlow<()>, VerifierError>
    where
        F: Fn(usize, &[u64], u64) -> bool,
        G: FnMut(&[u64]) -> ControlFlow<()>,
    {
        let nv = self.c.num_vars();
        if k + 1 == nv {
            for x in self.solve_last(k, acc)? {
                if allowed(k, partial, x) {
                    partial.push(x);
                    let flow = visit(partial);
                    partial.pop();
                    if flow.is_break() {
                        return Ok(flow);
                    }
                }
            }
            return Ok(ControlFlow::Continue(()));
        }
        let mut next = acc.to_vec();
        for v in 1..=self.n {
            if !allowed(k, partial, v) {
                continue;
            }
            let mut lo: i128 = 0;
            let mut hi: i128 = 0;
            for (t, (_, e)) in self.c.terms.iter().enumerate() {
                let a = acc[t]
                    .checked_mul(ipow(v as i128, e[k])?)
                    .ok_or(VerifierError::Overflow)?;
                next[t] = a;
                let m = self.suffix_max[k + 1][t];
                let far = a.saturating_mul(m);
                if a >= 0 {
                    lo = lo.saturating_add(a);
                    hi = hi.saturating_add(far);
                } else {
                    lo = lo.saturating_add(far);
                    hi = hi.saturating_add(a);
                }
            }
            if lo > 0 || hi < 0 {
                continue;
            }
            partial.push(v);
            let flow = self.rec(k + 1, partial, &next, allowed, visit)?;
            partial.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    // Roots in [1..n] of the univariate polynomial left in variable k.
    fn solve_last(&self, k: usize, acc: &[i128]) -> Result<Vec<u64>, VerifierError> {
        let mut coeffs: Vec<i128> = Vec::new();
        for (t, (_, e)) in self.c.terms.iter().enumerate() {
            let d = e[k] as usize;
            if coeffs.len() <= d {
                coeffs.resize(d + 1, 0);
            }
            coeffs[d] = coeffs[d].checked_add(acc[t]).ok_or(VerifierError::Overflow)?;
        }
        let a0 = coeffs[0];
        let active: Vec<usize> = (1..coeffs.len()).filter(|&d| coeffs[d] != 0).collect();
        let eval = |x: u64| -> Result<i128, VerifierError> {
            let mut s: i128 = 0;
            for (d, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    let t = c.checked_mul(ipow(x as i128, d as u32)?).ok_or(VerifierError::Overflow)?;
                    s = s.checked_add(t).ok_or(VerifierError::Overflow)?;
                }
            }
            Ok(s)
        };
        match active[..] {
            [] => Ok(if a0 == 0 { (1..=self.n).collect() } else { Vec::new() }),
            [d] => {
                let c = coeffs[d];
                if a0 % c != 0 {
                    return Ok(Vec::new());
                }
                let q = -a0 / c;
                Ok(integer_root(q, d as u32)
                    .filter(|&r| r >= 1 && r <= self.n as i128)
                    .map(|r| vec![r as u64])
                    .unwrap_or_default())
            }
            _ if active.iter().all(|&d| coeffs[d] > 0) || active.iter().all(|&d| coeffs[d] < 0) => {
                // Strictly monotone on x ≥ 1.
                let sign = coeffs[active[0]].signum();
                let (mut lo, mut hi) = (1u64, self.n);
                while lo <= hi {
                    let mid = lo + (hi - lo) / 2;
                    let v = eval(mid)? * sign;
                    match v.cmp(&0) {
                        std::cmp::Ordering::Equal => return Ok(vec![mid]),
                        std::cmp::Ordering::Less => lo = mid + 1,
                        std::cmp::Ordering::Greater => {
                            if mid == 1 {
                                break;
                            }
                            hi = mid - 1
                        }
                    }
                }
                Ok(Vec::new())
            }
            _ => {
                let mut out = Vec::new();
                for x in 1..=self.n {
                    if eval(x)? == 0 {
                        out.push(x);
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Nonnegative integer `r` with `r^e = q`.
fn integer_root(q: i128, e: u32) -> Option<i128> {
    if q < 0 {
        return None;
    }
    if e == 1 || q < 2 {
        return Some(q);
    }
    let guess = (q as f64).powf(1.0 / e as f64).round() as i128;
    (guess.saturating_sub(2).max(0)..=guess + 2).find(|r| r.checked_pow(e) == Some(q))
}

/// All tuples in `[1..n]^vars` with `P = 0` that `mode` accepts, in
/// lexicographic order.
pub fn enumerate_solutions(
    p: &Polynomial,
    n: u64,
    mode: &Mode,
) -> Result<Vec<Vec<u64>>, VerifierError> {
    enumerate_solutions_with_budget(p, n, mode, DEFAULT_TUPLE_BUDGET)
}

pub fn enumerate_solutions_with_budget(
    p: &Polynomial,
    n: u64,
    mode: &Mode,
    budget: u128,
) -> Result<Vec<Vec<u64>>, VerifierError> {
    let c = Compiled::new(p)?;
    let estimate = c.estimate(n);
    if estimate > budget {
        return Err(VerifierError::BudgetExceeded { estimate, budget });
    }
    let mode = mode.resolve(&c.vars)?;
    let mut out = Vec::new();
    Enumerator::new(&c, n).run(
        |_, _, _| true,
        |t| {
            if mode.accepts(t) {
                out.push(t.to_vec());
            }
            ControlFlow::Continue(())
        },
    )?;
    Ok(out)
}

/// Distinct value sets of the given tuples, sorted.
pub fn value_sets(solutions: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let sets: BTreeSet<Vec<u64>> = solutions
        .iter()
        .map(|t| {
            let mut s = t.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    sets.into_iter().collect()
}
