//! Exact multi-index polynomials over named variables.
//!
//! A [`Polynomial`] stores `Σ c_α x^α` as a sorted map from [`MultiIndex`]
//! to a nonzero [`BigInt`] coefficient. Terms are kept in graded-lex order
//! (ascending total degree, then descending exponent vector), which is also
//! the order used by `Display`.
//!
//! The `laurent` flag allows negative exponents. Analyses that only make
//! sense for ordinary polynomials reject Laurent input up front.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subset_sum::{self, SubsetSumError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("operation requires polynomial mode (no negative exponents)")]
    LaurentNotAllowed,
    #[error("negative exponent on `{0}` outside Laurent mode")]
    NegativeExponent(String),
    #[error("multi-index has length {found}, expected {expected}")]
    IndexLength { expected: usize, found: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` is not assigned")]
    MissingVariable(String),
    #[error("substitution would capture variable `{0}`")]
    VariableCapture(String),
    #[error("cannot substitute a non-monomial into a negative power of `{0}`")]
    NonInvertibleSubstitution(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("too many indexes to enumerate ({0})")]
    TooManyIndexes(usize),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("constant coefficient {0} is too large for root enumeration")]
    RootSearchTooLarge(BigInt),
    #[error("division by zero while evaluating a Laurent polynomial")]
    DivisionByZero,
    #[error(transparent)]
    SubsetSum(#[from] SubsetSumError),
}

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i32>);

impl MultiIndex {
    pub fn new(exponents: Vec<i32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, position: usize) -> Self {
        let mut e = vec![0; n];
        e[position] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Length `|α|`, the sum of the entries.
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn has_negative(&self) -> bool {
        self.0.iter().any(|&e| e < 0)
    }

    /// Positions with a nonzero exponent.
    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, _)| i)
    }

    /// Componentwise `self ≤ other`.
    pub fn le_componentwise(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Strict componentwise order: `≤` and not equal.
    pub fn lt_componentwise(&self, other: &MultiIndex) -> bool {
        self != other && self.le_componentwise(other)
    }

    fn checked_add(&self, other: &MultiIndex) -> Result<MultiIndex, PolyError> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(PolyError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()
            .map(MultiIndex)
    }

    fn checked_scale(&self, k: i32) -> Result<MultiIndex, PolyError> {
        self.0
            .iter()
            .map(|a| a.checked_mul(k).ok_or(PolyError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()
            .map(MultiIndex)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Integer polynomial (or Laurent polynomial) over an ordered list of named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<MultiIndex, BigInt>,
    laurent: bool,
}

impl Polynomial {
    pub fn zero(vars: Vec<String>) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
            laurent: false,
        }
    }

    pub fn constant(vars: Vec<String>, c: impl Into<BigInt>) -> Self {
        let n = vars.len();
        let mut p = Self::zero(vars);
        p.add_term(MultiIndex::zeros(n), c.into());
        p
    }

    pub fn variable(vars: Vec<String>, position: usize) -> Self {
        let n = vars.len();
        let mut p = Self::zero(vars);
        p.add_term(MultiIndex::unit(n, position), BigInt::one());
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I, C>(vars: Vec<String>, terms: I, laurent: bool) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<i32>, C)>,
        C: Into<BigInt>,
    {
        check_distinct(&vars)?;
        let mut p = Polynomial {
            vars,
            terms: BTreeMap::new(),
            laurent,
        };
        for (exps, c) in terms {
            if exps.len() != p.vars.len() {
                return Err(PolyError::IndexLength {
                    expected: p.vars.len(),
                    found: exps.len(),
                });
            }
            if !laurent {
                if let Some(i) = exps.iter().position(|&e| e < 0) {
                    return Err(PolyError::NegativeExponent(p.vars[i].clone()));
                }
            }
            p.add_term(MultiIndex(exps), c.into());
        }
        Ok(p)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_laurent(&self) -> bool {
        self.laurent
    }

    /// Returns a copy with the Laurent flag set.
    pub fn into_laurent(mut self) -> Self {
        self.laurent = true;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &BigInt)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> BigInt {
        self.terms.get(alpha).cloned().unwrap_or_default()
    }

    /// `supp(P)`: indexes with nonzero coefficient, in graded-lex order.
    pub fn support(&self) -> Vec<MultiIndex> {
        self.terms.keys().cloned().collect()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&MultiIndex::zeros(self.num_vars()))
    }

    pub fn has_constant_term(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Largest `|α|` over the support; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Variables that actually occur in some term.
    pub fn used_variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|a| a.variables()).collect()
    }

    pub fn used_variable_names(&self) -> BTreeSet<String> {
        self.used_variables()
            .into_iter()
            .map(|i| self.vars[i].clone())
            .collect()
    }

    pub fn require_polynomial_mode(&self) -> Result<(), PolyError> {
        if self.terms.keys().any(MultiIndex::has_negative) {
            Err(PolyError::LaurentNotAllowed)
        } else {
            Ok(())
        }
    }

    fn same_space(&self, terms: BTreeMap<MultiIndex, BigInt>, laurent: bool) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms,
            laurent,
        }
    }

    /// Re-expresses `self` over `target` variables (which must contain all used ones).
    pub fn embed(&self, target: &[String]) -> Result<Self, PolyError> {
        check_distinct(target)?;
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v))
            .collect();
        for i in self.used_variables() {
            if map[i].is_none() {
                return Err(PolyError::MissingVariable(self.vars[i].clone()));
            }
        }
        let mut out = Polynomial {
            vars: target.to_vec(),
            terms: BTreeMap::new(),
            laurent: self.laurent,
        };
        for (alpha, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in alpha.0.iter().enumerate() {
                if x != 0 {
                    e[map[i].expect("checked above")] = x;
                }
            }
            out.add_term(MultiIndex(e), c.clone());
        }
        Ok(out)
    }

    /// Drops variables that occur in no term.
    pub fn drop_unused_variables(&self) -> Self {
        let used = self.used_variables();
        let vars: Vec<String> = used.iter().map(|&i| self.vars[i].clone()).collect();
        self.embed(&vars).expect("used variables are kept")
    }

    /// Variable list union (self's order first) and both operands embedded in it.
    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        (
            self.embed(&vars).expect("superset"),
            other.embed(&vars).expect("superset"),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        a.laurent |= b.laurent;
        for (alpha, c) in b.terms {
            a.add_term(alpha, c);
        }
        a
    }

    pub fn neg(&self) -> Self {
        self.same_space(
            self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            self.laurent,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars.clone());
        }
        self.same_space(
            self.terms.iter().map(|(a, c)| (a.clone(), c * k)).collect(),
            self.laurent,
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        let (a, b) = self.aligned(other);
        let mut out = Polynomial {
            vars: a.vars.clone(),
            terms: BTreeMap::new(),
            laurent: a.laurent || b.laurent,
        };
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                out.add_term(ka.checked_add(kb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, PolyError> {
        let mut acc = Self::constant(self.vars.clone(), 1);
        acc.laurent = self.laurent;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiplies every term by the monomial `x^shift`.
    pub fn shift(&self, shift: &MultiIndex) -> Result<Self, PolyError> {
        let mut terms = BTreeMap::new();
        for (a, c) in &self.terms {
            terms.insert(a.checked_add(shift)?, c.clone());
        }
        let laurent = self.laurent || terms.keys().any(MultiIndex::has_negative);
        Ok(self.same_space(terms, laurent))
    }

    /// Evaluates at a positional assignment (one value per variable).
    pub fn evaluate_at(&self, values: &[BigInt]) -> Result<BigInt, PolyError> {
        if values.len() != self.num_vars() {
            return Err(PolyError::IndexLength {
                expected: self.num_vars(),
                found: values.len(),
            });
        }
        self.require_polynomial_mode()?;
        let mut total = BigInt::zero();
        for (alpha, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in alpha.0.iter().enumerate() {
                if e != 0 {
                    t *= num_traits::pow(values[i].clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Evaluates at a named assignment. Every variable of the polynomial must be assigned.
    pub fn evaluate(&self, assignment: &BTreeMap<String, BigInt>) -> Result<BigInt, PolyError> {
        let values = self
            .vars
            .iter()
            .map(|v| {
                assignment
                    .get(v)
                    .cloned()
                    .ok_or_else(|| PolyError::MissingVariable(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.evaluate_at(&values)
    }

    /// Exact rational evaluation; works in Laurent mode.
    pub fn evaluate_rational(&self, values: &[BigRational]) -> Result<BigRational, PolyError> {
        if values.len() != self.num_vars() {
            return Err(PolyError::IndexLength {
                expected: self.num_vars(),
                found: values.len(),
            });
        }
        let mut total = BigRational::zero();
        for (alpha, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (i, &e) in alpha.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(values[i].clone(), e as usize);
                } else if e < 0 {
                    if values[i].is_zero() {
                        return Err(PolyError::DivisionByZero);
                    }
                    t /= num_traits::pow(values[i].clone(), (-e) as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    pub fn minimal_indices(&self) -> Result<Vec<MultiIndex>, PolyError> {
        self.extremal_indices(|a, b| a.lt_componentwise(b))
    }

    pub fn maximal_indices(&self) -> Result<Vec<MultiIndex>, PolyError> {
        self.extremal_indices(|a, b| b.lt_componentwise(a))
    }

    // Keeps α unless some β in the support satisfies `below(β, α)`.
    fn extremal_indices(
        &self,
        below: impl Fn(&MultiIndex, &MultiIndex) -> bool,
    ) -> Result<Vec<MultiIndex>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        self.require_polynomial_mode()?;
        let supp = self.support();
        Ok(supp
            .iter()
            .filter(|a| !supp.iter().any(|b| below(b, a)))
            .cloned()
            .collect())
    }

    /// Common length `ℓ` of all indexes in the support, if there is one.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degrees = self.terms.keys().map(MultiIndex::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// All nonempty Rado sets made of minimal indexes, by size then graded-lex.
    pub fn rado_sets_of_minimal_indices(&self) -> Result<Vec<Vec<MultiIndex>>, PolyError> {
        const LIMIT: usize = 20;
        let minimal = self.minimal_indices()?;
        if minimal.len() > LIMIT {
            return Err(PolyError::TooManyIndexes(minimal.len()));
        }
        let m = minimal.len();
        // Pairwise Rado relation; a set is Rado iff every pair in it is.
        let mut pair_ok = vec![vec![true; m]; m];
        for i in 0..m {
            for j in (i + 1)..m {
                let ok = rado_pair_witness(&minimal[i], &minimal[j])?.is_some();
                pair_ok[i][j] = ok;
                pair_ok[j][i] = ok;
            }
        }
        let mut out = Vec::new();
        for size in 1..=m {
            for combo in itertools::Itertools::combinations(0..m, size) {
                let all = combo
                    .iter()
                    .enumerate()
                    .all(|(a, &i)| combo[a + 1..].iter().all(|&j| pair_ok[i][j]));
                if all {
                    out.push(combo.iter().map(|&i| minimal[i].clone()).collect());
                }
            }
        }
        Ok(out)
    }

    /// Replaces `var` by `q`, fully expanded.
    ///
    /// `q`'s variables must not clash with the remaining variables of `self`.
    /// The result's variable list is `self`'s with `var` replaced in place by
    /// `q`'s variables.
    pub fn substitute(&self, var: &str, q: &Polynomial) -> Result<Polynomial, PolyError> {
        let Some(pos) = self.var_position(var) else {
            return Ok(self.clone());
        };
        for w in q.used_variable_names() {
            if w != var && self.vars.iter().any(|v| *v == w) {
                return Err(PolyError::VariableCapture(w));
            }
        }
        let q = q.drop_unused_variables();
        let width = q.num_vars();
        let mut vars: Vec<String> = Vec::new();
        vars.extend(self.vars[..pos].iter().cloned());
        vars.extend(q.vars.iter().cloned());
        vars.extend(self.vars[pos + 1..].iter().cloned());
        check_distinct(&vars)?;
        let q = q.embed(&vars)?;
        let laurent = self.laurent || q.laurent;
        let mut out = Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
            laurent,
        };
        let mut powers: BTreeMap<i32, Polynomial> = BTreeMap::new();
        for (alpha, c) in &self.terms {
            let e = alpha.0[pos];
            let mut rest = Vec::with_capacity(vars.len());
            rest.extend_from_slice(&alpha.0[..pos]);
            rest.extend(std::iter::repeat(0).take(width));
            rest.extend_from_slice(&alpha.0[pos + 1..]);
            let rest = Polynomial {
                vars: vars.clone(),
                terms: BTreeMap::from([(MultiIndex(rest), c.clone())]),
                laurent,
            };
            let qe = match powers.get(&e) {
                Some(p) => p.clone(),
                None => {
                    let p = power_for_substitution(&q, e, var)?;
                    powers.insert(e, p.clone());
                    p
                }
            };
            out = out.add(&rest.mul(&qe)?);
        }
        out.laurent = laurent;
        Ok(out)
    }

    /// Forms `f(1/x₁,…,1/xₙ)` and clears denominators with `(x₁⋯xₙ)^ℓ`.
    pub fn reciprocal_transform(&self) -> Result<ReciprocalForm, PolyError> {
        self.require_polynomial_mode()?;
        let degree = self.homogeneous_degree().ok_or(PolyError::NotHomogeneous)?;
        let l = i32::try_from(degree).map_err(|_| PolyError::ExponentOverflow)?;
        let mut terms = BTreeMap::new();
        for (alpha, c) in &self.terms {
            let e = alpha.0.iter().map(|&a| l - a).collect();
            terms.insert(MultiIndex(e), c.clone());
        }
        Ok(ReciprocalForm {
            polynomial: self.same_space(terms, false),
            degree,
            clearing_exponent: degree,
        })
    }

    /// `q(c) = P(c,…,c)` and its positive integer roots.
    pub fn constant_diagonal(&self) -> Result<ConstantDiagonal, PolyError> {
        self.require_polynomial_mode()?;
        let top = self.total_degree().unwrap_or(0).max(0) as usize;
        let mut coefficients = vec![BigInt::zero(); top + 1];
        for (alpha, c) in &self.terms {
            coefficients[alpha.degree() as usize] += c;
        }
        while coefficients.len() > 1 && coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        let identically_zero = coefficients.iter().all(Zero::is_zero);
        let roots = if identically_zero {
            Vec::new()
        } else {
            positive_integer_roots(&coefficients)?
        };
        Ok(ConstantDiagonal {
            coefficients,
            identically_zero,
            roots,
        })
    }

    /// Divides by the monomial `x^m` with `m_i = min_α α_i`, so that every
    /// variable's smallest exponent becomes zero. The zero set on positive
    /// integers is unchanged. The result is in polynomial mode.
    pub fn strip_monomial_content(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero(self.vars.clone());
        }
        let n = self.num_vars();
        let mins: Vec<i32> = (0..n)
            .map(|i| self.terms.keys().map(|a| a.0[i]).min().unwrap_or(0))
            .collect();
        let shift = MultiIndex(mins.iter().map(|m| -m).collect());
        let mut p = self.shift(&shift).expect("stripping lowers magnitudes");
        p.laurent = false;
        p
    }

    /// Gcd of all coefficients (nonnegative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the content and fixes the sign so the graded-lex first
    /// term has a positive coefficient.
    pub fn primitive_part(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.terms.values().next().is_some_and(Signed::is_negative) {
            g = -g;
        }
        self.same_space(
            self.terms.iter().map(|(a, c)| (a.clone(), c / &g)).collect(),
            self.laurent,
        )
    }

    /// Canonical representative of the zero set on positive integers under
    /// monomial factors, integer content and sign: unused variables dropped,
    /// monomial content stripped, primitive, variables sorted by name.
    pub fn zero_set_normal_form(&self) -> Polynomial {
        let p = self.strip_monomial_content().primitive_part();
        let mut names: Vec<String> = p.used_variable_names().into_iter().collect();
        names.sort();
        p.embed(&names).expect("used variables kept").primitive_part()
    }

    /// True when both sides agree up to a monomial factor, a nonzero
    /// integer factor, and variable order.
    pub fn equivalent_on_naturals(&self, other: &Polynomial) -> bool {
        self.zero_set_normal_form() == other.zero_set_normal_form()
    }

    pub fn rename_variable(&self, from: &str, to: &str) -> Result<Polynomial, PolyError> {
        let mut p = self.clone();
        if let Some(i) = p.var_position(from) {
            p.vars[i] = to.to_string();
            check_distinct(&p.vars)?;
        }
        Ok(p)
    }

    /// Exact `e`-th root over ℤ, if `self = g^e` for some integer polynomial `g`.
    pub fn try_root(&self, e: u32) -> Option<Polynomial> {
        if e == 0 || self.is_zero() {
            return None;
        }
        if e == 1 {
            return Some(self.clone());
        }
        if self.require_polynomial_mode().is_err() {
            return None;
        }
        // Work in descending graded-lex order: leading term = last key.
        let (lead_idx, lead_c) = self.terms.iter().next_back()?;
        if lead_idx.0.iter().any(|&a| a % e as i32 != 0) {
            return None;
        }
        let root_c = integer_root(lead_c, e)?;
        let root_idx = MultiIndex(lead_idx.0.iter().map(|&a| a / e as i32).collect());
        let mut g = self.same_space(BTreeMap::from([(root_idx.clone(), root_c.clone())]), false);
        // e * lt(g)^(e-1)
        let lt_pow = self
            .same_space(BTreeMap::from([(root_idx, root_c)]), false)
            .pow(e - 1)
            .ok()?;
        let (denom_idx, denom_c) = lt_pow.terms.iter().next()?;
        let denom_c = denom_c * BigInt::from(e);
        let max_steps = 4 * self.num_terms() + 4;
        for _ in 0..max_steps {
            let r = self.sub(&g.pow(e).ok()?);
            let Some((ridx, rc)) = r.terms.iter().next_back() else {
                return Some(g);
            };
            let idx: Vec<i32> = ridx.0.iter().zip(&denom_idx.0).map(|(a, b)| a - b).collect();
            if idx.iter().any(|&a| a < 0) {
                return None;
            }
            let (q, rem) = rc.div_rem(&denom_c);
            if !rem.is_zero() {
                return None;
            }
            g.add_term(MultiIndex(idx), q);
        }
        None
    }
}

fn power_for_substitution(q: &Polynomial, e: i32, var: &str) -> Result<Polynomial, PolyError> {
    if e >= 0 {
        return q.pow(e as u32);
    }
    // Negative powers are only exact for ±monomials.
    if q.num_terms() != 1 {
        return Err(PolyError::NonInvertibleSubstitution(var.to_string()));
    }
    let (alpha, c) = q.terms.iter().next().expect("one term");
    if !(c.is_one() || (-c).is_one()) {
        return Err(PolyError::NonInvertibleSubstitution(var.to_string()));
    }
    let idx = alpha.checked_scale(e)?;
    let coeff = if c.is_one() || e % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    Ok(Polynomial {
        vars: q.vars.clone(),
        terms: BTreeMap::from([(idx, coeff)]),
        laurent: true,
    })
}

fn integer_root(c: &BigInt, e: u32) -> Option<BigInt> {
    if c.is_negative() && e % 2 == 0 {
        return None;
    }
    let r = if c.is_negative() {
        -(-c).nth_root(e)
    } else {
        c.nth_root(e)
    };
    (num_traits::pow(r.clone(), e as usize) == *c).then_some(r)
}

fn check_distinct(vars: &[String]) -> Result<(), PolyError> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(PolyError::DuplicateVariable(v.clone()));
        }
    }
    Ok(())
}

/// Result of [`Polynomial::reciprocal_transform`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocalForm {
    pub polynomial: Polynomial,
    /// Homogeneity degree `ℓ` of the input.
    pub degree: i64,
    /// Denominators were cleared by `(x₁⋯xₙ)^clearing_exponent`.
    pub clearing_exponent: i64,
}

/// Diagonal restriction `q(c) = P(c,…,c)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantDiagonal {
    /// Coefficients of `q`, indexed by degree.
    #[serde(with = "crate::serde_bigint::vec")]
    pub coefficients: Vec<BigInt>,
    /// `q ≡ 0`: every constant tuple is a solution.
    pub identically_zero: bool,
    /// Positive integer roots of `q`, ascending. Empty when `identically_zero`.
    #[serde(with = "crate::serde_bigint::vec")]
    pub roots: Vec<BigInt>,
}

impl ConstantDiagonal {
    pub fn has_constant_solutions(&self) -> bool {
        self.identically_zero || !self.roots.is_empty()
    }
}

const ROOT_SEARCH_LIMIT: u64 = 10_000_000;

// Positive roots of Σ a_k c^k via divisors of the trailing nonzero coefficient.
fn positive_integer_roots(coefficients: &[BigInt]) -> Result<Vec<BigInt>, PolyError> {
    let m = coefficients
        .iter()
        .position(|c| !c.is_zero())
        .expect("not identically zero");
    let r = &coefficients[m..];
    if r.len() == 1 {
        return Ok(Vec::new());
    }
    let a0 = r[0].abs();
    let lead = r.last().expect("nonempty").abs();
    let max_lower = r[..r.len() - 1].iter().map(Signed::abs).max().expect("nonempty");
    let cauchy = BigInt::one() + max_lower.div_ceil(&lead);
    let eval = |c: &BigInt| -> BigInt {
        r.iter().rev().fold(BigInt::zero(), |acc, a| acc * c + a)
    };
    let bound = a0.clone().min(cauchy);
    let mut roots = Vec::new();
    if let Some(b) = bound.to_u64().filter(|&b| b <= ROOT_SEARCH_LIMIT) {
        for c in 1..=b {
            let c = BigInt::from(c);
            if (&a0 % &c).is_zero() && eval(&c).is_zero() {
                roots.push(c);
            }
        }
        return Ok(roots);
    }
    let s = a0.sqrt();
    let Some(s) = s.to_u64().filter(|&s| s <= ROOT_SEARCH_LIMIT) else {
        return Err(PolyError::RootSearchTooLarge(r[0].clone()));
    };
    let mut divisors = BTreeSet::new();
    for d in 1..=s {
        let d = BigInt::from(d);
        if (&a0 % &d).is_zero() {
            divisors.insert(&a0 / &d);
            divisors.insert(d);
        }
    }
    for d in divisors {
        if d <= bound && eval(&d).is_zero() {
            roots.push(d);
        }
    }
    Ok(roots)
}

/// Witness that a set of indexes is a Rado set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSetWitness {
    pub index_set: Vec<MultiIndex>,
    pub pair_witnesses: Vec<PairWitness>,
}

/// `Σ_{i∈Λ} α_i = Σ_{i∈Λ} β_i` for `α = index_set[first]`, `β = index_set[second]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub first: usize,
    pub second: usize,
    /// Zero-based variable positions `Λ`.
    pub positions: Vec<usize>,
}

/// Smallest (then lexicographically first) nonempty `Λ` balancing `α` and `β`.
pub fn rado_pair_witness(
    alpha: &MultiIndex,
    beta: &MultiIndex,
) -> Result<Option<Vec<usize>>, PolyError> {
    if alpha.len() != beta.len() {
        return Err(PolyError::IndexLength {
            expected: alpha.len(),
            found: beta.len(),
        });
    }
    let diffs: Vec<i128> = alpha
        .0
        .iter()
        .zip(&beta.0)
        .map(|(a, b)| *a as i128 - *b as i128)
        .collect();
    Ok(subset_sum::zero_sum_subset(&diffs)?)
}

/// Checks whether `set` is a Rado set of indexes, returning per-pair witnesses.
pub fn is_rado_index_set(set: &[MultiIndex]) -> Result<Option<IndexSetWitness>, PolyError> {
    if set.is_empty() {
        return Err(PolyError::EmptyIndexSet);
    }
    let n = set[0].len();
    if let Some(bad) = set.iter().find(|a| a.len() != n) {
        return Err(PolyError::IndexLength {
            expected: n,
            found: bad.len(),
        });
    }
    let mut pair_witnesses = Vec::new();
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            match rado_pair_witness(&set[i], &set[j])? {
                Some(positions) => pair_witnesses.push(PairWitness {
                    first: i,
                    second: j,
                    positions,
                }),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(IndexSetWitness {
        index_set: set.to_vec(),
        pair_witnesses,
    }))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (alpha, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in alpha.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", self.vars[i])?,
                    _ => write!(f, "*{}^{}", self.vars[i], e)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    variables: Vec<String>,
    laurent: bool,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<i32>,
    #[serde(with = "crate::serde_bigint")]
    coefficient: BigInt,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolynomialRepr {
            variables: self.vars.clone(),
            laurent: self.laurent,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| TermRepr {
                    exponents: a.0.clone(),
                    coefficient: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolynomialRepr::deserialize(d)?;
        Polynomial::from_terms(
            repr.variables,
            repr.terms.into_iter().map(|t| (t.exponents, t.coefficient)),
            repr.laurent,
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn poly(names: &[&str], terms: &[(&[i32], i64)]) -> Polynomial {
        Polynomial::from_terms(
            vars(names),
            terms.iter().map(|(e, c)| (e.to_vec(), *c)),
            false,
        )
        .unwrap()
    }

    fn idx(e: &[i32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    // x1^2*x2 - 2*x3
    fn fermat_like() -> Polynomial {
        poly(&["x1", "x2", "x3"], &[(&[2, 1, 0], 1), (&[0, 0, 1], -2)])
    }

    // x + y - z^2
    fn schur_square() -> Polynomial {
        poly(&["x", "y", "z"], &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 2], -1)])
    }

    #[test]
    fn support_of_example() {
        let s = fermat_like().support();
        assert_eq!(s.len(), 2);
        assert!(s.contains(&idx(&[2, 1, 0])));
        assert!(s.contains(&idx(&[0, 0, 1])));
        assert!(Polynomial::zero(vars(&["x"])).support().is_empty());
    }

    #[test]
    fn like_terms_merge() {
        let p = poly(&["x"], &[(&[1], 3), (&[1], 5)]);
        assert_eq!(p.support(), vec![idx(&[1])]);
        assert_eq!(p.coefficient(&idx(&[1])), BigInt::from(8));
        let q = poly(&["x"], &[(&[1], 3), (&[1], -3)]);
        assert!(q.is_zero());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(schur_square().evaluate_at(&ints(&[2, 2, 2])).unwrap(), BigInt::zero());
        let schur = poly(&["x", "y", "z"], &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], -1)]);
        assert_eq!(schur.evaluate_at(&ints(&[1, 2, 3])).unwrap(), BigInt::zero());
        assert_eq!(fermat_like().evaluate_at(&ints(&[2, 1, 2])).unwrap(), BigInt::zero());
    }

    #[test]
    fn evaluate_missing_variable() {
        let mut a = BTreeMap::new();
        a.insert("x".to_string(), BigInt::from(1));
        assert_eq!(
            schur_square().evaluate(&a),
            Err(PolyError::MissingVariable("y".into()))
        );
    }

    #[test]
    fn evaluate_does_not_overflow() {
        let p = poly(&["x"], &[(&[40], 1)]);
        let v = p.evaluate_at(&ints(&[1000])).unwrap();
        assert_eq!(v, num_traits::pow(BigInt::from(10), 120));
    }

    #[test]
    fn minimal_and_maximal() {
        let p = fermat_like();
        assert_eq!(p.minimal_indices().unwrap().len(), 2);
        assert_eq!(p.maximal_indices().unwrap().len(), 2);
        let chain = poly(&["x"], &[(&[1], 1), (&[2], 1)]);
        assert_eq!(chain.minimal_indices().unwrap(), vec![idx(&[1])]);
        assert_eq!(chain.maximal_indices().unwrap(), vec![idx(&[2])]);
        assert_eq!(schur_square().minimal_indices().unwrap().len(), 3);
        assert_eq!(schur_square().maximal_indices().unwrap().len(), 3);
        assert_eq!(
            Polynomial::zero(vars(&["x"])).minimal_indices(),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn homogeneity() {
        let pyth = poly(&["x", "y", "z"], &[(&[2, 0, 0], 16), (&[0, 2, 0], 9), (&[0, 0, 2], -1)]);
        assert_eq!(pyth.homogeneous_degree(), Some(2));
        assert_eq!(schur_square().homogeneous_degree(), None);
        // x^2*y1*y2 - z^2*y1 - z^2*y2
        let p = poly(
            &["x", "y1", "y2", "z"],
            &[(&[2, 1, 1, 0], 1), (&[0, 1, 0, 2], -1), (&[0, 0, 1, 2], -1)],
        );
        assert_eq!(p.homogeneous_degree(), None);
    }

    #[test]
    fn rado_index_sets() {
        let w = is_rado_index_set(&[idx(&[2, 1, 0]), idx(&[0, 0, 1])]).unwrap().unwrap();
        // Λ = {x2, x3}: 1 + 0 = 0 + 1; no singleton balances.
        assert_eq!(w.pair_witnesses[0].positions, vec![1, 2]);
        assert!(is_rado_index_set(&[idx(&[3, 1])]).unwrap().is_some());
        let w = is_rado_index_set(&[idx(&[2, 0, 0]), idx(&[0, 0, 2])]).unwrap().unwrap();
        assert_eq!(w.pair_witnesses[0].positions, vec![1]);
        assert!(is_rado_index_set(&[idx(&[1, 0]), idx(&[0, 2])]).unwrap().is_none());
        assert_eq!(is_rado_index_set(&[]), Err(PolyError::EmptyIndexSet));
    }

    #[test]
    fn rado_sets_of_minimal() {
        assert_eq!(fermat_like().rado_sets_of_minimal_indices().unwrap().len(), 3);
        let pyth = poly(&["x", "y", "z"], &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], -1)]);
        let sets = pyth.rado_sets_of_minimal_indices().unwrap();
        assert_eq!(sets.len(), 7);
        assert!(sets.windows(2).all(|w| w[0].len() <= w[1].len()));
        let mono = poly(&["x", "y"], &[(&[2, 3], 5)]);
        assert_eq!(mono.rado_sets_of_minimal_indices().unwrap().len(), 1);
    }

    #[test]
    fn substitute_binomial() {
        let p = poly(&["x", "z"], &[(&[1, 0], 1), (&[0, 2], -1)]);
        let q = poly(&["y1", "y2"], &[(&[1, 0], 1), (&[0, 1], 1)]);
        let r = p.substitute("z", &q).unwrap();
        let expect = poly(
            &["x", "y1", "y2"],
            &[(&[1, 0, 0], 1), (&[0, 2, 0], -1), (&[0, 1, 1], -2), (&[0, 0, 2], -1)],
        );
        assert_eq!(r, expect);
    }

    #[test]
    fn substitute_product_into_linear() {
        let p = poly(&["x1", "x2"], &[(&[1, 0], 3), (&[0, 1], -5)]);
        let q = poly(&["y1", "y2"], &[(&[1, 1], 1)]);
        let r = p.substitute("x1", &q).unwrap();
        assert_eq!(r.to_string(), "-5*x2 + 3*y1*y2");
    }

    #[test]
    fn substitute_absent_and_capture() {
        let p = schur_square();
        let q = poly(&["w"], &[(&[1], 1)]);
        assert_eq!(p.substitute("t", &q).unwrap(), p);
        let q = poly(&["x"], &[(&[2], 1)]);
        assert_eq!(p.substitute("z", &q), Err(PolyError::VariableCapture("x".into())));
    }

    #[test]
    fn reciprocal_examples() {
        let schur = poly(&["x", "y", "z"], &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], -1)]);
        let r = schur.reciprocal_transform().unwrap();
        let expect = poly(&["x", "y", "z"], &[(&[0, 1, 1], 1), (&[1, 0, 1], 1), (&[1, 1, 0], -1)]);
        assert_eq!(r.polynomial, expect);
        assert_eq!(r.degree, 1);

        // x1*x2 - z^2 -> (x1 x2 z)^2 (1/(x1 x2) - 1/z^2) = x1*x2*z^2 - x1^2*x2^2
        let p = poly(&["x1", "x2", "z"], &[(&[1, 1, 0], 1), (&[0, 0, 2], -1)]);
        let r = p.reciprocal_transform().unwrap();
        let expect = poly(&["x1", "x2", "z"], &[(&[1, 1, 2], 1), (&[2, 2, 0], -1)]);
        assert_eq!(r.polynomial, expect);
        assert!(r.polynomial.equivalent_on_naturals(&poly(
            &["x1", "x2", "z"],
            &[(&[0, 0, 2], 1), (&[1, 1, 0], -1)]
        )));

        // a single monomial clears to a constant
        let m = poly(&["x"], &[(&[2], 3)]);
        assert_eq!(m.reciprocal_transform().unwrap().polynomial.to_string(), "3");

        assert_eq!(schur_square().reciprocal_transform(), Err(PolyError::NotHomogeneous));
    }

    #[test]
    fn constant_diagonal_examples() {
        let d = schur_square().constant_diagonal().unwrap();
        assert_eq!(d.coefficients, ints(&[0, 2, -1]));
        assert_eq!(d.roots, ints(&[2]));
        let schur = poly(&["x", "y", "z"], &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], -1)]);
        let d = schur.constant_diagonal().unwrap();
        assert_eq!(d.coefficients, ints(&[0, 1]));
        assert!(d.roots.is_empty());
        let pyth = poly(&["x", "y", "z"], &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], -1)]);
        let d = pyth.constant_diagonal().unwrap();
        assert_eq!(d.coefficients, ints(&[0, 0, 1]));
        assert!(d.roots.is_empty());
        let diff = poly(&["x", "y"], &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert!(diff.constant_diagonal().unwrap().identically_zero);
    }

    #[test]
    fn display_format() {
        assert_eq!(schur_square().to_string(), "1*x + 1*y + -1*z^2");
        assert_eq!(Polynomial::zero(vars(&["x"])).to_string(), "0");
        let l = Polynomial::from_terms(vars(&["x"]), [(vec![-1], 1)], true).unwrap();
        assert_eq!(l.to_string(), "1*x^-1");
        assert_eq!(fermat_like().to_string(), "-2*x3 + 1*x1^2*x2");
    }

    #[test]
    fn negative_exponent_needs_laurent() {
        assert_eq!(
            Polynomial::from_terms(vars(&["x"]), [(vec![-1], 1)], false),
            Err(PolyError::NegativeExponent("x".into()))
        );
    }

    #[test]
    fn roots_of_powers() {
        let g = poly(&["a", "b"], &[(&[1, 0], 1), (&[0, 1], -2)]);
        let sq = g.pow(2).unwrap();
        let r = sq.try_root(2).unwrap();
        assert_eq!(r.pow(2).unwrap(), sq);
        let cube = g.pow(3).unwrap();
        assert!(cube.try_root(3).is_some());
        assert!(cube.try_root(2).is_none());
        assert!(sq.add(&poly(&["a"], &[(&[1], 1)])).try_root(2).is_none());
    }

    #[test]
    fn zero_set_equivalence() {
        // x*w - z^2 vs w - z^2*x^-1
        let a = poly(&["x", "w", "z"], &[(&[1, 1, 0], 1), (&[0, 0, 2], -1)]);
        let b = Polynomial::from_terms(
            vars(&["w", "z", "x"]),
            [(vec![1, 0, 0], 1), (vec![0, 2, -1], -1)],
            true,
        )
        .unwrap();
        assert!(a.equivalent_on_naturals(&b));
        assert!(a.equivalent_on_naturals(&a.scale(&BigInt::from(-3))));
        assert!(!a.equivalent_on_naturals(&schur_square()));
    }

    #[test]
    fn serde_roundtrip() {
        let p = fermat_like();
        let s = serde_json::to_string(&p).unwrap();
        let q: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
