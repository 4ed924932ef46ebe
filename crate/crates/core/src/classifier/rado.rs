use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Certificate, Classification, ClassifyError, InjectivityConstraint, Verdict};
use crate::parser::ProductForm;
use crate::poly::Polynomial;
use crate::subset_sum::zero_sum_subset;

/// Minimal-size, lexicographically first zero-sum subset (zero-based positions).
pub fn rado_condition(coefficients: &[BigInt]) -> Result<Option<Vec<usize>>, ClassifyError> {
    if coefficients.is_empty() {
        return Err(ClassifyError::Empty);
    }
    let mut values = Vec::with_capacity(coefficients.len());
    for (i, c) in coefficients.iter().enumerate() {
        if c.is_zero() {
            return Err(ClassifyError::ZeroCoefficient(i));
        }
        // Headroom so that sums of up to 40 values cannot overflow.
        let v = c
            .to_i128()
            .filter(|v| v.unsigned_abs() < 1u128 << 120)
            .ok_or_else(|| ClassifyError::CoefficientTooLarge(c.clone()))?;
        values.push(v);
    }
    Ok(zero_sum_subset(&values)?)
}

fn rado_condition_i64(values: &[i64]) -> Result<Option<Vec<usize>>, ClassifyError> {
    let big: Vec<BigInt> = values.iter().map(|&v| BigInt::from(v)).collect();
    rado_condition(&big)
}

fn full_if_three(names: &[String]) -> Vec<InjectivityConstraint> {
    if names.len() >= 3 {
        InjectivityConstraint::full(names.iter().cloned())
            .into_iter()
            .collect()
    } else {
        Vec::new()
    }
}

/// Linear equation `Σ c_i x_i + e = 0`, read as `Σ c_i x_i = d` with `d = −e`.
pub fn classify_linear(p: &Polynomial) -> Result<Classification, ClassifyError> {
    p.require_polynomial_mode()?;
    if p.total_degree().is_some_and(|d| d > 1) {
        return Err(ClassifyError::NotLinear);
    }
    let p = p.drop_unused_variables();
    if p.num_vars() == 0 {
        return Err(ClassifyError::NoVariables);
    }
    let names = p.variables().to_vec();
    let coefficients: Vec<BigInt> = (0..p.num_vars())
        .map(|i| p.coefficient(&crate::poly::MultiIndex::unit(p.num_vars(), i)))
        .collect();
    let rhs = -p.constant_term();
    let subset = rado_condition(&coefficients)?;

    if rhs.is_zero() {
        let pr = subset.is_some();
        return Ok(Classification {
            verdict: if pr { Verdict::ProvablyPR } else { Verdict::ProvablyNotPR },
            injectivity: if pr { full_if_three(&names) } else { Vec::new() },
            certificate: Certificate::RadoCondition {
                variables: names,
                coefficients,
                subset,
            },
        });
    }

    let sum: BigInt = coefficients.iter().sum();
    // k·Σc = d with k ≥ 1
    let constant_solution = (!sum.is_zero() && rhs.is_multiple_of(&sum))
        .then(|| &rhs / &sum)
        .filter(|k| k.is_positive());
    // z·Σc = d with z ∈ ℤ; impossible when Σc = 0 because d ≠ 0 here
    let integer_shift = (!sum.is_zero() && rhs.is_multiple_of(&sum)).then(|| &rhs / &sum);
    let pr = constant_solution.is_some() || (integer_shift.is_some() && subset.is_some());
    Ok(Classification {
        verdict: if pr { Verdict::ProvablyPR } else { Verdict::ProvablyNotPR },
        injectivity: if pr && subset.is_some() {
            full_if_three(&names)
        } else {
            Vec::new()
        },
        certificate: Certificate::InhomogeneousRado {
            variables: names,
            coefficients,
            rhs,
            constant_solution,
            integer_shift,
            subset,
        },
    })
}

/// `∏ x_i^{c_i} = 1`.
pub fn classify_multiplicative(form: &ProductForm) -> Result<Classification, ClassifyError> {
    if form.exponents.is_empty() {
        return Err(ClassifyError::Empty);
    }
    let subset = rado_condition_i64(&form.exponents)?;
    let pr = subset.is_some();
    // All ones always solves the equation, so failure only rules out
    // non-constant solutions.
    Ok(Classification {
        verdict: if pr { Verdict::ProvablyPR } else { Verdict::NotNonTriviallyPR },
        injectivity: if pr { full_if_three(&form.variables) } else { Vec::new() },
        certificate: Certificate::Multiplicative {
            variables: form.variables.clone(),
            exponents: form.exponents.clone(),
            subset,
        },
    })
}

/// `Σ c_i x_i^{1/k} = 0`; the answer does not depend on `k`.
pub fn classify_root_linear(
    coefficients: &[BigInt],
    k: u32,
) -> Result<Classification, ClassifyError> {
    if k == 0 {
        return Err(ClassifyError::InvalidRootOrder);
    }
    let subset = rado_condition(coefficients)?;
    Ok(Classification {
        verdict: if subset.is_some() {
            Verdict::ProvablyPR
        } else {
            Verdict::ProvablyNotPR
        },
        injectivity: Vec::new(),
        certificate: Certificate::RootLinear {
            coefficients: coefficients.to_vec(),
            root_order: k,
            subset,
        },
    })
}

/// Variables occurring exactly once, alone and to the first power, split off
/// from the rest of the polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSplit {
    pub linear_variables: Vec<String>,
    #[serde(with = "crate::serde_bigint::vec")]
    pub coefficients: Vec<BigInt>,
    /// Everything else, over its own used variables.
    pub remainder: Polynomial,
}

pub fn split_linear_part(p: &Polynomial) -> LinearSplit {
    let n = p.num_vars();
    let mut occurrences = vec![0usize; n];
    for (alpha, _) in p.terms() {
        for i in alpha.variables() {
            occurrences[i] += 1;
        }
    }
    let mut linear: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (alpha, c) in p.terms() {
        let vars: Vec<usize> = alpha.variables().collect();
        if let [i] = vars[..] {
            if alpha.exponents()[i] == 1 && occurrences[i] == 1 {
                linear.insert(i, c.clone());
            }
        }
    }
    let mut rest = p.clone();
    for (&i, c) in &linear {
        let term = Polynomial::variable(p.variables().to_vec(), i).scale(c);
        rest = rest.sub(&term);
    }
    LinearSplit {
        linear_variables: linear.keys().map(|&i| p.variables()[i].clone()).collect(),
        coefficients: linear.into_values().collect(),
        remainder: rest.drop_unused_variables(),
    }
}

/// `c₁x₁+…+cₙxₙ + P(y)` with `n ≥ 2`, disjoint variables, `P(0) = 0` and a
/// zero-sum subset `J` of the `c_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadoDecomposition {
    pub linear_variables: Vec<String>,
    #[serde(with = "crate::serde_bigint::vec")]
    pub coefficients: Vec<BigInt>,
    pub remainder: Polynomial,
    pub subset: Vec<usize>,
}

impl RadoDecomposition {
    /// `Σ c_i x_i + P(y)` over the linear variables followed by the remainder's.
    pub fn polynomial(&self) -> Result<Polynomial, ClassifyError> {
        let mut vars = self.linear_variables.clone();
        vars.extend(self.remainder.variables().iter().cloned());
        let mut p = self.remainder.embed(&vars)?;
        for (i, c) in self.coefficients.iter().enumerate() {
            p = p.add(&Polynomial::variable(vars.clone(), i).scale(c));
        }
        Ok(p)
    }

    /// Structural conditions, independent of how the decomposition was found.
    pub fn check(&self) -> Result<(), String> {
        let n = self.linear_variables.len();
        if n < 2 {
            return Err("fewer than two linear variables".into());
        }
        if self.coefficients.len() != n {
            return Err("coefficient count does not match linear variables".into());
        }
        if self.coefficients.iter().any(Zero::is_zero) {
            return Err("zero linear coefficient".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        if !self.linear_variables.iter().all(|v| seen.insert(v)) {
            return Err("repeated linear variable".into());
        }
        let rest = self.remainder.used_variable_names();
        if let Some(v) = self.linear_variables.iter().find(|v| rest.contains(*v)) {
            return Err(format!("variable {v} is both linear and in the remainder"));
        }
        if self.remainder.require_polynomial_mode().is_err() {
            return Err("remainder has negative exponents".into());
        }
        if self.remainder.has_constant_term() {
            return Err("remainder has a constant term".into());
        }
        let mut sorted = self.subset.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() || sorted.len() != self.subset.len() || sorted[sorted.len() - 1] >= n
        {
            return Err("invalid subset J".into());
        }
        let s: BigInt = self.subset.iter().map(|&j| &self.coefficients[j]).sum();
        if !s.is_zero() {
            return Err("coefficients over J do not sum to zero".into());
        }
        Ok(())
    }

    /// Injectivity guaranteed for this Rado polynomial.
    pub fn injectivity(&self) -> Vec<InjectivityConstraint> {
        let n = self.linear_variables.len();
        let ys: Vec<String> = self.remainder.used_variable_names().into_iter().collect();
        let k = ys.len();
        let linear_remainder = !self.remainder.is_zero()
            && self.remainder.total_degree() == Some(1)
            && !self.remainder.has_constant_term();
        let all = || self.linear_variables.iter().cloned().chain(ys.iter().cloned());
        if linear_remainder || (self.remainder.is_zero() && n >= 3) {
            // A linear homogeneous equation in n + k ≥ 3 variables.
            return InjectivityConstraint::full(all()).into_iter().collect();
        }
        if n == 2 && k == 1 {
            return InjectivityConstraint::full(self.linear_variables.iter().cloned())
                .into_iter()
                .collect();
        }
        let mut out = Vec::new();
        out.extend(InjectivityConstraint::new(
            self.linear_variables.iter().cloned(),
            n - 1,
        ));
        out.extend(InjectivityConstraint::full(ys.iter().cloned()));
        out
    }
}

pub fn detect_rado_polynomial(p: &Polynomial) -> Option<RadoDecomposition> {
    if p.require_polynomial_mode().is_err() || p.has_constant_term() {
        return None;
    }
    let split = split_linear_part(p);
    if split.linear_variables.len() < 2 {
        return None;
    }
    let subset = rado_condition(&split.coefficients).ok()??;
    Some(RadoDecomposition {
        linear_variables: split.linear_variables,
        coefficients: split.coefficients,
        remainder: split.remainder,
        subset,
    })
}
