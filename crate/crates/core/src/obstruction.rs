//! Necessary conditions for partition regularity, each producing a
//! certificate that can be checked with elementary arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    rado_condition, split_linear_part, Certificate, Classification, ClassifyError, LinearSplit,
    RadoDecomposition, Verdict,
};
use crate::poly::{is_rado_index_set, ConstantDiagonal, IndexSetWitness, MultiIndex, PolyError, Polynomial};
use crate::primes::{is_prime, primes_up_to};
use crate::subset_sum::{zero_sum_subset, SubsetSumError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial has a nonzero constant term")]
    ConstantTerm,
    #[error("a monomial involves more than one variable")]
    MultiVariableMonomial,
    #[error("expected one term per variable, each a power of a single variable")]
    NotDiagonalShape,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    SubsetSum(#[from] SubsetSumError),
}

/// Values of `Σ_k a_k z^k mod p` for `z = 1, …, p−1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueTable {
    /// `a_k`, indexed by total degree `k`.
    #[serde(with = "crate::serde_bigint::vec")]
    pub coefficients_by_degree: Vec<BigInt>,
    /// Entry `i` is the residue at `z = i + 1`.
    pub residues: Vec<u64>,
}

impl ResidueTable {
    pub fn has_nonzero_root(&self) -> bool {
        self.residues.contains(&0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadoSetReport {
    pub witness: IndexSetWitness,
    pub table: ResidueTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModPObstruction {
    pub prime: u64,
    pub condition1: ResidueTable,
    /// One entry per Rado set of minimal indexes.
    pub condition2: Vec<RadoSetReport>,
    pub constant_solutions: ConstantDiagonal,
}

impl ModPObstruction {
    /// Not PR; when constant solutions exist, only those are left open.
    pub fn verdict(&self) -> Verdict {
        if self.constant_solutions.has_constant_solutions() {
            Verdict::NotNonTriviallyPR
        } else {
            Verdict::ProvablyNotPR
        }
    }
}

// Integer data shared by every prime.
struct ModPInput {
    degree_sums: Vec<BigInt>,
    rado_sets: Vec<(IndexSetWitness, Vec<BigInt>)>,
    diagonal: ConstantDiagonal,
}

fn by_degree<'a>(terms: impl Iterator<Item = (&'a MultiIndex, &'a BigInt)>) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = Vec::new();
    for (alpha, c) in terms {
        let d = alpha.degree() as usize;
        if out.len() <= d {
            out.resize(d + 1, BigInt::zero());
        }
        out[d] += c;
    }
    out
}

impl ModPInput {
    fn new(p: &Polynomial) -> Result<Self, ObstructionError> {
        p.require_polynomial_mode()?;
        if p.has_constant_term() {
            return Err(ObstructionError::ConstantTerm);
        }
        let minimal_sets = p.rado_sets_of_minimal_indices()?;
        let mut rado_sets = Vec::with_capacity(minimal_sets.len());
        for set in minimal_sets {
            let witness = is_rado_index_set(&set)?.expect("enumerated sets are Rado sets");
            let coeffs = by_degree(set.iter().map(|a| {
                let c = p.terms().find(|(b, _)| *b == a).expect("index in support").1;
                (a, c)
            }));
            rado_sets.push((witness, coeffs));
        }
        Ok(ModPInput {
            degree_sums: by_degree(p.terms()),
            rado_sets,
            diagonal: p.constant_diagonal()?,
        })
    }

    fn check(&self, prime: u64) -> Option<ModPObstruction> {
        let condition1 = residue_table(&self.degree_sums, prime);
        if condition1.has_nonzero_root() {
            return None;
        }
        let mut condition2 = Vec::with_capacity(self.rado_sets.len());
        for (witness, coeffs) in &self.rado_sets {
            let table = residue_table(coeffs, prime);
            if table.has_nonzero_root() {
                return None;
            }
            condition2.push(RadoSetReport {
                witness: witness.clone(),
                table,
            });
        }
        Some(ModPObstruction {
            prime,
            condition1,
            condition2,
            constant_solutions: self.diagonal.clone(),
        })
    }
}

fn residue_table(coefficients: &[BigInt], p: u64) -> ResidueTable {
    let modulus = BigInt::from(p);
    let reduced: Vec<u128> = coefficients
        .iter()
        .map(|c| c.mod_floor(&modulus).to_u64().expect("reduced below p") as u128)
        .collect();
    let p128 = p as u128;
    let residues = (1..p)
        .map(|z| {
            // Horner, highest degree first.
            let z = z as u128;
            reduced.iter().rev().fold(0u128, |acc, a| (acc * z + a) % p128) as u64
        })
        .collect();
    ResidueTable {
        coefficients_by_degree: coefficients.to_vec(),
        residues,
    }
}

/// Both congruence conditions at a single prime.
pub fn check_mod_p(p: &Polynomial, prime: u64) -> Result<Option<ModPObstruction>, ObstructionError> {
    if !is_prime(prime) {
        return Err(ObstructionError::NotPrime(prime));
    }
    Ok(ModPInput::new(p)?.check(prime))
}

/// Smallest prime up to `prime_bound` giving an obstruction. Absence is
/// inconclusive.
pub fn find_mod_p_obstruction(
    p: &Polynomial,
    prime_bound: u64,
) -> Result<Option<ModPObstruction>, ObstructionError> {
    let input = ModPInput::new(p)?;
    Ok(primes_up_to(prime_bound)
        .par_iter()
        .find_map_first(|&q| input.check(q)))
}

const MAXIMAL_HOMOGENEOUS_READING: &str =
    "a maximal homogeneous set is a nonempty set of maximal indexes of equal total degree";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeClass {
    pub degree: i64,
    pub indexes: Vec<MultiIndex>,
    #[serde(with = "crate::serde_bigint::vec")]
    pub coefficients: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalHomogeneousReport {
    pub degree_classes: Vec<DegreeClass>,
    /// First `(degree, indexes)` whose coefficients sum to zero; its presence
    /// makes the report inconclusive.
    pub zero_sum_subset: Option<(i64, Vec<MultiIndex>)>,
    pub constant_solutions: ConstantDiagonal,
    pub interpretation: String,
}

impl MaximalHomogeneousReport {
    pub fn is_obstruction(&self) -> bool {
        self.zero_sum_subset.is_none()
    }
}

/// For polynomials whose monomials each involve a single variable.
pub fn maximal_homogeneous_obstruction(
    p: &Polynomial,
) -> Result<MaximalHomogeneousReport, ObstructionError> {
    p.require_polynomial_mode()?;
    if p.has_constant_term() {
        return Err(ObstructionError::ConstantTerm);
    }
    if p.terms().any(|(a, _)| a.variables().count() != 1) {
        return Err(ObstructionError::MultiVariableMonomial);
    }
    let mut classes: BTreeMap<i64, DegreeClass> = BTreeMap::new();
    for alpha in p.maximal_indices()? {
        let degree = alpha.degree();
        let class = classes.entry(degree).or_insert_with(|| DegreeClass {
            degree,
            indexes: Vec::new(),
            coefficients: Vec::new(),
        });
        class.coefficients.push(p.coefficient(&alpha));
        class.indexes.push(alpha);
    }
    let mut zero_sum = None;
    for class in classes.values() {
        if let Some(j) = rado_condition(&class.coefficients)? {
            zero_sum = Some((
                class.degree,
                j.iter().map(|&i| class.indexes[i].clone()).collect(),
            ));
            break;
        }
    }
    Ok(MaximalHomogeneousReport {
        degree_classes: classes.into_values().collect(),
        zero_sum_subset: zero_sum,
        constant_solutions: p.constant_diagonal()?,
        interpretation: MAXIMAL_HOMOGENEOUS_READING.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalTerm {
    pub variable: String,
    #[serde(with = "crate::serde_bigint")]
    pub coefficient: BigInt,
    pub exponent: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeGroupedReport {
    pub terms: Vec<DiagonalTerm>,
    /// Variables of an equal-exponent zero-sum subset, if any.
    pub zero_sum_subset: Option<Vec<String>>,
    pub constant_solutions: ConstantDiagonal,
}

impl DegreeGroupedReport {
    pub fn is_obstruction(&self) -> bool {
        self.zero_sum_subset.is_none()
    }
}

/// `Σ c_i x_i^{d_i}`: a zero-sum subset with equal exponents is necessary.
pub fn degree_grouped_rado(p: &Polynomial) -> Result<DegreeGroupedReport, ObstructionError> {
    p.require_polynomial_mode()?;
    let p = p.drop_unused_variables();
    let mut terms = Vec::new();
    let mut seen = vec![false; p.num_vars()];
    for (alpha, c) in p.terms() {
        let vars: Vec<usize> = alpha.variables().collect();
        let [i] = vars[..] else {
            return Err(ObstructionError::NotDiagonalShape);
        };
        if std::mem::replace(&mut seen[i], true) {
            return Err(ObstructionError::NotDiagonalShape);
        }
        terms.push(DiagonalTerm {
            variable: p.variables()[i].clone(),
            coefficient: c.clone(),
            exponent: alpha.degree(),
        });
    }
    if terms.is_empty() {
        return Err(ObstructionError::NotDiagonalShape);
    }
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (k, t) in terms.iter().enumerate() {
        groups.entry(t.exponent).or_default().push(k);
    }
    let mut zero_sum = None;
    for members in groups.values() {
        let coeffs: Vec<BigInt> = members.iter().map(|&k| terms[k].coefficient.clone()).collect();
        if let Some(j) = rado_condition(&coeffs)? {
            zero_sum = Some(j.iter().map(|&i| terms[members[i]].variable.clone()).collect());
            break;
        }
    }
    Ok(DegreeGroupedReport {
        terms,
        zero_sum_subset: zero_sum,
        constant_solutions: p.constant_diagonal()?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousSubsetCertificate {
    pub degree: i64,
    pub support: Vec<MultiIndex>,
    #[serde(with = "crate::serde_bigint::vec")]
    pub coefficients: Vec<BigInt>,
    /// A nonempty part of the support whose coefficients cancel.
    pub zero_sum_subset: Option<Vec<MultiIndex>>,
}

impl HomogeneousSubsetCertificate {
    pub fn is_obstruction(&self) -> bool {
        self.zero_sum_subset.is_none()
    }
}

/// Homogeneous polynomials: no cancelling part of the support means not PR.
pub fn homogeneous_subset_obstruction(
    p: &Polynomial,
) -> Result<HomogeneousSubsetCertificate, ObstructionError> {
    p.require_polynomial_mode()?;
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    let degree = p.homogeneous_degree().ok_or(ObstructionError::NotHomogeneous)?;
    let support = p.support();
    let coefficients: Vec<BigInt> = support.iter().map(|a| p.coefficient(a)).collect();
    let values: Vec<i128> = coefficients
        .iter()
        .map(|c| {
            c.to_i128()
                .filter(|v| v.unsigned_abs() < 1u128 << 120)
                .ok_or_else(|| ClassifyError::CoefficientTooLarge(c.clone()))
        })
        .collect::<Result<_, _>>()?;
    let zero_sum = zero_sum_subset(&values)?.map(|j| j.iter().map(|&i| support[i].clone()).collect());
    Ok(HomogeneousSubsetCertificate {
        degree,
        support,
        coefficients,
        zero_sum_subset: zero_sum,
    })
}

/// Two-sided answer for `c₁x₁+…+cₙxₙ + Q(y)` with `n ≥ 3` and `Q` nonlinear
/// in a single variable `y`.
pub fn characterize_linear_plus_nonlinear(p: &Polynomial) -> Result<Classification, ObstructionError> {
    p.require_polynomial_mode()?;
    if p.has_constant_term() {
        return Err(ObstructionError::ConstantTerm);
    }
    let split: LinearSplit = split_linear_part(p);
    if split.linear_variables.len() < 3 {
        return Err(ObstructionError::Shape(format!(
            "need at least three linear variables, found {}",
            split.linear_variables.len()
        )));
    }
    if split.remainder.used_variables().len() != 1 {
        return Err(ObstructionError::Shape(
            "the nonlinear part must involve exactly one variable".into(),
        ));
    }
    if split.remainder.total_degree().unwrap_or(0) < 2 {
        return Err(ObstructionError::Shape("the remaining part is linear".into()));
    }
    let subset = rado_condition(&split.coefficients)?;
    let (verdict, injectivity) = match &subset {
        Some(j) => {
            let decomposition = RadoDecomposition {
                linear_variables: split.linear_variables.clone(),
                coefficients: split.coefficients.clone(),
                remainder: split.remainder.clone(),
                subset: j.clone(),
            };
            (Verdict::ProvablyPR, decomposition.injectivity())
        }
        None => (Verdict::NotNonTriviallyPR, Vec::new()),
    };
    Ok(Classification {
        verdict,
        certificate: Certificate::LinearPlusNonlinear { split, subset },
        injectivity,
    })
}
