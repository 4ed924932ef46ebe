//! Sufficient conditions for partition regularity and the verdict data model.

mod family;
mod rado;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::obstruction::{
    DegreeGroupedReport, HomogeneousSubsetCertificate, MaximalHomogeneousReport, ModPObstruction,
};
use crate::poly::PolyError;
use crate::subset_sum::SubsetSumError;

pub use family::{
    derive_family_f, validate_family_f, CertNode, FamilyFCertificate, Rule, ValidationError,
};
pub use rado::{
    classify_linear, classify_multiplicative, classify_root_linear, detect_rado_polynomial,
    rado_condition, split_linear_part, LinearSplit, RadoDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("coefficient list is empty")]
    Empty,
    #[error("coefficient at position {0} is zero")]
    ZeroCoefficient(usize),
    #[error("coefficient {0} does not fit in 128-bit arithmetic")]
    CoefficientTooLarge(BigInt),
    #[error("equation is not linear")]
    NotLinear,
    #[error("equation has no variables")]
    NoVariables,
    #[error("root order k must be at least 1")]
    InvalidRootOrder,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    SubsetSum(#[from] SubsetSumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    ProvablyPR,
    ProvablyNotPR,
    /// Every monochromatic solution in some coloring is constant.
    NotNonTriviallyPR,
    Open,
}

impl Verdict {
    pub fn is_definite(self) -> bool {
        self != Verdict::Open
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Verdict::ProvablyNotPR | Verdict::NotNonTriviallyPR)
    }
}

/// Monochromatic solutions can be chosen with at least `min_distinct`
/// distinct values among `variables`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InjectivityConstraint {
    pub variables: Vec<String>,
    pub min_distinct: usize,
}

impl InjectivityConstraint {
    /// `None` when the constraint carries no information (`s < 2`) or is
    /// unsatisfiable by construction.
    pub fn new(variables: impl IntoIterator<Item = String>, min_distinct: usize) -> Option<Self> {
        let vars: BTreeSet<String> = variables.into_iter().collect();
        (min_distinct >= 2 && min_distinct <= vars.len()).then(|| InjectivityConstraint {
            variables: vars.into_iter().collect(),
            min_distinct,
        })
    }

    /// Full injectivity over `variables`.
    pub fn full(variables: impl IntoIterator<Item = String>) -> Option<Self> {
        let vars: Vec<String> = variables.into_iter().collect();
        let n = vars.len();
        Self::new(vars, n)
    }

    /// Whether `self` follows from `other`: at least `s − |A∖B|` of the
    /// distinct values over `A` fall in `B`.
    pub fn implied_by(&self, other: &InjectivityConstraint) -> bool {
        let missing = other
            .variables
            .iter()
            .filter(|v| !self.variables.contains(v))
            .count();
        other.min_distinct >= missing + self.min_distinct
    }

    pub fn implied_by_any(&self, set: &[InjectivityConstraint]) -> bool {
        self.min_distinct < 2 || set.iter().any(|o| self.implied_by(o))
    }
}

/// Machine-checkable justification attached to a [`Classification`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Homogeneous linear equation; `subset` is the zero-sum `J` or absent.
    RadoCondition {
        variables: Vec<String>,
        #[serde(with = "crate::serde_bigint::vec")]
        coefficients: Vec<BigInt>,
        subset: Option<Vec<usize>>,
    },
    /// `Σ c_i x_i = d` with `d ≠ 0`.
    InhomogeneousRado {
        variables: Vec<String>,
        #[serde(with = "crate::serde_bigint::vec")]
        coefficients: Vec<BigInt>,
        #[serde(with = "crate::serde_bigint")]
        rhs: BigInt,
        /// Natural `k` with `k·Σc = d` (constant solution).
        #[serde(with = "opt_bigint")]
        constant_solution: Option<BigInt>,
        /// Integer `z` with `z·Σc = d`.
        #[serde(with = "opt_bigint")]
        integer_shift: Option<BigInt>,
        subset: Option<Vec<usize>>,
    },
    Multiplicative {
        variables: Vec<String>,
        exponents: Vec<i64>,
        subset: Option<Vec<usize>>,
    },
    RootLinear {
        #[serde(with = "crate::serde_bigint::vec")]
        coefficients: Vec<BigInt>,
        root_order: u32,
        subset: Option<Vec<usize>>,
    },
    RadoPolynomial(RadoDecomposition),
    FamilyF(FamilyFCertificate),
    ModP(ModPObstruction),
    MaximalHomogeneous(MaximalHomogeneousReport),
    DegreeGrouped(DegreeGroupedReport),
    HomogeneousSubset(HomogeneousSubsetCertificate),
    /// Linear part with at least three variables plus a nonlinear univariate part.
    LinearPlusNonlinear {
        split: LinearSplit,
        subset: Option<Vec<usize>>,
    },
    /// Partial evidence for an undecided equation.
    Evidence { notes: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub certificate: Certificate,
    /// Guaranteed injectivity of monochromatic solutions, when PR.
    pub injectivity: Vec<InjectivityConstraint>,
}

impl Classification {
    pub fn open(notes: Vec<String>) -> Self {
        Classification {
            verdict: Verdict::Open,
            certificate: Certificate::Evidence { notes },
            injectivity: Vec::new(),
        }
    }
}

pub(crate) mod opt_bigint {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(ToString::to_string).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}
