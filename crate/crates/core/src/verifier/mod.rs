//! Finite checks: solutions in a box, colorings of `[1..N]` avoiding
//! monochromatic solutions, thresholds and CNF export.

mod coloring;
mod dimacs;
mod search;
mod solutions;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::InjectivityConstraint;
use crate::poly::{PolyError, Polynomial};

pub use coloring::{check_coloring, valuation_parity_coloring};
pub use dimacs::{export_dimacs, parse_dimacs, Cnf};
pub use search::{rado_number, search_coloring, search_value_sets, RadoNumber};
pub use solutions::{enumerate_solutions, enumerate_solutions_with_budget, value_sets};

/// Default cap on `N^(n−1)`, the number of partial tuples before pruning.
pub const DEFAULT_TUPLE_BUDGET: u128 = 1_000_000_000;
/// Default cap on search-tree nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
/// Largest color count supported by the search.
pub const MAX_COLORS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifierError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("polynomial has no variables")]
    NoVariables,
    #[error("estimated {estimate} tuples exceeds the budget of {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("integer overflow while evaluating the polynomial")]
    Overflow,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("coloring does not assign a color to {0}")]
    PartialColoring(u64),
    #[error("line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

/// Which solutions count as monochromatic witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", content = "constraints", rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Any,
    /// At least two distinct values among all variables.
    NonTrivial,
    /// Drops only tuples with every variable equal.
    ExcludeConstant,
    /// Every constraint must hold.
    Injectivity(Vec<InjectivityConstraint>),
}

impl Mode {
    pub(crate) fn resolve(&self, vars: &[String]) -> Result<ResolvedMode, VerifierError> {
        Ok(match self {
            Mode::Any => ResolvedMode::Any,
            Mode::NonTrivial | Mode::ExcludeConstant => ResolvedMode::NotConstant,
            Mode::Injectivity(cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    let mut positions = Vec::with_capacity(c.variables.len());
                    for v in &c.variables {
                        let i = vars.iter().position(|w| w == v).ok_or_else(|| {
                            VerifierError::InvalidProblem(format!("unknown variable {v}"))
                        })?;
                        positions.push(i);
                    }
                    if c.min_distinct == 0 || c.min_distinct > positions.len() {
                        return Err(VerifierError::InvalidProblem(format!(
                            "min_distinct {} out of range",
                            c.min_distinct
                        )));
                    }
                    out.push((positions, c.min_distinct));
                }
                ResolvedMode::Injectivity(out)
            }
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) enum ResolvedMode {
    Any,
    NotConstant,
    Injectivity(Vec<(Vec<usize>, usize)>),
}

impl ResolvedMode {
    pub(crate) fn accepts(&self, tuple: &[u64]) -> bool {
        match self {
            ResolvedMode::Any => true,
            ResolvedMode::NotConstant => tuple.windows(2).any(|w| w[0] != w[1]),
            ResolvedMode::Injectivity(cs) => cs.iter().all(|(pos, s)| {
                let mut vals: Vec<u64> = pos.iter().map(|&i| tuple[i]).collect();
                vals.sort_unstable();
                vals.dedup();
                vals.len() >= *s
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringProblem {
    pub polynomial: Polynomial,
    /// Colors `[1..n]`.
    pub n: u64,
    pub colors: u32,
    pub mode: Mode,
}

impl ColoringProblem {
    pub fn new(polynomial: Polynomial, n: u64, colors: u32, mode: Mode) -> Result<Self, VerifierError> {
        if n == 0 {
            return Err(VerifierError::InvalidProblem("N must be at least 1".into()));
        }
        if colors == 0 || colors > MAX_COLORS {
            return Err(VerifierError::InvalidProblem(format!(
                "color count must be between 1 and {MAX_COLORS}"
            )));
        }
        polynomial.require_polynomial_mode()?;
        mode.resolve(polynomial.variables())?;
        Ok(ColoringProblem {
            polynomial,
            n,
            colors,
            mode,
        })
    }
}

/// Total coloring of `[1..N]`; `colors[i]` is the color of `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coloring {
    colors: Vec<u32>,
}

impl Coloring {
    pub fn new(colors: Vec<u32>) -> Self {
        Coloring { colors }
    }

    /// Rejects colorings that miss any element of `[1..n]`.
    pub fn from_map(map: &BTreeMap<u64, u32>, n: u64) -> Result<Self, VerifierError> {
        (1..=n)
            .map(|k| map.get(&k).copied().ok_or(VerifierError::PartialColoring(k)))
            .collect::<Result<Vec<_>, _>>()
            .map(Coloring::new)
    }

    pub fn from_partial(colors: &[Option<u32>]) -> Result<Self, VerifierError> {
        colors
            .iter()
            .enumerate()
            .map(|(i, c)| c.ok_or(VerifierError::PartialColoring(i as u64 + 1)))
            .collect::<Result<Vec<_>, _>>()
            .map(Coloring::new)
    }

    pub fn n(&self) -> u64 {
        self.colors.len() as u64
    }

    /// Color of `k ∈ [1..N]`.
    pub fn color(&self, k: u64) -> Option<u32> {
        k.checked_sub(1).and_then(|i| self.colors.get(i as usize).copied())
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn num_colors_used(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    /// Elements of each color, ascending.
    pub fn classes(&self) -> BTreeMap<u32, Vec<u64>> {
        let mut out: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for (i, &c) in self.colors.iter().enumerate() {
            out.entry(c).or_default().push(i as u64 + 1);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    ColoringFound,
    Forced,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub kind: OutcomeKind,
    pub witness: Option<Coloring>,
    pub nodes_explored: u64,
    pub elapsed_ms: u64,
    pub solution_count: usize,
    pub constraint_count: usize,
    /// No solutions at all in the box, so any coloring works.
    pub vacuous: bool,
}
