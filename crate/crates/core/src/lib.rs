//! Partition regularity analysis for Diophantine equations.
//!
//! The crate decides what it can about whether an equation `P(x) = 0` has
//! monochromatic solutions in every finite coloring of the positive
//! integers:
//!
//! - [`classifier`] proves partition regularity: Rado's condition for linear
//!   and multiplicative equations, Rado polynomials, and derivation
//!   certificates for a closure family built from them.
//! - [`obstruction`] proves the opposite: congruence obstructions modulo a
//!   prime and zero-sum tests on maximal homogeneous index sets.
//! - [`verifier`] gathers finite evidence by searching colorings of `[1..N]`
//!   and exports DIMACS CNF for external SAT solvers.
//! - [`pipeline`] runs everything in a fixed order and aggregates a report.

pub mod classifier;
pub mod ip;
pub mod obstruction;
pub mod parser;
pub mod pipeline;
pub mod poly;
pub mod primes;
pub mod serde_bigint;
pub mod subset_sum;
pub mod verifier;

pub use classifier::{Certificate, Classification, InjectivityConstraint, Verdict};
pub use parser::{format, parse_equation, parse_equation_with, parse_product_form, Equation, ParseOptions};
pub use poly::{MultiIndex, Polynomial};
