//! Runs every applicable analysis on an equation in a fixed order and
//! aggregates the verdicts.

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    classify_linear, classify_multiplicative, derive_family_f, detect_rado_polynomial,
    validate_family_f, Certificate, Classification, Verdict,
};
use crate::obstruction::{
    characterize_linear_plus_nonlinear, degree_grouped_rado, find_mod_p_obstruction,
    homogeneous_subset_obstruction, maximal_homogeneous_obstruction, ObstructionError,
};
use crate::parser::{parse_equation_with, parse_product_form, ParseError, ParseOptions, ProductForm};
use crate::poly::Polynomial;
use crate::verifier::{search_coloring, ColoringProblem, Mode, OutcomeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Multiplicative,
    Linear,
    RadoPolynomial,
    FamilyF,
    ModP,
    MaximalHomogeneous,
    DegreeGrouped,
    HomogeneousSubset,
    Characterization,
    Evidence,
}

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::Multiplicative,
        Stage::Linear,
        Stage::RadoPolynomial,
        Stage::FamilyF,
        Stage::ModP,
        Stage::MaximalHomogeneous,
        Stage::DegreeGrouped,
        Stage::HomogeneousSubset,
        Stage::Characterization,
        Stage::Evidence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Multiplicative => "multiplicative",
            Stage::Linear => "linear",
            Stage::RadoPolynomial => "rado-polynomial",
            Stage::FamilyF => "family-f",
            Stage::ModP => "mod-p",
            Stage::MaximalHomogeneous => "maximal-homogeneous",
            Stage::DegreeGrouped => "degree-grouped",
            Stage::HomogeneousSubset => "homogeneous-subset",
            Stage::Characterization => "characterization",
            Stage::Evidence => "evidence",
        }
    }

    pub fn from_name(name: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Coloring search run when no analysis is conclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceOptions {
    pub n: u64,
    pub colors: u32,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub laurent: bool,
    pub skip: BTreeSet<Stage>,
    pub derive_depth: usize,
    pub prime_bound: u64,
    pub evidence: Option<EvidenceOptions>,
    /// Report zero timings so that identical inputs give identical output.
    pub record_timing: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            laurent: false,
            skip: BTreeSet::new(),
            derive_depth: 4,
            prime_bound: 1000,
            evidence: None,
            record_timing: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("the equation is an identity or has no variables")]
    Degenerate,
    #[error("internal inconsistency: {pr} proves PR but {not_pr} proves the opposite")]
    Consistency { pr: String, not_pr: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum StageStatus {
    /// The analysis ran and reached a verdict.
    Decided,
    /// The analysis ran without reaching a verdict.
    Inconclusive(String),
    NotApplicable(String),
    Skipped,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    #[serde(flatten)]
    pub status: StageStatus,
    pub result: Option<Classification>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationInfo {
    pub source: String,
    /// `lhs − rhs` as parsed.
    pub normalized: String,
    /// Monomial content removed; the form every analysis sees.
    pub canonical: String,
    pub variables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub equation: EquationInfo,
    pub stages: Vec<StageReport>,
    #[serde(rename = "final")]
    pub final_classification: Classification,
    pub total_ms: u64,
}

impl AnalysisReport {
    pub fn verdict(&self) -> Verdict {
        self.final_classification.verdict
    }
}

type StageOutcome = StageStatus;

struct Runner<'a> {
    options: &'a PipelineOptions,
    stages: Vec<StageReport>,
}

impl Runner<'_> {
    fn run(&mut self, stage: Stage, f: impl FnOnce() -> (StageOutcome, Option<Classification>)) {
        if self.options.skip.contains(&stage) {
            self.stages.push(StageReport {
                stage,
                status: StageStatus::Skipped,
                result: None,
                elapsed_ms: 0,
            });
            return;
        }
        let start = Instant::now();
        let (status, result) = f();
        let elapsed_ms = if self.options.record_timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        self.stages.push(StageReport {
            stage,
            status,
            result,
            elapsed_ms,
        });
    }

    fn decided(&self) -> impl Iterator<Item = (&Stage, &Classification)> {
        self.stages.iter().filter_map(|s| {
            s.result
                .as_ref()
                .filter(|c| c.verdict.is_definite())
                .map(|c| (&s.stage, c))
        })
    }
}

fn decided(c: Classification) -> (StageOutcome, Option<Classification>) {
    if c.verdict.is_definite() {
        (StageStatus::Decided, Some(c))
    } else {
        (StageStatus::Inconclusive("no verdict".into()), Some(c))
    }
}

fn obstruction_status<T>(
    r: Result<T, ObstructionError>,
    f: impl FnOnce(T) -> (StageOutcome, Option<Classification>),
) -> (StageOutcome, Option<Classification>) {
    match r {
        Ok(v) => f(v),
        Err(
            e @ (ObstructionError::ConstantTerm
            | ObstructionError::MultiVariableMonomial
            | ObstructionError::NotDiagonalShape
            | ObstructionError::NotHomogeneous
            | ObstructionError::Shape(_)),
        ) => (StageStatus::NotApplicable(e.to_string()), None),
        Err(e) => (StageStatus::Failed(e.to_string()), None),
    }
}

/// Parses `text` and runs the analyses in the order of [`Stage::ALL`].
pub fn analyze(text: &str, options: &PipelineOptions) -> Result<AnalysisReport, PipelineError> {
    let start = Instant::now();
    let eq = parse_equation_with(
        text,
        ParseOptions {
            laurent: options.laurent,
        },
    )?;
    let p: Polynomial = eq.normalized.strip_monomial_content().drop_unused_variables();
    if p.is_zero() || p.num_vars() == 0 {
        return Err(PipelineError::Degenerate);
    }
    let mut runner = Runner {
        options,
        stages: Vec::new(),
    };

    runner.run(Stage::Multiplicative, || match parse_product_form(text).or_else(|| monomial_ratio(&p)) {
        Some(form) => match classify_multiplicative(&form) {
            Ok(c) => decided(c),
            Err(e) => (StageStatus::Failed(e.to_string()), None),
        },
        None => (StageStatus::NotApplicable("not a product of powers".into()), None),
    });

    runner.run(Stage::Linear, || {
        if p.total_degree().unwrap_or(0) > 1 {
            return (StageStatus::NotApplicable("not linear".into()), None);
        }
        match classify_linear(&p) {
            Ok(c) => decided(c),
            Err(e) => (StageStatus::Failed(e.to_string()), None),
        }
    });

    runner.run(Stage::RadoPolynomial, || match detect_rado_polynomial(&p) {
        Some(d) => decided(Classification {
            verdict: Verdict::ProvablyPR,
            injectivity: d.injectivity(),
            certificate: Certificate::RadoPolynomial(d),
        }),
        None => (StageStatus::Inconclusive("not a Rado polynomial".into()), None),
    });

    runner.run(Stage::FamilyF, || match derive_family_f(&p, options.derive_depth) {
        Some(cert) => match validate_family_f(&p, &cert) {
            Ok(c) => decided(c),
            Err(e) => (StageStatus::Failed(format!("derived certificate rejected: {e}")), None),
        },
        None => (
            StageStatus::Inconclusive(format!("no derivation within depth {}", options.derive_depth)),
            None,
        ),
    });

    runner.run(Stage::ModP, || {
        obstruction_status(find_mod_p_obstruction(&p, options.prime_bound), |found| match found {
            Some(cert) => decided(Classification {
                verdict: cert.verdict(),
                certificate: Certificate::ModP(cert),
                injectivity: Vec::new(),
            }),
            None => (
                StageStatus::Inconclusive(format!("no prime up to {}", options.prime_bound)),
                None,
            ),
        })
    });

    runner.run(Stage::MaximalHomogeneous, || {
        obstruction_status(maximal_homogeneous_obstruction(&p), |r| {
            if r.is_obstruction() {
                decided(Classification {
                    verdict: Verdict::NotNonTriviallyPR,
                    certificate: Certificate::MaximalHomogeneous(r),
                    injectivity: Vec::new(),
                })
            } else {
                let note = "a class of maximal indexes has a zero-sum subset".to_string();
                (
                    StageStatus::Inconclusive(note),
                    Some(Classification {
                        verdict: Verdict::Open,
                        certificate: Certificate::MaximalHomogeneous(r),
                        injectivity: Vec::new(),
                    }),
                )
            }
        })
    });

    runner.run(Stage::DegreeGrouped, || {
        obstruction_status(degree_grouped_rado(&p), |r| {
            if r.is_obstruction() {
                decided(Classification {
                    verdict: Verdict::NotNonTriviallyPR,
                    certificate: Certificate::DegreeGrouped(r),
                    injectivity: Vec::new(),
                })
            } else {
                (
                    StageStatus::Inconclusive("equal-degree zero-sum subset exists".into()),
                    None,
                )
            }
        })
    });

    runner.run(Stage::HomogeneousSubset, || {
        obstruction_status(homogeneous_subset_obstruction(&p), |r| {
            if r.is_obstruction() {
                decided(Classification {
                    verdict: Verdict::ProvablyNotPR,
                    certificate: Certificate::HomogeneousSubset(r),
                    injectivity: Vec::new(),
                })
            } else {
                (StageStatus::Inconclusive("a part of the support cancels".into()), None)
            }
        })
    });

    runner.run(Stage::Characterization, || {
        obstruction_status(characterize_linear_plus_nonlinear(&p), decided)
    });

    let pr = runner
        .decided()
        .find(|(_, c)| c.verdict == Verdict::ProvablyPR)
        .map(|(s, c)| (*s, c.clone()));
    let negative = runner
        .decided()
        .filter(|(_, c)| c.verdict.is_negative())
        .min_by_key(|(_, c)| c.verdict != Verdict::ProvablyNotPR)
        .map(|(s, c)| (*s, c.clone()));

    if let (Some((ps, pc)), Some((ns, nc))) = (&pr, &negative) {
        // PR only through constant solutions is compatible with "not non-trivially PR".
        let nontrivial = pc.injectivity.iter().any(|c| c.min_distinct >= 2);
        if nc.verdict == Verdict::ProvablyNotPR || nontrivial {
            return Err(PipelineError::Consistency {
                pr: ps.name().into(),
                not_pr: ns.name().into(),
            });
        }
    }

    let final_classification = match pr.or(negative) {
        Some((_, c)) => {
            runner.run(Stage::Evidence, || {
                (StageStatus::NotApplicable("verdict already definite".into()), None)
            });
            c
        }
        None => {
            let mut notes: Vec<String> = runner
                .stages
                .iter()
                .map(|s| format!("{}: {}", s.stage.name(), describe(&s.status)))
                .collect();
            runner.run(Stage::Evidence, || match options.evidence {
                Some(ev) => evidence(&p, ev),
                None => (StageStatus::Skipped, None),
            });
            if let Some(Some(c)) = runner.stages.last().map(|s| s.result.clone()) {
                if let Certificate::Evidence { notes: extra } = c.certificate {
                    notes.extend(extra);
                }
            }
            Classification::open(notes)
        }
    };

    Ok(AnalysisReport {
        equation: EquationInfo {
            source: text.to_string(),
            normalized: eq.normalized.to_string(),
            canonical: p.to_string(),
            variables: p.variables().to_vec(),
        },
        stages: runner.stages,
        final_classification,
        total_ms: if options.record_timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        },
    })
}

// `m₁ = m₂` with unit coefficients, read as `m₁/m₂ = 1`.
fn monomial_ratio(p: &Polynomial) -> Option<ProductForm> {
    let q = p.primitive_part();
    let terms: Vec<_> = q.terms().collect();
    let [(a, ca), (b, cb)] = terms[..] else {
        return None;
    };
    if !(ca + cb).is_zero() || !ca.abs().is_one() {
        return None;
    }
    let exponents: Vec<i64> = a
        .exponents()
        .iter()
        .zip(b.exponents())
        .map(|(x, y)| i64::from(*x) - i64::from(*y))
        .collect();
    Some(ProductForm {
        variables: q.variables().to_vec(),
        exponents,
    })
}

fn describe(s: &StageStatus) -> String {
    match s {
        StageStatus::Decided => "decided".into(),
        StageStatus::Inconclusive(m) => format!("inconclusive ({m})"),
        StageStatus::NotApplicable(m) => format!("not applicable ({m})"),
        StageStatus::Skipped => "skipped".into(),
        StageStatus::Failed(m) => format!("failed ({m})"),
    }
}

fn evidence(p: &Polynomial, ev: EvidenceOptions) -> (StageOutcome, Option<Classification>) {
    let problem = match ColoringProblem::new(p.clone(), ev.n, ev.colors, Mode::NonTrivial) {
        Ok(pr) => pr,
        Err(e) => return (StageStatus::Failed(e.to_string()), None),
    };
    match search_coloring(&problem, ev.budget) {
        Ok(o) => {
            let note = match o.kind {
                OutcomeKind::ColoringFound => format!(
                    "a {}-coloring of [1..{}] has no non-constant monochromatic solution{}",
                    ev.colors,
                    ev.n,
                    if o.vacuous { " (no solutions at all)" } else { "" }
                ),
                OutcomeKind::Forced => format!(
                    "every {}-coloring of [1..{}] has a non-constant monochromatic solution",
                    ev.colors, ev.n
                ),
                OutcomeKind::BudgetExhausted => {
                    format!("search on [1..{}] exhausted its budget", ev.n)
                }
            };
            (
                StageStatus::Inconclusive(note.clone()),
                Some(Classification::open(vec![note])),
            )
        }
        Err(e) => (StageStatus::Failed(e.to_string()), None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(s: &str) -> Verdict {
        analyze(s, &PipelineOptions::default()).unwrap().verdict()
    }

    #[test]
    fn corpus_verdicts() {
        assert_eq!(verdict("x + y = z"), Verdict::ProvablyPR);
        assert_eq!(verdict("x + y = 3*z"), Verdict::ProvablyNotPR);
        assert_eq!(verdict("x*y = z^2"), Verdict::ProvablyPR);
        assert_eq!(verdict("x + y = z^2"), Verdict::NotNonTriviallyPR);
        assert_eq!(verdict("x^2 + y^3 = z^5"), Verdict::NotNonTriviallyPR);
        assert_eq!(verdict("x1^2*x2 = 2*x3"), Verdict::ProvablyNotPR);
        assert_eq!(verdict("x*(y1 + y2) = z^2"), Verdict::ProvablyPR);
        assert_eq!(verdict("x^2 + y^2 = z^2"), Verdict::Open);
    }

    #[test]
    fn monomial_equations_use_multiplicative_rado() {
        let r = analyze("x*y = z^2", &PipelineOptions::default()).unwrap();
        let m = &r.stages[0];
        assert_eq!(m.stage, Stage::Multiplicative);
        assert_eq!(m.status, StageStatus::Decided);
        assert!(matches!(r.final_classification.certificate, Certificate::Multiplicative { .. }));
        assert!(verdict("x*y = 2*z^2").is_negative());
    }

    #[test]
    fn skipping_and_evidence() {
        let mut opts = PipelineOptions::default();
        opts.skip.insert(Stage::Linear);
        opts.skip.insert(Stage::RadoPolynomial);
        opts.skip.insert(Stage::FamilyF);
        opts.skip.insert(Stage::DegreeGrouped);
        opts.skip.insert(Stage::MaximalHomogeneous);
        opts.evidence = Some(EvidenceOptions {
            n: 4,
            colors: 2,
            budget: 1_000_000,
        });
        let r = analyze("x + y = z", &opts).unwrap();
        assert_eq!(r.verdict(), Verdict::Open);
        assert!(r.stages.iter().any(|s| s.status == StageStatus::Skipped));
        let Certificate::Evidence { notes } = &r.final_classification.certificate else {
            panic!("open verdicts carry evidence");
        };
        assert!(notes.iter().any(|n| n.contains("2-coloring of [1..4]")));
    }

    #[test]
    fn deterministic_without_timing() {
        let opts = PipelineOptions {
            record_timing: false,
            ..PipelineOptions::default()
        };
        let a = serde_json::to_string(&analyze("x*y1 + x*y2 = z^2", &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&analyze("x*y1 + x*y2 = z^2", &opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_input() {
        assert!(matches!(
            analyze("x = x", &PipelineOptions::default()),
            Err(PipelineError::Degenerate)
        ));
        assert!(matches!(
            analyze("x + = 2", &PipelineOptions::default()),
            Err(PipelineError::Parse(_))
        ));
    }
}
