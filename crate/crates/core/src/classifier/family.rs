//! Certificates for membership in the closure family generated by Rado
//! polynomials and product equations under substitution and reciprocals.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rado::{detect_rado_polynomial, RadoDecomposition};
use super::{Certificate, Classification, InjectivityConstraint, Verdict};
use crate::poly::{MultiIndex, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFCertificate {
    pub root: CertNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertNode {
    pub polynomial: Polynomial,
    pub rule: Rule,
    pub injectivity: Vec<InjectivityConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    AxiomRadoPolynomial {
        decomposition: RadoDecomposition,
    },
    /// `x − ∏ y_i`
    AxiomProduct {
        x: String,
        factors: Vec<String>,
    },
    /// `x − ∏ y_i^{a_i}` with `Σ a_i = 1`
    AxiomWeightedProduct {
        x: String,
        factors: Vec<String>,
        exponents: Vec<i64>,
    },
    /// `outer(glue, …)` with `glue` replaced by `g`, where `inner = glue − g`.
    Substitution {
        glue: String,
        outer: Box<CertNode>,
        inner: Box<CertNode>,
    },
    /// `child(1/x₁,…,1/xₙ)` for a child homogeneous of `degree`.
    Reciprocal {
        degree: i64,
        child: Box<CertNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {reason}")]
pub struct ValidationError {
    /// Slash-separated location of the failing node, e.g. `root/outer/inner`.
    pub path: String,
    pub reason: String,
}

/// Checks every node of `cert` and returns the injectivity it guarantees.
pub fn validate_family_f(
    p: &Polynomial,
    cert: &FamilyFCertificate,
) -> Result<Classification, ValidationError> {
    if !cert.root.polynomial.equivalent_on_naturals(p) {
        return Err(ValidationError {
            path: "root".into(),
            reason: format!(
                "certificate proves {} but the equation is {}",
                cert.root.polynomial, p
            ),
        });
    }
    let injectivity = validate_node(&cert.root, "root")?;
    Ok(Classification {
        verdict: Verdict::ProvablyPR,
        certificate: Certificate::FamilyF(cert.clone()),
        injectivity,
    })
}

fn validate_node(node: &CertNode, path: &str) -> Result<Vec<InjectivityConstraint>, ValidationError> {
    let fail = |reason: String| ValidationError {
        path: path.to_string(),
        reason,
    };
    let matches = |expected: &Polynomial| -> Result<(), ValidationError> {
        if expected.equivalent_on_naturals(&node.polynomial) {
            Ok(())
        } else {
            Err(fail(format!(
                "rule yields {} but the node holds {}",
                expected, node.polynomial
            )))
        }
    };
    let derived = match &node.rule {
        Rule::AxiomRadoPolynomial { decomposition } => {
            decomposition.check().map_err(fail)?;
            matches(&decomposition.polynomial().map_err(|e| fail(e.to_string()))?)?;
            decomposition.injectivity()
        }
        Rule::AxiomProduct { x, factors } => {
            let ones = vec![1; factors.len()];
            matches(&product_polynomial(x, factors, &ones).map_err(fail)?)?;
            full_product_injectivity(x, factors)
        }
        Rule::AxiomWeightedProduct {
            x,
            factors,
            exponents,
        } => {
            if exponents.len() != factors.len() {
                return Err(fail("exponent count does not match factors".into()));
            }
            if exponents.contains(&0) {
                return Err(fail("zero exponent".into()));
            }
            if exponents.iter().sum::<i64>() != 1 {
                return Err(fail("exponents do not sum to 1".into()));
            }
            matches(&product_polynomial(x, factors, exponents).map_err(fail)?)?;
            full_product_injectivity(x, factors)
        }
        Rule::Substitution { glue, outer, inner } => {
            let d_outer = validate_node(outer, &format!("{path}/outer"))?;
            let d_inner = validate_node(inner, &format!("{path}/inner"))?;
            matches(&compose(glue, &outer.polynomial, &inner.polynomial).map_err(fail)?)?;
            substitution_injectivity(glue, &d_outer, &d_inner)
        }
        Rule::Reciprocal { degree, child } => {
            let d_child = validate_node(child, &format!("{path}/child"))?;
            matches(&reciprocal_of(&child.polynomial, *degree).map_err(fail)?)?;
            d_child
        }
    };
    for claim in &node.injectivity {
        if !claim.implied_by_any(&derived) {
            return Err(fail(format!(
                "claimed injectivity |{{{}}}| >= {} is not guaranteed",
                claim.variables.join(","),
                claim.min_distinct
            )));
        }
    }
    Ok(derived)
}

fn product_polynomial(x: &str, factors: &[String], exponents: &[i64]) -> Result<Polynomial, String> {
    if factors.len() < 2 {
        return Err("a product needs at least two factors".into());
    }
    let mut vars = vec![x.to_string()];
    vars.extend(factors.iter().cloned());
    let mut exps = vec![0i32];
    for &a in exponents {
        exps.push(i32::try_from(a).map_err(|_| "exponent out of range".to_string())?);
    }
    let laurent = exponents.iter().any(|&a| a < 0);
    let mut lead = vec![0i32; vars.len()];
    lead[0] = 1;
    Polynomial::from_terms(vars, [(lead, 1), (exps, -1)], laurent).map_err(|e| e.to_string())
}

fn full_product_injectivity(x: &str, factors: &[String]) -> Vec<InjectivityConstraint> {
    InjectivityConstraint::full(std::iter::once(x.to_string()).chain(factors.iter().cloned()))
        .into_iter()
        .collect()
}

/// Solves `inner = 0` for `glue` and substitutes into `outer`.
fn compose(glue: &str, outer: &Polynomial, inner: &Polynomial) -> Result<Polynomial, String> {
    let g = isolate(glue, inner)?;
    let outer = outer.strip_monomial_content().drop_unused_variables();
    if outer.var_position(glue).is_none() {
        return Err(format!("outer polynomial does not contain {glue}"));
    }
    let g_vars = g.used_variable_names();
    if g_vars.is_empty() {
        return Err(format!("{glue} is fixed to a constant"));
    }
    let outer_vars = outer.used_variable_names();
    if let Some(v) = g_vars.iter().find(|v| outer_vars.contains(*v)) {
        return Err(format!("variable {v} occurs on both sides of the substitution"));
    }
    outer.substitute(glue, &g).map_err(|e| e.to_string())
}

// `inner = ±glue + rest` with `glue` nowhere else; returns `g` with `glue = g`.
fn isolate(glue: &str, inner: &Polynomial) -> Result<Polynomial, String> {
    let inner = inner.drop_unused_variables();
    let pos = inner
        .var_position(glue)
        .ok_or_else(|| format!("inner polynomial does not contain {glue}"))?;
    let mut glue_terms = inner.terms().filter(|(a, _)| a.exponents()[pos] != 0);
    let (alpha, c) = glue_terms
        .next()
        .ok_or_else(|| format!("inner polynomial does not contain {glue}"))?;
    if glue_terms.next().is_some() {
        return Err(format!("{glue} occurs in more than one term of the inner polynomial"));
    }
    if *alpha != MultiIndex::unit(inner.num_vars(), pos) || !c.abs().is_one() {
        return Err(format!("inner polynomial is not of the form {glue} - g"));
    }
    let c = c.clone();
    let unit = Polynomial::variable(inner.variables().to_vec(), pos).scale(&c);
    Ok(inner.sub(&unit).scale(&-c).drop_unused_variables())
}

fn reciprocal_of(child: &Polynomial, degree: i64) -> Result<Polynomial, String> {
    let c = child.strip_monomial_content();
    match c.homogeneous_degree() {
        Some(d) if d == degree => {}
        Some(d) => return Err(format!("child is homogeneous of degree {d}, not {degree}")),
        None => return Err("child is not homogeneous".into()),
    }
    c.reciprocal_transform()
        .map(|r| r.polynomial)
        .map_err(|e| e.to_string())
}

/// Each side loses one distinct value; a constraint that mentioned the glue
/// variable loses it as well.
fn substitution_injectivity(
    glue: &str,
    outer: &[InjectivityConstraint],
    inner: &[InjectivityConstraint],
) -> Vec<InjectivityConstraint> {
    let mut out = BTreeSet::new();
    for c in outer.iter().chain(inner) {
        let had_glue = c.variables.iter().any(|v| v == glue);
        let s = c.min_distinct.saturating_sub(1 + usize::from(had_glue));
        let vars = c.variables.iter().filter(|v| *v != glue).cloned();
        out.extend(InjectivityConstraint::new(vars, s));
    }
    out.into_iter().collect()
}

/// Bounded depth-first search over the rules. Deterministic; absence of a
/// certificate says nothing about partition regularity.
pub fn derive_family_f(p: &Polynomial, max_depth: usize) -> Option<FamilyFCertificate> {
    if p.is_zero() {
        return None;
    }
    let mut search = Search {
        failed: HashSet::new(),
    };
    let root = search.derive(p, max_depth)?;
    Some(FamilyFCertificate { root })
}

struct Search {
    failed: HashSet<(String, usize)>,
}

// Searching more subsets than this is not worth it.
const MAX_SUBSET_VARS: usize = 12;

impl Search {
    fn derive(&mut self, p: &Polynomial, depth: usize) -> Option<CertNode> {
        if let Some(node) = axiom(p) {
            return Some(node);
        }
        if depth == 0 {
            return None;
        }
        let key = (p.zero_set_normal_form().to_string(), depth);
        if self.failed.contains(&key) {
            return None;
        }
        let found = self
            .by_substitution(p, depth)
            .or_else(|| self.by_reciprocal(p, depth));
        if found.is_none() {
            self.failed.insert(key);
        }
        found
    }

    fn by_substitution(&mut self, p: &Polynomial, depth: usize) -> Option<CertNode> {
        let q = p.strip_monomial_content().drop_unused_variables();
        let n = q.num_vars();
        if !(2..=MAX_SUBSET_VARS).contains(&n) {
            return None;
        }
        let glue = fresh_name(&q);
        for size in 1..n {
            for subset in itertools::Itertools::combinations(0..n, size) {
                let Some((outer, g)) = factor_through(&q, &subset, &glue) else {
                    continue;
                };
                let inner = glue_polynomial(&glue, &g);
                let Some(outer_node) = self.derive(&outer, depth - 1) else {
                    continue;
                };
                let Some(inner_node) = self.derive(&inner, depth - 1) else {
                    continue;
                };
                let injectivity =
                    substitution_injectivity(&glue, &outer_node.injectivity, &inner_node.injectivity);
                return Some(CertNode {
                    polynomial: p.clone(),
                    rule: Rule::Substitution {
                        glue,
                        outer: Box::new(outer_node),
                        inner: Box::new(inner_node),
                    },
                    injectivity,
                });
            }
        }
        None
    }

    fn by_reciprocal(&mut self, p: &Polynomial, depth: usize) -> Option<CertNode> {
        let q = p.strip_monomial_content().drop_unused_variables();
        q.homogeneous_degree()?;
        let child = q.reciprocal_transform().ok()?.polynomial.primitive_part();
        if child.equivalent_on_naturals(&q) {
            return None;
        }
        let degree = child.strip_monomial_content().homogeneous_degree()?;
        let node = self.derive(&child, depth - 1)?;
        Some(CertNode {
            polynomial: p.clone(),
            injectivity: node.injectivity.clone(),
            rule: Rule::Reciprocal {
                degree,
                child: Box::new(node),
            },
        })
    }
}

fn fresh_name(p: &Polynomial) -> String {
    let taken: BTreeSet<&str> = p.variables().iter().map(String::as_str).collect();
    std::iter::once("w".to_string())
        .chain((1..).map(|i| format!("w{i}")))
        .find(|v| !taken.contains(v.as_str()))
        .expect("unbounded supply of names")
}

fn glue_polynomial(glue: &str, g: &Polynomial) -> Polynomial {
    let mut vars = vec![glue.to_string()];
    vars.extend(g.variables().iter().cloned());
    let g = g.embed(&vars).expect("fresh glue name");
    Polynomial::variable(vars, 0).sub(&g)
}

/// Writes `q = f(w, rest)` with `w = g(vars in subset)`: terms are grouped by
/// their part outside the subset and each group must be `a·g^e`.
fn factor_through(q: &Polynomial, subset: &[usize], glue: &str) -> Option<(Polynomial, Polynomial)> {
    let n = q.num_vars();
    let in_s: Vec<bool> = (0..n).map(|i| subset.contains(&i)).collect();
    let mut groups: BTreeMap<MultiIndex, Vec<(MultiIndex, BigInt)>> = BTreeMap::new();
    for (alpha, c) in q.terms() {
        let e = alpha.exponents();
        let outside = MultiIndex::new((0..n).map(|i| if in_s[i] { 0 } else { e[i] }).collect());
        let inside = MultiIndex::new((0..n).map(|i| if in_s[i] { e[i] } else { 0 }).collect());
        groups.entry(outside).or_default().push((inside, c.clone()));
    }
    let vars = q.variables().to_vec();
    let group_poly = |terms: &[(MultiIndex, BigInt)]| {
        Polynomial::from_terms(
            vars.clone(),
            terms.iter().map(|(a, c)| (a.exponents().to_vec(), c.clone())),
            false,
        )
        .expect("same variables")
    };
    let nonconstant: Vec<Polynomial> = groups
        .values()
        .filter(|t| t.len() > 1 || !t[0].0.is_constant())
        .map(|t| group_poly(t))
        .collect();
    let seed = nonconstant
        .iter()
        .min_by_key(|g| g.total_degree().unwrap_or(0))?
        .primitive_part();
    let top = seed.total_degree().unwrap_or(0);
    let g = (2..=top.max(1) as u32)
        .rev()
        .find_map(|e| seed.try_root(e))
        .map(|r| r.primitive_part())
        .unwrap_or(seed);
    if is_trivial(&g) {
        return None;
    }
    let g_degree = g.total_degree()?;

    // f over the outside variables followed by the glue variable.
    let mut f_vars: Vec<String> = (0..n).filter(|&i| !in_s[i]).map(|i| vars[i].clone()).collect();
    f_vars.push(glue.to_string());
    let mut f_terms: Vec<(Vec<i32>, BigInt)> = Vec::new();
    for (outside, terms) in &groups {
        let m: Vec<i32> = (0..n).filter(|&i| !in_s[i]).map(|i| outside.exponents()[i]).collect();
        let h = group_poly(terms);
        let (a, e) = if terms.len() == 1 && terms[0].0.is_constant() {
            (terms[0].1.clone(), 0)
        } else {
            let d = h.total_degree()?;
            if d % g_degree != 0 {
                return None;
            }
            let e = u32::try_from(d / g_degree).ok()?;
            let ge = g.pow(e).ok()?;
            let (_, lead_h) = h.terms().next_back()?;
            let (_, lead_g) = ge.terms().next_back()?;
            if !lead_h.is_multiple_of(lead_g) {
                return None;
            }
            let a = lead_h / lead_g;
            if ge.scale(&a) != h {
                return None;
            }
            (a, e as i32)
        };
        let mut exps = m;
        exps.push(e);
        f_terms.push((exps, a));
    }
    let f = Polynomial::from_terms(f_vars, f_terms, false).ok()?;
    if f.var_position(glue).is_none() || f.used_variable_names().iter().all(|v| v != glue) {
        return None;
    }
    Some((f, g.drop_unused_variables()))
}

// `c·v`: substituting it only renames a variable.
fn is_trivial(g: &Polynomial) -> bool {
    if g.num_terms() != 1 {
        return false;
    }
    let (alpha, _) = g.terms().next().expect("one term");
    alpha.is_constant() || (alpha.degree() == 1 && alpha.variables().count() == 1)
}

fn axiom(p: &Polynomial) -> Option<CertNode> {
    if let Some(decomposition) = detect_rado_polynomial(p) {
        return Some(CertNode {
            polynomial: p.clone(),
            injectivity: decomposition.injectivity(),
            rule: Rule::AxiomRadoPolynomial { decomposition },
        });
    }
    let q = p.drop_unused_variables();
    if q.num_terms() != 2 {
        return None;
    }
    let terms: Vec<(&MultiIndex, &BigInt)> = q.terms().collect();
    let (c0, c1) = (terms[0].1, terms[1].1);
    if !(c0 + c1).is_zero() || !c0.abs().is_one() {
        return None;
    }
    let diff: Vec<i64> = terms[0]
        .0
        .exponents()
        .iter()
        .zip(terms[1].0.exponents())
        .map(|(a, b)| i64::from(*a) - i64::from(*b))
        .collect();
    let vars = q.variables();
    let nonzero: Vec<usize> = (0..diff.len()).filter(|&i| diff[i] != 0).collect();
    if nonzero.len() < 3 {
        return None;
    }
    // Plain product: a lone variable against a squarefree product of the others.
    for (lone, other) in [(terms[0].0, terms[1].0), (terms[1].0, terms[0].0)] {
        let l: Vec<usize> = lone.variables().collect();
        let o: Vec<usize> = other.variables().collect();
        if l.len() == 1
            && lone.exponents()[l[0]] == 1
            && !o.contains(&l[0])
            && o.len() >= 2
            && o.iter().all(|&i| other.exponents()[i] == 1)
            && !lone.has_negative()
        {
            let x = vars[l[0]].clone();
            let factors: Vec<String> = o.iter().map(|&i| vars[i].clone()).collect();
            return Some(CertNode {
                polynomial: p.clone(),
                injectivity: full_product_injectivity(&x, &factors),
                rule: Rule::AxiomProduct { x, factors },
            });
        }
    }
    // Weighted product: x = ∏ y^{a} with Σa = 1.
    if diff.iter().sum::<i64>() != 0 {
        return None;
    }
    let &xi = nonzero.iter().find(|&&i| diff[i].abs() == 1)?;
    let x = vars[xi].clone();
    let mut factors = Vec::new();
    let mut exponents = Vec::new();
    for &i in nonzero.iter().filter(|&&i| i != xi) {
        factors.push(vars[i].clone());
        exponents.push(-diff[i] / diff[xi]);
    }
    Some(CertNode {
        polynomial: p.clone(),
        injectivity: full_product_injectivity(&x, &factors),
        rule: Rule::AxiomWeightedProduct {
            x,
            factors,
            exponents,
        },
    })
}
