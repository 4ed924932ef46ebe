use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::solutions::{enumerate_solutions, value_sets};
use super::{ColoringProblem, VerifierError};

// Variable for "element k has color c", 1-based for DIMACS.
fn var(k: u64, c: u32, r: u32) -> u64 {
    (k - 1) * r as u64 + c as u64 + 1
}

/// CNF that is unsatisfiable exactly when every coloring of the problem
/// has a monochromatic solution.
pub fn export_dimacs(problem: &ColoringProblem) -> Result<String, VerifierError> {
    let solutions = enumerate_solutions(&problem.polynomial, problem.n, &problem.mode)?;
    let sets = value_sets(&solutions);
    let (n, r) = (problem.n, problem.colors);
    let pairs = r as u64 * (r as u64 - 1) / 2;
    let num_vars = n * r as u64;
    let num_clauses = n + n * pairs + r as u64 * sets.len() as u64;
    let mode = serde_json::to_string(&problem.mode).unwrap_or_default();

    let mut out = String::new();
    let _ = writeln!(out, "c equation: {} = 0", problem.polynomial);
    let _ = writeln!(out, "c N: {n}");
    let _ = writeln!(out, "c colors: {r}");
    let _ = writeln!(out, "c mode: {mode}");
    let _ = writeln!(out, "c variable (k, c) -> (k - 1) * {r} + c, colors numbered from 1");
    let _ = writeln!(out, "c solutions: {}, distinct value sets: {}", solutions.len(), sets.len());
    let _ = writeln!(out, "p cnf {num_vars} {num_clauses}");
    for k in 1..=n {
        for c in 0..r {
            let _ = write!(out, "{} ", var(k, c, r));
        }
        out.push_str("0\n");
    }
    for k in 1..=n {
        for a in 0..r {
            for b in a + 1..r {
                let _ = writeln!(out, "-{} -{} 0", var(k, a, r), var(k, b, r));
            }
        }
    }
    for s in &sets {
        for c in 0..r {
            for &k in s {
                let _ = write!(out, "-{} ", var(k, c, r));
            }
            out.push_str("0\n");
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u64,
    pub clauses: Vec<Vec<i64>>,
    pub comments: Vec<String>,
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, VerifierError> {
    let err = |line: usize, message: &str| VerifierError::Dimacs {
        line,
        message: message.to_string(),
    };
    let mut header: Option<(u64, usize)> = None;
    let mut comments = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(' ') {
                comments.push(rest.trim().to_string());
                continue;
            }
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "second problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [_, "cnf", v, c] = parts[..] else {
                return Err(err(line_no, "expected `p cnf <vars> <clauses>`"));
            };
            let v = v.parse().map_err(|_| err(line_no, "bad variable count"))?;
            let c = c.parse().map_err(|_| err(line_no, "bad clause count"))?;
            header = Some((v, c));
            continue;
        }
        let (num_vars, _) = header.ok_or_else(|| err(line_no, "clause before problem line"))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| err(line_no, "bad literal"))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > num_vars {
                return Err(err(line_no, "literal out of range"));
            } else {
                current.push(lit);
            }
        }
    }
    let (num_vars, expected) = header.ok_or_else(|| err(0, "missing problem line"))?;
    if !current.is_empty() {
        return Err(err(text.lines().count(), "unterminated clause"));
    }
    if clauses.len() != expected {
        return Err(err(0, &format!("header declares {expected} clauses, found {}", clauses.len())));
    }
    Ok(Cnf {
        num_vars,
        clauses,
        comments,
    })
}

impl Cnf {
    /// Reads back the value-set constraints of a coloring CNF with `r`
    /// colors. Returns `(N, sets)`.
    pub fn coloring_constraints(&self, r: u32) -> Result<(u64, Vec<Vec<u64>>), VerifierError> {
        let bad = |message: String| VerifierError::Dimacs { line: 0, message };
        if r == 0 || self.num_vars % r as u64 != 0 {
            return Err(bad("variable count is not a multiple of the color count".into()));
        }
        let n = self.num_vars / r as u64;
        let decode = |lit: i64| {
            let v = lit.unsigned_abs() - 1;
            (v / r as u64 + 1, (v % r as u64) as u32)
        };
        // set -> colors it is forbidden in
        let mut per_set: BTreeMap<Vec<u64>, Vec<u32>> = BTreeMap::new();
        let mut has_alo = vec![false; n as usize];
        for clause in &self.clauses {
            let lits: Vec<(u64, u32)> = clause.iter().map(|&l| decode(l)).collect();
            if clause.iter().all(|&l| l > 0) {
                let k = lits[0].0;
                if lits.iter().all(|&(e, _)| e == k) && lits.len() == r as usize {
                    has_alo[k as usize - 1] = true;
                    continue;
                }
                return Err(bad(format!("unexpected positive clause {clause:?}")));
            }
            if clause.iter().any(|&l| l > 0) {
                return Err(bad(format!("mixed clause {clause:?}")));
            }
            if lits.len() == 2 && lits[0].0 == lits[1].0 && lits[0].1 != lits[1].1 {
                continue;
            }
            let c = lits[0].1;
            if lits.iter().any(|&(_, d)| d != c) {
                return Err(bad(format!("clause mixes colors {clause:?}")));
            }
            let mut set: Vec<u64> = lits.iter().map(|&(e, _)| e).collect();
            set.sort_unstable();
            set.dedup();
            per_set.entry(set).or_default().push(c);
        }
        if let Some(k) = has_alo.iter().position(|&b| !b) {
            return Err(bad(format!("element {} has no at-least-one clause", k + 1)));
        }
        let mut sets = Vec::new();
        for (set, mut colors) in per_set {
            colors.sort_unstable();
            colors.dedup();
            if colors.len() != r as usize {
                return Err(bad(format!("set {set:?} is not forbidden in every color")));
            }
            sets.push(set);
        }
        Ok((n, sets))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_equation;
    use crate::verifier::Mode;

    fn problem(s: &str, n: u64, r: u32) -> ColoringProblem {
        ColoringProblem::new(parse_equation(s).unwrap().normalized, n, r, Mode::Any).unwrap()
    }

    #[test]
    fn schur_cnf_shape() {
        let text = export_dimacs(&problem("x + y = z", 5, 2)).unwrap();
        let cnf = parse_dimacs(&text).unwrap();
        assert_eq!(cnf.num_vars, 10);
        // 6 value sets: {1,2}, {1,2,3}, {1,3,4}, {1,4,5}, {2,3,5}, {2,4}
        assert_eq!(cnf.clauses.len(), 5 + 5 + 2 * 6);
        let (n, sets) = cnf.coloring_constraints(2).unwrap();
        assert_eq!(n, 5);
        assert_eq!(sets.len(), 6);
        assert!(cnf.comments.iter().any(|c| c.starts_with("equation:")));
    }

    #[test]
    fn trivial_instance() {
        let text = export_dimacs(&problem("x = 2", 1, 1)).unwrap();
        let cnf = parse_dimacs(&text).unwrap();
        assert_eq!(cnf.num_vars, 1);
        assert_eq!(cnf.clauses, vec![vec![1]]);
    }

    #[test]
    fn malformed_input() {
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2\n").is_err());
    }
}
