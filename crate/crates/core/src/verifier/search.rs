use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::solutions::{enumerate_solutions, value_sets};
use super::{
    check_coloring, Coloring, ColoringProblem, Mode, OutcomeKind, SearchOutcome, VerifierError,
    MAX_COLORS,
};
use crate::poly::Polynomial;

/// Outcome of a search over raw value-set constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSearch {
    pub kind: OutcomeKind,
    pub witness: Option<Coloring>,
    pub nodes: u64,
    pub constraints: usize,
}

// Superset constraints are implied by their subsets.
fn minimal_sets(n: u64, sets: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut sorted: Vec<Vec<u64>> = sets
        .iter()
        .filter(|s| !s.is_empty() && s.iter().all(|&v| v >= 1 && v <= n))
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sorted.dedup();
    let mut kept: HashSet<Vec<u64>> = HashSet::new();
    let mut out = Vec::new();
    for s in sorted {
        let k = s.len();
        let implied = k <= 12
            && (1..(1u32 << k) - 1).any(|mask| {
                let sub: Vec<u64> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                kept.contains(&sub)
            });
        if !implied {
            kept.insert(s.clone());
            out.push(s);
        }
    }
    out
}

struct State<'a> {
    sets: &'a [Vec<u64>],
    // constraint ids containing each element (index = element − 1)
    occurs: Vec<Vec<usize>>,
    color: Vec<Option<u32>>,
    domain: Vec<u64>,
    trail: Vec<(usize, u64)>,
    r: u32,
    nodes: u64,
    budget: u64,
}

enum Step {
    Found,
    Exhausted,
    Budget,
}

impl State<'_> {
    // Colors of a constraint's assigned members if they all agree, plus the
    // unassigned members.
    fn status(&self, id: usize) -> (Option<u32>, bool, Vec<usize>) {
        let mut common: Option<u32> = None;
        let mut mixed = false;
        let mut free = Vec::new();
        for &v in &self.sets[id] {
            let i = v as usize - 1;
            match self.color[i] {
                Some(c) => match common {
                    None => common = Some(c),
                    Some(d) if d != c => mixed = true,
                    _ => {}
                },
                None => free.push(i),
            }
        }
        (common, mixed, free)
    }

    // Assigns color c to element e and prunes neighbours; false on conflict.
    fn assign(&mut self, e: usize, c: u32) -> bool {
        self.color[e] = Some(c);
        let bit = 1u64 << c;
        for k in 0..self.occurs[e].len() {
            let id = self.occurs[e][k];
            let (common, mixed, free) = self.status(id);
            if mixed || common != Some(c) {
                continue;
            }
            match free[..] {
                [] => return false,
                [f] if self.domain[f] & bit != 0 => {
                    self.domain[f] &= !bit;
                    self.trail.push((f, bit));
                    if self.domain[f] == 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn undo(&mut self, e: usize, mark: usize) {
        self.color[e] = None;
        while self.trail.len() > mark {
            let (f, bit) = self.trail.pop().expect("above mark");
            self.domain[f] |= bit;
        }
    }

    // Number of domain values c would remove from later elements.
    fn cost(&self, e: usize, c: u32) -> usize {
        self.occurs[e]
            .iter()
            .filter(|&&id| {
                let mut others_free = 0;
                let mut all_c = true;
                for &v in &self.sets[id] {
                    let i = v as usize - 1;
                    if i == e {
                        continue;
                    }
                    match self.color[i] {
                        Some(d) if d != c => all_c = false,
                        Some(_) => {}
                        None => others_free += 1,
                    }
                }
                all_c && others_free == 1
            })
            .count()
    }

    fn search(&mut self, e: usize, max_used: Option<u32>) -> Step {
        if e == self.color.len() {
            return Step::Found;
        }
        let limit = max_used.map_or(0, |m| (m + 1).min(self.r - 1));
        let mut options: Vec<(usize, u32)> = (0..=limit)
            .filter(|&c| self.domain[e] >> c & 1 == 1)
            .map(|c| (self.cost(e, c), c))
            .collect();
        options.sort_unstable();
        for (_, c) in options {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::Budget;
            }
            let mark = self.trail.len();
            if self.assign(e, c) {
                let used = Some(max_used.map_or(c, |m| m.max(c)));
                match self.search(e + 1, used) {
                    Step::Exhausted => {}
                    other => return other,
                }
            }
            self.undo(e, mark);
        }
        Step::Exhausted
    }
}

/// Searches for an `r`-coloring of `[1..n]` with no set in `sets`
/// monochromatic. Sets with elements outside `[1..n]` are ignored.
pub fn search_value_sets(n: u64, r: u32, sets: &[Vec<u64>], budget: u64) -> SetSearch {
    assert!((1..=MAX_COLORS).contains(&r), "color count out of range");
    let sets = minimal_sets(n, sets);
    let constraints = sets.len();
    let done = |kind, witness, nodes| SetSearch {
        kind,
        witness,
        nodes,
        constraints,
    };
    if sets.iter().any(|s| s.len() == 1) {
        return done(OutcomeKind::Forced, None, 0);
    }
    let mut occurs = vec![Vec::new(); n as usize];
    for (id, s) in sets.iter().enumerate() {
        for &v in s {
            occurs[v as usize - 1].push(id);
        }
    }
    let full = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
    let mut state = State {
        sets: &sets,
        occurs,
        color: vec![None; n as usize],
        domain: vec![full; n as usize],
        trail: Vec::new(),
        r,
        nodes: 0,
        budget,
    };
    match state.search(0, None) {
        Step::Found => {
            let coloring = Coloring::from_partial(&state.color).expect("complete assignment");
            done(OutcomeKind::ColoringFound, Some(coloring), state.nodes)
        }
        Step::Exhausted => done(OutcomeKind::Forced, None, state.nodes),
        Step::Budget => done(OutcomeKind::BudgetExhausted, None, state.nodes),
    }
}

/// Backtracking search for a coloring without monochromatic solutions.
pub fn search_coloring(problem: &ColoringProblem, budget: u64) -> Result<SearchOutcome, VerifierError> {
    let start = Instant::now();
    let solutions = enumerate_solutions(&problem.polynomial, problem.n, &problem.mode)?;
    let sets = value_sets(&solutions);
    let found = search_value_sets(problem.n, problem.colors, &sets, budget);
    if let Some(w) = &found.witness {
        if let Some(bad) = check_coloring(&problem.polynomial, w, &problem.mode)? {
            return Err(VerifierError::InvalidProblem(format!(
                "search returned a coloring with monochromatic solution {bad:?}"
            )));
        }
    }
    Ok(SearchOutcome {
        kind: found.kind,
        witness: found.witness,
        nodes_explored: found.nodes,
        elapsed_ms: start.elapsed().as_millis() as u64,
        solution_count: solutions.len(),
        constraint_count: found.constraints,
        vacuous: solutions.is_empty(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum RadoNumber {
    /// Least `N` at which every coloring has a monochromatic solution.
    Found(u64),
    /// Colorings avoiding solutions exist for every `N` up to this bound.
    LowerBound(u64),
    /// The search at this `N` ran out of budget.
    BudgetExhausted(u64),
}

/// Least `N ≤ n_max` with every `r`-coloring of `[1..N]` forced.
pub fn rado_number(
    p: &Polynomial,
    r: u32,
    mode: &Mode,
    n_max: u64,
    budget: u64,
) -> Result<RadoNumber, VerifierError> {
    ColoringProblem::new(p.clone(), n_max.max(1), r, mode.clone())?;
    let sets = value_sets(&enumerate_solutions(p, n_max, mode)?);
    for n in 1..=n_max {
        let sub: Vec<Vec<u64>> = sets
            .iter()
            .filter(|s| s.last().is_some_and(|&m| m <= n))
            .cloned()
            .collect();
        match search_value_sets(n, r, &sub, budget).kind {
            OutcomeKind::Forced => return Ok(RadoNumber::Found(n)),
            OutcomeKind::BudgetExhausted => return Ok(RadoNumber::BudgetExhausted(n)),
            OutcomeKind::ColoringFound => {}
        }
    }
    Ok(RadoNumber::LowerBound(n_max))
}
