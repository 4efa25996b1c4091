//! Analytic optimum and Pareto-front oracles, a brute-force enumerator that
//! cross-checks them at tiny sizes, and the non-redundancy classifier.

use std::fmt;

use crate::error::{Error, Result};
use crate::evolve::dominates;
use crate::fitness::{MoFitness, Problem};
use crate::tree::{SyntaxTree, Terminal};

/// Objective vectors of a Pareto front, ordered by complexity.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoFront {
    points: Vec<MoFitness>,
}

impl ParetoFront {
    /// Keeps the non-dominated, distinct vectors of `candidates`.
    pub fn from_candidates(candidates: &[MoFitness]) -> Self {
        let mut points: Vec<MoFitness> = Vec::new();
        for &p in candidates {
            if candidates.iter().any(|&q| dominates(q, p)) || points.contains(&p) {
                continue;
            }
            points.push(p);
        }
        points.sort_by(|a, b| a.c.cmp(&b.c).then(a.f.total_cmp(&b.f)));
        Self { points }
    }

    pub fn points(&self) -> &[MoFitness] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, v: MoFitness) -> bool {
        self.points.contains(&v)
    }

    /// True iff every front vector appears among `vectors`.
    pub fn is_covered_by<I>(&self, vectors: I) -> bool
    where
        I: IntoIterator<Item = MoFitness>,
    {
        let mut hit = vec![false; self.points.len()];
        for v in vectors {
            if let Some(i) = self.points.iter().position(|&p| p == v) {
                hit[i] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_mutually_non_dominated(&self) -> bool {
        self.points
            .iter()
            .all(|&a| self.points.iter().all(|&b| !dominates(a, b)))
    }
}

impl fmt::Display for ParetoFront {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Largest achievable `F`: every variable expressed.
pub fn optimum_value(problem: &Problem) -> f64 {
    problem.weights().total()
}

/// `{(0,0)} ∪ {(sum of the j largest weights, 2j-1) : j = 1..n}`.
pub fn pareto_front(problem: &Problem) -> ParetoFront {
    let w = problem.weights();
    let mut points = Vec::with_capacity(w.n() + 1);
    points.push(MoFitness::new(0.0, 0));
    let mut acc = 0.0;
    for (j, &i) in w.rank_order().iter().enumerate() {
        acc += w.as_slice()[i];
        points.push(MoFitness::new(acc, 2 * (j + 1) - 1));
    }
    ParetoFront { points }
}

pub const BRUTE_FORCE_MAX_N: usize = 4;
pub const BRUTE_FORCE_MAX_LEAVES: usize = 8;

/// Enumerates every leaf sequence of length `0..=max_leaves` over the `2n`
/// terminals and returns the non-dominated objective vectors. Fitness only
/// depends on the leaf sequence and a sequence of length `L` has complexity
/// `2L - 1`, so tree shapes need not be enumerated.
pub fn brute_force_front(problem: &Problem, max_leaves: usize) -> Result<ParetoFront> {
    let n = problem.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::EnumerationLimit(format!("n = {n} > {BRUTE_FORCE_MAX_N}")));
    }
    if max_leaves > BRUTE_FORCE_MAX_LEAVES {
        return Err(Error::EnumerationLimit(format!(
            "max_leaves = {max_leaves} > {BRUTE_FORCE_MAX_LEAVES}"
        )));
    }
    let alphabet = 2 * n as u32;
    let mut candidates = vec![MoFitness::new(0.0, 0)];
    for len in 1..=max_leaves {
        let mut codes = vec![0u32; len];
        let mut best = f64::NEG_INFINITY;
        loop {
            let f = problem.evaluate_leaves(codes.iter().map(|&c| Terminal::from_code(c)))?;
            if f > best {
                best = f;
            }
            // odometer increment
            let mut d = 0;
            while d < len {
                codes[d] += 1;
                if codes[d] < alphabet {
                    break;
                }
                codes[d] = 0;
                d += 1;
            }
            if d == len {
                break;
            }
        }
        candidates.push(MoFitness::new(best, 2 * len - 1));
    }
    Ok(ParetoFront::from_candidates(&candidates))
}

/// Empty, or complexity exactly `2k - 1` for `k` expressed variables.
pub fn is_non_redundant(tree: &SyntaxTree, problem: &Problem) -> Result<bool> {
    if tree.is_empty() {
        return Ok(true);
    }
    let k = problem.expressed_count(tree)?;
    Ok(k >= 1 && tree.complexity() == 2 * k - 1)
}

/// Success predicate for the single-objective hill climber.
#[derive(Clone, Debug)]
pub struct SingleObjectiveTarget {
    optimum: f64,
    require_non_redundant: bool,
}

impl SingleObjectiveTarget {
    pub fn new(problem: &Problem, require_non_redundant: bool) -> Self {
        Self { optimum: optimum_value(problem), require_non_redundant }
    }

    pub fn optimum(&self) -> f64 {
        self.optimum
    }

    /// With the strict flag, an optimal `F` must also come with the minimal
    /// complexity `2n - 1`.
    pub fn reached(&self, fitness: MoFitness, n: usize) -> bool {
        fitness.f == self.optimum && (!self.require_non_redundant || fitness.c == 2 * n - 1)
    }
}
