//! (1+1)-GP with both selection rules and the archive-based SMO-GP.
//!
//! The algorithms themselves never stop; [`run_algorithm`] drives them until
//! an oracle target predicate holds or the evaluation budget is spent. The
//! initial solution costs one evaluation and every iteration costs exactly
//! one more, so `evaluations = iterations + 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{MoFitness, Problem};
use crate::oracle::{is_non_redundant, pareto_front, ParetoFront, SingleObjectiveTarget};
use crate::tree::SyntaxTree;
use crate::variation::{mutate_in_place, MutationMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    /// Accept iff `F(Y) >= F(X)`.
    FOnly,
    /// Accept iff `F(Y) > F(X)`, or `F(Y) = F(X)` and `C(Y) <= C(X)`.
    MoParsimony,
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionRule::FOnly => "f-only",
            SelectionRule::MoParsimony => "mo-parsimony",
        })
    }
}

impl FromStr for SelectionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "f-only" | "f" => Ok(SelectionRule::FOnly),
            "mo-parsimony" | "mo" | "parsimony" => Ok(SelectionRule::MoParsimony),
            _ => Err(Error::Config(format!("unknown selection rule `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    GpSingle,
    GpMulti,
    SmogpSingle,
    SmogpMulti,
}

impl Algorithm {
    pub fn mode(self) -> MutationMode {
        match self {
            Algorithm::GpSingle | Algorithm::SmogpSingle => MutationMode::Single,
            Algorithm::GpMulti | Algorithm::SmogpMulti => MutationMode::Multi,
        }
    }

    pub fn is_population_based(self) -> bool {
        matches!(self, Algorithm::SmogpSingle | Algorithm::SmogpMulti)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::GpSingle => "gp-single",
            Algorithm::GpMulti => "gp-multi",
            Algorithm::SmogpSingle => "smogp-single",
            Algorithm::SmogpMulti => "smogp-multi",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "gp-single" => Ok(Algorithm::GpSingle),
            "gp-multi" => Ok(Algorithm::GpMulti),
            "smogp-single" => Ok(Algorithm::SmogpSingle),
            "smogp-multi" => Ok(Algorithm::SmogpMulti),
            _ => Err(Error::Config(format!("unknown algorithm `{s}`"))),
        }
    }
}

pub fn favors(rule: SelectionRule, y: MoFitness, x: MoFitness) -> bool {
    match rule {
        SelectionRule::FOnly => y.f >= x.f,
        SelectionRule::MoParsimony => y.f > x.f || (y.f == x.f && y.c <= x.c),
    }
}

/// `y ⪰ x`: no worse in `F` (maximized) and no worse in `C` (minimized).
pub fn weakly_dominates(y: MoFitness, x: MoFitness) -> bool {
    y.f >= x.f && y.c <= x.c
}

/// `y ≻ x`: weakly dominates and strictly better in at least one objective.
pub fn dominates(y: MoFitness, x: MoFitness) -> bool {
    weakly_dominates(y, x) && (y.f > x.f || y.c < x.c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub tree: SyntaxTree,
    pub fitness: MoFitness,
}

impl Individual {
    pub fn evaluated(tree: SyntaxTree, problem: &Problem) -> Result<Self> {
        let fitness = problem.mo_evaluate(&tree)?;
        Ok(Self { tree, fitness })
    }
}

/// `s` leaves, `k` expressed variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub s: usize,
    pub k_expressed: usize,
    pub s_minus_k: usize,
}

impl StepDiagnostics {
    pub fn of(tree: &SyntaxTree, problem: &Problem) -> Result<Self> {
        let s = tree.leaf_count();
        let k = problem.expressed_count(tree)?;
        Ok(Self { s, k_expressed: k, s_minus_k: s - k })
    }
}

/// One step of (1+1)-GP. Returns whether the offspring replaced `current`.
/// `scratch` is reused as the offspring buffer.
pub fn one_plus_one_step<R: Rng + ?Sized>(
    current: &mut Individual,
    scratch: &mut SyntaxTree,
    rule: SelectionRule,
    mode: MutationMode,
    problem: &Problem,
    rng: &mut R,
) -> Result<bool> {
    scratch.clone_from(&current.tree);
    mutate_in_place(scratch, problem.n(), mode, rng);
    let fitness = problem.mo_evaluate(scratch)?;
    if favors(rule, fitness, current.fitness) {
        std::mem::swap(&mut current.tree, scratch);
        current.fitness = fitness;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// The SMO-GP archive: mutually non-dominated individuals, one per
/// objective vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(initial: Individual) -> Self {
        Self { members: vec![initial] }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = MoFitness> + '_ {
        self.members.iter().map(|m| m.fitness)
    }

    /// Inserts `y` unless some member strictly dominates it; on insertion all
    /// members weakly dominated by `y` (including equal vectors) are dropped.
    pub fn offer(&mut self, y: Individual) -> bool {
        if self.members.iter().any(|z| dominates(z.fitness, y.fitness)) {
            return false;
        }
        self.members.retain(|z| !weakly_dominates(y.fitness, z.fitness));
        self.members.push(y);
        true
    }

    /// Violations of the archive invariant: no member weakly dominates another.
    pub fn invariant_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.members.iter().enumerate() {
            for (j, b) in self.members.iter().enumerate() {
                if i != j && weakly_dominates(a.fitness, b.fitness) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SmoStep {
    pub accepted: bool,
    pub offspring: MoFitness,
}

/// One SMO-GP iteration: uniform parent, one offspring, archive update. An
/// accepted offspring is the last archive member afterwards.
pub fn smo_gp_step<R: Rng + ?Sized>(
    pop: &mut Population,
    mode: MutationMode,
    problem: &Problem,
    rng: &mut R,
) -> Result<SmoStep> {
    assert!(!pop.is_empty(), "SMO-GP population must be non-empty");
    let parent = rng.gen_range(0..pop.len());
    let mut tree = pop.members[parent].tree.clone();
    mutate_in_place(&mut tree, problem.n(), mode, rng);
    let child = Individual::evaluated(tree, problem)?;
    let offspring = child.fitness;
    let accepted = pop.offer(child);
    Ok(SmoStep { accepted, offspring })
}

/// Per-step checks for debug-audited runs.
#[derive(Clone, Debug, Default)]
pub struct AuditOptions {
    /// Structural arity check on every offspring that enters the state.
    pub check_trees: bool,
    /// Exhaustive pairwise archive check after every SMO-GP step.
    pub check_archive: bool,
    pub population_bound: Option<usize>,
    /// Every accepted solution must be non-redundant.
    pub require_non_redundant: bool,
}

impl AuditOptions {
    pub fn full(population_bound: Option<usize>, require_non_redundant: bool) -> Self {
        Self { check_trees: true, check_archive: true, population_bound, require_non_redundant }
    }

    fn is_active(&self) -> bool {
        self.check_trees
            || self.check_archive
            || self.population_bound.is_some()
            || self.require_non_redundant
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub steps_audited: u64,
    pub violation_count: u64,
    /// First few violations, for diagnostics.
    pub violations: Vec<String>,
}

impl AuditReport {
    fn record(&mut self, msg: String) {
        self.violation_count += 1;
        if self.violations.len() < 16 {
            self.violations.push(msg);
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

/// One record per accepted step (iteration 0 is the initial solution).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub f: f64,
    pub c: usize,
    pub s: usize,
    pub k: usize,
}

impl TraceRecord {
    fn of(iteration: u64, ind_tree: &SyntaxTree, fitness: MoFitness, problem: &Problem) -> Result<Self> {
        let d = StepDiagnostics::of(ind_tree, problem)?;
        Ok(Self { iteration, f: fitness.f, c: fitness.c, s: d.s, k: d.k_expressed })
    }
}

#[derive(Clone, Debug)]
pub struct RunSpec<'a> {
    pub algorithm: Algorithm,
    /// Ignored by SMO-GP, which uses dominance.
    pub selection: SelectionRule,
    pub problem: &'a Problem,
    pub budget: u64,
    pub trace: bool,
    pub audit: AuditOptions,
    /// Single-objective success additionally requires complexity `2n - 1`.
    pub strict_target: bool,
}

impl<'a> RunSpec<'a> {
    pub fn new(algorithm: Algorithm, problem: &'a Problem, budget: u64) -> Self {
        Self {
            algorithm,
            selection: SelectionRule::MoParsimony,
            problem,
            budget,
            trace: false,
            audit: AuditOptions::default(),
            strict_target: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    /// Evaluations until first success, or the budget if unsuccessful.
    pub evaluations: u64,
    pub success: bool,
    pub init_complexity: usize,
    /// Largest complexity among solutions held in the state during the run.
    pub max_tree_size: usize,
    pub final_pop_size: usize,
    /// Objective vectors of the final state (one for (1+1)-GP).
    pub final_vectors: Vec<MoFitness>,
    pub trace: Vec<TraceRecord>,
    pub audit: AuditReport,
}

/// Counts front vectors present in an archive. Archive members have pairwise
/// distinct complexities, and every front vector has a distinct complexity.
fn covered_count(front: &ParetoFront, pop: &Population) -> usize {
    pop.vectors().filter(|&v| front.contains(v)).count()
}

pub fn run_algorithm<R: Rng + ?Sized>(
    spec: &RunSpec<'_>,
    init: SyntaxTree,
    rng: &mut R,
) -> Result<RunOutcome> {
    if spec.budget < 1 {
        return Err(Error::Config("budget must be at least 1".into()));
    }
    if spec.algorithm.is_population_based() {
        run_smo_gp(spec, init, rng)
    } else {
        run_one_plus_one(spec, init, rng)
    }
}

fn audit_tree(
    report: &mut AuditReport,
    opts: &AuditOptions,
    iteration: u64,
    tree: &SyntaxTree,
    problem: &Problem,
) -> Result<()> {
    if opts.check_trees && !tree.is_well_formed() {
        report.record(format!("iteration {iteration}: malformed tree {tree}"));
    }
    if opts.require_non_redundant && !is_non_redundant(tree, problem)? {
        report.record(format!("iteration {iteration}: redundant solution accepted: {tree}"));
    }
    Ok(())
}

fn run_one_plus_one<R: Rng + ?Sized>(
    spec: &RunSpec<'_>,
    init: SyntaxTree,
    rng: &mut R,
) -> Result<RunOutcome> {
    let problem = spec.problem;
    let n = problem.n();
    let mode = spec.algorithm.mode();
    let target = SingleObjectiveTarget::new(problem, spec.strict_target);
    let auditing = spec.audit.is_active();

    let mut current = Individual::evaluated(init, problem)?;
    let init_complexity = current.fitness.c;
    let mut max_tree_size = init_complexity;
    let mut evaluations = 1u64;
    let mut trace = Vec::new();
    let mut audit = AuditReport::default();
    if spec.trace {
        trace.push(TraceRecord::of(0, &current.tree, current.fitness, problem)?);
    }
    if auditing {
        audit_tree(&mut audit, &spec.audit, 0, &current.tree, problem)?;
    }

    let mut success = target.reached(current.fitness, n);
    let mut scratch = SyntaxTree::empty();
    while !success && evaluations < spec.budget {
        let accepted = one_plus_one_step(&mut current, &mut scratch, spec.selection, mode, problem, rng)?;
        evaluations += 1;
        if accepted {
            let iteration = evaluations - 1;
            max_tree_size = max_tree_size.max(current.fitness.c);
            if spec.trace {
                trace.push(TraceRecord::of(iteration, &current.tree, current.fitness, problem)?);
            }
            if auditing {
                audit.steps_audited += 1;
                audit_tree(&mut audit, &spec.audit, iteration, &current.tree, problem)?;
            }
            success = target.reached(current.fitness, n);
        }
    }

    Ok(RunOutcome {
        evaluations,
        success,
        init_complexity,
        max_tree_size,
        final_pop_size: 1,
        final_vectors: vec![current.fitness],
        trace,
        audit,
    })
}

fn run_smo_gp<R: Rng + ?Sized>(
    spec: &RunSpec<'_>,
    init: SyntaxTree,
    rng: &mut R,
) -> Result<RunOutcome> {
    let problem = spec.problem;
    let mode = spec.algorithm.mode();
    let front = pareto_front(problem);
    let auditing = spec.audit.is_active();

    let first = Individual::evaluated(init, problem)?;
    let init_complexity = first.fitness.c;
    let mut max_tree_size = init_complexity;
    let mut trace = Vec::new();
    let mut audit = AuditReport::default();
    if spec.trace {
        trace.push(TraceRecord::of(0, &first.tree, first.fitness, problem)?);
    }
    if auditing {
        audit_tree(&mut audit, &spec.audit, 0, &first.tree, problem)?;
    }
    let mut pop = Population::new(first);
    let mut evaluations = 1u64;
    let mut success = covered_count(&front, &pop) == front.len();

    while !success && evaluations < spec.budget {
        let step = smo_gp_step(&mut pop, mode, problem, rng)?;
        evaluations += 1;
        let iteration = evaluations - 1;
        let accepted_tree = if step.accepted { pop.members.last().map(|m| &m.tree) } else { None };
        if auditing {
            audit.steps_audited += 1;
            if let Some(tree) = accepted_tree {
                audit_tree(&mut audit, &spec.audit, iteration, tree, problem)?;
            }
            if spec.audit.check_archive {
                for (i, j) in pop.invariant_violations() {
                    audit.record(format!(
                        "iteration {iteration}: member {} weakly dominates member {}",
                        pop.members[i].fitness, pop.members[j].fitness
                    ));
                }
            }
            if let Some(bound) = spec.audit.population_bound {
                if pop.len() > bound {
                    audit.record(format!(
                        "iteration {iteration}: population size {} exceeds {bound}",
                        pop.len()
                    ));
                }
            }
        }
        if step.accepted {
            max_tree_size = max_tree_size.max(step.offspring.c);
            if spec.trace {
                if let Some(tree) = accepted_tree {
                    trace.push(TraceRecord::of(iteration, tree, step.offspring, problem)?);
                }
            }
            success = covered_count(&front, &pop) == front.len();
        }
    }

    Ok(RunOutcome {
        evaluations,
        success,
        init_complexity,
        max_tree_size,
        final_pop_size: pop.len(),
        final_vectors: pop.vectors().collect(),
        trace,
        audit,
    })
}
