//! Self-checks behind `mogp validate`: brute-force vs analytic fronts and a
//! handful of audited runs.

use rand::Rng;

use crate::error::Result;
use crate::evolve::{run_algorithm, Algorithm, AuditOptions, RunSpec};
use crate::fitness::{Problem, ProblemKind, WeightVector};
use crate::oracle::{brute_force_front, pareto_front, BRUTE_FORCE_MAX_N};
use crate::tree::SyntaxTree;
use crate::variation::{apply_hvl_prime, rng_from_seed, HvlOp};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }
}

/// Positive weights drawn uniformly from `[0.5, 10)`.
pub fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> WeightVector {
    WeightVector::new((0..n).map(|_| rng.gen_range(0.5..10.0)).collect()).expect("positive weights")
}

pub const ALL_KINDS: [ProblemKind; 4] =
    [ProblemKind::Order, ProblemKind::Majority, ProblemKind::WOrder, ProblemKind::WMajority];

pub fn run_validation(max_n: usize, seed: u64) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let mut rng = rng_from_seed(seed);
    let max_n = max_n.clamp(1, BRUTE_FORCE_MAX_N);

    for n in 1..=max_n {
        let families = [
            ("unit", WeightVector::unit(n)?),
            ("pow2", WeightVector::pow2(n)?),
            ("random", random_weights(n, &mut rng)),
        ];
        for (fam, w) in &families {
            for kind in ALL_KINDS {
                let p = Problem::new(kind, w.clone())?;
                let oracle = pareto_front(&p);
                let brute = brute_force_front(&p, n + 2)?;
                let ok = brute == oracle
                    && oracle.len() == n + 1
                    && oracle.is_mutually_non_dominated();
                report.push(
                    format!("front n={n} {kind} {fam}"),
                    ok,
                    format!("oracle {oracle} brute {brute}"),
                );
            }
        }
    }

    let n = 6;
    let mut tree = SyntaxTree::empty();
    let mut bad = 0usize;
    for _ in 0..20_000 {
        let before = tree.complexity();
        let op = apply_hvl_prime(&mut tree, n, &mut rng);
        let after = tree.complexity();
        let delta_ok = match op {
            HvlOp::Substitute => after == before,
            HvlOp::Insert => after == if before == 0 { 1 } else { before + 2 },
            HvlOp::Delete => after == before.saturating_sub(if before == 1 { 1 } else { 2 }),
        };
        if !delta_ok || !tree.is_well_formed() {
            bad += 1;
        }
    }
    report.push("hvl-prime structural invariants", bad == 0, format!("{bad} bad steps"));

    let n = 8;
    for kind in [ProblemKind::Order, ProblemKind::Majority] {
        for algo in [Algorithm::SmogpSingle, Algorithm::SmogpMulti] {
            let p = Problem::unweighted(kind, n)?;
            let mut spec = RunSpec::new(algo, &p, 10_000_000);
            spec.audit = AuditOptions::full(Some(n + 1), false);
            let out = run_algorithm(&spec, SyntaxTree::empty(), &mut rng)?;
            report.push(
                format!("audited {algo} on {kind} n={n}"),
                out.success && out.audit.is_clean(),
                format!("{} evaluations, {} violations", out.evaluations, out.audit.violation_count),
            );
        }
    }

    let p = Problem::new(ProblemKind::WOrder, WeightVector::harmonic(n)?)?;
    let mut spec = RunSpec::new(Algorithm::GpSingle, &p, 10_000_000);
    spec.trace = true;
    let init = crate::harness::init::make_init(
        crate::harness::init::InitKind::RedundantBlowup { leaves: 60, core: 4 },
        n,
        &mut rng,
    )?;
    let out = run_algorithm(&spec, init, &mut rng)?;
    let monotone = out.trace.windows(2).all(|w| w[1].s - w[1].k <= w[0].s - w[0].k);
    report.push(
        "s-k non-increasing under parsimony selection",
        out.success && monotone,
        format!("{} accepted steps", out.trace.len()),
    );

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_passes() {
        let r = run_validation(3, 1).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert!(r.checks.len() > 36);
    }
}
