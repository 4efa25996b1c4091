use proptest::prelude::*;

use mogp::evolve::{run_algorithm, smo_gp_step, weakly_dominates, Individual, RunSpec, StepDiagnostics};
use mogp::harness::{make_init, InitKind};
use mogp::oracle::{is_non_redundant, pareto_front};
use mogp::variation::{apply_hvl_prime, mutate, rng_from_seed};
use mogp::{
    Algorithm, MutationMode, Population, Problem, ProblemKind, SelectionRule, SyntaxTree, Terminal,
    WeightVector,
};

fn arb_weights(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(1.0), Just(2.0), Just(0.5), 0.25f64..20.0], 1..=max_n)
}

fn arb_kind() -> impl Strategy<Value = ProblemKind> {
    prop_oneof![
        Just(ProblemKind::Order),
        Just(ProblemKind::Majority),
        Just(ProblemKind::WOrder),
        Just(ProblemKind::WMajority)
    ]
}

/// A tree over `n` variables reached by `steps` random HVL-Prime edits from Empty.
fn random_tree(n: usize, steps: usize, seed: u64) -> SyntaxTree {
    let mut rng = rng_from_seed(seed);
    let mut t = SyntaxTree::empty();
    for _ in 0..steps {
        apply_hvl_prime(&mut t, n, &mut rng);
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn edits_keep_trees_well_formed(n in 1usize..8, steps in 0usize..300, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let mut t = SyntaxTree::empty();
        for _ in 0..steps {
            apply_hvl_prime(&mut t, n, &mut rng);
            prop_assert!(t.is_well_formed());
            let expected = if t.leaf_count() == 0 { 0 } else { 2 * t.leaf_count() - 1 };
            prop_assert_eq!(t.complexity(), expected);
            prop_assert!(t.max_index() as usize <= n);
        }
    }

    #[test]
    fn stats_bounds(kind in arb_kind(), w in arb_weights(6), steps in 0usize..80, seed in any::<u64>()) {
        let n = w.len();
        let p = Problem::new(kind, WeightVector::new(w).unwrap()).unwrap();
        let t = random_tree(n, steps, seed);
        let st = p.stats(&t).unwrap();
        prop_assert!(st.expressed_count <= st.leaf_count.min(n));
        let d = StepDiagnostics::of(&t, &p).unwrap();
        prop_assert_eq!(d.s_minus_k, d.s - d.k_expressed);
        let v = p.mo_evaluate(&t).unwrap();
        prop_assert!(v.f >= 0.0);
        prop_assert!(v.f <= p.weights().total());
    }

    #[test]
    fn unit_weights_reduce_to_unweighted(n in 1usize..7, steps in 0usize..80, seed in any::<u64>()) {
        let t = random_tree(n, steps, seed);
        let unit = WeightVector::unit(n).unwrap();
        for (plain, weighted) in [(ProblemKind::Order, ProblemKind::WOrder), (ProblemKind::Majority, ProblemKind::WMajority)] {
            let a = Problem::unweighted(plain, n).unwrap().mo_evaluate(&t).unwrap();
            let b = Problem::new(weighted, unit.clone()).unwrap().mo_evaluate(&t).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn fitness_depends_only_on_leaf_sequence(kind in arb_kind(), n in 1usize..6, steps in 1usize..60, seed in any::<u64>()) {
        let p = Problem::unweighted(kind, n).unwrap();
        let t = random_tree(n, steps, seed);
        let comb = SyntaxTree::from_leaves(&t.inorder_leaves());
        prop_assert_eq!(p.mo_evaluate(&t).unwrap(), p.mo_evaluate(&comb).unwrap());
    }

    #[test]
    fn front_is_permutation_invariant(kind in arb_kind(), w in arb_weights(8), rot in 0usize..8) {
        let mut shuffled = w.clone();
        let r = rot % shuffled.len();
        shuffled.rotate_left(r);
        shuffled.reverse();
        let a = pareto_front(&Problem::new(kind, WeightVector::new(w.clone()).unwrap()).unwrap());
        let b = pareto_front(&Problem::new(kind, WeightVector::new(shuffled).unwrap()).unwrap());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), w.len() + 1);
        prop_assert!(a.is_mutually_non_dominated());
    }

    #[test]
    fn front_points_are_reachable(kind in arb_kind(), w in arb_weights(6)) {
        // The j heaviest variables as a positive comb realise the j-th front point.
        let p = Problem::new(kind, WeightVector::new(w).unwrap()).unwrap();
        let front = pareto_front(&p);
        let order = p.weights().rank_order().to_vec();
        for j in 1..=order.len() {
            let leaves: Vec<Terminal> = order[..j].iter().map(|&i| Terminal::positive(i as u32 + 1)).collect();
            let v = p.mo_evaluate(&SyntaxTree::from_leaves(&leaves)).unwrap();
            prop_assert!(front.contains(v), "{} not on {}", v, front);
        }
    }

    #[test]
    fn init_generators_match_their_contracts(n in 1usize..12, extra in 0usize..40, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let p = Problem::unweighted(ProblemKind::Order, n).unwrap();
        let m = 1 + extra % n;
        let t = make_init(InitKind::NonRedundant { m }, n, &mut rng).unwrap();
        prop_assert!(is_non_redundant(&t, &p).unwrap());
        prop_assert_eq!(t.leaf_count(), m);

        let leaves = 1 + extra;
        let t = make_init(InitKind::RandomTree { leaves }, n, &mut rng).unwrap();
        prop_assert_eq!(t.complexity(), 2 * leaves - 1);

        let core = 1 + extra % n;
        let leaves = core + extra;
        let t = make_init(InitKind::RedundantBlowup { leaves, core }, n, &mut rng).unwrap();
        prop_assert_eq!(t.leaf_count(), leaves);
        prop_assert!(p.expressed_count(&t).unwrap() <= core);
    }

    #[test]
    fn same_seed_same_offspring(n in 1usize..8, steps in 0usize..40, seed in any::<u64>()) {
        let parent = random_tree(n, steps, seed);
        for mode in [MutationMode::Single, MutationMode::Multi] {
            let a = mutate(&parent, n, mode, &mut rng_from_seed(seed ^ 1));
            let b = mutate(&parent, n, mode, &mut rng_from_seed(seed ^ 1));
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn archive_invariants_hold_during_smo_runs(kind in arb_kind(), w in arb_weights(5), steps in 1usize..400, seed in any::<u64>()) {
        let n = w.len();
        let p = Problem::new(kind, WeightVector::new(w).unwrap()).unwrap();
        let mut rng = rng_from_seed(seed);
        let mut pop = Population::new(Individual::evaluated(SyntaxTree::empty(), &p).unwrap());
        for _ in 0..steps {
            smo_gp_step(&mut pop, MutationMode::Multi, &p, &mut rng).unwrap();
        }
        let members = pop.members();
        for (i, a) in members.iter().enumerate() {
            prop_assert_eq!(a.fitness, p.mo_evaluate(&a.tree).unwrap());
            for (j, b) in members.iter().enumerate() {
                if i != j {
                    prop_assert!(!weakly_dominates(a.fitness, b.fitness));
                }
            }
        }
        if !kind.is_weighted() {
            prop_assert!(pop.len() <= n + 1);
        }
    }

    #[test]
    fn tree_size_never_exceeds_init_from_non_redundant_start(
        kind in arb_kind(), w in arb_weights(10), m_frac in 0.0f64..1.0, seed in any::<u64>()
    ) {
        let n = w.len();
        let p = Problem::new(kind, WeightVector::new(w).unwrap()).unwrap();
        let mut rng = rng_from_seed(seed);
        let m = 1 + ((n - 1) as f64 * m_frac) as usize;
        let init = make_init(InitKind::NonRedundant { m }, n, &mut rng).unwrap();
        let t_init = init.complexity();
        let mut spec = RunSpec::new(Algorithm::GpSingle, &p, 200_000);
        spec.selection = SelectionRule::MoParsimony;
        spec.trace = true;
        let out = run_algorithm(&spec, init, &mut rng).unwrap();
        prop_assert!(out.success);
        prop_assert!(out.max_tree_size <= t_init.max(2 * n - 1));
        prop_assert!(out.trace.iter().all(|r| r.c <= t_init.max(2 * n - 1)));
    }
}
