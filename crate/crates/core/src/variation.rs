//! HVL-Prime mutation and the single / multi step-count regimes.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tree::{ChildOrder, SyntaxTree, Terminal};

/// Seeded stream used for every random decision in a trial. ChaCha8 is fully
/// specified, so a seed replays identically on every platform.
pub type RandomSource = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> RandomSource {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationMode {
    /// Exactly one HVL-Prime application.
    Single,
    /// `1 + Pois(1)` applications.
    Multi,
}

impl fmt::Display for MutationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutationMode::Single => "single",
            MutationMode::Multi => "multi",
        })
    }
}

impl FromStr for MutationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "single" => Ok(MutationMode::Single),
            "multi" => Ok(MutationMode::Multi),
            _ => Err(Error::Config(format!("unknown mutation mode `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HvlOp {
    Substitute,
    Insert,
    Delete,
}

/// Poisson(1) by sequential-search inversion.
pub fn sample_poisson1<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    let u: f64 = rng.gen();
    let mut k = 0u32;
    let mut p = (-1.0f64).exp();
    let mut cdf = p;
    // The tail beyond 30 is below 1e-32; the cap only guards rounding.
    while u > cdf && k < 30 {
        k += 1;
        p /= k as f64;
        cdf += p;
    }
    k
}

pub fn sample_k<R: Rng + ?Sized>(mode: MutationMode, rng: &mut R) -> u32 {
    match mode {
        MutationMode::Single => 1,
        MutationMode::Multi => 1 + sample_poisson1(rng),
    }
}

fn random_terminal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Terminal {
    Terminal::from_code(rng.gen_range(0..2 * n as u32))
}

/// Applies one HVL-Prime step to `tree` in place and reports which operation
/// was drawn. Substitute and delete on the empty tree leave it unchanged.
pub fn apply_hvl_prime<R: Rng + ?Sized>(tree: &mut SyntaxTree, n: usize, rng: &mut R) -> HvlOp {
    let op = match rng.gen_range(0..3u8) {
        0 => HvlOp::Substitute,
        1 => HvlOp::Insert,
        _ => HvlOp::Delete,
    };
    match op {
        HvlOp::Substitute => {
            if !tree.is_empty() {
                let pos = rng.gen_range(0..tree.leaf_count());
                let t = random_terminal(n, rng);
                tree.substitute_leaf(pos, t).expect("leaf position in range");
            }
        }
        HvlOp::Insert => {
            let pos = if tree.is_empty() { 0 } else { rng.gen_range(0..tree.complexity()) };
            let t = random_terminal(n, rng);
            let order = if rng.gen::<bool>() { ChildOrder::NewLeft } else { ChildOrder::NewRight };
            tree.insert_at(pos, t, order).expect("node position in range");
        }
        HvlOp::Delete => {
            if !tree.is_empty() {
                let pos = rng.gen_range(0..tree.leaf_count());
                tree.delete_leaf(pos).expect("leaf position in range");
            }
        }
    }
    op
}

pub fn hvl_prime<R: Rng + ?Sized>(tree: &SyntaxTree, n: usize, rng: &mut R) -> SyntaxTree {
    let mut out = tree.clone();
    apply_hvl_prime(&mut out, n, rng);
    out
}

/// Applies HVL-Prime `k = sample_k(mode)` times in sequence; returns the
/// offspring and `k`.
pub fn mutate<R: Rng + ?Sized>(
    tree: &SyntaxTree,
    n: usize,
    mode: MutationMode,
    rng: &mut R,
) -> (SyntaxTree, u32) {
    let mut out = tree.clone();
    let k = mutate_in_place(&mut out, n, mode, rng);
    (out, k)
}

pub fn mutate_in_place<R: Rng + ?Sized>(
    tree: &mut SyntaxTree,
    n: usize,
    mode: MutationMode,
    rng: &mut R,
) -> u32 {
    let k = sample_k(mode, rng);
    for _ in 0..k {
        apply_hvl_prime(tree, n, rng);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::example_tree;

    #[test]
    fn single_mode_is_always_one() {
        let mut rng = rng_from_seed(1);
        assert!((0..1000).all(|_| sample_k(MutationMode::Single, &mut rng) == 1));
    }

    #[test]
    fn multi_mode_mean_and_mass_at_one() {
        let mut rng = rng_from_seed(2);
        let draws = 1_000_000;
        let mut sum = 0u64;
        let mut ones = 0u64;
        for _ in 0..draws {
            let k = sample_k(MutationMode::Multi, &mut rng);
            assert!(k >= 1);
            sum += k as u64;
            ones += (k == 1) as u64;
        }
        let mean = sum as f64 / draws as f64;
        let p1 = ones as f64 / draws as f64;
        assert!((mean - 2.0).abs() <= 0.01, "mean {mean}");
        assert!((p1 - (-1.0f64).exp()).abs() <= 0.005, "P(k=1) {p1}");
    }

    #[test]
    fn multi_mode_histogram_chi_square() {
        // Bins k = 1..5 and k >= 6; expected masses from the Poisson(1) pmf.
        let mut rng = rng_from_seed(3);
        let draws = 1_000_000u64;
        let mut counts = [0u64; 6];
        for _ in 0..draws {
            let k = sample_k(MutationMode::Multi, &mut rng) as usize;
            counts[(k - 1).min(5)] += 1;
        }
        let e1 = (-1.0f64).exp();
        let mut pmf = [0.0; 6];
        let mut p = e1;
        for (j, slot) in pmf.iter_mut().enumerate().take(5) {
            if j > 0 {
                p /= j as f64;
            }
            *slot = p;
        }
        pmf[5] = 1.0 - pmf[..5].iter().sum::<f64>();
        let chi2: f64 = counts
            .iter()
            .zip(pmf)
            .map(|(&o, q)| {
                let e = q * draws as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        // 0.99 quantile of chi-square with 5 degrees of freedom.
        assert!(chi2 < 15.086, "chi2 = {chi2}");
    }

    #[test]
    fn operation_frequencies_are_uniform() {
        let base = example_tree();
        let mut rng = rng_from_seed(4);
        let trials = 1_000_000;
        let mut counts = [0u64; 3];
        let mut tree = base.clone();
        for _ in 0..trials {
            tree.clone_from(&base);
            let op = apply_hvl_prime(&mut tree, 6, &mut rng);
            counts[op as usize] += 1;
        }
        for c in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 1.0 / 3.0).abs() <= 0.01, "freq {freq}");
        }
    }

    #[test]
    fn substitution_targets_are_uniform() {
        let n = 5;
        let base: SyntaxTree = "x1".parse().unwrap();
        let mut rng = rng_from_seed(5);
        let mut counts = vec![0u64; 2 * n];
        let mut total = 0u64;
        while total < 1_000_000 {
            let mut t = base.clone();
            if apply_hvl_prime(&mut t, n, &mut rng) == HvlOp::Substitute {
                let leaf = t.leaf_at(0).unwrap();
                let code = 2 * (leaf.index() - 1) + leaf.is_negated() as u32;
                counts[code as usize] += 1;
                total += 1;
            }
        }
        let e = total as f64 / (2 * n) as f64;
        let chi2: f64 = counts.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
        // 0.99 quantile of chi-square with 9 degrees of freedom.
        assert!(chi2 < 21.666, "chi2 = {chi2}");
    }

    #[test]
    fn empty_tree_cases() {
        let mut rng = rng_from_seed(6);
        let mut saw_insert = false;
        let mut saw_noop = false;
        for _ in 0..200 {
            let mut t = SyntaxTree::empty();
            match apply_hvl_prime(&mut t, 4, &mut rng) {
                HvlOp::Insert => {
                    assert_eq!(t.complexity(), 1);
                    assert!(t.max_index() <= 4);
                    saw_insert = true;
                }
                _ => {
                    assert!(t.is_empty());
                    saw_noop = true;
                }
            }
        }
        assert!(saw_insert && saw_noop);
    }

    #[test]
    fn complexity_deltas() {
        let mut rng = rng_from_seed(7);
        let base = example_tree();
        for _ in 0..2000 {
            let mut t = base.clone();
            let op = apply_hvl_prime(&mut t, 6, &mut rng);
            let expect = match op {
                HvlOp::Substitute => 19,
                HvlOp::Insert => 21,
                HvlOp::Delete => 17,
            };
            assert_eq!(t.complexity(), expect);
            assert!(t.is_well_formed());
        }
        for _ in 0..200 {
            let mut t = SyntaxTree::leaf(crate::tree::Terminal::positive(1));
            if apply_hvl_prime(&mut t, 6, &mut rng) == HvlOp::Delete {
                assert!(t.is_empty());
            }
        }
    }

    #[test]
    fn mutate_is_deterministic_and_composes() {
        let base = example_tree();
        let a = mutate(&base, 6, MutationMode::Multi, &mut rng_from_seed(9));
        let b = mutate(&base, 6, MutationMode::Multi, &mut rng_from_seed(9));
        assert_eq!(a, b);

        // Replaying the same stream by hand gives the same offspring.
        for seed in 0..50 {
            let mut rng = rng_from_seed(seed);
            let (child, k) = mutate(&base, 6, MutationMode::Multi, &mut rng);
            let mut replay = rng_from_seed(seed);
            let k2 = sample_k(MutationMode::Multi, &mut replay);
            let mut t = base.clone();
            for _ in 0..k2 {
                apply_hvl_prime(&mut t, 6, &mut replay);
            }
            assert_eq!(k, k2);
            assert_eq!(child, t);
        }

        let (single, k) = mutate(&base, 6, MutationMode::Single, &mut rng_from_seed(10));
        assert_eq!(k, 1);
        assert!([17, 19, 21].contains(&single.complexity()));
    }
}
