//! ORDER / MAJORITY and their weighted variants, plus the two-criteria value
//! `(F(X), C(X))` that all selection logic works on.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{SyntaxTree, Terminal, TreeStats};

/// Strictly positive weights `w_1..w_n`, stored 0-based.
///
/// Sums over subsets are always accumulated in a fixed canonical order
/// (descending weight, ties by index) so that two subsets with the same
/// multiset of weights produce bit-identical floating-point sums. This keeps
/// exact fitness comparisons consistent with the Pareto-front oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    rank: Vec<usize>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("weight vector must be non-empty".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::Config(format!(
                "weight w{} = {w} is not a finite positive number",
                i + 1
            )));
        }
        let mut rank: Vec<usize> = (0..weights.len()).collect();
        rank.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        Ok(Self { weights, rank })
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn harmonic(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| 1.0 / i as f64).collect())
    }

    /// `w_i = 2^(n-i)`.
    pub fn pow2(n: usize) -> Result<Self> {
        if n > 1000 {
            return Err(Error::Config(format!("pow2 weights overflow for n = {n}")));
        }
        Self::new((1..=n).map(|i| 2f64.powi((n - i) as i32)).collect())
    }

    /// Reads one weight per line; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut weights = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let w: f64 = line.parse().map_err(|_| {
                Error::Config(format!("{}:{}: bad weight `{line}`", path.display(), lineno + 1))
            })?;
            weights.push(w);
        }
        Self::new(weights)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Weight of variable `x_index` (1-based).
    pub fn weight(&self, index: u32) -> f64 {
        self.weights[index as usize - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// 0-based variable indices in descending-weight order.
    pub fn rank_order(&self) -> &[usize] {
        &self.rank
    }

    /// Sum of weights of the variables flagged in `mask` (0-based).
    pub fn sum_masked(&self, mask: &[bool]) -> f64 {
        self.rank
            .iter()
            .filter(|&&i| mask[i])
            .fold(0.0, |acc, &i| acc + self.weights[i])
    }

    pub fn total(&self) -> f64 {
        self.sum_masked(&vec![true; self.n()])
    }

    pub fn all_unit(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum WeightFamily {
    Unit,
    Harmonic,
    Pow2,
    File(PathBuf),
}

impl WeightFamily {
    pub fn weights(&self, n: usize) -> Result<WeightVector> {
        let w = match self {
            WeightFamily::Unit => WeightVector::unit(n)?,
            WeightFamily::Harmonic => WeightVector::harmonic(n)?,
            WeightFamily::Pow2 => WeightVector::pow2(n)?,
            WeightFamily::File(path) => WeightVector::from_file(path)?,
        };
        if w.n() != n {
            return Err(Error::Config(format!(
                "weight file has {} weights but n = {n}",
                w.n()
            )));
        }
        Ok(w)
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFamily::Unit => f.write_str("unit"),
            WeightFamily::Harmonic => f.write_str("harmonic"),
            WeightFamily::Pow2 => f.write_str("pow2"),
            WeightFamily::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightFamily::Unit),
            "harmonic" => Ok(WeightFamily::Harmonic),
            "pow2" => Ok(WeightFamily::Pow2),
            other => {
                let path = other.strip_prefix("file:").unwrap_or(other);
                if path.is_empty() {
                    return Err(Error::Config("empty weight file path".into()));
                }
                Ok(WeightFamily::File(PathBuf::from(path)))
            }
        }
    }
}

impl From<WeightFamily> for String {
    fn from(w: WeightFamily) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for WeightFamily {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Order,
    Majority,
    WOrder,
    WMajority,
}

impl ProblemKind {
    pub fn is_weighted(self) -> bool {
        matches!(self, ProblemKind::WOrder | ProblemKind::WMajority)
    }

    /// True for ORDER and WORDER, which share the first-occurrence rule.
    pub fn uses_order_rule(self) -> bool {
        matches!(self, ProblemKind::Order | ProblemKind::WOrder)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Order => "mo-order",
            ProblemKind::Majority => "mo-majority",
            ProblemKind::WOrder => "mo-worder",
            ProblemKind::WMajority => "mo-wmajority",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let bare = lower.strip_prefix("mo-").unwrap_or(&lower);
        match bare {
            "order" => Ok(ProblemKind::Order),
            "majority" => Ok(ProblemKind::Majority),
            "worder" => Ok(ProblemKind::WOrder),
            "wmajority" => Ok(ProblemKind::WMajority),
            _ => Err(Error::Config(format!("unknown problem `{s}`"))),
        }
    }
}

/// The objective vector `(F, C)`: `F` is maximized, `C` minimized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoFitness {
    pub f: f64,
    pub c: usize,
}

impl MoFitness {
    pub fn new(f: f64, c: usize) -> Self {
        Self { f, c }
    }
}

impl fmt::Display for MoFitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", format_value(self.f), self.c)
    }
}

/// Prints integral values without a fractional part.
pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// A problem instance: kind plus the effective weight vector. Unweighted
/// kinds carry unit weights regardless of what was supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    kind: ProblemKind,
    weights: WeightVector,
}

impl Problem {
    pub fn new(kind: ProblemKind, weights: WeightVector) -> Result<Self> {
        let weights = if kind.is_weighted() {
            weights
        } else {
            WeightVector::unit(weights.n())?
        };
        Ok(Self { kind, weights })
    }

    pub fn unweighted(kind: ProblemKind, n: usize) -> Result<Self> {
        Self::new(kind, WeightVector::unit(n)?)
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    /// Flags (0-based) of the variables that contribute their weight.
    pub fn expressed_mask<I>(&self, leaves: I) -> Result<Vec<bool>>
    where
        I: IntoIterator<Item = Terminal>,
    {
        expressed_mask(self.kind, leaves, self.n())
    }

    pub fn evaluate(&self, tree: &SyntaxTree) -> Result<f64> {
        self.evaluate_leaves(tree.leaves())
    }

    pub fn evaluate_leaves<I>(&self, leaves: I) -> Result<f64>
    where
        I: IntoIterator<Item = Terminal>,
    {
        let mask = self.expressed_mask(leaves)?;
        Ok(self.weights.sum_masked(&mask))
    }

    pub fn mo_evaluate(&self, tree: &SyntaxTree) -> Result<MoFitness> {
        Ok(MoFitness::new(self.evaluate(tree)?, tree.complexity()))
    }

    pub fn expressed_count(&self, tree: &SyntaxTree) -> Result<usize> {
        Ok(self.expressed_mask(tree.leaves())?.iter().filter(|&&b| b).count())
    }

    pub fn stats(&self, tree: &SyntaxTree) -> Result<TreeStats> {
        Ok(TreeStats {
            leaf_count: tree.leaf_count(),
            expressed_count: self.expressed_count(tree)?,
            complexity: tree.complexity(),
        })
    }
}

fn expressed_mask<I>(kind: ProblemKind, leaves: I, n: usize) -> Result<Vec<bool>>
where
    I: IntoIterator<Item = Terminal>,
{
    let check = |t: Terminal| -> Result<usize> {
        let i = t.index() as usize;
        if i > n {
            Err(Error::TerminalOutOfRange { index: t.index(), n })
        } else {
            Ok(i - 1)
        }
    };
    if kind.uses_order_rule() {
        let mut seen = vec![false; n];
        let mut mask = vec![false; n];
        for t in leaves {
            let i = check(t)?;
            if !seen[i] {
                seen[i] = true;
                mask[i] = t.is_positive();
            }
        }
        Ok(mask)
    } else {
        let mut pos = vec![0u32; n];
        let mut neg = vec![0u32; n];
        for t in leaves {
            let i = check(t)?;
            if t.is_positive() {
                pos[i] += 1;
            } else {
                neg[i] += 1;
            }
        }
        Ok(pos.iter().zip(&neg).map(|(&p, &q)| p >= q && p >= 1).collect())
    }
}

fn mask_to_set(mask: &[bool]) -> BTreeSet<u32> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u32 + 1)
        .collect()
}

fn implied_n(leaves: &[Terminal]) -> usize {
    leaves.iter().map(|t| t.index() as usize).max().unwrap_or(0)
}

/// Variables whose first occurrence among `{x_i, ~x_i}` is positive.
pub fn expressed_order(leaves: &[Terminal]) -> BTreeSet<u32> {
    let mask = expressed_mask(ProblemKind::Order, leaves.iter().copied(), implied_n(leaves))
        .expect("n covers every index");
    mask_to_set(&mask)
}

/// Variables with at least one positive occurrence and no more negated than
/// positive occurrences.
pub fn expressed_majority(leaves: &[Terminal]) -> BTreeSet<u32> {
    let mask = expressed_mask(ProblemKind::Majority, leaves.iter().copied(), implied_n(leaves))
        .expect("n covers every index");
    mask_to_set(&mask)
}

pub fn evaluate(kind: ProblemKind, tree: &SyntaxTree, w: &WeightVector) -> Result<f64> {
    Problem::new(kind, w.clone())?.evaluate(tree)
}

pub fn mo_evaluate(kind: ProblemKind, tree: &SyntaxTree, w: &WeightVector) -> Result<MoFitness> {
    Problem::new(kind, w.clone())?.mo_evaluate(tree)
}
