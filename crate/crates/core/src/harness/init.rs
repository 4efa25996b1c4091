//! Initial-solution generators. Sizes are given in leaves; a tree with `L`
//! leaves has `2L - 1` nodes, which is what gets reported as `T_init`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{ChildOrder, SyntaxTree, Terminal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitKind {
    Empty,
    /// `leaves` successive uniform HVL inserts starting from the empty tree.
    RandomTree { leaves: usize },
    /// `m` distinct positive variables, each appearing exactly once.
    NonRedundant { m: usize },
    /// A non-redundant core of `core` variables padded with copies and
    /// complements of core variables up to `leaves` leaves.
    RedundantBlowup { leaves: usize, core: usize },
}

impl InitKind {
    /// True when the generated tree is non-redundant by construction.
    pub fn is_non_redundant(self) -> bool {
        matches!(self, InitKind::Empty | InitKind::NonRedundant { .. })
    }
}

fn insert_uniform<R: Rng + ?Sized>(tree: &mut SyntaxTree, t: Terminal, rng: &mut R) {
    let pos = if tree.is_empty() { 0 } else { rng.gen_range(0..tree.complexity()) };
    let order = if rng.gen::<bool>() { ChildOrder::NewLeft } else { ChildOrder::NewRight };
    tree.insert_at(pos, t, order).expect("node position in range");
}

fn non_redundant<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<(SyntaxTree, Vec<u32>)> {
    if m > n {
        return Err(Error::Config(format!("non-redundant init needs m <= n, got m = {m}, n = {n}")));
    }
    let vars: Vec<u32> = index::sample(rng, n, m).iter().map(|i| i as u32 + 1).collect();
    let mut tree = SyntaxTree::empty();
    for &v in &vars {
        insert_uniform(&mut tree, Terminal::positive(v), rng);
    }
    Ok((tree, vars))
}

pub fn make_init<R: Rng + ?Sized>(kind: InitKind, n: usize, rng: &mut R) -> Result<SyntaxTree> {
    if n == 0 {
        return Err(Error::Config("problem size n must be at least 1".into()));
    }
    match kind {
        InitKind::Empty => Ok(SyntaxTree::empty()),
        InitKind::RandomTree { leaves } => {
            let mut tree = SyntaxTree::empty();
            for _ in 0..leaves {
                let t = Terminal::from_code(rng.gen_range(0..2 * n as u32));
                insert_uniform(&mut tree, t, rng);
            }
            Ok(tree)
        }
        InitKind::NonRedundant { m } => Ok(non_redundant(n, m, rng)?.0),
        InitKind::RedundantBlowup { leaves, core } => {
            if core == 0 || core > leaves {
                return Err(Error::Config(format!(
                    "redundant blow-up needs 1 <= core <= leaves, got core = {core}, leaves = {leaves}"
                )));
            }
            let (mut tree, vars) = non_redundant(n, core, rng)?;
            for _ in core..leaves {
                let v = vars[rng.gen_range(0..vars.len())];
                let t = Terminal::new(v, rng.gen::<bool>());
                insert_uniform(&mut tree, t, rng);
            }
            Ok(tree)
        }
    }
}

/// The init family named on the command line; sizes come from a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitFamily {
    Empty,
    Random,
    NonRedundant,
    RedundantBlowup,
}

impl fmt::Display for InitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitFamily::Empty => "empty",
            InitFamily::Random => "random",
            InitFamily::NonRedundant => "non-redundant",
            InitFamily::RedundantBlowup => "redundant-blowup",
        })
    }
}

impl FromStr for InitFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "empty" => Ok(InitFamily::Empty),
            "random" | "random-tree" => Ok(InitFamily::Random),
            "non-redundant" => Ok(InitFamily::NonRedundant),
            "redundant-blowup" | "blowup" => Ok(InitFamily::RedundantBlowup),
            _ => Err(Error::Config(format!("unknown init kind `{s}`"))),
        }
    }
}

/// A size on the init grid: an absolute count or "equal to n".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InitSize {
    Fixed(usize),
    EqualN,
}

impl InitSize {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            InitSize::Fixed(v) => v,
            InitSize::EqualN => n,
        }
    }
}

impl fmt::Display for InitSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSize::Fixed(v) => write!(f, "{v}"),
            InitSize::EqualN => f.write_str("n"),
        }
    }
}

impl FromStr for InitSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "n" {
            return Ok(InitSize::EqualN);
        }
        s.parse()
            .map(InitSize::Fixed)
            .map_err(|_| Error::Config(format!("bad init size `{s}`")))
    }
}

/// Resolves a family and grid size into a concrete generator for size `n`.
/// `core` defaults to `max(1, n / 2)` for blow-up inits.
pub fn resolve_init(
    family: InitFamily,
    size: Option<InitSize>,
    core: Option<usize>,
    n: usize,
) -> Result<InitKind> {
    let need = |what: &str| Error::Config(format!("init `{family}` needs a {what}"));
    Ok(match family {
        InitFamily::Empty => InitKind::Empty,
        InitFamily::Random => InitKind::RandomTree {
            leaves: size.ok_or_else(|| need("leaf count"))?.resolve(n),
        },
        InitFamily::NonRedundant => InitKind::NonRedundant {
            m: size.unwrap_or(InitSize::EqualN).resolve(n),
        },
        InitFamily::RedundantBlowup => InitKind::RedundantBlowup {
            leaves: size.ok_or_else(|| need("leaf count"))?.resolve(n),
            core: core.unwrap_or((n / 2).max(1)),
        },
    })
}
