//! Runtime-analysis laboratory for simple genetic programming on
//! ORDER / MAJORITY and their weighted variants.
//!
//! * [`tree`]: join-tree genotype and the substitute / insert / delete edits
//! * [`fitness`]: problem evaluation and the `(F, C)` objective vector
//! * [`variation`]: HVL-Prime and the single / multi step-count regimes
//! * [`evolve`]: (1+1)-GP, SMO-GP, dominance, and the run driver
//! * [`oracle`]: optimum, Pareto front, brute-force cross-check
//! * [`harness`]: seeded experiment suites, aggregation, growth fitting

pub mod error;
pub mod evolve;
pub mod fitness;
pub mod harness;
pub mod oracle;
pub mod tree;
pub mod variation;

pub use error::{Error, Result, TreeError};
pub use evolve::{Algorithm, Individual, Population, SelectionRule};
pub use fitness::{MoFitness, Problem, ProblemKind, WeightFamily, WeightVector};
pub use tree::{SyntaxTree, Terminal};
pub use variation::{MutationMode, RandomSource};
