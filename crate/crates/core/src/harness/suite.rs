//! Seeded trial suites over `n` / `T_init` grids, aggregation, and the raw
//! CSV / summary JSON / trace outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{run_algorithm, Algorithm, AuditOptions, AuditReport, RunSpec, SelectionRule, TraceRecord};
use crate::fitness::{Problem, ProblemKind, WeightFamily};
use crate::harness::growth::{fit_growth, GrowthFit, GrowthLaw, GrowthPoint};
use crate::harness::init::{make_init, resolve_init, InitFamily, InitKind, InitSize};
use crate::variation::{rng_from_seed, MutationMode};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub weights: WeightFamily,
    pub algorithm: Algorithm,
    pub selection: SelectionRule,
    pub n_grid: Vec<usize>,
    pub init: InitFamily,
    /// Leaf counts (random / blow-up) or variable counts (non-redundant).
    pub init_sizes: Vec<InitSize>,
    /// Core size for blow-up inits; defaults to `max(1, n / 2)`.
    pub core: Option<usize>,
    pub trials: usize,
    pub budget: u64,
    pub seed: u64,
    pub trace: bool,
    /// Run the per-step invariant audits.
    pub audit: bool,
    pub strict_target: bool,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, algorithm: Algorithm, n_grid: Vec<usize>) -> Self {
        Self {
            problem,
            weights: WeightFamily::Unit,
            algorithm,
            selection: SelectionRule::MoParsimony,
            n_grid,
            init: InitFamily::Empty,
            init_sizes: Vec::new(),
            core: None,
            trials: 1,
            budget: DEFAULT_BUDGET,
            seed: 0,
            trace: false,
            audit: false,
            strict_target: false,
        }
    }

    pub fn mode(&self) -> MutationMode {
        self.algorithm.mode()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.budget < 1 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::Config("n grid must be non-empty with values >= 1".into()));
        }
        if self.init_sizes.contains(&InitSize::Fixed(0)) && self.init != InitFamily::NonRedundant {
            return Err(Error::Config("init sizes must be >= 1".into()));
        }
        if self.core == Some(0) {
            return Err(Error::Config("core must be at least 1".into()));
        }
        if self.init != InitFamily::Empty
            && self.init != InitFamily::NonRedundant
            && self.init_sizes.is_empty()
        {
            return Err(Error::Config(format!("init `{}` needs at least one size", self.init)));
        }
        Ok(())
    }

    /// Grid cells in canonical order: by `n`, then by init size.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut ns = self.n_grid.clone();
        ns.sort_unstable();
        ns.dedup();
        let sizes: Vec<Option<InitSize>> = match self.init {
            InitFamily::Empty => vec![None],
            _ if self.init_sizes.is_empty() => vec![None],
            _ => {
                let mut s = self.init_sizes.clone();
                s.sort_unstable();
                s.dedup();
                s.into_iter().map(Some).collect()
            }
        };
        let mut cells = Vec::new();
        for &n in &ns {
            for &size in &sizes {
                let init = resolve_init(self.init, size, self.core, n)?;
                cells.push(Cell { index: cells.len() as u32, n, init });
            }
        }
        Ok(cells)
    }

    /// The per-step audits that are guaranteed to hold for this setting.
    pub fn audit_options(&self, n: usize, init: InitKind) -> AuditOptions {
        if !self.audit {
            return AuditOptions::default();
        }
        let single = self.mode() == MutationMode::Single;
        let clean_start = init.is_non_redundant();
        // Single operations never let a non-redundant state accept a redundant
        // solution, under parsimony selection and under dominance alike.
        let keeps_non_redundant = single
            && clean_start
            && (self.algorithm.is_population_based() || self.selection == SelectionRule::MoParsimony);
        let population_bound = if !self.algorithm.is_population_based() {
            None
        } else if !self.problem.is_weighted() || keeps_non_redundant {
            Some(n + 1)
        } else {
            None
        };
        AuditOptions::full(population_bound, keeps_non_redundant)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub index: u32,
    pub n: usize,
    pub init: InitKind,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed. For a fixed master seed the map `(cell, trial) -> seed`
/// is injective: the pair is packed losslessly into 64 bits and then passed
/// through a bijective mixer.
pub fn derive_seed(master: u64, cell: u32, trial: u32) -> u64 {
    let key = ((cell as u64) << 32) | trial as u64;
    splitmix64(key ^ splitmix64(master))
}

/// One raw CSV row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub problem: String,
    pub algo: Algorithm,
    pub selection: SelectionRule,
    pub mode: MutationMode,
    pub n: usize,
    /// Node count of the initial tree.
    pub t_init: usize,
    pub weight_family: String,
    pub seed: u64,
    /// Evaluations until first success, or the budget if unsuccessful.
    pub evaluations: u64,
    pub success: bool,
    pub max_tree_size: usize,
    pub final_pop_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialTrace {
    pub n: usize,
    pub t_init: usize,
    pub seed: u64,
    pub records: Vec<TraceRecord>,
}

#[derive(Clone, Debug)]
pub struct TrialRun {
    pub result: TrialResult,
    pub trace: Option<TrialTrace>,
    pub audit: AuditReport,
}

pub fn run_trial(config: &ExperimentConfig, cell: &Cell, trial: u32) -> Result<TrialRun> {
    let seed = derive_seed(config.seed, cell.index, trial);
    let mut rng = rng_from_seed(seed);
    let weights = config.weights.weights(cell.n)?;
    let problem = Problem::new(config.problem, weights)?;
    let init = make_init(cell.init, cell.n, &mut rng)?;
    let spec = RunSpec {
        algorithm: config.algorithm,
        selection: config.selection,
        problem: &problem,
        budget: config.budget,
        trace: config.trace,
        audit: config.audit_options(cell.n, cell.init),
        strict_target: config.strict_target,
    };
    let out = run_algorithm(&spec, init, &mut rng)?;
    let result = TrialResult {
        problem: config.problem.to_string(),
        algo: config.algorithm,
        selection: config.selection,
        mode: config.mode(),
        n: cell.n,
        t_init: out.init_complexity,
        weight_family: config.weights.to_string(),
        seed,
        evaluations: out.evaluations,
        success: out.success,
        max_tree_size: out.max_tree_size,
        final_pop_size: out.final_pop_size,
    };
    let trace = config.trace.then(|| TrialTrace {
        n: cell.n,
        t_init: out.init_complexity,
        seed,
        records: out.trace,
    });
    Ok(TrialRun { result, trace, audit: out.audit })
}

#[derive(Clone, Debug)]
pub struct SuiteOutput {
    /// Canonically ordered: by cell, then trial index.
    pub rows: Vec<TrialResult>,
    pub summary: SuiteSummary,
    pub traces: Vec<TrialTrace>,
    pub audit_violations: u64,
    pub audit_messages: Vec<String>,
}

pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteOutput> {
    config.validate()?;
    let cells = config.cells()?;
    let jobs: Vec<(usize, u32)> = (0..cells.len())
        .flat_map(|c| (0..config.trials as u32).map(move |t| (c, t)))
        .collect();
    // Trials share nothing mutable; collect() preserves job order.
    let runs: Vec<TrialRun> = jobs
        .par_iter()
        .map(|&(c, t)| run_trial(config, &cells[c], t))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(runs.len());
    let mut traces = Vec::new();
    let mut audit_violations = 0;
    let mut audit_messages = Vec::new();
    for run in runs {
        audit_violations += run.audit.violation_count;
        audit_messages.extend(run.audit.violations.into_iter().map(|m| format!("seed {}: {m}", run.result.seed)));
        rows.push(run.result);
        traces.extend(run.trace);
    }
    let summary = summarize(&rows);
    Ok(SuiteOutput { rows, summary, traces, audit_violations, audit_messages })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub t_init: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Set when some trial exhausted its budget.
    pub censored: bool,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub std_dev: Option<f64>,
    pub min: Option<u64>,
    pub max: Option<u64>,
    pub max_tree_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub problem: String,
    pub algo: String,
    pub selection: String,
    pub mode: String,
    pub weight_family: String,
    pub cells: Vec<CellSummary>,
    /// Growth-law fits over the successful cells; empty with fewer than 3.
    pub fits: Vec<GrowthFit>,
    pub best_fit: Option<String>,
}

fn cell_summary(n: usize, t_init: usize, rows: &[&TrialResult]) -> CellSummary {
    let mut evals: Vec<u64> = rows.iter().filter(|r| r.success).map(|r| r.evaluations).collect();
    evals.sort_unstable();
    let trials = rows.len();
    let successes = evals.len();
    let (mean, median, std_dev) = if evals.is_empty() {
        (None, None, None)
    } else {
        let k = evals.len() as f64;
        let mean = evals.iter().map(|&e| e as f64).sum::<f64>() / k;
        let mid = evals.len() / 2;
        let median = if evals.len() % 2 == 1 {
            evals[mid] as f64
        } else {
            (evals[mid - 1] as f64 + evals[mid] as f64) / 2.0
        };
        let std = if evals.len() > 1 {
            (evals.iter().map(|&e| (e as f64 - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        (Some(mean), Some(median), Some(std))
    };
    CellSummary {
        n,
        t_init,
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        censored: successes < trials,
        mean,
        median,
        std_dev,
        min: evals.first().copied(),
        max: evals.last().copied(),
        max_tree_size: rows.iter().map(|r| r.max_tree_size).max().unwrap_or(0),
    }
}

/// Aggregates raw rows per `(n, t_init)` cell. Uses only row contents, so a
/// summary can be regenerated from the raw CSV.
pub fn summarize(rows: &[TrialResult]) -> SuiteSummary {
    let mut groups: BTreeMap<(usize, usize), Vec<&TrialResult>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.n, r.t_init)).or_default().push(r);
    }
    let cells: Vec<CellSummary> = groups
        .iter()
        .map(|(&(n, t), rs)| cell_summary(n, t, rs))
        .collect();
    let points: Vec<GrowthPoint> = cells
        .iter()
        .filter_map(|c| c.mean.map(|mean| GrowthPoint { n: c.n, t_init: c.t_init, mean }))
        .collect();
    let t_varies = points.windows(2).any(|w| w[0].t_init != w[1].t_init);
    let candidates = if t_varies { GrowthLaw::defaults_with_t_init() } else { GrowthLaw::defaults() };
    let fits = fit_growth(&points, &candidates).unwrap_or_default();
    let best_fit = fits.iter().find(|f| f.best).map(|f| f.law.clone());
    let first = rows.first();
    let field = |f: fn(&TrialResult) -> String| first.map(f).unwrap_or_default();
    SuiteSummary {
        problem: field(|r| r.problem.clone()),
        algo: field(|r| r.algo.to_string()),
        selection: field(|r| r.selection.to_string()),
        mode: field(|r| r.mode.to_string()),
        weight_family: field(|r| r.weight_family.clone()),
        cells,
        fits,
        best_fit,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

pub fn write_raw_csv(path: &Path, rows: &[TrialResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_raw_csv(path: &Path) -> Result<Vec<TrialResult>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}

pub fn write_summary_json(path: &Path, summary: &SuiteSummary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)
        .map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_summary_json(path: &Path) -> Result<SuiteSummary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

#[derive(Serialize)]
struct TraceRow {
    n: usize,
    t_init: usize,
    seed: u64,
    iteration: u64,
    f: f64,
    c: usize,
    s: usize,
    k: usize,
}

pub fn write_trace_csv(path: &Path, traces: &[TrialTrace]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for t in traces {
        for r in &t.records {
            w.serialize(TraceRow {
                n: t.n,
                t_init: t.t_init,
                seed: t.seed,
                iteration: r.iteration,
                f: r.f,
                c: r.c,
                s: r.s,
                k: r.k,
            })
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `r.csv` -> `r.summary.json`.
pub fn default_summary_path(raw: &Path) -> PathBuf {
    raw.with_extension("summary.json")
}
