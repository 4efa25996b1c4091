//! `run` settings: command-line flags layered over an optional flat
//! key-value config file (TOML). Keys mirror the flag names; flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;

use crate::error::{Error, Result};
use crate::harness::init::InitSize;
use crate::harness::suite::{default_summary_path, ExperimentConfig, DEFAULT_BUDGET};

#[derive(Args, Debug, Clone, Default, PartialEq)]
pub struct RunSettings {
    /// Flat key-value config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// mo-order | mo-majority | mo-worder | mo-wmajority
    #[arg(long)]
    pub problem: Option<String>,
    /// gp-single | gp-multi | smogp-single | smogp-multi
    #[arg(long)]
    pub algo: Option<String>,
    /// f-only | mo-parsimony (ignored by SMO-GP)
    #[arg(long)]
    pub selection: Option<String>,
    /// unit | harmonic | pow2 | file:<path>
    #[arg(long)]
    pub weights: Option<String>,
    /// Comma-separated problem sizes
    #[arg(long)]
    pub n: Option<String>,
    /// empty | random | non-redundant | redundant-blowup
    #[arg(long)]
    pub init: Option<String>,
    /// Comma-separated init sizes in leaves (or variables for non-redundant); `n` means m = n
    #[arg(long)]
    pub init_size: Option<String>,
    /// Core variable count for redundant-blowup inits
    #[arg(long)]
    pub core: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<String>,
    /// Evaluation budget per trial
    #[arg(long)]
    pub budget: Option<String>,
    /// Raw CSV output path
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON path (default: <out>.summary.json)
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Per-accepted-step trace CSV path
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Audit invariants after every step
    #[arg(long)]
    pub audit: bool,
    /// Single-objective success also requires complexity 2n-1
    #[arg(long)]
    pub strict_target: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub raw: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

fn value_to_string(key: &str, v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|i| value_to_string(key, i))
            .collect::<Result<Vec<_>>>()?
            .join(","),
        _ => return Err(Error::Config(format!("config key `{key}` has an unsupported value"))),
    })
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    s.parse().map_err(|_| Error::Config(format!("`{key}` must be true or false, got `{s}`")))
}

impl RunSettings {
    /// Fills every unset field from the config file, if one was given.
    pub fn merged_with_file(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = Self::from_file(&path)?;
        macro_rules! fill {
            ($($field:ident),*) => { $( if self.$field.is_none() { self.$field = file.$field; } )* };
        }
        fill!(problem, algo, selection, weights, n, init, init_size, core, trials, seed, budget, out, summary, trace);
        self.audit |= file.audit;
        self.strict_target |= file.strict_target;
        Ok(self)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table: BTreeMap<String, toml::Value> = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut s = RunSettings::default();
        for (raw_key, value) in &table {
            let key = raw_key.replace('-', "_");
            let v = value_to_string(&key, value)?;
            match key.as_str() {
                "problem" => s.problem = Some(v),
                "algo" => s.algo = Some(v),
                "selection" => s.selection = Some(v),
                "weights" => s.weights = Some(v),
                "n" => s.n = Some(v),
                "init" => s.init = Some(v),
                "init_size" => s.init_size = Some(v),
                "core" => s.core = Some(v),
                "trials" => s.trials = Some(v),
                "seed" => s.seed = Some(v),
                "budget" => s.budget = Some(v),
                "out" => s.out = Some(v.into()),
                "summary" => s.summary = Some(v.into()),
                "trace" => s.trace = Some(v.into()),
                "audit" => s.audit = parse_bool(&key, &v)?,
                "strict_target" => s.strict_target = parse_bool(&key, &v)?,
                _ => {
                    return Err(Error::Config(format!(
                        "{}: unknown config key `{raw_key}`",
                        path.display()
                    )))
                }
            }
        }
        Ok(s)
    }

    pub fn to_experiment(&self) -> Result<(ExperimentConfig, OutputPaths)> {
        let required = |v: &Option<String>, name: &str| {
            v.clone().ok_or_else(|| Error::Config(format!("missing required setting `{name}`")))
        };
        let problem = required(&self.problem, "problem")?.parse()?;
        let algorithm = required(&self.algo, "algo")?.parse()?;
        let n_grid = parse_list(&required(&self.n, "n")?, "n", parse_count)?;
        let mut cfg = ExperimentConfig::new(problem, algorithm, n_grid);
        if let Some(s) = &self.selection {
            cfg.selection = s.parse()?;
        }
        if let Some(w) = &self.weights {
            cfg.weights = w.parse()?;
        }
        if let Some(i) = &self.init {
            cfg.init = i.parse()?;
        }
        if let Some(sizes) = &self.init_size {
            cfg.init_sizes = parse_list(sizes, "init-size", |s, _| s.parse::<InitSize>())?;
        }
        if let Some(c) = &self.core {
            cfg.core = Some(parse_count(c, "core")?);
        }
        if let Some(t) = &self.trials {
            cfg.trials = parse_count(t, "trials")?;
        }
        if let Some(s) = &self.seed {
            cfg.seed = parse_u64(s, "seed")?;
        }
        cfg.budget = match &self.budget {
            Some(b) => parse_u64(b, "budget")?,
            None => DEFAULT_BUDGET,
        };
        cfg.trace = self.trace.is_some();
        cfg.audit = self.audit;
        cfg.strict_target = self.strict_target;
        cfg.validate()?;
        let summary = self
            .summary
            .clone()
            .or_else(|| self.out.as_deref().map(default_summary_path));
        Ok((cfg, OutputPaths { raw: self.out.clone(), summary, trace: self.trace.clone() }))
    }
}

/// Accepts plain integers and integral scientific notation such as `1e8`.
fn parse_u64(s: &str, name: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(f) if f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 => Ok(f as u64),
        _ => Err(Error::Config(format!("`{name}` must be a non-negative integer, got `{s}`"))),
    }
}

fn parse_count(s: &str, name: &str) -> Result<usize> {
    Ok(parse_u64(s, name)? as usize)
}

fn parse_list<T>(s: &str, name: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| item(p, name))
        .collect()
}
