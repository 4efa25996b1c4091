//! Empirical growth-law fitting.
//!
//! For each candidate `g`, the ratios `mean / g` over the grid are reported
//! together with their max/min spread and a least-squares constant
//! `c = Σ m·g / Σ g²`. The candidate with the smallest spread is flagged as
//! the best fit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    N,
    NLogN,
    NSquared,
    NSquaredLogN,
    NCubed,
    TInit,
    NTInit,
}

impl Term {
    pub fn eval(self, n: f64, t_init: f64) -> f64 {
        match self {
            Term::N => n,
            Term::NLogN => n * n.ln(),
            Term::NSquared => n * n,
            Term::NSquaredLogN => n * n * n.ln(),
            Term::NCubed => n * n * n,
            Term::TInit => t_init,
            Term::NTInit => n * t_init,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Term::N => "n",
            Term::NLogN => "n*ln(n)",
            Term::NSquared => "n^2",
            Term::NSquaredLogN => "n^2*ln(n)",
            Term::NCubed => "n^3",
            Term::TInit => "t_init",
            Term::NTInit => "n*t_init",
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        Ok(match key.as_str() {
            "n" => Term::N,
            "nlogn" | "nlnn" | "n*ln(n)" | "n*log(n)" => Term::NLogN,
            "n^2" | "n2" => Term::NSquared,
            "n^2logn" | "n^2lnn" | "n^2*ln(n)" | "n^2*log(n)" => Term::NSquaredLogN,
            "n^3" | "n3" => Term::NCubed,
            "t_init" | "tinit" => Term::TInit,
            "n*t_init" | "nt_init" | "ntinit" => Term::NTInit,
            _ => return Err(Error::Config(format!("unknown growth term `{s}`"))),
        })
    }
}

/// A sum of growth terms, e.g. `t_init+n*ln(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrowthLaw(Vec<Term>);

impl GrowthLaw {
    pub fn new(terms: Vec<Term>) -> Self {
        assert!(!terms.is_empty());
        Self(terms)
    }

    pub fn single(t: Term) -> Self {
        Self(vec![t])
    }

    pub fn eval(&self, n: f64, t_init: f64) -> f64 {
        self.0.iter().map(|t| t.eval(n, t_init)).sum()
    }

    pub fn uses_t_init(&self) -> bool {
        self.0.iter().any(|t| matches!(t, Term::TInit | Term::NTInit))
    }

    /// Pure-`n` candidates used when no list is given.
    pub fn defaults() -> Vec<GrowthLaw> {
        [Term::N, Term::NLogN, Term::NSquared, Term::NSquaredLogN, Term::NCubed]
            .into_iter()
            .map(GrowthLaw::single)
            .collect()
    }

    /// Defaults plus the `T_init`-dependent laws.
    pub fn defaults_with_t_init() -> Vec<GrowthLaw> {
        let mut out = Self::defaults();
        out.push(GrowthLaw::single(Term::TInit));
        out.push(GrowthLaw::single(Term::NTInit));
        out.push(GrowthLaw::new(vec![Term::TInit, Term::NLogN]));
        out.push(GrowthLaw::new(vec![Term::NTInit, Term::NSquaredLogN]));
        out
    }

    pub fn parse_list(s: &str) -> Result<Vec<GrowthLaw>> {
        s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for GrowthLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|t| t.name()).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for GrowthLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let terms = s.split('+').map(str::parse).collect::<Result<Vec<Term>>>()?;
        if terms.is_empty() {
            return Err(Error::Config("empty growth law".into()));
        }
        Ok(GrowthLaw(terms))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub n: usize,
    pub t_init: usize,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub law: String,
    pub ratios: Vec<f64>,
    /// max(ratio) / min(ratio); 1.0 means a perfect fit up to a constant.
    pub spread: f64,
    pub constant: f64,
    pub best: bool,
}

/// Fits every candidate that is positive on all points. Requires at least
/// three points.
pub fn fit_growth(points: &[GrowthPoint], candidates: &[GrowthLaw]) -> Result<Vec<GrowthFit>> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let mut fits: Vec<GrowthFit> = candidates
        .iter()
        .filter_map(|law| {
            let g: Vec<f64> = points.iter().map(|p| law.eval(p.n as f64, p.t_init as f64)).collect();
            if g.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return None;
            }
            let ratios: Vec<f64> = points.iter().zip(&g).map(|(p, &gv)| p.mean / gv).collect();
            let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let num: f64 = points.iter().zip(&g).map(|(p, &gv)| p.mean * gv).sum();
            let den: f64 = g.iter().map(|&gv| gv * gv).sum();
            Some(GrowthFit {
                law: law.to_string(),
                ratios,
                spread: max / min,
                constant: num / den,
                best: false,
            })
        })
        .collect();
    if let Some(best) = fits
        .iter_mut()
        .min_by(|a, b| a.spread.total_cmp(&b.spread))
    {
        best.best = true;
    }
    Ok(fits)
}
