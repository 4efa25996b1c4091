use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mogp::harness::config::RunSettings;
use mogp::harness::growth::{fit_growth, GrowthLaw, GrowthPoint};
use mogp::harness::validate::run_validation;
use mogp::harness::{read_raw_csv, run_suite, summarize, write_raw_csv, write_summary_json, write_trace_csv, SuiteSummary};
use mogp::oracle::pareto_front;
use mogp::{Error, Problem, ProblemKind, Result, WeightFamily};

#[derive(Parser, Debug)]
#[command(name = "mogp", version, about = "Runtime experiments for (1+1)-GP and SMO-GP on ORDER/MAJORITY problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a seeded trial suite and write raw CSV + summary JSON
    Run(RunSettings),
    /// Fit growth laws to the cell means of an existing raw CSV
    Fit {
        /// Raw CSV written by `run`
        csv: PathBuf,
        /// Comma-separated growth laws, e.g. "n,n*ln(n),n^2,t_init+n*ln(n)"
        #[arg(long)]
        candidates: Option<String>,
        /// Also write the regenerated summary JSON here
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Print the Pareto front for a problem and weights
    Front {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value = "unit")]
        weights: String,
        #[arg(long)]
        n: usize,
    },
    /// Check oracles against brute force and run audited sample runs
    Validate {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn print_summary(summary: &SuiteSummary) {
    println!(
        "{} {} selection={} mode={} weights={}",
        summary.problem, summary.algo, summary.selection, summary.mode, summary.weight_family
    );
    println!("{:>6} {:>8} {:>7} {:>9} {:>14} {:>12} {:>12}", "n", "t_init", "trials", "success", "mean", "median", "std");
    for c in &summary.cells {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.1}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>6} {:>8} {:>7} {:>8.1}% {:>14} {:>12} {:>12}{}",
            c.n,
            c.t_init,
            c.trials,
            100.0 * c.success_rate,
            opt(c.mean),
            opt(c.median),
            opt(c.std_dev),
            if c.censored { "  [censored]" } else { "" }
        );
    }
    if !summary.fits.is_empty() {
        println!("{:>22} {:>14} {:>10}", "growth law", "constant", "spread");
        for f in &summary.fits {
            println!(
                "{:>22} {:>14.4} {:>10.3}{}",
                f.law,
                f.constant,
                f.spread,
                if f.best { "  <- best" } else { "" }
            );
        }
    }
}

fn cmd_run(settings: RunSettings) -> Result<bool> {
    let (config, paths) = settings.merged_with_file()?.to_experiment()?;
    let out = run_suite(&config)?;
    if let Some(raw) = &paths.raw {
        write_raw_csv(raw, &out.rows)?;
    }
    if let Some(summary) = &paths.summary {
        write_summary_json(summary, &out.summary)?;
    }
    if let Some(trace) = &paths.trace {
        write_trace_csv(trace, &out.traces)?;
    }
    print_summary(&out.summary);
    if out.audit_violations > 0 {
        eprintln!("{} invariant violations:", out.audit_violations);
        for m in &out.audit_messages {
            eprintln!("  {m}");
        }
        return Ok(false);
    }
    Ok(true)
}

fn cmd_fit(csv: PathBuf, candidates: Option<String>, summary_path: Option<PathBuf>) -> Result<bool> {
    let rows = read_raw_csv(&csv)?;
    if rows.is_empty() {
        return Err(Error::Config(format!("{}: no rows", csv.display())));
    }
    let mut summary = summarize(&rows);
    if let Some(list) = candidates {
        let laws = GrowthLaw::parse_list(&list)?;
        let points: Vec<GrowthPoint> = summary
            .cells
            .iter()
            .filter_map(|c| c.mean.map(|mean| GrowthPoint { n: c.n, t_init: c.t_init, mean }))
            .collect();
        summary.fits = fit_growth(&points, &laws)?;
        summary.best_fit = summary.fits.iter().find(|f| f.best).map(|f| f.law.clone());
    } else if summary.fits.is_empty() {
        let usable = summary.cells.iter().filter(|c| c.mean.is_some()).count();
        return Err(Error::TooFewPoints(usable));
    }
    if let Some(path) = summary_path {
        write_summary_json(&path, &summary)?;
    }
    print_summary(&summary);
    Ok(true)
}

fn cmd_front(problem: &str, weights: &str, n: usize) -> Result<bool> {
    let kind: ProblemKind = problem.parse()?;
    let family: WeightFamily = weights.parse()?;
    let p = Problem::new(kind, family.weights(n)?)?;
    println!("{}", pareto_front(&p));
    Ok(true)
}

fn cmd_validate(n: usize, seed: u64) -> Result<bool> {
    let report = run_validation(n, seed)?;
    for c in &report.checks {
        println!("[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", report.checks.len());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(settings) => cmd_run(settings),
        Command::Fit { csv, candidates, summary } => cmd_fit(csv, candidates, summary),
        Command::Front { problem, weights, n } => cmd_front(&problem, &weights, n),
        Command::Validate { n, seed } => cmd_validate(n, seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
