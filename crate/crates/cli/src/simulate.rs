use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use esl_core::evaluator::{run_grid, AggregateResult, ExperimentConfig};
use esl_core::model::PRNG_ID;
use serde::Serialize;

use crate::config::load_simulate;
use crate::output::{write_figdata, write_json, write_results_csv};

/// Everything needed to reproduce a run, stored next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub prng: String,
    pub seed_override: Option<u64>,
    pub beta_override: Option<f64>,
    pub threads: usize,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Debug, Serialize)]
struct ResultsFile<'a> {
    manifest: &'a RunManifest,
    results: &'a [AggregateResult],
    figdata: Vec<String>,
}

pub struct SimulateArgs<'a> {
    pub config: &'a Path,
    pub out: &'a Path,
    pub seed: Option<u64>,
    pub beta: Option<f64>,
}

/// Returns the aggregated rows after writing `results.csv`, `results.json`
/// and `figdata/` under `out`. Nothing is written unless the config is valid
/// and every run succeeds.
pub fn run(args: &SimulateArgs<'_>) -> Result<Vec<AggregateResult>> {
    let cfg = load_simulate(args.config, args.seed, args.beta)?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let results = run_grid(&cfg.experiments)?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_path: args.config.to_path_buf(),
        out_dir: args.out.to_path_buf(),
        prng: PRNG_ID.to_string(),
        seed_override: args.seed,
        beta_override: args.beta,
        threads: rayon::current_num_threads(),
        started_unix_seconds: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        experiments: cfg.experiments,
    };

    fs::create_dir_all(args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    write_results_csv(&args.out.join("results.csv"), &results)?;
    let figdata = write_figdata(&args.out.join("figdata"), &results)?;
    write_json(
        &args.out.join("results.json"),
        &ResultsFile {
            manifest: &manifest,
            results: &results,
            figdata,
        },
    )?;
    Ok(results)
}
