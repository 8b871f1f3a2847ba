use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use esl_core::model::{ModelConfig, PRNG_ID};
use esl_core::oracle::{
    build_truncated_mdp_with, check_candidate, run_coupling_suite, value_iteration, CheckOptions, CouplingSummary,
    ViolationReport,
};
use serde::Serialize;

use crate::config::{load_verify, OracleInstance, VerifyConfig};
use crate::output::write_json;

#[derive(Debug, Serialize)]
pub struct OracleRun {
    pub num_locations: usize,
    pub num_robots: usize,
    pub cap: u64,
    pub p: f64,
    pub states: usize,
    pub iterations: usize,
    pub residual: f64,
    pub seconds: f64,
    pub report: ViolationReport,
}

#[derive(Debug, Serialize)]
pub struct VerifyOutcome {
    pub tool_version: String,
    pub prng: String,
    pub passed: bool,
    pub violations: usize,
    pub coupling_mismatches: usize,
    pub oracle: Vec<OracleRun>,
    pub coupling: Vec<CouplingSummary>,
}

fn oracle_run(cfg: &VerifyConfig, inst: OracleInstance, p: f64) -> Result<OracleRun> {
    let o = &cfg.oracle;
    let clock = Instant::now();
    let model = ModelConfig::symmetric(inst.num_locations, inst.num_robots, p, o.discount)?;
    let mdp = build_truncated_mdp_with(&model, inst.cap, o.build)?;
    let table = value_iteration(&mdp, o.tolerance)?;
    let options = CheckOptions {
        margin: o.margin,
        tie_tolerance: o.tie_tolerance,
    };
    let report = check_candidate(&mdp, &table, options, o.candidate)?;
    Ok(OracleRun {
        num_locations: inst.num_locations,
        num_robots: inst.num_robots,
        cap: inst.cap,
        p,
        states: mdp.num_states(),
        iterations: table.iterations,
        residual: table.residual,
        seconds: clock.elapsed().as_secs_f64(),
        report,
    })
}

/// Run every oracle instance and coupling suite, then write `verify.json`.
/// The config is fully validated before anything runs.
pub fn run(config: &Path, out: &Path) -> Result<VerifyOutcome> {
    let cfg = load_verify(config)?;
    let mut oracle = Vec::new();
    for &inst in &cfg.oracle.instances {
        for &p in &cfg.oracle.probabilities {
            oracle.push(oracle_run(&cfg, inst, p)?);
        }
    }
    let c = &cfg.coupling;
    let coupling = c
        .scenarios
        .iter()
        .map(|s| run_coupling_suite(s, c.horizon, c.base_seed, c.runs))
        .collect::<esl_core::Result<Vec<_>>>()?;

    let violations = oracle.iter().map(|r| r.report.violations.len()).sum();
    let coupling_mismatches = coupling.iter().map(|s| s.runs - s.pattern_matches).sum();
    let outcome = VerifyOutcome {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        prng: PRNG_ID.to_string(),
        passed: violations == 0 && coupling_mismatches == 0,
        violations,
        coupling_mismatches,
        oracle,
        coupling,
    };
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    write_json(&out.join("verify.json"), &outcome)?;
    Ok(outcome)
}
