//! CSV and JSON writers.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use esl_core::evaluator::AggregateResult;
use serde::Serialize;

/// Six significant digits, plain decimal notation for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Rounding happens in the exponent form so 9.999999 becomes 10.0000.
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..15).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let rounded: f64 = sci.parse().unwrap_or(x);
        format!("{rounded:.decimals$}")
    } else {
        sci
    }
}

pub const RESULT_COLUMNS: [&str; 15] = [
    "N",
    "M",
    "alpha",
    "p",
    "policy",
    "discounted_cost_mean",
    "discounted_cost_ci",
    "mean_q_mean",
    "mean_q_ci",
    "serve",
    "serve_ci",
    "switch",
    "switch_ci",
    "idle",
    "idle_ci",
];

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_results_csv(path: &Path, results: &[AggregateResult]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(RESULT_COLUMNS)?;
    for r in results {
        let s = &r.summary;
        w.write_record([
            r.num_locations.to_string(),
            r.num_robots.to_string(),
            r.alpha.map(sig6).unwrap_or_default(),
            sig6(r.p),
            r.policy.to_string(),
            sig6(s.discounted_cost.mean),
            sig6(s.discounted_cost.ci),
            sig6(s.mean_queue_length.mean),
            sig6(s.mean_queue_length.ci),
            sig6(s.serve.mean),
            sig6(s.serve.ci),
            sig6(s.switch.mean),
            sig6(s.switch.ci),
            sig6(s.idle.mean),
            sig6(s.idle.ci),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Three panels per `(N, M)` cell: discounted cost, mean queue length and
/// action fractions, each as a long table over alpha and policy.
pub fn write_figdata(dir: &Path, results: &[AggregateResult]) -> Result<Vec<String>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for r in results {
        if !cells.contains(&(r.num_locations, r.num_robots)) {
            cells.push((r.num_locations, r.num_robots));
        }
    }
    let mut written = Vec::new();
    for (n, m) in cells {
        let rows: Vec<&AggregateResult> = results
            .iter()
            .filter(|r| r.num_locations == n && r.num_robots == m)
            .collect();
        let alpha = |r: &AggregateResult| r.alpha.map(sig6).unwrap_or_default();

        let name = format!("discounted_cost_N{n}_M{m}.csv");
        let mut w = csv_writer(&dir.join(&name))?;
        w.write_record(["alpha", "policy", "mean", "ci"])?;
        for r in &rows {
            let e = r.summary.discounted_cost;
            w.write_record([alpha(r), r.policy.to_string(), sig6(e.mean), sig6(e.ci)])?;
        }
        w.flush()?;
        written.push(name);

        let name = format!("mean_queue_N{n}_M{m}.csv");
        let mut w = csv_writer(&dir.join(&name))?;
        w.write_record(["alpha", "policy", "mean", "ci"])?;
        for r in &rows {
            let e = r.summary.mean_queue_length;
            w.write_record([alpha(r), r.policy.to_string(), sig6(e.mean), sig6(e.ci)])?;
        }
        w.flush()?;
        written.push(name);

        let name = format!("action_fractions_N{n}_M{m}.csv");
        let mut w = csv_writer(&dir.join(&name))?;
        w.write_record(["alpha", "policy", "serve", "switch", "idle"])?;
        for r in &rows {
            let s = &r.summary;
            w.write_record([
                alpha(r),
                r.policy.to_string(),
                sig6(s.serve.mean),
                sig6(s.switch.mean),
                sig6(s.idle.mean),
            ])?;
        }
        w.flush()?;
        written.push(name);
    }
    Ok(written)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
