use std::io::Write;

use anyhow::Result;
use esl_core::policies::{continuous_dwell_optimum, dwell_objective, optimize_dwell};

use crate::output::sig6;

/// Print `t, f(n t)` for `t = 1..=max`, then the argmin and the continuous
/// optimum with its roundings.
pub fn run(p: f64, n: usize, max: u32, out: &mut impl Write) -> Result<u32> {
    let best = optimize_dwell(p, n, max)?;
    let total = continuous_dwell_optimum(p, n, max)?;
    let at = |t: u32| dwell_objective(p, n, (n as u64 * t as u64) as f64);
    writeln!(out, "t,f")?;
    for t in 1..=max {
        writeln!(out, "{t},{}", sig6(at(t)))?;
    }
    let per = total / n as f64;
    let floor = (per.floor() as u32).max(1);
    let round = (per.round() as u32).max(1);
    writeln!(out, "# argmin t* = {best}, f = {}", sig6(at(best)))?;
    writeln!(out, "# continuous T* = {}, T*/n = {}", sig6(total), sig6(per))?;
    writeln!(
        out,
        "# floor t = {floor}, f = {}; round t = {round}, f = {}",
        sig6(at(floor)),
        sig6(at(round))
    )?;
    Ok(best)
}
