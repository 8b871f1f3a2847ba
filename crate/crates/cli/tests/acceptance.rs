//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use esl_core::evaluator::{run_episode, run_grid, AggregateResult, GridSpec};
use esl_core::model::{arrival_rng, check_feasible, sample_arrivals, step, ModelConfig, SlotLedger, SystemState};
use esl_core::oracle::{
    build_truncated_mdp, check_esl_optimality, run_coupling_suite, value_iteration, CouplingSummary, Scenario,
    ScenarioKind,
};
use esl_core::policies::{
    cyclic_decide, esl_decide, fcfs_decide, optimize_dwell, CyclicPlan, Policy, PolicyKind, PolicySpec, TaskAgeBook,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn report(out: &mut Vec<Outcome>, id: &'static str, passed: bool, detail: String) {
    println!("{} {id}: {detail}", if passed { "PASS" } else { "FAIL" });
    out.push(Outcome { id, passed, detail });
}

fn cell(rows: &[AggregateResult], m: usize, alpha: f64, policy: PolicyKind) -> &AggregateResult {
    rows.iter()
        .find(|r| r.num_robots == m && r.alpha == Some(alpha) && r.policy == policy)
        .expect("cell present in grid")
}

fn grid_criteria(out: &mut Vec<Outcome>) -> Vec<AggregateResult> {
    let clock = Instant::now();
    let rows = run_grid(&GridSpec::standard().expand().unwrap()).unwrap();
    println!("  grid: 18 experiments in {:.1}s", clock.elapsed().as_secs_f64());

    // 1. Light load, two robots.
    let esl = &cell(&rows, 2, 0.2, PolicyKind::Esl).summary;
    let q = esl.mean_queue_length.mean;
    let q_ok = (q - 0.1191).abs() <= 0.05 * 0.1191;
    let dc = esl.discounted_cost;
    let ci_ok = dc.lower() <= 72.8 && dc.upper() >= 68.9;
    report(
        out,
        "C1 light-load ESL (N=6, M=2, alpha=0.2)",
        q_ok && ci_ok,
        format!(
            "mean queue {q:.5} (target 0.1191 ± 5%), discounted cost {:.3} ± {:.3} vs [68.9, 72.8]",
            dc.mean, dc.ci
        ),
    );

    // 2. Heavy load, three robots.
    let esl = &cell(&rows, 3, 0.8, PolicyKind::Esl).summary;
    let fcfs = &cell(&rows, 3, 0.8, PolicyKind::Fcfs).summary;
    let cyc = &cell(&rows, 3, 0.8, PolicyKind::Cyclic).summary;
    let q = esl.mean_queue_length.mean;
    let serve = esl.serve.mean;
    let ok = (q - 1.4522).abs() <= 0.10 * 1.4522
        && (serve - 0.7995).abs() <= 0.01
        && fcfs.mean_queue_length.mean > 100.0
        && cyc.mean_queue_length.mean > 100.0;
    report(
        out,
        "C2 heavy-load ESL (N=6, M=3, alpha=0.8)",
        ok,
        format!(
            "ESL mean queue {q:.4} (1.4522 ± 10%), serve {serve:.4} (0.7995 ± 0.01), FCFS queue {:.1}, cyclic queue {:.1} (> 100)",
            fcfs.mean_queue_length.mean, cyc.mean_queue_length.mean
        ),
    );

    // 3. Orderings across the grid.
    let mut failures = Vec::new();
    for m in [2, 3] {
        for alpha in [0.2, 0.5, 0.8] {
            let e = &cell(&rows, m, alpha, PolicyKind::Esl).summary;
            for other in [PolicyKind::Fcfs, PolicyKind::Cyclic] {
                let o = &cell(&rows, m, alpha, other).summary;
                if e.discounted_cost.mean >= o.discounted_cost.mean
                    || e.mean_queue_length.mean >= o.mean_queue_length.mean
                {
                    failures.push(format!("M={m} alpha={alpha} vs {other}"));
                }
            }
        }
    }
    let cost = |m, policy| cell(&rows, m, 0.8, policy).summary.discounted_cost.mean;
    let crossover_m2 = cost(2, PolicyKind::Cyclic) < cost(2, PolicyKind::Fcfs);
    let crossover_m3 = cost(3, PolicyKind::Fcfs) < cost(3, PolicyKind::Cyclic);
    report(
        out,
        "C3 policy ordering",
        failures.is_empty() && crossover_m2 && crossover_m3,
        format!(
            "ESL best in {}/6 cells{}; alpha=0.8 cost M=2 cyclic {:.1} vs FCFS {:.1}, M=3 FCFS {:.1} vs cyclic {:.1}",
            6 - failures.len().min(6),
            if failures.is_empty() {
                String::new()
            } else {
                format!(" (fails: {})", failures.join(", "))
            },
            cost(2, PolicyKind::Cyclic),
            cost(2, PolicyKind::Fcfs),
            cost(3, PolicyKind::Fcfs),
            cost(3, PolicyKind::Cyclic),
        ),
    );
    rows
}

/// Also returns whether every value-iteration residual ratio stayed at or
/// below beta, for the invariant criterion.
fn oracle_criterion(out: &mut Vec<Outcome>) -> bool {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut contraction_ok = true;
    for (n, m, cap) in [(2, 1, 6), (3, 2, 4)] {
        for p in [0.1, 0.3] {
            let clock = Instant::now();
            let cfg = ModelConfig::symmetric(n, m, p, 0.9).unwrap();
            let mdp = build_truncated_mdp(&cfg, cap).unwrap();
            let table = value_iteration(&mdp, 1e-10).unwrap();
            let report = check_esl_optimality(&mdp, &table, 3).unwrap();
            let secs = clock.elapsed().as_secs_f64();
            ok &= report.passed() && secs < 120.0 && report.interior_states > 0;
            parts.push(format!(
                "(N={n},M={m},C={cap},p={p}) {} violations over {} interior states in {secs:.2}s",
                report.violations.len(),
                report.interior_states
            ));
            // Residual differences carry a few ulps of max V.
            let vmax = table.values.iter().copied().fold(0.0, f64::max);
            let slack = 64.0 * f64::EPSILON * vmax;
            contraction_ok &= table.residuals.windows(2).all(|w| w[1] <= 0.9 * w[0] + slack);
        }
    }
    report(out, "C4 exact ESL check", ok, parts.join("; "));
    contraction_ok
}

fn coupling_criterion(out: &mut Vec<Outcome>) {
    let runs = 1000;
    let horizon = 200;
    let cases = [
        (ScenarioKind::Prop1A, vec![1, 3], vec![2, 1, 1, 0]),
        (ScenarioKind::Prop1B, vec![1], vec![3, 0]),
        (ScenarioKind::Prop2, vec![1, 3], vec![0, 2, 1]),
        (ScenarioKind::Prop4, vec![3], vec![1, 3, 0]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut prop4: Option<CouplingSummary> = None;
    for (kind, robots, queues) in cases {
        let cfg = ModelConfig::symmetric(queues.len(), robots.len(), 0.2, 0.9).unwrap();
        let scenario = Scenario::from_one_based(kind, cfg, &robots, &queues).unwrap();
        let s = run_coupling_suite(&scenario, horizon, 1, runs).unwrap();
        ok &= s.passed();
        parts.push(format!("{kind} {}/{}", s.pattern_matches, s.runs));
        if kind == ScenarioKind::Prop4 {
            prop4 = Some(s);
        }
    }
    let s = prop4.expect("prop4 ran");
    let predicted = s.mean_predicted.unwrap_or(f64::NAN);
    let gap_ok =
        s.mean_cost_difference > 0.0 && (s.mean_cost_difference - predicted).abs() <= 3.0 * s.cost_difference_se;
    report(
        out,
        "C5 coupling patterns",
        ok && gap_ok,
        format!(
            "{}; prop4 mean cost gap {:.6} (se {:.6}) vs predicted {:.6}",
            parts.join(", "),
            s.mean_cost_difference,
            s.cost_difference_se,
            predicted
        ),
    );
}

fn random_state(rng: &mut ChaCha8Rng, max_x: u64) -> SystemState {
    let n = rng.gen_range(1..=7);
    let m = rng.gen_range(1..=n);
    let mut locs: Vec<usize> = (0..n).collect();
    locs.shuffle(rng);
    locs.truncate(m);
    let queues = (0..n).map(|_| rng.gen_range(0..=max_x)).collect();
    SystemState::new(locs, queues).unwrap()
}

fn invariant_criterion(out: &mut Vec<Outcome>, contraction_ok: bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    // Conservation over 10^6 steps of random policies and loads.
    let mut steps = 0u64;
    let mut conserved = true;
    while steps < 1_000_000 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=n);
        let p = rng.gen_range(0.0..1.0);
        let spec = match rng.gen_range(0..3) {
            0 => PolicySpec::Esl,
            1 => PolicySpec::Fcfs,
            _ => PolicySpec::Cyclic {
                dwell: rng.gen_range(1..6),
            },
        };
        let cfg = ModelConfig::symmetric(n, m, p, 0.99).unwrap();
        let mut policy = Policy::new(&spec, &cfg).unwrap();
        let mut state = policy.initial_state(&cfg);
        let mut ledger = SlotLedger::new(n);
        let mut arrivals_rng = arrival_rng(rng.gen());
        for t in 0..1000 {
            let joint = policy.decide(&state, t).unwrap();
            let a = sample_arrivals(cfg.arrival_probs(), &mut arrivals_rng);
            let tr = step(&state, &joint, &a).unwrap();
            policy.observe(&tr.departures, &a, t).unwrap();
            ledger.record(&a, &tr.departures);
            state = tr.next;
            conserved &=
                (0..n).all(|i| state.queues()[i] + ledger.cumulative_departures[i] == ledger.cumulative_arrivals[i]);
            steps += 1;
        }
    }

    // Feasibility over 10^5 random states per policy.
    let mut infeasible = [0usize; 3];
    for _ in 0..100_000 {
        let s = random_state(&mut rng, 6);
        infeasible[0] += check_feasible(&s, &esl_decide(&s)).is_err() as usize;

        let s = random_state(&mut rng, 6);
        let now = rng.gen_range(0..100u64);
        let lists = s
            .queues()
            .iter()
            .map(|&x| {
                let mut v: Vec<u64> = (0..x).map(|_| rng.gen_range(0..=now)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        let book = TaskAgeBook::from_arrivals(lists).unwrap();
        infeasible[1] += check_feasible(&s, &fcfs_decide(&s, &book, now).unwrap()).is_err() as usize;
    }
    let mut cyclic_states = 0;
    while cyclic_states < 100_000 {
        let n = rng.gen_range(1..=7);
        let m = rng.gen_range(1..=n);
        let mut plan = CyclicPlan::new(n, m, rng.gen_range(1..6)).unwrap();
        let mut robots = plan.initial_state().robots().to_vec();
        for _ in 0..100 {
            let queues = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let s = SystemState::new(robots.clone(), queues).unwrap();
            let (joint, next) = cyclic_decide(&s, &plan);
            infeasible[2] += check_feasible(&s, &joint).is_err() as usize;
            robots = step(&s, &joint, &esl_core::model::ArrivalVector::none(n))
                .unwrap()
                .next
                .robots()
                .to_vec();
            plan = next;
            cyclic_states += 1;
        }
    }

    // Action fractions on every grid cell, two episodes each.
    let mut grid = GridSpec::standard();
    grid.episodes = 2;
    let mut worst_fraction = 0.0f64;
    for exp in grid.expand().unwrap() {
        for k in 0..2 {
            let e = run_episode(&exp, exp.episode_seed(k)).unwrap();
            worst_fraction = worst_fraction.max((e.serve_frac + e.switch_frac + e.idle_frac - 1.0).abs());
        }
    }

    // Dwell optimizer against an independent scan.
    let mut dwell_mismatch = 0;
    for _ in 0..50 {
        let p: f64 = rng.gen_range(0.01..0.95);
        let n = rng.gen_range(1..=6usize);
        let f = |t: u32| {
            let q = (1.0 - p).powi(t as i32);
            let total = (n as u32 * t) as f64;
            (total + n as f64 - t as f64 + t as f64 * q) / (1.0 - q)
        };
        let mut best = 1;
        for t in 2..=1000 {
            if f(t) < f(best) {
                best = t;
            }
        }
        let got = optimize_dwell(p, n, 1000).unwrap();
        if got != best && (f(got) - f(best)).abs() > 1e-12 * f(best) {
            dwell_mismatch += 1;
        }
    }

    let ok = conserved && infeasible == [0, 0, 0] && worst_fraction <= 1e-12 && contraction_ok && dwell_mismatch == 0;
    report(
        out,
        "C6 invariant suites",
        ok,
        format!(
            "conservation over {steps} steps: {conserved}; infeasible decisions esl/fcfs/cyclic {infeasible:?} over 10^5 states each; \
             max |fractions - 1| {worst_fraction:.1e}; residual ratio <= beta: {contraction_ok}; dwell mismatches {dwell_mismatch}/50"
        ),
    );
}

fn determinism_criterion(out: &mut Vec<Outcome>) {
    let dir = tempfile::tempdir().unwrap();
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/standard_grid.toml");
    let mut csvs = Vec::new();
    for name in ["first", "second"] {
        let target = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_esl"))
            .args(["simulate", "--config", config, "--out", target.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        csvs.push(fs::read(target.join("results.csv")).unwrap());
    }
    let rows = csvs[0].iter().filter(|&&b| b == b'\n').count();
    report(
        out,
        "C7 reproducible simulate output",
        csvs[0] == csvs[1] && rows == 19,
        format!(
            "two runs of configs/standard_grid.toml: {} bytes each, {} lines, identical: {}",
            csvs[0].len(),
            rows,
            csvs[0] == csvs[1]
        ),
    );
}

fn main() -> ExitCode {
    let mut out = Vec::new();
    grid_criteria(&mut out);
    let contraction_ok = oracle_criterion(&mut out);
    coupling_criterion(&mut out);
    invariant_criterion(&mut out, contraction_ok);
    determinism_criterion(&mut out);

    let failed: Vec<&Outcome> = out.iter().filter(|o| !o.passed).collect();
    println!("acceptance: {}/{} criteria pass", out.len() - failed.len(), out.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for o in failed {
            eprintln!("failed {}: {}", o.id, o.detail);
        }
        ExitCode::FAILURE
    }
}
