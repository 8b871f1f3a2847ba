//! TOML config files for `simulate` and `verify`.
//!
//! Every key is optional and falls back to the defaults documented in
//! `docs/config.md`. Validation errors name the file and line of the
//! offending key.

use std::fmt::Display;
use std::ops::Range;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use esl_core::evaluator::{ExperimentConfig, GridSpec};
use esl_core::model::ModelConfig;
use esl_core::oracle::{
    BuildOptions, Candidate, Scenario, ScenarioKind, DEFAULT_MARGIN, DEFAULT_ORACLE_DISCOUNT, DEFAULT_TIE_TOLERANCE,
};
use esl_core::policies::{DwellRule, PolicyKind};
use serde::Deserialize;
use toml::Spanned;

/// Source text plus path, for line-anchored messages.
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

impl Source {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Ok(Self {
            path: path.to_path_buf(),
            text,
        })
    }

    fn line_of(&self, offset: usize) -> usize {
        let end = offset.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn at(&self, span: Range<usize>, msg: impl Display) -> anyhow::Error {
        anyhow!("{}:{}: {msg}", self.path.display(), self.line_of(span.start))
    }

    fn parse<'de, T: Deserialize<'de>>(&'de self) -> Result<T> {
        toml::from_str(&self.text).map_err(|e| match e.span() {
            Some(span) => self.at(span, e.message().trim_end()),
            None => anyhow!("{}: {}", self.path.display(), e.message().trim_end()),
        })
    }

    /// Take a spanned value or a default, checking it with `check`.
    fn value<T: Clone>(
        &self,
        raw: &Option<Spanned<T>>,
        default: T,
        check: impl FnOnce(&T) -> Result<(), String>,
    ) -> Result<T> {
        match raw {
            Some(v) => {
                check(v.get_ref()).map_err(|msg| self.at(v.span(), msg))?;
                Ok(v.get_ref().clone())
            }
            None => Ok(default),
        }
    }

    fn span_or_start<T>(&self, raw: &Option<Spanned<T>>) -> Range<usize> {
        raw.as_ref().map_or(0..0, |v| v.span())
    }
}

fn unit_interval_open(x: &f64) -> Result<(), String> {
    if *x > 0.0 && *x < 1.0 {
        Ok(())
    } else {
        Err(format!("expected a value strictly between 0 and 1, got {x}"))
    }
}

fn positive<T: PartialOrd + Default + Display>(x: &T) -> Result<(), String> {
    if *x > T::default() {
        Ok(())
    } else {
        Err(format!("expected a positive value, got {x}"))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    cyclic: RawCyclic,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    cells: Option<Spanned<Vec<(usize, usize)>>>,
    alphas: Option<Spanned<Vec<f64>>>,
    policies: Option<Spanned<Vec<String>>>,
    horizon: Option<Spanned<u64>>,
    episodes: Option<Spanned<usize>>,
    base_seed: Option<Spanned<u64>>,
    discount: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCyclic {
    dwell_rule: Option<Spanned<String>>,
    dwell_search_max: Option<Spanned<u32>>,
}

/// A parsed `simulate` config.
#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub grid: GridSpec,
    pub experiments: Vec<ExperimentConfig>,
}

pub fn load_simulate(path: &Path, seed: Option<u64>, beta: Option<f64>) -> Result<SimulateConfig> {
    let src = Source::read(path)?;
    let raw: RawSimulate = src.parse()?;
    let d = GridSpec::standard();
    let g = &raw.grid;

    let cells = src.value(&g.cells, d.cells, |cells| {
        if cells.is_empty() {
            return Err("need at least one (N, M) cell".into());
        }
        match cells.iter().find(|(n, m)| *m == 0 || m > n) {
            Some((n, m)) => Err(format!("cell [{n}, {m}] needs 1 <= M <= N")),
            None => Ok(()),
        }
    })?;
    let alphas = src.value(&g.alphas, d.alphas, |alphas| {
        for &a in alphas {
            for &(n, m) in &cells {
                let p = a * m as f64 / n as f64;
                if !(p > 0.0 && p < 1.0) {
                    return Err(format!("alpha {a} gives p = {p} for N={n}, M={m}; need 0 < p < 1"));
                }
            }
        }
        Ok(())
    })?;
    let mut policies = d.policies;
    if let Some(raw) = &g.policies {
        policies = raw
            .get_ref()
            .iter()
            .map(|s| s.parse::<PolicyKind>())
            .collect::<Result<_, _>>()
            .map_err(|e| src.at(raw.span(), e))?;
        if policies.is_empty() {
            return Err(src.at(raw.span(), "need at least one policy"));
        }
    }
    let horizon = src.value(&g.horizon, d.horizon, positive)?;
    let episodes = src.value(&g.episodes, d.episodes, |&r| {
        if r < 2 {
            Err(format!("insufficient replications: episodes = {r}, need at least 2"))
        } else {
            Ok(())
        }
    })?;
    let base_seed = src.value(&g.base_seed, d.base_seed, |_| Ok(()))?;
    let discount = src.value(&g.discount, d.discount, unit_interval_open)?;
    let dwell_rule = match &raw.cyclic.dwell_rule {
        Some(v) => v.get_ref().parse::<DwellRule>().map_err(|e| src.at(v.span(), e))?,
        None => d.dwell_rule,
    };
    let dwell_search_max = src.value(&raw.cyclic.dwell_search_max, d.dwell_search_max, positive)?;

    if let Some(b) = beta {
        unit_interval_open(&b).map_err(|msg| anyhow!("--beta: {msg}"))?;
    }
    let grid = GridSpec {
        cells,
        alphas,
        policies,
        horizon,
        episodes,
        base_seed: seed.unwrap_or(base_seed),
        discount: beta.unwrap_or(discount),
        dwell_rule,
        dwell_search_max,
    };
    let experiments = grid.expand().map_err(|e| src.at(src.span_or_start(&g.alphas), e))?;
    Ok(SimulateConfig { grid, experiments })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    #[serde(default)]
    oracle: RawOracle,
    #[serde(default)]
    coupling: RawCoupling,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    discount: Option<Spanned<f64>>,
    tolerance: Option<Spanned<f64>>,
    margin: Option<Spanned<u64>>,
    tie_tolerance: Option<Spanned<f64>>,
    probabilities: Option<Spanned<Vec<f64>>>,
    candidate: Option<Spanned<String>>,
    state_budget: Option<Spanned<u64>>,
    instances: Option<Vec<Spanned<RawInstance>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    num_locations: usize,
    num_robots: usize,
    cap: u64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    runs: Option<Spanned<usize>>,
    horizon: Option<Spanned<u64>>,
    base_seed: Option<Spanned<u64>>,
    p: Option<Spanned<f64>>,
    discount: Option<Spanned<f64>>,
    scenarios: Option<Vec<Spanned<RawScenario>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: String,
    /// One-based robot locations.
    robots: Vec<usize>,
    queues: Vec<u64>,
    p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleInstance {
    pub num_locations: usize,
    pub num_robots: usize,
    pub cap: u64,
}

#[derive(Debug, Clone)]
pub struct OracleSettings {
    pub instances: Vec<OracleInstance>,
    pub probabilities: Vec<f64>,
    pub discount: f64,
    pub tolerance: f64,
    pub margin: u64,
    pub tie_tolerance: f64,
    pub candidate: Candidate,
    pub build: BuildOptions,
}

#[derive(Debug, Clone)]
pub struct CouplingSettings {
    pub scenarios: Vec<Scenario>,
    pub runs: usize,
    pub horizon: u64,
    pub base_seed: u64,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub oracle: OracleSettings,
    pub coupling: CouplingSettings,
}

pub const DEFAULT_INSTANCES: [(usize, usize, u64); 3] = [(2, 1, 6), (3, 1, 6), (3, 2, 4)];

/// One-based robots and queues of the default scenarios.
pub fn default_scenarios() -> Vec<(ScenarioKind, Vec<usize>, Vec<u64>)> {
    vec![
        (ScenarioKind::Prop1A, vec![1, 3], vec![2, 1, 1, 0]),
        (ScenarioKind::Prop1B, vec![1], vec![3, 0]),
        (ScenarioKind::Prop2, vec![1, 3], vec![0, 2, 1]),
        (ScenarioKind::Prop4, vec![3], vec![1, 3, 0]),
    ]
}

fn build_scenario(
    kind: ScenarioKind,
    robots: &[usize],
    queues: &[u64],
    p: f64,
    beta: f64,
) -> esl_core::Result<Scenario> {
    let config = ModelConfig::symmetric(queues.len(), robots.len(), p, beta)?;
    Scenario::from_one_based(kind, config, robots, queues)
}

pub fn load_verify(path: &Path) -> Result<VerifyConfig> {
    let src = Source::read(path)?;
    let raw: RawVerify = src.parse()?;
    let o = &raw.oracle;

    let probabilities = src.value(&o.probabilities, vec![0.1, 0.3], |ps| {
        if ps.is_empty() {
            return Err("need at least one arrival probability".into());
        }
        match ps.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
            Some(p) => Err(format!("arrival probability {p} outside [0, 1]")),
            None => Ok(()),
        }
    })?;
    let discount = src.value(&o.discount, DEFAULT_ORACLE_DISCOUNT, unit_interval_open)?;
    let tolerance = src.value(&o.tolerance, 1e-10, positive)?;
    let margin = src.value(&o.margin, DEFAULT_MARGIN, |_| Ok(()))?;
    let tie_tolerance = src.value(&o.tie_tolerance, DEFAULT_TIE_TOLERANCE, |t| {
        if *t >= 0.0 {
            Ok(())
        } else {
            Err(format!("tie tolerance must be non-negative, got {t}"))
        }
    })?;
    let candidate = match &o.candidate {
        Some(v) => v.get_ref().parse::<Candidate>().map_err(|e| src.at(v.span(), e))?,
        None => Candidate::Esl,
    };
    let mut build = BuildOptions::default();
    build.state_budget = src.value(&o.state_budget, build.state_budget, positive)?;
    let instances = match &o.instances {
        Some(list) => list
            .iter()
            .map(|inst| {
                let r = inst.get_ref();
                if r.num_robots == 0 || r.num_robots > r.num_locations {
                    return Err(src.at(
                        inst.span(),
                        "instance needs 1 <= num_robots <= num_locations".to_string(),
                    ));
                }
                if r.cap <= margin {
                    return Err(src.at(inst.span(), format!("cap {} must exceed the margin {margin}", r.cap)));
                }
                Ok(OracleInstance {
                    num_locations: r.num_locations,
                    num_robots: r.num_robots,
                    cap: r.cap,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        None => DEFAULT_INSTANCES
            .iter()
            .map(|&(num_locations, num_robots, cap)| OracleInstance {
                num_locations,
                num_robots,
                cap,
            })
            .collect(),
    };

    let c = &raw.coupling;
    let runs = src.value(&c.runs, 1000, |&r| {
        if r < 2 {
            Err(format!("insufficient replications: runs = {r}, need at least 2"))
        } else {
            Ok(())
        }
    })?;
    let horizon = src.value(&c.horizon, 200, positive)?;
    let base_seed = src.value(&c.base_seed, 1, |_| Ok(()))?;
    let p = src.value(&c.p, 0.2, |p| {
        if *p >= 0.0 && *p <= 1.0 {
            Ok(())
        } else {
            Err(format!("arrival probability {p} outside [0, 1]"))
        }
    })?;
    let beta = src.value(&c.discount, DEFAULT_ORACLE_DISCOUNT, unit_interval_open)?;
    let scenarios = match &c.scenarios {
        Some(list) => list
            .iter()
            .map(|s| {
                let r = s.get_ref();
                let kind = r.kind.parse::<ScenarioKind>().map_err(|e| src.at(s.span(), e))?;
                build_scenario(kind, &r.robots, &r.queues, r.p.unwrap_or(p), beta).map_err(|e| src.at(s.span(), e))
            })
            .collect::<Result<Vec<_>>>()?,
        None => default_scenarios()
            .into_iter()
            .map(|(kind, robots, queues)| {
                build_scenario(kind, &robots, &queues, p, beta).map_err(|e| src.at(src.span_or_start(&c.p), e))
            })
            .collect::<Result<Vec<_>>>()?,
    };

    Ok(VerifyConfig {
        oracle: OracleSettings {
            instances,
            probabilities,
            discount,
            tolerance,
            margin,
            tie_tolerance,
            candidate,
            build,
        },
        coupling: CouplingSettings {
            scenarios,
            runs,
            horizon,
            base_seed,
        },
    })
}
