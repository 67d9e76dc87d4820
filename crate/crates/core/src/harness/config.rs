//! Experiment configuration and its flat key-value file format.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::directions::{DirectionChoice, DirectionFamily};
use crate::dms::{Acceptance, DmsConfig};
use crate::dominance::Selection;
use crate::error::{Error, Result};
use crate::minmax::MinMaxConfig;
use crate::objective::{ForcingFunction, StepParams};
use crate::trace::SolverKind;

/// Where each seeded run starts.
#[derive(Debug, Clone, PartialEq)]
pub enum StartSpec {
    Fixed(Vec<f64>),
    /// Uniform in `[lo, hi]^n`, drawn from the run seed.
    Box {
        lo: f64,
        hi: f64,
    },
}

impl StartSpec {
    /// `fixed:a,b,...` or `box:LO:HI`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad start '{s}'"));
        if let Some(rest) = s.strip_prefix("fixed:") {
            let x = rest
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(StartSpec::Fixed(x));
        }
        if let Some(rest) = s.strip_prefix("box:") {
            let (lo, hi) = rest.split_once(':').ok_or_else(bad)?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            if !(lo < hi) {
                return Err(bad());
            }
            return Ok(StartSpec::Box { lo, hi });
        }
        Err(bad())
    }

    pub fn point(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match self {
            StartSpec::Fixed(x) => {
                if x.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: x.len(),
                    });
                }
                Ok(x.clone())
            }
            StartSpec::Box { lo, hi } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..n).map(|_| rng.random_range(*lo..*hi)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub solver: SolverKind,
    pub step: StepParams,
    pub forcing: ForcingFunction,
    /// Min-max decrease constant.
    pub c: f64,
    pub directions: DirectionFamily,
    pub direction_choice: DirectionChoice,
    pub escalate_after: Option<usize>,
    pub selection: Selection,
    pub opportunistic: bool,
    pub best_improving: bool,
    pub max_iterations: usize,
    pub alpha_min: f64,
    pub epsilon_grid: Vec<f64>,
    pub seeds: Vec<u64>,
    pub start: StartSpec,
    pub checks: Vec<String>,
    pub slope_threshold: f64,
}

pub const KNOWN_CHECKS: [&str; 4] = ["lemmas", "slope", "theorem3", "evaluations"];

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: "dennis_woods_bi".into(),
            solver: SolverKind::MinMax,
            step: StepParams::default(),
            forcing: ForcingFunction::default(),
            c: 1.0,
            directions: DirectionFamily::Rotated { level: 2 },
            direction_choice: DirectionChoice::Cycle,
            escalate_after: None,
            selection: Selection::LargestStepsize,
            opportunistic: false,
            best_improving: false,
            max_iterations: 100_000,
            alpha_min: 1e-12,
            epsilon_grid: vec![0.2, 0.1, 0.05, 0.025],
            seeds: vec![0, 1, 2, 3, 4],
            start: StartSpec::Box { lo: 2.0, hi: 5.0 },
            checks: KNOWN_CHECKS.iter().map(|s| s.to_string()).collect(),
            slope_threshold: -2.3,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: Option<String>,
    solver: Option<String>,
    alpha0: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    gamma: Option<f64>,
    forcing_c: Option<f64>,
    forcing_p: Option<f64>,
    c: Option<f64>,
    directions: Option<String>,
    direction_choice: Option<String>,
    escalate_after: Option<usize>,
    selection: Option<String>,
    opportunistic: Option<bool>,
    best_improving: Option<bool>,
    max_iterations: Option<usize>,
    alpha_min: Option<f64>,
    epsilon_grid: Option<Vec<f64>>,
    seeds: Option<Vec<u64>>,
    start: Option<String>,
    checks: Option<Vec<String>>,
    slope_threshold: Option<f64>,
}

fn parse_seeded(s: &str, what: &str) -> Result<Option<u64>> {
    match s.split_once(':') {
        Some(("random", seed)) => seed
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("bad seed in {what} '{s}'"))),
        _ => Ok(None),
    }
}

pub fn parse_selection(s: &str) -> Result<Selection> {
    match s.trim() {
        "largest-stepsize" => Ok(Selection::LargestStepsize),
        "fifo" => Ok(Selection::Fifo),
        other => parse_seeded(other, "selection")?
            .map(|seed| Selection::Random { seed })
            .ok_or_else(|| Error::Config(format!("unknown selection '{s}'"))),
    }
}

pub fn parse_direction_choice(s: &str) -> Result<DirectionChoice> {
    match s.trim() {
        "cycle" => Ok(DirectionChoice::Cycle),
        other => parse_seeded(other, "direction_choice")?
            .map(|seed| DirectionChoice::Random { seed })
            .ok_or_else(|| Error::Config(format!("unknown direction choice '{s}'"))),
    }
}

impl ExperimentConfig {
    /// Parses the flat `key = value` format. Unknown keys are rejected and
    /// missing keys take their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let d = ExperimentConfig::default();
        let step = StepParams::new(
            raw.alpha0.unwrap_or(d.step.alpha0()),
            raw.beta1.unwrap_or(d.step.beta1()),
            raw.beta2.unwrap_or(d.step.beta2()),
            raw.gamma.unwrap_or(d.step.gamma()),
        )?;
        let forcing = ForcingFunction::new(
            raw.forcing_c.unwrap_or(d.forcing.c()),
            raw.forcing_p.unwrap_or(d.forcing.p()),
        )?;
        let solver = match raw.solver.as_deref() {
            None => d.solver,
            Some("dms") => SolverKind::Dms,
            Some("minmax") => SolverKind::MinMax,
            Some(other) => return Err(Error::Config(format!("unknown solver '{other}'"))),
        };
        let cfg = ExperimentConfig {
            problem: raw.problem.unwrap_or(d.problem),
            solver,
            step,
            forcing,
            c: raw.c.unwrap_or(d.c),
            directions: match raw.directions {
                Some(s) => DirectionFamily::parse(&s)?,
                None => d.directions,
            },
            direction_choice: match raw.direction_choice {
                Some(s) => parse_direction_choice(&s)?,
                None => d.direction_choice,
            },
            escalate_after: raw.escalate_after.filter(|&v| v > 0),
            selection: match raw.selection {
                Some(s) => parse_selection(&s)?,
                None => d.selection,
            },
            opportunistic: raw.opportunistic.unwrap_or(d.opportunistic),
            best_improving: raw.best_improving.unwrap_or(d.best_improving),
            max_iterations: raw.max_iterations.unwrap_or(d.max_iterations),
            alpha_min: raw.alpha_min.unwrap_or(d.alpha_min),
            epsilon_grid: raw.epsilon_grid.unwrap_or(d.epsilon_grid),
            seeds: raw.seeds.unwrap_or(d.seeds),
            start: match raw.start {
                Some(s) => StartSpec::parse(&s)?,
                None => d.start,
            },
            checks: raw.checks.unwrap_or(d.checks),
            slope_threshold: raw.slope_threshold.unwrap_or(d.slope_threshold),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon_grid.is_empty() {
            return Err(Error::Config("epsilon_grid is empty".into()));
        }
        if self.epsilon_grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::Config("every epsilon must lie in (0, 1)".into()));
        }
        if self.epsilon_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("epsilon_grid must be strictly decreasing".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("no seeds".into()));
        }
        if self.solver == SolverKind::DmsMinMax {
            return Err(Error::Config("solver must be dms or minmax".into()));
        }
        if let Some(bad) = self.checks.iter().find(|c| !KNOWN_CHECKS.contains(&c.as_str())) {
            return Err(Error::Config(format!("unknown check '{bad}'")));
        }
        self.dms_config(0, None)?.validate()?;
        self.minmax_config(0, None)?.validate()
    }

    /// Random direction streams and random selection are offset by the run
    /// seed so that seeds give independent runs.
    fn seeded(&self, seed: u64) -> (DirectionFamily, DirectionChoice, Selection) {
        let directions = match self.directions {
            DirectionFamily::Random { count, seed: s } => DirectionFamily::Random {
                count,
                seed: s.wrapping_add(seed),
            },
            other => other,
        };
        let choice = match self.direction_choice {
            DirectionChoice::Random { seed: s } => DirectionChoice::Random {
                seed: s.wrapping_add(seed),
            },
            other => other,
        };
        let selection = match self.selection {
            Selection::Random { seed: s } => Selection::Random {
                seed: s.wrapping_add(seed),
            },
            other => other,
        };
        (directions, choice, selection)
    }

    pub fn dms_config(&self, seed: u64, epsilon: Option<f64>) -> Result<DmsConfig> {
        let (directions, direction_choice, selection) = self.seeded(seed);
        Ok(DmsConfig {
            step: self.step,
            forcing: self.forcing,
            directions,
            direction_choice,
            escalate_after: self.escalate_after,
            selection,
            acceptance: Acceptance::Pareto,
            opportunistic: self.opportunistic,
            max_iterations: self.max_iterations,
            alpha_min: self.alpha_min,
            track_criticality: true,
            epsilon,
            ..DmsConfig::default()
        })
    }

    pub fn minmax_config(&self, seed: u64, epsilon: Option<f64>) -> Result<MinMaxConfig> {
        let (directions, direction_choice, _) = self.seeded(seed);
        Ok(MinMaxConfig {
            step: self.step,
            c: self.c,
            directions,
            direction_choice,
            escalate_after: self.escalate_after,
            best_improving: self.best_improving,
            max_iterations: self.max_iterations,
            alpha_min: self.alpha_min,
            track_criticality: true,
            epsilon,
        })
    }

    pub fn wants(&self, check: &str) -> bool {
        self.checks.iter().any(|c| c == check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            problem = "quadratic_family:4"
            solver = "dms"
            directions = "random:8:3"
            selection = "random:5"
            epsilon_grid = [0.3, 0.1]
            seeds = [7]
            start = "fixed:1,2,3"
            escalate_after = 0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.solver, SolverKind::Dms);
        assert_eq!(cfg.directions, DirectionFamily::Random { count: 8, seed: 3 });
        assert_eq!(cfg.selection, Selection::Random { seed: 5 });
        assert_eq!(cfg.start, StartSpec::Fixed(vec![1.0, 2.0, 3.0]));
        assert_eq!(cfg.escalate_after, None);
        let d = cfg.dms_config(7, Some(0.1)).unwrap();
        assert_eq!(d.directions, DirectionFamily::Random { count: 8, seed: 10 });
        assert_eq!(d.selection, Selection::Random { seed: 12 });
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "epsilon_grid = [0.1, 0.2]",
            "epsilon_grid = [0.5, 1.0]",
            "epsilon_grid = []",
            "solver = \"simplex\"",
            "unknown_key = 1",
            "beta1 = 0.9\nbeta2 = 0.5",
            "checks = [\"nope\"]",
            "start = \"box:3:1\"",
            "alpha_min = 5.0",
        ] {
            assert!(ExperimentConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn start_points() {
        let b = StartSpec::Box { lo: 2.0, hi: 5.0 };
        let x = b.point(2, 9).unwrap();
        assert_eq!(x, b.point(2, 9).unwrap());
        assert!(x.iter().all(|v| (2.0..5.0).contains(v)));
        assert_ne!(x, b.point(2, 10).unwrap());
        assert!(StartSpec::Fixed(vec![1.0]).point(2, 0).is_err());
    }
}
