//! Scaling experiments: solve to `mu <= eps` over an epsilon grid and a set
//! of seeds, then measure counts, constants and the log-log slope.

use std::fmt::Write as _;
use std::io::Write;

use crate::criticality::c1_ratio;
use crate::dms::{fmax, DmsSolver};
use crate::error::{Error, Result};
use crate::minmax::{minmax_run_labeled, theorem3_bound};
use crate::objective::MultiObjective;
use crate::problems::{by_name, Problem};
use crate::trace::{count_iteration_sets, linked_sequences, RunTrace, SolverKind};

use super::config::ExperimentConfig;
use super::verify::verify_lemmas;

/// One run of the configured solver from the seed's start point.
pub fn run_single(cfg: &ExperimentConfig, problem: &Problem, seed: u64, epsilon: Option<f64>) -> Result<RunTrace> {
    let x0 = cfg.start.point(problem.dim(), seed)?;
    match cfg.solver {
        SolverKind::MinMax => minmax_run_labeled(problem, &x0, &cfg.minmax_config(seed, epsilon)?, problem.name()),
        _ => DmsSolver::new(cfg.dms_config(seed, epsilon)?)
            .with_label(problem.name())
            .run(problem, &x0),
    }
}

/// `(|S|, |U|, |L|)` over the measured window, zeros when there is none.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindowCounts {
    pub window: Option<(usize, usize)>,
    pub successful: usize,
    pub unsuccessful: usize,
    pub chains: usize,
}

pub fn window_counts(trace: &RunTrace) -> Result<WindowCounts> {
    let Some((k0, j1)) = trace.measured_window() else {
        return Ok(WindowCounts::default());
    };
    let (s, u) = count_iteration_sets(trace, k0, j1)?;
    let chains = if trace.entries.is_empty() {
        1
    } else {
        linked_sequences(trace, k0, j1)?.chain_count
    };
    Ok(WindowCounts {
        window: Some((k0, j1)),
        successful: s,
        unsuccessful: u,
        chains,
    })
}

/// Running maximum of `|mu_D - mu| / mu_D` over the iterations with
/// `mu_D > 0`.
pub fn empirical_c1(trace: &RunTrace) -> Option<f64> {
    trace
        .records
        .iter()
        .filter_map(|r| c1_ratio(r.mu?, r.mu_d?))
        .reduce(f64::max)
}

/// Whether `|mu_D - mu| <= C1 mu_D` can hold with a finite `C1` at every
/// recorded poll, i.e. `mu_D > 0` or `mu_D = mu = 0` throughout.
pub fn c1_assumption_holds(trace: &RunTrace) -> bool {
    trace.records.iter().all(|r| match (r.mu, r.mu_d) {
        (Some(m), Some(d)) => d > 0.0 || (d == 0.0 && m == 0.0),
        _ => true,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub seed: u64,
    pub k_epsilon: Option<usize>,
    pub iterations: usize,
    pub evaluations: u64,
    /// `1 + sum_k (|D_k| + |search_k|)`.
    pub evaluation_cap: u64,
    pub counts: WindowCounts,
    pub c1: Option<f64>,
    pub c1_assumption: bool,
    pub bound: Option<f64>,
    pub lemma_failures: usize,
}

impl ScalingRow {
    pub fn censored(&self) -> bool {
        self.k_epsilon.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub problem: String,
    pub solver: SolverKind,
    pub rows: Vec<ScalingRow>,
    /// `(epsilon, median k_eps over uncensored seeds)`.
    pub medians: Vec<(f64, Option<f64>)>,
    pub slope: Option<f64>,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
}

impl ScalingReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "epsilon",
            "seed",
            "censored",
            "k_epsilon",
            "iterations",
            "evaluations",
            "evaluation_cap",
            "k0",
            "j1",
            "successful",
            "unsuccessful",
            "chains",
            "c1",
            "c1_assumption",
            "bound",
            "lemma_failures",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.rows {
            let (k0, j1) = match r.counts.window {
                Some((a, b)) => (a.to_string(), b.to_string()),
                None => (String::new(), String::new()),
            };
            wtr.write_record([
                format!("{:e}", r.epsilon),
                r.seed.to_string(),
                r.censored().to_string(),
                r.k_epsilon.map(|k| k.to_string()).unwrap_or_default(),
                r.iterations.to_string(),
                r.evaluations.to_string(),
                r.evaluation_cap.to_string(),
                k0,
                j1,
                r.counts.successful.to_string(),
                r.counts.unsuccessful.to_string(),
                r.counts.chains.to_string(),
                opt(r.c1),
                r.c1_assumption.to_string(),
                opt(r.bound),
                r.lemma_failures.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem: {}", self.problem);
        let _ = writeln!(s, "solver: {}", self.solver.as_str());
        let _ = writeln!(s, "{:>10} {:>12} {:>10}", "epsilon", "median k", "censored");
        for (eps, med) in &self.medians {
            let censored = self.rows.iter().filter(|r| r.epsilon == *eps && r.censored()).count();
            let med = med.map(|m| format!("{m:.1}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(s, "{eps:>10.4} {med:>12} {censored:>10}");
        }
        match self.slope {
            Some(v) => {
                let _ = writeln!(s, "slope of median k_eps vs eps (log-log): {v:.4}");
            }
            None => {
                let _ = writeln!(s, "slope: not enough uncensored grid points");
            }
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    cfg.validate()?;
    let problem = by_name(&cfg.problem)?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let mut lemma_detail = Vec::new();
    for &eps in &cfg.epsilon_grid {
        for &seed in &cfg.seeds {
            let trace = run_single(cfg, &problem, seed, Some(eps))?;
            let lemmas = verify_lemmas(&trace, Some(&problem))?;
            let lemma_failures: usize = lemmas.checks.iter().map(|c| c.failures.len()).sum();
            if lemma_failures > 0 {
                let names: Vec<&str> = lemmas.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
                lemma_detail.push(format!("eps={eps} seed={seed}: {}", names.join(",")));
            }
            let k_epsilon = trace.k_epsilon();
            if k_epsilon.is_none() {
                warnings.push(format!(
                    "eps={eps} seed={seed}: stopped by {} before mu <= eps; excluded from the fit",
                    trace.stop.as_str()
                ));
            }
            let c1 = empirical_c1(&trace);
            let bound = match (cfg.solver, k_epsilon, c1, problem.f_bounds(), problem.lipschitz_max()) {
                (SolverKind::MinMax, _, Some(c1), Some((f_min, _)), Some(l)) => {
                    let f_x0 = fmax(
                        &trace
                            .records
                            .first()
                            .map(|r| r.center_value.clone())
                            .unwrap_or_default(),
                    );
                    Some(theorem3_bound(
                        &cfg.minmax_config(seed, Some(eps))?,
                        f_x0,
                        f_min,
                        l,
                        c1,
                        eps,
                    )?)
                }
                _ => None,
            };
            let cap = 1 + trace
                .records
                .iter()
                .map(|r| (r.poll_size + r.search_size) as u64)
                .sum::<u64>();
            rows.push(ScalingRow {
                epsilon: eps,
                seed,
                k_epsilon,
                iterations: trace.iterations(),
                evaluations: trace.evaluations,
                evaluation_cap: cap,
                counts: window_counts(&trace)?,
                c1,
                c1_assumption: c1_assumption_holds(&trace),
                bound,
                lemma_failures,
            });
        }
    }

    let medians: Vec<(f64, Option<f64>)> = cfg
        .epsilon_grid
        .iter()
        .map(|&eps| {
            let ks = rows
                .iter()
                .filter(|r| r.epsilon == eps)
                .filter_map(|r| r.k_epsilon.map(|k| k as f64))
                .collect();
            (eps, median(ks))
        })
        .collect();
    let points: Vec<(f64, f64)> = medians
        .iter()
        .filter_map(|(e, m)| m.map(|m| (e.ln(), m.max(1.0).ln())))
        .collect();
    let slope = if points.len() >= 4 { fit_slope(&points) } else { None };
    if slope.is_none() {
        warnings.push(format!("only {} uncensored grid points; slope needs 4", points.len()));
    }

    let mut checks = Vec::new();
    if cfg.wants("lemmas") {
        checks.push(CheckResult {
            name: "lemmas".into(),
            passed: lemma_detail.is_empty(),
            detail: if lemma_detail.is_empty() {
                format!("{} runs clean", rows.len())
            } else {
                lemma_detail.join("; ")
            },
        });
    }
    if cfg.wants("slope") {
        checks.push(CheckResult {
            name: "slope".into(),
            passed: slope.is_some_and(|s| s >= cfg.slope_threshold),
            detail: match slope {
                Some(s) => format!("{s:.4} vs threshold {}", cfg.slope_threshold),
                None => "not computable".into(),
            },
        });
    }
    if cfg.wants("theorem3") && cfg.solver == SolverKind::MinMax {
        // censored runs only give the lower bound k_eps >= iterations, and
        // when some poll had mu_D <= 0 the constant C1 is unbounded
        let compared: Vec<&ScalingRow> = rows.iter().filter(|r| r.bound.is_some() && !r.censored()).collect();
        let mut bad: Vec<String> = compared
            .iter()
            .filter(|r| r.k_epsilon.unwrap() as f64 > r.bound.unwrap())
            .map(|r| format!("eps={} seed={}", r.epsilon, r.seed))
            .collect();
        bad.extend(
            rows.iter()
                .filter(|r| r.censored() && r.c1_assumption && r.bound.is_some_and(|b| r.iterations as f64 > b))
                .map(|r| format!("eps={} seed={} (censored)", r.epsilon, r.seed)),
        );
        let holding = compared.iter().filter(|r| r.c1_assumption).count();
        let vacuous = rows.iter().filter(|r| r.censored() && !r.c1_assumption).count();
        checks.push(CheckResult {
            name: "theorem3".into(),
            passed: bad.is_empty() && !compared.is_empty(),
            detail: if bad.is_empty() {
                format!(
                    "{} runs within the bound ({} with mu_D > 0 at every poll), {} censored runs with unbounded C1",
                    compared.len(),
                    holding,
                    vacuous
                )
            } else {
                format!("bound exceeded at {}", bad.join("; "))
            },
        });
    }
    if cfg.wants("evaluations") {
        let bad = rows.iter().filter(|r| r.evaluations > r.evaluation_cap).count();
        checks.push(CheckResult {
            name: "evaluations".into(),
            passed: bad == 0,
            detail: format!("{bad} runs over 1 + sum |D_k|"),
        });
    }
    if rows.iter().all(|r| r.censored()) {
        return Err(Error::Domain("every run was censored".into()));
    }
    Ok(ScalingReport {
        problem: problem.name().to_string(),
        solver: cfg.solver,
        rows,
        medians,
        slope,
        checks,
        warnings,
    })
}
