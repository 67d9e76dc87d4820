//! Re-walks a finished trace and checks every per-iteration inequality.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::criticality::mu_d;
use crate::directions::set_from_tag;
use crate::dms::{fmax, minmax_margin};
use crate::dominance::{dominates, Origin};
use crate::error::Result;
use crate::minmax::omega;
use crate::objective::MultiObjective;
use crate::trace::{RunTrace, SolverKind, Status};

const MU_TOL: f64 = 1e-10;
const HI_TOL: f64 = 1e-12;
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub checked: usize,
    /// Iteration indices (or entry ids for `stepsize` on DMS) that failed.
    pub failures: Vec<usize>,
}

impl LemmaCheck {
    fn new(name: &'static str) -> Self {
        LemmaCheck {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, at: usize, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(at);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
    /// Some check could not run for lack of data.
    pub partial: bool,
    pub notes: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<12} {:>8} {:>8}  status", "check", "checked", "failed");
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "FAIL" };
            let _ = writeln!(s, "{:<12} {:>8} {:>8}  {status}", c.name, c.checked, c.failures.len());
            if !c.passed() {
                let shown: Vec<String> = c.failures.iter().take(10).map(|k| k.to_string()).collect();
                let _ = writeln!(s, "  first failures at: {}", shown.join(", "));
            }
        }
        if self.partial {
            let _ = writeln!(s, "partial report");
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "pass" } else { "FAIL" });
        s
    }
}

/// Checks a trace against the solver invariants. With `problem` the poll
/// measure `mu_D` is recomputed from the Jacobian and the recorded direction
/// tag; otherwise the recorded column is used.
pub fn verify_lemmas(trace: &RunTrace, problem: Option<&dyn MultiObjective>) -> Result<LemmaReport> {
    let mut report = LemmaReport::default();
    let meta = &trace.meta;
    let lip = meta.lipschitz_max.or_else(|| problem.and_then(|p| p.lipschitz_max()));
    let n = meta.n;

    let poll_measure = |k: usize| -> Result<Option<f64>> {
        let r = &trace.records[k];
        if r.directions.is_empty() {
            return Ok(None);
        }
        if let Some(p) = problem {
            if let Some(j) = p.jacobian(&r.center) {
                return mu_d(&j, &set_from_tag(&r.directions, n)?).map(Some);
            }
        }
        Ok(r.mu_d)
    };

    // rho recomputed from alpha, independent of the recorded column
    let rho = |alpha: f64| -> Result<f64> {
        match meta.solver {
            SolverKind::Dms => meta
                .forcing
                .ok_or_else(|| crate::Error::Trace("trace has no forcing function".into()))?
                .eval(alpha),
            _ => Ok(minmax_margin(meta.decrease_c.unwrap_or(f64::NAN), alpha)),
        }
    };

    // poll-measure bound at unsuccessful iterations
    let name = if meta.solver == SolverKind::MinMax {
        "unsucc"
    } else {
        "mustep"
    };
    let mut check = LemmaCheck::new(name);
    match lip {
        Some(l) => {
            for (k, r) in trace.records.iter().enumerate() {
                if r.status != Status::Unsuccessful {
                    continue;
                }
                match poll_measure(k)? {
                    Some(md) => {
                        let bound = if meta.solver == SolverKind::MinMax {
                            0.5 * (l + meta.decrease_c.unwrap_or(f64::NAN)) * r.alpha
                        } else {
                            0.5 * l * r.alpha + rho(r.alpha)? / r.alpha
                        };
                        check.record(r.k, md <= bound + MU_TOL);
                    }
                    None => report.partial = true,
                }
            }
        }
        None => {
            report.partial = true;
            report
                .notes
                .push("no Lipschitz constant; poll-measure bound skipped".into());
        }
    }
    report.checks.push(check);

    if meta.solver == SolverKind::Dms {
        let mut check = LemmaCheck::new("hi-increase");
        for r in trace.records.iter().filter(|r| r.status.is_success()) {
            match (r.hi_before, r.hi_after) {
                (Some(b), Some(a)) => {
                    let need = rho(r.alpha)?.powi(meta.m as i32);
                    check.record(r.k, a - b >= need - HI_TOL);
                }
                _ => report.partial = true,
            }
        }
        report.checks.push(check);
    }

    if meta.solver == SolverKind::MinMax {
        let c = meta.decrease_c.unwrap_or(f64::NAN);
        let mut mono = LemmaCheck::new("monotone");
        for w in trace.records.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let (fa, fb) = (fmax(&a.center_value), fmax(&b.center_value));
            let ok = if a.status.is_success() {
                fb < fa - minmax_margin(c, a.alpha)
            } else {
                fb == fa && a.center == b.center
            };
            mono.record(a.k, ok);
        }
        report.checks.push(mono);

        let mut om = LemmaCheck::new("omega");
        match (meta.f_min, trace.records.first()) {
            (Some(f_min), Some(first)) => {
                let bound = omega(&meta.step, c, fmax(&first.center_value), f_min)?;
                let mut sum = 0.0;
                for r in &trace.records {
                    sum += r.alpha * r.alpha;
                    om.record(r.k, sum <= bound * (1.0 + REL_TOL));
                }
            }
            (None, _) => report.notes.push("no declared F^min; summability skipped".into()),
            _ => {}
        }
        report.checks.push(om);
    }

    report.checks.push(stepsize_check(trace));
    if meta.solver != SolverKind::MinMax {
        if trace.entries.is_empty() {
            report.partial = true;
            report.notes.push("no archive log; archive checks skipped".into());
        } else {
            report.checks.push(archive_check(trace)?);
        }
    }

    let mut ev = LemmaCheck::new("evaluations");
    for r in &trace.records {
        ev.record(r.k, r.evaluations as usize <= r.poll_size + r.search_size);
    }
    report.checks.push(ev);
    Ok(report)
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo * (1.0 - REL_TOL) && v <= hi * (1.0 + REL_TOL)
}

/// Consecutive stepsizes along every generation link (or along the single
/// iterate of a min-max trace).
fn stepsize_check(trace: &RunTrace) -> LemmaCheck {
    let step = &trace.meta.step;
    let (b1, b2, g) = (step.beta1(), step.beta2(), step.gamma());
    let mut check = LemmaCheck::new("stepsize");
    if trace.meta.solver == SolverKind::MinMax || trace.entries.is_empty() {
        for w in trace.records.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let ok = if a.status.is_success() {
                within(b.alpha, a.alpha, g * a.alpha)
            } else {
                within(b.alpha, b1 * a.alpha, b2 * a.alpha)
            };
            check.record(a.k, ok);
        }
        return check;
    }
    let by_id: BTreeMap<u64, f64> = trace.entries.iter().map(|e| (e.id, e.stepsize)).collect();
    for e in &trace.entries {
        let Some(pa) = e.parent_id.and_then(|p| by_id.get(&p).copied()) else {
            continue;
        };
        let ok = match e.origin {
            Origin::Contraction => within(e.stepsize, b1 * pa, b2 * pa),
            _ => within(e.stepsize, pa, g * pa),
        };
        check.record(e.id as usize, ok);
    }
    check
}

/// Success iff the point set changed, and mutual nondominance after every
/// iteration.
fn archive_check(trace: &RunTrace) -> Result<LemmaCheck> {
    let mut check = LemmaCheck::new("archive");
    let mut born: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut died: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in trace.entries.iter().enumerate() {
        born.entry(e.created_at).or_default().push(i);
        if let Some(d) = e.retired_at {
            died.entry(d).or_default().push(i);
        }
    }
    let mut live: BTreeMap<u64, usize> = BTreeMap::new();
    for &i in born.get(&0).into_iter().flatten() {
        live.insert(trace.entries[i].id, i);
    }
    let empty = Vec::new();
    for r in &trace.records {
        let b = born.get(&(r.k + 1)).unwrap_or(&empty);
        let d = died.get(&(r.k + 1)).unwrap_or(&empty);
        let ok = if r.status == Status::Unsuccessful {
            b.len() == 1
                && d.len() == 1
                && trace.entries[d[0]].id == r.iterate_id
                && trace.entries[b[0]].origin == Origin::Contraction
                && trace.entries[b[0]].point == r.center
        } else {
            b.iter()
                .any(|&i| matches!(trace.entries[i].origin, Origin::Poll | Origin::Search))
        };
        for &i in d {
            live.remove(&trace.entries[i].id);
        }
        for &i in b {
            live.insert(trace.entries[i].id, i);
        }
        let mut nondominated = live.len() == r.archive_size;
        for &i in b {
            let v = &trace.entries[i].value;
            for &j in live.values() {
                let w = &trace.entries[j].value;
                nondominated &= !dominates(v, w)? && !dominates(w, v)?;
            }
        }
        check.record(r.k, ok && nondominated);
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::DirectionFamily;
    use crate::dms::{dms_run, DmsConfig};
    use crate::minmax::{minmax_run, MinMaxConfig};
    use crate::problems::dennis_woods_bi;

    #[test]
    fn clean_traces_pass() {
        let p = dennis_woods_bi();
        let cfg = MinMaxConfig {
            directions: DirectionFamily::Rotated { level: 2 },
            max_iterations: 500,
            ..MinMaxConfig::default()
        };
        let t = minmax_run(&p, &[2.0, 3.0], &cfg).unwrap();
        let rep = verify_lemmas(&t, Some(&p)).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
        assert!(!rep.partial);
        assert!(rep.get("omega").unwrap().checked > 0);

        let t = dms_run(
            &p,
            &[2.0, 3.0],
            &DmsConfig {
                max_iterations: 300,
                ..DmsConfig::default()
            },
        )
        .unwrap();
        let rep = verify_lemmas(&t, Some(&p)).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
        for name in ["mustep", "hi-increase", "stepsize", "archive", "evaluations"] {
            assert!(rep.get(name).unwrap().checked > 0, "{name}");
        }
    }

    #[test]
    fn deflated_stepsize_fails_mustep_at_that_row() {
        let p = dennis_woods_bi();
        let cfg = DmsConfig {
            directions: DirectionFamily::Rotated { level: 2 },
            max_iterations: 200,
            ..DmsConfig::default()
        };
        let mut t = dms_run(&p, &[2.0, 3.0], &cfg).unwrap();
        let k = t
            .records
            .iter()
            .position(|r| r.status == Status::Unsuccessful && r.mu_d.unwrap() > 0.0)
            .unwrap();
        t.records[k].alpha *= 1e-3;
        let rep = verify_lemmas(&t, Some(&p)).unwrap();
        assert_eq!(rep.get("mustep").unwrap().failures, vec![k]);
    }

    #[test]
    fn corrupted_archive_log_is_caught() {
        let p = dennis_woods_bi();
        let mut t = dms_run(
            &p,
            &[2.0, 3.0],
            &DmsConfig {
                max_iterations: 100,
                ..DmsConfig::default()
            },
        )
        .unwrap();
        let k = t.records.iter().position(|r| r.status == Status::Unsuccessful).unwrap();
        t.records[k].status = Status::SuccessfulPoll;
        let rep = verify_lemmas(&t, Some(&p)).unwrap();
        assert!(rep.get("archive").unwrap().failures.contains(&k));
    }

    #[test]
    fn missing_gradients_give_partial_report() {
        let p = dennis_woods_bi();
        let cfg = MinMaxConfig {
            track_criticality: false,
            max_iterations: 50,
            ..MinMaxConfig::default()
        };
        let t = minmax_run(&p, &[2.0, 3.0], &cfg).unwrap();
        let rep = verify_lemmas(&t, None).unwrap();
        assert!(rep.partial);
        let rep = verify_lemmas(&t, Some(&p)).unwrap();
        assert!(!rep.partial && rep.passed());
    }
}
