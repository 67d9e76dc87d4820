//! Direct multisearch with sufficient decrease.
//!
//! Each iteration picks a pair `(x; alpha)` from the archive, optionally runs
//! a search step, then polls `x + alpha d` for `d` in the current positive
//! spanning set. A trial point enters the archive iff its value clears the
//! margin `rho(alpha)` around the dominated region of the archive.

use std::collections::BTreeMap;

use crate::criticality::{mu, mu_d};
use crate::directions::{DirectionChoice, DirectionFamily, DirectionSchedule};
use crate::dominance::{InsertOutcome, Origin, ParetoArchive, ParetoEntry, Selection, Selector};
use crate::error::{Error, Result};
use crate::hypervolume::{ReferencePoint, MAX_OBJECTIVES};
use crate::objective::{CountingObjective, ForcingFunction, MultiObjective, Point, StepParams};
use crate::trace::{EntryLog, IterationRecord, RunTrace, SolverKind, Status, StopReason, TraceMeta};

pub use crate::trace::{count_iteration_sets, linked_sequences, LinkedSequenceStats};

/// `max_i v_i`.
pub fn fmax(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// The min-max sufficient decrease `(c/2) alpha^2`.
pub fn minmax_margin(c: f64, alpha: f64) -> f64 {
    0.5 * c * alpha * alpha
}

/// Rule deciding which trial points replace archive content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Acceptance {
    /// Keep every trial value outside `D(L_k; rho(alpha_k))`.
    Pareto,
    /// Keep one trial point with `fmax(y) < fmax(x_k) - (c/2) alpha_k^2` and
    /// drop everything else. With this rule the archive stays a singleton.
    MinMax { c: f64, best_improving: bool },
}

impl Acceptance {
    pub fn margin(&self, alpha: f64, forcing: &ForcingFunction) -> Result<f64> {
        match *self {
            Acceptance::Pareto => forcing.eval(alpha),
            Acceptance::MinMax { c, .. } => Ok(minmax_margin(c, alpha)),
        }
    }

    fn apply(
        &self,
        archive: &mut ParetoArchive,
        center: &ParetoEntry,
        candidates: Vec<ParetoEntry>,
        margin: f64,
    ) -> Result<InsertOutcome> {
        match *self {
            Acceptance::Pareto => archive.filter_insert(candidates, margin),
            Acceptance::MinMax { best_improving, .. } => {
                let threshold = fmax(&center.value) - margin;
                let mut pick: Option<ParetoEntry> = None;
                for cand in candidates {
                    let f = fmax(&cand.value);
                    if f < threshold && pick.as_ref().is_none_or(|p| f < fmax(&p.value)) {
                        pick = Some(cand);
                        if !best_improving {
                            break;
                        }
                    }
                }
                Ok(match pick {
                    Some(p) => {
                        let id = p.id;
                        InsertOutcome {
                            changed: true,
                            accepted: vec![id],
                            evicted: archive.reset_to(p),
                        }
                    }
                    None => InsertOutcome::default(),
                })
            }
        }
    }
}

/// How the hypervolume reference point is chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ReferenceChoice {
    /// Componentwise max of every finite value evaluated in the run plus
    /// `max(1, max rho)`. When the problem declares an upper bound `F^max`
    /// each component is at least `F^max`.
    #[default]
    Auto,
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmsConfig {
    pub step: StepParams,
    pub forcing: ForcingFunction,
    pub directions: DirectionFamily,
    pub direction_choice: DirectionChoice,
    /// Move to the next rotation level after this many consecutive
    /// unsuccessful iterations (two dimensions only).
    pub escalate_after: Option<usize>,
    pub selection: Selection,
    pub acceptance: Acceptance,
    /// Stop polling at the first trial point that changes the archive.
    pub opportunistic: bool,
    pub max_iterations: usize,
    pub alpha_min: f64,
    pub track_criticality: bool,
    pub epsilon: Option<f64>,
    pub reference: ReferenceChoice,
    /// Fill `hi_before`/`hi_after` after the run (needs `m <= 4`).
    pub compute_hypervolume: bool,
}

impl Default for DmsConfig {
    fn default() -> Self {
        DmsConfig {
            step: StepParams::default(),
            forcing: ForcingFunction::default(),
            directions: DirectionFamily::Coordinate,
            direction_choice: DirectionChoice::Cycle,
            escalate_after: None,
            selection: Selection::LargestStepsize,
            acceptance: Acceptance::Pareto,
            opportunistic: false,
            max_iterations: 1000,
            alpha_min: 1e-9,
            track_criticality: true,
            epsilon: None,
            reference: ReferenceChoice::Auto,
            compute_hypervolume: true,
        }
    }
}

impl DmsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if !(self.alpha_min > 0.0 && self.alpha_min < self.step.alpha0()) {
            return Err(Error::Config(format!(
                "alpha_min must lie in (0, alpha0), got {}",
                self.alpha_min
            )));
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(Error::Config(format!("epsilon must be > 0, got {eps}")));
            }
        }
        if let Acceptance::MinMax { c, .. } = self.acceptance {
            if !(c > 0.0) {
                return Err(Error::Config(format!("c must be > 0, got {c}")));
            }
        }
        Ok(())
    }
}

/// Supplies extra trial points before the poll step.
pub trait SearchStep {
    fn candidates(&mut self, archive: &ParetoArchive, alpha: f64) -> Vec<Vec<f64>>;
}

impl<F> SearchStep for F
where
    F: FnMut(&ParetoArchive, f64) -> Vec<Vec<f64>>,
{
    fn candidates(&mut self, archive: &ParetoArchive, alpha: f64) -> Vec<Vec<f64>> {
        self(archive, alpha)
    }
}

/// Runs DMS with no search step.
pub fn dms_run<O: MultiObjective>(obj: &O, x0: &[f64], cfg: &DmsConfig) -> Result<RunTrace> {
    DmsSolver::new(cfg.clone()).run(obj, x0)
}

pub struct DmsSolver<'a> {
    cfg: DmsConfig,
    label: String,
    search: Option<Box<dyn SearchStep + 'a>>,
}

impl<'a> DmsSolver<'a> {
    pub fn new(cfg: DmsConfig) -> Self {
        DmsSolver {
            cfg,
            label: "custom".into(),
            search: None,
        }
    }

    /// Problem name written into the trace header.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_search(mut self, search: impl SearchStep + 'a) -> Self {
        self.search = Some(Box::new(search));
        self
    }

    pub fn run<O: MultiObjective>(mut self, obj: &O, x0: &[f64]) -> Result<RunTrace> {
        let cfg = self.cfg.clone();
        cfg.validate()?;
        let n = obj.dim();
        let m = obj.num_objectives();
        if x0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x0.len(),
            });
        }
        let counted = CountingObjective::new(obj);
        let x0p = Point::new(x0.to_vec())?;
        let v0 = counted.evaluate(&x0p)?;
        if !v0.is_finite() {
            return Err(Error::Domain("every component of F(x0) must be finite".into()));
        }
        let mut schedule = DirectionSchedule::new(n, cfg.directions, cfg.direction_choice, cfg.escalate_after)?;
        let mut selector = Selector::new(cfg.selection);

        let mut envelope = v0.to_vec();
        let mut max_rho: f64 = 0.0;
        let mut logs: BTreeMap<u64, EntryLog> = BTreeMap::new();
        let e0 = ParetoEntry::new(0, x0p, v0, cfg.step.alpha0(), None, 0, Origin::Initial)?;
        log_entry(&mut logs, &e0);
        let mut next_id = 1u64;
        let mut archive = ParetoArchive::singleton(e0);
        let mut records = Vec::new();
        let mut stop = StopReason::MaxIterations;
        let mut final_mu = None;

        for k in 0..cfg.max_iterations {
            let center = selector.select(&archive)?.clone();
            let grads = if cfg.track_criticality {
                obj.jacobian(&center.point)
            } else {
                None
            };
            let mu_k = grads.as_ref().map(|g| mu(g).map(|r| r.mu)).transpose()?;
            if let (Some(eps), Some(v)) = (cfg.epsilon, mu_k) {
                if v <= eps {
                    stop = StopReason::Criticality;
                    final_mu = mu_k;
                    break;
                }
            }
            let alpha = center.stepsize;
            if alpha < cfg.alpha_min {
                stop = StopReason::AlphaMin;
                final_mu = mu_k;
                break;
            }
            let rho = cfg.acceptance.margin(alpha, &cfg.forcing)?;
            max_rho = max_rho.max(rho);
            let alpha_success = cfg.step.expand(alpha);
            let evals_before = counted.evaluations();

            let mut trial = |x: Vec<f64>, origin: Origin, next_id: &mut u64| -> Result<Option<ParetoEntry>> {
                let p = Point::new(x)?;
                let v = counted.evaluate(&p)?;
                if !v.is_finite() {
                    return Ok(None);
                }
                for (e, f) in envelope.iter_mut().zip(v.iter()) {
                    *e = e.max(*f);
                }
                let id = *next_id;
                *next_id += 1;
                ParetoEntry::new(id, p, v, alpha_success, Some(center.id), k + 1, origin).map(Some)
            };

            let mut status = Status::Unsuccessful;
            let mut outcome = InsertOutcome::default();
            let mut search_size = 0;
            if let Some(search) = self.search.as_mut() {
                let pts = search.candidates(&archive, alpha);
                search_size = pts.len();
                let mut cands = Vec::with_capacity(pts.len());
                for x in pts {
                    if x.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: x.len(),
                        });
                    }
                    if let Some(c) = trial(x, Origin::Search, &mut next_id)? {
                        cands.push(c);
                    }
                }
                let out = cfg.acceptance.apply(&mut archive, &center, cands, rho)?;
                if out.changed {
                    status = Status::SuccessfulSearch;
                    outcome = out;
                }
            }

            let mut poll_size = 0;
            let mut tag = String::new();
            let mut mu_dk = None;
            if status == Status::Unsuccessful {
                let tagged = schedule.next_set()?;
                poll_size = tagged.set.len();
                if let Some(g) = &grads {
                    mu_dk = Some(mu_d(g, &tagged.set)?);
                }
                if cfg.opportunistic {
                    for d in tagged.set.iter() {
                        let y = center.point.offset(alpha, d)?.into_inner();
                        if let Some(c) = trial(y, Origin::Poll, &mut next_id)? {
                            let out = cfg.acceptance.apply(&mut archive, &center, vec![c], rho)?;
                            if out.changed {
                                outcome = out;
                                break;
                            }
                        }
                    }
                } else {
                    let mut cands = Vec::with_capacity(poll_size);
                    for d in tagged.set.iter() {
                        let y = center.point.offset(alpha, d)?.into_inner();
                        if let Some(c) = trial(y, Origin::Poll, &mut next_id)? {
                            cands.push(c);
                        }
                    }
                    outcome = cfg.acceptance.apply(&mut archive, &center, cands, rho)?;
                }
                if outcome.changed {
                    status = Status::SuccessfulPoll;
                }
                tag = tagged.tag;
            }
            schedule.record_outcome(status.is_success());

            if status.is_success() {
                for id in &outcome.evicted {
                    if let Some(l) = logs.get_mut(id) {
                        l.retired_at = Some(k + 1);
                    }
                }
                for id in &outcome.accepted {
                    let e = archive.get(*id).expect("accepted entry present");
                    log_entry(&mut logs, e);
                }
                if archive.contains(center.id) && alpha_success != alpha {
                    let child = center.with_stepsize(next_id, alpha_success, k + 1, Origin::Expansion);
                    next_id += 1;
                    retire_and_replace(&mut archive, &mut logs, &center, child, k + 1);
                }
            } else {
                let child = center.with_stepsize(next_id, cfg.step.contract(alpha), k + 1, Origin::Contraction);
                next_id += 1;
                retire_and_replace(&mut archive, &mut logs, &center, child, k + 1);
            }

            records.push(IterationRecord {
                k,
                status,
                iterate_id: center.id,
                center: center.point.to_vec(),
                center_value: center.value.to_vec(),
                alpha,
                rho,
                evaluations: counted.evaluations() - evals_before,
                poll_size,
                search_size,
                hi_before: None,
                hi_after: None,
                mu: mu_k,
                mu_d: mu_dk,
                archive_size: archive.len(),
                directions: tag,
                fx: None,
                sum_alpha_sq: None,
            });
        }

        let (solver, decrease_c) = match cfg.acceptance {
            Acceptance::Pareto => (SolverKind::Dms, None),
            Acceptance::MinMax { c, .. } => (SolverKind::DmsMinMax, Some(c)),
        };
        let mut trace = RunTrace {
            meta: TraceMeta {
                solver,
                problem: self.label.clone(),
                n,
                m,
                step: cfg.step,
                forcing: Some(cfg.forcing),
                decrease_c,
                lipschitz_max: obj.lipschitz_max(),
                f_min: obj.f_bounds().map(|b| b.0),
                reference: None,
                epsilon: cfg.epsilon,
                x0: x0.to_vec(),
            },
            records,
            entries: logs.into_values().collect(),
            evaluations: counted.evaluations(),
            stop,
            final_mu,
        };
        if cfg.compute_hypervolume && m <= MAX_OBJECTIVES {
            let reference = match &cfg.reference {
                ReferenceChoice::Fixed(r) => ReferencePoint::new(r.clone())?,
                ReferenceChoice::Auto => {
                    let margin = max_rho.max(1.0);
                    let floor = obj.f_bounds().map(|b| b.1).unwrap_or(f64::NEG_INFINITY);
                    ReferencePoint::new(envelope.iter().map(|e| (e + margin).max(floor)).collect())?
                }
            };
            trace.fill_hypervolume(&reference)?;
        }
        Ok(trace)
    }
}

fn log_entry(logs: &mut BTreeMap<u64, EntryLog>, e: &ParetoEntry) {
    logs.insert(
        e.id,
        EntryLog {
            id: e.id,
            parent_id: e.parent_id,
            created_at: e.created_at,
            retired_at: None,
            stepsize: e.stepsize,
            origin: e.origin,
            point: e.point.to_vec(),
            value: e.value.to_vec(),
        },
    );
}

fn retire_and_replace(
    archive: &mut ParetoArchive,
    logs: &mut BTreeMap<u64, EntryLog>,
    old: &ParetoEntry,
    child: ParetoEntry,
    at: usize,
) {
    if let Some(l) = logs.get_mut(&old.id) {
        l.retired_at = Some(at);
    }
    log_entry(logs, &child);
    archive.replace(old.id, child);
}
