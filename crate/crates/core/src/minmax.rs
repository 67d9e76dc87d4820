//! Min-max direct search: a single iterate, accepted only when
//! `f = max_i f_i` drops by at least `(c/2) alpha^2`.

use crate::criticality::{mu, mu_d};
use crate::directions::{DirectionChoice, DirectionFamily, DirectionSchedule};
use crate::error::{Error, Result};
use crate::objective::{CountingObjective, MultiObjective, Point, StepParams};
use crate::trace::{IterationRecord, RunTrace, SolverKind, Status, StopReason, TraceMeta};

pub use crate::dms::{fmax, minmax_margin};

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxConfig {
    pub step: StepParams,
    /// Sufficient-decrease constant.
    pub c: f64,
    pub directions: DirectionFamily,
    pub direction_choice: DirectionChoice,
    pub escalate_after: Option<usize>,
    /// Take the best improving poll point instead of the first.
    pub best_improving: bool,
    pub max_iterations: usize,
    pub alpha_min: f64,
    pub track_criticality: bool,
    pub epsilon: Option<f64>,
}

impl Default for MinMaxConfig {
    fn default() -> Self {
        MinMaxConfig {
            step: StepParams::default(),
            c: 1.0,
            directions: DirectionFamily::Coordinate,
            direction_choice: DirectionChoice::Cycle,
            escalate_after: None,
            best_improving: false,
            max_iterations: 1000,
            alpha_min: 1e-9,
            track_criticality: true,
            epsilon: None,
        }
    }
}

impl MinMaxConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("c must be > 0, got {}", self.c)));
        }
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
        Ok(())
    }
}

pub fn minmax_run<O: MultiObjective>(obj: &O, x0: &[f64], cfg: &MinMaxConfig) -> Result<RunTrace> {
    minmax_run_labeled(obj, x0, cfg, "custom")
}

pub fn minmax_run_labeled<O: MultiObjective>(obj: &O, x0: &[f64], cfg: &MinMaxConfig, label: &str) -> Result<RunTrace> {
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
    let mut x = Point::new(x0.to_vec())?;
    let mut fx_vec = counted.evaluate(&x)?;
    if !fx_vec.is_finite() {
        return Err(Error::Domain("every component of F(x0) must be finite".into()));
    }
    let mut schedule = DirectionSchedule::new(n, cfg.directions, cfg.direction_choice, cfg.escalate_after)?;
    let mut alpha = cfg.step.alpha0();
    let mut iterate_id = 0u64;
    let mut sum_sq = 0.0;
    let mut records = Vec::new();
    let mut stop = StopReason::MaxIterations;
    let mut final_mu = None;

    for k in 0..cfg.max_iterations {
        let grads = if cfg.track_criticality { obj.jacobian(&x) } else { None };
        let mu_k = grads.as_ref().map(|g| mu(g).map(|r| r.mu)).transpose()?;
        if let (Some(eps), Some(v)) = (cfg.epsilon, mu_k) {
            if v <= eps {
                stop = StopReason::Criticality;
                final_mu = mu_k;
                break;
            }
        }
        if alpha < cfg.alpha_min {
            stop = StopReason::AlphaMin;
            final_mu = mu_k;
            break;
        }
        let margin = minmax_margin(cfg.c, alpha);
        let fx = fmax(&fx_vec);
        let threshold = fx - margin;
        sum_sq += alpha * alpha;
        let evals_before = counted.evaluations();

        let tagged = schedule.next_set()?;
        let mu_dk = grads.as_ref().map(|g| mu_d(g, &tagged.set)).transpose()?;
        let mut best: Option<(Point, crate::objective::ObjectiveValue)> = None;
        for d in tagged.set.iter() {
            let y = x.offset(alpha, d)?;
            let fy = counted.evaluate(&y)?;
            let f = fmax(&fy);
            if f < threshold && best.as_ref().is_none_or(|(_, b)| f < fmax(b)) {
                best = Some((y, fy));
                if !cfg.best_improving {
                    break;
                }
            }
        }
        let status = if best.is_some() {
            Status::SuccessfulPoll
        } else {
            Status::Unsuccessful
        };
        schedule.record_outcome(best.is_some());

        records.push(IterationRecord {
            k,
            status,
            iterate_id,
            center: x.to_vec(),
            center_value: fx_vec.to_vec(),
            alpha,
            rho: margin,
            evaluations: counted.evaluations() - evals_before,
            poll_size: tagged.set.len(),
            search_size: 0,
            hi_before: None,
            hi_after: None,
            mu: mu_k,
            mu_d: mu_dk,
            archive_size: 1,
            directions: tagged.tag,
            fx: Some(fx),
            sum_alpha_sq: Some(sum_sq),
        });

        match best {
            Some((y, fy)) => {
                x = y;
                fx_vec = fy;
                iterate_id += 1;
                alpha = cfg.step.expand(alpha);
            }
            None => alpha = cfg.step.contract(alpha),
        }
    }

    Ok(RunTrace {
        meta: TraceMeta {
            solver: SolverKind::MinMax,
            problem: label.to_string(),
            n,
            m,
            step: cfg.step,
            forcing: None,
            decrease_c: Some(cfg.c),
            lipschitz_max: obj.lipschitz_max(),
            f_min: obj.f_bounds().map(|b| b.0),
            reference: None,
            epsilon: cfg.epsilon,
            x0: x0.to_vec(),
        },
        records,
        entries: Vec::new(),
        evaluations: counted.evaluations(),
        stop,
        final_mu,
    })
}

/// `gamma^2 / (1 - beta2^2) * (gamma^-2 alpha0^2 + (2/c)(f(x0) - F^min))`.
pub fn omega_bound(cfg: &MinMaxConfig, f_x0: f64, f_min: f64) -> Result<f64> {
    omega(&cfg.step, cfg.c, f_x0, f_min)
}

pub(crate) fn omega(step: &StepParams, c: f64, f_x0: f64, f_min: f64) -> Result<f64> {
    if !(f_x0 >= f_min) {
        return Err(Error::Domain(format!("f(x0) = {f_x0} is below F^min = {f_min}")));
    }
    let g2 = step.gamma() * step.gamma();
    let a0 = step.alpha0();
    Ok(g2 / (1.0 - step.beta2() * step.beta2()) * (a0 * a0 / g2 + 2.0 / c * (f_x0 - f_min)))
}

/// Upper bound on `k_epsilon`:
/// `2/(c alpha0^2) (f(x0) - F^min) + Omega (L + c)^2 (C1 + 1)^2 / (4 beta1^2) eps^-2`.
pub fn theorem3_bound(
    cfg: &MinMaxConfig,
    f_x0: f64,
    f_min: f64,
    lipschitz_max: f64,
    c1: f64,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(lipschitz_max > 0.0) || !(c1 >= 0.0) || !c1.is_finite() {
        return Err(Error::Domain("need L > 0 and finite C1 >= 0".into()));
    }
    let om = omega_bound(cfg, f_x0, f_min)?;
    let a0 = cfg.step.alpha0();
    let b1 = cfg.step.beta1();
    let first = 2.0 / (cfg.c * a0 * a0) * (f_x0 - f_min);
    let lc = lipschitz_max + cfg.c;
    Ok(first + om * lc * lc * (c1 + 1.0) * (c1 + 1.0) / (4.0 * b1 * b1) / (epsilon * epsilon))
}
