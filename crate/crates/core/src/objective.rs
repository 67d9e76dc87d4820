//! Points, objective vectors, the vector-objective interface and the
//! parameters shared by both solvers.

use std::ops::Deref;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major Jacobian: row `i` holds the gradient of component `i`.
pub type Jacobian = Vec<Vec<f64>>;

/// A decision vector with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("point coordinate {v}")));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `self + step * dir`, rejecting non-finite results.
    pub fn offset(&self, step: f64, dir: &[f64]) -> Result<Point> {
        if dir.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dir.len(),
            });
        }
        Point::new(self.0.iter().zip(dir).map(|(x, d)| x + step * d).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Objective vector `(f_1, ..., f_m)`. Entries are finite or `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue(Vec<f64>);

impl ObjectiveValue {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain(format!(
                "objective vectors need at least 2 components, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.is_nan() || **v == f64::NEG_INFINITY) {
            return Err(Error::NonFinite(format!("objective component {v}")));
        }
        Ok(ObjectiveValue(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// False when some component is `+inf`, i.e. the point is inadmissible.
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ObjectiveValue {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A vector function `F: R^n -> (R ∪ {+inf})^m`.
///
/// Only `eval` is consumed by the solvers. The Jacobian and the constants are
/// measurement instrumentation used to compute criticality and to check the
/// complexity inequalities.
pub trait MultiObjective: Send + Sync {
    fn dim(&self) -> usize;

    fn num_objectives(&self) -> usize;

    fn eval(&self, x: &[f64]) -> Vec<f64>;

    fn jacobian(&self, _x: &[f64]) -> Option<Jacobian> {
        None
    }

    /// Largest Lipschitz constant of the component gradients.
    fn lipschitz_max(&self) -> Option<f64> {
        None
    }

    /// `(F^min, F^max)`: a lower bound of every component and an upper bound
    /// of every component on the region the solvers explore.
    fn f_bounds(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<T: MultiObjective + ?Sized> MultiObjective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn num_objectives(&self) -> usize {
        (**self).num_objectives()
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        (**self).eval(x)
    }
    fn jacobian(&self, x: &[f64]) -> Option<Jacobian> {
        (**self).jacobian(x)
    }
    fn lipschitz_max(&self) -> Option<f64> {
        (**self).lipschitz_max()
    }
    fn f_bounds(&self) -> Option<(f64, f64)> {
        (**self).f_bounds()
    }
}

/// Wraps an objective and counts vector evaluations (one per `F(x)`).
pub struct CountingObjective<O> {
    inner: O,
    count: AtomicU64,
}

impl<O: MultiObjective> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        CountingObjective {
            inner,
            count: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn evaluations(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn evaluate(&self, x: &Point) -> Result<ObjectiveValue> {
        if x.dim() != self.inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.inner.dim(),
                got: x.dim(),
            });
        }
        self.count.fetch_add(1, Ordering::Relaxed);
        let values = self.inner.eval(x);
        if values.len() != self.inner.num_objectives() {
            return Err(Error::DimensionMismatch {
                expected: self.inner.num_objectives(),
                got: values.len(),
            });
        }
        ObjectiveValue::new(values)
    }
}

/// Central finite-difference Jacobian with step `h`.
pub fn finite_difference_jacobian<O: MultiObjective + ?Sized>(obj: &O, x: &[f64], h: f64) -> Jacobian {
    let n = x.len();
    let m = obj.num_objectives();
    let mut jac = vec![vec![0.0; n]; m];
    let mut probe = x.to_vec();
    for j in 0..n {
        probe[j] = x[j] + h;
        let plus = obj.eval(&probe);
        probe[j] = x[j] - h;
        let minus = obj.eval(&probe);
        probe[j] = x[j];
        for i in 0..m {
            jac[i][j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    jac
}

/// Largest relative disagreement between the analytic Jacobian and central
/// differences at `x`, scaled by `max(1, |J_ij|)`. `None` without a Jacobian.
pub fn jacobian_mismatch<O: MultiObjective + ?Sized>(obj: &O, x: &[f64]) -> Option<f64> {
    let analytic = obj.jacobian(x)?;
    let fd = finite_difference_jacobian(obj, x, 1e-6);
    let worst = analytic
        .iter()
        .flatten()
        .zip(fd.iter().flatten())
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max);
    Some(worst)
}

/// Forcing function `rho(t) = c * t^p` with `c > 0`, `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingFunction {
    c: f64,
    p: f64,
}

impl ForcingFunction {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Config(format!("forcing constant c must be > 0, got {c}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Config(format!("forcing exponent p must be > 1, got {p}")));
        }
        Ok(ForcingFunction { c, p })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("forcing function needs t > 0, got {t}")));
        }
        Ok(self.c * t.powf(self.p))
    }
}

impl Default for ForcingFunction {
    fn default() -> Self {
        ForcingFunction { c: 1.0, p: 2.0 }
    }
}

/// Initial stepsize and the contraction/expansion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    alpha0: f64,
    beta1: f64,
    beta2: f64,
    gamma: f64,
}

impl StepParams {
    pub fn new(alpha0: f64, beta1: f64, beta2: f64, gamma: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(Error::Config(format!("alpha0 must be > 0, got {alpha0}")));
        }
        if !(0.0 < beta1 && beta1 <= beta2 && beta2 < 1.0) {
            return Err(Error::Config(format!(
                "need 0 < beta1 <= beta2 < 1, got beta1={beta1}, beta2={beta2}"
            )));
        }
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be >= 1, got {gamma}")));
        }
        Ok(StepParams {
            alpha0,
            beta1,
            beta2,
            gamma,
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }
    pub fn beta1(&self) -> f64 {
        self.beta1
    }
    pub fn beta2(&self) -> f64 {
        self.beta2
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Stepsize after a successful iteration (`gamma * alpha`).
    pub fn expand(&self, alpha: f64) -> f64 {
        self.gamma * alpha
    }

    /// Stepsize after an unsuccessful iteration (`beta2 * alpha`).
    pub fn contract(&self, alpha: f64) -> f64 {
        self.beta2 * alpha
    }
}

impl Default for StepParams {
    fn default() -> Self {
        StepParams {
            alpha0: 1.0,
            beta1: 0.5,
            beta2: 0.5,
            gamma: 1.0,
        }
    }
}
