//! Positive spanning sets of unit directions and the per-iteration schedule
//! that picks `D_k`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;
const CONE_TOL: f64 = 1e-9;

/// A finite set of unit-norm directions whose nonnegative combinations span
/// `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSpanningSet {
    directions: Vec<Vec<f64>>,
}

impl PositiveSpanningSet {
    /// Validates unit norms and positive spanning.
    pub fn new(directions: Vec<Vec<f64>>) -> Result<Self> {
        let n = directions
            .first()
            .map(|d| d.len())
            .ok_or_else(|| Error::Config("empty direction set".into()))?;
        if n == 0 {
            return Err(Error::Config("directions must have dimension >= 1".into()));
        }
        for d in &directions {
            if d.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d.len(),
                });
            }
            let norm = norm(d);
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::Config(format!("direction {d:?} has norm {norm}, expected 1")));
            }
        }
        if !positively_spans(&directions) {
            return Err(Error::Config("directions do not positively span R^n".into()));
        }
        Ok(PositiveSpanningSet { directions })
    }

    /// Normalizes every direction first.
    pub fn normalized(directions: Vec<Vec<f64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(directions.len());
        for d in directions {
            let len = norm(&d);
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::Config("cannot normalize a zero direction".into()));
            }
            out.push(d.iter().map(|v| v / len).collect());
        }
        PositiveSpanningSet::new(out)
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<f64>> {
        self.directions.iter()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `D` positively spans `R^n` iff it spans `R^n` and every `-d_j` lies in the
/// cone generated by `D`. Cone membership is decided by nonnegative least
/// squares.
pub fn positively_spans(directions: &[Vec<f64>]) -> bool {
    let Some(n) = directions.first().map(|d| d.len()) else {
        return false;
    };
    let k = directions.len();
    if k < n + 1 {
        return false;
    }
    let a = DMatrix::from_fn(n, k, |i, j| directions[j][i]);
    if a.clone().svd(false, false).rank(1e-10) < n {
        return false;
    }
    directions.iter().all(|d| {
        let b = DVector::from_iterator(n, d.iter().map(|v| -v));
        let x = nnls(&a, &b);
        (&a * x - &b).norm() <= CONE_TOL
    })
}

/// Lawson–Hanson active-set solver for `min ||Ax - b||` subject to `x >= 0`.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = a.ncols();
    let mut x = DVector::zeros(k);
    let mut passive = vec![false; k];
    let tol = 1e-12 * (1.0 + a.amax() * b.amax());
    for _ in 0..(3 * k + 10) {
        let w = a.transpose() * (b - a * &x);
        let entering = (0..k)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = entering else { break };
        passive[j] = true;
        for _ in 0..(3 * k + 10) {
            let z = restricted_lstsq(a, b, &passive);
            if (0..k).filter(|&i| passive[i]).all(|i| z[i] > 0.0) {
                x = z;
                break;
            }
            let mut step = f64::INFINITY;
            for i in (0..k).filter(|&i| passive[i] && z[i] <= 0.0) {
                let denom = x[i] - z[i];
                if denom > 0.0 {
                    step = step.min(x[i] / denom);
                }
            }
            if !step.is_finite() {
                step = 0.0;
            }
            x = &x + (&z - &x) * step;
            for i in 0..k {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..a.ncols()).filter(|&j| passive[j]).collect();
    let mut z = DVector::zeros(a.ncols());
    if cols.is_empty() {
        return z;
    }
    let sub = a.select_columns(&cols);
    if let Ok(sol) = sub.svd(true, true).solve(b, 1e-12) {
        for (c, v) in cols.iter().zip(sol.iter()) {
            z[*c] = *v;
        }
    }
    z
}

/// `{e_1, ..., e_n, -e_1, ..., -e_n}`.
pub fn coordinate_set(n: usize) -> Result<PositiveSpanningSet> {
    if n < 1 {
        return Err(Error::Config("coordinate set needs n >= 1".into()));
    }
    let mut dirs = Vec::with_capacity(2 * n);
    for sign in [1.0, -1.0] {
        for i in 0..n {
            let mut d = vec![0.0; n];
            d[i] = sign;
            dirs.push(d);
        }
    }
    Ok(PositiveSpanningSet { directions: dirs })
}

/// The `i`-th member `R_i D` of the rotated family at `level` (two
/// dimensions only), rotating the coordinate set by `i * pi / 2^level`.
pub fn rotated_set(level: u32, index: usize) -> Result<PositiveSpanningSet> {
    if level < 1 {
        return Err(Error::Config("rotation level must be >= 1".into()));
    }
    let count = 1usize << (level - 1);
    if index >= count {
        return Err(Error::Config(format!(
            "rotation index {index} out of range for level {level}"
        )));
    }
    let theta = PI / (1u64 << level) as f64;
    let (s, c) = (index as f64 * theta).sin_cos();
    let base = coordinate_set(2)?;
    let directions = base
        .directions
        .iter()
        .map(|d| vec![c * d[0] - s * d[1], s * d[0] + c * d[1]])
        .collect();
    Ok(PositiveSpanningSet { directions })
}

/// The `2^(level-1)` rotated maximal positive bases of the plane.
pub fn rotated_family(level: u32) -> Result<Vec<PositiveSpanningSet>> {
    if level < 1 {
        return Err(Error::Config("rotation level must be >= 1".into()));
    }
    if level > 30 {
        return Err(Error::Config(format!("rotation level {level} is too large")));
    }
    (0..(1usize << (level - 1))).map(|i| rotated_set(level, i)).collect()
}

/// `count` uniform directions on the unit sphere; if they fail to positively
/// span, the normalized negative sample mean is appended.
pub fn random_dense_set(n: usize, count: usize, seed: u64) -> Result<PositiveSpanningSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_dense_from(&mut rng, n, count)
}

fn random_dense_from(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Result<PositiveSpanningSet> {
    if n < 1 {
        return Err(Error::Config("random directions need n >= 1".into()));
    }
    if count < n + 1 {
        return Err(Error::Config(format!(
            "a positive spanning set in R^{n} needs at least {} directions, got {count}",
            n + 1
        )));
    }
    loop {
        let mut dirs: Vec<Vec<f64>> = (0..count).map(|_| unit_sample(rng, n)).collect();
        if positively_spans(&dirs) {
            return Ok(PositiveSpanningSet { directions: dirs });
        }
        let mut mean = vec![0.0; n];
        for d in &dirs {
            for (m, v) in mean.iter_mut().zip(d) {
                *m -= v;
            }
        }
        let len = norm(&mean);
        if len > 1e-12 {
            dirs.push(mean.iter().map(|v| v / len).collect());
            if positively_spans(&dirs) {
                return Ok(PositiveSpanningSet { directions: dirs });
            }
        }
    }
}

fn unit_sample(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Largest angular gap between consecutive directions on the unit circle.
pub fn angular_gap_2d<'a, I>(directions: I) -> f64
where
    I: IntoIterator<Item = &'a Vec<f64>>,
{
    let mut angles: Vec<f64> = directions
        .into_iter()
        .map(|d| d[1].atan2(d[0]).rem_euclid(2.0 * PI))
        .collect();
    if angles.is_empty() {
        return 2.0 * PI;
    }
    angles.sort_by(f64::total_cmp);
    let mut gap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap
}

/// The set of positive spanning sets `𝒟` the solvers draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DirectionFamily {
    Coordinate,
    /// Two dimensions only.
    Rotated {
        level: u32,
    },
    /// A fresh random set per draw.
    Random {
        count: usize,
        seed: u64,
    },
}

impl DirectionFamily {
    /// Parses `coordinate`, `rotated:L` or `random:COUNT:SEED`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| -> Result<u64> {
            p.parse()
                .map_err(|_| Error::Config(format!("bad number '{p}' in direction family '{s}'")))
        };
        match parts.as_slice() {
            ["coordinate"] => Ok(DirectionFamily::Coordinate),
            ["rotated", l] => Ok(DirectionFamily::Rotated { level: num(l)? as u32 }),
            ["random", c, seed] => Ok(DirectionFamily::Random {
                count: num(c)? as usize,
                seed: num(seed)?,
            }),
            _ => Err(Error::Config(format!("unknown direction family '{s}'"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DirectionFamily::Coordinate => "coordinate".into(),
            DirectionFamily::Rotated { level } => format!("rotated:{level}"),
            DirectionFamily::Random { count, seed } => format!("random:{count}:{seed}"),
        }
    }
}

/// How `D_k` is chosen from a finite family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DirectionChoice {
    #[default]
    Cycle,
    Random {
        seed: u64,
    },
}

/// A poll set together with a tag from which it can be rebuilt.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedSet {
    pub tag: String,
    pub set: PositiveSpanningSet,
}

/// Rebuilds a set from the tag written into a trace.
pub fn set_from_tag(tag: &str, n: usize) -> Result<PositiveSpanningSet> {
    let parts: Vec<&str> = tag.split(':').collect();
    let num = |p: &str| -> Result<u64> {
        p.parse()
            .map_err(|_| Error::Trace(format!("bad direction tag '{tag}'")))
    };
    match parts.as_slice() {
        ["coordinate"] => coordinate_set(n),
        ["rotated", l, i] => rotated_set(num(l)? as u32, num(i)? as usize),
        ["random", c, seed, draw] => {
            let mut rng = ChaCha8Rng::seed_from_u64(num(seed)?);
            rng.set_stream(num(draw)?);
            random_dense_from(&mut rng, n, num(c)? as usize)
        }
        _ => Err(Error::Trace(format!("bad direction tag '{tag}'"))),
    }
}

/// Supplies `D_k` for each iteration: round-robin (or seeded random) over a
/// finite family, or a fresh random set per iteration. Optionally moves to
/// the next rotation level after a run of unsuccessful iterations.
#[derive(Debug, Clone)]
pub struct DirectionSchedule {
    n: usize,
    family: DirectionFamily,
    choice: DirectionChoice,
    escalate_after: Option<usize>,
    level: u32,
    counter: u64,
    failures: usize,
    rng: ChaCha8Rng,
}

impl DirectionSchedule {
    pub fn new(
        n: usize,
        family: DirectionFamily,
        choice: DirectionChoice,
        escalate_after: Option<usize>,
    ) -> Result<Self> {
        let level = match family {
            DirectionFamily::Coordinate => {
                coordinate_set(n)?;
                1
            }
            DirectionFamily::Rotated { level } => {
                if n != 2 {
                    return Err(Error::Config(format!("rotated directions need n = 2, got n = {n}")));
                }
                rotated_family(level)?;
                level
            }
            DirectionFamily::Random { count, seed } => {
                random_dense_set(n, count, seed)?;
                0
            }
        };
        if let Some(after) = escalate_after {
            if after == 0 {
                return Err(Error::Config("escalate_after must be >= 1".into()));
            }
            if n != 2 || matches!(family, DirectionFamily::Random { .. }) {
                return Err(Error::Config(
                    "escalation is only defined for coordinate/rotated sets in two dimensions".into(),
                ));
            }
        }
        let seed = match choice {
            DirectionChoice::Random { seed } => seed,
            DirectionChoice::Cycle => 0,
        };
        Ok(DirectionSchedule {
            n,
            family,
            choice,
            escalate_after,
            level,
            counter: 0,
            failures: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn family(&self) -> DirectionFamily {
        self.family
    }

    /// Current rotation level (1 for the plain coordinate set).
    pub fn level(&self) -> u32 {
        self.level
    }

    fn family_size(&self) -> usize {
        match self.family {
            DirectionFamily::Coordinate if self.level == 1 => 1,
            DirectionFamily::Random { .. } => 1,
            _ => 1usize << (self.level - 1),
        }
    }

    /// The poll set for the next iteration.
    pub fn next_set(&mut self) -> Result<TaggedSet> {
        let draw = self.counter;
        self.counter += 1;
        if let DirectionFamily::Random { count, seed } = self.family {
            let tag = format!("random:{count}:{seed}:{draw}");
            let set = set_from_tag(&tag, self.n)?;
            return Ok(TaggedSet { tag, set });
        }
        let size = self.family_size();
        let index = match self.choice {
            DirectionChoice::Cycle => (draw % size as u64) as usize,
            DirectionChoice::Random { .. } => self.rng.random_range(0..size),
        };
        let tag = if matches!(self.family, DirectionFamily::Coordinate) && self.level == 1 {
            "coordinate".to_string()
        } else {
            format!("rotated:{}:{index}", self.level)
        };
        let set = set_from_tag(&tag, self.n)?;
        Ok(TaggedSet { tag, set })
    }

    /// Feeds back the outcome of the iteration that used the last set.
    pub fn record_outcome(&mut self, success: bool) {
        if success {
            self.failures = 0;
            return;
        }
        self.failures += 1;
        if let Some(after) = self.escalate_after {
            if self.failures >= after && self.level < 30 {
                self.level += 1;
                self.failures = 0;
                self.counter = 0;
            }
        }
    }
}
