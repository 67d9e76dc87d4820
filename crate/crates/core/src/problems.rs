//! Smooth benchmark problems with closed-form Jacobians and known constants.
//!
//! Every problem here is a family of convex quadratics
//! `f_i(x) = 1/2 (x - a_i)^T H_i (x - a_i)`, so gradients, the Lipschitz
//! constant of the gradients and the Pareto set are all explicit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objective::{Jacobian, MultiObjective};

/// Half-width of the box `[-B, B]^n` used for the declared upper bound and
/// for Lipschitz sampling.
pub const TEST_BOX: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct Problem {
    name: String,
    n: usize,
    centers: Vec<DVector<f64>>,
    hessians: Vec<DMatrix<f64>>,
    lipschitz: f64,
    bounds: (f64, f64),
}

impl Problem {
    fn from_quadratics(name: String, centers: Vec<DVector<f64>>, hessians: Vec<DMatrix<f64>>) -> Self {
        let n = centers[0].len();
        let lipschitz = hessians
            .iter()
            .map(|h| {
                SymmetricEigen::new(h.clone())
                    .eigenvalues
                    .iter()
                    .fold(0.0_f64, |a, b| a.max(*b))
            })
            .fold(0.0, f64::max);
        let upper = centers
            .iter()
            .map(|a| 0.5 * lipschitz * a.iter().map(|v| (TEST_BOX + v.abs()).powi(2)).sum::<f64>())
            .fold(0.0, f64::max);
        Problem {
            name,
            n,
            centers,
            hessians,
            lipschitz,
            bounds: (0.0, upper),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The Pareto point minimizing `sum_i w_i f_i`, i.e.
    /// `(sum w_i H_i)^{-1} sum w_i H_i a_i`.
    pub fn pareto_point(&self, weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.centers.len() {
            return Err(Error::DimensionMismatch {
                expected: self.centers.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Domain("weights must lie on the simplex".into()));
        }
        let mut h = DMatrix::zeros(self.n, self.n);
        let mut rhs = DVector::zeros(self.n);
        for ((w, hi), ai) in weights.iter().zip(&self.hessians).zip(&self.centers) {
            h += hi * *w;
            rhs += hi * ai * *w;
        }
        let sol = h
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Domain("singular weighted Hessian".into()))?;
        Ok(sol.iter().copied().collect())
    }

    /// A Pareto point for weights drawn uniformly from the simplex.
    pub fn sample_pareto_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.centers.len())
            .map(|_| -rng.random::<f64>().max(1e-300).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|v| v / total).collect();
        self.pareto_point(&weights).expect("positive definite Hessians")
    }

    /// True when `x` is within `delta` of a point of the Pareto set. The
    /// witness is the Pareto point for the min-norm dual weights at `x`, so
    /// a `true` answer is always sound.
    pub fn is_near_pareto(&self, x: &[f64], delta: f64) -> Result<bool> {
        let jac = self.jacobian_rows(x);
        let report = crate::criticality::mu(&jac)?;
        let witness = self.pareto_point(&report.dual_weights)?;
        let dist = x.iter().zip(&witness).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        Ok(dist <= delta)
    }

    fn jacobian_rows(&self, x: &[f64]) -> Jacobian {
        let xv = DVector::from_column_slice(x);
        self.centers
            .iter()
            .zip(&self.hessians)
            .map(|(a, h)| (h * (&xv - a)).iter().copied().collect())
            .collect()
    }
}

impl MultiObjective for Problem {
    fn dim(&self) -> usize {
        self.n
    }

    fn num_objectives(&self) -> usize {
        self.centers.len()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let xv = DVector::from_column_slice(x);
        self.centers
            .iter()
            .zip(&self.hessians)
            .map(|(a, h)| {
                let r = &xv - a;
                0.5 * r.dot(&(h * &r))
            })
            .collect()
    }

    fn jacobian(&self, x: &[f64]) -> Option<Jacobian> {
        Some(self.jacobian_rows(x))
    }

    fn lipschitz_max(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn f_bounds(&self) -> Option<(f64, f64)> {
        Some(self.bounds)
    }
}

/// `F(x) = 1/2 (||x - c1||^2, ||x - c2||^2)` with `c1 = (-1, 1)`, `c2 = -c1`.
pub fn dennis_woods_bi() -> Problem {
    let c1 = DVector::from_vec(vec![-1.0, 1.0]);
    let c2 = -c1.clone();
    Problem::from_quadratics(
        "dennis_woods_bi".into(),
        vec![c1, c2],
        vec![DMatrix::identity(2, 2), DMatrix::identity(2, 2)],
    )
}

/// `f_i(x) = 1/2 ||x - e_i||^2` in `R^m`.
pub fn scaled_sphere(m: usize) -> Result<Problem> {
    if !(2..=4).contains(&m) {
        return Err(Error::Config(format!("scaled_sphere needs 2 <= m <= 4, got {m}")));
    }
    let centers = (0..m)
        .map(|i| {
            let mut e = DVector::zeros(m);
            e[i] = 1.0;
            e
        })
        .collect();
    Ok(Problem::from_quadratics(
        format!("scaled_sphere:{m}"),
        centers,
        vec![DMatrix::identity(m, m); m],
    ))
}

/// Random strongly convex quadratics in `R^3`: a pair for even seeds, a
/// triple for odd ones.
pub fn quadratic_family(seed: u64) -> Problem {
    let n = 3;
    let m = 2 + (seed % 2) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = Vec::with_capacity(m);
    let mut hessians = Vec::with_capacity(m);
    for _ in 0..m {
        centers.push(DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0)));
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let h = b.transpose() * &b / n as f64 + DMatrix::identity(n, n) * 0.5;
        hessians.push((&h + h.transpose()) * 0.5);
    }
    Problem::from_quadratics(format!("quadratic_family:{seed}"), centers, hessians)
}

/// Registry names accepted by [`by_name`].
pub fn registry() -> Vec<(&'static str, &'static str)> {
    vec![
        ("dennis_woods_bi", "biobjective Dennis-Woods variant, n = 2"),
        ("scaled_sphere:M", "f_i = 1/2 ||x - e_i||^2 in R^M, M in 2..=4"),
        (
            "quadratic_family:SEED",
            "random convex quadratics in R^3 (2 or 3 objectives)",
        ),
    ]
}

pub fn by_name(name: &str) -> Result<Problem> {
    let name = name.trim();
    let arg = |prefix: &str| -> Option<Result<u64>> {
        let rest = name.strip_prefix(prefix)?;
        if rest.is_empty() {
            return None;
        }
        let rest = rest.strip_prefix(':')?;
        Some(
            rest.parse::<u64>()
                .map_err(|_| Error::Config(format!("bad problem argument in '{name}'"))),
        )
    };
    match name {
        "dennis_woods_bi" => Ok(dennis_woods_bi()),
        "scaled_sphere" => scaled_sphere(3),
        "quadratic_family" => Ok(quadratic_family(0)),
        _ => {
            if let Some(m) = arg("scaled_sphere") {
                return scaled_sphere(m? as usize);
            }
            if let Some(seed) = arg("quadratic_family") {
                return Ok(quadratic_family(seed?));
            }
            Err(Error::Config(format!("unknown problem '{name}'")))
        }
    }
}
