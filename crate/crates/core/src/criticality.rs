//! Pareto criticality measure `mu(x)` and its poll-restricted version.
//!
//! `mu(x) = -min_{||d|| <= 1} max_i grad f_i(x)^T d` equals the smallest norm
//! of a convex combination of the component gradients. Two components are
//! solved in closed form, more with away-step Frank–Wolfe on the simplex.

use nalgebra::{DMatrix, DVector};

use crate::directions::PositiveSpanningSet;
use crate::error::{Error, Result};

const FW_GAP_TOL: f64 = 1e-10;
const FW_MAX_ITERS: usize = 100_000;

/// Output of [`criticality`].
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport {
    pub mu: f64,
    /// `-g*/||g*||` for the minimizing combination `g*`, zero when `mu = 0`.
    pub minimizing_direction: Vec<f64>,
    /// Simplex weights of the minimizing combination.
    pub dual_weights: Vec<f64>,
    pub mu_d: Option<f64>,
    pub c1_estimate: Option<f64>,
}

/// How the simplex min-norm problem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinNormMethod {
    /// Exact for `m <= 2`; falls back to Frank–Wolfe above.
    Auto,
    FrankWolfe,
}

fn validate(gradients: &[Vec<f64>]) -> Result<usize> {
    let n = gradients
        .first()
        .map(|g| g.len())
        .ok_or_else(|| Error::Domain("no gradients".into()))?;
    for g in gradients {
        if g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gradient entry".into()));
        }
    }
    Ok(n)
}

fn combine(gradients: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let n = gradients[0].len();
    let mut g = vec![0.0; n];
    for (row, w) in gradients.iter().zip(weights) {
        for (acc, v) in g.iter_mut().zip(row) {
            *acc += w * v;
        }
    }
    g
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn closed_form_pair(g1: &[f64], g2: &[f64]) -> [f64; 2] {
    // nearest point to the origin on the segment g2 + t (g1 - g2)
    let diff: Vec<f64> = g1.iter().zip(g2).map(|(a, b)| a - b).collect();
    let len2 = dot(&diff, &diff);
    if len2 == 0.0 {
        return [0.5, 0.5];
    }
    let t = (-dot(g2, &diff) / len2).clamp(0.0, 1.0);
    [t, 1.0 - t]
}

/// Away-step Frank–Wolfe on `min_{w in simplex} 1/2 ||G^T w||^2`, followed by
/// an exact solve on the affine hull of the final support.
pub fn frank_wolfe_weights(gradients: &[Vec<f64>]) -> Result<Vec<f64>> {
    validate(gradients)?;
    let m = gradients.len();
    let gram = DMatrix::from_fn(m, m, |i, j| dot(&gradients[i], &gradients[j]));
    let start = (0..m)
        .min_by(|&i, &j| gram[(i, i)].total_cmp(&gram[(j, j)]))
        .expect("m >= 1");
    let mut w = DVector::zeros(m);
    w[start] = 1.0;
    for _ in 0..FW_MAX_ITERS {
        let grad = &gram * &w;
        let value = w.dot(&grad);
        let toward = (0..m).min_by(|&i, &j| grad[i].total_cmp(&grad[j])).expect("m >= 1");
        let fw_gap = value - grad[toward];
        if fw_gap <= FW_GAP_TOL {
            break;
        }
        let away = (0..m)
            .filter(|&i| w[i] > 0.0)
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]))
            .expect("support is nonempty");
        let away_gap = grad[away] - value;
        let (dir, max_step, is_away) = if fw_gap >= away_gap {
            let mut d = -w.clone();
            d[toward] += 1.0;
            (d, 1.0, false)
        } else {
            let mut d = w.clone();
            d[away] -= 1.0;
            (d, w[away] / (1.0 - w[away]), true)
        };
        let curvature = dir.dot(&(&gram * &dir));
        let slope = dir.dot(&grad);
        let step = if curvature > 0.0 {
            (-slope / curvature).clamp(0.0, max_step)
        } else {
            max_step
        };
        if step == 0.0 {
            break;
        }
        w += &dir * step;
        if is_away && step == max_step {
            w[away] = 0.0;
        }
        for v in w.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total = w.sum();
        w /= total;
    }
    let mut weights: Vec<f64> = w.iter().copied().collect();
    if let Some(polished) = affine_polish(&gram, &weights) {
        let before = norm(&combine(gradients, &weights));
        if norm(&combine(gradients, &polished)) <= before {
            weights = polished;
        }
    }
    Ok(weights)
}

/// Minimum-norm point of the affine hull of the support of `weights`, if it
/// lies inside the simplex.
fn affine_polish(gram: &DMatrix<f64>, weights: &[f64]) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    let s = support.len();
    if s < 2 {
        return None;
    }
    let mut kkt = DMatrix::zeros(s + 1, s + 1);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            kkt[(a, b)] = gram[(i, j)];
        }
        kkt[(a, s)] = 1.0;
        kkt[(s, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(s + 1);
    rhs[s] = 1.0;
    let sol = kkt.svd(true, true).solve(&rhs, 1e-14).ok()?;
    if (0..s).any(|a| !(sol[a] > 0.0)) {
        return None;
    }
    let mut out = vec![0.0; weights.len()];
    let total: f64 = (0..s).map(|a| sol[a]).sum();
    for (a, &i) in support.iter().enumerate() {
        out[i] = sol[a] / total;
    }
    Some(out)
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Simplex weights of the minimum-norm convex combination of the rows.
pub fn min_norm_weights(gradients: &[Vec<f64>], method: MinNormMethod) -> Result<Vec<f64>> {
    validate(gradients)?;
    match (gradients.len(), method) {
        (1, _) => Ok(vec![1.0]),
        (2, MinNormMethod::Auto) => Ok(closed_form_pair(&gradients[0], &gradients[1]).to_vec()),
        _ => frank_wolfe_weights(gradients),
    }
}

/// `mu(x)` from the Jacobian rows at `x`.
pub fn mu(gradients: &[Vec<f64>]) -> Result<CriticalityReport> {
    mu_with(gradients, MinNormMethod::Auto)
}

pub fn mu_with(gradients: &[Vec<f64>], method: MinNormMethod) -> Result<CriticalityReport> {
    let weights = min_norm_weights(gradients, method)?;
    let g = combine(gradients, &weights);
    let scale = gradients.iter().map(|r| norm(r)).fold(1.0, f64::max);
    let mut value = norm(&g);
    let direction = if value > 1e-14 * scale {
        g.iter().map(|v| -v / value).collect()
    } else {
        value = 0.0;
        vec![0.0; g.len()]
    };
    Ok(CriticalityReport {
        mu: value,
        minimizing_direction: direction,
        dual_weights: weights,
        mu_d: None,
        c1_estimate: None,
    })
}

/// `mu_D(x) = -min_{d in D} max_i grad f_i(x)^T d`. May be negative.
pub fn mu_d(gradients: &[Vec<f64>], set: &PositiveSpanningSet) -> Result<f64> {
    let n = validate(gradients)?;
    if set.is_empty() {
        return Err(Error::Domain("empty direction set".into()));
    }
    if set.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: set.dim(),
        });
    }
    let best = set
        .iter()
        .map(|d| gradients.iter().map(|g| dot(g, d)).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    Ok(-best)
}

/// `|mu_D - mu| / mu_D` when `mu_D > 0`.
pub fn c1_ratio(mu: f64, mu_d: f64) -> Option<f64> {
    (mu_d > 0.0).then(|| (mu_d - mu).abs() / mu_d)
}

/// `mu`, and `mu_D` with the ratio when a poll set is supplied.
pub fn criticality(gradients: &[Vec<f64>], set: Option<&PositiveSpanningSet>) -> Result<CriticalityReport> {
    let mut report = mu(gradients)?;
    if let Some(set) = set {
        let md = mu_d(gradients, set)?;
        report.mu_d = Some(md);
        report.c1_estimate = c1_ratio(report.mu, md);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::coordinate_set;
    use proptest::prelude::*;

    fn dw(x: [f64; 2]) -> Vec<Vec<f64>> {
        vec![vec![x[0] + 1.0, x[1] - 1.0], vec![x[0] - 1.0, x[1] + 1.0]]
    }

    /// Grid search over the segment weight; independent of the closed form.
    fn grid_mu_pair(g1: &[f64], g2: &[f64]) -> f64 {
        (0..=100_000)
            .map(|i| {
                let t = i as f64 / 100_000.0;
                norm(
                    &g1.iter()
                        .zip(g2)
                        .map(|(a, b)| t * a + (1.0 - t) * b)
                        .collect::<Vec<_>>(),
                )
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn opposite_gradients_are_critical() {
        let r = mu(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert_eq!(r.mu, 0.0);
        assert_eq!(r.dual_weights, vec![0.5, 0.5]);
        assert_eq!(r.minimizing_direction, vec![0.0, 0.0]);
    }

    #[test]
    fn dennis_woods_diagonal() {
        for a in [-2.0, -0.3, 0.1, 0.5, 1.7] {
            let g = dw([a, a]);
            let r = mu(&g).unwrap();
            let grid = grid_mu_pair(&g[0], &g[1]);
            assert!((r.mu - grid).abs() < 1e-8);
            assert!((r.mu - 2f64.sqrt() * f64::abs(a)).abs() < 1e-12);
            assert!((r.dual_weights[0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_gradient() {
        let g = vec![vec![3.0, 4.0]; 3];
        assert!((mu(&g).unwrap().mu - 5.0).abs() < 1e-12);
        assert!((mu(&g[..2]).unwrap().mu - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_gradients() {
        assert!(mu(&[vec![1.0, f64::NAN], vec![0.0, 1.0]]).is_err());
        assert!(mu(&[vec![1.0], vec![0.0, 1.0]]).is_err());
        assert!(mu(&[]).is_err());
    }

    #[test]
    fn mu_d_on_dennis_woods() {
        let d = coordinate_set(2).unwrap();
        assert_eq!(mu_d(&dw([2.0, 3.0]), &d).unwrap(), 2.0);
        for a in [-0.9, -0.5, 0.1, 0.5, 0.9] {
            let v = mu_d(&dw([a, a]), &d).unwrap();
            assert!((v + (1.0 - f64::abs(a))).abs() < 1e-15);
        }
        for x in [[1.5, 2.5], [3.0, 1.2], [4.0, 4.0]] {
            let v = mu_d(&dw(x), &d).unwrap();
            assert!((v - (x[0] - 1.0).max(x[1] - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn c1_examples() {
        assert!((c1_ratio(2.1, 2.0).unwrap() - 0.05).abs() < 1e-15);
        assert!(c1_ratio(1.0, 0.0).is_none());
        assert!(c1_ratio(1.0, -0.5).is_none());
        let d = coordinate_set(2).unwrap();
        for i in 0..=30 {
            for j in 0..=30 {
                let x = [2.0 + 0.1 * i as f64, 2.0 + 0.1 * j as f64];
                let r = criticality(&dw(x), Some(&d)).unwrap();
                assert!(r.c1_estimate.unwrap() <= 6.0, "x = {x:?}");
            }
        }
    }

    fn matrix(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-3.0..3.0f64, n), m)
    }

    proptest! {
        #[test]
        fn report_invariants(g in (1usize..5, 1usize..6).prop_flat_map(|(m, n)| matrix(m, n))) {
            let r = mu(&g).unwrap();
            prop_assert!(r.mu >= 0.0);
            prop_assert!((r.dual_weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(r.dual_weights.iter().all(|w| *w >= 0.0));
            let comb = norm(&combine(&g, &r.dual_weights));
            prop_assert!((comb - r.mu).abs() < 1e-8);
            let min_row = g.iter().map(|row| norm(row)).fold(f64::INFINITY, f64::min);
            prop_assert!(r.mu <= min_row + 1e-12);
            // the gap test only promises g_i . g* >= |g*|^2 - tol
            if r.mu > 0.0 {
                for row in &g {
                    prop_assert!(dot(row, &r.minimizing_direction) <= -r.mu + FW_GAP_TOL / r.mu + 1e-12);
                }
            }
        }

        #[test]
        fn closed_form_matches_frank_wolfe(g in (1usize..6).prop_flat_map(|n| matrix(2, n))) {
            let exact = mu_with(&g, MinNormMethod::Auto).unwrap().mu;
            let fw = mu_with(&g, MinNormMethod::FrankWolfe).unwrap().mu;
            prop_assert!((exact - fw).abs() < 1e-8, "{} vs {}", exact, fw);
        }

        #[test]
        fn mu_d_never_exceeds_mu(g in (1usize..5, 1usize..5).prop_flat_map(|(m, n)| matrix(m, n))) {
            let n = g[0].len();
            let d = coordinate_set(n).unwrap();
            prop_assert!(mu_d(&g, &d).unwrap() <= mu(&g).unwrap().mu + 1e-12);
        }
    }
}
