//! Exact hypervolume indicator for up to four objectives.
//!
//! Two objectives use a sorted sweep. Three and four objectives slice along
//! the last coordinate and recurse on the remaining ones.

use crate::error::{Error, Result};

/// Largest objective count handled by [`hypervolume`].
pub const MAX_OBJECTIVES: usize = 4;

/// Fixed upper corner of every box `[a, r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint(Vec<f64>);

impl ReferencePoint {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Domain("empty reference point".into()));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("reference point".into()));
        }
        Ok(ReferencePoint(r))
    }

    /// Componentwise maximum of `values` plus `margin` in every coordinate.
    pub fn enclosing<'a, I>(values: I, margin: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut upper: Option<Vec<f64>> = None;
        for v in values {
            match upper.as_mut() {
                None => upper = Some(v.to_vec()),
                Some(u) => {
                    if u.len() != v.len() {
                        return Err(Error::DimensionMismatch {
                            expected: u.len(),
                            got: v.len(),
                        });
                    }
                    for (a, b) in u.iter_mut().zip(v) {
                        *a = a.max(*b);
                    }
                }
            }
        }
        let upper = upper.ok_or_else(|| Error::Domain("no values to enclose".into()))?;
        ReferencePoint::new(upper.into_iter().map(|v| v + margin).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Lebesgue measure of the union of boxes `[a, r]` over `values`.
pub fn hypervolume<V: AsRef<[f64]>>(values: &[V], r: &ReferencePoint) -> Result<f64> {
    let m = r.len();
    if m > MAX_OBJECTIVES {
        return Err(Error::Unsupported(format!(
            "exact hypervolume supports at most {MAX_OBJECTIVES} objectives, got {m}"
        )));
    }
    let mut pts: Vec<&[f64]> = Vec::with_capacity(values.len());
    for v in values {
        let v = v.as_ref();
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: v.len(),
            });
        }
        if let Some(i) = (0..m).find(|&i| !(v[i] <= r.0[i])) {
            return Err(Error::Reference(format!(
                "component {i} of {v:?} exceeds reference {}",
                r.0[i]
            )));
        }
        pts.push(v);
    }
    Ok(volume(&mut pts, &r.0))
}

fn volume(pts: &mut [&[f64]], r: &[f64]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    match r.len() {
        1 => r[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => sweep2(pts, r),
        d => {
            let last = d - 1;
            pts.sort_by(|a, b| a[last].total_cmp(&b[last]));
            let mut total = 0.0;
            let mut slice: Vec<&[f64]> = Vec::with_capacity(pts.len());
            for j in 0..pts.len() {
                slice.push(&pts[j][..last]);
                let hi = if j + 1 < pts.len() { pts[j + 1][last] } else { r[last] };
                let depth = hi - pts[j][last];
                if depth > 0.0 {
                    let mut view = slice.clone();
                    total += volume(&mut view, &r[..last]) * depth;
                }
            }
            total
        }
    }
}

fn sweep2(pts: &mut [&[f64]], r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut low = r[1];
    for j in 0..pts.len() {
        low = low.min(pts[j][1]);
        let next = if j + 1 < pts.len() { pts[j + 1][0] } else { r[0] };
        area += (next - pts[j][0]) * (r[1] - low);
    }
    area
}

/// `after - before`.
pub fn hi_increase(before: f64, after: f64) -> f64 {
    after - before
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Inclusion–exclusion over all nonempty subsets; independent of the sweep.
    fn inclusion_exclusion(values: &[Vec<f64>], r: &[f64]) -> f64 {
        let k = values.len();
        let mut total = 0.0;
        for mask in 1u32..(1u32 << k) {
            let mut corner = vec![f64::NEG_INFINITY; r.len()];
            for (i, v) in values.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (c, x) in corner.iter_mut().zip(v) {
                        *c = c.max(*x);
                    }
                }
            }
            let vol: f64 = corner.iter().zip(r).map(|(c, ri)| ri - c).product();
            if mask.count_ones() % 2 == 1 {
                total += vol;
            } else {
                total -= vol;
            }
        }
        total
    }

    fn rp(r: &[f64]) -> ReferencePoint {
        ReferencePoint::new(r.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(hypervolume(&[vec![1.0, 1.0]], &rp(&[2.0, 2.0])).unwrap(), 1.0);
        let two = vec![vec![1.0, 3.0], vec![3.0, 1.0]];
        assert_eq!(hypervolume(&two, &rp(&[4.0, 4.0])).unwrap(), 5.0);
        let empty: Vec<Vec<f64>> = vec![];
        assert_eq!(hypervolume(&empty, &rp(&[4.0, 4.0])).unwrap(), 0.0);
    }

    #[test]
    fn increase_examples() {
        assert_eq!(hi_increase(5.0, 5.25), 0.25);
        assert_eq!(hi_increase(5.0, 5.0), 0.0);
        assert!(hi_increase(1.0, 3.0) >= 0.01);
    }

    #[test]
    fn figure_configuration_adds_one_square() {
        // (4.5, 4.5) sits at l-inf distance 0.5 from D({(3,5),(5,3)}).
        let r = rp(&[8.0, 8.0]);
        let before = hypervolume(&[vec![3.0, 5.0], vec![5.0, 3.0]], &r).unwrap();
        let after = hypervolume(&[vec![3.0, 5.0], vec![5.0, 3.0], vec![4.5, 4.5]], &r).unwrap();
        assert!((hi_increase(before, after) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            hypervolume(&[vec![3.0, 1.0]], &rp(&[2.0, 2.0])),
            Err(Error::Reference(_))
        ));
        assert!(matches!(
            hypervolume(&[vec![0.0; 5]], &rp(&[1.0; 5])),
            Err(Error::Unsupported(_))
        ));
        assert!(hypervolume(&[vec![0.0; 3]], &rp(&[1.0; 2])).is_err());
    }

    #[test]
    fn four_objectives_against_inclusion_exclusion() {
        let vals = vec![
            vec![0.1, 0.7, 0.3, 0.9],
            vec![0.5, 0.2, 0.8, 0.1],
            vec![0.9, 0.4, 0.1, 0.5],
            vec![0.3, 0.3, 0.5, 0.5],
        ];
        let r = [1.0; 4];
        let exact = inclusion_exclusion(&vals, &r);
        let got = hypervolume(&vals, &rp(&r)).unwrap();
        assert!((got - exact).abs() <= 1e-12 * exact);
    }

    fn point_set(m: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0..10.0f64, m), 0..max)
    }

    proptest! {
        #[test]
        fn matches_inclusion_exclusion_2d(vals in point_set(2, 10)) {
            let r = [10.0, 10.0];
            let exact = inclusion_exclusion(&vals, &r);
            let got = hypervolume(&vals, &rp(&r)).unwrap();
            prop_assert!((got - exact).abs() <= 1e-12 * exact.max(1.0));
        }

        #[test]
        fn matches_inclusion_exclusion_3d(vals in point_set(3, 10)) {
            let r = [10.0, 10.0, 10.0];
            let exact = inclusion_exclusion(&vals, &r);
            let got = hypervolume(&vals, &rp(&r)).unwrap();
            prop_assert!((got - exact).abs() <= 1e-12 * exact.max(1.0));
        }

        #[test]
        fn permutation_invariant(mut vals in point_set(3, 12), seed in 0u64..1000) {
            let r = rp(&[10.0, 10.0, 10.0]);
            let a = hypervolume(&vals, &r).unwrap();
            let len = vals.len().max(1);
            vals.rotate_left(seed as usize % len);
            vals.reverse();
            let b = hypervolume(&vals, &r).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn dominated_points_are_neutral_and_others_add(vals in point_set(2, 12), extra in prop::collection::vec(0.0..10.0f64, 2)) {
            let r = rp(&[10.0, 10.0]);
            let base = hypervolume(&vals, &r).unwrap();
            let mut more = vals.clone();
            more.push(extra.clone());
            let grown = hypervolume(&more, &r).unwrap();
            let weakly_dominated = vals.iter().any(|w| w.iter().zip(&extra).all(|(a, b)| a <= b));
            let on_reference = extra.iter().zip(r.as_slice()).any(|(e, ri)| e >= ri);
            if weakly_dominated {
                prop_assert!((grown - base).abs() <= 1e-9 * base.max(1.0));
            } else if !on_reference {
                prop_assert!(grown > base);
            }
        }
    }
}
