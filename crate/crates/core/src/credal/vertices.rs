use super::network::SUM_TOLERANCE;
use super::{CredalError, Result};
use crate::estimate::ProbabilityInterval;

/// Absolute tolerance for deduplicating vertices and bound checks.
pub const VERTEX_TOLERANCE: f64 = 1e-12;

/// One vertex of an interval-constrained probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeMassFunction(Vec<f64>);

impl ExtremeMassFunction {
    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    fn approx_eq(&self, other: &[f64]) -> bool {
        self.0
            .iter()
            .zip(other)
            .all(|(a, b)| (a - b).abs() <= VERTEX_TOLERANCE)
    }
}

/// Vertices of `{p : lower_m <= p_m <= upper_m, sum p = 1}`.
///
/// Every vertex has all coordinates but at most one at a bound, so the
/// candidates are: pick the free coordinate, put the rest at bounds, and solve
/// the free one from the sum constraint.
pub fn enumerate_extreme_mass_functions(
    intervals: &[ProbabilityInterval],
) -> Result<Vec<ExtremeMassFunction>> {
    let m = intervals.len();
    let lo_sum: f64 = intervals.iter().map(|i| i.lower()).sum();
    let hi_sum: f64 = intervals.iter().map(|i| i.upper()).sum();
    if m == 0 || lo_sum > 1.0 + SUM_TOLERANCE || hi_sum < 1.0 - SUM_TOLERANCE {
        return Err(CredalError::EmptyCredalSet {
            variable: String::new(),
            row: 0,
            lower_sum: lo_sum,
            upper_sum: hi_sum,
        });
    }
    if m > 24 {
        return Err(CredalError::InvalidNetwork(format!(
            "{m} states is beyond the supported vertex enumeration size"
        )));
    }

    let mut vertices: Vec<ExtremeMassFunction> = Vec::new();
    let mut p = vec![0.0; m];
    for free in 0..m {
        for mask in 0u32..(1 << (m - 1)) {
            let mut bit = 0;
            let mut fixed_sum = 0.0;
            for (j, iv) in intervals.iter().enumerate() {
                if j == free {
                    continue;
                }
                p[j] = if mask & (1 << bit) != 0 {
                    iv.upper()
                } else {
                    iv.lower()
                };
                fixed_sum += p[j];
                bit += 1;
            }
            let rest = 1.0 - fixed_sum;
            let iv = intervals[free];
            if rest < iv.lower() - VERTEX_TOLERANCE || rest > iv.upper() + VERTEX_TOLERANCE {
                continue;
            }
            p[free] = rest.clamp(iv.lower(), iv.upper());
            if !vertices.iter().any(|v| v.approx_eq(&p)) {
                vertices.push(ExtremeMassFunction(p.clone()));
            }
        }
    }
    Ok(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{idm_intervals, MultinomialCounts, SampleSize};
    use proptest::prelude::*;

    fn iv(l: f64, u: f64) -> ProbabilityInterval {
        ProbabilityInterval::new(l, u).unwrap()
    }

    fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Basic-solution enumeration: choose M-1 active bound constraints out of
    /// the 2M box faces, solve together with the sum row, keep feasible points.
    fn brute_force_vertices(intervals: &[ProbabilityInterval]) -> Vec<Vec<f64>> {
        let m = intervals.len();
        let faces: Vec<(usize, f64)> = intervals
            .iter()
            .enumerate()
            .flat_map(|(i, iv)| [(i, iv.lower()), (i, iv.upper())])
            .collect();
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut chosen = Vec::new();
        fn recurse(
            start: usize,
            need: usize,
            faces: &[(usize, f64)],
            chosen: &mut Vec<usize>,
            m: usize,
            intervals: &[ProbabilityInterval],
            out: &mut Vec<Vec<f64>>,
        ) {
            if chosen.len() == need {
                let mut a = vec![vec![0.0; m + 1]; m];
                for (r, &f) in chosen.iter().enumerate() {
                    let (i, v) = faces[f];
                    a[r][i] = 1.0;
                    a[r][m] = v;
                }
                a[m - 1] = vec![1.0; m + 1];
                if let Some(x) = gauss(a) {
                    let feasible = x
                        .iter()
                        .zip(intervals)
                        .all(|(&xi, iv)| xi >= iv.lower() - 1e-12 && xi <= iv.upper() + 1e-12);
                    if feasible
                        && !out
                            .iter()
                            .any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1e-12))
                    {
                        out.push(x);
                    }
                }
                return;
            }
            for f in start..faces.len() {
                chosen.push(f);
                recurse(f + 1, need, faces, chosen, m, intervals, out);
                chosen.pop();
            }
        }
        recurse(0, m - 1, &faces, &mut chosen, m, intervals, &mut out);
        out
    }

    fn gauss(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
        let n = a.len();
        for col in 0..n {
            let piv =
                (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
            if a[piv][col].abs() < 1e-12 {
                return None;
            }
            a.swap(col, piv);
            let pivot = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col {
                    let f = row[col] / pivot[col];
                    for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                        *x -= f * p;
                    }
                }
            }
        }
        Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
    }

    #[test]
    fn two_state_interval_has_two_vertices() {
        let v = enumerate_extreme_mass_functions(&[iv(0.3, 0.5), iv(0.5, 0.7)]).unwrap();
        let got = sorted(v.into_iter().map(|e| e.into_inner()).collect());
        assert_eq!(got.len(), 2);
        assert!((got[0][0] - 0.3).abs() < 1e-15 && (got[0][1] - 0.7).abs() < 1e-15);
        assert!((got[1][0] - 0.5).abs() < 1e-15 && (got[1][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn point_set_has_one_vertex() {
        let v = enumerate_extreme_mass_functions(&[iv(0.4, 0.4), iv(0.6, 0.6)]).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].probabilities(), &[0.4, 0.6]);
    }

    #[test]
    fn imprecise_dirichlet_intervals_raise_one_coordinate() {
        let counts = MultinomialCounts::new(vec![12, 7, 21]).unwrap();
        let ivs = idm_intervals(&counts, SampleSize::default()).unwrap();
        let v = enumerate_extreme_mass_functions(&ivs).unwrap();
        assert_eq!(v.len(), 3);
        for e in &v {
            let at_upper = e
                .probabilities()
                .iter()
                .zip(&ivs)
                .filter(|(p, i)| (*p - i.upper()).abs() < 1e-12)
                .count();
            let at_lower = e
                .probabilities()
                .iter()
                .zip(&ivs)
                .filter(|(p, i)| (*p - i.lower()).abs() < 1e-12)
                .count();
            assert_eq!((at_upper, at_lower), (1, 2));
        }
        assert_eq!(
            sorted(v.into_iter().map(|e| e.into_inner()).collect()).len(),
            sorted(brute_force_vertices(&ivs)).len()
        );
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(matches!(
            enumerate_extreme_mass_functions(&[iv(0.6, 0.7), iv(0.6, 0.7)]),
            Err(CredalError::EmptyCredalSet { .. })
        ));
        assert!(enumerate_extreme_mass_functions(&[iv(0.1, 0.2), iv(0.1, 0.2)]).is_err());
    }

    #[test]
    fn vacuous_set_gives_unit_vectors() {
        let v = enumerate_extreme_mass_functions(&[ProbabilityInterval::VACUOUS; 4]).unwrap();
        assert_eq!(v.len(), 4);
    }

    fn interval_vector(m: usize) -> impl Strategy<Value = Vec<ProbabilityInterval>> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), m).prop_filter_map(
            "non-empty credal set",
            |pairs| {
                let ivs: Vec<_> = pairs
                    .into_iter()
                    .map(|(a, b)| {
                        let (l, u) = if a <= b { (a, b) } else { (b, a) };
                        // shrink so that the set is usually non-empty
                        ProbabilityInterval::new(l * 0.6, u * 0.9).unwrap()
                    })
                    .collect();
                let lo: f64 = ivs.iter().map(|i| i.lower()).sum();
                let hi: f64 = ivs.iter().map(|i| i.upper()).sum();
                (lo <= 1.0 && hi >= 1.0).then_some(ivs)
            },
        )
    }

    proptest! {
        #[test]
        fn matches_basic_solution_enumeration(ivs in (2usize..=4).prop_flat_map(interval_vector)) {
            let fast = enumerate_extreme_mass_functions(&ivs).unwrap();
            let slow = brute_force_vertices(&ivs);
            prop_assert_eq!(fast.len(), slow.len());
            for v in &fast {
                let p = v.probabilities();
                prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                prop_assert!(slow.iter().any(|s| s.iter().zip(p).all(|(a, b)| (a - b).abs() <= 1e-9)));
                let interior = p.iter().zip(&ivs)
                    .filter(|(x, i)| (**x - i.lower()).abs() > 1e-12 && (**x - i.upper()).abs() > 1e-12)
                    .count();
                prop_assert!(interior <= 1);
            }
        }

        #[test]
        fn two_state_sets_have_at_most_two_vertices(ivs in interval_vector(2)) {
            prop_assert!(enumerate_extreme_mass_functions(&ivs).unwrap().len() <= 2);
        }
    }
}
