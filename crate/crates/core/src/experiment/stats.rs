//! Binomial intervals and curve crossings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrossingError {
    #[error("need at least two curves, got {0}")]
    TooFewCurves(usize),
    #[error("curves share fewer than two p values")]
    NoCommonGrid,
    #[error("no crossing in the sampled range")]
    NoCrossing,
}

/// Logical error rate against physical rate for one lattice size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub size: usize,
    /// `(p, p_L)`, any order.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub p_th: f64,
    /// max - min over the individual pairwise crossings.
    pub spread: f64,
    pub pairwise: Vec<(usize, usize, f64)>,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Points where the larger lattice stops beating the smaller one, found by
/// linear interpolation between adjacent sizes.
pub fn find_crossing(curves: &[Curve]) -> Result<Crossing, CrossingError> {
    if curves.len() < 2 {
        return Err(CrossingError::TooFewCurves(curves.len()));
    }
    let mut sorted: Vec<&Curve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.size);
    let mut pairwise = Vec::new();
    let mut any_grid = false;
    for w in sorted.windows(2) {
        let (small, big) = (w[0], w[1]);
        let mut diffs: Vec<(f64, f64)> = big
            .points
            .iter()
            .filter_map(|&(p, pb)| {
                small
                    .points
                    .iter()
                    .find(|&&(q, _)| (q - p).abs() <= 1e-12 * p.abs().max(1.0))
                    .map(|&(_, ps)| (p, pb - ps))
            })
            .collect();
        diffs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if diffs.len() < 2 {
            continue;
        }
        any_grid = true;
        let mut roots = Vec::new();
        let mut last_neg: Option<(f64, f64)> = None;
        let mut zeros: Vec<f64> = Vec::new();
        for (p, d) in diffs {
            if d < 0.0 {
                last_neg = Some((p, d));
                zeros.clear();
            } else if d == 0.0 {
                zeros.push(p);
            } else {
                if let Some((p0, d0)) = last_neg.take() {
                    roots.push(if zeros.is_empty() {
                        p0 + (p - p0) * (-d0) / (d - d0)
                    } else {
                        zeros.iter().sum::<f64>() / zeros.len() as f64
                    });
                }
                zeros.clear();
            }
        }
        if !roots.is_empty() {
            pairwise.push((small.size, big.size, median(&mut roots)));
        }
    }
    if !any_grid {
        return Err(CrossingError::NoCommonGrid);
    }
    if pairwise.is_empty() {
        return Err(CrossingError::NoCrossing);
    }
    let mut xs: Vec<f64> = pairwise.iter().map(|t| t.2).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Crossing {
        p_th: median(&mut xs),
        spread: hi - lo,
        pairwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_zero_of_thousand() {
        let (lo, hi) = wilson(0, 1000, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 3.83e-3).abs() < 1e-4);
    }

    #[test]
    fn wilson_contains_point() {
        let (lo, hi) = wilson(30, 100, Z95);
        assert!(lo < 0.3 && 0.3 < hi);
    }

    #[test]
    fn synthetic_power_law_crossing() {
        let p0 = 0.1;
        let grid: Vec<f64> = (1..=19).map(|i| 0.01 * i as f64).collect();
        let curves: Vec<Curve> = [4usize, 6, 8]
            .iter()
            .map(|&l| Curve {
                size: l,
                points: grid.iter().map(|&p| (p, (p / p0).powi(l as i32))).collect(),
            })
            .collect();
        let c = find_crossing(&curves).unwrap();
        assert!((c.p_th - p0).abs() < 1e-9, "{c:?}");
    }

    #[test]
    fn parallel_curves_do_not_cross() {
        let pts = |off: f64| (1..6).map(|i| (i as f64 * 0.01, i as f64 * 0.01 + off)).collect();
        let curves = vec![
            Curve { size: 4, points: pts(0.1) },
            Curve { size: 6, points: pts(0.0) },
        ];
        assert_eq!(find_crossing(&curves), Err(CrossingError::NoCrossing));
    }
}
