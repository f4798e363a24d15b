//! Fit of the threshold against the number of noisy cycles,
//! `p_th(N) = p_sus (1 - N^-γ) + p_th(1) N^-γ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 4 distinct N values, got {0}")]
    TooFewPoints(usize),
    #[error("no N = 1 point to anchor p_th(1)")]
    MissingFirst,
    #[error("fit did not converge: {0}")]
    NoConvergence(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub p_sus: f64,
    pub gamma: f64,
    pub p_th1: f64,
    pub sse: f64,
    /// Covariance of (p_sus, γ) from the linearised residuals; `None` when
    /// γ is not identifiable.
    pub covariance: Option<[[f64; 2]; 2]>,
    pub gamma_identifiable: bool,
    /// `0 < p_sus <= p_th(1)` and `γ > 0` with γ identifiable.
    pub accepted: bool,
}

impl ThresholdFit {
    pub fn predict(&self, n: f64) -> f64 {
        let x = n.powf(-self.gamma);
        self.p_sus * (1.0 - x) + self.p_th1 * x
    }
}

const GAMMA_MIN: f64 = 1e-3;
const GAMMA_MAX: f64 = 8.0;

/// Best p_sus and SSE at fixed γ.
fn profile(points: &[(f64, f64)], p1: f64, gamma: f64) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for &(n, y) in points {
        let x = n.powf(-gamma);
        num += (1.0 - x) * (y - p1 * x);
        den += (1.0 - x) * (1.0 - x);
    }
    let ps = if den > 0.0 { num / den } else { p1 };
    let sse = points
        .iter()
        .map(|&(n, y)| {
            let x = n.powf(-gamma);
            let r = y - ps * (1.0 - x) - p1 * x;
            r * r
        })
        .sum();
    (ps, sse)
}

/// Least-squares fit over `(N, p_th(N))` points, one of which has N = 1.
pub fn fit_sustainable(points: &[(f64, f64)]) -> Result<ThresholdFit, FitError> {
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(|a, b| a.total_cmp(b));
    ns.dedup();
    if ns.len() < 4 {
        return Err(FitError::TooFewPoints(ns.len()));
    }
    let firsts: Vec<f64> = points.iter().filter(|p| p.0 == 1.0).map(|p| p.1).collect();
    if firsts.is_empty() {
        return Err(FitError::MissingFirst);
    }
    let p1 = firsts.iter().sum::<f64>() / firsts.len() as f64;

    let grid: Vec<f64> = (0..=400)
        .map(|i| GAMMA_MIN * (GAMMA_MAX / GAMMA_MIN).powf(i as f64 / 400.0))
        .collect();
    let sses: Vec<f64> = grid.iter().map(|&g| profile(points, p1, g).1).collect();
    if sses.iter().any(|s| !s.is_finite()) {
        return Err(FitError::NoConvergence("non-finite residuals".into()));
    }
    let best = (0..grid.len()).min_by(|&a, &b| sses[a].total_cmp(&sses[b])).unwrap();
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |g: f64| profile(points, p1, g).1;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    let gamma = (a + b) / 2.0;
    let (p_sus, sse) = profile(points, p1, gamma);

    let scale = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(1e-300);
    let flat = sses.iter().all(|&s| (s - sses[best]).abs() <= 1e-9 * scale * scale);
    let mut jtj = [[0.0; 2]; 2];
    for &(n, _) in points {
        let x = n.powf(-gamma);
        let j = [1.0 - x, -(p1 - p_sus) * n.ln() * x];
        for r in 0..2 {
            for s in 0..2 {
                jtj[r][s] += j[r] * j[s];
            }
        }
    }
    let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    let tr = jtj[0][0] + jtj[1][1];
    let gamma_identifiable = !flat && det > 1e-12 * tr * tr;
    let covariance = gamma_identifiable.then(|| {
        let dof = (points.len() as f64 - 2.0).max(1.0);
        let s2 = sse / dof;
        [
            [s2 * jtj[1][1] / det, -s2 * jtj[0][1] / det],
            [-s2 * jtj[1][0] / det, s2 * jtj[0][0] / det],
        ]
    });
    let accepted = gamma_identifiable && p_sus > 0.0 && p_sus <= p1 && gamma > 0.0;
    Ok(ThresholdFit {
        p_sus,
        gamma,
        p_th1: p1,
        sse,
        covariance,
        gamma_identifiable,
        accepted,
    })
}
