//! Phase-flip, measurement and correlated-pair noise.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{CheckSet, F2Vec, QubitSet};
use crate::lattice::Lattice;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("measurement ratio alpha = {0} must be non-negative")]
    BadAlpha(f64),
    #[error("effective_rate needs p in [0, 3/8], got {0}")]
    OutOfDomain(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    #[default]
    Iid,
    Correlated,
}

impl std::str::FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "iid" => Ok(Self::Iid),
            "correlated" => Ok(Self::Correlated),
            _ => Err(format!("unknown noise kind '{s}' (expected iid or correlated)")),
        }
    }
}

/// Which face pairs count as neighbours for correlated noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adjacency {
    #[default]
    EdgeSharing,
    VertexSharing,
}

impl std::str::FromStr for Adjacency {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edge-sharing" => Ok(Self::EdgeSharing),
            "vertex-sharing" => Ok(Self::VertexSharing),
            _ => Err(format!("unknown adjacency '{s}' (expected edge-sharing or vertex-sharing)")),
        }
    }
}

/// Noise channel per cycle: qubit (or pair) rate `p`, measurement rate `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
    pub q: f64,
}

fn check_prob(p: f64) -> Result<f64, NoiseError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(NoiseError::BadProbability(p))
    }
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64, q: f64) -> Result<Self, NoiseError> {
        Ok(Self {
            kind,
            p: check_prob(p)?,
            q: check_prob(q)?,
        })
    }

    /// `q = alpha * p`, clamped at 1.
    pub fn with_alpha(kind: NoiseKind, p: f64, alpha: f64) -> Result<Self, NoiseError> {
        if !(alpha >= 0.0) {
            return Err(NoiseError::BadAlpha(alpha));
        }
        let mut q = alpha * p;
        if q > 1.0 {
            eprintln!("warning: q = alpha*p = {q} clamped to 1");
            q = 1.0;
        }
        Self::new(kind, p, q)
    }
}

/// Calls `f` on each index in `0..n` independently with probability `p`.
pub fn for_each_bernoulli<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R, mut f: impl FnMut(usize)) {
    if p <= 0.0 || n == 0 {
        return;
    }
    if p >= 1.0 {
        (0..n).for_each(f);
        return;
    }
    let geo = Geometric::new(p).expect("p in (0,1)");
    let mut i = geo.sample(rng);
    while i < n as u64 {
        f(i as usize);
        i += 1 + geo.sample(rng);
    }
}

/// iid mask of width `n` at rate `p`.
pub fn bernoulli_mask<K, R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> F2Vec<K> {
    let mut v = F2Vec::zeros(n);
    for_each_bernoulli(n, p, rng, |i| v.flip(i));
    v
}

pub fn sample_phase_flips<R: Rng + ?Sized>(lat: &Lattice, p: f64, rng: &mut R) -> QubitSet {
    bernoulli_mask(lat.num_faces(), p, rng)
}

/// The observed syndrome: `syndrome` with each bit flipped at rate `q`.
pub fn sample_measurement_flips<R: Rng + ?Sized>(syndrome: &CheckSet, q: f64, rng: &mut R) -> CheckSet {
    let mut out = syndrome.clone();
    for_each_bernoulli(syndrome.len(), q, rng, |i| out.flip(i));
    out
}

/// Unordered neighbouring face pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborPairs {
    num_faces: usize,
    pairs: Vec<(u32, u32)>,
}

impl NeighborPairs {
    pub fn new(lat: &Lattice, adj: Adjacency) -> Self {
        let mut set = BTreeSet::new();
        match adj {
            Adjacency::EdgeSharing => {
                for e in 0..lat.num_edges() as u32 {
                    let fs = lat.faces_of_edge(e);
                    for (i, &a) in fs.iter().enumerate() {
                        for &b in &fs[i + 1..] {
                            set.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            }
            Adjacency::VertexSharing => {
                for v in 0..lat.num_vertices() as u32 {
                    let fs = lat.faces_at(v);
                    for (i, &a) in fs.iter().enumerate() {
                        for &b in &fs[i + 1..] {
                            set.insert((a.min(b), a.max(b)));
                        }
                    }
                }
            }
        }
        Self {
            num_faces: lat.num_faces(),
            pairs: set.into_iter().collect(),
        }
    }

    /// Explicit pair list over `num_faces` qubits; pairs are normalised and deduplicated.
    pub fn from_pairs(num_faces: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let set: BTreeSet<(u32, u32)> = pairs
            .into_iter()
            .inspect(|&(a, b)| assert!(a != b && (a.max(b) as usize) < num_faces, "bad pair ({a}, {b})"))
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Self {
            num_faces,
            pairs: set.into_iter().collect(),
        }
    }

    pub fn edge_sharing(lat: &Lattice) -> Self {
        Self::new(lat, Adjacency::EdgeSharing)
    }

    pub fn vertex_sharing(lat: &Lattice) -> Self {
        Self::new(lat, Adjacency::VertexSharing)
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of pairs each face belongs to.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.num_faces];
        for &(a, b) in &self.pairs {
            d[a as usize] += 1;
            d[b as usize] += 1;
        }
        d
    }

    /// Per-face flip rate averaged over faces, at per-pair rate `p`.
    pub fn mean_marginal(&self, p: f64) -> f64 {
        let d = self.degrees();
        d.iter().map(|&n| exact_marginal(p, n)).sum::<f64>() / d.len().max(1) as f64
    }
}

/// Each pair fires with probability `p` and applies one of ZI, IZ, ZZ uniformly.
pub fn sample_correlated<R: Rng + ?Sized>(pairs: &NeighborPairs, p: f64, rng: &mut R) -> QubitSet {
    let mut out = QubitSet::zeros(pairs.num_faces);
    let mut fired = Vec::new();
    for_each_bernoulli(pairs.len(), p, rng, |i| fired.push(i));
    for i in fired {
        let (a, b) = pairs.pairs[i];
        match rng.random_range(0..3u8) {
            0 => out.flip(a as usize),
            1 => out.flip(b as usize),
            _ => {
                out.flip(a as usize);
                out.flip(b as usize);
            }
        }
    }
    out
}

/// iid rate matching the per-qubit marginal of correlated noise at pair rate
/// `p`, to second order.
pub fn effective_rate(p: f64) -> Result<f64, NoiseError> {
    if !(0.0..=0.375).contains(&p) {
        return Err(NoiseError::OutOfDomain(p));
    }
    Ok(2.0 * p - 8.0 * p * p / 3.0)
}

/// Exact flip probability of a qubit in `n` pairs at pair rate `p`.
pub fn exact_marginal(p: f64, n: usize) -> f64 {
    (1.0 - (1.0 - 4.0 * p / 3.0).powi(n as i32)) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn extremes() {
        let lat = Lattice::cubic_periodic(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_phase_flips(&lat, 0.0, &mut rng).is_zero());
        assert_eq!(sample_phase_flips(&lat, 1.0, &mut rng).weight(), lat.num_faces());
        let s = CheckSet::from_indices(lat.num_edges(), [0, 5]);
        assert_eq!(sample_measurement_flips(&s, 0.0, &mut rng), s);
        let c = sample_measurement_flips(&s, 1.0, &mut rng);
        assert_eq!(c.xor(&s), CheckSet::ones(lat.num_edges()));
    }

    #[test]
    fn effective_rate_values() {
        assert_eq!(effective_rate(0.0).unwrap(), 0.0);
        assert!((effective_rate(0.01).unwrap() - 0.019_733_333).abs() < 1e-8);
        assert!(effective_rate(0.5).is_err());
        assert!(effective_rate(-0.1).is_err());
        assert!((exact_marginal(0.01, 3) - effective_rate(0.01).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn alpha_clamps() {
        let m = NoiseModel::with_alpha(NoiseKind::Iid, 0.5, 10.0).unwrap();
        assert_eq!(m.q, 1.0);
        assert!(NoiseModel::with_alpha(NoiseKind::Iid, 0.5, -1.0).is_err());
        assert!(NoiseModel::new(NoiseKind::Iid, 1.5, 0.0).is_err());
    }

    #[test]
    fn pairs_share_an_edge() {
        let lat = Lattice::rhombic_periodic(4).unwrap();
        let np = NeighborPairs::edge_sharing(&lat);
        for &(a, b) in np.pairs() {
            assert!(a < b);
            let fa = &lat.face(a).edges;
            assert!(lat.face(b).edges.iter().any(|e| fa.contains(e)));
        }
        assert!(np.degrees().iter().all(|&d| d == 8));
        assert!(NeighborPairs::vertex_sharing(&lat).len() > np.len());
    }
}
