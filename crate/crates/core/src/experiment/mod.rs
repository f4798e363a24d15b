//! The noisy-cycle protocol and Monte Carlo estimation of logical error rates.

pub mod fit;
pub mod output;
pub mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::QubitSet;
use crate::decoder::{verdict, Decoder, DecoderConfig, DecoderError, Outcome};
use crate::lattice::{Family, Lattice, LatticeError};
use crate::noise::{
    bernoulli_mask, sample_correlated, sample_measurement_flips, Adjacency, NeighborPairs, NoiseKind,
    NoiseModel,
};
use crate::seed;
use crate::sweep::{SweepError, SweepState, Tables};

pub use fit::{fit_sustainable, FitError, ThresholdFit};
pub use stats::{find_crossing, wilson, Crossing, CrossingError, Curve, Z95};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error("invalid protocol: {0}")]
    Invalid(String),
}

/// Lattice plus everything derived from it that trials share.
#[derive(Debug)]
pub struct Setup {
    pub lattice: Lattice,
    pub tables: Tables,
    pub pairs: NeighborPairs,
}

impl Setup {
    pub fn new(family: Family, size: usize, adjacency: Adjacency) -> Result<Self, ExperimentError> {
        let lattice = family.build(size)?;
        let tables = Tables::build(&lattice)?;
        let pairs = NeighborPairs::new(&lattice, adjacency);
        Ok(Self {
            lattice,
            tables,
            pairs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub noise: NoiseModel,
    /// Noisy cycles before the final perfect round.
    pub cycles: usize,
    pub decoder: DecoderConfig,
    pub trials: usize,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.cycles == 0 || self.trials == 0 {
            return Err(ExperimentError::Invalid("cycles and trials must be at least 1".into()));
        }
        self.decoder.validate()?;
        Ok(())
    }

    /// Seed of trial `index` on `lat`; depends only on the point, not on scheduling.
    pub fn trial_seed(&self, lat: &Lattice, index: usize) -> u64 {
        seed::derive(&[
            self.seed,
            lat.family() as u64,
            lat.size() as u64,
            self.noise.kind as u64,
            self.noise.p.to_bits(),
            self.noise.q.to_bits(),
            self.cycles as u64,
            self.decoder.sweeps_per_measurement as u64,
            index as u64,
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub success: bool,
    /// Weight of error + correction after the final decode.
    pub residual_weight: usize,
    pub decode_steps: usize,
}

/// One run of the protocol: `cycles` rounds of noise, noisy measurement and
/// sweeping, then a perfect measurement and a full decode.
pub fn run_trial(dec: &mut Decoder<'_>, setup: &Setup, cfg: &ProtocolConfig, index: usize) -> TrialOutcome {
    let lat = &setup.lattice;
    let seed = cfg.trial_seed(lat, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut error = lat.zero_qubits();
    let mut syndrome = lat.zero_checks();
    let mut sweeps = 0usize;
    let spm = cfg.decoder.sweeps_per_measurement;
    for _ in 0..cfg.cycles {
        let flips: QubitSet = match cfg.noise.kind {
            NoiseKind::Iid => bernoulli_mask(lat.num_faces(), cfg.noise.p, &mut rng),
            NoiseKind::Correlated => sample_correlated(&setup.pairs, cfg.noise.p, &mut rng),
        };
        for f in flips.iter_ones() {
            error.flip(f);
            lat.add_face_boundary(&mut syndrome, f as u32);
        }
        let observed = sample_measurement_flips(&syndrome, cfg.noise.q, &mut rng);
        let mut state = SweepState::new(lat, observed);
        state.time = sweeps as u64;
        for _ in 0..spm {
            let d = cfg.decoder.noisy_direction(sweeps);
            dec.step(d, &mut state, seed);
            sweeps += 1;
        }
        for f in state.correction.iter_ones() {
            error.flip(f);
            lat.add_face_boundary(&mut syndrome, f as u32);
        }
    }
    let result = dec.decode(syndrome, seed::mix(seed ^ 0xf1a1));
    let residual = error.xor(&result.correction);
    let outcome = match result.outcome {
        Outcome::Corrected => verdict(lat, &residual),
        o => o,
    };
    TrialOutcome {
        index,
        seed,
        outcome,
        success: outcome.is_success(),
        residual_weight: residual.weight(),
        decode_steps: result.steps,
    }
}

/// Aggregate over all trials at one (lattice, noise, N) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    #[serde(rename = "L")]
    pub size: usize,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub cycles: usize,
    pub trials: usize,
    pub failures: usize,
    #[serde(rename = "p_L")]
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    /// Failures where the final decode left a syndrome.
    #[serde(skip)]
    pub syndrome_failures: usize,
}

/// Run every trial of `cfg` in parallel; outcomes are returned in trial order.
pub fn run_trials(setup: &Setup, cfg: &ProtocolConfig) -> Result<Vec<TrialOutcome>, ExperimentError> {
    cfg.validate()?;
    let lat = &setup.lattice;
    Ok((0..cfg.trials)
        .into_par_iter()
        .map_init(
            || Decoder::new(lat, &setup.tables, cfg.decoder.clone()).expect("validated"),
            |dec, i| run_trial(dec, setup, cfg, i),
        )
        .collect())
}

pub fn summarize(setup: &Setup, cfg: &ProtocolConfig, outcomes: &[TrialOutcome]) -> PointResult {
    let failures = outcomes.iter().filter(|o| !o.success).count();
    let (ci_low, ci_high) = wilson(failures as u64, outcomes.len() as u64, Z95);
    PointResult {
        size: setup.lattice.size(),
        p: cfg.noise.p,
        q: cfg.noise.q,
        cycles: cfg.cycles,
        trials: outcomes.len(),
        failures,
        p_l: failures as f64 / outcomes.len().max(1) as f64,
        ci_low,
        ci_high,
        seed: cfg.seed,
        syndrome_failures: outcomes
            .iter()
            .filter(|o| o.outcome == Outcome::SyndromeRemains)
            .count(),
    }
}

pub fn estimate_logical_rate(setup: &Setup, cfg: &ProtocolConfig) -> Result<PointResult, ExperimentError> {
    let out = run_trials(setup, cfg)?;
    Ok(summarize(setup, cfg, &out))
}

/// `p_L(p)` curves for each setup over a grid of `p`, with `q = alpha * p`.
pub fn scan(
    setups: &[Setup],
    ps: &[f64],
    alpha: f64,
    kind: NoiseKind,
    base: &ProtocolConfig,
    decoder_for: impl Fn(usize) -> DecoderConfig,
) -> Result<Vec<(Curve, Vec<PointResult>)>, ExperimentError> {
    setups
        .iter()
        .map(|s| {
            let mut rows = Vec::new();
            for &p in ps {
                let noise = NoiseModel::with_alpha(kind, p, alpha)
                    .map_err(|e| ExperimentError::Invalid(e.to_string()))?;
                let cfg = ProtocolConfig {
                    noise,
                    decoder: decoder_for(s.lattice.size()),
                    ..base.clone()
                };
                rows.push(estimate_logical_rate(s, &cfg)?);
            }
            let curve = Curve {
                size: s.lattice.size(),
                points: rows.iter().map(|r| (r.p, r.p_l)).collect(),
            };
            Ok((curve, rows))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: f64, q: f64, cycles: usize, l: usize) -> ProtocolConfig {
        ProtocolConfig {
            noise: NoiseModel::new(NoiseKind::Iid, p, q).unwrap(),
            cycles,
            decoder: DecoderConfig::for_size(l),
            trials: 20,
            seed: 11,
        }
    }

    #[test]
    fn noiseless_trials_succeed() {
        let s = Setup::new(Family::RhombicOpen, 4, Adjacency::EdgeSharing).unwrap();
        let r = estimate_logical_rate(&s, &cfg(0.0, 0.0, 3, 4)).unwrap();
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn rejects_zero_cycles() {
        let s = Setup::new(Family::CubicPeriodic, 3, Adjacency::EdgeSharing).unwrap();
        assert!(estimate_logical_rate(&s, &cfg(0.0, 0.0, 0, 3)).is_err());
    }

    #[test]
    fn trials_are_reproducible() {
        let s = Setup::new(Family::RhombicPeriodic, 4, Adjacency::EdgeSharing).unwrap();
        let c = cfg(0.05, 0.05, 4, 4);
        assert_eq!(run_trials(&s, &c).unwrap(), run_trials(&s, &c).unwrap());
    }
}
