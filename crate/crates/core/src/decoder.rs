//! The full sweep decoder: cycle the sweep rule through all directions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{CheckSet, QubitSet};
use crate::causal::Direction;
use crate::lattice::Lattice;
use crate::sweep::{SweepState, Sweeper, Tables, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecoderError {
    #[error("invalid decoder config: {0}")]
    InvalidConfig(String),
    #[error("residual error has a nonzero syndrome of weight {0}")]
    NonzeroSyndrome(usize),
}

/// Default number of steps per direction for a lattice of size `l`.
pub fn default_tmax(l: usize) -> usize {
    2 * l
}

/// Default noisy-phase direction period: `ceil(log2 L)` sweep applications.
pub fn default_noisy_period(l: usize) -> usize {
    (usize::BITS - l.max(2).saturating_sub(1).leading_zeros()) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    pub order: Vec<Direction>,
    /// Steps per direction in the final perfect decode.
    pub t_max: usize,
    /// Sweep applications between direction changes while noise is on.
    pub noisy_period: usize,
    /// Steps between direction changes in the final perfect decode.
    pub perfect_period: usize,
    pub sweeps_per_measurement: usize,
    /// Passes over the direction order in the final decode.
    pub repeats: usize,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trace: bool,
}

impl DecoderConfig {
    pub fn for_size(l: usize) -> Self {
        Self {
            order: Direction::ALL.to_vec(),
            t_max: default_tmax(l),
            noisy_period: default_noisy_period(l),
            perfect_period: l.max(1),
            sweeps_per_measurement: 1,
            repeats: 1,
            variant: Variant::Regular,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<(), DecoderError> {
        let bad = |m: &str| Err(DecoderError::InvalidConfig(m.into()));
        let mut seen = [false; 8];
        for d in &self.order {
            seen[d.index()] = true;
        }
        if self.order.len() != 8 || seen.iter().any(|s| !s) {
            return bad("direction order must be a permutation of all 8 directions");
        }
        if self.t_max == 0 || self.noisy_period == 0 || self.perfect_period == 0 {
            return bad("t_max and direction periods must be at least 1");
        }
        if self.sweeps_per_measurement == 0 || self.repeats == 0 {
            return bad("sweeps_per_measurement and repeats must be at least 1");
        }
        Ok(())
    }

    /// Total step budget of the final perfect decode.
    pub fn budget(&self) -> usize {
        self.order.len() * self.t_max * self.repeats
    }

    /// Direction for step `s` of the perfect decode.
    pub fn perfect_direction(&self, s: usize) -> Direction {
        self.order[(s / self.perfect_period) % self.order.len()]
    }

    /// Direction for the `k`-th sweep application of the noisy phase.
    pub fn noisy_direction(&self, k: usize) -> Direction {
        self.order[(k / self.noisy_period) % self.order.len()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Corrected,
    SyndromeRemains,
    LogicalFailure,
}

impl Outcome {
    pub fn is_success(self) -> bool {
        self == Outcome::Corrected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// `Corrected` or `SyndromeRemains`; use [`verdict`] for the logical check.
    pub outcome: Outcome,
    pub correction: QubitSet,
    pub residual_syndrome: CheckSet,
    pub steps: usize,
}

/// Whether a residual with trivial syndrome acts as a nontrivial logical.
pub fn is_logical_failure(lat: &Lattice, residual: &QubitSet) -> Result<bool, DecoderError> {
    let s = lat.boundary(residual);
    if !s.is_zero() {
        return Err(DecoderError::NonzeroSyndrome(s.weight()));
    }
    Ok(lat.logical_x().iter().any(|x| residual.dot(x)))
}

/// Final verdict of a trial whose net physical error is `residual`.
pub fn verdict(lat: &Lattice, residual: &QubitSet) -> Outcome {
    match is_logical_failure(lat, residual) {
        Err(_) => Outcome::SyndromeRemains,
        Ok(true) => Outcome::LogicalFailure,
        Ok(false) => Outcome::Corrected,
    }
}

/// Decoder bound to one lattice, holding reusable scratch space.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    lat: &'a Lattice,
    tables: &'a Tables,
    cfg: DecoderConfig,
    sweeper: Sweeper,
}

impl<'a> Decoder<'a> {
    pub fn new(lat: &'a Lattice, tables: &'a Tables, cfg: DecoderConfig) -> Result<Self, DecoderError> {
        cfg.validate()?;
        Ok(Self {
            lat,
            tables,
            cfg,
            sweeper: Sweeper::new(lat),
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn lattice(&self) -> &'a Lattice {
        self.lat
    }

    /// One sweep step in direction `d`; returns the number of faces flipped.
    pub fn step(&mut self, d: Direction, state: &mut SweepState, seed: u64) -> usize {
        let n = self
            .sweeper
            .step(self.lat, self.tables.get(d), state, self.cfg.variant, seed)
            .len();
        if self.cfg.trace {
            eprintln!("T={} dir={} |s|={} |phi|={}", state.time, d, state.syndrome.weight(), n);
        }
        n
    }

    /// Run the perfect-measurement decode on `syndrome`.
    pub fn decode(&mut self, syndrome: CheckSet, seed: u64) -> DecodeResult {
        let mut state = SweepState::new(self.lat, syndrome);
        let mut steps = 0;
        while steps < self.cfg.budget() && !state.syndrome.is_zero() {
            let d = self.cfg.perfect_direction(steps);
            self.step(d, &mut state, seed);
            steps += 1;
        }
        let outcome = if state.syndrome.is_zero() {
            Outcome::Corrected
        } else {
            Outcome::SyndromeRemains
        };
        DecodeResult {
            outcome,
            correction: state.correction,
            residual_syndrome: state.syndrome,
            steps,
        }
    }
}

/// One-shot convenience wrapper around [`Decoder::decode`].
pub fn sweep_decode(
    lat: &Lattice,
    tables: &Tables,
    syndrome: CheckSet,
    cfg: &DecoderConfig,
    seed: u64,
) -> Result<DecodeResult, DecoderError> {
    Ok(Decoder::new(lat, tables, cfg.clone())?.decode(syndrome, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        assert_eq!(default_tmax(10), 20);
        assert_eq!(default_noisy_period(10), 4);
        assert_eq!(default_noisy_period(8), 3);
        assert_eq!(default_noisy_period(2), 1);
        assert!(DecoderConfig::for_size(6).validate().is_ok());
    }

    #[test]
    fn rejects_non_permutation() {
        let mut c = DecoderConfig::for_size(4);
        c.order[1] = c.order[0];
        assert!(c.validate().is_err());
        let mut c = DecoderConfig::for_size(4);
        c.t_max = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn schedule_cycles() {
        let c = DecoderConfig::for_size(4);
        assert_eq!(c.perfect_direction(0), c.order[0]);
        assert_eq!(c.perfect_direction(4), c.order[1]);
        assert_eq!(c.perfect_direction(32), c.order[0]);
        assert_eq!(c.noisy_direction(2), c.order[1]);
    }

    #[test]
    fn empty_syndrome_decodes_to_nothing() {
        let lat = Lattice::cubic_periodic(3).unwrap();
        let t = Tables::build(&lat).unwrap();
        let r = sweep_decode(&lat, &t, lat.zero_checks(), &DecoderConfig::for_size(3), 0).unwrap();
        assert_eq!(r.outcome, Outcome::Corrected);
        assert!(r.correction.is_zero());
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn logical_representative_is_a_failure() {
        let lat = Lattice::rhombic_open(4).unwrap();
        assert!(is_logical_failure(&lat, &lat.logical_z()[0]).unwrap());
        assert!(!is_logical_failure(&lat, &lat.zero_qubits()).unwrap());
        let one = QubitSet::from_indices(lat.num_faces(), [0]);
        assert!(is_logical_failure(&lat, &one).is_err());
    }

    #[test]
    fn config_round_trips() {
        let c = DecoderConfig::for_size(5);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<DecoderConfig>(&s).unwrap(), c);
    }
}
