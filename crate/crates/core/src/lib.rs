//! Sweep-rule cellular-automaton decoding of 3D toric codes.

pub mod audit;
pub mod bits;
pub mod lattice;
pub mod causal;
pub mod cli;
pub mod sweep;
pub mod decoder;
pub mod experiment;
pub mod noise;
pub mod seed;
