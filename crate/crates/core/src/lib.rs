//! Causal structure learning over truncated Legendre expansions.
//!
//! Continuous variables are scaled to `[-1, 1]` and replaced by the Legendre
//! terms `P_1..P_p`; categorical variables become `c - 1` indicator columns.
//! On top of that embedding the crate provides a decomposable BIC score
//! ([`score`]), a likelihood-ratio CI test ([`citest`]), the BOSS and PC-Max
//! searches ([`search`]), data simulators ([`sim`]) and graph metrics
//! ([`metrics`]).

pub mod bench;
pub mod citest;
pub mod data;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod run;
pub mod score;
pub mod search;
pub mod sim;

pub use error::{Error, Result};
