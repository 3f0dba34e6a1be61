//! Executable causal models of a Bell scenario with N setting mechanisms
//! per wing, and two exact measures of superdeterministic conspiracy:
//!
//! * the overhead fine-tuning parameter F, from exact counting of
//!   hidden-variables configurations on a discretized probability simplex
//!   ([`finetune`]);
//! * the spontaneous drop of the sub-ensemble sequence entropy, equal to
//!   minus the mutual information between the sequence and the
//!   experimenters' choices ([`entropy`]).
//!
//! Probabilities are exact rationals and counts are big integers throughout;
//! floating point appears only in log-space reports and entropy values.
//! Hot loops (configuration counting, simulation, dense entropy sums) run on
//! rayon with the default `parallel` feature and fall back to plain iterators
//! without it; results are identical either way.

pub mod entropy;
pub mod error;
pub mod exact;
pub mod finetune;
pub mod kernel;
pub mod modelfile;
pub mod models;
pub mod montecarlo;
pub mod par;
pub mod rng;
pub mod scenario;
pub mod simplex;

pub use error::{Error, Result};

// Big-integer and rational types appear throughout the public API.
pub use num_bigint;
pub use num_rational;
pub use num_traits;
