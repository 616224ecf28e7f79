//! Tools for finite-alphabet symbolic sequences.
//!
//! The crate is organised around a handful of layers:
//!
//! * [`word`], [`process`], [`rng`] and [`generate`]: alphabets, words, stationary
//!   process descriptions and reproducible generation of typical and quasi-generic
//!   realizations.
//! * [`metrics`]: the Hamming (d-bar) and edit (f-bar) pseudodistances on words,
//!   distance profiles over prefixes, and match certificates.
//! * [`entropy`]: block censuses, plug-in block entropies and entropy-rate estimates.
//! * [`induced`]: return times, induced names, the zero-insertion encoding of
//!   adapted names and numerical checks of the Kac lemma and the Abramov formula.
//! * [`channels`]: perturbation channels producing close pairs of sequences, the
//!   characteristic-sequence decomposition and the explicit entropy budget.
//! * [`harness`]: config-driven seeded experiments with CSV and SVG output.
//!
//! All entropies are in nats.

pub mod channels;
pub mod entropy;
pub mod generate;
pub mod harness;
pub mod induced;
pub mod metrics;
pub mod process;
pub mod rng;
pub mod word;

pub use channels::{budget, ChannelKind, ProofTriple};
pub use entropy::{shannon_h, BlockCensus, EntropyEstimate};
pub use generate::{quasi_generic_path, sample_path};
pub use induced::{InducedName, MarkedSet, ReturnTimeCensus};
pub use metrics::{DistanceProfile, MatchCertificate};
pub use process::ProcessSpec;
pub use rng::Seed;
pub use word::{Alphabet, Symbol, Word};
