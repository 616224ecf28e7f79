//! Inputs shared by the benchmarks.

use shiftdist::{sample_path, ProcessSpec, Seed, Word};

/// A uniform IID word over `l` letters.
pub fn uniform_word(n: usize, l: usize, seed: u64) -> Word {
    let spec = ProcessSpec::iid(vec![1.0 / l as f64; l]).expect("uniform law is valid");
    sample_path(&spec, n, Seed(seed)).expect("IID specs are ergodic")
}

/// A path of the two-state chain used throughout the experiments.
pub fn markov_word(n: usize, seed: u64) -> Word {
    let spec = ProcessSpec::markov(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).expect("valid chain");
    sample_path(&spec, n, Seed(seed)).expect("chain is ergodic")
}
