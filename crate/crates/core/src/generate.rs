//! Reproducible realizations of process specs.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::process::{Distribution, MarkovChain, ProcessSpec};
use crate::rng::{Seed, PATH_STREAM};
use crate::word::{Symbol, Word};

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("a mixture of distinct components has no typical sample path; use quasi_generic_path")]
    NonErgodic,
    #[error("block schedule must be at least 1")]
    BadSchedule,
}

/// A length-`n` realization of an ergodic spec. Markov paths start from the
/// stationary vector; periodic paths always start at phase 0.
pub fn sample_path(spec: &ProcessSpec, n: usize, seed: Seed) -> Result<Word, GenerateError> {
    let spec = match spec {
        ProcessSpec::Mixture(m) if m.is_degenerate() => &m.components()[0],
        ProcessSpec::Mixture(_) => return Err(GenerateError::NonErgodic),
        other => other,
    };
    let mut rng = seed.rng(PATH_STREAM);
    let mut out = Vec::with_capacity(n);
    extend_ergodic(spec, n, &mut rng, &mut out);
    Ok(Word::from_trusted(spec.alphabet(), out))
}

/// A length-`n` quasi-generic point for a mixture.
///
/// Components take turns: in round `j = 1, 2, ..` component `i` contributes a
/// freshly sampled block of `ceil(w_i * j * schedule)` symbols. Blocks grow
/// without bound while every round boundary sees the weights `w`, so block
/// frequencies along the round boundaries converge to the mixture's.
/// An ergodic spec is treated as a one-component mixture.
pub fn quasi_generic_path(
    spec: &ProcessSpec,
    n: usize,
    schedule: usize,
    seed: Seed,
) -> Result<Word, GenerateError> {
    if schedule == 0 {
        return Err(GenerateError::BadSchedule);
    }
    let single;
    let (weights, components): (&[f64], &[ProcessSpec]) = match spec {
        ProcessSpec::Mixture(m) => (m.weights(), m.components()),
        other => {
            single = [other.clone()];
            (&[1.0], &single)
        }
    };
    let mut rng = seed.rng(PATH_STREAM);
    let mut out = Vec::with_capacity(n);
    let mut round = 1usize;
    while out.len() < n {
        for (w, component) in weights.iter().zip(components) {
            let len = (w * (round * schedule) as f64).ceil() as usize;
            let len = len.min(n - out.len());
            extend_ergodic(component, len, &mut rng, &mut out);
            if out.len() == n {
                break;
            }
        }
        round += 1;
    }
    Ok(Word::from_trusted(spec.alphabet(), out))
}

/// Round boundaries of [`quasi_generic_path`]'s schedule up to `n`.
pub fn round_boundaries(weights: &[f64], n: usize, schedule: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    let mut round = 1usize;
    while pos < n && schedule > 0 {
        for w in weights {
            pos += (w * (round * schedule) as f64).ceil() as usize;
        }
        out.push(pos.min(n));
        round += 1;
    }
    out
}

fn extend_ergodic(spec: &ProcessSpec, len: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Symbol>) {
    match spec {
        ProcessSpec::Iid(d) => extend_iid(d, len, rng, out),
        ProcessSpec::Markov(c) => extend_markov(c, len, rng, out),
        ProcessSpec::Periodic(w) => out.extend(w.iter().copied().cycle().take(len)),
        ProcessSpec::Mixture(_) => unreachable!("mixtures are rejected or flattened by callers"),
    }
}

struct Cumulative(Vec<f64>);

impl Cumulative {
    fn new(p: &[f64]) -> Self {
        let mut acc = 0.0;
        Cumulative(
            p.iter()
                .map(|&x| {
                    acc += x;
                    acc
                })
                .collect(),
        )
    }

    #[inline]
    fn draw(&self, u: f64) -> Symbol {
        // Last index absorbs rounding in the running sum.
        let last = self.0.len() - 1;
        self.0[..last].iter().position(|&c| u < c).unwrap_or(last) as Symbol
    }
}

fn extend_iid(d: &Distribution, len: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Symbol>) {
    let cdf = Cumulative::new(d.probabilities());
    out.extend((0..len).map(|_| cdf.draw(rng.gen::<f64>())));
}

fn extend_markov(c: &MarkovChain, len: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Symbol>) {
    if len == 0 {
        return;
    }
    let initial = Cumulative::new(c.stationary());
    let rows: Vec<Cumulative> = c.transition().iter().map(|r| Cumulative::new(r)).collect();
    let mut state = initial.draw(rng.gen::<f64>());
    out.push(state);
    for _ in 1..len {
        state = rows[state as usize].draw(rng.gen::<f64>());
        out.push(state);
    }
}
