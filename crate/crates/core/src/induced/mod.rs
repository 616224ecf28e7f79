//! Return times, induced names and related checks on words.
//!
//! A [`MarkedSet`] picks a set `S` of letters; the marked positions of a word
//! are those holding a letter of `S`. Consecutive marked positions
//! `p_{k-1} < p_k` cut the word into return words `w(p_{k-1}, p_k]`, each
//! ending in its only marked letter, and the gaps `p_k - p_{k-1}` are the
//! return times.

mod abramov;
mod adapted;

use std::collections::BTreeMap;

use thiserror::Error;

pub use abramov::{abramov_check, AbramovEstimate, AbramovOptions};
pub use adapted::{decode_adapted_name, encode_adapted_name, AdaptedError, AdaptedName};

use crate::word::{Alphabet, Symbol, Word};

#[derive(Debug, Error, PartialEq)]
pub enum InducedError {
    #[error("marked set must contain at least one letter")]
    EmptyMark,
    #[error("marked letter {0} is outside an alphabet of size {1}")]
    MarkOutOfRange(usize, usize),
    #[error("marked set not visited enough: {0} visit(s), need at least 2")]
    NotVisitedEnough(usize),
    #[error("return-time census is empty")]
    EmptyCensus,
    #[error("empirical density of the marked set is zero")]
    ZeroDensity,
    #[error("induced sequence has {returns} returns, need at least {need} for block length {m}")]
    InsufficientData { returns: usize, need: usize, m: usize },
    #[error(transparent)]
    Entropy(#[from] crate::entropy::EntropyError),
}

/// A union of one-letter cylinders: positions whose letter lies in `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSet {
    alphabet: Alphabet,
    members: [bool; 256],
}

impl MarkedSet {
    pub fn new(alphabet: Alphabet, letters: &[Symbol]) -> Result<Self, InducedError> {
        if letters.is_empty() {
            return Err(InducedError::EmptyMark);
        }
        let mut members = [false; 256];
        for &s in letters {
            if !alphabet.contains(s) {
                return Err(InducedError::MarkOutOfRange(s as usize, alphabet.size()));
            }
            members[s as usize] = true;
        }
        Ok(MarkedSet { alphabet, members })
    }

    /// Every letter marked: inducing is the identity.
    pub fn full(alphabet: Alphabet) -> Self {
        let mut members = [false; 256];
        members[..alphabet.size()].iter_mut().for_each(|m| *m = true);
        MarkedSet { alphabet, members }
    }

    #[inline]
    pub fn contains(&self, s: Symbol) -> bool {
        self.members[s as usize]
    }

    pub fn letters(&self) -> Vec<Symbol> {
        self.alphabet.symbols().filter(|&s| self.contains(s)).collect()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn is_full(&self) -> bool {
        self.alphabet.symbols().all(|s| self.contains(s))
    }

    /// Fraction of positions of `w` in the marked set.
    pub fn density(&self, w: &[Symbol]) -> f64 {
        if w.is_empty() {
            return 0.0;
        }
        w.iter().filter(|&&s| self.contains(s)).count() as f64 / w.len() as f64
    }

    pub fn positions<'a>(&'a self, w: &'a [Symbol]) -> impl Iterator<Item = usize> + 'a {
        w.iter()
            .enumerate()
            .filter(move |(_, &s)| self.contains(s))
            .map(|(i, _)| i)
    }
}

/// The induced view of a word: its marked positions, return times and return words.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedName<'a> {
    base: &'a [Symbol],
    entry_positions: Vec<usize>,
    return_times: Vec<usize>,
}

impl<'a> InducedName<'a> {
    /// Marked positions in increasing order; the `N`-th entry is the time of the `N`-th return.
    pub fn entry_positions(&self) -> &[usize] {
        &self.entry_positions
    }

    pub fn return_times(&self) -> &[usize] {
        &self.return_times
    }

    pub fn base_length(&self) -> usize {
        self.base.len()
    }

    /// Number of return words.
    pub fn returns(&self) -> usize {
        self.return_times.len()
    }

    /// Span between the first and last marked positions; equals the sum of return times.
    pub fn span(&self) -> usize {
        self.entry_positions.last().unwrap() - self.entry_positions[0]
    }

    /// `w(p_{k-1}, p_k]` for each consecutive pair of marked positions.
    pub fn return_words(&self) -> impl Iterator<Item = &'a [Symbol]> + '_ {
        self.entry_positions.windows(2).map(|p| &self.base[p[0] + 1..=p[1]])
    }

    pub fn census(&self) -> ReturnTimeCensus {
        ReturnTimeCensus::from_times(&self.return_times)
    }
}

pub fn induce<'a>(w: &'a Word, mark: &MarkedSet) -> Result<InducedName<'a>, InducedError> {
    induce_symbols(w.symbols(), mark)
}

pub(crate) fn induce_symbols<'a>(w: &'a [Symbol], mark: &MarkedSet) -> Result<InducedName<'a>, InducedError> {
    let entry_positions: Vec<usize> = mark.positions(w).collect();
    if entry_positions.len() < 2 {
        return Err(InducedError::NotVisitedEnough(entry_positions.len()));
    }
    let return_times = entry_positions.windows(2).map(|p| p[1] - p[0]).collect();
    Ok(InducedName {
        base: w,
        entry_positions,
        return_times,
    })
}

/// Empirical masses of the return-time partition: `count(r) / K` over `K` returns.
///
/// The entry-time partition of the same word has the same masses (each entry
/// time is the return time of the preceding marked position), so one census
/// serves both.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReturnTimeCensus {
    counts: BTreeMap<usize, u64>,
    returns: u64,
}

impl ReturnTimeCensus {
    pub fn from_times(times: &[usize]) -> Self {
        let mut counts = BTreeMap::new();
        for &t in times {
            *counts.entry(t).or_insert(0) += 1;
        }
        ReturnTimeCensus {
            counts,
            returns: times.len() as u64,
        }
    }

    pub fn returns(&self) -> u64 {
        self.returns
    }

    pub fn is_empty(&self) -> bool {
        self.returns == 0
    }

    pub fn count(&self, r: usize) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }

    pub fn mass(&self, r: usize) -> f64 {
        self.count(r) as f64 / self.returns as f64
    }

    /// `(r, count, mass)` in increasing `r`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64, f64)> + '_ {
        let k = self.returns as f64;
        self.counts.iter().map(move |(&r, &c)| (r, c, c as f64 / k))
    }

    pub fn max_return(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Mass of return times strictly above `cap`.
    pub fn tail_mass(&self, cap: usize) -> f64 {
        let tail: u64 = self.counts.range(cap + 1..).map(|(_, &c)| c).sum();
        tail as f64 / self.returns as f64
    }

    /// `sum r * mass(r)`.
    pub fn mean(&self) -> f64 {
        let total: u128 = self.counts.iter().map(|(&r, &c)| r as u128 * c as u128).sum();
        total as f64 / self.returns as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KacCheck {
    pub mean_return: f64,
    /// `|mean_return - 1 / mu_e_hat|`.
    pub kac_residual: f64,
}

/// Compares the mean return time with `1 / mu(E)`.
pub fn kac_check(rtc: &ReturnTimeCensus, mu_e_hat: f64) -> Result<KacCheck, InducedError> {
    if rtc.is_empty() {
        return Err(InducedError::EmptyCensus);
    }
    if mu_e_hat.is_nan() || mu_e_hat <= 0.0 {
        return Err(InducedError::ZeroDensity);
    }
    let mean_return = rtc.mean();
    Ok(KacCheck {
        mean_return,
        kac_residual: (mean_return - 1.0 / mu_e_hat).abs(),
    })
}
