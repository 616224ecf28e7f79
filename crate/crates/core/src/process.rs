//! Declarative descriptions of stationary processes on a finite alphabet.
//!
//! A spec file is a small TOML document keyed by `kind`:
//!
//! ```toml
//! kind = "markov"
//! transition = [[0.9, 0.1], [0.2, 0.8]]
//! ```
//!
//! Other kinds are `iid` (`probabilities = [..]`), `periodic`
//! (`period = "01"` or `period = [0, 1]`, optional `alphabet = l`) and `mixture`
//! (`weights = [..]` plus one `[[components]]` table per component).

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::entropy::shannon_h;
use crate::word::{Alphabet, Symbol, Word, WordError};

/// Tolerance on probability vectors summing to one.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
/// Tolerance on `pi P = pi` for the stationary vector of a chain.
pub const STATIONARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("probability vector is empty")]
    Empty,
    #[error("probability vector has a negative or non-finite entry {0}")]
    BadEntry(f64),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("transition matrix must be square, row {row} has {len} entries for {size} states")]
    NotSquare { row: usize, len: usize, size: usize },
    #[error("transition matrix has no unique stationary distribution")]
    NoUniqueStationary,
    #[error("mixture weights must lie in (0, 1], got {0}")]
    BadWeight(f64),
    #[error("mixture has {weights} weights for {components} components")]
    WeightCount { weights: usize, components: usize },
    #[error("mixture components must be ergodic (iid, markov or periodic)")]
    NestedMixture,
    #[error("periodic word must be non-empty")]
    EmptyPeriod,
    #[error("alphabet size {0} is not supported")]
    Alphabet(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("invalid spec file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn check_distribution(p: &[f64]) -> Result<(), SpecError> {
    if p.is_empty() {
        return Err(SpecError::Empty);
    }
    if let Some(&bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(SpecError::BadEntry(bad));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(SpecError::NotNormalized(sum));
    }
    Ok(())
}

/// A probability vector over `0..l`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self, SpecError> {
        check_distribution(&p)?;
        if p.len() > crate::word::MAX_ALPHABET {
            return Err(SpecError::Alphabet(p.len()));
        }
        Ok(Distribution(p))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn entropy(&self) -> f64 {
        self.0.iter().map(|&p| shannon_h(p).unwrap_or(0.0)).sum()
    }
}

/// A row-stochastic transition matrix together with its stationary vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain {
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl MarkovChain {
    pub fn new(transition: Vec<Vec<f64>>) -> Result<Self, SpecError> {
        let size = transition.len();
        if size == 0 {
            return Err(SpecError::Empty);
        }
        if size > crate::word::MAX_ALPHABET {
            return Err(SpecError::Alphabet(size));
        }
        for (row, r) in transition.iter().enumerate() {
            if r.len() != size {
                return Err(SpecError::NotSquare { row, len: r.len(), size });
            }
            check_distribution(r)?;
        }
        let stationary = stationary_vector(&transition).ok_or(SpecError::NoUniqueStationary)?;
        let chain = MarkovChain { transition, stationary };
        if chain.stationarity_defect() > STATIONARITY_TOLERANCE {
            return Err(SpecError::NoUniqueStationary);
        }
        Ok(chain)
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// `max_j |(pi P)_j - pi_j|`.
    pub fn stationarity_defect(&self) -> f64 {
        let l = self.transition.len();
        (0..l)
            .map(|j| {
                let pj: f64 = (0..l).map(|i| self.stationary[i] * self.transition[i][j]).sum();
                (pj - self.stationary[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn entropy(&self) -> f64 {
        self.stationary
            .iter()
            .zip(&self.transition)
            .map(|(&pi, row)| pi * row.iter().map(|&p| shannon_h(p).unwrap_or(0.0)).sum::<f64>())
            .sum()
    }
}

/// Solves `pi (P - I) = 0`, `sum pi = 1` by Gaussian elimination with partial
/// pivoting. Returns `None` when the solution is not unique.
fn stationary_vector(p: &[Vec<f64>]) -> Option<Vec<f64>> {
    let l = p.len();
    // Rows of the augmented system A x = b with A = (P^T - I), last row replaced by ones.
    let mut a: Vec<Vec<f64>> = (0..l)
        .map(|i| {
            let mut row: Vec<f64> = (0..l).map(|j| p[j][i] - if i == j { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    a[l - 1] = vec![1.0; l + 1];
    for col in 0..l {
        let pivot = (col..l).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..l {
            if row != col {
                let factor = a[row][col] / a[col][col];
                if factor != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= factor * p;
                    }
                }
            }
        }
    }
    let pi: Vec<f64> = (0..l).map(|i| (a[i][l] / a[i][i]).max(0.0)).collect();
    let sum: f64 = pi.iter().sum();
    Some(pi.into_iter().map(|x| x / sum).collect())
}

/// Weighted combination of ergodic components.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    weights: Vec<f64>,
    components: Vec<ProcessSpec>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>, components: Vec<ProcessSpec>) -> Result<Self, SpecError> {
        if weights.len() != components.len() {
            return Err(SpecError::WeightCount {
                weights: weights.len(),
                components: components.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0 && w <= 1.0)) {
            return Err(SpecError::BadWeight(w));
        }
        check_distribution(&weights)?;
        if components.iter().any(|c| matches!(c, ProcessSpec::Mixture(_))) {
            return Err(SpecError::NestedMixture);
        }
        Ok(Mixture { weights, components })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[ProcessSpec] {
        &self.components
    }

    /// True when every component is the same process.
    pub fn is_degenerate(&self) -> bool {
        self.components.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessSpec {
    Iid(Distribution),
    Markov(MarkovChain),
    Mixture(Mixture),
    Periodic(Word),
}

impl ProcessSpec {
    pub fn iid(p: impl Into<Vec<f64>>) -> Result<Self, SpecError> {
        Ok(ProcessSpec::Iid(Distribution::new(p.into())?))
    }

    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self, SpecError> {
        Ok(ProcessSpec::Markov(MarkovChain::new(transition)?))
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<ProcessSpec>) -> Result<Self, SpecError> {
        Ok(ProcessSpec::Mixture(Mixture::new(weights, components)?))
    }

    pub fn periodic(period: Word) -> Result<Self, SpecError> {
        if period.is_empty() {
            return Err(SpecError::EmptyPeriod);
        }
        Ok(ProcessSpec::Periodic(period))
    }

    /// Periodic spec from a digit string, over the smallest alphabet that fits.
    pub fn periodic_digits(period: &str) -> Result<Self, SpecError> {
        ProcessSpec::periodic(Word::parse_digits(period)?)
    }

    /// Bernoulli process with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self, SpecError> {
        ProcessSpec::iid(vec![1.0 - p, p])
    }

    pub fn alphabet(&self) -> Alphabet {
        let size = match self {
            ProcessSpec::Iid(d) => d.0.len(),
            ProcessSpec::Markov(c) => c.transition.len(),
            ProcessSpec::Periodic(w) => return w.alphabet(),
            ProcessSpec::Mixture(m) => {
                return m.components.iter().map(ProcessSpec::alphabet).max().expect("nonempty mixture")
            }
        };
        Alphabet::new(size).expect("validated at construction")
    }

    pub fn is_ergodic(&self) -> bool {
        match self {
            ProcessSpec::Mixture(m) => m.is_degenerate(),
            _ => true,
        }
    }

    /// Entropy rate in nats per symbol. Mixtures are handled by affinity.
    pub fn analytic_entropy(&self) -> f64 {
        match self {
            ProcessSpec::Iid(d) => d.entropy(),
            ProcessSpec::Markov(c) => c.entropy(),
            ProcessSpec::Periodic(_) => 0.0,
            ProcessSpec::Mixture(m) => m
                .weights
                .iter()
                .zip(&m.components)
                .map(|(w, c)| w * c.analytic_entropy())
                .sum(),
        }
    }

    /// Stationary probability of the cylinder `[block]`.
    pub fn block_probability(&self, block: &[Symbol]) -> f64 {
        match self {
            ProcessSpec::Iid(d) => block
                .iter()
                .map(|&s| d.0.get(s as usize).copied().unwrap_or(0.0))
                .product(),
            ProcessSpec::Markov(c) => {
                let Some((&first, rest)) = block.split_first() else {
                    return 1.0;
                };
                let l = c.transition.len();
                if first as usize >= l || rest.iter().any(|&s| s as usize >= l) {
                    return 0.0;
                }
                let mut p = c.stationary[first as usize];
                let mut prev = first as usize;
                for &s in rest {
                    p *= c.transition[prev][s as usize];
                    prev = s as usize;
                }
                p
            }
            ProcessSpec::Periodic(w) => {
                let period = w.len();
                let hits = (0..period)
                    .filter(|&phase| block.iter().enumerate().all(|(k, &s)| w[(phase + k) % period] == s))
                    .count();
                hits as f64 / period as f64
            }
            ProcessSpec::Mixture(m) => m
                .weights
                .iter()
                .zip(&m.components)
                .map(|(w, c)| w * c.block_probability(block))
                .sum(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, SpecError> {
        let file: SpecFile = toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        file.build()
    }

    pub fn from_file(path: &Path) -> Result<Self, SpecError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

/// Serialized form of a [`ProcessSpec`].
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpecFile {
    Iid {
        probabilities: Vec<f64>,
    },
    Markov {
        transition: Vec<Vec<f64>>,
    },
    Periodic {
        period: PeriodWord,
        #[serde(default)]
        alphabet: Option<usize>,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<SpecFile>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PeriodWord {
    Digits(String),
    Symbols(Vec<usize>),
}

impl SpecFile {
    pub fn build(self) -> Result<ProcessSpec, SpecError> {
        match self {
            SpecFile::Iid { probabilities } => ProcessSpec::iid(probabilities),
            SpecFile::Markov { transition } => ProcessSpec::markov(transition),
            SpecFile::Periodic { period, alphabet } => {
                let symbols: Vec<usize> = match period {
                    PeriodWord::Digits(s) => Word::parse_digits(&s)?.iter().map(|&x| x as usize).collect(),
                    PeriodWord::Symbols(v) => v,
                };
                let fit = symbols.iter().copied().max().map_or(1, |m| m + 1).max(2);
                let size = alphabet.unwrap_or(fit);
                let alphabet = Alphabet::new(size).map_err(|_| SpecError::Alphabet(size))?;
                let symbols = symbols
                    .into_iter()
                    .map(|s| u8::try_from(s).map_err(|_| SpecError::Alphabet(s + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                ProcessSpec::periodic(Word::new(alphabet, symbols)?)
            }
            SpecFile::Mixture { weights, components } => ProcessSpec::mixture(
                weights,
                components.into_iter().map(SpecFile::build).collect::<Result<_, _>>()?,
            ),
        }
    }
}
