//! Shannon entropy primitives, sliding-window block censuses and plug-in
//! entropy-rate estimates.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::word::{bits_for, Symbol, Word};

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("probability {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("block length must be at least 1")]
    ZeroBlock,
    #[error("block length {m} needs a word of length at least {need}, got {n}")]
    WordTooShort { m: usize, n: usize, need: usize },
    #[error("{m} blocks of {bits}-bit symbols do not fit a 64-bit key")]
    KeyOverflow { m: usize, bits: u32 },
    #[error("conditional entropy needs censuses of lengths m and m - 1 over one alphabet, got {joint} and {marginal}")]
    Mismatched { joint: usize, marginal: usize },
}

/// `-t log t`, extended by continuity with `0 log 0 = 0`.
pub fn shannon_h(t: f64) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(EntropyError::OutOfRange(t));
    }
    Ok(if t == 0.0 { 0.0 } else { -t * t.ln() })
}

#[inline]
fn h_unchecked(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -t * t.ln()
    }
}

/// Largest entropy of a distribution on `1, 2, ..` with mean `1/p`, attained by
/// the geometric law: `(H(p) + H(1 - p)) / p`.
pub fn max_entropy_geometric(p: f64) -> Result<f64, EntropyError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(EntropyError::OutOfRange(p));
    }
    Ok((h_unchecked(p) + h_unchecked(1.0 - p)) / p)
}

/// Counts of every length-`m` window of a sequence.
///
/// Blocks are packed big-endian into `u64` keys, `bits` bits per letter, and
/// stored sorted by key so that every sum over the census runs in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCensus {
    m: usize,
    alphabet_size: usize,
    bits: u32,
    counts: Vec<(u64, u64)>,
    total: u64,
}

/// Dense tables are used up to this many key bits.
const DENSE_KEY_BITS: u32 = 22;
/// Words longer than this are counted in parallel shards.
const SHARD_LEN: usize = 1 << 18;

impl BlockCensus {
    pub fn of_word(w: &Word, m: usize) -> Result<Self, EntropyError> {
        Self::of_symbols(w.symbols(), w.alphabet().size(), m)
    }

    /// Census of a sequence over `0..alphabet_size`; letters may be wider than a
    /// byte (induced sequences use `u32` ids).
    pub fn of_symbols<S>(symbols: &[S], alphabet_size: usize, m: usize) -> Result<Self, EntropyError>
    where
        S: Copy + Into<u64> + Sync,
    {
        if m == 0 {
            return Err(EntropyError::ZeroBlock);
        }
        if m > symbols.len() {
            return Err(EntropyError::WordTooShort { m, n: symbols.len(), need: m });
        }
        let bits = bits_for(alphabet_size.max(1));
        if bits as usize * m > 64 {
            return Err(EntropyError::KeyOverflow { m, bits });
        }
        let key_bits = bits * m as u32;
        let windows = symbols.len() - m + 1;
        let shards: Vec<std::ops::Range<usize>> = (0..windows)
            .step_by(SHARD_LEN)
            .map(|start| start..(start + SHARD_LEN).min(windows))
            .collect();

        let counts = if key_bits <= DENSE_KEY_BITS {
            let merged = shards
                .par_iter()
                .map(|r| {
                    let mut table = vec![0u64; 1usize << key_bits];
                    for_each_key(&symbols[r.start..r.end + m - 1], m, bits, |k| table[k as usize] += 1);
                    table
                })
                .reduce_with(|mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                })
                .unwrap_or_default();
            merged
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(k, c)| (k as u64, c))
                .collect()
        } else {
            let merged = shards
                .par_iter()
                .map(|r| {
                    let mut table: HashMap<u64, u64> = HashMap::new();
                    for_each_key(&symbols[r.start..r.end + m - 1], m, bits, |k| *table.entry(k).or_default() += 1);
                    table
                })
                .reduce_with(|mut a, b| {
                    for (k, c) in b {
                        *a.entry(k).or_default() += c;
                    }
                    a
                })
                .unwrap_or_default();
            let mut v: Vec<(u64, u64)> = merged.into_iter().collect();
            v.sort_unstable();
            v
        };
        Ok(BlockCensus {
            m,
            alphabet_size,
            bits,
            counts,
            total: windows as u64,
        })
    }

    pub fn block_len(&self) -> usize {
        self.m
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct blocks observed.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, block: &[Symbol]) -> u64 {
        if block.len() != self.m {
            return 0;
        }
        let key = block.iter().fold(0u64, |k, &s| (k << self.bits) | s as u64);
        self.counts
            .binary_search_by_key(&key, |&(k, _)| k)
            .map_or(0, |i| self.counts[i].1)
    }

    /// Observed blocks with their counts, in key order.
    pub fn blocks(&self) -> impl Iterator<Item = (Vec<u64>, u64)> + '_ {
        let mask = (1u64 << self.bits) - 1;
        self.counts.iter().map(move |&(key, c)| {
            let block = (0..self.m)
                .rev()
                .map(|i| (key >> (i as u32 * self.bits)) & mask)
                .collect();
            (block, c)
        })
    }

    pub fn frequency(&self, block: &[Symbol]) -> f64 {
        self.count(block) as f64 / self.total as f64
    }

    /// Plug-in block entropy `sum H(count / total)`.
    pub fn entropy(&self) -> f64 {
        let total = self.total as f64;
        self.counts.iter().map(|&(_, c)| h_unchecked(c as f64 / total)).sum()
    }
}

fn for_each_key<S: Copy + Into<u64>>(symbols: &[S], m: usize, bits: u32, mut f: impl FnMut(u64)) {
    let mask = if bits as usize * m == 64 {
        u64::MAX
    } else {
        (1u64 << (bits as usize * m)) - 1
    };
    let mut key = 0u64;
    for (i, &s) in symbols.iter().enumerate() {
        key = ((key << bits) | s.into()) & mask;
        if i + 1 >= m {
            f(key);
        }
    }
}

pub fn block_census(w: &Word, m: usize) -> Result<BlockCensus, EntropyError> {
    BlockCensus::of_word(w, m)
}

pub fn empirical_entropy(census: &BlockCensus) -> f64 {
    census.entropy()
}

/// A finite-block entropy-rate estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub m: usize,
    /// Plug-in entropy of `m`-blocks, nats.
    pub h_m: f64,
    /// `h_m / m`.
    pub ratio: f64,
    /// `h_m - h_{m-1}`, the primary estimator.
    pub slope: f64,
    pub n: usize,
    /// Set when `m` exceeds the undersampling guard.
    pub undersampled: bool,
}

/// Largest block length with `m <= ln n / (2 ln l)`; unbounded for one-letter alphabets.
pub fn undersampling_guard(n: usize, alphabet_size: usize) -> usize {
    if alphabet_size <= 1 {
        return usize::MAX;
    }
    if n <= 1 {
        return 0;
    }
    ((n as f64).ln() / (2.0 * (alphabet_size as f64).ln())).floor() as usize
}

pub fn estimate_entropy_rate(w: &Word, m: usize) -> Result<EntropyEstimate, EntropyError> {
    estimate_symbols(w.symbols(), w.alphabet().size(), m)
}

/// [`estimate_entropy_rate`] for a sequence of wide letters.
pub fn estimate_symbols<S>(symbols: &[S], alphabet_size: usize, m: usize) -> Result<EntropyEstimate, EntropyError>
where
    S: Copy + Into<u64> + Sync,
{
    if m == 0 {
        return Err(EntropyError::ZeroBlock);
    }
    let n = symbols.len();
    if m + 1 > n {
        return Err(EntropyError::WordTooShort { m, n, need: m + 1 });
    }
    let (h_m, h_prev) = rayon::join(
        || BlockCensus::of_symbols(symbols, alphabet_size, m).map(|c| c.entropy()),
        || {
            if m == 1 {
                Ok(0.0)
            } else {
                BlockCensus::of_symbols(symbols, alphabet_size, m - 1).map(|c| c.entropy())
            }
        },
    );
    let (h_m, h_prev) = (h_m?, h_prev?);
    Ok(EntropyEstimate {
        m,
        h_m,
        ratio: h_m / m as f64,
        // Plug-in block entropies are monotone in m; clamp float noise only.
        slope: (h_m - h_prev).max(0.0),
        n,
        undersampled: m > undersampling_guard(n, alphabet_size),
    })
}

/// Estimates for every block length `1..=max_m`.
pub fn entropy_profile(w: &Word, max_m: usize) -> Result<Vec<EntropyEstimate>, EntropyError> {
    (1..=max_m).map(|m| estimate_entropy_rate(w, m)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalEntropy {
    /// `sum_u mu(u) H(next letter | u)` over the joint census, nats.
    pub nats: f64,
    /// False when the marginal census does not agree with the joint census's
    /// prefix counts up to the single boundary window.
    pub consistent: bool,
}

/// Entropy of the last letter of an `m`-block given the first `m - 1`.
pub fn conditional_entropy(joint: &BlockCensus, marginal: &BlockCensus) -> Result<ConditionalEntropy, EntropyError> {
    if joint.m != marginal.m + 1 || joint.alphabet_size != marginal.alphabet_size {
        return Err(EntropyError::Mismatched {
            joint: joint.m,
            marginal: marginal.m,
        });
    }
    let total = joint.total as f64;
    let mut nats = 0.0;
    let mut mismatch = 0u64;
    let mut marginal_iter = marginal.counts.iter().peekable();
    let mut i = 0;
    while i < joint.counts.len() {
        let prefix = joint.counts[i].0 >> joint.bits;
        let mut j = i;
        let mut group = 0u64;
        while j < joint.counts.len() && joint.counts[j].0 >> joint.bits == prefix {
            group += joint.counts[j].1;
            j += 1;
        }
        let g = group as f64;
        let h: f64 = joint.counts[i..j].iter().map(|&(_, c)| h_unchecked(c as f64 / g)).sum();
        nats += (g / total) * h;

        while let Some(&&(k, c)) = marginal_iter.peek() {
            if k < prefix {
                mismatch += c;
                marginal_iter.next();
            } else {
                break;
            }
        }
        match marginal_iter.peek() {
            Some(&&(k, c)) if k == prefix => {
                mismatch += c.abs_diff(group);
                marginal_iter.next();
            }
            _ => mismatch += group,
        }
        i = j;
    }
    mismatch += marginal_iter.map(|&(_, c)| c).sum::<u64>();
    Ok(ConditionalEntropy {
        nats,
        consistent: marginal.total == joint.total + 1 && mismatch <= 1,
    })
}

/// Entropy of the prefix marginal of a census (its `m - 1` leading letters).
pub fn prefix_marginal_entropy(joint: &BlockCensus) -> f64 {
    let total = joint.total as f64;
    let mut h = 0.0;
    let mut i = 0;
    while i < joint.counts.len() {
        let prefix = joint.counts[i].0 >> joint.bits;
        let mut group = 0u64;
        while i < joint.counts.len() && joint.counts[i].0 >> joint.bits == prefix {
            group += joint.counts[i].1;
            i += 1;
        }
        h += h_unchecked(group as f64 / total);
    }
    h
}

/// Converts nats to the requested unit.
pub fn in_unit(nats: f64, bits: bool) -> f64 {
    if bits {
        nats / std::f64::consts::LN_2
    } else {
        nats
    }
}
