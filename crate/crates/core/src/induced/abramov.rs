//! Numerical check of `h(T) = mu(E) h(T_E)` on a single word.

use std::collections::HashMap;

use super::{induce_symbols, InducedError, MarkedSet};
use crate::entropy::{estimate_symbols, undersampling_guard};
use crate::word::{bits_for, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbramovOptions {
    /// Return words longer than this share one overflow letter.
    pub r_max: usize,
    /// Cap on the block length used on the induced sequence.
    pub max_induced_block: usize,
    /// An unmarked run longer than this fraction of the word is excised.
    pub dirac_threshold: f64,
    /// Overflow mass above which the estimate is flagged.
    pub overflow_flag: f64,
}

impl Default for AbramovOptions {
    fn default() -> Self {
        AbramovOptions {
            r_max: 32,
            max_induced_block: 4,
            dirac_threshold: 0.5,
            overflow_flag: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbramovEstimate {
    /// Slope estimate on the base word, nats.
    pub h_base: f64,
    /// Slope estimate on the induced return-word sequence, nats per return.
    pub h_induced: f64,
    pub mu_e_hat: f64,
    /// `|h_base - mu_e_hat * h_induced|`.
    pub residual: f64,
    pub m_base: usize,
    pub m_induced: usize,
    /// Number of return words.
    pub returns: usize,
    /// Distinct letters realized on the induced sequence (overflow included).
    pub induced_alphabet: usize,
    /// Fraction of return words longer than `r_max`.
    pub overflow_mass: f64,
    /// Fraction of the word removed as one long unmarked run.
    pub alpha_hat: f64,
    pub max_return: usize,
    pub mean_return: f64,
    /// Overflow mass above the configured limit.
    pub flagged: bool,
}

/// Longest run of unmarked letters, as `(start, len)`.
fn longest_unmarked_run(w: &[Symbol], mark: &MarkedSet) -> (usize, usize) {
    let mut best = (0, 0);
    let mut start = 0;
    for (i, &s) in w.iter().enumerate() {
        if mark.contains(s) {
            start = i + 1;
        } else if i + 1 - start > best.1 {
            best = (start, i + 1 - start);
        }
    }
    best
}

/// Estimates both sides of the Abramov formula.
///
/// The base rate is the slope estimator at block length `m`. The induced
/// sequence replaces each return word by an id (words longer than `r_max`
/// share an overflow id) and is estimated at
/// `min(m, max_induced_block, guard)` where `guard` is the undersampling
/// bound for the number of returns and the realized induced alphabet. When
/// every letter of the word is marked the induced sequence is the word itself
/// and both sides use the same estimate.
pub fn abramov_check(
    w: &Word,
    mark: &MarkedSet,
    m: usize,
    opts: &AbramovOptions,
) -> Result<AbramovEstimate, InducedError> {
    let n = w.len();
    let (run_start, run_len) = longest_unmarked_run(w, mark);
    let excised: Vec<Symbol>;
    let (symbols, alpha_hat): (&[Symbol], f64) = if n > 0 && run_len as f64 > opts.dirac_threshold * n as f64 {
        excised = [&w[..run_start], &w[run_start + run_len..]].concat();
        (&excised, run_len as f64 / n as f64)
    } else {
        (w.symbols(), 0.0)
    };

    let name = induce_symbols(symbols, mark)?;
    let returns = name.returns();
    let need = 10usize.saturating_mul(w.alphabet().size().saturating_pow(m as u32));
    if returns < need {
        return Err(InducedError::InsufficientData { returns, need, m });
    }
    let census = name.census();
    let mu_e_hat = mark.density(symbols);
    let trivial = census.max_return() == 1;

    let (base, induced) = if trivial {
        let base = estimate_symbols(symbols, w.alphabet().size(), m)?;
        (base, (base, w.alphabet().size()))
    } else {
        const OVERFLOW: u32 = 0;
        let mut ids: HashMap<&[Symbol], u32> = HashMap::new();
        let mut overflow_seen = false;
        let seq: Vec<u32> = name
            .return_words()
            .map(|rw| {
                if rw.len() > opts.r_max {
                    overflow_seen = true;
                    OVERFLOW
                } else {
                    let next = ids.len() as u32 + 1;
                    *ids.entry(rw).or_insert(next)
                }
            })
            .collect();
        let alphabet = ids.len() + 1;
        let realized = ids.len() + overflow_seen as usize;
        let key_cap = (64 / bits_for(alphabet)) as usize;
        let m_ind = m
            .min(opts.max_induced_block)
            .min(undersampling_guard(seq.len(), realized))
            .min(key_cap)
            .max(1);
        let (base, induced) = rayon::join(
            || estimate_symbols(symbols, w.alphabet().size(), m),
            || estimate_symbols(&seq, alphabet, m_ind),
        );
        (base?, (induced?, realized))
    };
    let (induced, induced_alphabet) = induced;
    let overflow_mass = census.tail_mass(opts.r_max);
    Ok(AbramovEstimate {
        h_base: base.slope,
        h_induced: induced.slope,
        mu_e_hat,
        residual: (base.slope - mu_e_hat * induced.slope).abs(),
        m_base: m,
        m_induced: induced.m,
        returns,
        induced_alphabet,
        overflow_mass,
        alpha_hat,
        max_return: census.max_return(),
        mean_return: census.mean(),
        flagged: overflow_mass > opts.overflow_flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::sample_path;
    use crate::process::ProcessSpec;
    use crate::rng::Seed;
    use crate::word::Alphabet;

    #[test]
    fn trivial_induction_has_zero_residual() {
        let spec = ProcessSpec::bernoulli(0.3).unwrap();
        let w = sample_path(&spec, 50_000, Seed(1)).unwrap();
        let est = abramov_check(&w, &MarkedSet::full(w.alphabet()), 6, &AbramovOptions::default()).unwrap();
        assert_eq!(est.mu_e_hat, 1.0);
        assert_eq!(est.residual, 0.0);
        assert_eq!(est.h_base, est.h_induced);
    }

    #[test]
    fn periodic_word_has_zero_entropies() {
        let w = Word::parse_digits(&"0012".repeat(5_000)).unwrap();
        let mark = MarkedSet::new(w.alphabet(), &[2]).unwrap();
        let est = abramov_check(&w, &mark, 3, &AbramovOptions::default()).unwrap();
        assert!(est.h_base.abs() < 1e-9);
        assert!(est.h_induced.abs() < 1e-9);
        assert!(est.residual < 1e-9);
        assert_eq!(est.mean_return, 4.0);
    }

    #[test]
    fn long_unmarked_run_is_excised() {
        let mut symbols = vec![0u8; 30_000];
        symbols.extend((0..20_000).map(|i| (i % 2) as u8));
        let w = Word::new(Alphabet::binary(), symbols).unwrap();
        let mark = MarkedSet::new(w.alphabet(), &[1]).unwrap();
        let est = abramov_check(&w, &mark, 2, &AbramovOptions::default()).unwrap();
        assert!((est.alpha_hat - 0.6).abs() < 1e-4);
        assert!((est.mu_e_hat - 0.5).abs() < 1e-3);
        assert_eq!(est.max_return, 2);
    }

    #[test]
    fn overflow_is_flagged() {
        let mut symbols = Vec::new();
        for k in 0..3000 {
            symbols.extend(std::iter::repeat(0u8).take(if k % 10 == 0 { 40 } else { 1 }));
            symbols.push(1);
        }
        let w = Word::new(Alphabet::binary(), symbols).unwrap();
        let mark = MarkedSet::new(w.alphabet(), &[1]).unwrap();
        let est = abramov_check(&w, &mark, 2, &AbramovOptions::default()).unwrap();
        assert!(est.overflow_mass > 0.09);
        assert!(est.flagged);
    }

    #[test]
    fn short_words_are_rejected() {
        let w = Word::parse_digits(&"01".repeat(100)).unwrap();
        let mark = MarkedSet::new(w.alphabet(), &[1]).unwrap();
        assert!(matches!(
            abramov_check(&w, &mark, 8, &AbramovOptions::default()),
            Err(InducedError::InsufficientData { .. })
        ));
    }
}
