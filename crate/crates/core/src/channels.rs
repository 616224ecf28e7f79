//! Perturbation channels producing close pairs of sequences, the
//! characteristic-sequence decomposition of a word along a matched set, and
//! the explicit entropy budget used by the continuity experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entropy::shannon_h;
use crate::metrics::MatchCertificate;
use crate::rng::{Seed, CHANNEL_STREAM};
use crate::word::{Alphabet, Symbol, Word};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("channel rate {0} is outside the allowed range")]
    BadRate(f64),
    #[error("alphabet size must be at least {need}, got {got}")]
    SmallAlphabet { need: usize, got: usize },
    #[error("the decomposition needs letters labelled 1..=l; found 0 at position {0}")]
    ZeroLetter(usize),
    #[error("matched index {0} is out of bounds or not increasing")]
    BadIndex(usize),
    #[error("deletion index {0} is out of bounds or not increasing")]
    BadDeletion(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    #[serde(alias = "sub")]
    Substitution,
    #[serde(alias = "indel", alias = "deletion-insertion")]
    Indel,
}

impl std::str::FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sub" | "substitution" => Ok(ChannelKind::Substitution),
            "indel" | "deletion-insertion" => Ok(ChannelKind::Indel),
            other => Err(format!("unknown channel {other:?} (expected sub or indel)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub rate: f64,
    pub seed: Seed,
}

/// Resamples each position with probability `eps`, uniformly among the other
/// letters. Returns the output and the sorted list of changed positions.
///
/// Every position consumes the same two draws whatever `eps` is, so outputs for
/// different rates under one seed are coupled: the changed set grows with `eps`.
pub fn substitute_channel(x: &Word, eps: f64, seed: Seed) -> Result<(Word, Vec<usize>), ChannelError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(ChannelError::BadRate(eps));
    }
    let l = x.alphabet().size();
    if l < 2 && eps > 0.0 {
        return Err(ChannelError::SmallAlphabet { need: 2, got: l });
    }
    let mut rng = seed.rng(CHANNEL_STREAM);
    let mut changed = Vec::new();
    let symbols: Vec<Symbol> = x
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let u: f64 = rng.gen();
            let r = if l > 1 { rng.gen_range(0..l - 1) as Symbol } else { 0 };
            if u < eps {
                changed.push(j);
                if r >= s {
                    r + 1
                } else {
                    r
                }
            } else {
                s
            }
        })
        .collect();
    Ok((Word::from_trusted(x.alphabet(), symbols), changed))
}

/// Deletes each letter with probability `eps / 2` and inserts a uniform letter
/// before each position with probability `eps / 2`, then truncates or pads
/// with uniform letters back to `|x|`.
///
/// The certificate pairs every surviving original letter with its position in
/// the output, so `f_n(x, y) <= 1 - |cert| / n`.
pub fn indel_channel(x: &Word, eps: f64, seed: Seed) -> Result<(Word, MatchCertificate), ChannelError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(ChannelError::BadRate(eps));
    }
    let l = x.alphabet().size();
    let n = x.len();
    let mut rng = seed.rng(CHANNEL_STREAM);
    let half = eps / 2.0;
    let mut out: Vec<Symbol> = Vec::with_capacity(n + n / 16);
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for (j, &s) in x.iter().enumerate() {
        let insert: f64 = rng.gen();
        let delete: f64 = rng.gen();
        let letter = rng.gen_range(0..l) as Symbol;
        if insert < half {
            out.push(letter);
        }
        if delete >= half {
            left.push(j);
            right.push(out.len());
            out.push(s);
        }
    }
    out.truncate(n);
    while out.len() < n {
        out.push(rng.gen_range(0..l) as Symbol);
    }
    let keep = right.partition_point(|&p| p < n);
    left.truncate(keep);
    right.truncate(keep);
    let cert = MatchCertificate::new(left, right).expect("indices are increasing by construction");
    Ok((Word::from_trusted(x.alphabet(), out), cert))
}

/// Deletes the given positions and pads the end with `pad`, keeping the length.
pub fn delete_and_pad(x: &Word, deletions: &[usize], pad: Symbol) -> Result<(Word, MatchCertificate), ChannelError> {
    let mut prev = None;
    for &d in deletions {
        if d >= x.len() || prev.is_some_and(|p| p >= d) {
            return Err(ChannelError::BadDeletion(d));
        }
        prev = Some(d);
    }
    if !x.alphabet().contains(pad) {
        return Err(ChannelError::SmallAlphabet {
            need: pad as usize + 1,
            got: x.alphabet().size(),
        });
    }
    let mut out = Vec::with_capacity(x.len());
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let mut next = deletions.iter().peekable();
    for (j, &s) in x.iter().enumerate() {
        if next.peek() == Some(&&j) {
            next.next();
            continue;
        }
        left.push(j);
        right.push(out.len());
        out.push(s);
    }
    out.resize(x.len(), pad);
    let cert = MatchCertificate::new(left, right).expect("increasing by construction");
    Ok((Word::from_trusted(x.alphabet(), out), cert))
}

/// The decomposition of `x` along a matched index set `A`:
/// `y` is the indicator of `A`, `z = x y` and `zbar = x (1 - y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofTriple {
    pub y: Word,
    pub z: Word,
    pub zbar: Word,
}

impl ProofTriple {
    /// Symbolwise merge of `z` and `zbar`, taking the nonzero entry.
    pub fn merge(&self) -> Word {
        let symbols = self.z.iter().zip(self.zbar.iter()).map(|(&a, &b)| a.max(b)).collect();
        Word::from_trusted(self.z.alphabet(), symbols)
    }

    /// Frequency of the blank letter `0` in `zbar`.
    pub fn zbar_zero_frequency(&self) -> f64 {
        if self.zbar.is_empty() {
            return 0.0;
        }
        self.zbar.iter().filter(|&&s| s == 0).count() as f64 / self.zbar.len() as f64
    }
}

/// Builds `(y, z, zbar)` for a word whose letters are labelled `1..=l`
/// (`0` is reserved as the blank) and an increasing index set `matched`.
pub fn build_proof_triple(x: &Word, matched: &[usize]) -> Result<ProofTriple, ChannelError> {
    if let Some(p) = x.iter().position(|&s| s == 0) {
        return Err(ChannelError::ZeroLetter(p));
    }
    let n = x.len();
    let mut y = vec![0u8; n];
    let mut prev = None;
    for &i in matched {
        if i >= n || prev.is_some_and(|p| p >= i) {
            return Err(ChannelError::BadIndex(i));
        }
        y[i] = 1;
        prev = Some(i);
    }
    let z = x.iter().zip(&y).map(|(&s, &b)| if b == 1 { s } else { 0 }).collect();
    let zbar = x.iter().zip(&y).map(|(&s, &b)| if b == 1 { 0 } else { s }).collect();
    Ok(ProofTriple {
        y: Word::from_trusted(Alphabet::binary(), y),
        z: Word::from_trusted(x.alphabet(), z),
        zbar: Word::from_trusted(x.alphabet(), zbar),
    })
}

/// Explicit continuity modulus: for one sequence, the sum of
///
/// * `H(eps) + H(1 - eps)` (entropy of the characteristic sequence),
/// * `H(1 - eps) + H(eps) + eps log l` (the mostly-blank complement),
/// * `(H(eps) + H(1 - eps)) / (1 - eps)` (geometric bound on entry times),
/// * `eps log l` (the split-off point mass),
///
/// doubled to account for both sequences of a pair. This is a heuristic upper
/// bound checked empirically.
pub fn budget(eps: f64, l: usize) -> Result<f64, ChannelError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ChannelError::BadRate(eps));
    }
    if l < 2 {
        return Err(ChannelError::SmallAlphabet { need: 2, got: l });
    }
    let hb = shannon_h(eps).expect("in range") + shannon_h(1.0 - eps).expect("in range");
    let log_l = (l as f64).ln();
    Ok(2.0 * (hb + (hb + eps * log_l) + hb / (1.0 - eps) + eps * log_l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{edit_fn, hamming_dn, verify_hat_f_certificate};

    #[test]
    fn substitution_extremes() {
        let x = Word::parse_digits("0110100111").unwrap();
        let (y, changed) = substitute_channel(&x, 0.0, Seed(1)).unwrap();
        assert_eq!(y, x);
        assert!(changed.is_empty());
        let (y, changed) = substitute_channel(&x, 1.0, Seed(1)).unwrap();
        assert_eq!(hamming_dn(&x, &y).unwrap(), 1.0);
        assert_eq!(changed.len(), x.len());
        assert!(x.iter().zip(y.iter()).all(|(a, b)| a + b == 1));
        assert!(substitute_channel(&x, 1.5, Seed(1)).is_err());
    }

    #[test]
    fn substitution_is_coupled_across_rates() {
        let x = Word::new(Alphabet::new(3).unwrap(), (0..5000).map(|i| (i % 3) as u8).collect()).unwrap();
        let (_, small) = substitute_channel(&x, 0.02, Seed(9)).unwrap();
        let (_, large) = substitute_channel(&x, 0.05, Seed(9)).unwrap();
        assert!(small.iter().all(|p| large.binary_search(p).is_ok()));
    }

    #[test]
    fn indel_zero_rate_is_identity() {
        let x = Word::parse_digits("2101201").unwrap();
        let (y, cert) = indel_channel(&x, 0.0, Seed(3)).unwrap();
        assert_eq!(y, x);
        assert_eq!(cert, MatchCertificate::identity(7));
        assert!(indel_channel(&x, 1.0, Seed(3)).is_err());
    }

    #[test]
    fn shift_by_deletion() {
        for k in [1usize, 5, 32] {
            let x = Word::parse_digits(&"01".repeat(k)).unwrap();
            let (y, cert) = delete_and_pad(&x, &[0], 0).unwrap();
            assert_eq!(y.to_digits(), format!("{}0", "10".repeat(k).get(..2 * k - 1).unwrap()));
            let (f, _) = edit_fn(&x, &y).unwrap();
            assert_eq!(f, 1.0 / (2 * k) as f64);
            assert_eq!(hamming_dn(&x, &y).unwrap(), 1.0);
            assert!(verify_hat_f_certificate(&x, &y, &cert, 1.0 / (2 * k) as f64).unwrap());
        }
        let x = Word::parse_digits("0101").unwrap();
        assert!(delete_and_pad(&x, &[2, 1], 0).is_err());
    }

    #[test]
    fn proof_triple_examples() {
        let x = Word::parse_digits("1212").unwrap();
        let t = build_proof_triple(&x, &[0, 3]).unwrap();
        assert_eq!(t.y.to_digits(), "1001");
        assert_eq!(t.z.to_digits(), "1002");
        assert_eq!(t.zbar.to_digits(), "0210");
        assert_eq!(t.merge(), x);

        let all = build_proof_triple(&x, &[0, 1, 2, 3]).unwrap();
        assert_eq!(all.z, x);
        assert_eq!(all.zbar.to_digits(), "0000");
        let none = build_proof_triple(&x, &[]).unwrap();
        assert_eq!(none.z.to_digits(), "0000");
        assert_eq!(none.zbar, x);

        let with_zero = Word::parse_digits("102").unwrap();
        assert_eq!(build_proof_triple(&with_zero, &[]), Err(ChannelError::ZeroLetter(1)));
        assert_eq!(build_proof_triple(&x, &[2, 2]), Err(ChannelError::BadIndex(2)));
    }

    #[test]
    fn budget_values() {
        // Each term evaluated directly at eps = 0.05, l = 2.
        let e = 0.05f64;
        let hb = -e * e.ln() - (1.0 - e) * (1.0 - e).ln();
        let direct = 2.0 * (hb + hb + e * 2f64.ln() + hb / (1.0 - e) + e * 2f64.ln());
        let b = budget(e, 2).unwrap();
        assert!((b - direct).abs() < 1e-14);
        assert!((b - 1.351).abs() < 1e-3);
        assert!(budget(1e-9, 2).unwrap() < 1e-6);
        assert!(budget(0.0, 2).is_err());
        assert!(budget(0.5, 1).is_err());
    }

    #[test]
    fn budget_increases_on_lower_half() {
        let grid: Vec<f64> = (1..500).map(|i| i as f64 / 1000.0).collect();
        for l in [2, 3, 10] {
            let values: Vec<f64> = grid.iter().map(|&e| budget(e, l).unwrap()).collect();
            assert!(values.windows(2).all(|w| w[1] > w[0]), "l={l}");
        }
    }
}
