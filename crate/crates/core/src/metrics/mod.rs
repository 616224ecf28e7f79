//! The per-letter Hamming distance (d-bar) and the per-letter edit distance
//! (f-bar) on words, distance profiles over prefixes, and match certificates.
//!
//! For equal-length words `u`, `w` of length `n`:
//!
//! * `d_n(u, w)` is the fraction of positions where they differ;
//! * `f_n(u, w) = 1 - k / n` where `k` is the length of a longest common
//!   subsequence.
//!
//! The sequence-level pseudometrics are the limsups of these along prefixes;
//! on finite data [`distance_profile`] reports the maximum over the last third
//! of the requested checkpoints.

mod certificate;
pub mod lcs;

use thiserror::Error;

pub use certificate::{verify_hat_f_certificate, verify_hat_f_certificate_at, CertificateError, MatchCertificate};
use lcs::BitParallelLcs;

use crate::word::Word;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("words have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("distances are undefined on empty words")]
    Empty,
    #[error("checkpoint list is empty")]
    NoCheckpoints,
    #[error("checkpoints must be strictly increasing within 1..={max}, got {got}")]
    BadCheckpoint { got: usize, max: usize },
}

fn same_length(u: &Word, w: &Word) -> Result<usize, MetricError> {
    if u.len() != w.len() {
        return Err(MetricError::LengthMismatch(u.len(), w.len()));
    }
    if u.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(u.len())
}

/// Number of positions where `u` and `w` differ (over the common prefix).
pub fn mismatches(u: &[u8], w: &[u8]) -> usize {
    u.iter().zip(w).filter(|(a, b)| a != b).count()
}

pub fn hamming_dn(u: &Word, w: &Word) -> Result<f64, MetricError> {
    let n = same_length(u, w)?;
    Ok(mismatches(u, w) as f64 / n as f64)
}

/// Edit pseudodistance with a witnessing optimal common subsequence.
pub fn edit_fn(u: &Word, w: &Word) -> Result<(f64, MatchCertificate), MetricError> {
    let n = same_length(u, w)?;
    let cert = MatchCertificate::from_pairs(lcs::lcs_pairs(u, w));
    Ok(((n - cert.len()) as f64 / n as f64, cert))
}

/// Edit pseudodistance via the bit-parallel LCS; no certificate.
pub fn edit_fn_fast(u: &Word, w: &Word) -> Result<f64, MetricError> {
    let n = same_length(u, w)?;
    let k = lcs::lcs_length_bitparallel(u, w);
    Ok((n - k) as f64 / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub n: usize,
    pub dbar: f64,
    pub fbar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceProfile {
    pub checkpoints: Vec<ProfilePoint>,
    pub limsup_estimate_d: f64,
    pub limsup_estimate_f: f64,
}

/// Tail-max surrogate for a limsup: the maximum over the last `ceil(len / 3)` values.
pub fn tail_max(values: &[f64]) -> f64 {
    let tail = values.len().div_ceil(3);
    values[values.len() - tail..].iter().copied().fold(0.0, f64::max)
}

fn check_checkpoints(checkpoints: &[usize], max: usize) -> Result<(), MetricError> {
    if checkpoints.is_empty() {
        return Err(MetricError::NoCheckpoints);
    }
    let mut prev = 0;
    for &c in checkpoints {
        if c <= prev || c > max {
            return Err(MetricError::BadCheckpoint { got: c, max });
        }
        prev = c;
    }
    Ok(())
}

/// `d_n` at each checkpoint, from running mismatch counts.
pub fn hamming_profile(u: &Word, w: &Word, checkpoints: &[usize]) -> Result<Vec<(usize, f64)>, MetricError> {
    check_checkpoints(checkpoints, u.len().min(w.len()))?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut count = 0usize;
    let mut pos = 0usize;
    for &n in checkpoints {
        count += mismatches(&u[pos..n], &w[pos..n]);
        pos = n;
        out.push((n, count as f64 / n as f64));
    }
    Ok(out)
}

/// `d_n` and `f_n` on the length-`n` prefixes of `u` and `w` at each checkpoint.
///
/// All `f_n` values come out of a single bit-parallel scan: the state after
/// `n` letters of `w` holds `LCS(u[..i], w[..n])` for every `i`.
pub fn distance_profile(u: &Word, w: &Word, checkpoints: &[usize]) -> Result<DistanceProfile, MetricError> {
    let hamming = hamming_profile(u, w, checkpoints)?;
    let last = *checkpoints.last().expect("checked non-empty");
    let engine = BitParallelLcs::new(&u[..last]);
    let mut fbar = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    engine.scan(&w[..last], |j, state| {
        if next < checkpoints.len() && checkpoints[next] == j {
            let k = BitParallelLcs::prefix_lcs(state, j);
            fbar.push((j - k) as f64 / j as f64);
            next += 1;
        }
    });
    let points: Vec<ProfilePoint> = hamming
        .into_iter()
        .zip(fbar)
        .map(|((n, dbar), fbar)| ProfilePoint { n, dbar, fbar })
        .collect();
    let d: Vec<f64> = points.iter().map(|p| p.dbar).collect();
    let f: Vec<f64> = points.iter().map(|p| p.fbar).collect();
    Ok(DistanceProfile {
        limsup_estimate_d: tail_max(&d),
        limsup_estimate_f: tail_max(&f),
        checkpoints: points,
    })
}

/// `count` checkpoints spaced geometrically up to `n`.
pub fn geometric_checkpoints(n: usize, count: usize) -> Vec<usize> {
    if n == 0 || count == 0 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (1..=count)
        .map(|k| ((n as f64).powf(k as f64 / count as f64)).round() as usize)
        .map(|c| c.clamp(1, n))
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    fn word(d: &str) -> Word {
        Word::from_digits(Alphabet::new(3).unwrap(), d).unwrap()
    }

    fn alternating(len: usize, first: u8) -> Word {
        Word::new(Alphabet::binary(), (0..len).map(|i| (i as u8 + first) % 2).collect()).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_dn(&word("111"), &word("111")).unwrap(), 0.0);
        assert_eq!(hamming_dn(&word("101"), &word("110")).unwrap(), 2.0 / 3.0);
        let u = alternating(9, 0);
        let c = alternating(9, 1);
        assert_eq!(hamming_dn(&u, &c).unwrap(), 1.0);
        assert_eq!(hamming_dn(&word("1"), &word("11")), Err(MetricError::LengthMismatch(1, 2)));
        assert_eq!(hamming_dn(&word(""), &word("")), Err(MetricError::Empty));
    }

    #[test]
    fn edit_examples() {
        let w = word("2101");
        let (v, cert) = edit_fn(&w, &w).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(cert.left(), &[0, 1, 2, 3]);
        assert_eq!(cert.right(), &[0, 1, 2, 3]);

        let (v, cert) = edit_fn(&word("12"), &word("21")).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(cert.len(), 1);
        assert_eq!(edit_fn_fast(&word("12"), &word("21")).unwrap(), 0.5);
        assert!(edit_fn(&word("12"), &word("2")).is_err());
    }

    #[test]
    fn shift_pairs() {
        for k in 1..=8 {
            let u = alternating(2 * k, 0);
            let w = alternating(2 * k, 1);
            assert_eq!(edit_fn(&u, &w).unwrap().0, 1.0 / (2 * k) as f64);
            assert_eq!(edit_fn_fast(&u, &w).unwrap(), 1.0 / (2 * k) as f64);
        }
    }

    #[test]
    fn profile_of_shifted_words() {
        let u = alternating(64, 0);
        let w = alternating(64, 1);
        let cps = [4, 8, 16, 32, 64];
        let p = distance_profile(&u, &w, &cps).unwrap();
        for pt in &p.checkpoints {
            assert_eq!(pt.dbar, 1.0);
            assert_eq!(pt.fbar, 1.0 / pt.n as f64);
        }
        assert_eq!(p.limsup_estimate_d, 1.0);
        // Last ceil(5/3) = 2 checkpoints: max(1/32, 1/64).
        assert_eq!(p.limsup_estimate_f, 1.0 / 32.0);

        let same = distance_profile(&u, &u, &cps).unwrap();
        assert!(same.checkpoints.iter().all(|p| p.dbar == 0.0 && p.fbar == 0.0));
    }

    #[test]
    fn checkpoint_validation() {
        let u = alternating(10, 0);
        assert_eq!(distance_profile(&u, &u, &[]), Err(MetricError::NoCheckpoints));
        assert!(distance_profile(&u, &u, &[3, 3]).is_err());
        assert!(distance_profile(&u, &u, &[0]).is_err());
        assert!(distance_profile(&u, &u, &[11]).is_err());
    }

    #[test]
    fn geometric_checkpoint_spacing() {
        assert_eq!(geometric_checkpoints(1000, 3), vec![10, 100, 1000]);
        assert!(geometric_checkpoints(0, 3).is_empty());
    }
}
