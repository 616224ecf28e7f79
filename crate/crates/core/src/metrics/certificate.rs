use thiserror::Error;

use crate::word::Word;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("index lists have different lengths ({0} and {1})")]
    UnequalLengths(usize, usize),
    #[error("{side} indices are not strictly increasing at entry {at}")]
    NotIncreasing { side: &'static str, at: usize },
    #[error("{side} index {index} is out of bounds for a word of length {len}")]
    OutOfBounds { side: &'static str, index: usize, len: usize },
    #[error("density checkpoint {0} is outside the words")]
    BadCheckpoint(usize),
}

/// Two strictly increasing index lists `I` (into `u`) and `I'` (into `w`) of
/// equal length, pairing positions where the words are meant to agree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchCertificate {
    left: Vec<usize>,
    right: Vec<usize>,
}

fn check_increasing(v: &[usize], side: &'static str) -> Result<(), CertificateError> {
    match v.windows(2).position(|w| w[0] >= w[1]) {
        Some(at) => Err(CertificateError::NotIncreasing { side, at: at + 1 }),
        None => Ok(()),
    }
}

impl MatchCertificate {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Result<Self, CertificateError> {
        if left.len() != right.len() {
            return Err(CertificateError::UnequalLengths(left.len(), right.len()));
        }
        check_increasing(&left, "left")?;
        check_increasing(&right, "right")?;
        Ok(MatchCertificate { left, right })
    }

    /// Builds from index pairs produced by an LCS search (already increasing).
    pub(crate) fn from_pairs(pairs: Vec<(usize, usize)>) -> Self {
        let (left, right): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        debug_assert!(left.windows(2).all(|w| w[0] < w[1]) && right.windows(2).all(|w| w[0] < w[1]));
        MatchCertificate { left, right }
    }

    /// The diagonal certificate `I = I' = {0, .., n - 1}`.
    pub fn identity(n: usize) -> Self {
        MatchCertificate {
            left: (0..n).collect(),
            right: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left.iter().copied().zip(self.right.iter().copied())
    }

    /// Index pairs, one `i j` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 12);
        for (i, j) in self.pairs() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (no, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => {
                    left.push(i);
                    right.push(j);
                }
                _ => return Err(format!("line {}: expected two indices", no + 1)),
            }
        }
        MatchCertificate::new(left, right).map_err(|e| e.to_string())
    }

    fn check_bounds(&self, u: &Word, w: &Word) -> Result<(), CertificateError> {
        if let Some(&index) = self.left.last().filter(|&&i| i >= u.len()) {
            return Err(CertificateError::OutOfBounds { side: "left", index, len: u.len() });
        }
        if let Some(&index) = self.right.last().filter(|&&i| i >= w.len()) {
            return Err(CertificateError::OutOfBounds { side: "right", index, len: w.len() });
        }
        Ok(())
    }

    /// True when `u` restricted to `I` equals `w` restricted to `I'`.
    pub fn matches(&self, u: &Word, w: &Word) -> bool {
        self.pairs().all(|(i, j)| u.get(i).is_some() && u.get(i) == w.get(j))
    }

    /// `|I ∩ [0, n)| / n` and `|I' ∩ [0, n)| / n`.
    pub fn densities_at(&self, n: usize) -> (f64, f64) {
        let left = self.left.partition_point(|&i| i < n);
        let right = self.right.partition_point(|&i| i < n);
        (left as f64 / n as f64, right as f64 / n as f64)
    }
}

/// Slack for densities computed as `1 - value` from a float distance.
const DENSITY_SLACK: f64 = 1e-12;

/// Checks a hat-f certificate with densities taken at the full length.
///
/// `Ok(false)` means the certificate is well formed but either pairs unequal
/// letters or has density below `1 - eps`; malformed certificates are errors.
pub fn verify_hat_f_certificate(
    u: &Word,
    w: &Word,
    cert: &MatchCertificate,
    eps: f64,
) -> Result<bool, CertificateError> {
    let n = u.len().min(w.len());
    if n == 0 {
        return Ok(cert.is_empty());
    }
    verify_hat_f_certificate_at(u, w, cert, eps, &[n])
}

/// Like [`verify_hat_f_certificate`], with the lower densities taken as the
/// minimum over the given prefix lengths.
pub fn verify_hat_f_certificate_at(
    u: &Word,
    w: &Word,
    cert: &MatchCertificate,
    eps: f64,
    checkpoints: &[usize],
) -> Result<bool, CertificateError> {
    check_increasing(&cert.left, "left")?;
    check_increasing(&cert.right, "right")?;
    if cert.left.len() != cert.right.len() {
        return Err(CertificateError::UnequalLengths(cert.left.len(), cert.right.len()));
    }
    cert.check_bounds(u, w)?;
    let limit = u.len().min(w.len());
    if let Some(&bad) = checkpoints.iter().find(|&&n| n == 0 || n > limit) {
        return Err(CertificateError::BadCheckpoint(bad));
    }
    if !cert.matches(u, w) {
        return Ok(false);
    }
    let lower = checkpoints
        .iter()
        .map(|&n| {
            let (a, b) = cert.densities_at(n);
            a.min(b)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(lower + DENSITY_SLACK >= 1.0 - eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    fn word(d: &str) -> Word {
        Word::from_digits(Alphabet::new(3).unwrap(), d).unwrap()
    }

    #[test]
    fn identity_certificate_verifies_at_zero() {
        let w = word("2102");
        assert!(verify_hat_f_certificate(&w, &w, &MatchCertificate::identity(4), 0.0).unwrap());
    }

    #[test]
    fn single_match_density() {
        let (u, w) = (word("12"), word("21"));
        let cert = MatchCertificate::new(vec![0], vec![1]).unwrap();
        assert!(verify_hat_f_certificate(&u, &w, &cert, 0.5).unwrap());
        assert!(!verify_hat_f_certificate(&u, &w, &cert, 0.4).unwrap());
        // At prefix length 1 the right-hand density is 0.
        assert!(!verify_hat_f_certificate_at(&u, &w, &cert, 0.5, &[1, 2]).unwrap());
    }

    #[test]
    fn mismatched_pair_is_false_not_error() {
        let (u, w) = (word("12"), word("21"));
        let cert = MatchCertificate::new(vec![0], vec![0]).unwrap();
        assert_eq!(verify_hat_f_certificate(&u, &w, &cert, 1.0), Ok(false));
    }

    #[test]
    fn malformed_certificates_are_errors() {
        assert!(matches!(
            MatchCertificate::new(vec![1, 1], vec![0, 1]),
            Err(CertificateError::NotIncreasing { side: "left", at: 1 })
        ));
        assert!(MatchCertificate::new(vec![0], vec![]).is_err());
        let bad = MatchCertificate { left: vec![2, 1], right: vec![0, 1] };
        let w = word("111");
        assert!(matches!(
            verify_hat_f_certificate(&w, &w, &bad, 0.5),
            Err(CertificateError::NotIncreasing { .. })
        ));
        let oob = MatchCertificate::new(vec![0, 5], vec![0, 1]).unwrap();
        assert!(matches!(
            verify_hat_f_certificate(&w, &w, &oob, 0.5),
            Err(CertificateError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let cert = MatchCertificate::new(vec![0, 2, 5], vec![1, 2, 3]).unwrap();
        assert_eq!(MatchCertificate::from_text(&cert.to_text()).unwrap(), cert);
        assert!(MatchCertificate::from_text("1 2 3\n").is_err());
        assert!(MatchCertificate::from_text("2 0\n1 1\n").is_err());
    }
}
