//! Alphabets, words and their on-disk encodings.

use std::fmt;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::ops::Deref;
use std::path::Path;

use thiserror::Error;

/// A single letter. Alphabets hold at most 256 letters.
pub type Symbol = u8;

/// Largest supported alphabet.
pub const MAX_ALPHABET: usize = 256;

#[derive(Debug, Error)]
pub enum WordError {
    #[error("alphabet size must be in 1..=256, got {0}")]
    BadAlphabet(usize),
    #[error("symbol {symbol} at position {position} is outside an alphabet of size {size}")]
    InvalidSymbol {
        symbol: usize,
        position: usize,
        size: usize,
    },
    #[error("malformed run-length text: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// The letter set `{0, .., size - 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet {
    size: u16,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self, WordError> {
        if size == 0 || size > MAX_ALPHABET {
            return Err(WordError::BadAlphabet(size));
        }
        Ok(Alphabet { size: size as u16 })
    }

    pub const fn binary() -> Self {
        Alphabet { size: 2 }
    }

    #[inline]
    pub fn size(self) -> usize {
        self.size as usize
    }

    #[inline]
    pub fn contains(self, s: Symbol) -> bool {
        (s as usize) < self.size()
    }

    pub fn symbols(self) -> impl Iterator<Item = Symbol> {
        (0..self.size).map(|s| s as Symbol)
    }

    /// `ln l`, the largest one-letter entropy in nats.
    pub fn log_size(self) -> f64 {
        (self.size() as f64).ln()
    }

    /// Bits needed to pack one letter (at least one).
    pub fn bits(self) -> u32 {
        bits_for(self.size())
    }
}

/// Bits needed to store values in `0..size`, at least one.
pub(crate) fn bits_for(size: usize) -> u32 {
    if size <= 2 {
        1
    } else {
        usize::BITS - (size - 1).leading_zeros()
    }
}

/// A finite string over an [`Alphabet`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(alphabet: Alphabet, symbols: Vec<Symbol>) -> Result<Self, WordError> {
        if let Some(position) = symbols.iter().position(|&s| !alphabet.contains(s)) {
            return Err(WordError::InvalidSymbol {
                symbol: symbols[position] as usize,
                position,
                size: alphabet.size(),
            });
        }
        Ok(Word { alphabet, symbols })
    }

    pub(crate) fn from_trusted(alphabet: Alphabet, symbols: Vec<Symbol>) -> Self {
        debug_assert!(symbols.iter().all(|&s| alphabet.contains(s)));
        Word { alphabet, symbols }
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word {
            alphabet,
            symbols: Vec::new(),
        }
    }

    /// Parses a string of decimal digits, one letter per character.
    pub fn from_digits(alphabet: Alphabet, digits: &str) -> Result<Self, WordError> {
        let symbols = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| WordError::Parse(format!("not a digit: {c:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Word::new(alphabet, symbols)
    }

    /// Like [`Word::from_digits`] with the smallest alphabet that fits.
    pub fn parse_digits(digits: &str) -> Result<Self, WordError> {
        let probe = Word::from_digits(Alphabet { size: 10 }, digits)?;
        let size = probe.symbols.iter().copied().max().map_or(1, |m| m as usize + 1);
        Ok(Word {
            alphabet: Alphabet::new(size.max(2))?,
            symbols: probe.symbols,
        })
    }

    #[inline]
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    #[inline]
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }

    /// Prefix of length `n` (clamped to the word length).
    pub fn prefix(&self, n: usize) -> Word {
        Word::from_trusted(self.alphabet, self.symbols[..n.min(self.len())].to_vec())
    }

    /// Reinterprets the word over a larger alphabet.
    pub fn widen(&self, alphabet: Alphabet) -> Result<Word, WordError> {
        Word::new(alphabet, self.symbols.clone())
    }

    /// Relabels `0..l` as `1..=l` over an alphabet of size `l + 1`, freeing `0` as a blank.
    pub fn shift_labels_up(&self) -> Result<Word, WordError> {
        let alphabet = Alphabet::new(self.alphabet.size() + 1)?;
        Ok(Word::from_trusted(
            alphabet,
            self.symbols.iter().map(|&s| s + 1).collect(),
        ))
    }

    /// Digit string; letters above 9 are written in brackets.
    pub fn to_digits(&self) -> String {
        let mut out = String::with_capacity(self.len());
        for &s in &self.symbols {
            if s < 10 {
                out.push((b'0' + s) as char);
            } else {
                let _ = write!(out, "[{s}]");
            }
        }
        out
    }

    /// Writes one letter per byte.
    pub fn write_raw<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(&self.symbols)
    }

    /// Reads one letter per byte. Without an explicit alphabet the smallest one
    /// that fits the data (and has at least two letters) is used.
    pub fn read_raw<R: Read>(mut input: R, alphabet: Option<Alphabet>) -> Result<Word, WordError> {
        let mut symbols = Vec::new();
        input.read_to_end(&mut symbols)?;
        let alphabet = match alphabet {
            Some(a) => a,
            None => {
                let max = symbols.iter().copied().max().map_or(1, |m| m as usize);
                Alphabet::new((max + 1).max(2))?
            }
        };
        Word::new(alphabet, symbols)
    }

    /// Run-length text: a header line `alphabet <l>` followed by whitespace
    /// separated `symbol:count` runs.
    pub fn to_rle_text(&self) -> String {
        let mut out = format!("alphabet {}\n", self.alphabet.size());
        let mut runs = 0usize;
        let mut iter = self.symbols.iter().copied().peekable();
        while let Some(s) = iter.next() {
            let mut count = 1usize;
            while iter.peek() == Some(&s) {
                iter.next();
                count += 1;
            }
            if runs > 0 {
                out.push(if runs % 16 == 0 { '\n' } else { ' ' });
            }
            let _ = write!(out, "{s}:{count}");
            runs += 1;
        }
        out.push('\n');
        out
    }

    pub fn from_rle_text(text: &str) -> Result<Word, WordError> {
        let mut tokens = text.split_whitespace();
        match (tokens.next(), tokens.next()) {
            (Some("alphabet"), Some(size)) => {
                let size: usize = size
                    .parse()
                    .map_err(|_| WordError::Parse(format!("bad alphabet size {size:?}")))?;
                let alphabet = Alphabet::new(size)?;
                let mut symbols = Vec::new();
                for token in tokens {
                    let (s, c) = token
                        .split_once(':')
                        .ok_or_else(|| WordError::Parse(format!("expected symbol:count, got {token:?}")))?;
                    let s: usize = s
                        .parse()
                        .map_err(|_| WordError::Parse(format!("bad symbol in {token:?}")))?;
                    let c: usize = c
                        .parse()
                        .map_err(|_| WordError::Parse(format!("bad count in {token:?}")))?;
                    if s >= alphabet.size() {
                        return Err(WordError::InvalidSymbol {
                            symbol: s,
                            position: symbols.len(),
                            size: alphabet.size(),
                        });
                    }
                    symbols.extend(std::iter::repeat(s as Symbol).take(c));
                }
                Ok(Word::from_trusted(alphabet, symbols))
            }
            _ => Err(WordError::Parse("missing `alphabet <l>` header".into())),
        }
    }

    /// Loads a word, choosing the format from the extension (`.rle` is run-length
    /// text, anything else raw bytes).
    pub fn load(path: &Path, alphabet: Option<Alphabet>) -> Result<Word, WordError> {
        if is_rle(path) {
            let word = Word::from_rle_text(&std::fs::read_to_string(path)?)?;
            match alphabet {
                Some(a) if a != word.alphabet => word.widen(a),
                _ => Ok(word),
            }
        } else {
            Word::read_raw(std::fs::File::open(path)?, alphabet)
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), WordError> {
        if is_rle(path) {
            std::fs::write(path, self.to_rle_text())?;
        } else {
            let mut file = io::BufWriter::new(std::fs::File::create(path)?);
            self.write_raw(&mut file)?;
            file.flush()?;
        }
        Ok(())
    }
}

fn is_rle(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "rle")
}

impl Deref for Word {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.symbols
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            write!(f, "Word(l={}, \"{}\")", self.alphabet.size(), self.to_digits())
        } else {
            write!(f, "Word(l={}, len={})", self.alphabet.size(), self.len())
        }
    }
}
