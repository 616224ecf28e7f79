//! Zero-insertion encoding between a name and its adapted (return-word) name.
//!
//! Each marked position `p_k` of a name carries the id of its return word
//! `name(p_{k-1}, p_k]` (the first word runs from the start of the name) and
//! every other position carries `0`. Decoding walks the adapted name and
//! requires exactly `|a| - 1` zeros before each return word `a`.

use std::collections::HashMap;

use thiserror::Error;

use super::MarkedSet;
use crate::word::{Symbol, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AdaptedError {
    #[error("name never visits the marked set")]
    NotVisited,
    #[error("unknown return-word id {id} at position {position}")]
    UnknownId { id: u32, position: usize },
    #[error("zero run before position {position} has length {found}, return word needs {expected}")]
    ZeroRun { position: usize, expected: usize, found: usize },
    #[error("adapted name ends with {0} zero(s) after its last return word")]
    TrailingZeros(usize),
    #[error("return word {0} does not end in its only marked letter")]
    BadReturnWord(u32),
}

/// A name over `{0} ∪ {return-word ids}` together with its return-word dictionary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedName {
    /// `0` or a return-word id; ids start at 1.
    pub symbols: Vec<u32>,
    /// `dictionary[id - 1]` is the return word with that id.
    pub dictionary: Vec<Vec<Symbol>>,
    pub mark: MarkedSet,
}

impl AdaptedName {
    pub fn word(&self, id: u32) -> Option<&[Symbol]> {
        id.checked_sub(1)
            .and_then(|i| self.dictionary.get(i as usize))
            .map(Vec::as_slice)
    }
}

/// Encodes `name` up to and including its last marked position. Ids are
/// assigned in order of first appearance.
pub fn encode_adapted_name(name: &Word, mark: &MarkedSet) -> Result<AdaptedName, AdaptedError> {
    let last = name
        .iter()
        .rposition(|&s| mark.contains(s))
        .ok_or(AdaptedError::NotVisited)?;
    let mut ids: HashMap<&[Symbol], u32> = HashMap::new();
    let mut dictionary = Vec::new();
    let mut symbols = vec![0u32; last + 1];
    let mut start = 0;
    for p in mark.positions(&name[..=last]) {
        let word = &name[start..=p];
        let id = *ids.entry(word).or_insert_with(|| {
            dictionary.push(word.to_vec());
            dictionary.len() as u32
        });
        symbols[p] = id;
        start = p + 1;
    }
    Ok(AdaptedName {
        symbols,
        dictionary,
        mark: mark.clone(),
    })
}

/// Inverts [`encode_adapted_name`], checking every zero run and return word.
pub fn decode_adapted_name(adapted: &AdaptedName) -> Result<Word, AdaptedError> {
    let mark = &adapted.mark;
    for (i, word) in adapted.dictionary.iter().enumerate() {
        let ok = word
            .split_last()
            .is_some_and(|(last, init)| mark.contains(*last) && init.iter().all(|&s| !mark.contains(s)));
        if !ok {
            return Err(AdaptedError::BadReturnWord(i as u32 + 1));
        }
    }
    let mut out = Vec::with_capacity(adapted.symbols.len());
    let mut zeros = 0usize;
    for (position, &id) in adapted.symbols.iter().enumerate() {
        if id == 0 {
            zeros += 1;
            continue;
        }
        let word = adapted.word(id).ok_or(AdaptedError::UnknownId { id, position })?;
        if zeros + 1 != word.len() {
            return Err(AdaptedError::ZeroRun {
                position,
                expected: word.len() - 1,
                found: zeros,
            });
        }
        out.extend_from_slice(word);
        zeros = 0;
    }
    if zeros > 0 {
        return Err(AdaptedError::TrailingZeros(zeros));
    }
    Ok(Word::from_trusted(mark.alphabet(), out))
}
