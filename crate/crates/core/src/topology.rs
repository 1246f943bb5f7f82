//! Builders for the language-model families used in the experiments: a free
//! phone loop, a loop of pseudo-words cut from the transcription, a forced
//! alignment chain, and the alpha-weighted union of alignment and loop.
//!
//! Every connection between phones (and between words) carries the same
//! constant `1/P`, with `P` the number of distinct phones involved, so the
//! topologies only differ in which connections exist.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hmm::{HmmError, NetworkBuilder, PhoneId, PhoneModelSet, StateId, TransitionNetwork};

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("empty phone set")]
    EmptyPhoneSet,
    #[error("empty transcription")]
    EmptyTranscription,
    #[error("word length {word_len} exceeds transcription length {len}")]
    WordTooLong { word_len: usize, len: usize },
    #[error("word length must be at least 1")]
    ZeroWordLength,
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error(transparent)]
    Hmm(#[from] HmmError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcription {
    pub id: String,
    pub phones: Vec<PhoneId>,
}

impl Transcription {
    pub fn new(id: impl Into<String>, phones: Vec<PhoneId>) -> Result<Self, TopologyError> {
        if phones.is_empty() {
            return Err(TopologyError::EmptyTranscription);
        }
        Ok(Self {
            id: id.into(),
            phones,
        })
    }

    pub fn len(&self) -> usize {
        self.phones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phones.is_empty()
    }

    pub fn distinct_phones(&self) -> BTreeSet<PhoneId> {
        self.phones.iter().copied().collect()
    }

    /// Consecutive words of `word_len` phones; the last one keeps the remainder.
    pub fn split_words(&self, word_len: usize) -> Vec<Vec<PhoneId>> {
        self.phones.chunks(word_len).map(<[_]>::to_vec).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordLoopSpec {
    pub word_len: usize,
    pub transcription: Transcription,
}

impl WordLoopSpec {
    pub fn new(word_len: usize, transcription: Transcription) -> Result<Self, TopologyError> {
        if word_len == 0 {
            return Err(TopologyError::ZeroWordLength);
        }
        if word_len > transcription.len() {
            return Err(TopologyError::WordTooLong {
                word_len,
                len: transcription.len(),
            });
        }
        Ok(Self {
            word_len,
            transcription,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMixSpec {
    pub alpha: f64,
    pub transcription: Transcription,
}

impl AlphaMixSpec {
    pub fn new(alpha: f64, transcription: Transcription) -> Result<Self, TopologyError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(TopologyError::AlphaOutOfRange(alpha));
        }
        Ok(Self {
            alpha,
            transcription,
        })
    }
}

/// Adds `words` as a free loop: within-word phone links, exit-to-entry links
/// between all words, and entries, all weighted `link`. Entry weights are
/// additionally scaled by `entry_scale`. Returns each word's `(entry, exit)`.
fn add_word_loop(
    b: &mut NetworkBuilder,
    words: &[Vec<PhoneId>],
    models: &PhoneModelSet,
    link: f64,
    entry_scale: f64,
) -> Result<Vec<(StateId, StateId)>, TopologyError> {
    let mut ends = Vec::with_capacity(words.len());
    for word in words {
        ends.push(add_chain(b, word, models, link)?);
    }
    for &(_, exit) in &ends {
        for &(entry, _) in &ends {
            b.add_arc(exit, entry, link);
        }
        b.add_exit(exit);
    }
    for &(entry, _) in &ends {
        b.add_entry(entry, entry_scale * link);
    }
    Ok(ends)
}

/// Chains phone models left to right, linking consecutive phones with `link`.
fn add_chain(
    b: &mut NetworkBuilder,
    phones: &[PhoneId],
    models: &PhoneModelSet,
    link: f64,
) -> Result<(StateId, StateId), TopologyError> {
    let mut first = None;
    let mut prev_last: Option<StateId> = None;
    for &p in phones {
        let (f, l) = b.add_phone(models.get(p)?);
        if let Some(pl) = prev_last {
            b.add_arc(pl, f, link);
        }
        first.get_or_insert(f);
        prev_last = Some(l);
    }
    match (first, prev_last) {
        (Some(f), Some(l)) => Ok((f, l)),
        _ => Err(TopologyError::EmptyTranscription),
    }
}

/// Free loop over `phones`: every phone exit connects to every phone entry
/// with weight `1/N`.
pub fn phone_loop(
    phones: &BTreeSet<PhoneId>,
    models: &PhoneModelSet,
) -> Result<TransitionNetwork, TopologyError> {
    if phones.is_empty() {
        return Err(TopologyError::EmptyPhoneSet);
    }
    let mut b = NetworkBuilder::default();
    let words: Vec<Vec<PhoneId>> = phones.iter().map(|&p| vec![p]).collect();
    add_word_loop(&mut b, &words, models, 1.0 / phones.len() as f64, 1.0)?;
    Ok(b.build(models.num_classes())?)
}

/// Loop of pseudo-words made of `word_len` consecutive transcription phones.
///
/// With `word_len == 1` this is the phone loop over the transcription's
/// distinct phones. Longer words are kept one subnetwork per occurrence.
pub fn word_loop(
    spec: &WordLoopSpec,
    models: &PhoneModelSet,
) -> Result<TransitionNetwork, TopologyError> {
    let tr = &spec.transcription;
    let spec = WordLoopSpec::new(spec.word_len, tr.clone())?;
    let distinct = tr.distinct_phones();
    if spec.word_len == 1 {
        return phone_loop(&distinct, models);
    }
    let mut b = NetworkBuilder::default();
    let words = tr.split_words(spec.word_len);
    add_word_loop(&mut b, &words, models, 1.0 / distinct.len() as f64, 1.0)?;
    Ok(b.build(models.num_classes())?)
}

/// Left-to-right chain of the whole transcription.
pub fn forced_alignment_net(
    transcription: &Transcription,
    models: &PhoneModelSet,
) -> Result<TransitionNetwork, TopologyError> {
    if transcription.is_empty() {
        return Err(TopologyError::EmptyTranscription);
    }
    let link = 1.0 / transcription.distinct_phones().len() as f64;
    let mut b = NetworkBuilder::default();
    let (entry, exit) = add_chain(&mut b, &transcription.phones, models, link)?;
    b.add_entry(entry, 1.0);
    b.add_exit(exit);
    Ok(b.build(models.num_classes())?)
}

/// Union of a phone loop (entry mass `1 - alpha`) and a forced-alignment
/// chain (entry mass `alpha`). Branch-internal weights are those of the pure
/// builders; a branch with zero mass is left out.
///
/// When both branches are present, the end of the alignment chain falls
/// back into the loop exactly like a loop phone's exit does; it never
/// re-enters the chain itself.
pub fn alpha_mix(
    spec: &AlphaMixSpec,
    models: &PhoneModelSet,
) -> Result<TransitionNetwork, TopologyError> {
    let spec = AlphaMixSpec::new(spec.alpha, spec.transcription.clone())?;
    let tr = &spec.transcription;
    let alpha = spec.alpha;
    let distinct = tr.distinct_phones();
    let link = 1.0 / distinct.len() as f64;
    let mut b = NetworkBuilder::default();

    let loop_ends = if alpha < 1.0 {
        let words: Vec<Vec<PhoneId>> = distinct.iter().map(|&p| vec![p]).collect();
        add_word_loop(&mut b, &words, models, link, 1.0 - alpha)?
    } else {
        Vec::new()
    };
    if alpha > 0.0 {
        let (entry, exit) = add_chain(&mut b, &tr.phones, models, link)?;
        b.add_entry(entry, alpha);
        b.add_exit(exit);
        for &(loop_entry, _) in &loop_ends {
            b.add_arc(exit, loop_entry, link);
        }
    }
    Ok(b.build(models.num_classes())?)
}
