use std::collections::HashMap;

use crate::error::{Error, Result};

pub const PAD: u32 = 0;
pub const OOV: u32 = 1;
/// First index handed to a real word.
pub const FIRST_WORD: u32 = 2;

/// Frozen word index. The most frequent words get `2, 3, ...` (frequency
/// ties go to the word seen first); everything else maps to [`OOV`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tokenizer {
    word_index: HashMap<String, u32>,
    /// Words in index order, `words[i]` has index `i + 2`.
    words: Vec<String>,
    vocab_size: usize,
}

impl Tokenizer {
    /// Fits on training texts only; `vocab_size` caps the number of indexed words.
    pub fn fit<S: AsRef<str>>(train_texts: &[Vec<S>], vocab_size: usize) -> Result<Self> {
        if train_texts.iter().all(|t| t.is_empty()) {
            return Err(Error::Fit("training corpus has no words".into()));
        }
        if vocab_size == 0 {
            return Err(Error::Fit("vocab_size must be at least 1".into()));
        }
        // word -> (count, first occurrence)
        let mut stats: HashMap<&str, (u64, usize)> = HashMap::new();
        let mut seen = 0usize;
        for text in train_texts {
            for w in text {
                let e = stats.entry(w.as_ref()).or_insert((0, seen));
                e.0 += 1;
                seen += 1;
            }
        }
        let mut ranked: Vec<(&str, u64, usize)> = stats.into_iter().map(|(w, (c, f))| (w, c, f)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        ranked.truncate(vocab_size);
        let words: Vec<String> = ranked.into_iter().map(|(w, _, _)| w.to_owned()).collect();
        Ok(Self::from_words(words, vocab_size))
    }

    /// Rebuilds from words in index order (as stored in checkpoints).
    pub fn from_words(words: Vec<String>, vocab_size: usize) -> Self {
        let word_index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32 + FIRST_WORD)).collect();
        Tokenizer { word_index, words, vocab_size }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn index_of(&self, word: &str) -> u32 {
        self.word_index.get(word).copied().unwrap_or(OOV)
    }

    pub fn word_index(&self) -> &HashMap<String, u32> {
        &self.word_index
    }

    pub fn texts_to_sequences<S: AsRef<str>>(&self, texts: &[Vec<S>]) -> Vec<Vec<u32>> {
        texts.iter().map(|t| t.iter().map(|w| self.index_of(w.as_ref())).collect()).collect()
    }
}

/// Post-padding with [`PAD`] and post-truncation to exactly `maxlen`.
pub fn pad_sequences(seqs: &[Vec<u32>], maxlen: usize) -> Vec<Vec<u32>> {
    seqs.iter()
        .map(|s| {
            let mut v: Vec<u32> = s.iter().copied().take(maxlen).collect();
            v.resize(maxlen, PAD);
            v
        })
        .collect()
}
