use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::tensor::SeededRng;
use crate::text::{default_stopwords, Label, LabeledSentence};

/// Synthetic two-class corpus. Both classes draw words from one Zipf-weighted
/// base vocabulary; in fraud sentences each word is independently swapped
/// for a signal word with probability `p_signal`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub total: usize,
    /// Non-fraud sentences per fraud sentence.
    pub ratio: f64,
    pub p_signal: f64,
    pub base_vocab: usize,
    pub signal_vocab: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            total: 3520,
            ratio: 175.0,
            p_signal: 0.0,
            base_vocab: 5000,
            signal_vocab: 200,
            min_len: 8,
            max_len: 40,
            start_date: NaiveDate::from_ymd_opt(2000, 12, 1).expect("valid date"),
            end_date: NaiveDate::from_ymd_opt(2022, 7, 31).expect("valid date"),
            seed: 42,
        }
    }
}

impl GeneratorConfig {
    /// `(non-fraud, fraud)` sentence counts.
    pub fn class_counts(&self) -> Result<(usize, usize)> {
        if !(self.ratio >= 1.0 && self.ratio.is_finite()) {
            return Err(Error::Config(format!("ratio must be finite and at least 1, got {}", self.ratio)));
        }
        let fraud = (self.total as f64 / (self.ratio + 1.0)).round() as usize;
        if fraud == 0 || fraud >= self.total {
            return Err(Error::Config(format!(
                "total {} at ratio {} leaves {fraud} fraud sentences",
                self.total, self.ratio
            )));
        }
        Ok((self.total - fraud, fraud))
    }

    fn validate(&self) -> Result<()> {
        self.class_counts()?;
        if !(0.0..=1.0).contains(&self.p_signal) {
            return Err(Error::Config(format!("p_signal must be in [0, 1], got {}", self.p_signal)));
        }
        if self.base_vocab == 0 || self.signal_vocab == 0 {
            return Err(Error::Config("vocabulary sizes must be at least 1".into()));
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::Config(format!("need 1 <= min_len <= max_len, got {}..{}", self.min_len, self.max_len)));
        }
        if self.start_date > self.end_date {
            return Err(Error::Config("start_date is after end_date".into()));
        }
        Ok(())
    }
}

const CONSONANTS: &[u8] = b"bcdfghjklmnprstvwz";
const VOWELS: &[u8] = b"aeiou";

/// Consonant-vowel syllables spelling `n` in mixed radix, at least `min_syl` long.
fn spell(mut n: usize, min_syl: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut out = String::new();
    let mut syl = 0;
    while syl < min_syl || n > 0 {
        let d = n % base;
        n /= base;
        out.push(CONSONANTS[d / VOWELS.len()] as char);
        out.push(VOWELS[d % VOWELS.len()] as char);
        syl += 1;
    }
    out
}

/// `count` distinct pseudo-words, none of them a stopword. No word contains `q`.
pub fn base_words(count: usize) -> Vec<String> {
    let stop = default_stopwords();
    (0..).map(|i| spell(i, 2)).filter(|w| !stop.contains(w)).take(count).collect()
}

/// Signal words all start with `q`, so they never collide with base words.
pub fn signal_words(count: usize) -> Vec<String> {
    (0..count).map(|i| format!("q{}", spell(i, 1))).collect()
}

/// Cumulative Zipf weights `1/rank` normalized to end at 1.
fn zipf_cdf(n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = (1..=n)
        .map(|r| {
            acc += 1.0 / r as f64;
            acc
        })
        .collect();
    let total = acc;
    cdf.iter_mut().for_each(|c| *c /= total);
    cdf
}

pub fn generate_corpus(cfg: &GeneratorConfig) -> Result<Vec<LabeledSentence>> {
    cfg.validate()?;
    let (n_nf, n_f) = cfg.class_counts()?;
    let mut rng = SeededRng::new(cfg.seed);
    let base = base_words(cfg.base_vocab);
    let signal = signal_words(cfg.signal_vocab);
    let cdf = zipf_cdf(base.len());
    let span_days = (cfg.end_date - cfg.start_date).num_days() as usize + 1;

    let mut labels: Vec<Label> = std::iter::repeat_n(Label::NF, n_nf).chain(std::iter::repeat_n(Label::F, n_f)).collect();
    rng.shuffle(&mut labels);

    let mut out = Vec::with_capacity(labels.len());
    for label in labels {
        let len = cfg.min_len + rng.below(cfg.max_len - cfg.min_len + 1);
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for _ in 0..len {
            let u = rng.uniform();
            let word = &base[cdf.partition_point(|&c| c <= u).min(base.len() - 1)];
            // both classes consume the same draws so p_signal = 0 leaves them identical in law
            let swap = rng.bernoulli(cfg.p_signal);
            let pick = rng.below(signal.len());
            words.push(if label == Label::F && swap { &signal[pick] } else { word });
        }
        let mut text = words.join(" ");
        if let Some(first) = text.get_mut(0..1) {
            first.make_ascii_uppercase();
        }
        text.push('.');
        let time = cfg.start_date + chrono::Duration::days(rng.below(span_days) as i64);
        out.push(LabeledSentence::new(text, label, time)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::clean_text;
    use std::collections::HashSet;

    #[test]
    fn counts_follow_ratio() {
        let cfg = GeneratorConfig { total: 1760, ratio: 175.0, ..Default::default() };
        assert_eq!(cfg.class_counts().unwrap(), (1750, 10));
        let data = generate_corpus(&cfg).unwrap();
        assert_eq!(data.iter().filter(|s| s.label() == Label::F).count(), 10);
        assert_eq!(data.len(), 1760);
        let bad = GeneratorConfig { total: 100, ratio: 500.0, ..Default::default() };
        assert!(matches!(generate_corpus(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn vocabularies_are_disjoint_and_clean() {
        let base: HashSet<String> = base_words(5000).into_iter().collect();
        let signal: HashSet<String> = signal_words(200).into_iter().collect();
        assert_eq!(base.len(), 5000);
        assert_eq!(signal.len(), 200);
        assert!(base.is_disjoint(&signal));
        assert!(base.iter().chain(&signal).all(|w| clean_text(w) == *w));
        assert!(base.is_disjoint(default_stopwords()));
    }

    #[test]
    fn full_signal_uses_only_signal_words() {
        let cfg = GeneratorConfig { total: 200, ratio: 3.0, p_signal: 1.0, ..Default::default() };
        let signal: HashSet<String> = signal_words(cfg.signal_vocab).into_iter().collect();
        for s in generate_corpus(&cfg).unwrap() {
            let words: Vec<String> = clean_text(s.text()).split(' ').map(str::to_owned).collect();
            let from_signal = words.iter().all(|w| signal.contains(w));
            assert_eq!(from_signal, s.label() == Label::F);
            assert!((cfg.min_len..=cfg.max_len).contains(&words.len()));
            assert!(s.time() >= cfg.start_date && s.time() <= cfg.end_date);
        }
    }

    #[test]
    fn no_signal_classes_share_one_distribution() {
        // With p_signal = 0 the label is drawn independently of the words, so
        // word frequencies per class estimate the same distribution.
        let cfg = GeneratorConfig { total: 4000, ratio: 1.0, p_signal: 0.0, ..Default::default() };
        let data = generate_corpus(&cfg).unwrap();
        let mean_len = |l: Label| {
            let v: Vec<usize> = data.iter().filter(|s| s.label() == l).map(|s| s.text().split(' ').count()).collect();
            v.iter().sum::<usize>() as f64 / v.len() as f64
        };
        assert!((mean_len(Label::F) - mean_len(Label::NF)).abs() < 1.0);
        let signal: HashSet<String> = signal_words(cfg.signal_vocab).into_iter().collect();
        assert!(data.iter().all(|s| clean_text(s.text()).split(' ').all(|w| !signal.contains(w))));
    }

    #[test]
    fn seeded_output_is_reproducible() {
        let cfg = GeneratorConfig { total: 300, ratio: 10.0, p_signal: 0.3, ..Default::default() };
        assert_eq!(generate_corpus(&cfg).unwrap(), generate_corpus(&cfg).unwrap());
        let other = GeneratorConfig { seed: 43, ..cfg.clone() };
        assert_ne!(generate_corpus(&cfg).unwrap(), generate_corpus(&other).unwrap());
    }
}
