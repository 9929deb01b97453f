//! Readability and spelling measures for description texts.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::enrich::LanguageDetector;
use crate::model::LangString;

const WORDS_DE: &str = include_str!("../../data/words-de.txt");
const WORDS_EN: &str = include_str!("../../data/words-en.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TextLanguage {
    De,
    En,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("text has no words")]
pub struct NotApplicable;

/// Language of a literal: its tag when present, else the detector's guess.
/// Only German and English are supported.
pub fn text_language(s: &LangString, detector: &LanguageDetector) -> Option<TextLanguage> {
    let tag = match &s.lang {
        Some(tag) => tag.split('-').next().unwrap_or_default().to_owned(),
        None => detector.detect(&s.value)?.lang,
    };
    match tag.as_str() {
        "de" => Some(TextLanguage::De),
        "en" => Some(TextLanguage::En),
        _ => None,
    }
}

fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric() && c != '-' && c != '\'')
        .map(|w| w.trim_matches(|c: char| !c.is_alphabetic()))
        .filter(|w| w.chars().any(char::is_alphabetic))
}

/// Syllables as maximal runs of vowels (`aeiouy` plus umlauts), at least one
/// per word. Diphthongs like "au" or "ei" therefore count once.
pub fn syllables(word: &str) -> usize {
    let mut count = 0;
    let mut in_group = false;
    for c in word.chars().flat_map(char::to_lowercase) {
        let vowel = matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y' | 'ä' | 'ö' | 'ü');
        if vowel && !in_group {
            count += 1;
        }
        in_group = vowel;
    }
    count.max(1)
}

/// Flesch reading ease; the German variant uses Amstad's coefficients.
/// Sentences end at `.`, `!` or `?`; text without a terminator is one sentence.
pub fn flesch_reading_ease(text: &str, lang: TextLanguage) -> Result<f64, NotApplicable> {
    let word_list: Vec<&str> = words(text).collect();
    if word_list.is_empty() {
        return Err(NotApplicable);
    }
    let sentences = text
        .split(['.', '!', '?'])
        .filter(|s| words(s).next().is_some())
        .count()
        .max(1);
    let syllable_total: usize = word_list.iter().map(|w| syllables(w)).sum();
    let asl = word_list.len() as f64 / sentences as f64;
    let asw = syllable_total as f64 / word_list.len() as f64;
    Ok(match lang {
        TextLanguage::En => 206.835 - 1.015 * asl - 84.6 * asw,
        TextLanguage::De => 180.0 - asl - 58.5 * asw,
    })
}

#[derive(Debug, Clone, Default)]
pub struct WordList {
    words: HashSet<String>,
}

impl WordList {
    /// One word per line, compared case-insensitively.
    pub fn parse(text: &str) -> Self {
        Self {
            words: text
                .lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect(),
        }
    }

    pub fn bundled(lang: TextLanguage) -> &'static Self {
        static DE: OnceLock<WordList> = OnceLock::new();
        static EN: OnceLock<WordList> = OnceLock::new();
        match lang {
            TextLanguage::De => DE.get_or_init(|| Self::parse(WORDS_DE)),
            TextLanguage::En => EN.get_or_init(|| Self::parse(WORDS_EN)),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    /// `(known, total)` over words of at least two letters.
    pub fn count_known(&self, text: &str) -> (usize, usize) {
        let mut known = 0;
        let mut total = 0;
        for w in words(text).filter(|w| w.chars().count() >= 2) {
            total += 1;
            if self.contains(w) {
                known += 1;
            }
        }
        (known, total)
    }
}
