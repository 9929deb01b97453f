use std::collections::HashMap;
use std::sync::OnceLock;

const BUNDLED_DE: &str = include_str!("../../data/de.profile");
const BUNDLED_EN: &str = include_str!("../../data/en.profile");

/// Number of trigrams kept per trained profile.
pub const PROFILE_SIZE: usize = 300;
/// Texts shorter than this (in characters, trimmed) are not classified.
pub const MIN_TEXT_CHARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("profile line {line}: {message}")]
pub struct ProfileError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageGuess {
    pub lang: String,
    pub confidence: f64,
}

/// Character trigram counts. Words are runs of letters, lowercased and
/// padded with one space on each side, so word starts and ends form their
/// own trigrams.
pub fn trigram_counts(text: &str) -> HashMap<String, f64> {
    let mut counts = HashMap::new();
    let lower = text.to_lowercase();
    for word in lower.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty()) {
        let padded: Vec<char> = std::iter::once(' ')
            .chain(word.chars())
            .chain(std::iter::once(' '))
            .collect();
        for window in padded.windows(3) {
            *counts.entry(window.iter().collect::<String>()).or_insert(0.0) += 1.0;
        }
    }
    counts
}

fn norm(v: &HashMap<String, f64>) -> f64 {
    v.values().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct LanguageProfile {
    lang: String,
    freqs: HashMap<String, f64>,
    norm: f64,
}

impl LanguageProfile {
    /// Keeps the `size` most frequent trigrams of `text`.
    pub fn train(lang: &str, text: &str, size: usize) -> Self {
        let mut ranked: Vec<(String, f64)> = trigram_counts(text).into_iter().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(size);
        Self::from_freqs(lang, ranked.into_iter().collect())
    }

    fn from_freqs(lang: &str, freqs: HashMap<String, f64>) -> Self {
        let norm = norm(&freqs);
        Self {
            lang: lang.to_owned(),
            freqs,
            norm,
        }
    }

    /// Reads `trigram<TAB>frequency` lines. Trigrams may contain spaces.
    pub fn parse(lang: &str, text: &str) -> Result<Self, ProfileError> {
        let mut freqs = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| ProfileError {
                line: idx + 1,
                message: message.to_owned(),
            };
            let (token, freq) = line.rsplit_once('\t').ok_or_else(|| err("expected token<TAB>frequency"))?;
            let freq: f64 = freq.trim().parse().map_err(|_| err("frequency is not a number"))?;
            if freq < 0.0 {
                return Err(err("negative frequency"));
            }
            freqs.insert(token.to_owned(), freq);
        }
        Ok(Self::from_freqs(lang, freqs))
    }

    /// Serializes in descending frequency order.
    pub fn to_text(&self) -> String {
        let mut ranked: Vec<(&String, &f64)> = self.freqs.iter().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
        ranked.iter().map(|(t, f)| format!("{t}\t{f}\n")).collect()
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn cosine(&self, counts: &HashMap<String, f64>) -> f64 {
        let n = norm(counts);
        if n == 0.0 || self.norm == 0.0 {
            return 0.0;
        }
        let dot: f64 = counts
            .iter()
            .filter_map(|(t, c)| self.freqs.get(t).map(|f| f * c))
            .sum();
        dot / (n * self.norm)
    }
}

#[derive(Debug, Clone)]
pub struct LanguageDetector {
    profiles: Vec<LanguageProfile>,
}

impl LanguageDetector {
    pub fn new(profiles: Vec<LanguageProfile>) -> Self {
        Self { profiles }
    }

    pub fn bundled() -> &'static Self {
        static DETECTOR: OnceLock<LanguageDetector> = OnceLock::new();
        DETECTOR.get_or_init(|| {
            Self::new(vec![
                LanguageProfile::parse("de", BUNDLED_DE).expect("bundled de profile"),
                LanguageProfile::parse("en", BUNDLED_EN).expect("bundled en profile"),
            ])
        })
    }

    /// Cosine similarity against every profile, in profile order.
    pub fn similarities(&self, text: &str) -> Vec<(&str, f64)> {
        let counts = trigram_counts(text);
        self.profiles.iter().map(|p| (p.lang(), p.cosine(&counts))).collect()
    }

    /// Best-matching language. Confidence is the best squared cosine over the
    /// sum of squared cosines, so it is 1.0 when no other profile matches at
    /// all and 1/k when all k profiles match equally.
    pub fn detect(&self, text: &str) -> Option<LanguageGuess> {
        if text.trim().chars().count() < MIN_TEXT_CHARS {
            return None;
        }
        let sims = self.similarities(text);
        let total: f64 = sims.iter().map(|(_, s)| s * s).sum();
        if total == 0.0 {
            return None;
        }
        // Ties resolve to the earlier profile.
        let (lang, best) = sims
            .iter()
            .fold(None::<(&str, f64)>, |acc, &(l, s)| match acc {
                Some((_, b)) if b >= s => acc,
                _ => Some((l, s)),
            })?;
        Some(LanguageGuess {
            lang: lang.to_owned(),
            confidence: (best * best / total).clamp(0.0, 1.0),
        })
    }
}

/// [`LanguageDetector::detect`] with the bundled German and English profiles.
pub fn detect_language(text: &str) -> Option<LanguageGuess> {
    LanguageDetector::bundled().detect(text)
}
