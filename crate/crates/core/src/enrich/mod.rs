//! Enrichment: language tags for untagged literals and place annotations
//! from a gazetteer.

mod gazetteer;
mod language;

pub use gazetteer::{annotate_places, Gazetteer, GazetteerEntry, GazetteerError, PlaceMatch};
pub use language::{
    detect_language, trigram_counts, LanguageDetector, LanguageGuess, LanguageProfile, ProfileError,
    MIN_TEXT_CHARS, PROFILE_SIZE,
};

use crate::model::{DatasetRecord, LangString};

/// Default minimum confidence for attaching a detected language tag.
pub const DEFAULT_LANGUAGE_THRESHOLD: f64 = 0.75;

/// Tags untagged titles and descriptions whose detected language reaches
/// `threshold`. Tagged literals are never touched.
pub fn refine_language_tags(record: &DatasetRecord, threshold: f64, detector: &LanguageDetector) -> DatasetRecord {
    let mut out = record.clone();
    for list in [&mut out.titles, &mut out.descriptions] {
        for item in list.iter_mut().filter(|s| s.lang.is_none()) {
            if let Some(guess) = detector.detect(&item.value) {
                if guess.confidence >= threshold {
                    item.lang = Some(guess.lang);
                }
            }
        }
        dedup_keep_order(list);
    }
    out
}

fn dedup_keep_order(list: &mut Vec<LangString>) {
    let mut seen = std::collections::HashSet::new();
    list.retain(|s| seen.insert(s.clone()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Iri;

    fn record(descriptions: Vec<LangString>) -> DatasetRecord {
        let mut r = DatasetRecord::new(Iri::new("http://ex/d").unwrap());
        r.descriptions = descriptions;
        r
    }

    #[test]
    fn untagged_german_gets_tag() {
        let r = record(vec![LangString::untagged("Der Datensatz enthält Informationen über Haltestellen im Stadtgebiet")]);
        let out = refine_language_tags(&r, DEFAULT_LANGUAGE_THRESHOLD, LanguageDetector::bundled());
        assert_eq!(out.descriptions[0].lang.as_deref(), Some("de"));
        let again = refine_language_tags(&out, DEFAULT_LANGUAGE_THRESHOLD, LanguageDetector::bundled());
        assert_eq!(again, out);
    }

    #[test]
    fn tagged_literal_is_untouched() {
        let r = record(vec![LangString::new("Der Datensatz enthält Informationen über Haltestellen", Some("en"))]);
        let out = refine_language_tags(&r, DEFAULT_LANGUAGE_THRESHOLD, LanguageDetector::bundled());
        assert_eq!(out, r);
    }

    #[test]
    fn below_threshold_is_untouched() {
        let text = "Der Datensatz enthält Informationen über Haltestellen im Stadtgebiet";
        let conf = detect_language(text).unwrap().confidence;
        let r = record(vec![LangString::untagged(text)]);
        let out = refine_language_tags(&r, (conf + 1.0) / 2.0, LanguageDetector::bundled());
        assert_eq!(out, r);
    }
}
