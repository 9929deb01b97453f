use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::tokenize;
use crate::rdf::{Graph, Subject, Term};
use crate::vocab::{lex, rdf};

pub const SYNONYM_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("synonym table line {line}: {message}")]
pub struct SynonymError {
    pub line: usize,
    pub message: String,
}

/// Headwords with their synonyms as listed, plus the symmetric closure used
/// for lookups.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "BTreeMap<String, BTreeSet<String>>", into = "BTreeMap<String, BTreeSet<String>>")]
pub struct SynonymTable {
    entries: BTreeMap<String, BTreeSet<String>>,
    closed: BTreeMap<String, BTreeSet<String>>,
}

fn normalize(term: &str) -> String {
    tokenize(term).join(" ")
}

impl SynonymTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut table = Self::new();
        for (word, synonyms) in entries {
            table.insert(word.as_ref(), synonyms.iter().map(AsRef::as_ref));
        }
        table
    }

    pub fn insert<'a>(&mut self, word: &str, synonyms: impl IntoIterator<Item = &'a str>) {
        let word = normalize(word);
        if word.is_empty() {
            return;
        }
        let synonyms: BTreeSet<String> = synonyms
            .into_iter()
            .map(normalize)
            .filter(|s| !s.is_empty() && *s != word)
            .collect();
        if synonyms.is_empty() {
            return;
        }
        for s in &synonyms {
            self.closed.entry(word.clone()).or_default().insert(s.clone());
            self.closed.entry(s.clone()).or_default().insert(word.clone());
        }
        self.entries.entry(word).or_default().extend(synonyms);
    }

    /// Parses `noun<TAB>syn1|syn2|…`; `#` lines and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, SynonymError> {
        let mut table = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((word, rest)) = line.split_once('\t') else {
                return Err(SynonymError { line: i + 1, message: "expected a tab after the headword".into() });
            };
            if word.trim().is_empty() {
                return Err(SynonymError { line: i + 1, message: "empty headword".into() });
            }
            table.insert(word, rest.split('|'));
        }
        Ok(table)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (word, synonyms) in &self.entries {
            out.push_str(word);
            out.push('\t');
            out.push_str(&synonyms.iter().cloned().collect::<Vec<_>>().join("|"));
            out.push('\n');
        }
        out
    }

    /// Number of headwords.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.entries
    }

    /// Synonyms of `term` after symmetric closure.
    pub fn synonyms_of(&self, term: &str) -> impl Iterator<Item = &str> {
        self.closed.get(term).into_iter().flatten().map(String::as_str)
    }
}

impl From<BTreeMap<String, BTreeSet<String>>> for SynonymTable {
    fn from(entries: BTreeMap<String, BTreeSet<String>>) -> Self {
        let mut table = Self::new();
        for (word, synonyms) in &entries {
            table.insert(word, synonyms.iter().map(String::as_str));
        }
        table
    }
}

impl From<SynonymTable> for BTreeMap<String, BTreeSet<String>> {
    fn from(table: SynonymTable) -> Self {
        table.entries
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedTerm {
    pub term: String,
    pub weight: f64,
}

/// Query terms at weight 1, then each synonym once at [`SYNONYM_WEIGHT`].
/// Synonyms are not expanded further; multi-word synonyms add each word.
pub fn expand_synonyms(terms: &[String], table: &SynonymTable) -> Vec<WeightedTerm> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();
    for t in terms {
        if seen.insert(t) {
            out.push(WeightedTerm { term: t.clone(), weight: 1.0 });
        }
    }
    let mut extra = Vec::new();
    for t in terms {
        for s in table.synonyms_of(t) {
            for word in s.split(' ') {
                if seen.insert(word) {
                    extra.push(WeightedTerm { term: word.to_owned(), weight: SYNONYM_WEIGHT });
                }
            }
        }
    }
    out.extend(extra);
    out
}

fn literal_text(term: &Term) -> Option<&str> {
    term.as_literal().map(|l| l.lexical())
}

fn is_german(term: &Term) -> bool {
    match term {
        Term::Literal(l) => {
            let v = l.lexical().to_ascii_lowercase();
            v == "de" || v.starts_with("de-") || v == "deu" || v == "ger"
        }
        Term::Iri(iri) => {
            let last = iri.as_str().rsplit(['/', '#']).next().unwrap_or("").to_ascii_lowercase();
            matches!(last.as_str(), "de" | "deu" | "ger")
        }
        Term::Blank(_) => false,
    }
}

/// Builds a table from a lexicon graph: German nouns that have at least one
/// synonym, keyed by canonical form, restricted to nouns whose words all
/// occur in `corpus_terms`.
pub fn extract_synonyms(lexicon: &Graph, corpus_terms: &BTreeSet<String>) -> SynonymTable {
    let (type_, term_class, language, pos, noun, canonical, synonym) = (
        rdf::type_(),
        Term::Iri(lex::term()),
        lex::language(),
        lex::part_of_speech(),
        Term::Iri(lex::noun()),
        lex::canonical_form(),
        lex::synonym(),
    );
    let canonical_of = |node: &Term| -> Vec<String> {
        match node {
            Term::Literal(l) => vec![l.lexical().to_owned()],
            other => other
                .as_subject()
                .map(|s| lexicon.objects(&s, &canonical).filter_map(literal_text).map(str::to_owned).collect())
                .unwrap_or_default(),
        }
    };
    let nouns: BTreeSet<&Subject> = lexicon
        .subjects(&type_, &term_class)
        .filter(|s| lexicon.objects(s, &language).any(is_german))
        .filter(|s| lexicon.objects(s, &pos).any(|p| *p == noun))
        .collect();
    let mut table = SynonymTable::new();
    for s in nouns {
        let synonyms: Vec<String> = lexicon.objects(s, &synonym).flat_map(&canonical_of).collect();
        if synonyms.is_empty() {
            continue;
        }
        for form in canonical_of(&Term::from(s.clone())) {
            let words = tokenize(&form);
            if !words.is_empty() && words.iter().all(|w| corpus_terms.contains(w)) {
                table.insert(&form, synonyms.iter().map(String::as_str));
            }
        }
    }
    table
}
