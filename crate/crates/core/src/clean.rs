//! Cleaning of dataset slices: empty values, unwanted languages, format
//! strings and catalog membership.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use crate::rdf::{Graph, Iri, Subject, Term, Triple};
use crate::vocab::{dcat, dct, rdf};

const BUNDLED_MEDIA_TYPES: &str = include_str!("../data/media-types.txt");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("media type table line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

/// Alias table from free-form format names to media types.
#[derive(Debug, Clone, Default)]
pub struct MediaTypeTable {
    aliases: HashMap<String, String>,
    types: HashSet<String>,
}

impl MediaTypeTable {
    /// Parses `alias=type` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut table = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((alias, target)) = line.split_once('=') else {
                return Err(TableError {
                    line: idx + 1,
                    message: "expected alias=type".into(),
                });
            };
            let (alias, target) = (alias.trim().to_lowercase(), target.trim().to_lowercase());
            if alias.is_empty() || target.is_empty() {
                return Err(TableError {
                    line: idx + 1,
                    message: "empty alias or type".into(),
                });
            }
            table.types.insert(target.clone());
            table.aliases.insert(alias, target);
        }
        // A target that is itself an alias of something else would make
        // normalization non-idempotent.
        if let Some(t) = table.types.iter().find(|t| table.aliases.get(*t).is_some_and(|u| u != *t)) {
            return Err(TableError {
                line: 0,
                message: format!("type `{t}` is also an alias"),
            });
        }
        Ok(table)
    }

    pub fn bundled() -> Arc<Self> {
        static TABLE: OnceLock<Arc<MediaTypeTable>> = OnceLock::new();
        TABLE
            .get_or_init(|| Arc::new(Self::parse(BUNDLED_MEDIA_TYPES).expect("bundled table is valid")))
            .clone()
    }

    /// Trimmed, lowercased value mapped through the table; the flag says
    /// whether the result is a type the table knows.
    pub fn normalize(&self, value: &str) -> (String, bool) {
        let key = value.trim().to_lowercase();
        if let Some(target) = self.aliases.get(&key) {
            return (target.clone(), true);
        }
        let known = self.types.contains(&key);
        (key, known)
    }

    pub fn len(&self) -> usize {
        self.aliases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aliases.is_empty()
    }
}

/// [`MediaTypeTable::normalize`] against the bundled table.
pub fn normalize_media_type(value: &str) -> (String, bool) {
    MediaTypeTable::bundled().normalize(value)
}

#[derive(Debug, Clone)]
pub struct CleanConfig {
    /// Lowercase language tags to keep; empty keeps every language.
    pub allowed_languages: BTreeSet<String>,
    pub remove_empty: bool,
    pub normalize_formats: bool,
    pub catalog_id: Option<Iri>,
    pub media_types: Arc<MediaTypeTable>,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            allowed_languages: BTreeSet::new(),
            remove_empty: true,
            normalize_formats: true,
            catalog_id: None,
            media_types: MediaTypeTable::bundled(),
        }
    }
}

impl CleanConfig {
    /// A tag is allowed when it or its primary subtag is listed.
    fn allows(&self, tag: &str) -> bool {
        self.allowed_languages.is_empty()
            || self.allowed_languages.contains(tag)
            || tag
                .split_once('-')
                .is_some_and(|(primary, _)| self.allowed_languages.contains(primary))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanReport {
    pub empty_removed: usize,
    pub language_removed: usize,
    pub pruned_removed: usize,
    pub formats_normalized: usize,
    pub catalog_added: usize,
}

impl CleanReport {
    pub fn add(&mut self, other: &CleanReport) {
        self.empty_removed += other.empty_removed;
        self.language_removed += other.language_removed;
        self.pruned_removed += other.pruned_removed;
        self.formats_normalized += other.formats_normalized;
        self.catalog_added += other.catalog_added;
    }
}

pub fn clean(slice: &Graph, config: &CleanConfig) -> (Graph, CleanReport) {
    let mut report = CleanReport::default();
    let roots: BTreeSet<Subject> = slice
        .iter()
        .filter(|t| t.predicate == rdf::type_() && t.object == Term::Iri(dcat::dataset()))
        .map(|t| t.subject.clone())
        .collect();
    let had_outgoing: HashSet<Subject> = slice.iter().map(|t| t.subject.clone()).collect();

    let mut g = slice.clone();
    g.retain(|t| {
        let Some(lit) = t.object.as_literal() else {
            return true;
        };
        if config.remove_empty && lit.lexical().trim().is_empty() {
            report.empty_removed += 1;
            return false;
        }
        if let Some(tag) = lit.language() {
            if !config.allows(tag) {
                report.language_removed += 1;
                return false;
            }
        }
        true
    });

    if config.remove_empty {
        report.pruned_removed = prune(&mut g, &roots, &had_outgoing);
    }

    if config.normalize_formats {
        let format_preds = [dct::format(), dcat::media_type()];
        let rewrites: Vec<(Triple, Triple)> = g
            .iter()
            .filter(|t| format_preds.contains(&t.predicate))
            .filter_map(|t| {
                let lit = t.object.as_literal()?;
                let (value, _) = config.media_types.normalize(lit.lexical());
                (value != lit.lexical()).then(|| {
                    let mut new = t.clone();
                    new.object = lit.with_lexical(value).into();
                    (t.clone(), new)
                })
            })
            .collect();
        for (old, new) in rewrites {
            g.remove(&old);
            g.insert(new);
            report.formats_normalized += 1;
        }
    }

    if let Some(catalog) = &config.catalog_id {
        for root in &roots {
            if g.insert(Triple::new(root.clone(), dct::is_part_of(), catalog.clone())) {
                report.catalog_added += 1;
            }
        }
    }
    (g, report)
}

/// Removes references to nodes that are empty: blank nodes without outgoing
/// triples, and IRI nodes that had outgoing triples before cleaning but lost
/// them all. Repeats until nothing changes.
fn prune(g: &mut Graph, roots: &BTreeSet<Subject>, had_outgoing: &HashSet<Subject>) -> usize {
    let mut removed = 0;
    loop {
        let live: HashSet<Subject> = g.iter().map(|t| t.subject.clone()).collect();
        let is_empty_node = |node: &Subject| {
            !live.contains(node)
                && !roots.contains(node)
                && match node {
                    Subject::Blank(_) => true,
                    Subject::Iri(_) => had_outgoing.contains(node),
                }
        };
        let dead: Vec<Triple> = g
            .iter()
            .filter(|t| t.object.as_subject().is_some_and(|o| is_empty_node(&o)))
            .cloned()
            .collect();
        if dead.is_empty() {
            return removed;
        }
        for t in &dead {
            g.remove(t);
        }
        removed += dead.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    const P: &str = "@prefix dcat: <http://www.w3.org/ns/dcat#> .\n@prefix dct: <http://purl.org/dc/terms/> .\n@prefix vcard: <http://www.w3.org/2006/vcard/ns#> .\n";

    fn g(body: &str) -> Graph {
        parse_turtle(&format!("{P}{body}")).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_media_type(" CSV "), ("text/csv".into(), true));
        assert_eq!(normalize_media_type("text/csv"), ("text/csv".into(), true));
        assert_eq!(normalize_media_type("weird/x"), ("weird/x".into(), false));
        let (xlsx, known) = normalize_media_type("XLSX");
        assert!(known && xlsx.starts_with("application/vnd.openxmlformats"));
    }

    #[test]
    fn empty_title_is_removed() {
        let (out, report) = clean(&g("<http://ex/d> a dcat:Dataset ; dct:title \"\" ."), &CleanConfig::default());
        assert_eq!(report.empty_removed, 1);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn emptied_contact_is_pruned() {
        let input = g("<http://ex/d> a dcat:Dataset ; dcat:contactPoint [ vcard:fn \"  \" ] .");
        let (out, report) = clean(&input, &CleanConfig::default());
        assert_eq!(report.empty_removed, 1);
        assert_eq!(report.pruned_removed, 1);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn disallowed_language_removed_untagged_kept() {
        let input = g("<http://ex/d> a dcat:Dataset ; dct:description \"Jeu de données\"@fr , \"Beschreibung\" , \"Text\"@de-AT .");
        let config = CleanConfig {
            allowed_languages: ["de", "en"].iter().map(|s| s.to_string()).collect(),
            ..CleanConfig::default()
        };
        let (out, report) = clean(&input, &config);
        assert_eq!(report.language_removed, 1);
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn format_and_catalog() {
        let input = g("<http://ex/d> a dcat:Dataset ; dcat:distribution <http://ex/dist> .\n<http://ex/dist> dct:format \"CSV\" .");
        let config = CleanConfig {
            catalog_id: Some(Iri::new("http://ex/catalog").unwrap()),
            ..CleanConfig::default()
        };
        let (out, report) = clean(&input, &config);
        assert_eq!(report.formats_normalized, 1);
        assert_eq!(report.catalog_added, 1);
        assert!(out.iter().any(|t| t.object.as_literal().is_some_and(|l| l.lexical() == "text/csv")));
        let (twice, report2) = clean(&out, &config);
        assert_eq!(twice, out);
        assert_eq!(report2, CleanReport::default());
    }

    #[test]
    fn plain_iri_references_survive() {
        let input = g("<http://ex/d> a dcat:Dataset ; dcat:theme <http://ex/theme> .");
        let (out, _) = clean(&input, &CleanConfig::default());
        assert_eq!(out, input);
    }
}
