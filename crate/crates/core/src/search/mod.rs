//! Inverted index over dataset records: BM25 text ranking, facet filters and
//! counts, synonym expansion, bounding-box filtering and distance sorting.
//! [`scan::ScanEngine`] answers the same queries without an index.

mod geo;
mod index;
pub mod scan;
mod synonyms;
mod tokenize;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use geo::{haversine_km, BBox, GeoPoint, EARTH_RADIUS_KM};
pub use index::{InvertedIndex, Posting};
pub use synonyms::{expand_synonyms, extract_synonyms, SynonymError, SynonymTable, WeightedTerm, SYNONYM_WEIGHT};
pub use tokenize::tokenize;

use crate::model::DatasetRecord;
use crate::rdf::Iri;

pub const MAX_PAGE_SIZE: usize = 100;
pub const DEFAULT_PAGE_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("invalid bounding box: {0}")]
    BBox(String),
    #[error("coordinates ({lat}, {lon}) are out of range")]
    Coordinates { lat: f64, lon: f64 },
    #[error("invalid paging: {0}")]
    Paging(String),
    #[error("dataset {0} occurs more than once")]
    DuplicateDataset(Iri),
    #[error("unreadable index: {0}")]
    Format(String),
}

/// Title, description and keywords in one language.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TextFields {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub title: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FacetValues {
    #[serde(default)]
    pub category: Vec<Iri>,
    #[serde(default)]
    pub publisher: Option<String>,
    #[serde(default)]
    pub catalog: Option<Iri>,
    #[serde(default)]
    pub license: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocEntry {
    pub dataset: Iri,
    /// Keyed by language tag; untagged text sits under `""`.
    #[serde(default)]
    pub texts: BTreeMap<String, TextFields>,
    #[serde(default)]
    pub facets: FacetValues,
    #[serde(default)]
    pub point: Option<GeoPoint>,
    #[serde(default)]
    pub quality: Option<f64>,
}

const DISPLAY_LANGUAGES: [&str; 3] = ["de", "en", ""];

impl DocEntry {
    pub fn new(dataset: Iri) -> Self {
        Self { dataset, texts: BTreeMap::new(), facets: FacetValues::default(), point: None, quality: None }
    }

    /// Text fields per language. The point is the finest spatial annotation;
    /// the license is the one most distributions carry.
    pub fn from_record(record: &DatasetRecord, quality: Option<f64>) -> Self {
        let mut texts: BTreeMap<String, TextFields> = BTreeMap::new();
        let key = |lang: &Option<String>| lang.clone().unwrap_or_default();
        for t in &record.titles {
            let f = texts.entry(key(&t.lang)).or_default();
            push_sentence(&mut f.title, &t.value);
        }
        for d in &record.descriptions {
            let f = texts.entry(key(&d.lang)).or_default();
            push_sentence(&mut f.description, &d.value);
        }
        for k in &record.keywords {
            texts.entry(key(&k.lang)).or_default().keywords.push(k.value.clone());
        }
        let mut category = record.themes.clone();
        category.sort();
        category.dedup();
        let publisher = record.publisher.as_ref().and_then(|p| {
            p.name.clone().or_else(|| p.iri.as_ref().map(|i| i.to_string()))
        });
        let mut license_counts: BTreeMap<&Iri, usize> = BTreeMap::new();
        for d in &record.distributions {
            if let Some(l) = &d.license {
                *license_counts.entry(l).or_default() += 1;
            }
        }
        let license = license_counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(l, _)| (*l).clone());
        let finest = record.spatial.iter().map(|a| a.level).max();
        let point = finest
            .and_then(|level| record.spatial.iter().find(|a| a.level == level))
            .and_then(|a| GeoPoint::new(a.lat, a.lon).ok());
        Self {
            dataset: record.iri.clone(),
            texts,
            facets: FacetValues { category, publisher, catalog: record.catalog.clone(), license },
            point,
            quality,
        }
    }

    fn display(&self, pick: impl Fn(&TextFields) -> &str) -> Option<&str> {
        DISPLAY_LANGUAGES
            .iter()
            .filter_map(|l| self.texts.get(*l))
            .chain(self.texts.values())
            .map(pick)
            .find(|s| !s.is_empty())
    }

    /// Title preferring German, then English, then untagged text.
    pub fn title(&self) -> Option<&str> {
        self.display(|t| &t.title)
    }

    pub fn description(&self) -> Option<&str> {
        self.display(|t| &t.description)
    }

    /// Text of one searchable field across all languages.
    pub fn field_text(&self, field: Field) -> String {
        let parts: Vec<&str> = match field {
            Field::Title => self.texts.values().map(|t| t.title.as_str()).collect(),
            Field::Description => self.texts.values().map(|t| t.description.as_str()).collect(),
            Field::Keywords => self.texts.values().flat_map(|t| t.keywords.iter().map(String::as_str)).collect(),
        };
        parts.join(" ")
    }

    pub fn facet_values(&self, field: FacetField) -> Vec<String> {
        let f = &self.facets;
        match field {
            FacetField::Category => {
                let set: BTreeSet<String> = f.category.iter().map(|i| i.to_string()).collect();
                set.into_iter().collect()
            }
            FacetField::Publisher => f.publisher.iter().cloned().collect(),
            FacetField::Catalog => f.catalog.iter().map(|i| i.to_string()).collect(),
            FacetField::License => f.license.iter().map(|i| i.to_string()).collect(),
        }
    }
}

fn push_sentence(target: &mut String, text: &str) {
    if !target.is_empty() {
        target.push(' ');
    }
    target.push_str(text);
}

/// Searchable text fields, in scoring order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Title,
    Keywords,
    Description,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Title, Field::Keywords, Field::Description];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetField {
    Category,
    Publisher,
    Catalog,
    License,
}

impl FacetField {
    pub const ALL: [FacetField; 4] = [FacetField::Category, FacetField::Publisher, FacetField::Catalog, FacetField::License];

    pub fn as_str(self) -> &'static str {
        match self {
            FacetField::Category => "category",
            FacetField::Publisher => "publisher",
            FacetField::Catalog => "catalog",
            FacetField::License => "license",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FacetField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FacetField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FacetField::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown facet field `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combinator {
    And,
    #[default]
    Or,
}

impl FromStr for Combinator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Combinator::And),
            "or" => Ok(Combinator::Or),
            _ => Err(format!("combinator must be `and` or `or`, got `{s}`")),
        }
    }
}

/// Selected values of one facet field. An empty selection filters nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetFilter {
    pub values: BTreeSet<String>,
    pub mode: Combinator,
}

impl FacetFilter {
    pub fn matches(&self, doc_values: &[String]) -> bool {
        match self.mode {
            _ if self.values.is_empty() => true,
            Combinator::Or => doc_values.iter().any(|v| self.values.contains(v)),
            Combinator::And => self.values.iter().all(|v| doc_values.contains(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortOrder {
    #[default]
    Relevance,
    Distance(GeoPoint),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub text: String,
    pub filters: BTreeMap<FacetField, FacetFilter>,
    pub bbox: Option<BBox>,
    pub sort: SortOrder,
    pub synonyms: bool,
    /// 1-based.
    pub page: usize,
    pub size: usize,
}

impl Default for SearchQuery {
    fn default() -> Self {
        Self {
            text: String::new(),
            filters: BTreeMap::new(),
            bbox: None,
            sort: SortOrder::Relevance,
            synonyms: false,
            page: 1,
            size: DEFAULT_PAGE_SIZE,
        }
    }
}

impl SearchQuery {
    pub fn text(text: impl Into<String>) -> Self {
        Self { text: text.into(), ..Self::default() }
    }

    pub fn with_filter(mut self, field: FacetField, mode: Combinator, values: &[&str]) -> Self {
        self.filters.insert(field, FacetFilter { values: values.iter().map(|v| v.to_string()).collect(), mode });
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.page == 0 {
            return Err(SearchError::Paging("page starts at 1".into()));
        }
        if self.size == 0 || self.size > MAX_PAGE_SIZE {
            return Err(SearchError::Paging(format!("size must be between 1 and {MAX_PAGE_SIZE}")));
        }
        if let Some(b) = &self.bbox {
            GeoPoint::new(b.sw.lat, b.sw.lon)?;
            GeoPoint::new(b.ne.lat, b.ne.lon)?;
            BBox::new(b.sw, b.ne)?;
        }
        if let SortOrder::Distance(origin) = self.sort {
            GeoPoint::new(origin.lat, origin.lon)?;
        }
        Ok(())
    }

    /// Index of the first hit on the requested page, saturating.
    fn offset(&self) -> usize {
        (self.page - 1).saturating_mul(self.size)
    }
}

/// BM25 constants and per-field boosts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    pub boost_title: f64,
    pub boost_keywords: f64,
    pub boost_description: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75, boost_title: 2.0, boost_keywords: 1.5, boost_description: 1.0 }
    }
}

impl Bm25Params {
    pub fn boost(&self, field: Field) -> f64 {
        match field {
            Field::Title => self.boost_title,
            Field::Keywords => self.boost_keywords,
            Field::Description => self.boost_description,
        }
    }

    pub fn idf(&self, docs: usize, df: usize) -> f64 {
        (1.0 + (docs as f64 - df as f64 + 0.5) / (df as f64 + 0.5)).ln()
    }

    /// Contribution of one term in one field, before the query weight.
    pub fn term_score(&self, field: Field, idf: f64, tf: u32, len: u32, avg_len: f64) -> f64 {
        let tf = tf as f64;
        let norm = 1.0 - self.b + self.b * len as f64 / avg_len;
        self.boost(field) * idf * tf * (self.k1 + 1.0) / (tf + self.k1 * norm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hit<'a> {
    pub doc: &'a DocEntry,
    pub score: f64,
    pub distance_km: Option<f64>,
}

pub type FacetCounts = BTreeMap<FacetField, BTreeMap<String, usize>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<'a> {
    pub total: usize,
    pub page: usize,
    pub size: usize,
    pub hits: Vec<Hit<'a>>,
    /// Over all matches, before paging.
    pub facets: FacetCounts,
}

/// Relevance: score descending, then IRI. Distance: nearest first, then
/// relevance; documents without a point go last in IRI order.
pub(crate) fn hit_order(sort: &SortOrder, a: &Hit<'_>, b: &Hit<'_>) -> Ordering {
    let by_relevance = || b.score.total_cmp(&a.score).then_with(|| a.doc.dataset.cmp(&b.doc.dataset));
    match sort {
        SortOrder::Relevance => by_relevance(),
        SortOrder::Distance(_) => match (a.distance_km, b.distance_km) {
            (Some(x), Some(y)) => x.total_cmp(&y).then_with(by_relevance),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => a.doc.dataset.cmp(&b.doc.dataset),
        },
    }
}

/// Sorts, keeping only what the requested page needs.
pub(crate) fn paginate<'a>(mut hits: Vec<Hit<'a>>, query: &SearchQuery) -> Vec<Hit<'a>> {
    let offset = query.offset();
    if offset >= hits.len() {
        return Vec::new();
    }
    let keep = offset.saturating_add(query.size).min(hits.len());
    let cmp = |a: &Hit<'_>, b: &Hit<'_>| hit_order(&query.sort, a, b);
    if keep < hits.len() {
        hits.select_nth_unstable_by(keep - 1, cmp);
        hits.truncate(keep);
    }
    hits.sort_by(cmp);
    hits.drain(..offset);
    hits
}
