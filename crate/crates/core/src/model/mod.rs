//! Typed view of a single dataset slice and the mapping back to triples.
//!
//! Triples the mapping does not understand stay in [`DatasetRecord::extra`]
//! and are written back unchanged, so a read/write cycle never loses data.

mod read;
mod timestamp;
mod write;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::rdf::{Iri, Subject, Triple};

pub use read::{from_graph, ModelError};
pub use timestamp::Timestamp;
pub use write::to_graph;

/// A literal value with its optional language tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LangString {
    pub value: String,
    pub lang: Option<String>,
}

impl LangString {
    pub fn new(value: impl Into<String>, lang: Option<&str>) -> Self {
        Self {
            value: value.into(),
            lang: lang.map(str::to_ascii_lowercase),
        }
    }

    pub fn untagged(value: impl Into<String>) -> Self {
        Self::new(value, None)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgentRef {
    pub iri: Option<Iri>,
    pub name: Option<String>,
    pub homepage: Option<Iri>,
    pub email: Option<String>,
}

impl AgentRef {
    pub fn is_empty(&self) -> bool {
        self.iri.is_none() && self.name.is_none() && self.homepage.is_none() && self.email.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContactInfo {
    pub iri: Option<Iri>,
    pub name: Option<String>,
    pub email: Option<String>,
    pub url: Option<String>,
    pub phone: Option<String>,
    pub address: Option<String>,
}

impl ContactInfo {
    pub fn is_empty(&self) -> bool {
        self.iri.is_none()
            && self.name.is_none()
            && self.email.is_none()
            && self.url.is_none()
            && self.phone.is_none()
            && self.address.is_none()
    }
}

/// Administrative level of a place; declaration order runs coarse to fine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeoLevel {
    Nuts0,
    Nuts1,
    Nuts2,
    Nuts3,
    Lau,
    Point,
}

impl GeoLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            GeoLevel::Nuts0 => "NUTS0",
            GeoLevel::Nuts1 => "NUTS1",
            GeoLevel::Nuts2 => "NUTS2",
            GeoLevel::Nuts3 => "NUTS3",
            GeoLevel::Lau => "LAU",
            GeoLevel::Point => "POINT",
        }
    }
}

impl fmt::Display for GeoLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeoLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NUTS0" => Ok(GeoLevel::Nuts0),
            "NUTS1" => Ok(GeoLevel::Nuts1),
            "NUTS2" => Ok(GeoLevel::Nuts2),
            "NUTS3" => Ok(GeoLevel::Nuts3),
            "LAU" => Ok(GeoLevel::Lau),
            "POINT" => Ok(GeoLevel::Point),
            other => Err(format!("unknown geo level `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoAnnotation {
    pub place_iri: Option<Iri>,
    pub place_name: String,
    pub level: GeoLevel,
    pub lat: f64,
    pub lon: f64,
}

impl GeoAnnotation {
    fn sort_key(&self, other: &Self) -> Ordering {
        self.place_iri
            .cmp(&other.place_iri)
            .then_with(|| self.place_name.cmp(&other.place_name))
            .then_with(|| self.level.cmp(&other.level))
            .then_with(|| self.lat.total_cmp(&other.lat))
            .then_with(|| self.lon.total_cmp(&other.lon))
    }
}

pub fn valid_coordinates(lat: f64, lon: f64) -> bool {
    (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TemporalRange {
    pub start: Option<Timestamp>,
    pub end: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    /// The distribution node; blank nodes keep their label.
    pub node: Subject,
    pub access_url: Option<Iri>,
    pub download_url: Option<Iri>,
    pub media_type: Option<String>,
    pub format: Option<String>,
    pub license: Option<Iri>,
    pub byte_size: Option<u64>,
    pub issued: Option<Timestamp>,
    pub modified: Option<Timestamp>,
}

impl Distribution {
    pub fn new(node: impl Into<Subject>) -> Self {
        Self {
            node: node.into(),
            access_url: None,
            download_url: None,
            media_type: None,
            format: None,
            license: None,
            byte_size: None,
            issued: None,
            modified: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub iri: Iri,
    pub titles: Vec<LangString>,
    pub descriptions: Vec<LangString>,
    pub keywords: Vec<LangString>,
    pub themes: Vec<Iri>,
    pub publisher: Option<AgentRef>,
    pub catalog: Option<Iri>,
    pub issued: Option<Timestamp>,
    pub modified: Option<Timestamp>,
    pub accrual_periodicity: Option<Iri>,
    pub spatial: Vec<GeoAnnotation>,
    pub temporal: Option<TemporalRange>,
    pub landing_page: Option<Iri>,
    pub contact_point: Option<ContactInfo>,
    pub identifier: Option<String>,
    pub version: Option<String>,
    pub languages: Vec<Iri>,
    pub distributions: Vec<Distribution>,
    /// Slice triples not represented by any field above.
    pub extra: Vec<Triple>,
    /// Values that were present but could not be mapped.
    pub warnings: Vec<String>,
}

impl DatasetRecord {
    pub fn new(iri: Iri) -> Self {
        Self {
            iri,
            titles: Vec::new(),
            descriptions: Vec::new(),
            keywords: Vec::new(),
            themes: Vec::new(),
            publisher: None,
            catalog: None,
            issued: None,
            modified: None,
            accrual_periodicity: None,
            spatial: Vec::new(),
            temporal: None,
            landing_page: None,
            contact_point: None,
            identifier: None,
            version: None,
            languages: Vec::new(),
            distributions: Vec::new(),
            extra: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Sorts and deduplicates every multi-valued field, matching the order
    /// [`from_graph`] produces.
    pub fn canonicalize(&mut self) {
        for list in [&mut self.titles, &mut self.descriptions, &mut self.keywords] {
            list.sort();
            list.dedup();
        }
        self.themes.sort();
        self.themes.dedup();
        self.languages.sort();
        self.languages.dedup();
        self.spatial.sort_by(GeoAnnotation::sort_key);
        self.spatial.dedup();
        self.distributions.sort_by(|a, b| a.node.cmp(&b.node));
        self.distributions.dedup_by(|a, b| a.node == b.node);
        self.extra.sort();
        self.extra.dedup();
    }

    /// Title in the preferred language, else any title.
    pub fn title(&self, lang: &str) -> Option<&str> {
        pick(&self.titles, lang)
    }

    pub fn description(&self, lang: &str) -> Option<&str> {
        pick(&self.descriptions, lang)
    }

    pub fn download_urls(&self) -> impl Iterator<Item = &Iri> {
        self.distributions.iter().filter_map(|d| d.download_url.as_ref())
    }
}

fn pick<'a>(list: &'a [LangString], lang: &str) -> Option<&'a str> {
    list.iter()
        .find(|s| s.lang.as_deref() == Some(lang))
        .or_else(|| list.iter().find(|s| s.lang.is_none()))
        .or_else(|| list.first())
        .map(|s| s.value.as_str())
}

/// Formats a point as a WKT literal body, longitude first.
pub fn wkt_point(lat: f64, lon: f64) -> String {
    format!("POINT({lon} {lat})")
}

/// Parses `POINT(lon lat)`, returning `(lat, lon)`.
pub fn parse_wkt_point(text: &str) -> Option<(f64, f64)> {
    let text = text.trim();
    let body = text
        .get(..5)
        .filter(|head| head.eq_ignore_ascii_case("point"))
        .map(|_| text[5..].trim())?;
    let inner = body.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = inner.split_whitespace();
    let lon: f64 = parts.next()?.parse().ok()?;
    let lat: f64 = parts.next()?.parse().ok()?;
    if parts.next().is_some() || !valid_coordinates(lat, lon) {
        return None;
    }
    Some((lat, lon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wkt_round_trip() {
        assert_eq!(parse_wkt_point(&wkt_point(51.7189, 8.7575)), Some((51.7189, 8.7575)));
        assert_eq!(parse_wkt_point("point ( 8.5 50.1 )"), Some((50.1, 8.5)));
        assert_eq!(parse_wkt_point("POINT(200 10)"), None);
        assert_eq!(parse_wkt_point("LINESTRING(1 2, 3 4)"), None);
    }

    #[test]
    fn title_prefers_language() {
        let mut r = DatasetRecord::new(Iri::new("http://ex/d").unwrap());
        r.titles = vec![LangString::new("Bus stops", Some("en")), LangString::new("Haltestellen", Some("de"))];
        assert_eq!(r.title("de"), Some("Haltestellen"));
        assert_eq!(r.title("fr"), Some("Bus stops"));
    }
}
