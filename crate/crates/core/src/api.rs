//! JSON shapes and query-string mapping shared by the HTTP service and its
//! client.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::license::Conflict;
use crate::search::{
    BBox, Combinator, DocEntry, FacetCounts, FacetField, FacetFilter, GeoPoint, Hit, SearchQuery, SearchResult,
    SortOrder, TextFields,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{status} {code}: {message}")]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(code: &str, message: impl fmt::Display) -> Self {
        Self { status: 400, code: code.to_owned(), message: message.to_string() }
    }

    pub fn not_found(message: impl fmt::Display) -> Self {
        Self { status: 404, code: "not_found".to_owned(), message: message.to_string() }
    }

    pub fn internal(message: impl fmt::Display) -> Self {
        Self { status: 500, code: "internal".to_owned(), message: message.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDto {
    pub lat: f64,
    pub lon: f64,
}

impl From<GeoPoint> for PointDto {
    fn from(p: GeoPoint) -> Self {
        Self { lat: p.lat, lon: p.lon }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHitDto {
    pub iri: String,
    pub title: Option<String>,
    pub description: Option<String>,
    pub publisher: Option<String>,
    pub catalog: Option<String>,
    pub license: Option<String>,
    pub quality: Option<f64>,
    pub point: Option<PointDto>,
}

impl From<&Hit<'_>> for SearchHitDto {
    fn from(hit: &Hit<'_>) -> Self {
        let d = hit.doc;
        Self {
            iri: d.dataset.to_string(),
            title: d.title().map(str::to_owned),
            description: d.description().map(str::to_owned),
            publisher: d.facets.publisher.clone(),
            catalog: d.facets.catalog.as_ref().map(|i| i.to_string()),
            license: d.facets.license.as_ref().map(|i| i.to_string()),
            quality: d.quality,
            point: d.point.map(PointDto::from),
        }
    }
}

fn facets_dto(facets: &FacetCounts) -> BTreeMap<String, BTreeMap<String, usize>> {
    facets.iter().map(|(f, counts)| (f.as_str().to_owned(), counts.clone())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub total: usize,
    pub page: usize,
    pub size: usize,
    pub results: Vec<SearchHitDto>,
    pub facets: BTreeMap<String, BTreeMap<String, usize>>,
}

impl From<&SearchResult<'_>> for SearchResponse {
    fn from(r: &SearchResult<'_>) -> Self {
        Self {
            total: r.total,
            page: r.page,
            size: r.size,
            results: r.hits.iter().map(SearchHitDto::from).collect(),
            facets: facets_dto(&r.facets),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetsResponse {
    pub total: usize,
    pub facets: BTreeMap<String, BTreeMap<String, usize>>,
}

impl FacetsResponse {
    pub fn new(total: usize, facets: &FacetCounts) -> Self {
        Self { total, facets: facets_dto(facets) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetResponse {
    pub iri: String,
    pub title: Option<String>,
    pub description: Option<String>,
    /// Per language tag; untagged text under `""`.
    pub texts: BTreeMap<String, TextFields>,
    pub category: Vec<String>,
    pub publisher: Option<String>,
    pub catalog: Option<String>,
    pub license: Option<String>,
    pub quality: Option<f64>,
    pub point: Option<PointDto>,
}

impl From<&DocEntry> for DatasetResponse {
    fn from(d: &DocEntry) -> Self {
        Self {
            iri: d.dataset.to_string(),
            title: d.title().map(str::to_owned),
            description: d.description().map(str::to_owned),
            texts: d.texts.clone(),
            category: d.facets.category.iter().map(|i| i.to_string()).collect(),
            publisher: d.facets.publisher.clone(),
            catalog: d.facets.catalog.as_ref().map(|i| i.to_string()),
            license: d.facets.license.as_ref().map(|i| i.to_string()),
            quality: d.quality,
            point: d.point.map(PointDto::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricScoreDto {
    pub id: u8,
    pub key: String,
    pub dimension: String,
    /// `None` when the metric was not computed.
    pub score: Option<u8>,
    pub not_computed: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityResponse {
    pub iri: String,
    pub aggregate: Option<f64>,
    pub metrics: Vec<MetricScoreDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseCheckRequest {
    pub licenses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDto {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseCheckResponse {
    pub compatible: bool,
    pub conflicts: Vec<Conflict>,
    pub candidates: Vec<CandidateDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub datasets: usize,
}

fn parse_number<T: std::str::FromStr>(name: &str, value: &str) -> Result<T, ApiError> {
    value
        .trim()
        .parse()
        .map_err(|_| ApiError::bad_request(&format!("invalid_{name}"), format!("`{name}` has invalid value `{value}`")))
}

/// Maps query-string pairs onto a validated [`SearchQuery`]. Unknown
/// parameters are ignored; facet values may repeat.
pub fn parse_search_params(pairs: &[(String, String)]) -> Result<SearchQuery, ApiError> {
    let mut query = SearchQuery::default();
    let mut modes: BTreeMap<FacetField, Combinator> = BTreeMap::new();
    let (mut lat, mut lon, mut distance) = (None, None, false);
    for (key, value) in pairs {
        match key.as_str() {
            "q" => query.text = value.clone(),
            "bbox" if value.trim().is_empty() => {}
            "bbox" => query.bbox = Some(BBox::parse(value).map_err(|e| ApiError::bad_request("invalid_bbox", e))?),
            "sort" => match value.as_str() {
                "relevance" => distance = false,
                "distance" => distance = true,
                other => return Err(ApiError::bad_request("invalid_sort", format!("unknown sort `{other}`"))),
            },
            "lat" => lat = Some(parse_number::<f64>("lat", value)?),
            "lon" => lon = Some(parse_number::<f64>("lon", value)?),
            "synonyms" => {
                query.synonyms = match value.as_str() {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    other => {
                        return Err(ApiError::bad_request("invalid_synonyms", format!("`synonyms` must be true or false, got `{other}`")))
                    }
                }
            }
            "page" => query.page = parse_number("page", value)?,
            "size" => query.size = parse_number("size", value)?,
            other => {
                if let Ok(field) = other.parse::<FacetField>() {
                    query.filters.entry(field).or_default().values.insert(value.clone());
                } else if let Some(field) = other.strip_prefix("facet_mode.") {
                    let field: FacetField = field.parse().map_err(|e| ApiError::bad_request("invalid_facet_mode", e))?;
                    let mode = value.parse().map_err(|e| ApiError::bad_request("invalid_facet_mode", e))?;
                    modes.insert(field, mode);
                }
            }
        }
    }
    for (field, mode) in modes {
        query.filters.entry(field).or_default().mode = mode;
    }
    query.filters.retain(|_, f| !f.values.is_empty() || f.mode != Combinator::Or);
    if distance {
        let (Some(lat), Some(lon)) = (lat, lon) else {
            return Err(ApiError::bad_request("missing_origin", "sort=distance needs `lat` and `lon`"));
        };
        let origin = GeoPoint::new(lat, lon).map_err(|e| ApiError::bad_request("invalid_origin", e))?;
        query.sort = SortOrder::Distance(origin);
    }
    query.validate().map_err(|e| match e {
        crate::search::SearchError::Paging(m) => ApiError::bad_request("invalid_paging", m),
        other => ApiError::bad_request("invalid_query", other),
    })?;
    Ok(query)
}

/// Inverse of [`parse_search_params`]; parameters at their default value are
/// left out.
pub fn search_params(query: &SearchQuery) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut push = |k: &str, v: String| out.push((k.to_owned(), v));
    if !query.text.is_empty() {
        push("q", query.text.clone());
    }
    for (field, FacetFilter { values, mode }) in &query.filters {
        for v in values {
            push(field.as_str(), v.clone());
        }
        if *mode == Combinator::And {
            push(&format!("facet_mode.{field}"), "and".into());
        }
    }
    if let Some(b) = &query.bbox {
        push("bbox", format!("{},{},{},{}", b.sw.lat, b.sw.lon, b.ne.lat, b.ne.lon));
    }
    if let SortOrder::Distance(o) = query.sort {
        push("sort", "distance".into());
        push("lat", o.lat.to_string());
        push("lon", o.lon.to_string());
    }
    if query.synonyms {
        push("synonyms", "true".into());
    }
    push("page", query.page.to_string());
    push("size", query.size.to_string());
    out
}
