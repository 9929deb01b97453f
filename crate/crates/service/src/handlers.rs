use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, RawQuery, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use metacat_core::api::{
    parse_search_params, ApiError, CandidateDto, DatasetResponse, FacetsResponse, HealthResponse, LicenseCheckRequest,
    LicenseCheckResponse, MetricScoreDto, QualityResponse, SearchResponse,
};
use metacat_core::license::{check_compatibility, relicensing_candidates};
use metacat_core::quality::registry;
use metacat_core::rdf::Iri;

use crate::AppState;

pub struct Failure(ApiError);

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure(e)
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.0)).into_response()
    }
}

type Reply<T> = Result<Json<T>, Failure>;

fn query_pairs(raw: Option<String>) -> Vec<(String, String)> {
    url::form_urlencoded::parse(raw.unwrap_or_default().as_bytes()).into_owned().collect()
}

fn dataset_iri(raw: &str) -> Result<Iri, Failure> {
    Iri::new(raw).map_err(|_| Failure(ApiError::not_found(format!("no dataset `{raw}`"))))
}

pub async fn health(State(state): State<AppState>) -> Json<HealthResponse> {
    let snapshot = state.snapshot();
    Json(HealthResponse { status: "ok".into(), datasets: snapshot.index.len() })
}

pub async fn search(State(state): State<AppState>, RawQuery(raw): RawQuery) -> Reply<SearchResponse> {
    let query = parse_search_params(&query_pairs(raw))?;
    let snapshot = state.snapshot();
    let result = snapshot
        .index
        .search(&query)
        .map_err(|e| ApiError::bad_request("invalid_query", e))?;
    Ok(Json(SearchResponse::from(&result)))
}

pub async fn facets(State(state): State<AppState>) -> Json<FacetsResponse> {
    let snapshot = state.snapshot();
    Json(FacetsResponse::new(snapshot.index.len(), &snapshot.index.facet_counts()))
}

pub async fn dataset(State(state): State<AppState>, Path(iri): Path<String>) -> Reply<DatasetResponse> {
    let iri = dataset_iri(&iri)?;
    let snapshot = state.snapshot();
    let doc = snapshot.index.get(&iri).ok_or_else(|| ApiError::not_found(format!("no dataset `{iri}`")))?;
    Ok(Json(DatasetResponse::from(doc)))
}

pub async fn quality(State(state): State<AppState>, Path(iri): Path<String>) -> Reply<QualityResponse> {
    let iri = dataset_iri(&iri)?;
    let snapshot = state.snapshot();
    let table = &snapshot.quality;
    if !table.contains(&iri) && snapshot.index.get(&iri).is_none() {
        return Err(ApiError::not_found(format!("no dataset `{iri}`")).into());
    }
    let scores = table.scores.get(&iri);
    let skipped = table.not_computed.get(&iri);
    let metrics = registry()
        .iter()
        .map(|d| MetricScoreDto {
            id: d.id,
            key: d.key.to_owned(),
            dimension: d.key.split('.').next().unwrap_or(d.key).to_owned(),
            score: scores.and_then(|s| s.get(d.key)).copied(),
            not_computed: skipped.and_then(|s| s.get(d.key)).cloned(),
        })
        .collect();
    let aggregate = snapshot.index.get(&iri).and_then(|d| d.quality);
    Ok(Json(QualityResponse { iri: iri.to_string(), aggregate, metrics }))
}

pub async fn license_check(
    State(state): State<AppState>,
    body: Result<Json<LicenseCheckRequest>, JsonRejection>,
) -> Reply<LicenseCheckResponse> {
    let Json(body) = body.map_err(|e| ApiError::bad_request("invalid_body", e.body_text()))?;
    if body.licenses.is_empty() {
        return Err(ApiError::bad_request("empty_license_list", "`licenses` must name at least one license").into());
    }
    let iris: Vec<Iri> = body
        .licenses
        .iter()
        .map(|s| Iri::new(s.trim()).map_err(|e| ApiError::bad_request("invalid_license_iri", e)))
        .collect::<Result<_, _>>()?;
    let snapshot = state.snapshot();
    let specs: Vec<_> = iris.iter().map(|i| snapshot.licenses.resolve(i)).collect();
    let verdict = check_compatibility(&specs).map_err(|e| ApiError::bad_request("invalid_license_list", e))?;
    let candidates = relicensing_candidates(&specs, snapshot.licenses.licenses())
        .into_iter()
        .map(|l| CandidateDto { id: l.id.to_string(), name: l.name })
        .collect();
    Ok(Json(LicenseCheckResponse { compatible: verdict.compatible, conflicts: verdict.conflicts, candidates }))
}

pub async fn not_found() -> Failure {
    Failure(ApiError::not_found("no such route"))
}
