//! Async client for the metacat HTTP API. Responses decode into the shared
//! types from `metacat_core::api`.

use metacat_core::api::{
    search_params, ApiError, DatasetResponse, FacetsResponse, HealthResponse, LicenseCheckRequest,
    LicenseCheckResponse, QualityResponse, SearchResponse,
};
use metacat_core::rdf::Iri;
use metacat_core::search::SearchQuery;
use serde::de::DeserializeOwned;
use url::Url;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid base URL `{0}`")]
    BaseUrl(String),
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("server answered {0}")]
    Api(ApiError),
    #[error("server answered {status} without an error body")]
    Status { status: u16 },
}

#[derive(Debug, Clone)]
pub struct Client {
    base: Url,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8080/`.
    pub fn new(base: &str) -> Result<Self, ClientError> {
        let mut base = Url::parse(base).map_err(|_| ClientError::BaseUrl(base.to_owned()))?;
        if base.cannot_be_a_base() {
            return Err(ClientError::BaseUrl(base.to_string()));
        }
        if !base.path().ends_with('/') {
            let path = format!("{}/", base.path());
            base.set_path(&path);
        }
        Ok(Self { base, http: reqwest::Client::new() })
    }

    fn url(&self, segments: &[&str]) -> Url {
        let mut url = self.base.clone();
        url.path_segments_mut().expect("checked in new").pop_if_empty().extend(segments);
        url
    }

    async fn decode<T: DeserializeOwned>(response: reqwest::Response) -> Result<T, ClientError> {
        let status = response.status();
        if status.is_success() {
            return Ok(response.json().await?);
        }
        match response.json::<ApiError>().await {
            Ok(err) => Err(ClientError::Api(err)),
            Err(_) => Err(ClientError::Status { status: status.as_u16() }),
        }
    }

    async fn get<T: DeserializeOwned>(&self, url: Url) -> Result<T, ClientError> {
        Self::decode(self.http.get(url).send().await?).await
    }

    pub async fn health(&self) -> Result<HealthResponse, ClientError> {
        self.get(self.url(&["healthz"])).await
    }

    pub async fn search(&self, query: &SearchQuery) -> Result<SearchResponse, ClientError> {
        let mut url = self.url(&["api", "search"]);
        url.query_pairs_mut().extend_pairs(search_params(query));
        self.get(url).await
    }

    pub async fn facets(&self) -> Result<FacetsResponse, ClientError> {
        self.get(self.url(&["api", "facets"])).await
    }

    pub async fn dataset(&self, iri: &Iri) -> Result<DatasetResponse, ClientError> {
        self.get(self.url(&["api", "datasets", iri.as_str()])).await
    }

    pub async fn quality(&self, iri: &Iri) -> Result<QualityResponse, ClientError> {
        self.get(self.url(&["api", "quality", iri.as_str()])).await
    }

    pub async fn check_licenses(&self, licenses: &[Iri]) -> Result<LicenseCheckResponse, ClientError> {
        let body = LicenseCheckRequest { licenses: licenses.iter().map(|l| l.to_string()).collect() };
        let response = self.http.post(self.url(&["api", "licenses", "check"])).json(&body).send().await?;
        Self::decode(response).await
    }
}
