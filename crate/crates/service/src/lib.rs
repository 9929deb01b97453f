//! HTTP/JSON API over a built index snapshot: search, dataset lookup, facet
//! counts, quality scores and license compatibility checks.

mod handlers;
mod snapshot;

use std::sync::{Arc, RwLock};

use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::CorsLayer;

pub use snapshot::{QualityTable, Snapshot, SnapshotError};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("invalid CORS origin `{0}`")]
    CorsOrigin(String),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Holds the current snapshot. Each request clones the `Arc` once, so a
/// swap never changes the data under an in-flight request.
#[derive(Clone)]
pub struct AppState {
    current: Arc<RwLock<Arc<Snapshot>>>,
}

impl AppState {
    pub fn new(snapshot: Snapshot) -> Self {
        Self { current: Arc::new(RwLock::new(Arc::new(snapshot))) }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock").clone()
    }

    pub fn swap(&self, snapshot: Snapshot) {
        *self.current.write().expect("snapshot lock") = Arc::new(snapshot);
    }
}

pub fn router(state: AppState, cors_origin: Option<&str>) -> Result<Router, ServiceError> {
    let mut app = Router::new()
        .route("/healthz", get(handlers::health))
        .route("/api/search", get(handlers::search))
        .route("/api/facets", get(handlers::facets))
        .route("/api/datasets/{*iri}", get(handlers::dataset))
        .route("/api/quality/{*iri}", get(handlers::quality))
        .route("/api/licenses/check", post(handlers::license_check))
        .fallback(handlers::not_found)
        .with_state(state);
    if let Some(origin) = cors_origin.filter(|o| !o.trim().is_empty()) {
        let origin = HeaderValue::from_str(origin.trim()).map_err(|_| ServiceError::CorsOrigin(origin.to_owned()))?;
        app = app.layer(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        );
    }
    Ok(app)
}

/// Serves until the listener fails or `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await?;
    Ok(())
}
