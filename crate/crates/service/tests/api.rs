use std::collections::BTreeMap;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use metacat_core::quality::{evaluate_all, to_dqv, NotComputedLog, QualityConfig};
use metacat_core::rdf::{write_ntriples, Graph, Iri};
use metacat_core::search::{DocEntry, FacetValues, GeoPoint, InvertedIndex, TextFields};
use metacat_service::{router, AppState, QualityTable, Snapshot};
use serde_json::Value;
use tower::ServiceExt;

const CC0: &str = "http://creativecommons.org/publicdomain/zero/1.0/";
const CC_BY: &str = "https://creativecommons.org/licenses/by/4.0/";
const CC_BY_SA: &str = "https://creativecommons.org/licenses/by-sa/4.0/";
const ODBL: &str = "http://opendatacommons.org/licenses/odbl/1.0/";

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn doc(id: &str, title: &str, publisher: &str, point: Option<(f64, f64)>) -> DocEntry {
    let mut d = DocEntry::new(iri(&format!("http://ex/dataset/{id}")));
    d.texts.insert("de".into(), TextFields { title: title.into(), description: format!("Beschreibung {title}"), keywords: vec![] });
    d.facets = FacetValues {
        category: vec![iri("http://ex/theme/TRAN")],
        publisher: Some(publisher.into()),
        catalog: Some(iri("http://ex/catalog")),
        license: Some(iri(CC_BY)),
    };
    d.point = point.map(|(lat, lon)| GeoPoint::new(lat, lon).unwrap());
    d.quality = Some(3.25);
    d
}

fn corpus() -> Vec<DocEntry> {
    vec![
        doc("a", "Stadtbahn Haltestellen", "Stadt Köln", Some((50.94, 6.96))),
        doc("b", "Busfahrplan", "Stadt Bonn", Some((50.73, 7.10))),
        doc("c", "Luftqualität", "Stadt Köln", None),
    ]
}

fn quality_table() -> QualityTable {
    let mut table = QualityTable::default();
    table.scores.insert(iri("http://ex/dataset/a"), BTreeMap::from([("expressiveness.extent".to_owned(), 4u8)]));
    table
        .add_not_computed_log("http://ex/dataset/a\taccess.retrievability\tskipped_long_running\n")
        .unwrap();
    table
}

fn app() -> Router {
    let index = InvertedIndex::build(corpus()).unwrap();
    router(AppState::new(Snapshot::new(index, quality_table())), Some("http://localhost:5173")).unwrap()
}

async fn call(app: &Router, request: Request<Body>) -> (StatusCode, Vec<u8>, axum::http::HeaderMap) {
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let headers = response.headers().clone();
    let body = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, body, headers)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (status, body, headers) = call(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    assert_eq!(headers[header::CONTENT_TYPE], "application/json", "{uri}");
    (status, serde_json::from_slice(&body).unwrap())
}

async fn post(app: &Router, uri: &str, body: &str) -> (StatusCode, Value) {
    let request = Request::post(uri).header(header::CONTENT_TYPE, "application/json").body(Body::from(body.to_owned())).unwrap();
    let (status, body, _) = call(app, request).await;
    (status, serde_json::from_slice(&body).unwrap())
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().expect("object").keys().map(String::as_str).collect()
}

fn is_opt(v: &Value, check: fn(&Value) -> bool) -> bool {
    v.is_null() || check(v)
}

fn assert_error(v: &Value, status: u16) {
    assert_eq!(keys(v), ["code", "message", "status"]);
    assert_eq!(v["status"], status);
    assert!(v["code"].is_string() && v["message"].is_string());
}

fn assert_search_shape(v: &Value) {
    assert_eq!(keys(v), ["facets", "page", "results", "size", "total"]);
    for k in ["total", "page", "size"] {
        assert!(v[k].is_u64(), "{k}");
    }
    for r in v["results"].as_array().unwrap() {
        assert_eq!(keys(r), ["catalog", "description", "iri", "license", "point", "publisher", "quality", "title"]);
        assert!(r["iri"].is_string());
        for k in ["title", "description", "publisher", "catalog", "license"] {
            assert!(is_opt(&r[k], Value::is_string), "{k}");
        }
        assert!(is_opt(&r["quality"], Value::is_f64));
        assert!(is_opt(&r["point"], |p| p["lat"].is_f64() && p["lon"].is_f64()));
    }
    for (field, counts) in v["facets"].as_object().unwrap() {
        assert!(["category", "publisher", "catalog", "license"].contains(&field.as_str()));
        assert!(counts.as_object().unwrap().values().all(Value::is_u64));
    }
}

#[tokio::test]
async fn blank_search_returns_every_dataset() {
    let app = app();
    let (status, v) = get(&app, "/api/search?q=&page=1&size=10").await;
    assert_eq!(status, StatusCode::OK);
    assert_search_shape(&v);
    assert_eq!(v["total"], 3);
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
    assert_eq!(v["facets"]["publisher"]["Stadt Köln"], 2);
}

#[tokio::test]
async fn search_parameters_are_applied() {
    let app = app();
    let (_, v) = get(&app, "/api/search?q=stadtbahn").await;
    assert_eq!(v["total"], 1);
    assert_eq!(v["results"][0]["iri"], "http://ex/dataset/a");
    assert_eq!(v["size"], 10);

    let (_, v) = get(&app, "/api/search?publisher=Stadt+K%C3%B6ln&publisher=Stadt+Bonn").await;
    assert_eq!(v["total"], 3);
    let (_, v) = get(&app, "/api/search?publisher=Stadt+K%C3%B6ln&publisher=Stadt+Bonn&facet_mode.publisher=and").await;
    assert_eq!(v["total"], 0);

    let (_, v) = get(&app, "/api/search?bbox=50.5,6.5,51,7").await;
    assert_eq!(v["total"], 1);

    let (_, v) = get(&app, "/api/search?sort=distance&lat=50.73&lon=7.10").await;
    let order: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["iri"].as_str().unwrap()).collect();
    assert_eq!(order, ["http://ex/dataset/b", "http://ex/dataset/a", "http://ex/dataset/c"]);

    let (_, v) = get(&app, "/api/search?size=1&page=2").await;
    assert_eq!((v["total"].as_u64(), v["results"].as_array().unwrap().len()), (Some(3), 1));
    assert_search_shape(&v);
}

#[tokio::test]
async fn malformed_search_requests_get_400() {
    let app = app();
    for uri in [
        "/api/search?bbox=1,2,0,0",
        "/api/search?bbox=abc",
        "/api/search?page=0",
        "/api/search?page=-1",
        "/api/search?size=101",
        "/api/search?size=ten",
        "/api/search?sort=distance",
        "/api/search?sort=distance&lat=100&lon=0",
    ] {
        let (status, v) = get(&app, uri).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}");
        assert_error(&v, 400);
    }
}

#[tokio::test]
async fn identical_requests_give_identical_bytes() {
    let app = app();
    let uri = "/api/search?q=stadtbahn+luftqualit%C3%A4t&sort=distance&lat=50&lon=7&synonyms=true";
    let first = call(&app, Request::get(uri).body(Body::empty()).unwrap()).await.1;
    for _ in 0..5 {
        assert_eq!(call(&app, Request::get(uri).body(Body::empty()).unwrap()).await.1, first);
    }
}

#[tokio::test]
async fn datasets_facets_and_health() {
    let app = app();
    let (status, v) = get(&app, "/api/datasets/unknown").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, 404);
    let (status, _) = get(&app, "/api/datasets/http%3A%2F%2Fex%2Fdataset%2Fzzz").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    for uri in ["/api/datasets/http%3A%2F%2Fex%2Fdataset%2Fa", "/api/datasets/http://ex/dataset/a"] {
        let (status, v) = get(&app, uri).await;
        assert_eq!(status, StatusCode::OK, "{uri}");
        assert_eq!(v["iri"], "http://ex/dataset/a");
        assert_eq!(v["title"], "Stadtbahn Haltestellen");
        assert_eq!(v["texts"]["de"]["title"], "Stadtbahn Haltestellen");
    }

    let (status, v) = get(&app, "/api/facets").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["total"], 3);
    assert_eq!(v["facets"]["license"][CC_BY], 3);

    let (status, v) = get(&app, "/healthz").await;
    assert_eq!((status, v["status"].as_str(), v["datasets"].as_u64()), (StatusCode::OK, Some("ok"), Some(3)));

    let (status, v) = get(&app, "/api/nothing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, 404);
}

#[tokio::test]
async fn quality_lists_every_metric() {
    let app = app();
    let (status, v) = get(&app, "/api/quality/http%3A%2F%2Fex%2Fdataset%2Fa").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(keys(&v), ["aggregate", "iri", "metrics"]);
    let metrics = v["metrics"].as_array().unwrap();
    assert_eq!(metrics.len(), 48);
    assert_eq!(metrics[0]["key"], "expressiveness.extent");
    assert_eq!(metrics[0]["dimension"], "expressiveness");
    assert_eq!(metrics[0]["score"], 4);
    let skipped = metrics.iter().find(|m| m["not_computed"] == "skipped_long_running").unwrap();
    assert!(skipped["score"].is_null());
    assert_eq!(v["aggregate"], 3.25);

    let (status, v) = get(&app, "/api/quality/http%3A%2F%2Fex%2Fmissing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, 404);
}

#[tokio::test]
async fn license_checks() {
    let app = app();
    let (status, v) = post(&app, "/api/licenses/check", &format!(r#"{{"licenses":["{CC0}","{CC_BY}"]}}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(keys(&v), ["candidates", "compatible", "conflicts"]);
    assert_eq!(v["compatible"], true);
    let candidates = v["candidates"].as_array().unwrap();
    assert!(!candidates.is_empty());
    assert!(candidates.iter().all(|c| keys(c) == ["id", "name"]));
    assert!(candidates.iter().any(|c| c["id"] == CC_BY));

    let (status, v) = post(&app, "/api/licenses/check", &format!(r#"{{"licenses":["{CC_BY_SA}","{ODBL}"]}}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["compatible"], false);
    assert_eq!(v["conflicts"][0]["kind"], "share_alike_clash");
    assert!(v["candidates"].as_array().unwrap().is_empty());

    let (status, v) = post(&app, "/api/licenses/check", r#"{"licenses":["http://ex/license/mine"]}"#).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["compatible"], false);
    assert_eq!(v["conflicts"][0]["kind"], "unknown_license");

    for body in [r#"{"licenses":[]}"#, r#"{"licenses":"x"}"#, "not json", r#"{"licenses":["not an iri"]}"#] {
        let (status, v) = post(&app, "/api/licenses/check", body).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_error(&v, 400);
    }
}

#[tokio::test]
async fn cors_header_follows_configuration() {
    let app = app();
    let request = Request::get("/healthz").header(header::ORIGIN, "http://localhost:5173").body(Body::empty()).unwrap();
    let (_, _, headers) = call(&app, request).await;
    assert_eq!(headers[header::ACCESS_CONTROL_ALLOW_ORIGIN], "http://localhost:5173");

    let plain = router(AppState::new(Snapshot::new(InvertedIndex::build(corpus()).unwrap(), QualityTable::default())), None).unwrap();
    let request = Request::get("/healthz").header(header::ORIGIN, "http://localhost:5173").body(Body::empty()).unwrap();
    let (_, _, headers) = call(&plain, request).await;
    assert!(!headers.contains_key(header::ACCESS_CONTROL_ALLOW_ORIGIN));
}

#[tokio::test]
async fn swapping_the_snapshot_keeps_pinned_readers() {
    let state = AppState::new(Snapshot::new(InvertedIndex::build(corpus()).unwrap(), QualityTable::default()));
    let app = router(state.clone(), None).unwrap();
    let pinned = state.snapshot();
    state.swap(Snapshot::new(InvertedIndex::build(corpus()[..1].to_vec()).unwrap(), QualityTable::default()));
    assert_eq!(pinned.index.len(), 3);
    let (_, v) = get(&app, "/api/search").await;
    assert_eq!(v["total"], 1);
}

#[tokio::test]
async fn snapshot_loads_from_an_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let index = InvertedIndex::build(corpus()).unwrap();
    std::fs::write(dir.path().join("index.bin"), index.to_bytes()).unwrap();

    let mut rng = metacat_core::testkit::rng(1);
    let mut record = metacat_core::testkit::random_record(&mut rng, 0);
    record.iri = iri("http://ex/dataset/a");
    let config = QualityConfig::at("2020-06-01T00:00:00Z".parse().unwrap());
    let log = NotComputedLog::new();
    let results = evaluate_all(&record, &Graph::new(), &config, &metacat_core::quality::ExternalStores::new(metacat_core::license::LicenseDb::bundled()), &log);
    let dqv = to_dqv(&record.iri, &results, true, &Graph::new());
    std::fs::write(dir.path().join("quality.nt"), write_ntriples(&dqv)).unwrap();
    std::fs::write(dir.path().join("not-computed.log"), log.lines().join("\n")).unwrap();

    let snapshot = Snapshot::load(dir.path(), None).unwrap();
    assert_eq!(snapshot.index.len(), 3);
    let scores = &snapshot.quality.scores[&record.iri];
    assert_eq!(scores.len(), results.iter().filter(|r| r.score().is_some()).count());
    assert_eq!(snapshot.quality.not_computed[&record.iri].len(), log.len());

    assert!(Snapshot::load(&dir.path().join("missing"), None).is_err());
}
