use metacat_client::{Client, ClientError};
use metacat_core::rdf::Iri;
use metacat_core::search::{Combinator, FacetField, InvertedIndex, SearchQuery, SortOrder, GeoPoint};
use metacat_core::testkit;
use metacat_service::{router, AppState, QualityTable, Snapshot};

async fn start() -> (Client, InvertedIndex, tokio::sync::oneshot::Sender<()>) {
    let mut rng = testkit::rng(11);
    let docs = testkit::random_doc_corpus(&mut rng, 50);
    let local = InvertedIndex::build_with(docs.clone(), Default::default(), testkit::test_synonyms()).unwrap();
    let served = InvertedIndex::build_with(docs, Default::default(), testkit::test_synonyms()).unwrap();
    let app = router(AppState::new(Snapshot::new(served, QualityTable::default())), None).unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel();
    tokio::spawn(metacat_service::serve(listener, app, async {
        let _ = rx.await;
    }));
    (Client::new(&format!("http://{addr}")).unwrap(), local, tx)
}

#[tokio::test]
async fn client_results_equal_local_search() {
    let (client, local, _stop) = start().await;
    assert_eq!(client.health().await.unwrap().datasets, local.len());
    let mut rng = testkit::rng(5);
    let mut queries: Vec<SearchQuery> = (0..100).map(|_| testkit::random_query(&mut rng)).collect();
    queries.push(
        SearchQuery::text("Köln S-Bahn")
            .with_filter(FacetField::Publisher, Combinator::And, &["Stadt Köln"])
            .with_filter(FacetField::Category, Combinator::Or, &[]),
    );
    let mut q = SearchQuery::default();
    q.sort = SortOrder::Distance(GeoPoint::new(51.0, 7.0).unwrap());
    queries.push(q);
    let handles: Vec<_> = queries
        .into_iter()
        .map(|q| {
            let client = client.clone();
            tokio::spawn(async move { (client.search(&q).await.unwrap(), q) })
        })
        .collect();
    for h in handles {
        let (remote, q) = h.await.unwrap();
        let expected = metacat_core::api::SearchResponse::from(&local.search(&q).unwrap());
        assert_eq!(remote, expected, "{q:?}");
    }
}

#[tokio::test]
async fn client_covers_every_route() {
    let (client, local, _stop) = start().await;
    let first = &local.docs()[0];
    assert_eq!(client.dataset(&first.dataset).await.unwrap().iri, first.dataset.to_string());
    assert_eq!(client.quality(&first.dataset).await.unwrap().metrics.len(), 48);
    assert_eq!(client.facets().await.unwrap().total, local.len());

    let missing = Iri::new("http://ex/none").unwrap();
    match client.dataset(&missing).await {
        Err(ClientError::Api(e)) => assert_eq!((e.status, e.code.as_str()), (404, "not_found")),
        other => panic!("{other:?}"),
    }

    let cc0 = Iri::new("http://creativecommons.org/publicdomain/zero/1.0/").unwrap();
    let by = Iri::new("https://creativecommons.org/licenses/by/4.0/").unwrap();
    let verdict = client.check_licenses(&[cc0, by]).await.unwrap();
    assert!(verdict.compatible && !verdict.candidates.is_empty());
    match client.check_licenses(&[]).await {
        Err(ClientError::Api(e)) => assert_eq!(e.status, 400),
        other => panic!("{other:?}"),
    }
    assert!(matches!(Client::new("not a url"), Err(ClientError::BaseUrl(_))));
}
