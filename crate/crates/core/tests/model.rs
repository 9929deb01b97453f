use metacat_core::model::{from_graph, to_graph, DatasetRecord, LangString, ModelError, Timestamp};
use metacat_core::rdf::{parse_turtle, slice_dataset, Graph, Iri, Literal, Triple, TripleIndex};
use metacat_core::testkit;
use metacat_core::vocab::{dcat, dct};
use proptest::prelude::*;

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

const RICH: &str = "https://data.example.org/dataset/haltestellen";

fn rich_record() -> DatasetRecord {
    let g = parse_turtle(include_str!("fixtures/rich.ttl")).unwrap();
    let index = TripleIndex::new(&g);
    let slice = slice_dataset(&index, &iri(RICH)).unwrap();
    from_graph(&slice, &iri(RICH)).unwrap()
}

#[test]
fn title_only_graph() {
    let d = iri("http://ex/d");
    let g: Graph = [Triple::new(d.clone(), dct::title(), Literal::plain("Titel"))].into_iter().collect();
    let r = from_graph(&g, &d).unwrap();
    assert_eq!(r.titles, vec![LangString::untagged("Titel")]);
    assert!(r.descriptions.is_empty() && r.distributions.is_empty() && r.publisher.is_none());
    assert!(r.extra.is_empty());
}

#[test]
fn wrong_iri_is_not_found() {
    let g = parse_turtle(include_str!("fixtures/rich.ttl")).unwrap();
    assert_eq!(
        from_graph(&g, &iri("http://ex/missing")),
        Err(ModelError::NotFound(iri("http://ex/missing")))
    );
}

#[test]
fn rich_fixture_fields() {
    let r = rich_record();
    assert_eq!(r.distributions.len(), 2);
    assert_eq!(r.titles.len(), 2);
    assert_eq!(r.keywords.len(), 5);
    let publisher = r.publisher.as_ref().unwrap();
    assert_eq!(publisher.name.as_deref(), Some("Stadt Paderborn"));
    assert_eq!(publisher.email.as_deref(), Some("info@paderborn.de"));
    assert_eq!(r.contact_point.as_ref().unwrap().email.as_deref(), Some("verkehr@paderborn.de"));
    assert_eq!(r.issued, Timestamp::parse("2018-04-01"));
    assert_eq!(r.distributions[0].media_type.as_deref(), Some("text/csv"));
    assert_eq!(r.distributions[0].byte_size, Some(48211));
    assert_eq!(r.version.as_deref(), Some("2.1"));
    assert!(r.temporal.unwrap().end.is_some());
    // conformsTo, seeAlso and the license title are not modeled.
    assert_eq!(r.extra.len(), 3);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
}

#[test]
fn rich_fixture_round_trips() {
    let r = rich_record();
    let mut again = from_graph(&to_graph(&r), &r.iri).unwrap();
    again.canonicalize();
    let mut expected = r.clone();
    expected.canonicalize();
    assert_eq!(again, expected);
}

#[test]
fn iri_only_record_writes_one_triple() {
    let r = DatasetRecord::new(iri("http://ex/d"));
    let g = to_graph(&r);
    assert_eq!(g.len(), 1);
    assert!(g.contains(&Triple::new(iri("http://ex/d"), metacat_core::vocab::rdf::type_(), dcat::dataset())));
}

#[test]
fn three_keywords_three_triples() {
    let mut r = DatasetRecord::new(iri("http://ex/d"));
    r.keywords = ["a", "b", "c"].iter().map(|k| LangString::untagged(*k)).collect();
    let g = to_graph(&r);
    assert_eq!(g.iter().filter(|t| t.predicate == dcat::keyword()).count(), 3);
}

#[test]
fn malformed_dates_become_warnings() {
    let g = parse_turtle(
        "@prefix dct: <http://purl.org/dc/terms/> .\n<http://ex/d> dct:issued \"sometime\" ; dct:modified \"2020-01-01\" .",
    )
    .unwrap();
    let r = from_graph(&g, &iri("http://ex/d")).unwrap();
    assert!(r.issued.is_none());
    assert!(r.modified.is_some());
    assert_eq!(r.warnings.len(), 1);
    assert_eq!(r.extra.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn record_round_trip(seed in any::<u64>()) {
        let mut rng = testkit::rng(seed);
        let record = testkit::random_record(&mut rng, 7);
        let mut again = from_graph(&to_graph(&record), &record.iri).unwrap();
        again.canonicalize();
        again.warnings.clear();
        let mut expected = record.clone();
        expected.warnings.clear();
        prop_assert_eq!(again, expected);
    }

    #[test]
    fn mapping_is_total(seed in any::<u64>()) {
        let mut rng = testkit::rng(seed);
        let g = testkit::random_catalog_graph(&mut rng);
        for (root, slice) in metacat_core::rdf::split_dataset_graphs(&g) {
            prop_assert!(from_graph(&slice, &root).is_ok());
        }
    }
}
