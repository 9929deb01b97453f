use std::collections::{BTreeMap, BTreeSet};

use metacat_core::rdf::{parse_ntriples, Iri};
use metacat_core::search::scan::ScanEngine;
use metacat_core::search::{
    extract_synonyms, tokenize, BBox, Bm25Params, Combinator, DocEntry, FacetField, FacetFilter, GeoPoint, InvertedIndex,
    SearchError, SearchQuery, SearchResult, SortOrder, SynonymTable, TextFields,
};
use metacat_core::testkit::{self, OracleResult};
use proptest::prelude::*;

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn doc(id: &str, title: &str) -> DocEntry {
    let mut d = DocEntry::new(iri(&format!("http://ex/{id}")));
    d.texts.insert("de".into(), TextFields { title: title.into(), ..TextFields::default() });
    d
}

fn point(lat: f64, lon: f64) -> GeoPoint {
    GeoPoint::new(lat, lon).unwrap()
}

fn iris(result: &SearchResult<'_>) -> Vec<String> {
    result.hits.iter().map(|h| h.doc.dataset.to_string()).collect()
}

fn index_with(docs: Vec<DocEntry>, synonyms: SynonymTable) -> InvertedIndex {
    InvertedIndex::build_with(docs, Bm25Params::default(), synonyms).unwrap()
}

#[test]
fn doc_ids_follow_iri_order_and_duplicates_fail() {
    let index = InvertedIndex::build(vec![doc("c", "x"), doc("a", "x"), doc("b", "y")]).unwrap();
    for (i, name) in ["a", "b", "c"].iter().enumerate() {
        assert_eq!(index.doc_id(&iri(&format!("http://ex/{name}"))), Some(i as u32));
    }
    assert!(InvertedIndex::build(vec![]).unwrap().is_empty());
    let err = InvertedIndex::build(vec![doc("a", "x"), doc("a", "y")]).unwrap_err();
    assert_eq!(err, SearchError::DuplicateDataset(iri("http://ex/a")));
    assert!(err.to_string().contains("http://ex/a"));
}

#[test]
fn postings_equal_a_term_scan() {
    for seed in 0..30 {
        let mut rng = testkit::rng(seed);
        let docs = testkit::random_doc_corpus(&mut rng, 40);
        let index = InvertedIndex::build(docs).unwrap();
        let mut expected: BTreeMap<String, Vec<(u32, usize, u32)>> = BTreeMap::new();
        for (id, d) in index.docs().iter().enumerate() {
            for (fi, field) in metacat_core::search::Field::ALL.iter().enumerate() {
                let mut counts: BTreeMap<String, u32> = BTreeMap::new();
                for t in tokenize(&d.field_text(*field)) {
                    *counts.entry(t).or_default() += 1;
                }
                for (t, c) in counts {
                    expected.entry(t).or_default().push((id as u32, fi, c));
                }
            }
        }
        assert_eq!(index.term_count(), expected.len());
        for (term, list) in &expected {
            let got: Vec<(u32, usize, u32)> = index.postings(term).iter().map(|p| (p.doc, p.field.index(), p.tf)).collect();
            assert_eq!(&got, list, "term {term}");
        }
    }
}

#[test]
fn stadtbahn_document_is_found_through_synonyms_only() {
    let docs = vec![
        doc("tram", "Stadtbahn"),
        doc("bus", "Buslinien im Stadtgebiet"),
        doc("air", "Luftqualität"),
    ];
    let table = SynonymTable::from_entries([("stadtbahn", vec!["straßenbahn", "s-bahn"])]);
    let index = index_with(docs, table);
    let mut q = SearchQuery::text("Straßenbahn");
    q.synonyms = true;
    let on = index.search(&q).unwrap();
    assert_eq!(iris(&on), ["http://ex/tram"]);
    q.synonyms = false;
    let off = index.search(&q).unwrap();
    assert_eq!(off.total, 0);
    assert!(off.hits.is_empty());
}

fn assert_matches_oracle(result: &SearchResult<'_>, oracle: &OracleResult, context: &str) {
    assert_eq!(result.total, oracle.total, "{context}");
    assert_eq!(result.facets, oracle.facets, "{context}");
    assert_eq!(result.hits.len(), oracle.hits.len(), "{context}");
    for (h, o) in result.hits.iter().zip(&oracle.hits) {
        assert_eq!(h.doc.dataset, o.dataset, "{context}");
        assert!((h.score - o.score).abs() <= 1e-9 * o.score.abs().max(1.0), "{context}: {} vs {}", h.score, o.score);
        match (h.distance_km, o.distance_km) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-6, "{context}"),
            (a, b) => assert_eq!(a, b, "{context}"),
        }
    }
}

#[test]
fn queries_match_the_brute_force_oracle() {
    let mut checked = 0;
    for seed in 0..100 {
        let mut rng = testkit::rng(seed);
        let docs = testkit::random_doc_corpus(&mut rng, 50);
        let synonyms = testkit::test_synonyms();
        let params = Bm25Params::default();
        let index = InvertedIndex::build_with(docs.clone(), params, synonyms.clone()).unwrap();
        let scan = ScanEngine::new(docs.clone(), params, synonyms.clone()).unwrap();
        for q in 0..10 {
            let query = testkit::random_query(&mut rng);
            let oracle = testkit::oracle_search(index.docs(), &query, &synonyms, &params);
            let got = index.search(&query).unwrap();
            assert_matches_oracle(&got, &oracle, &format!("seed {seed} query {q}: {query:?}"));
            assert_eq!(scan.search(&query).unwrap(), got, "scan seed {seed} query {q}");
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn blank_query_returns_everything_with_full_tallies() {
    let mut rng = testkit::rng(7);
    let docs = testkit::random_doc_corpus(&mut rng, 50);
    let index = InvertedIndex::build(docs.clone()).unwrap();
    let mut q = SearchQuery::default();
    q.size = 100;
    let all = index.search(&q).unwrap();
    assert_eq!(all.total, docs.len());
    assert_eq!(all.facets, index.facet_counts().into_iter().map(|(f, m)| (f, m.into_iter().filter(|(_, c)| *c > 0).collect())).collect());
    for field in FacetField::ALL {
        let mut tally: BTreeMap<String, usize> = BTreeMap::new();
        for d in &docs {
            for v in d.facet_values(field) {
                *tally.entry(v).or_default() += 1;
            }
        }
        assert_eq!(all.facets[&field], tally);
    }
}

#[test]
fn bbox_and_distance_examples() {
    let mut a = doc("a", "x");
    a.point = Some(point(51.0, 8.0));
    let mut corner = doc("corner", "x");
    corner.point = Some(point(50.0, 7.0));
    let none = doc("none", "x");
    let mut far = doc("far", "x");
    far.point = Some(point(53.5, 10.0));
    let index = InvertedIndex::build(vec![a, corner, none, far]).unwrap();

    let mut q = SearchQuery::default();
    q.bbox = Some(BBox::parse("50,7,52,9").unwrap());
    assert_eq!(iris(&index.search(&q).unwrap()), ["http://ex/a", "http://ex/corner"]);

    let mut q = SearchQuery::default();
    q.sort = SortOrder::Distance(point(53.5, 10.0));
    let r = index.search(&q).unwrap();
    assert_eq!(iris(&r), ["http://ex/far", "http://ex/a", "http://ex/corner", "http://ex/none"]);
    assert_eq!(r.hits[0].distance_km, Some(0.0));
    assert_eq!(r.hits[3].distance_km, None);

    let pointless = InvertedIndex::build(vec![doc("z", "x"), doc("m", "x"), doc("b", "x")]).unwrap();
    assert_eq!(iris(&pointless.search(&q).unwrap()), ["http://ex/b", "http://ex/m", "http://ex/z"]);
}

#[test]
fn invalid_queries_are_rejected() {
    let index = InvertedIndex::build(vec![doc("a", "x")]).unwrap();
    let mut q = SearchQuery::default();
    q.page = 0;
    assert!(matches!(index.search(&q), Err(SearchError::Paging(_))));
    q.page = 1;
    q.size = 101;
    assert!(matches!(index.search(&q), Err(SearchError::Paging(_))));
    q.size = 100;
    q.bbox = Some(BBox { sw: point(1.0, 2.0), ne: point(0.0, 0.0) });
    assert!(matches!(index.search(&q), Err(SearchError::BBox(_))));
    assert!(BBox::parse("1,2,0,0").is_err());
}

#[test]
fn snapshot_round_trip_is_exact() {
    let mut rng = testkit::rng(3);
    let docs = testkit::random_doc_corpus(&mut rng, 50);
    let index = InvertedIndex::build_with(docs, Bm25Params::default(), testkit::test_synonyms()).unwrap();
    let bytes = index.to_bytes();
    let loaded = InvertedIndex::from_bytes(&bytes).unwrap();
    assert_eq!(loaded.to_bytes(), bytes);
    for _ in 0..50 {
        let q = testkit::random_query(&mut rng);
        assert_eq!(loaded.search(&q).unwrap(), index.search(&q).unwrap());
    }
    assert!(matches!(InvertedIndex::from_bytes(b"{"), Err(SearchError::Format(_))));
}

#[test]
fn synonyms_are_extracted_in_four_steps() {
    let lexicon = parse_ntriples(include_str!("fixtures/lexicon.nt")).unwrap();
    let everything: BTreeSet<String> = ["stadtbahn", "luft", "tramway", "bahnhof", "schnell"].map(String::from).into();
    let table = extract_synonyms(&lexicon, &everything);
    assert_eq!(table.len(), 2);
    assert_eq!(table.entries()["stadtbahn"], ["s-bahn", "straßenbahn"].map(String::from).into());
    assert_eq!(table.entries()["luft"], ["atmosphäre"].map(String::from).into());

    let corpus: BTreeSet<String> = tokenize("Fahrplan der Stadtbahn").into_iter().collect();
    let restricted = extract_synonyms(&lexicon, &corpus);
    assert_eq!(restricted.len(), 1);
    assert!(restricted.entries().contains_key("stadtbahn"));

    assert!(extract_synonyms(&Default::default(), &everything).is_empty());
}

fn facet_result(index: &InvertedIndex, field: FacetField, mode: Combinator, values: &BTreeSet<String>) -> BTreeSet<String> {
    let mut q = SearchQuery::default();
    q.size = 100;
    q.filters.insert(field, FacetFilter { values: values.clone(), mode });
    index.search(&q).unwrap().hits.iter().map(|h| h.doc.dataset.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn facet_or_grows_and_and_shrinks(seed in any::<u64>(), field in 0usize..4, extra in 0usize..4) {
        let mut rng = testkit::rng(seed);
        let index = InvertedIndex::build(testkit::random_doc_corpus(&mut rng, 50)).unwrap();
        let field = FacetField::ALL[field];
        let values: Vec<String> = index.facet_counts()[&field].keys().cloned().collect();
        prop_assume!(values.len() >= 2);
        let base: BTreeSet<String> = values.iter().take(1).cloned().collect();
        let mut more = base.clone();
        more.insert(values[1 + extra % (values.len() - 1)].clone());
        let (or_small, or_big) = (facet_result(&index, field, Combinator::Or, &base), facet_result(&index, field, Combinator::Or, &more));
        prop_assert!(or_small.is_subset(&or_big));
        let (and_small, and_big) = (facet_result(&index, field, Combinator::And, &base), facet_result(&index, field, Combinator::And, &more));
        prop_assert!(and_big.is_subset(&and_small));
    }

    #[test]
    fn synonyms_only_add_results(seed in any::<u64>()) {
        let mut rng = testkit::rng(seed);
        let index = index_with(testkit::random_doc_corpus(&mut rng, 50), testkit::test_synonyms());
        let mut q = testkit::random_query(&mut rng);
        q.page = 1;
        q.size = 100;
        q.synonyms = false;
        let off: BTreeSet<String> = iris(&index.search(&q).unwrap()).into_iter().collect();
        q.synonyms = true;
        let on: BTreeSet<String> = iris(&index.search(&q).unwrap()).into_iter().collect();
        prop_assert!(off.is_subset(&on));
    }
}
