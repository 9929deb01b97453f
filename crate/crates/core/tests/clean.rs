use metacat_core::clean::{clean, CleanConfig};
use metacat_core::model::to_graph;
use metacat_core::rdf::{parse_turtle, split_dataset_graphs, Iri, Triple};
use metacat_core::testkit;
use proptest::prelude::*;

fn config(langs: &[&str], catalog: bool) -> CleanConfig {
    CleanConfig {
        allowed_languages: langs.iter().map(|s| s.to_string()).collect(),
        catalog_id: catalog.then(|| Iri::new("http://ex/catalog/main").unwrap()),
        ..CleanConfig::default()
    }
}

fn untagged_literals(g: &metacat_core::rdf::Graph) -> Vec<Triple> {
    g.iter()
        .filter(|t| t.object.as_literal().is_some_and(|l| l.language().is_none() && !l.lexical().trim().is_empty()))
        .filter(|t| !matches!(t.predicate.as_str(), "http://purl.org/dc/terms/format" | "http://www.w3.org/ns/dcat#mediaType"))
        .cloned()
        .collect()
}

#[test]
fn fixture_slices_are_idempotent() {
    let g = parse_turtle(include_str!("fixtures/rich.ttl")).unwrap();
    for (_, slice) in split_dataset_graphs(&g) {
        for cfg in [config(&[], false), config(&["de"], true)] {
            let (once, _) = clean(&slice, &cfg);
            let (twice, _) = clean(&once, &cfg);
            assert_eq!(once, twice);
            assert!(once.len() <= slice.len() + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn clean_properties_on_random_records(seed in any::<u64>(), catalog in any::<bool>(), langs in 0usize..3) {
        let mut rng = testkit::rng(seed);
        let record = testkit::random_record(&mut rng, 1);
        let slice = to_graph(&record);
        let cfg = config(&[&[][..], &["de"][..], &["de", "en"][..]][langs], catalog);
        let (once, _) = clean(&slice, &cfg);
        let (twice, report) = clean(&once, &cfg);
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(report.empty_removed + report.language_removed + report.pruned_removed, 0);
        prop_assert!(once.len() <= slice.len() + 1);
        for t in untagged_literals(&slice) {
            prop_assert!(once.contains(&t), "untagged literal dropped: {}", t);
        }
    }
}
