//! DQV measurements: each score becomes a measurement node with
//! `rdf:type`, `dqv:isMeasurementOf`, `dqv:computedOn` and `dqv:value`.
//! The dataset is reached through `dqv:computedOn`; no reverse link is
//! written.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{MetricResult, Outcome};
use crate::rdf::{Graph, Iri, Literal, Subject, Term, Triple};
use crate::util::short_hash;
use crate::vocab::{dqv, rdf, xsd, MEASUREMENT_BASE, METRIC_BASE};

/// Stable node IRI for the `nth` result of `key` on `dataset`.
pub fn measurement_iri(dataset: &Iri, key: &str, nth: usize) -> Iri {
    let seed = if nth == 0 {
        format!("{dataset} {key}")
    } else {
        format!("{dataset} {key} {nth}")
    };
    Iri::new(format!("{MEASUREMENT_BASE}{}", short_hash(&seed))).expect("hex suffix")
}

/// Measurement subjects recorded for `dataset` in `graph`.
fn measurements_of(graph: &Graph, dataset: &Iri) -> BTreeSet<Subject> {
    let computed_on = dqv::computed_on();
    let target = Term::Iri(dataset.clone());
    graph.subjects(&computed_on, &target).cloned().collect()
}

/// `prior` plus one measurement per score. With `remove_existing`, earlier
/// measurements of the same dataset are dropped first.
pub fn to_dqv(dataset: &Iri, results: &[MetricResult], remove_existing: bool, prior: &Graph) -> Graph {
    let mut out = prior.clone();
    if remove_existing {
        let old = measurements_of(prior, dataset);
        let link = dqv::has_quality_measurement();
        out.retain(|t| {
            !old.contains(&t.subject)
                && !(t.predicate == link && t.object.as_subject().is_some_and(|o| old.contains(&o)))
        });
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for r in results {
        let Outcome::Score(score) = r.outcome else {
            continue;
        };
        let nth = seen.entry(r.metric.as_str()).or_default();
        let node = measurement_iri(dataset, &r.metric, *nth);
        *nth += 1;
        let metric = Iri::new(format!("{METRIC_BASE}{}", r.metric)).expect("metric keys are IRI-safe");
        out.insert(Triple::new(node.clone(), rdf::type_(), dqv::quality_measurement()));
        out.insert(Triple::new(node.clone(), dqv::is_measurement_of(), metric));
        out.insert(Triple::new(node.clone(), dqv::computed_on(), dataset.clone()));
        out.insert(Triple::new(node, dqv::value(), Literal::typed(score.to_string(), xsd::integer())));
    }
    out
}

/// `(metric key, value)` pairs recorded for `dataset`, sorted.
pub fn read_dqv(graph: &Graph, dataset: &Iri) -> Vec<(String, u8)> {
    read_dqv_all(graph).remove(dataset).unwrap_or_default()
}

/// All measurements grouped by dataset. Nodes lacking a metric from the
/// project namespace or an integer value are skipped.
pub fn read_dqv_all(graph: &Graph) -> BTreeMap<Iri, Vec<(String, u8)>> {
    let mut nodes: BTreeMap<&Subject, (Option<&Iri>, Option<String>, Option<u8>)> = BTreeMap::new();
    let (of, on, value) = (dqv::is_measurement_of(), dqv::computed_on(), dqv::value());
    for t in graph.iter() {
        let entry = nodes.entry(&t.subject).or_default();
        if t.predicate == on {
            entry.0 = t.object.as_iri();
        } else if t.predicate == of {
            entry.1 = t.object.as_iri().and_then(|i| i.as_str().strip_prefix(METRIC_BASE)).map(str::to_owned);
        } else if t.predicate == value {
            entry.2 = t.object.as_literal().and_then(|l| l.lexical().trim().parse().ok());
        }
    }
    let mut out: BTreeMap<Iri, Vec<(String, u8)>> = BTreeMap::new();
    for (dataset, key, value) in nodes.into_values() {
        if let (Some(d), Some(k), Some(v)) = (dataset, key, value) {
            out.entry(d.clone()).or_default().push((k, v));
        }
    }
    for list in out.values_mut() {
        list.sort();
    }
    out
}
