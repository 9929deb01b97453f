use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::TestRng;
use crate::rdf::{BlankNode, Graph, Iri, Literal, Pattern, Subject, Term, Triple};
use crate::vocab::{dcat, dct, rdf};

fn iri(s: &str) -> Iri {
    Iri::new(s).expect("generated IRI")
}

/// Graph over a tiny vocabulary so that patterns frequently hit.
pub fn random_small_graph(rng: &mut TestRng, max_triples: usize) -> Graph {
    let n = rng.gen_range(0..=max_triples);
    (0..n)
        .map(|_| {
            let subject: Subject = if rng.gen_bool(0.8) {
                iri(&format!("http://ex/s{}", rng.gen_range(0..4))).into()
            } else {
                BlankNode::new(format!("b{}", rng.gen_range(0..3))).unwrap().into()
            };
            let predicate = iri(&format!("http://ex/p{}", rng.gen_range(0..3)));
            let object: Term = match rng.gen_range(0..3) {
                0 => iri(&format!("http://ex/s{}", rng.gen_range(0..4))).into(),
                1 => Literal::plain(format!("v{}", rng.gen_range(0..3))).into(),
                _ => Literal::lang(format!("v{}", rng.gen_range(0..3)), "de").unwrap().into(),
            };
            Triple::new(subject, predicate, object)
        })
        .collect()
}

/// A few datasets, an optional catalog and a pool of shared IRI and blank
/// nodes wired together at random, including cycles and dataset-to-dataset
/// references.
pub fn random_catalog_graph(rng: &mut TestRng) -> Graph {
    let mut g = Graph::new();
    let n_datasets = rng.gen_range(1..=5);
    let datasets: Vec<Subject> = (0..n_datasets)
        .map(|i| iri(&format!("http://ex/dataset/{i}")).into())
        .collect();
    for d in &datasets {
        g.insert(Triple::new(d.clone(), rdf::type_(), dcat::dataset()));
    }
    let mut nodes: Vec<Subject> = datasets.clone();
    if rng.gen_bool(0.5) {
        let cat: Subject = iri("http://ex/catalog").into();
        g.insert(Triple::new(cat.clone(), rdf::type_(), dcat::catalog()));
        for d in &datasets {
            g.insert(Triple::new(cat.clone(), dcat::dataset_link(), Term::from(d.clone())));
        }
        nodes.push(cat);
    }
    for i in 0..rng.gen_range(0..6) {
        nodes.push(iri(&format!("http://ex/node/{i}")).into());
    }
    for i in 0..rng.gen_range(0..4) {
        nodes.push(BlankNode::new(format!("b{i}")).unwrap().into());
    }
    let predicates = [dct::publisher(), dct::relation(), dcat::distribution(), dct::license(), dct::title()];
    for _ in 0..rng.gen_range(0..30) {
        let s = nodes.choose(rng).unwrap().clone();
        let p = predicates.choose(rng).unwrap().clone();
        let o: Term = if rng.gen_bool(0.3) {
            Literal::plain(format!("text {}", rng.gen_range(0..5))).into()
        } else {
            nodes.choose(rng).unwrap().clone().into()
        };
        g.insert(Triple::new(s, p, o));
    }
    g
}

/// Linear-scan reference for [`crate::rdf::TripleIndex::query`].
pub fn scan(graph: &Graph, pattern: Pattern<'_>) -> Vec<Triple> {
    graph.iter().filter(|t| pattern.matches(t)).cloned().collect()
}

/// Fixpoint reference for dataset slicing: nodes are reachable from `root`
/// through subjects that are the root or not typed as dataset or catalog.
pub fn reachable_from(graph: &Graph, root: &Iri) -> BTreeSet<Triple> {
    let stop: BTreeSet<Subject> = graph
        .iter()
        .filter(|t| {
            t.predicate == rdf::type_()
                && (t.object == Term::Iri(dcat::dataset()) || t.object == Term::Iri(dcat::catalog()))
        })
        .map(|t| t.subject.clone())
        .collect();
    let root = Subject::Iri(root.clone());
    let expands = |s: &Subject| *s == root || !stop.contains(s);
    let mut reached: BTreeSet<Subject> = BTreeSet::from([root.clone()]);
    loop {
        let before = reached.len();
        let next: Vec<Subject> = graph
            .iter()
            .filter(|t| reached.contains(&t.subject) && expands(&t.subject))
            .filter_map(|t| t.object.as_subject())
            .collect();
        reached.extend(next);
        if reached.len() == before {
            break;
        }
    }
    graph
        .iter()
        .filter(|t| reached.contains(&t.subject) && expands(&t.subject))
        .cloned()
        .collect()
}
