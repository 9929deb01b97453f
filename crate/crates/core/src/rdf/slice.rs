use std::collections::{BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;

use super::graph::Graph;
use super::index::{Pattern, TripleIndex};
use super::term::{Iri, Subject, Term};
use crate::vocab::{dcat, rdf};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SliceError {
    #[error("dataset <{0}> does not occur as a subject")]
    NotFound(Iri),
}

/// Breadth-first expansion from `dataset`, collecting the outgoing triples of
/// every reached node. Other datasets and catalogs are reached but not
/// expanded, so shared agents and licenses appear in each slice while
/// neighbouring datasets stay out.
///
/// Issues exactly one subject query per visited node.
pub fn slice_dataset(index: &TripleIndex, dataset: &Iri) -> Result<Graph, SliceError> {
    let root = Subject::Iri(dataset.clone());
    let type_ = rdf::type_();
    let stop_types = [Term::Iri(dcat::dataset()), Term::Iri(dcat::catalog())];

    let mut slice = Graph::new();
    let mut visited: HashSet<Subject> = HashSet::new();
    let mut queue: VecDeque<Subject> = VecDeque::new();
    visited.insert(root.clone());
    queue.push_back(root.clone());

    while let Some(node) = queue.pop_front() {
        let outgoing = index.query(Pattern::subject(&node));
        if node == root {
            if outgoing.is_empty() {
                return Err(SliceError::NotFound(dataset.clone()));
            }
        } else if outgoing
            .iter()
            .any(|t| t.predicate == type_ && stop_types.contains(&t.object))
        {
            continue;
        }
        for triple in outgoing {
            if let Some(next) = triple.object.as_subject() {
                if visited.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
            slice.insert(triple.clone());
        }
    }
    Ok(slice)
}

/// IRIs of all subjects typed `dcat:Dataset`, ascending.
pub fn dataset_iris(index: &TripleIndex) -> Vec<Iri> {
    let type_ = rdf::type_();
    let class = Term::Iri(dcat::dataset());
    let found: BTreeSet<Iri> = index
        .query(Pattern {
            predicate: Some(&type_),
            object: Some(&class),
            ..Pattern::default()
        })
        .into_iter()
        .filter_map(|t| t.subject.as_iri().cloned())
        .collect();
    found.into_iter().collect()
}

/// One slice per `dcat:Dataset` subject, ordered by dataset IRI.
pub fn split_dataset_graphs(graph: &Graph) -> Vec<(Iri, Graph)> {
    let index = TripleIndex::new(graph);
    split_indexed(&index)
}

pub fn split_indexed(index: &TripleIndex) -> Vec<(Iri, Graph)> {
    dataset_iris(index)
        .into_par_iter()
        .map(|iri| {
            // Every typed dataset is a subject of its own type triple.
            let slice = slice_dataset(index, &iri).expect("typed dataset is a subject");
            (iri, slice)
        })
        .collect()
}
