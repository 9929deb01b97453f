use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use super::graph::Graph;
use super::term::{Iri, Subject, Term, Triple};

/// A triple pattern; `None` positions are unbound.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pattern<'a> {
    pub subject: Option<&'a Subject>,
    pub predicate: Option<&'a Iri>,
    pub object: Option<&'a Term>,
}

impl<'a> Pattern<'a> {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn subject(subject: &'a Subject) -> Self {
        Self {
            subject: Some(subject),
            ..Self::default()
        }
    }

    pub fn matches(&self, triple: &Triple) -> bool {
        self.subject.is_none_or(|s| &triple.subject == s)
            && self.predicate.is_none_or(|p| &triple.predicate == p)
            && self.object.is_none_or(|o| &triple.object == o)
    }
}

/// Three lookup maps keyed on the serialized subject, predicate and object.
///
/// Immutable after construction. The query counter is atomic so concurrent
/// readers can share one index.
#[derive(Debug)]
pub struct TripleIndex {
    triples: Vec<Triple>,
    by_subject: HashMap<String, Vec<u32>>,
    by_predicate: HashMap<String, Vec<u32>>,
    by_object: HashMap<String, Vec<u32>>,
    queries: AtomicU64,
}

impl TripleIndex {
    pub fn new(graph: &Graph) -> Self {
        let triples: Vec<Triple> = graph.iter().cloned().collect();
        let mut by_subject: HashMap<String, Vec<u32>> = HashMap::new();
        let mut by_predicate: HashMap<String, Vec<u32>> = HashMap::new();
        let mut by_object: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, t) in triples.iter().enumerate() {
            let id = id as u32;
            by_subject.entry(t.subject.to_string()).or_default().push(id);
            by_predicate.entry(format!("<{}>", t.predicate)).or_default().push(id);
            by_object.entry(t.object.to_string()).or_default().push(id);
        }
        Self {
            triples,
            by_subject,
            by_predicate,
            by_object,
            queries: AtomicU64::new(0),
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// All triples matching the pattern, in graph order.
    pub fn query(&self, pattern: Pattern<'_>) -> Vec<&Triple> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let mut lists: Vec<&[u32]> = Vec::with_capacity(3);
        if let Some(s) = pattern.subject {
            lists.push(self.by_subject.get(&s.to_string()).map_or(&[], Vec::as_slice));
        }
        if let Some(p) = pattern.predicate {
            lists.push(self.by_predicate.get(&format!("<{p}>")).map_or(&[], Vec::as_slice));
        }
        if let Some(o) = pattern.object {
            lists.push(self.by_object.get(&o.to_string()).map_or(&[], Vec::as_slice));
        }
        match lists.iter().min_by_key(|l| l.len()) {
            None => self.triples.iter().collect(),
            Some(shortest) => shortest
                .iter()
                .map(|&id| &self.triples[id as usize])
                .filter(|t| pattern.matches(t))
                .collect(),
        }
    }

    /// Number of pattern queries issued so far.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Checks that each of the three maps covers exactly the stored triples.
    pub fn is_consistent(&self) -> bool {
        let n = self.triples.len();
        [&self.by_subject, &self.by_predicate, &self.by_object]
            .iter()
            .all(|map| {
                let mut seen = vec![false; n];
                for ids in map.values() {
                    for &id in ids {
                        match seen.get_mut(id as usize) {
                            Some(slot) if !*slot => *slot = true,
                            _ => return false,
                        }
                    }
                }
                seen.into_iter().all(|s| s)
            })
    }
}
