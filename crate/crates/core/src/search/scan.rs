//! Index-free query evaluation: every query walks every document. Used as
//! the baseline for benchmarks.

use std::collections::{BTreeMap, HashMap};

use super::{
    expand_synonyms, haversine_km, paginate, tokenize, Bm25Params, DocEntry, FacetCounts, FacetField, Field, Hit,
    SearchError, SearchQuery, SearchResult, SortOrder, SynonymTable,
};

struct ScanDoc {
    entry: DocEntry,
    tf: [HashMap<String, u32>; 3],
    len: [u32; 3],
    facet_values: [Vec<String>; 4],
}

pub struct ScanEngine {
    params: Bm25Params,
    synonyms: SynonymTable,
    docs: Vec<ScanDoc>,
    avg_len: [f64; 3],
}

impl ScanEngine {
    pub fn new(entries: Vec<DocEntry>, params: Bm25Params, synonyms: SynonymTable) -> Result<Self, SearchError> {
        let mut entries = entries;
        entries.sort_by(|a, b| a.dataset.cmp(&b.dataset));
        if let Some(w) = entries.windows(2).find(|w| w[0].dataset == w[1].dataset) {
            return Err(SearchError::DuplicateDataset(w[0].dataset.clone()));
        }
        let docs: Vec<ScanDoc> = entries
            .into_iter()
            .map(|entry| {
                let mut len = [0; 3];
                let tf = Field::ALL.map(|f| {
                    let terms = tokenize(&entry.field_text(f));
                    len[f.index()] = terms.len() as u32;
                    let mut m = HashMap::new();
                    for t in terms {
                        *m.entry(t).or_insert(0) += 1;
                    }
                    m
                });
                let facet_values = FacetField::ALL.map(|f| entry.facet_values(f));
                ScanDoc { entry, tf, len, facet_values }
            })
            .collect();
        let mut avg_len = [0.0; 3];
        if !docs.is_empty() {
            for (i, avg) in avg_len.iter_mut().enumerate() {
                *avg = docs.iter().map(|d| d.len[i] as u64).sum::<u64>() as f64 / docs.len() as f64;
            }
        }
        Ok(Self { params, synonyms, docs, avg_len })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn search(&self, query: &SearchQuery) -> Result<SearchResult<'_>, SearchError> {
        query.validate()?;
        let terms = tokenize(&query.text);
        let empty = SynonymTable::new();
        let weighted = expand_synonyms(&terms, if query.synonyms { &self.synonyms } else { &empty });
        let n = self.docs.len();

        let idf: Vec<[f64; 3]> = weighted
            .iter()
            .map(|wt| {
                Field::ALL.map(|f| {
                    let df = self.docs.iter().filter(|d| d.tf[f.index()].contains_key(&wt.term)).count();
                    self.params.idf(n, df)
                })
            })
            .collect();

        let origin = match query.sort {
            SortOrder::Distance(o) => Some(o),
            SortOrder::Relevance => None,
        };
        let mut hits = Vec::new();
        let mut facets: FacetCounts = FacetField::ALL.iter().map(|&f| (f, BTreeMap::new())).collect();
        for d in &self.docs {
            let passes = query.filters.iter().all(|(f, filter)| filter.matches(&d.facet_values[f.index()]))
                && query.bbox.is_none_or(|b| d.entry.point.is_some_and(|p| b.contains(p)));
            if !passes {
                continue;
            }
            let mut score = 0.0;
            let mut any = false;
            for (wt, idf) in weighted.iter().zip(&idf) {
                for f in Field::ALL {
                    let i = f.index();
                    if let Some(&tf) = d.tf[i].get(&wt.term) {
                        any = true;
                        score += wt.weight * self.params.term_score(f, idf[i], tf, d.len[i], self.avg_len[i]);
                    }
                }
            }
            if !weighted.is_empty() && !any {
                continue;
            }
            for f in FacetField::ALL {
                let counts = facets.get_mut(&f).expect("all fields present");
                for v in &d.facet_values[f.index()] {
                    *counts.entry(v.clone()).or_insert(0) += 1;
                }
            }
            let distance_km = origin.and_then(|o| d.entry.point.map(|p| haversine_km(o, p)));
            hits.push(Hit { doc: &d.entry, score, distance_km });
        }
        let total = hits.len();
        Ok(SearchResult { total, page: query.page, size: query.size, hits: paginate(hits, query), facets })
    }
}
