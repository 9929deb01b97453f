use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{
    expand_synonyms, haversine_km, paginate, tokenize, BBox, Bm25Params, Combinator, DocEntry, FacetCounts,
    FacetField, Field, Hit, SearchError, SearchQuery, SearchResult, SortOrder, SynonymTable, WeightedTerm,
};
use crate::rdf::Iri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: u32,
    pub field: Field,
    pub tf: u32,
}

struct FacetTable {
    values: Vec<String>,
    docs: Vec<FixedBitSet>,
    ids: HashMap<String, u32>,
}

/// Immutable after [`InvertedIndex::build`]. Doc ids follow ascending IRI.
pub struct InvertedIndex {
    params: Bm25Params,
    synonyms: SynonymTable,
    docs: Vec<DocEntry>,
    by_iri: HashMap<Iri, u32>,
    term_ids: HashMap<String, u32>,
    postings: Vec<Vec<Posting>>,
    /// Documents per term and field.
    df: Vec<[u32; 3]>,
    field_len: Vec<[u32; 3]>,
    avg_len: [f64; 3],
    facets: [FacetTable; 4],
    doc_facets: Vec<[Vec<u32>; 4]>,
    /// (lat, doc) ascending, for box queries.
    by_lat: Vec<(f64, u32)>,
}

/// What the index file holds; postings are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct Snapshot {
    format: u32,
    params: Bm25Params,
    synonyms: SynonymTable,
    docs: Vec<DocEntry>,
}

const SNAPSHOT_FORMAT: u32 = 1;

impl std::fmt::Debug for InvertedIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvertedIndex")
            .field("docs", &self.docs.len())
            .field("terms", &self.term_ids.len())
            .field("synonyms", &self.synonyms.len())
            .finish()
    }
}

impl InvertedIndex {
    pub fn build(entries: Vec<DocEntry>) -> Result<Self, SearchError> {
        Self::build_with(entries, Bm25Params::default(), SynonymTable::new())
    }

    pub fn build_with(mut entries: Vec<DocEntry>, params: Bm25Params, synonyms: SynonymTable) -> Result<Self, SearchError> {
        entries.sort_by(|a, b| a.dataset.cmp(&b.dataset));
        if let Some(w) = entries.windows(2).find(|w| w[0].dataset == w[1].dataset) {
            return Err(SearchError::DuplicateDataset(w[0].dataset.clone()));
        }
        if let Some(e) = entries.iter().find(|e| e.point.is_some_and(|p| super::GeoPoint::new(p.lat, p.lon).is_err())) {
            let p = e.point.unwrap();
            return Err(SearchError::Coordinates { lat: p.lat, lon: p.lon });
        }
        let n = entries.len();

        // Terms get ids in lexicographic order so that the layout does not
        // depend on hashing.
        let mut counts: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        let mut field_len = Vec::with_capacity(n);
        for (doc, entry) in entries.iter().enumerate() {
            let mut lens = [0u32; 3];
            for field in Field::ALL {
                let terms = tokenize(&entry.field_text(field));
                lens[field.index()] = terms.len() as u32;
                let mut tf: BTreeMap<String, u32> = BTreeMap::new();
                for t in terms {
                    *tf.entry(t).or_default() += 1;
                }
                for (t, c) in tf {
                    counts.entry(t).or_default().push(Posting { doc: doc as u32, field, tf: c });
                }
            }
            field_len.push(lens);
        }
        let mut term_ids = HashMap::with_capacity(counts.len());
        let mut postings = Vec::with_capacity(counts.len());
        let mut df = Vec::with_capacity(counts.len());
        for (id, (term, mut list)) in counts.into_iter().enumerate() {
            list.sort_by_key(|p| (p.doc, p.field));
            let mut d = [0u32; 3];
            for p in &list {
                d[p.field.index()] += 1;
            }
            term_ids.insert(term, id as u32);
            postings.push(list);
            df.push(d);
        }
        let mut avg_len = [0.0; 3];
        for (i, avg) in avg_len.iter_mut().enumerate() {
            let total: u64 = field_len.iter().map(|l: &[u32; 3]| l[i] as u64).sum();
            *avg = if n == 0 { 0.0 } else { total as f64 / n as f64 };
        }

        let facets = FacetField::ALL.map(|field| {
            let mut values: Vec<String> = entries.iter().flat_map(|e| e.facet_values(field)).collect();
            values.sort();
            values.dedup();
            let ids: HashMap<String, u32> = values.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
            FacetTable { docs: vec![FixedBitSet::with_capacity(n); values.len()], values, ids }
        });
        let mut facets = facets;
        let mut doc_facets = Vec::with_capacity(n);
        for (doc, entry) in entries.iter().enumerate() {
            let per_field = FacetField::ALL.map(|field| {
                let table = &mut facets[field.index()];
                entry
                    .facet_values(field)
                    .iter()
                    .map(|v| {
                        let id = table.ids[v];
                        table.docs[id as usize].insert(doc);
                        id
                    })
                    .collect::<Vec<u32>>()
            });
            doc_facets.push(per_field);
        }

        let mut by_lat: Vec<(f64, u32)> =
            entries.iter().enumerate().filter_map(|(i, e)| e.point.map(|p| (p.lat, i as u32))).collect();
        by_lat.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let by_iri = entries.iter().enumerate().map(|(i, e)| (e.dataset.clone(), i as u32)).collect();
        Ok(Self {
            params,
            synonyms,
            docs: entries,
            by_iri,
            term_ids,
            postings,
            df,
            field_len,
            avg_len,
            facets,
            doc_facets,
            by_lat,
        })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn docs(&self) -> &[DocEntry] {
        &self.docs
    }

    pub fn params(&self) -> &Bm25Params {
        &self.params
    }

    pub fn synonyms(&self) -> &SynonymTable {
        &self.synonyms
    }

    pub fn get(&self, dataset: &Iri) -> Option<&DocEntry> {
        self.by_iri.get(dataset).map(|&i| &self.docs[i as usize])
    }

    pub fn doc_id(&self, dataset: &Iri) -> Option<u32> {
        self.by_iri.get(dataset).copied()
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.term_ids.get(term).map_or(&[], |&id| &self.postings[id as usize])
    }

    pub fn term_count(&self) -> usize {
        self.term_ids.len()
    }

    /// Facet counts over the whole index.
    pub fn facet_counts(&self) -> FacetCounts {
        let mut out = FacetCounts::new();
        for field in FacetField::ALL {
            let table = &self.facets[field.index()];
            let counts = table.values.iter().zip(&table.docs).map(|(v, d)| (v.clone(), d.count_ones(..))).collect();
            out.insert(field, counts);
        }
        out
    }

    fn filter_set(&self, query: &SearchQuery) -> Option<FixedBitSet> {
        let n = self.docs.len();
        let mut set: Option<FixedBitSet> = None;
        let mut restrict = |bits: FixedBitSet| match &mut set {
            Some(s) => s.intersect_with(&bits),
            None => set = Some(bits),
        };
        for (field, filter) in &query.filters {
            if filter.values.is_empty() {
                continue;
            }
            let table = &self.facets[field.index()];
            let value_bits = filter.values.iter().map(|v| table.ids.get(v).map(|&i| &table.docs[i as usize]));
            let mut acc: Option<FixedBitSet> = None;
            for bits in value_bits {
                let empty = FixedBitSet::with_capacity(n);
                let bits = bits.unwrap_or(&empty);
                match (&mut acc, filter.mode) {
                    (None, _) => acc = Some(bits.clone()),
                    (Some(a), Combinator::Or) => a.union_with(bits),
                    (Some(a), Combinator::And) => a.intersect_with(bits),
                }
            }
            restrict(acc.unwrap_or_else(|| FixedBitSet::with_capacity(n)));
        }
        if let Some(bbox) = &query.bbox {
            restrict(self.bbox_set(bbox));
        }
        set
    }

    fn bbox_set(&self, bbox: &BBox) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.docs.len());
        let start = self.by_lat.partition_point(|&(lat, _)| lat < bbox.sw.lat);
        for &(lat, doc) in &self.by_lat[start..] {
            if lat > bbox.ne.lat {
                break;
            }
            let p = self.docs[doc as usize].point.expect("indexed point");
            if bbox.contains(p) {
                bits.insert(doc as usize);
            }
        }
        bits
    }

    fn query_terms(&self, query: &SearchQuery) -> Vec<WeightedTerm> {
        let terms = tokenize(&query.text);
        if query.synonyms {
            expand_synonyms(&terms, &self.synonyms)
        } else {
            expand_synonyms(&terms, &SynonymTable::new())
        }
    }

    pub fn search(&self, query: &SearchQuery) -> Result<SearchResult<'_>, SearchError> {
        query.validate()?;
        let allowed = self.filter_set(query);
        let terms = self.query_terms(query);
        let n = self.docs.len();

        let matched: Vec<(u32, f64)> = if terms.is_empty() {
            match &allowed {
                Some(bits) => bits.ones().map(|d| (d as u32, 0.0)).collect(),
                None => (0..n as u32).map(|d| (d, 0.0)).collect(),
            }
        } else {
            let mut scores = vec![0.0f64; n];
            let mut touched = Vec::new();
            for wt in &terms {
                let Some(&id) = self.term_ids.get(&wt.term) else { continue };
                let df = &self.df[id as usize];
                let idf = Field::ALL.map(|f| self.params.idf(n, df[f.index()] as usize));
                for p in &self.postings[id as usize] {
                    let doc = p.doc as usize;
                    if allowed.as_ref().is_some_and(|a| !a.contains(doc)) {
                        continue;
                    }
                    let fi = p.field.index();
                    let s = wt.weight
                        * self.params.term_score(p.field, idf[fi], p.tf, self.field_len[doc][fi], self.avg_len[fi]);
                    if scores[doc] == 0.0 {
                        touched.push(p.doc);
                    }
                    scores[doc] += s;
                }
            }
            touched.into_iter().map(|d| (d, scores[d as usize])).collect()
        };

        let mut tallies: [Vec<usize>; 4] = FacetField::ALL.map(|f| vec![0; self.facets[f.index()].values.len()]);
        for &(doc, _) in &matched {
            for (f, ids) in self.doc_facets[doc as usize].iter().enumerate() {
                for &id in ids {
                    tallies[f][id as usize] += 1;
                }
            }
        }
        let facets = FacetField::ALL
            .iter()
            .map(|&f| {
                let table = &self.facets[f.index()];
                let counts = tallies[f.index()]
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(i, &c)| (table.values[i].clone(), c))
                    .collect();
                (f, counts)
            })
            .collect();

        let origin = match query.sort {
            SortOrder::Distance(o) => Some(o),
            SortOrder::Relevance => None,
        };
        let hits: Vec<Hit<'_>> = matched
            .iter()
            .map(|&(doc, score)| {
                let doc = &self.docs[doc as usize];
                let distance_km = origin.and_then(|o| doc.point.map(|p| haversine_km(o, p)));
                Hit { doc, score, distance_km }
            })
            .collect();
        let total = hits.len();
        Ok(SearchResult { total, page: query.page, size: query.size, hits: paginate(hits, query), facets })
    }

    /// Serializes the documents, parameters and synonym table.
    pub fn to_bytes(&self) -> Vec<u8> {
        let snapshot = Snapshot {
            format: SNAPSHOT_FORMAT,
            params: self.params,
            synonyms: self.synonyms.clone(),
            docs: self.docs.clone(),
        };
        serde_json::to_vec(&snapshot).expect("index snapshot serializes")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SearchError> {
        let snapshot: Snapshot = serde_json::from_slice(bytes).map_err(|e| SearchError::Format(e.to_string()))?;
        if snapshot.format != SNAPSHOT_FORMAT {
            return Err(SearchError::Format(format!("unsupported format {}", snapshot.format)));
        }
        Self::build_with(snapshot.docs, snapshot.params, snapshot.synonyms)
    }
}
