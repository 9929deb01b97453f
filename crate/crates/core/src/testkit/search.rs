use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::TestRng;
use crate::rdf::Iri;
use crate::search::{
    tokenize, BBox, Bm25Params, Combinator, DocEntry, FacetField, FacetFilter, FacetValues, GeoPoint, SearchQuery,
    SortOrder, SynonymTable, TextFields,
};

const VOCAB: &[&str] = &[
    "stadtbahn", "straßenbahn", "bus", "haltestelle", "verkehr", "luft", "qualität", "daten", "köln", "bonn",
    "s-bahn", "stops", "air", "traffic", "report", "2020",
];
const LANGS: &[&str] = &["", "de", "en"];
const CATEGORIES: &[&str] = &["http://ex/theme/TRAN", "http://ex/theme/ENVI", "http://ex/theme/GOVE", "http://ex/theme/ECON"];
const PUBLISHERS: &[&str] = &["Stadt Köln", "Stadt Bonn", "Land NRW"];
const CATALOGS: &[&str] = &["http://ex/catalog/a", "http://ex/catalog/b"];
const LICENSES: &[&str] = &["http://ex/license/cc0", "http://ex/license/by", "http://ex/license/odbl"];

fn some_words(rng: &mut TestRng, max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn pick_iri(rng: &mut TestRng, pool: &[&str]) -> Iri {
    Iri::new(*pool.choose(rng).unwrap()).unwrap()
}

/// Points on a coarse grid so that exact ties and corner hits occur.
fn grid_point(rng: &mut TestRng) -> GeoPoint {
    GeoPoint::new(50.0 + rng.gen_range(0..=8) as f64 * 0.25, 6.0 + rng.gen_range(0..=8) as f64 * 0.25).unwrap()
}

/// Up to `max_docs` documents over a 16-word vocabulary and small facet pools.
pub fn random_doc_corpus(rng: &mut TestRng, max_docs: usize) -> Vec<DocEntry> {
    let n = rng.gen_range(0..=max_docs);
    (0..n)
        .map(|i| {
            let mut doc = DocEntry::new(Iri::new(format!("http://ex/doc/{i:03}")).unwrap());
            for _ in 0..rng.gen_range(0..=2) {
                let lang = LANGS.choose(rng).unwrap().to_string();
                let title = some_words(rng, 4);
                let description = some_words(rng, 12);
                let keywords = (0..rng.gen_range(0..=3)).map(|_| some_words(rng, 2)).collect();
                doc.texts.insert(lang, TextFields { title, description, keywords });
            }
            let mut category: Vec<Iri> = (0..rng.gen_range(0..=3)).map(|_| pick_iri(rng, CATEGORIES)).collect();
            category.sort();
            category.dedup();
            doc.facets = FacetValues {
                category,
                publisher: rng.gen_bool(0.8).then(|| PUBLISHERS.choose(rng).unwrap().to_string()),
                catalog: rng.gen_bool(0.8).then(|| pick_iri(rng, CATALOGS)),
                license: rng.gen_bool(0.7).then(|| pick_iri(rng, LICENSES)),
            };
            doc.point = rng.gen_bool(0.7).then(|| grid_point(rng));
            doc.quality = rng.gen_bool(0.5).then(|| rng.gen_range(0..=50) as f64 / 10.0);
            doc
        })
        .collect()
}

pub fn test_synonyms() -> SynonymTable {
    SynonymTable::from_entries([("stadtbahn", vec!["straßenbahn", "s-bahn"]), ("luft", vec!["air"]), ("bus", vec!["omnibus"])])
}

/// A valid query with random text, filters, box, sort and paging.
pub fn random_query(rng: &mut TestRng) -> SearchQuery {
    let mut q = SearchQuery::text(some_words(rng, 3));
    if rng.gen_bool(0.1) {
        q.text = "Köln, S-Bahn!".into();
    }
    for (field, pool) in [
        (FacetField::Category, CATEGORIES),
        (FacetField::Publisher, PUBLISHERS),
        (FacetField::Catalog, CATALOGS),
        (FacetField::License, LICENSES),
    ] {
        if rng.gen_bool(0.3) {
            let mut values: BTreeSet<String> =
                (0..rng.gen_range(0..=2)).map(|_| pool.choose(rng).unwrap().to_string()).collect();
            if rng.gen_bool(0.1) {
                values.insert("unknown".into());
            }
            let mode = if rng.gen_bool(0.5) { Combinator::And } else { Combinator::Or };
            q.filters.insert(field, FacetFilter { values, mode });
        }
    }
    if rng.gen_bool(0.3) {
        let (a, b) = (grid_point(rng), grid_point(rng));
        let sw = GeoPoint::new(a.lat.min(b.lat), a.lon.min(b.lon)).unwrap();
        let ne = GeoPoint::new(a.lat.max(b.lat), a.lon.max(b.lon)).unwrap();
        q.bbox = Some(BBox::new(sw, ne).unwrap());
    }
    if rng.gen_bool(0.4) {
        q.sort = SortOrder::Distance(grid_point(rng));
    }
    q.synonyms = rng.gen_bool(0.5);
    q.size = *[1, 3, 10, 100].choose(rng).unwrap();
    q.page = rng.gen_range(1..=3);
    q
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleHit {
    pub dataset: Iri,
    pub score: f64,
    pub distance_km: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub total: usize,
    /// The requested page only.
    pub hits: Vec<OracleHit>,
    pub facets: BTreeMap<FacetField, BTreeMap<String, usize>>,
}

fn doc_facet(doc: &DocEntry, field: FacetField) -> BTreeSet<String> {
    let f = &doc.facets;
    match field {
        FacetField::Category => f.category.iter().map(|i| i.as_str().to_owned()).collect(),
        FacetField::Publisher => f.publisher.iter().cloned().collect(),
        FacetField::Catalog => f.catalog.iter().map(|i| i.as_str().to_owned()).collect(),
        FacetField::License => f.license.iter().map(|i| i.as_str().to_owned()).collect(),
    }
}

fn field_tokens(doc: &DocEntry, field: usize) -> Vec<String> {
    let mut out = Vec::new();
    for t in doc.texts.values() {
        match field {
            0 => out.extend(tokenize(&t.title)),
            1 => t.keywords.iter().for_each(|k| out.extend(tokenize(k))),
            _ => out.extend(tokenize(&t.description)),
        }
    }
    out
}

/// Great-circle distance via the haversine formula, written out separately.
pub fn reference_distance_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let r = 6371.0088_f64;
    let (la1, la2) = (a.lat * std::f64::consts::PI / 180.0, b.lat * std::f64::consts::PI / 180.0);
    let dla = la2 - la1;
    let dlo = (b.lon - a.lon) * std::f64::consts::PI / 180.0;
    let s = (dla / 2.0).sin() * (dla / 2.0).sin() + la1.cos() * la2.cos() * (dlo / 2.0).sin() * (dlo / 2.0).sin();
    2.0 * r * s.sqrt().asin()
}

/// Evaluates a query by direct computation over every document.
pub fn oracle_search(docs: &[DocEntry], query: &SearchQuery, synonyms: &SynonymTable, p: &Bm25Params) -> OracleResult {
    let n = docs.len() as f64;
    let tokens: Vec<[Vec<String>; 3]> = docs.iter().map(|d| [0, 1, 2].map(|f| field_tokens(d, f))).collect();
    let avg: Vec<f64> = (0..3)
        .map(|f| if docs.is_empty() { 0.0 } else { tokens.iter().map(|t| t[f].len()).sum::<usize>() as f64 / n })
        .collect();

    let mut weighted: Vec<(String, f64)> = Vec::new();
    for t in tokenize(&query.text) {
        if !weighted.iter().any(|(w, _)| *w == t) {
            weighted.push((t, 1.0));
        }
    }
    if query.synonyms {
        let originals: Vec<String> = weighted.iter().map(|(t, _)| t.clone()).collect();
        for t in &originals {
            for s in synonyms.synonyms_of(t) {
                for w in s.split(' ') {
                    if !weighted.iter().any(|(x, _)| x == w) {
                        weighted.push((w.to_owned(), 0.5));
                    }
                }
            }
        }
    }
    let boosts = [p.boost_title, p.boost_keywords, p.boost_description];

    let mut hits = Vec::new();
    let mut facets: BTreeMap<FacetField, BTreeMap<String, usize>> = BTreeMap::new();
    for f in FacetField::ALL {
        facets.insert(f, BTreeMap::new());
    }
    for (i, doc) in docs.iter().enumerate() {
        let facet_ok = query.filters.iter().all(|(field, filter)| {
            let have = doc_facet(doc, *field);
            if filter.values.is_empty() {
                true
            } else if filter.mode == Combinator::Or {
                filter.values.iter().any(|v| have.contains(v))
            } else {
                filter.values.iter().all(|v| have.contains(v))
            }
        });
        let box_ok = match (&query.bbox, doc.point) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(b), Some(pt)) => {
                pt.lat >= b.sw.lat && pt.lat <= b.ne.lat && pt.lon >= b.sw.lon && pt.lon <= b.ne.lon
            }
        };
        if !facet_ok || !box_ok {
            continue;
        }
        let mut score = 0.0;
        let mut matched = weighted.is_empty();
        for (term, w) in &weighted {
            for f in 0..3 {
                let tf = tokens[i][f].iter().filter(|t| *t == term).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                matched = true;
                let df = tokens.iter().filter(|t| t[f].contains(term)).count() as f64;
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                let len = tokens[i][f].len() as f64;
                let denom = tf + p.k1 * (1.0 - p.b + p.b * len / avg[f]);
                score += w * (boosts[f] * idf * tf * (p.k1 + 1.0) / denom);
            }
        }
        if !matched {
            continue;
        }
        for f in FacetField::ALL {
            for v in doc_facet(doc, f) {
                *facets.get_mut(&f).unwrap().entry(v).or_insert(0) += 1;
            }
        }
        let distance_km = match query.sort {
            SortOrder::Distance(o) => doc.point.map(|pt| reference_distance_km(o, pt)),
            SortOrder::Relevance => None,
        };
        hits.push(OracleHit { dataset: doc.dataset.clone(), score, distance_km });
    }
    let relevance = |a: &OracleHit, b: &OracleHit| {
        b.score.partial_cmp(&a.score).unwrap().then_with(|| a.dataset.cmp(&b.dataset))
    };
    hits.sort_by(|a, b| match query.sort {
        SortOrder::Relevance => relevance(a, b),
        SortOrder::Distance(_) => match (a.distance_km, b.distance_km) {
            (Some(x), Some(y)) => x.partial_cmp(&y).unwrap().then_with(|| relevance(a, b)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => a.dataset.cmp(&b.dataset),
        },
    });
    let total = hits.len();
    let page: Vec<OracleHit> = hits.into_iter().skip((query.page - 1) * query.size).take(query.size).collect();
    OracleResult { total, hits: page, facets }
}

const SYNTH_THEMES: usize = 13;
const SYNTH_PUBLISHERS: usize = 400;
const SYNTH_CATALOGS: usize = 12;
const SYNTH_VOCAB: usize = 5000;

fn synth_word(i: usize) -> String {
    const SYL: &[&str] = &["ka", "ver", "stadt", "lu", "mo", "ne", "bahn", "ri", "to", "sa", "wer", "quel"];
    let mut w = String::new();
    let mut x = i;
    loop {
        w.push_str(SYL[x % SYL.len()]);
        x /= SYL.len();
        if x == 0 {
            break;
        }
    }
    format!("{w}{}", i % 7)
}

/// Draws word ranks with a Zipf-like skew.
fn zipf_word(rng: &mut TestRng, vocab: &[String]) -> String {
    let u: f64 = rng.gen_range(0.0..1.0);
    let idx = ((vocab.len() as f64).powf(u) - 1.0) as usize;
    vocab[idx.min(vocab.len() - 1)].clone()
}

/// A large corpus with skewed word frequencies, 13 categories, 400
/// publishers, 12 catalogs and the license pool, mostly with points.
pub fn synthetic_corpus(rng: &mut TestRng, n: usize) -> Vec<DocEntry> {
    let vocab: Vec<String> = (0..SYNTH_VOCAB).map(synth_word).collect();
    let sentence = |rng: &mut TestRng, len: usize| (0..len).map(|_| zipf_word(rng, &vocab)).collect::<Vec<_>>().join(" ");
    (0..n)
        .map(|i| {
            let mut doc = DocEntry::new(Iri::new(format!("http://synthetic.example/dataset/{i:06}")).unwrap());
            let len = rng.gen_range(3..9);
            let title = sentence(rng, len);
            let len = rng.gen_range(15..60);
            let description = sentence(rng, len);
            let keywords = (0..rng.gen_range(1..5)).map(|_| sentence(rng, 1)).collect();
            let lang = if rng.gen_bool(0.7) { "de" } else { "en" };
            doc.texts.insert(lang.into(), TextFields { title, description, keywords });
            let mut category: Vec<Iri> = (0..rng.gen_range(1..=2))
                .map(|_| Iri::new(format!("http://synthetic.example/theme/{}", rng.gen_range(0..SYNTH_THEMES))).unwrap())
                .collect();
            category.sort();
            category.dedup();
            doc.facets = FacetValues {
                category,
                publisher: Some(format!("Publisher {:03}", rng.gen_range(0..SYNTH_PUBLISHERS))),
                catalog: Some(Iri::new(format!("http://synthetic.example/catalog/{}", rng.gen_range(0..SYNTH_CATALOGS))).unwrap()),
                license: Some(pick_iri(rng, LICENSES)),
            };
            doc.point = rng
                .gen_bool(0.8)
                .then(|| GeoPoint::new(rng.gen_range(47.3..55.0), rng.gen_range(5.9..15.0)).unwrap());
            doc
        })
        .collect()
}

/// Single-word queries drawn from the corpus vocabulary.
pub fn simple_queries(rng: &mut TestRng, count: usize) -> Vec<SearchQuery> {
    let vocab: Vec<String> = (0..SYNTH_VOCAB).map(synth_word).collect();
    (0..count).map(|_| SearchQuery::text(zipf_word(rng, &vocab))).collect()
}

/// One word plus publisher and category filters.
pub fn faceted_queries(rng: &mut TestRng, count: usize) -> Vec<SearchQuery> {
    let vocab: Vec<String> = (0..SYNTH_VOCAB).map(synth_word).collect();
    (0..count)
        .map(|_| {
            let publishers: Vec<String> =
                (0..rng.gen_range(1..=3)).map(|_| format!("Publisher {:03}", rng.gen_range(0..SYNTH_PUBLISHERS))).collect();
            let theme = format!("http://synthetic.example/theme/{}", rng.gen_range(0..SYNTH_THEMES));
            let pubs: Vec<&str> = publishers.iter().map(String::as_str).collect();
            SearchQuery::text(zipf_word(rng, &vocab))
                .with_filter(FacetField::Publisher, Combinator::Or, &pubs)
                .with_filter(FacetField::Category, Combinator::Or, &[theme.as_str()])
        })
        .collect()
}
