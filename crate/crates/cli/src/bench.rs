use std::time::{Duration, Instant};

use metacat_core::search::scan::ScanEngine;
use metacat_core::search::{Bm25Params, InvertedIndex, SearchQuery, SynonymTable};
use metacat_core::testkit::{faceted_queries, rng, simple_queries, synthetic_corpus};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub docs: usize,
    pub queries: usize,
    pub build_ms: f64,
    pub simple: Latency,
    pub faceted: Latency,
}

#[derive(Debug, Clone, Serialize)]
pub struct Latency {
    pub index_median_us: f64,
    pub scan_median_us: f64,
    /// Scan median divided by index median.
    pub speedup: f64,
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort();
    samples[samples.len() / 2]
}

fn time_each<F: FnMut(&SearchQuery) -> usize>(queries: &[SearchQuery], mut run: F) -> Duration {
    let mut samples = Vec::with_capacity(queries.len());
    for q in queries {
        let start = Instant::now();
        std::hint::black_box(run(q));
        samples.push(start.elapsed());
    }
    median(samples)
}

fn compare(index: &InvertedIndex, scan: &ScanEngine, queries: &[SearchQuery]) -> Latency {
    // warm-up pass so both engines start with hot caches
    for q in queries.iter().take(10) {
        let _ = index.search(q);
        let _ = scan.search(q);
    }
    let i = time_each(queries, |q| index.search(q).map(|r| r.total).unwrap_or(0));
    let s = time_each(queries, |q| scan.search(q).map(|r| r.total).unwrap_or(0));
    let us = |d: Duration| d.as_secs_f64() * 1e6;
    Latency {
        index_median_us: us(i),
        scan_median_us: us(s),
        speedup: s.as_secs_f64() / i.as_secs_f64().max(1e-9),
    }
}

/// Median per-query latency of the inverted index against a linear scan over
/// the same seeded synthetic corpus.
pub fn run_bench(docs: usize, queries: usize, seed: u64) -> BenchReport {
    let mut r = rng(seed);
    let corpus = synthetic_corpus(&mut r, docs);
    let simple = simple_queries(&mut r, queries);
    let faceted = faceted_queries(&mut r, queries);

    let start = Instant::now();
    let index = InvertedIndex::build_with(corpus.clone(), Bm25Params::default(), SynonymTable::new())
        .expect("synthetic IRIs are unique");
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    let scan = ScanEngine::new(corpus, Bm25Params::default(), SynonymTable::new()).expect("synthetic IRIs are unique");

    BenchReport {
        docs,
        queries,
        build_ms,
        simple: compare(&index, &scan, &simple),
        faceted: compare(&index, &scan, &faceted),
    }
}
