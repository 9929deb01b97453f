//! Seeded random generators and brute-force reference implementations used
//! by the test suites and the benchmark command. Nothing here is tuned for
//! speed.

mod dedup;
mod graphs;
mod licenses;
mod records;
mod search;

pub use dedup::{brute_force_duplicates, near_duplicate_corpus, planted_corpus};
pub use graphs::{random_catalog_graph, random_small_graph, reachable_from, scan};
pub use licenses::random_license;
pub use records::random_record;
pub use search::{
    faceted_queries, oracle_search, random_doc_corpus, random_query, reference_distance_km, simple_queries,
    synthetic_corpus, test_synonyms, OracleHit, OracleResult,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

/// The 200 labeled `(lang, sentence)` pairs used to measure language detection.
pub fn language_sentences() -> Vec<(&'static str, &'static str)> {
    include_str!("../../tests/fixtures/language-sentences.tsv")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_once('\t').expect("lang<TAB>sentence"))
        .collect()
}

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}
