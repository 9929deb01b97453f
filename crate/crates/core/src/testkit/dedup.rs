use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::TestRng;
use crate::dedup::normalize_url;
use crate::model::{DatasetRecord, Distribution};
use crate::rdf::Iri;

fn random_segment(rng: &mut TestRng, len: usize) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789-_";
    (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char).collect()
}

fn with_download(iri: &Iri, urls: &[String]) -> DatasetRecord {
    let mut r = DatasetRecord::new(iri.clone());
    for (i, u) in urls.iter().enumerate() {
        let mut d = Distribution::new(Iri::new(format!("{iri}/dist/{i}")).unwrap());
        d.download_url = Some(Iri::new(u.as_str()).unwrap());
        r.distributions.push(d);
    }
    r
}

/// Surface variants that normalize to the same URL.
fn variant(rng: &mut TestRng, url: &str) -> String {
    match rng.gen_range(0..4) {
        0 => url.to_owned(),
        1 => format!("{url}/"),
        2 => url.replacen("http://", "HTTP://", 1),
        _ => url.replacen(".org/", ".org:80/", 1),
    }
}

/// `n` records with unrelated random download URLs, of which `k` groups
/// share one URL (in varying spellings). Returns the records and the
/// planted groups, each sorted.
pub fn planted_corpus(rng: &mut TestRng, n: usize, k: usize) -> (Vec<DatasetRecord>, Vec<Vec<Iri>>) {
    let iris: Vec<Iri> = (0..n).map(|i| Iri::new(format!("http://ex/dataset/{i:04}")).unwrap()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut urls: Vec<Vec<String>> = (0..n)
        .map(|_| {
            let count = rng.gen_range(0..3);
            (0..count)
                .map(|_| format!("http://{}.org/{}/{}.csv", random_segment(rng, 6), random_segment(rng, 10), random_segment(rng, 8)))
                .collect()
        })
        .collect();
    let mut planted = Vec::new();
    let mut next = 0;
    for _ in 0..k {
        let size = rng.gen_range(2..=4);
        if next + size > n {
            break;
        }
        let shared = format!("http://shared{}.org/{}/file.csv", planted.len(), random_segment(rng, 12));
        let mut group: Vec<Iri> = Vec::new();
        for &i in &order[next..next + size] {
            urls[i].push(variant(rng, &shared));
            group.push(iris[i].clone());
        }
        next += size;
        group.sort();
        planted.push(group);
    }
    planted.sort();
    let records = iris.iter().zip(&urls).map(|(iri, u)| with_download(iri, u)).collect();
    (records, planted)
}

/// Records whose URLs are mutations of a few base strings, so that many
/// pairs land near typical thresholds.
pub fn near_duplicate_corpus(rng: &mut TestRng, n: usize) -> Vec<DatasetRecord> {
    let bases: Vec<String> = (0..rng.gen_range(1..6))
        .map(|_| {
            let host = random_segment(rng, 4);
            let len = rng.gen_range(6..20);
            format!("http://{host}.org/{}", random_segment(rng, len))
        })
        .collect();
    (0..n)
        .map(|i| {
            let iri = Iri::new(format!("http://ex/dataset/{i:04}")).unwrap();
            let count = rng.gen_range(0..3);
            let urls: Vec<String> = (0..count)
                .map(|_| {
                    let mut u = bases.choose(rng).unwrap().clone();
                    for _ in 0..rng.gen_range(0..4) {
                        match rng.gen_range(0..3) {
                            0 => u.push_str(&random_segment(rng, 1)),
                            1 if u.len() > 20 => {
                                u.pop();
                            }
                            _ => u.push_str(&format!("/{}", random_segment(rng, 2))),
                        }
                    }
                    u
                })
                .collect();
            with_download(&iri, &urls)
        })
        .collect()
}

fn trigrams(s: &str) -> BTreeSet<String> {
    let chars: Vec<char> = s.chars().collect();
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

fn jaccard(a: &str, b: &str) -> f64 {
    let (x, y) = (trigrams(a), trigrams(b));
    if x.is_empty() || y.is_empty() {
        return if a == b { 1.0 } else { 0.0 };
    }
    x.intersection(&y).count() as f64 / x.union(&y).count() as f64
}

/// All-pairs reference: member sets of the connected components.
pub fn brute_force_duplicates(records: &[DatasetRecord], threshold: f64) -> Vec<Vec<Iri>> {
    let urls: Vec<Vec<String>> = records
        .iter()
        .map(|r| r.download_urls().map(|u| normalize_url(u.as_str()).value).collect())
        .collect();
    let mut label: Vec<usize> = (0..records.len()).collect();
    let mut changed = true;
    let mut edges = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            if records[i].iri != records[j].iri
                && urls[i].iter().any(|a| urls[j].iter().any(|b| jaccard(a, b) >= threshold))
            {
                edges.push((i, j));
            }
        }
    }
    while changed {
        changed = false;
        for &(i, j) in &edges {
            let m = label[i].min(label[j]);
            if label[i] != m || label[j] != m {
                label[i] = m;
                label[j] = m;
                changed = true;
            }
        }
    }
    let linked: BTreeSet<usize> = edges.iter().flat_map(|&(i, j)| [i, j]).collect();
    let mut groups: BTreeMap<usize, BTreeSet<Iri>> = BTreeMap::new();
    for i in linked {
        groups.entry(label[i]).or_default().insert(records[i].iri.clone());
    }
    let mut out: Vec<Vec<Iri>> = groups.into_values().map(|g| g.into_iter().collect()).collect();
    out.sort();
    out
}
