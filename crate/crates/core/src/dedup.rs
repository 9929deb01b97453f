//! Duplicate datasets found through their download URLs.
//!
//! URLs are normalized, then compared by character-trigram Jaccard
//! similarity. Candidate pairs come from a prefix-filtered inverted index:
//! with tokens in a fixed global order, two sets reaching the threshold must
//! share a token within their first `|s| - ceil(t * |s|) + 1` tokens, so
//! the candidate generation never misses a qualifying pair.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use url::Url;

use crate::model::DatasetRecord;
use crate::rdf::{Graph, Iri, Triple};
use crate::vocab::skos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedUrl {
    pub value: String,
    /// False when the input did not parse as an absolute URL.
    pub valid: bool,
}

fn is_unreserved(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~')
}

/// Decodes `%XX` escapes of unreserved characters; other escapes stay.
fn decode_unreserved(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() && bytes[i + 1].is_ascii_hexdigit() && bytes[i + 2].is_ascii_hexdigit() {
            let b = u8::from_str_radix(&s[i + 1..i + 3], 16).expect("two hex digits");
            if is_unreserved(b) {
                out.push(b as char);
                i += 3;
                continue;
            }
        }
        let ch = s[i..].chars().next().expect("in bounds");
        out.push(ch);
        i += ch.len_utf8();
    }
    out
}

/// Lowercase scheme and host, no default port, no trailing slash on a
/// non-root path, unreserved characters unescaped. Idempotent.
pub fn normalize_url(raw: &str) -> NormalizedUrl {
    let trimmed = raw.trim();
    let Ok(mut url) = Url::parse(trimmed) else {
        return NormalizedUrl {
            value: trimmed.to_owned(),
            valid: false,
        };
    };
    if url.cannot_be_a_base() {
        return NormalizedUrl {
            value: url.to_string(),
            valid: true,
        };
    }
    let mut path = decode_unreserved(url.path());
    while path.len() > 1 && path.ends_with('/') {
        path.pop();
    }
    url.set_path(&path);
    if let Some(q) = url.query().map(decode_unreserved) {
        url.set_query(Some(&q));
    }
    NormalizedUrl {
        value: url.to_string(),
        valid: true,
    }
}

fn trigram_set(s: &str) -> BTreeSet<[char; 3]> {
    let chars: Vec<char> = s.chars().collect();
    chars.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
}

/// Jaccard coefficient of the character-trigram sets. Strings shorter than
/// three characters have no trigrams and compare by equality.
pub fn trigram_similarity(a: &str, b: &str) -> f64 {
    if a.chars().count() < 3 || b.chars().count() < 3 {
        return if a == b { 1.0 } else { 0.0 };
    }
    let (x, y) = (trigram_set(a), trigram_set(b));
    let inter = x.intersection(&y).count();
    inter as f64 / (x.len() + y.len() - inter) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub dataset_a: Iri,
    pub dataset_b: Iri,
    pub url_a: String,
    pub url_b: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuplicateCluster {
    /// Sorted, at least two.
    pub members: Vec<Iri>,
    /// Best URL pair of every linked dataset pair, sorted by dataset pair.
    pub evidence: Vec<Evidence>,
}

/// Interned trigram sets of the distinct normalized URLs.
struct UrlTable {
    urls: Vec<String>,
    /// Token ids sorted rarest first; empty for short strings.
    tokens: Vec<Vec<u32>>,
    owners: Vec<Vec<usize>>,
}

impl UrlTable {
    fn build(records: &[DatasetRecord]) -> Self {
        let mut ids: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            let urls: BTreeSet<String> = r.download_urls().map(|u| normalize_url(u.as_str()).value).collect();
            for u in urls {
                ids.entry(u).or_default().push(i);
            }
        }
        let (urls, owners): (Vec<String>, Vec<Vec<usize>>) = ids.into_iter().unzip();
        let mut vocab: HashMap<[char; 3], u32> = HashMap::new();
        let raw: Vec<Vec<u32>> = urls
            .iter()
            .map(|u| {
                if u.chars().count() < 3 {
                    return Vec::new();
                }
                trigram_set(u)
                    .into_iter()
                    .map(|g| {
                        let next = vocab.len() as u32;
                        *vocab.entry(g).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        let mut freq = vec![0u32; vocab.len()];
        for set in &raw {
            for &t in set {
                freq[t as usize] += 1;
            }
        }
        let tokens = raw
            .into_iter()
            .map(|mut set| {
                set.sort_by_key(|&t| (freq[t as usize], t));
                set
            })
            .collect();
        Self { urls, tokens, owners }
    }

    fn jaccard(&self, a: usize, b: usize) -> f64 {
        let (x, y) = (&self.tokens[a], &self.tokens[b]);
        let ys: std::collections::HashSet<u32> = y.iter().copied().collect();
        let inter = x.iter().filter(|t| ys.contains(t)).count();
        inter as f64 / (x.len() + y.len() - inter) as f64
    }
}

/// Minimal overlap for a set of `n` tokens to reach `threshold`, rounded
/// down slightly so floating-point error cannot drop a qualifying pair.
fn required_overlap(n: usize, threshold: f64) -> usize {
    ((threshold * n as f64) - 1e-9).ceil().max(1.0) as usize
}

/// Pairs of distinct URL ids with similarity at or above `threshold`.
fn similar_url_pairs(table: &UrlTable, threshold: f64) -> Vec<(usize, usize, f64)> {
    let mut order: Vec<usize> = (0..table.urls.len()).filter(|&i| !table.tokens[i].is_empty()).collect();
    order.sort_by_key(|&i| (table.tokens[i].len(), i));
    let prefix = |i: usize| {
        let n = table.tokens[i].len();
        n - required_overlap(n, threshold) + 1
    };
    // index[token] = positions in `order` whose prefix holds the token
    let mut index: HashMap<u32, Vec<usize>> = HashMap::new();
    for (pos, &i) in order.iter().enumerate() {
        for &t in &table.tokens[i][..prefix(i)] {
            index.entry(t).or_default().push(pos);
        }
    }
    (0..order.len())
        .into_par_iter()
        .flat_map_iter(|pos| {
            let x = order[pos];
            let min_size = threshold * table.tokens[x].len() as f64 - 1e-9;
            let mut candidates = BTreeSet::new();
            for t in &table.tokens[x][..prefix(x)] {
                for &p in index.get(t).into_iter().flatten() {
                    if p >= pos {
                        break;
                    }
                    if table.tokens[order[p]].len() as f64 >= min_size {
                        candidates.insert(order[p]);
                    }
                }
            }
            candidates
                .into_iter()
                .filter_map(move |y| {
                    let sim = table.jaccard(x, y);
                    (sim >= threshold).then(|| (x.min(y), x.max(y), sim))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Links datasets whose download URLs reach `threshold` similarity and
/// returns the connected components, ordered by smallest member.
pub fn find_duplicates(records: &[DatasetRecord], threshold: f64) -> Vec<DuplicateCluster> {
    let table = UrlTable::build(records);
    let mut url_pairs: Vec<(usize, usize, f64)> = (0..table.urls.len()).map(|u| (u, u, 1.0)).collect();
    url_pairs.extend(similar_url_pairs(&table, threshold));

    // best evidence per dataset pair, keyed by record indices (a < b by IRI)
    let mut best: BTreeMap<(usize, usize), (f64, usize, usize)> = BTreeMap::new();
    for (u, v, sim) in url_pairs {
        for &ra in &table.owners[u] {
            for &rb in &table.owners[v] {
                if records[ra].iri == records[rb].iri {
                    continue;
                }
                let (ka, ua, kb, ub) = if records[ra].iri < records[rb].iri { (ra, u, rb, v) } else { (rb, v, ra, u) };
                let candidate = (sim, ua, ub);
                best.entry((ka, kb))
                    .and_modify(|e| {
                        let better = candidate.0 > e.0
                            || (candidate.0 == e.0 && (&table.urls[ua], &table.urls[ub]) < (&table.urls[e.1], &table.urls[e.2]));
                        if better {
                            *e = candidate;
                        }
                    })
                    .or_insert(candidate);
            }
        }
    }

    // records sharing an IRI are one dataset
    let mut canonical: BTreeMap<&Iri, usize> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        canonical.entry(&r.iri).or_insert(i);
    }
    let mut uf = UnionFind((0..records.len()).collect());
    for &(a, b) in best.keys() {
        uf.union(canonical[&records[a].iri], canonical[&records[b].iri]);
    }
    let mut groups: BTreeMap<usize, DuplicateCluster> = BTreeMap::new();
    let mut evidence: BTreeMap<(&Iri, &Iri), Evidence> = BTreeMap::new();
    for (&(a, b), &(sim, ua, ub)) in &best {
        let key = (&records[a].iri, &records[b].iri);
        evidence.entry(key).or_insert_with(|| Evidence {
            dataset_a: records[a].iri.clone(),
            dataset_b: records[b].iri.clone(),
            url_a: table.urls[ua].clone(),
            url_b: table.urls[ub].clone(),
            similarity: sim,
        });
    }
    for ((a, _), ev) in evidence {
        let root = uf.find(canonical[a]);
        let cluster = groups.entry(root).or_insert_with(|| DuplicateCluster {
            members: Vec::new(),
            evidence: Vec::new(),
        });
        cluster.members.push(ev.dataset_a.clone());
        cluster.members.push(ev.dataset_b.clone());
        cluster.evidence.push(ev);
    }
    let mut clusters: Vec<DuplicateCluster> = groups
        .into_values()
        .map(|mut c| {
            c.members.sort();
            c.members.dedup();
            c
        })
        .collect();
    clusters.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
    clusters
}

/// One `skos:exactMatch` triple per unordered member pair, smaller IRI as subject.
pub fn emit_links(clusters: &[DuplicateCluster]) -> Graph {
    let mut g = Graph::new();
    for c in clusters {
        for (i, a) in c.members.iter().enumerate() {
            for b in &c.members[i + 1..] {
                g.insert(Triple::new(a.clone(), skos::exact_match(), b.clone()));
            }
        }
    }
    g
}

#[derive(Serialize)]
struct ReportRow<'a> {
    dataset_a: &'a str,
    dataset_b: &'a str,
    url_a: &'a str,
    url_b: &'a str,
    similarity: f64,
}

/// CSV with header `dataset_a,dataset_b,url_a,url_b,similarity`.
pub fn write_report<W: Write>(clusters: &[DuplicateCluster], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for ev in clusters.iter().flat_map(|c| &c.evidence) {
        w.serialize(ReportRow {
            dataset_a: ev.dataset_a.as_str(),
            dataset_b: ev.dataset_b.as_str(),
            url_a: &ev.url_a,
            url_b: &ev.url_b,
            similarity: ev.similarity,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Distribution;

    fn record(iri: &str, urls: &[&str]) -> DatasetRecord {
        let mut r = DatasetRecord::new(Iri::new(iri).unwrap());
        for (i, u) in urls.iter().enumerate() {
            let mut d = Distribution::new(Iri::new(format!("{iri}/dist/{i}")).unwrap());
            d.download_url = Some(Iri::new(*u).unwrap());
            r.distributions.push(d);
        }
        r
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_url("HTTP://Example.org/data/").value, "http://example.org/data");
        assert_eq!(normalize_url("http://example.org:80/a").value, "http://example.org/a");
        assert_eq!(normalize_url("https://example.org:443/a").value, "https://example.org/a");
        assert_eq!(normalize_url("http://example.org/a").value, "http://example.org/a");
        assert_eq!(normalize_url("http://example.org/%7Euser/%41%2F").value, "http://example.org/~user/A%2F");
        assert_eq!(normalize_url("http://example.org/").value, "http://example.org/");
        let bad = normalize_url("  not a url ");
        assert_eq!((bad.value.as_str(), bad.valid), ("not a url", false));
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(trigram_similarity("abcdef", "abcdef"), 1.0);
        assert_eq!(trigram_similarity("abc", "xyz"), 0.0);
        assert!((trigram_similarity("abcd", "abce") - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(trigram_similarity("ab", "ab"), 1.0);
        assert_eq!(trigram_similarity("ab", "abc"), 0.0);
    }

    #[test]
    fn exact_and_trailing_slash_matches() {
        let recs = vec![
            record("http://ex/a", &["http://files.example.org/data.csv"]),
            record("http://ex/b", &["HTTP://files.example.org/data.csv/"]),
            record("http://ex/c", &["http://other.example.org/x.json"]),
            DatasetRecord::new(Iri::new("http://ex/d").unwrap()),
        ];
        let clusters = find_duplicates(&recs, 1.0);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members.len(), 2);
        assert_eq!(clusters[0].evidence[0].similarity, 1.0);
        assert!(find_duplicates(&[DatasetRecord::new(Iri::new("http://ex/x").unwrap())], 0.5).is_empty());
    }

    #[test]
    fn link_counts() {
        let cluster = |n: usize| DuplicateCluster {
            members: (0..n).map(|i| Iri::new(format!("http://ex/{i}")).unwrap()).collect(),
            evidence: Vec::new(),
        };
        assert_eq!(emit_links(&[cluster(2)]).len(), 1);
        assert_eq!(emit_links(&[cluster(3)]).len(), 3);
        assert!(emit_links(&[]).is_empty());
    }

    #[test]
    fn report_has_header() {
        let recs = vec![record("http://ex/a", &["http://h/x.csv"]), record("http://ex/b", &["http://h/x.csv"])];
        let mut buf = Vec::new();
        write_report(&find_duplicates(&recs, 1.0), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("dataset_a,dataset_b,url_a,url_b,similarity"));
        assert_eq!(text.lines().count(), 2);
    }
}
