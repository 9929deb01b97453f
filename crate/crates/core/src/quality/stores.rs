//! Optional local stores consulted by the trust and community metrics.

use std::collections::{BTreeMap, HashMap};

use crate::license::LicenseDb;
use crate::model::{AgentRef, DatasetRecord};
use crate::rdf::Iri;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct StoreError {
    pub line: usize,
    pub message: String,
}

/// Checks whether a URL answers with success.
pub trait UrlProber: Send + Sync {
    fn probe(&self, url: &Iri) -> bool;
}

fn rows(text: &str, columns: usize) -> impl Iterator<Item = Result<(usize, Vec<&str>), StoreError>> {
    text.lines().enumerate().filter_map(move |(idx, line)| {
        if line.trim().is_empty() || line.starts_with('#') {
            return None;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() != columns {
            return Some(Err(StoreError {
                line: idx + 1,
                message: format!("expected {columns} columns, found {}", cols.len()),
            }));
        }
        Some(Ok((idx + 1, cols)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderEntry {
    pub rating: u8,
    pub signed: bool,
}

/// Provider ratings keyed by publisher IRI, homepage or name.
#[derive(Debug, Clone, Default)]
pub struct ProviderStore {
    entries: HashMap<String, ProviderEntry>,
}

impl ProviderStore {
    /// Parses `provider<TAB>rating 0..5<TAB>signed true|false` rows.
    pub fn parse(text: &str) -> Result<Self, StoreError> {
        let mut entries = HashMap::new();
        for row in rows(text, 3) {
            let (line, cols) = row?;
            let err = |message: String| StoreError { line, message };
            let rating: u8 = cols[1].parse().ok().filter(|r| *r <= 5).ok_or_else(|| err(format!("invalid rating `{}`", cols[1])))?;
            let signed: bool = cols[2].parse().map_err(|_| err(format!("invalid flag `{}`", cols[2])))?;
            entries.insert(cols[0].to_lowercase(), ProviderEntry { rating, signed });
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, provider: &str, entry: ProviderEntry) {
        self.entries.insert(provider.to_lowercase(), entry);
    }

    pub fn lookup(&self, agent: &AgentRef) -> Option<&ProviderEntry> {
        let keys = [
            agent.iri.as_ref().map(|i| i.as_str().to_owned()),
            agent.homepage.as_ref().map(|i| i.as_str().to_owned()),
            agent.name.clone(),
        ];
        keys.into_iter().flatten().find_map(|k| self.entries.get(&k.to_lowercase()))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommunityEntry {
    pub channels: Vec<String>,
    pub trust: Option<f64>,
    pub correctness: Option<f64>,
}

/// Discussion channels and vote averages per dataset.
#[derive(Debug, Clone, Default)]
pub struct CommunityStore {
    entries: BTreeMap<String, CommunityEntry>,
}

impl CommunityStore {
    /// Parses `dataset<TAB>channels<TAB>trust<TAB>correctness` rows. Channels
    /// are `|`-separated, averages lie in 0..5, and `-` marks a missing value.
    pub fn parse(text: &str) -> Result<Self, StoreError> {
        let mut entries = BTreeMap::new();
        for row in rows(text, 4) {
            let (line, cols) = row?;
            let avg = |s: &str| -> Result<Option<f64>, StoreError> {
                if s == "-" || s.is_empty() {
                    return Ok(None);
                }
                s.parse::<f64>()
                    .ok()
                    .filter(|v| (0.0..=5.0).contains(v))
                    .map(Some)
                    .ok_or_else(|| StoreError { line, message: format!("invalid vote average `{s}`") })
            };
            let channels = if cols[1] == "-" {
                Vec::new()
            } else {
                cols[1].split('|').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect()
            };
            entries.insert(
                cols[0].to_owned(),
                CommunityEntry {
                    channels,
                    trust: avg(cols[2])?,
                    correctness: avg(cols[3])?,
                },
            );
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, dataset: &Iri, entry: CommunityEntry) {
        self.entries.insert(dataset.to_string(), entry);
    }

    pub fn get(&self, dataset: &Iri) -> Option<&CommunityEntry> {
        self.entries.get(dataset.as_str())
    }
}

/// Other members of each dataset's duplicate cluster.
#[derive(Debug, Clone, Default)]
pub struct ClusterStore {
    others: HashMap<Iri, Vec<DatasetRecord>>,
}

impl ClusterStore {
    pub fn new(records: &[DatasetRecord], clusters: &[Vec<Iri>]) -> Self {
        let by_iri: HashMap<&Iri, &DatasetRecord> = records.iter().map(|r| (&r.iri, r)).collect();
        let mut others = HashMap::new();
        for cluster in clusters {
            for member in cluster {
                let rest = cluster
                    .iter()
                    .filter(|o| *o != member)
                    .filter_map(|o| by_iri.get(o).map(|r| (*r).clone()))
                    .collect();
                others.insert(member.clone(), rest);
            }
        }
        Self { others }
    }

    pub fn others(&self, dataset: &Iri) -> &[DatasetRecord] {
        self.others.get(dataset).map_or(&[], Vec::as_slice)
    }
}

/// Stores handed to metric evaluation. Only the license table is mandatory.
#[derive(Clone, Copy)]
pub struct ExternalStores<'a> {
    pub license_db: &'a LicenseDb,
    pub provider_db: Option<&'a ProviderStore>,
    pub community_db: Option<&'a CommunityStore>,
    pub clusters: Option<&'a ClusterStore>,
    pub url_prober: Option<&'a dyn UrlProber>,
}

impl<'a> ExternalStores<'a> {
    pub fn new(license_db: &'a LicenseDb) -> Self {
        Self {
            license_db,
            provider_db: None,
            community_db: None,
            clusters: None,
            url_prober: None,
        }
    }
}

impl std::fmt::Debug for ExternalStores<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalStores")
            .field("licenses", &self.license_db.len())
            .field("provider_db", &self.provider_db.is_some())
            .field("community_db", &self.community_db.is_some())
            .field("clusters", &self.clusters.is_some())
            .field("url_prober", &self.url_prober.is_some())
            .finish()
    }
}
