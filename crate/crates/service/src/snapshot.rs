use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use metacat_core::license::LicenseDb;
use metacat_core::quality::{read_dqv_all, NotComputedReason};
use metacat_core::rdf::{parse_ntriples, Iri};
use metacat_core::search::{InvertedIndex, SearchError};

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("index: {0}")]
    Index(#[from] SearchError),
}

/// Per-dataset metric scores and not-computed reasons, keyed by metric key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QualityTable {
    pub scores: BTreeMap<Iri, BTreeMap<String, u8>>,
    pub not_computed: BTreeMap<Iri, BTreeMap<String, String>>,
}

impl QualityTable {
    pub fn contains(&self, dataset: &Iri) -> bool {
        self.scores.contains_key(dataset) || self.not_computed.contains_key(dataset)
    }

    /// Reads `iri<TAB>key<TAB>reason` lines.
    pub fn add_not_computed_log(&mut self, text: &str) -> Result<(), String> {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            let [iri, key, reason] = parts[..] else {
                return Err(format!("line {}: expected three tab-separated columns", i + 1));
            };
            if NotComputedReason::ALL.iter().all(|r| r.as_str() != reason) {
                return Err(format!("line {}: unknown reason `{reason}`", i + 1));
            }
            let iri = Iri::new(iri).map_err(|e| format!("line {}: {e}", i + 1))?;
            self.not_computed.entry(iri).or_default().insert(key.to_owned(), reason.to_owned());
        }
        Ok(())
    }
}

/// Everything one request may read.
pub struct Snapshot {
    pub index: InvertedIndex,
    pub quality: QualityTable,
    pub licenses: &'static LicenseDb,
}

fn read(path: &Path) -> Result<Vec<u8>, SnapshotError> {
    fs::read(path).map_err(|source| SnapshotError::Read { path: path.to_owned(), source })
}

impl Snapshot {
    pub fn new(index: InvertedIndex, quality: QualityTable) -> Self {
        Self { index, quality, licenses: LicenseDb::bundled() }
    }

    /// Loads a pipeline output directory: `index.bin` is required,
    /// `quality.nt` and `not-computed.log` are read when present.
    pub fn load(dir: &Path, index_path: Option<&Path>) -> Result<Self, SnapshotError> {
        let index_path = index_path.map(Path::to_path_buf).unwrap_or_else(|| dir.join("index.bin"));
        let index = InvertedIndex::from_bytes(&read(&index_path)?)?;
        let mut quality = QualityTable::default();
        let dqv_path = dir.join("quality.nt");
        if dqv_path.exists() {
            let text = String::from_utf8(read(&dqv_path)?)
                .map_err(|e| SnapshotError::Parse { path: dqv_path.clone(), message: e.to_string() })?;
            let graph = parse_ntriples(&text).map_err(|e| SnapshotError::Parse { path: dqv_path.clone(), message: e.to_string() })?;
            for (iri, scores) in read_dqv_all(&graph) {
                quality.scores.insert(iri, scores.into_iter().collect());
            }
        }
        let log_path = dir.join("not-computed.log");
        if log_path.exists() {
            let text = String::from_utf8_lossy(&read(&log_path)?).into_owned();
            quality
                .add_not_computed_log(&text)
                .map_err(|message| SnapshotError::Parse { path: log_path.clone(), message })?;
        }
        Ok(Self::new(index, quality))
    }
}
