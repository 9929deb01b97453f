//! Quality analysis: 48 metrics in 13 dimensions, each scored 0 (worst) to
//! 5 (best), and their DQV representation.
//!
//! Every metric produces a raw measure (boolean, ratio or count) that
//! [`map_score`] turns into a score. Count metrics carry their own band
//! thresholds in the registry.

mod dqv;
mod formats;
mod metrics;
mod stores;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::model::DatasetRecord;
use crate::rdf::{Graph, Iri};
use crate::vocab::METRIC_BASE;

pub use dqv::{measurement_iri, read_dqv, read_dqv_all, to_dqv};
pub use formats::{format_traits, FormatTraits};
pub use metrics::TRACKED_FIELDS;
pub use stores::{
    ClusterStore, CommunityEntry, CommunityStore, ExternalStores, ProviderEntry, ProviderStore, StoreError, UrlProber,
};
pub use text::{flesch_reading_ease, syllables, text_language, NotApplicable, TextLanguage, WordList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Expressiveness,
    Temporal,
    Understandability,
    Rights,
    Trust,
    Community,
    Versatility,
    Representation,
    Linking,
    Reachability,
    Access,
    Versioning,
    Data,
}

impl Dimension {
    /// German name used in the criteria catalog.
    pub fn label(self) -> &'static str {
        match self {
            Dimension::Expressiveness => "Ausdruckskraft",
            Dimension::Temporal => "Zeitlich",
            Dimension::Understandability => "Verständlichkeit",
            Dimension::Rights => "Rechte",
            Dimension::Trust => "Vertrauen",
            Dimension::Community => "Community",
            Dimension::Versatility => "Vielseitigkeit",
            Dimension::Representation => "Repräsentation",
            Dimension::Linking => "Verknüpfung",
            Dimension::Reachability => "Erreichbarkeit",
            Dimension::Access => "Zugriff",
            Dimension::Versioning => "Versionierung",
            Dimension::Data => "Daten",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    MetadataOnly,
    LongRunning,
    ExternalStore,
}

/// Count thresholds: the score is the number of thresholds the count reaches.
pub type Bands = [u64; 5];

pub const DEFAULT_BANDS: Bands = [1, 2, 3, 4, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricDescriptor {
    pub id: u8,
    pub key: &'static str,
    pub dimension: Dimension,
    pub tier: Tier,
    pub bands: Bands,
    /// Signal and score mapping in one line.
    pub rule: &'static str,
}

impl MetricDescriptor {
    pub fn metric_iri(&self) -> Iri {
        metric_iri(self.key)
    }
}

pub fn metric_iri(key: &str) -> Iri {
    Iri::new(format!("{METRIC_BASE}{key}")).expect("metric keys are IRI-safe")
}

/// Raw measure before score mapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Raw {
    Boolean(bool),
    Ratio(f64),
    Count(u64),
}

/// Boolean to {0, 5}; ratio r to floor(5r + 0.5) clamped to 0..=5; count to
/// the number of band thresholds it reaches.
pub fn map_score(raw: Raw, bands: &Bands) -> u8 {
    match raw {
        Raw::Boolean(b) => {
            if b {
                5
            } else {
                0
            }
        }
        Raw::Ratio(r) => (5.0 * r + 0.5).floor().clamp(0.0, 5.0) as u8,
        Raw::Count(n) => bands.iter().filter(|&&t| n >= t).count() as u8,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotComputedReason {
    SkippedLongRunning,
    StoreUnavailable,
    EvaluationError,
    NotApplicable,
}

impl NotComputedReason {
    pub const ALL: [NotComputedReason; 4] = [
        NotComputedReason::SkippedLongRunning,
        NotComputedReason::StoreUnavailable,
        NotComputedReason::EvaluationError,
        NotComputedReason::NotApplicable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NotComputedReason::SkippedLongRunning => "skipped_long_running",
            NotComputedReason::StoreUnavailable => "store_unavailable",
            NotComputedReason::EvaluationError => "evaluation_error",
            NotComputedReason::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for NotComputedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Score(u8),
    NotComputed(NotComputedReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricResult {
    pub id: u8,
    pub metric: String,
    pub outcome: Outcome,
}

impl MetricResult {
    pub fn score(&self) -> Option<u8> {
        match self.outcome {
            Outcome::Score(s) => Some(s),
            Outcome::NotComputed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QualityError {
    #[error("metric id {0} is outside 1..=48")]
    UnknownMetric(u8),
    #[error("weight for `{0}` is negative or not finite")]
    InvalidWeight(String),
    #[error("all weights are zero")]
    ZeroWeights,
    #[error("`{0}` is not a tracked field")]
    UnknownWeightKey(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityConfig {
    pub include_long_running: bool,
    pub log_if_not_computed: bool,
    pub remove_measurements: bool,
    pub evaluation_time: DateTime<Utc>,
    /// Per tracked field; absent fields weigh zero. `None` means uniform.
    pub weights: Option<BTreeMap<String, f64>>,
    pub min_description_words: usize,
}

impl QualityConfig {
    pub fn at(evaluation_time: DateTime<Utc>) -> Self {
        Self {
            include_long_running: false,
            log_if_not_computed: true,
            remove_measurements: true,
            evaluation_time,
            weights: None,
            min_description_words: 10,
        }
    }

    pub fn validate(&self) -> Result<(), QualityError> {
        if let Some(weights) = &self.weights {
            for (key, w) in weights {
                if !TRACKED_FIELDS.contains(&key.as_str()) {
                    return Err(QualityError::UnknownWeightKey(key.clone()));
                }
                if !w.is_finite() || *w < 0.0 {
                    return Err(QualityError::InvalidWeight(key.clone()));
                }
            }
            if weights.values().all(|w| *w == 0.0) {
                return Err(QualityError::ZeroWeights);
            }
        }
        Ok(())
    }
}

/// One line per metric that could not be computed; appends are serialized.
#[derive(Debug, Default)]
pub struct NotComputedLog {
    lines: Mutex<Vec<String>>,
}

impl NotComputedLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&self, dataset: &Iri, key: &str, reason: NotComputedReason) {
        let line = format!("{dataset}\t{key}\t{reason}");
        self.lines.lock().unwrap_or_else(|e| e.into_inner()).push(line);
    }

    pub fn lines(&self) -> Vec<String> {
        self.lines.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn len(&self) -> usize {
        self.lines.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn registry() -> &'static [MetricDescriptor] {
    &metrics::REGISTRY
}

pub fn descriptor(id: u8) -> Option<&'static MetricDescriptor> {
    registry().get(usize::from(id).checked_sub(1)?)
}

pub fn descriptor_by_key(key: &str) -> Option<&'static MetricDescriptor> {
    registry().iter().find(|d| d.key == key)
}

/// Evaluates one metric. Failures inside a metric, including panics, become
/// `NotComputed(EvaluationError)`.
pub fn evaluate_metric(
    id: u8,
    record: &DatasetRecord,
    slice: &Graph,
    config: &QualityConfig,
    stores: &ExternalStores<'_>,
) -> Result<MetricResult, QualityError> {
    let desc = descriptor(id).ok_or(QualityError::UnknownMetric(id))?;
    let outcome = if desc.tier == Tier::LongRunning && !config.include_long_running {
        Outcome::NotComputed(NotComputedReason::SkippedLongRunning)
    } else {
        let ctx = metrics::Ctx {
            record,
            slice,
            config,
            stores,
        };
        match catch_unwind(AssertUnwindSafe(|| metrics::measure(id, &ctx))) {
            Ok(Ok(Raw::Ratio(r))) if !r.is_finite() => Outcome::NotComputed(NotComputedReason::EvaluationError),
            Ok(Ok(raw)) => Outcome::Score(map_score(raw, &desc.bands)),
            Ok(Err(reason)) => Outcome::NotComputed(reason),
            Err(_) => Outcome::NotComputed(NotComputedReason::EvaluationError),
        }
    };
    Ok(MetricResult {
        id,
        metric: desc.key.to_owned(),
        outcome,
    })
}

/// All 48 metrics in id order.
pub fn evaluate_all(
    record: &DatasetRecord,
    slice: &Graph,
    config: &QualityConfig,
    stores: &ExternalStores<'_>,
    log: &NotComputedLog,
) -> Vec<MetricResult> {
    let results: Vec<MetricResult> = (1..=48)
        .map(|id| evaluate_metric(id, record, slice, config, stores).expect("ids 1..=48 exist"))
        .collect();
    if config.log_if_not_computed {
        for r in &results {
            if let Outcome::NotComputed(reason) = r.outcome {
                log.append(&record.iri, &r.metric, reason);
            }
        }
    }
    results
}

/// `metric-key<TAB>score` lines for scored results.
/// Mean of the computed scores, rounded to two decimals.
pub fn aggregate_score(results: &[MetricResult]) -> Option<f64> {
    let scores: Vec<f64> = results.iter().filter_map(|r| r.score()).map(f64::from).collect();
    if scores.is_empty() {
        return None;
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Some((mean * 100.0).round() / 100.0)
}

pub fn golden_lines(results: &[MetricResult]) -> String {
    let mut out = String::new();
    for r in results {
        let value = match r.outcome {
            Outcome::Score(s) => s.to_string(),
            Outcome::NotComputed(reason) => reason.to_string(),
        };
        out.push_str(&format!("{}\t{}\n", r.metric, value));
    }
    out
}
