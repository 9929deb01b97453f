use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use metacat_core::clean::CleanConfig;
use metacat_core::enrich::DEFAULT_LANGUAGE_THRESHOLD;
use metacat_core::quality::TRACKED_FIELDS;
use metacat_core::rdf::Iri;

use crate::CliError;

pub const DEFAULT_DEDUP_THRESHOLD: f64 = 0.9;
pub const DEFAULT_PORT: u16 = 8080;

const KNOWN_KEYS: &[&str] = &[
    "io.input",
    "io.output",
    "catfish.enabled",
    "catfish.languages",
    "catfish.removeEmpty",
    "catfish.normalizeFormats",
    "catfish.catalogId",
    "refine.languageTags",
    "refine.languageThreshold",
    "refine.places",
    "civet.enabled",
    "civet.includeLongRunning",
    "civet.logIfNotComputed",
    "civet.removeMeasurements",
    "civet.minDescriptionWords",
    "civet.weights",
    "civet.providers",
    "civet.community",
    "dedup.enabled",
    "dedup.threshold",
    "index.output",
    "index.synonyms",
    "service.port",
    "service.cors_origin",
];

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub clean_enabled: bool,
    pub clean: CleanConfig,
    pub language_tags: bool,
    pub language_threshold: f64,
    pub places: bool,
    pub quality_enabled: bool,
    pub include_long_running: bool,
    pub log_if_not_computed: bool,
    pub remove_measurements: bool,
    pub min_description_words: usize,
    pub weights: Option<BTreeMap<String, f64>>,
    pub providers: Option<PathBuf>,
    pub community: Option<PathBuf>,
    pub dedup_enabled: bool,
    pub dedup_threshold: f64,
    pub index_output: PathBuf,
    pub synonyms: Option<PathBuf>,
    pub port: u16,
    pub cors_origin: Option<String>,
    /// Keys present in the file but not understood.
    pub unknown_keys: Vec<String>,
}

struct Props {
    values: HashMap<String, String>,
    base: PathBuf,
}

fn config_error(key: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{key}`: {message}"))
}

impl Props {
    fn text(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|v| v.trim()).filter(|v| !v.is_empty())
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.text(key) {
            None => Ok(default),
            Some("true" | "yes" | "on") => Ok(true),
            Some("false" | "no" | "off") => Ok(false),
            Some(other) => Err(config_error(key, format!("expected true or false, got `{other}`"))),
        }
    }

    fn number<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.text(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| config_error(key, format!("`{v}` is not a valid number"))),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.text(key).map(|v| self.base.join(v))
    }

    fn required_path(&self, key: &str) -> Result<PathBuf, CliError> {
        self.path(key).ok_or_else(|| config_error(key, "required key is missing"))
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
        let values = java_properties::read(BufReader::new(file))
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_props(Props { values, base })
    }

    /// Parses properties text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let values = java_properties::read(text.as_bytes()).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_props(Props { values, base: base.to_path_buf() })
    }

    fn from_props(p: Props) -> Result<Self, CliError> {
        let input = p.required_path("io.input")?;
        let output = p.required_path("io.output")?;

        let mut clean = CleanConfig {
            remove_empty: p.flag("catfish.removeEmpty", true)?,
            normalize_formats: p.flag("catfish.normalizeFormats", true)?,
            ..CleanConfig::default()
        };
        if let Some(langs) = p.text("catfish.languages") {
            clean.allowed_languages = langs
                .split(',')
                .map(|l| metacat_core::rdf::normalize_lang_tag(l.trim()))
                .collect::<Result<BTreeSet<_>, _>>()
                .map_err(|e| config_error("catfish.languages", e))?;
        }
        if let Some(id) = p.text("catfish.catalogId") {
            clean.catalog_id = Some(Iri::new(id).map_err(|e| config_error("catfish.catalogId", e))?);
        }

        let language_threshold = p.number("refine.languageThreshold", DEFAULT_LANGUAGE_THRESHOLD)?;
        if !(language_threshold > 0.0 && language_threshold <= 1.0) {
            return Err(config_error("refine.languageThreshold", "must lie in (0, 1]"));
        }
        let dedup_threshold = p.number("dedup.threshold", DEFAULT_DEDUP_THRESHOLD)?;
        if !(dedup_threshold > 0.0 && dedup_threshold <= 1.0) {
            return Err(config_error("dedup.threshold", "must lie in (0, 1]"));
        }

        let weights = match p.text("civet.weights") {
            None => None,
            Some(text) => Some(parse_weights(text)?),
        };

        let mut unknown_keys: Vec<String> =
            p.values.keys().filter(|k| !KNOWN_KEYS.contains(&k.as_str())).cloned().collect();
        unknown_keys.sort();

        Ok(Self {
            index_output: p.path("index.output").unwrap_or_else(|| output.join("index.bin")),
            input,
            output,
            clean_enabled: p.flag("catfish.enabled", true)?,
            clean,
            language_tags: p.flag("refine.languageTags", true)?,
            language_threshold,
            places: p.flag("refine.places", true)?,
            quality_enabled: p.flag("civet.enabled", true)?,
            include_long_running: p.flag("civet.includeLongRunning", false)?,
            log_if_not_computed: p.flag("civet.logIfNotComputed", true)?,
            remove_measurements: p.flag("civet.removeMeasurements", true)?,
            min_description_words: p.number("civet.minDescriptionWords", 10)?,
            weights,
            providers: p.path("civet.providers"),
            community: p.path("civet.community"),
            dedup_enabled: p.flag("dedup.enabled", true)?,
            dedup_threshold,
            synonyms: p.path("index.synonyms"),
            port: p.number("service.port", DEFAULT_PORT)?,
            cors_origin: p.text("service.cors_origin").map(str::to_owned),
            unknown_keys,
        })
    }

    /// Points every output at `dir`, keeping a custom index file name.
    pub fn redirect_output(&mut self, dir: &Path) {
        if self.index_output == self.output.join("index.bin") {
            self.index_output = dir.join("index.bin");
        }
        self.output = dir.to_path_buf();
    }
}

/// `field:weight,field:weight`.
fn parse_weights(text: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (field, weight) = part
            .split_once(':')
            .ok_or_else(|| config_error("civet.weights", format!("`{part}` is not field:weight")))?;
        let field = field.trim();
        if !TRACKED_FIELDS.contains(&field) {
            return Err(config_error("civet.weights", format!("`{field}` is not a tracked field")));
        }
        let weight: f64 =
            weight.trim().parse().map_err(|_| config_error("civet.weights", format!("`{weight}` is not a number")))?;
        out.insert(field.to_owned(), weight);
    }
    Ok(out)
}
