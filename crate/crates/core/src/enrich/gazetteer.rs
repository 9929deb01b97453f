use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use crate::model::{valid_coordinates, DatasetRecord, GeoAnnotation, GeoLevel};
use crate::rdf::Iri;
use crate::vocab::PLACE_BASE;

const BUNDLED: &str = include_str!("../../data/gazetteer-de.tsv");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GazetteerError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("duplicate entry id `{0}`")]
    DuplicateId(String),
    #[error("entry `{id}` refers to missing parent `{parent}`")]
    MissingParent { id: String, parent: String },
    #[error("entry `{id}` is not finer than its parent `{parent}`")]
    LevelOrder { id: String, parent: String },
    #[error("entry `{0}` has coordinates out of range")]
    Coordinates(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GazetteerEntry {
    pub id: String,
    pub name: String,
    pub level: GeoLevel,
    pub parent: Option<String>,
    pub lat: f64,
    pub lon: f64,
    pub population: Option<u64>,
}

impl GazetteerEntry {
    pub fn place_iri(&self) -> Iri {
        Iri::new(format!("{PLACE_BASE}{}", self.id)).expect("gazetteer ids are IRI-safe")
    }

    pub fn annotation(&self) -> GeoAnnotation {
        GeoAnnotation {
            place_iri: Some(self.place_iri()),
            place_name: self.name.clone(),
            level: self.level,
            lat: self.lat,
            lon: self.lon,
        }
    }
}

/// A match of a gazetteer name in normalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaceMatch {
    pub entry: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    names: Vec<String>,
    /// First word of a normalized name to candidate entries, longest name
    /// first, then by the ambiguity order.
    by_first_word: HashMap<String, Vec<usize>>,
}

/// Lowercases and collapses whitespace runs to single spaces.
fn normalize(text: &str) -> String {
    text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn first_word(s: &str) -> &str {
    let end = s.find(|c: char| !c.is_alphanumeric()).unwrap_or(s.len());
    &s[..end]
}

impl Gazetteer {
    /// Parses `id, name, level, parent, lat, lon, population` TSV lines.
    /// A leading `id` header and `#` comment lines are skipped; parent and
    /// population may be empty.
    pub fn parse(text: &str) -> Result<Self, GazetteerError> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') || line.starts_with("id\t") {
                continue;
            }
            let err = |message: String| GazetteerError::Syntax { line: line_no, message };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 7 {
                return Err(err(format!("expected 7 columns, found {}", cols.len())));
            }
            let number = |i: usize, what: &str| -> Result<f64, GazetteerError> {
                cols[i].parse().map_err(|_| err(format!("invalid {what} `{}`", cols[i])))
            };
            entries.push(GazetteerEntry {
                id: cols[0].to_owned(),
                name: cols[1].to_owned(),
                level: cols[2].parse().map_err(err)?,
                parent: (!cols[3].is_empty()).then(|| cols[3].to_owned()),
                lat: number(4, "latitude")?,
                lon: number(5, "longitude")?,
                population: if cols[6].is_empty() {
                    None
                } else {
                    Some(cols[6].parse().map_err(|_| err(format!("invalid population `{}`", cols[6])))?)
                },
            });
        }
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<GazetteerEntry>) -> Result<Self, GazetteerError> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if ids.insert(e.id.as_str(), i).is_some() {
                return Err(GazetteerError::DuplicateId(e.id.clone()));
            }
            if Iri::new(format!("{PLACE_BASE}{}", e.id)).is_err() {
                return Err(GazetteerError::Syntax {
                    line: 0,
                    message: format!("id `{}` is not IRI-safe", e.id),
                });
            }
            if !valid_coordinates(e.lat, e.lon) {
                return Err(GazetteerError::Coordinates(e.id.clone()));
            }
        }
        for e in &entries {
            if let Some(parent) = &e.parent {
                let Some(&p) = ids.get(parent.as_str()) else {
                    return Err(GazetteerError::MissingParent {
                        id: e.id.clone(),
                        parent: parent.clone(),
                    });
                };
                if entries[p].level >= e.level {
                    return Err(GazetteerError::LevelOrder {
                        id: e.id.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }

        let names: Vec<String> = entries.iter().map(|e| normalize(&e.name)).collect();
        let mut by_first_word: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            let word = first_word(name);
            if !word.is_empty() {
                by_first_word.entry(word.to_owned()).or_default().push(i);
            }
        }
        for candidates in by_first_word.values_mut() {
            candidates.sort_by(|&a, &b| {
                names[b]
                    .len()
                    .cmp(&names[a].len())
                    .then_with(|| entries[a].level.cmp(&entries[b].level))
                    .then_with(|| entries[b].population.cmp(&entries[a].population))
                    .then_with(|| entries[a].id.cmp(&entries[b].id))
            });
        }
        Ok(Self {
            entries,
            names,
            by_first_word,
        })
    }

    pub fn bundled() -> &'static Self {
        static GAZ: OnceLock<Gazetteer> = OnceLock::new();
        GAZ.get_or_init(|| Self::parse(BUNDLED).expect("bundled gazetteer is valid"))
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&GazetteerEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Leftmost-longest, non-overlapping, case-insensitive matches on word
    /// boundaries. Offsets refer to the normalized text. When several entries
    /// share the matched name the coarsest level wins, then the larger
    /// population, then the smaller id.
    pub fn find(&self, text: &str) -> Vec<PlaceMatch> {
        let norm = normalize(text);
        let mut out = Vec::new();
        let mut pos = 0;
        let mut prev_alnum = false;
        for (i, c) in norm.char_indices() {
            let alnum = c.is_alphanumeric();
            let word_start = alnum && !prev_alnum;
            prev_alnum = alnum;
            if !word_start || i < pos {
                continue;
            }
            let rest = &norm[i..];
            let Some(candidates) = self.by_first_word.get(first_word(rest)) else {
                continue;
            };
            let hit = candidates.iter().find(|&&e| {
                let name = &self.names[e];
                rest.starts_with(name.as_str())
                    && rest[name.len()..].chars().next().is_none_or(|c| !c.is_alphanumeric())
            });
            if let Some(&entry) = hit {
                let end = i + self.names[entry].len();
                out.push(PlaceMatch { entry, start: i, end });
                pos = end;
            }
        }
        out
    }

    pub fn entry(&self, m: &PlaceMatch) -> &GazetteerEntry {
        &self.entries[m.entry]
    }
}

/// Appends one annotation per distinct place found in titles, descriptions
/// and keywords. Existing spatial values are kept.
pub fn annotate_places(record: &DatasetRecord, gaz: &Gazetteer) -> DatasetRecord {
    let mut out = record.clone();
    let mut known: HashSet<Iri> = out.spatial.iter().filter_map(|g| g.place_iri.clone()).collect();
    let texts = record
        .titles
        .iter()
        .chain(&record.descriptions)
        .chain(&record.keywords)
        .map(|s| s.value.as_str());
    for text in texts {
        for m in gaz.find(text) {
            let entry = gaz.entry(&m);
            if known.insert(entry.place_iri()) {
                out.spatial.push(entry.annotation());
            }
        }
    }
    out
}
