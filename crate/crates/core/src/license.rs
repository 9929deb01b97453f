//! Attribute-based license model and the combination algebra.
//!
//! Combining datasets intersects permissions and unions duties and
//! prohibitions. A share-alike duty pins the combination to that exact
//! license, so two different share-alike licenses cannot be combined, and a
//! pinned license whose permissions are prohibited by another input cannot
//! be honored either.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::rdf::Iri;

const BUNDLED: &str = include_str!("../data/licenses.tsv");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LicenseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("license `{0}` both permits and prohibits the same action")]
    Contradiction(Iri),
    #[error("duplicate license `{0}`")]
    Duplicate(Iri),
    #[error("at least one license is required")]
    EmptyInput,
}

macro_rules! attribute_enum {
    ($name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name { $($variant),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),* }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s { $($text => Ok($name::$variant),)* other => Err(format!("unknown {} `{other}`", stringify!($name))) }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

attribute_enum!(Permission {
    CommercialUse => "commercial_use",
    Modification => "modification",
    Distribution => "distribution",
    Sublicensing => "sublicensing",
});

attribute_enum!(Duty {
    Attribution => "attribution",
    ShareAlike => "share_alike",
    NoticePreservation => "notice_preservation",
});

attribute_enum!(Prohibition {
    CommercialUse => "commercial_use",
    Modification => "modification",
});

impl Prohibition {
    /// The permission this prohibition withholds.
    pub fn permission(self) -> Permission {
        match self {
            Prohibition::CommercialUse => Permission::CommercialUse,
            Prohibition::Modification => Permission::Modification,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseSpec {
    pub id: Iri,
    pub name: String,
    pub permissions: BTreeSet<Permission>,
    pub duties: BTreeSet<Duty>,
    pub prohibitions: BTreeSet<Prohibition>,
    pub open: bool,
    pub known: bool,
}

impl LicenseSpec {
    /// Placeholder for an IRI missing from the database.
    pub fn unknown(id: Iri) -> Self {
        Self {
            name: id.to_string(),
            id,
            permissions: BTreeSet::new(),
            duties: BTreeSet::new(),
            prohibitions: BTreeSet::new(),
            open: false,
            known: false,
        }
    }

    pub fn is_share_alike(&self) -> bool {
        self.duties.contains(&Duty::ShareAlike)
    }

    /// No duties and nothing withheld.
    pub fn is_public_domain(&self) -> bool {
        self.known && self.duties.is_empty() && self.prohibitions.is_empty() && self.permissions.len() == Permission::ALL.len()
    }

    fn validate(&self) -> Result<(), LicenseError> {
        if self.prohibitions.iter().any(|p| self.permissions.contains(&p.permission())) {
            return Err(LicenseError::Contradiction(self.id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeTerms {
    pub permissions: BTreeSet<Permission>,
    pub duties: BTreeSet<Duty>,
    pub prohibitions: BTreeSet<Prohibition>,
    pub share_alike_pins: BTreeSet<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictKind {
    ShareAlikeClash,
    PermissionProhibitionClash,
    UnknownLicense,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub kind: ConflictKind,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub compatible: bool,
    pub conflicts: Vec<Conflict>,
}

/// Combined terms of a set of licenses. Duplicate inputs are irrelevant.
pub fn compose(inputs: &[LicenseSpec]) -> Result<CompositeTerms, LicenseError> {
    let (first, rest) = inputs.split_first().ok_or(LicenseError::EmptyInput)?;
    let mut terms = CompositeTerms {
        permissions: first.permissions.clone(),
        duties: first.duties.clone(),
        prohibitions: first.prohibitions.clone(),
        share_alike_pins: BTreeSet::new(),
    };
    for l in rest {
        terms.permissions.retain(|p| l.permissions.contains(p));
        terms.duties.extend(&l.duties);
        terms.prohibitions.extend(&l.prohibitions);
    }
    terms.share_alike_pins = inputs.iter().filter(|l| l.is_share_alike()).map(|l| l.id.clone()).collect();
    Ok(terms)
}

pub fn check_compatibility(inputs: &[LicenseSpec]) -> Result<Verdict, LicenseError> {
    let terms = compose(inputs)?;
    let mut conflicts = Vec::new();
    let unknown: BTreeSet<&Iri> = inputs.iter().filter(|l| !l.known).map(|l| &l.id).collect();
    for id in unknown {
        conflicts.push(Conflict {
            kind: ConflictKind::UnknownLicense,
            details: format!("{id} is not in the license database"),
        });
    }
    if terms.share_alike_pins.len() > 1 {
        let ids: Vec<&str> = terms.share_alike_pins.iter().map(Iri::as_str).collect();
        conflicts.push(Conflict {
            kind: ConflictKind::ShareAlikeClash,
            details: format!("share-alike licenses {} each require their own terms", ids.join(", ")),
        });
    }
    let mut seen = BTreeSet::new();
    for pin in inputs.iter().filter(|l| l.is_share_alike()) {
        if !seen.insert(&pin.id) {
            continue;
        }
        for p in &terms.prohibitions {
            if pin.permissions.contains(&p.permission()) {
                conflicts.push(Conflict {
                    kind: ConflictKind::PermissionProhibitionClash,
                    details: format!("{} requires {} which another input prohibits", pin.id, p.permission()),
                });
            }
        }
    }
    Ok(Verdict {
        compatible: conflicts.is_empty(),
        conflicts,
    })
}

/// Licenses from `db` under which the combination may be published: no
/// broader permissions, at least the same duties and prohibitions, and the
/// pinned share-alike license if there is one. Ordered by id.
pub fn relicensing_candidates(inputs: &[LicenseSpec], db: &[LicenseSpec]) -> Vec<LicenseSpec> {
    let Ok(verdict) = check_compatibility(inputs) else {
        return Vec::new();
    };
    if !verdict.compatible {
        return Vec::new();
    }
    let terms = compose(inputs).expect("non-empty inputs");
    let mut out: Vec<LicenseSpec> = db
        .iter()
        .filter(|l| {
            l.known
                && l.permissions.is_subset(&terms.permissions)
                && l.duties.is_superset(&terms.duties)
                && l.prohibitions.is_superset(&terms.prohibitions)
                && terms.share_alike_pins.iter().all(|pin| &l.id == pin)
        })
        .cloned()
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out.dedup_by(|a, b| a.id == b.id);
    out
}

/// Loose key so that `http`/`https` and a trailing slash do not matter.
fn lookup_key(iri: &str) -> String {
    let rest = iri.split_once("://").map_or(iri, |(_, rest)| rest);
    rest.trim_end_matches('/').to_ascii_lowercase()
}

#[derive(Debug, Clone, Default)]
pub struct LicenseDb {
    licenses: Vec<LicenseSpec>,
    by_key: BTreeMap<String, usize>,
}

impl LicenseDb {
    /// Parses `id, name, open, permissions, duties, prohibitions` TSV rows.
    pub fn parse(text: &str) -> Result<Self, LicenseError> {
        let mut licenses = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') || line.starts_with("id\t") {
                continue;
            }
            let err = |message: String| LicenseError::Syntax { line: idx + 1, message };
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 6 {
                return Err(err(format!("expected 6 columns, found {}", cols.len())));
            }
            let id = Iri::new(cols[0]).map_err(|e| err(e.to_string()))?;
            let open = cols[2].parse::<bool>().map_err(|_| err(format!("invalid flag `{}`", cols[2])))?;
            licenses.push(LicenseSpec {
                id,
                name: cols[1].to_owned(),
                permissions: parse_list(cols[3]).map_err(err)?,
                duties: parse_list(cols[4]).map_err(err)?,
                prohibitions: parse_list(cols[5]).map_err(err)?,
                open,
                known: true,
            });
        }
        Self::from_licenses(licenses)
    }

    pub fn from_licenses(licenses: Vec<LicenseSpec>) -> Result<Self, LicenseError> {
        let mut by_key = BTreeMap::new();
        for (i, l) in licenses.iter().enumerate() {
            l.validate()?;
            if by_key.insert(lookup_key(l.id.as_str()), i).is_some() {
                return Err(LicenseError::Duplicate(l.id.clone()));
            }
        }
        Ok(Self { licenses, by_key })
    }

    pub fn bundled() -> &'static Self {
        static DB: OnceLock<LicenseDb> = OnceLock::new();
        DB.get_or_init(|| Self::parse(BUNDLED).expect("bundled license table is valid"))
    }

    pub fn licenses(&self) -> &[LicenseSpec] {
        &self.licenses
    }

    pub fn len(&self) -> usize {
        self.licenses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.licenses.is_empty()
    }

    pub fn get(&self, iri: &Iri) -> Option<&LicenseSpec> {
        self.by_key.get(&lookup_key(iri.as_str())).map(|&i| &self.licenses[i])
    }

    /// The database entry, or an unknown placeholder.
    pub fn resolve(&self, iri: &Iri) -> LicenseSpec {
        self.get(iri).cloned().unwrap_or_else(|| LicenseSpec::unknown(iri.clone()))
    }
}

fn parse_list<T: FromStr<Err = String> + Ord>(field: &str) -> Result<BTreeSet<T>, String> {
    if field.is_empty() || field == "-" {
        return Ok(BTreeSet::new());
    }
    field.split('|').map(|s| s.trim().parse()).collect()
}
