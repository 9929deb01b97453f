use std::fmt;

use serde::{Deserialize, Serialize};

use super::ntriples::{escape_iri, escape_literal};

/// Error raised when a term violates its lexical constraints.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("empty IRI")]
    EmptyIri,
    #[error("IRI `{0}` has no scheme separator")]
    MissingScheme(String),
    #[error("IRI `{0}` contains a forbidden character")]
    ForbiddenChar(String),
    #[error("invalid blank node label `{0}`")]
    BlankLabel(String),
    #[error("literal cannot carry both a language tag and a datatype")]
    LangAndDatatype,
    #[error("invalid language tag `{0}`")]
    LanguageTag(String),
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        if value.is_empty() {
            return Err(TermError::EmptyIri);
        }
        let Some(colon) = value.find(':') else {
            return Err(TermError::MissingScheme(value));
        };
        let scheme = &value[..colon];
        let scheme_ok = scheme
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
            && scheme
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
        if !scheme_ok {
            return Err(TermError::MissingScheme(value));
        }
        if value
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`'))
        {
            return Err(TermError::ForbiddenChar(value));
        }
        Ok(Self(value))
    }

    /// Builds an IRI from a compile-time constant known to be valid.
    pub(crate) fn from_static(value: &'static str) -> Self {
        debug_assert!(Iri::new(value).is_ok(), "invalid constant IRI {value}");
        Self(value.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn scheme(&self) -> &str {
        &self.0[..self.0.find(':').unwrap_or(0)]
    }

    pub fn is_http(&self) -> bool {
        let scheme = self.scheme().to_ascii_lowercase();
        scheme == "http" || scheme == "https"
    }
}

impl TryFrom<String> for Iri {
    type Error = TermError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl TryFrom<&str> for Iri {
    type Error = TermError;
    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Blank node with a document-scoped label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        let valid = !label.is_empty()
            && !label.ends_with('.')
            && label
                .chars()
                .next()
                .is_some_and(|c| c.is_alphanumeric() || c == '_')
            && label
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if valid {
            Ok(Self(label))
        } else {
            Err(TermError::BlankLabel(label))
        }
    }

    /// Deterministic label derived from arbitrary seed text, e.g. a parent IRI and a role.
    pub fn derived(parts: &[&str]) -> Self {
        Self(format!("n{}", crate::util::short_hash(&parts.join("\u{1f}"))))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

/// An RDF literal. Plain `xsd:string` literals are stored without a datatype.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    lexical: String,
    language: Option<String>,
    datatype: Option<Iri>,
}

const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            language: None,
            datatype: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, tag: &str) -> Result<Self, TermError> {
        Ok(Self {
            lexical: lexical.into(),
            language: Some(normalize_lang_tag(tag)?),
            datatype: None,
        })
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        let datatype = (datatype.as_str() != XSD_STRING).then_some(datatype);
        Self {
            lexical: lexical.into(),
            language: None,
            datatype,
        }
    }

    pub fn new(
        lexical: impl Into<String>,
        language: Option<&str>,
        datatype: Option<Iri>,
    ) -> Result<Self, TermError> {
        match (language, datatype) {
            (Some(_), Some(_)) => Err(TermError::LangAndDatatype),
            (Some(tag), None) => Self::lang(lexical, tag),
            (None, Some(dt)) => Ok(Self::typed(lexical, dt)),
            (None, None) => Ok(Self::plain(lexical)),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn with_lexical(&self, lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            ..self.clone()
        }
    }
}

/// Lowercases a BCP-47 tag after checking its basic shape.
pub fn normalize_lang_tag(tag: &str) -> Result<String, TermError> {
    let valid = !tag.is_empty()
        && tag.split('-').all(|part| {
            !part.is_empty() && part.len() <= 8 && part.chars().all(|c| c.is_ascii_alphanumeric())
        })
        && tag.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
    if valid {
        Ok(tag.to_ascii_lowercase())
    } else {
        Err(TermError::LanguageTag(tag.to_owned()))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_literal(&self.lexical))?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")?;
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^<{}>", escape_iri(dt.as_str()))?;
        }
        Ok(())
    }
}

/// Subject position: IRI or blank node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(iri) => Some(iri),
            Subject::Blank(_) => None,
        }
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

impl From<BlankNode> for Subject {
    fn from(node: BlankNode) -> Self {
        Subject::Blank(node)
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Iri(iri) => write!(f, "<{}>", escape_iri(iri.as_str())),
            Subject::Blank(node) => node.fmt(f),
        }
    }
}

/// Any RDF term in object position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    /// The term as a subject, if it can be one.
    pub fn as_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(iri) => Some(Subject::Iri(iri.clone())),
            Term::Blank(node) => Some(Subject::Blank(node.clone())),
            Term::Literal(_) => None,
        }
    }
}

impl From<Subject> for Term {
    fn from(subject: Subject) -> Self {
        match subject {
            Subject::Iri(iri) => Term::Iri(iri),
            Subject::Blank(node) => Term::Blank(node),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{}>", escape_iri(iri.as_str())),
            Term::Blank(node) => node.fmt(f),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

/// A single RDF statement; the predicate is always an IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Self {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} <{}> {} .",
            self.subject,
            escape_iri(self.predicate.as_str()),
            self.object
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_requires_scheme() {
        assert!(Iri::new("http://ex/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert_eq!(Iri::new(""), Err(TermError::EmptyIri));
        assert!(matches!(Iri::new("no-scheme"), Err(TermError::MissingScheme(_))));
        assert!(matches!(Iri::new("http://a b"), Err(TermError::ForbiddenChar(_))));
    }

    #[test]
    fn language_tags_are_lowercased() {
        let lit = Literal::lang("Titel", "DE-at").unwrap();
        assert_eq!(lit.language(), Some("de-at"));
        assert!(Literal::new("x", Some("de"), Some(Iri::new("http://ex/t").unwrap())).is_err());
    }

    #[test]
    fn xsd_string_collapses_to_plain() {
        let lit = Literal::typed("a", Iri::new(XSD_STRING).unwrap());
        assert_eq!(lit, Literal::plain("a"));
    }
}
