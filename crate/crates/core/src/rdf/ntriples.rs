//! Line-oriented N-Triples reader and writer.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;

use super::graph::Graph;
use super::term::{BlankNode, Iri, Literal, Subject, Term, Triple};

/// Syntax error with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses an N-Triples document. Blank node labels are kept as written.
pub fn parse_ntriples(text: &str) -> Result<Graph, ParseError> {
    parse_ntriples_doc(text, None)
}

/// Parses an N-Triples document, skolemizing blank node labels against
/// `doc_id` so that labels from different documents never collide.
pub fn parse_ntriples_doc(text: &str, doc_id: Option<&str>) -> Result<Graph, ParseError> {
    let mut blanks = BlankScope::new(doc_id);
    let mut graph = Graph::new();
    for (idx, line) in text.lines().enumerate() {
        let mut sc = Scanner::new(line, idx + 1);
        sc.skip_ws();
        if sc.at_end() || sc.peek() == Some('#') {
            continue;
        }
        let subject = match sc.peek() {
            Some('<') => Subject::Iri(sc.iri_ref()?),
            Some('_') => Subject::Blank(blanks.get(&sc.blank_label()?)),
            _ => return Err(sc.error("expected subject IRI or blank node")),
        };
        sc.skip_ws();
        if sc.peek() != Some('<') {
            return Err(sc.error("expected predicate IRI"));
        }
        let predicate = sc.iri_ref()?;
        sc.skip_ws();
        let object = match sc.peek() {
            Some('<') => Term::Iri(sc.iri_ref()?),
            Some('_') => Term::Blank(blanks.get(&sc.blank_label()?)),
            Some('"') => Term::Literal(sc.literal(|sc| {
                if sc.peek() == Some('<') {
                    sc.iri_ref()
                } else {
                    Err(sc.error("expected datatype IRI"))
                }
            })?),
            _ => return Err(sc.error("expected object term")),
        };
        sc.skip_ws();
        if !sc.eat('.') {
            return Err(sc.error("expected `.` at end of statement"));
        }
        sc.skip_ws();
        if !(sc.at_end() || sc.peek() == Some('#')) {
            return Err(sc.error("trailing content after `.`"));
        }
        graph.insert(Triple {
            subject,
            predicate,
            object,
        });
    }
    Ok(graph)
}

/// Serializes a graph as N-Triples, one statement per line in graph order.
pub fn write_ntriples(graph: &Graph) -> String {
    let mut out = String::with_capacity(graph.len() * 96);
    for triple in graph {
        let _ = writeln!(out, "{triple}");
    }
    out
}

pub fn write_ntriples_to(graph: &Graph, mut sink: impl io::Write) -> io::Result<()> {
    for triple in graph {
        writeln!(sink, "{triple}")?;
    }
    Ok(())
}

pub(crate) fn escape_iri(iri: &str) -> &str {
    // Iri rejects every character that would need escaping.
    iri
}

pub(crate) fn escape_literal(text: &str) -> Cow<'_, str> {
    if !text.contains(['"', '\\', '\n', '\r']) {
        return Cow::Borrowed(text);
    }
    let mut out = String::with_capacity(text.len() + 8);
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    Cow::Owned(out)
}

/// Maps document-local blank labels to skolemized labels.
pub(crate) struct BlankScope {
    prefix: Option<String>,
    seen: HashMap<String, BlankNode>,
    fresh: usize,
}

impl BlankScope {
    pub(crate) fn new(doc_id: Option<&str>) -> Self {
        Self {
            prefix: doc_id.map(|id| format!("d{}", crate::util::short_hash(id))),
            seen: HashMap::new(),
            fresh: 0,
        }
    }

    pub(crate) fn get(&mut self, local: &str) -> BlankNode {
        if let Some(node) = self.seen.get(local) {
            return node.clone();
        }
        let label = match &self.prefix {
            Some(prefix) => format!("{prefix}_{local}"),
            None => local.to_owned(),
        };
        // Labels were validated by the scanner, so the prefixed form is valid too.
        let node = BlankNode::new(label).expect("scanner validated blank label");
        self.seen.insert(local.to_owned(), node.clone());
        node
    }

    /// A blank node for an anonymous `[]` construct.
    pub(crate) fn fresh(&mut self) -> BlankNode {
        loop {
            self.fresh += 1;
            let local = format!("anon{}", self.fresh);
            if !self.seen.contains_key(&local) {
                return self.get(&local);
            }
        }
    }
}

/// Character scanner shared by the N-Triples and Turtle readers.
pub(crate) struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Scanner<'a> {
    pub(crate) fn new(src: &'a str, line: usize) -> Self {
        Self {
            src,
            pos: 0,
            line,
            line_start: 0,
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.src[self.line_start..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn peek_str(&self, prefix: &str) -> bool {
        self.src[self.pos..].starts_with(prefix)
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.line_start = self.pos;
        }
        Some(c)
    }

    pub(crate) fn advance(&mut self, bytes: usize) {
        let target = self.pos + bytes;
        while self.pos < target {
            self.bump();
        }
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            self.bump();
        }
    }

    /// Skips whitespace and `#` comments.
    pub(crate) fn skip_ws_comments(&mut self) {
        loop {
            self.skip_ws();
            if self.peek() == Some('#') {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// `<...>` with `\u`/`\U` escapes.
    pub(crate) fn iri_ref(&mut self) -> Result<Iri, ParseError> {
        let raw = self.iri_ref_raw()?;
        Iri::new(raw).map_err(|e| self.error(e.to_string()))
    }

    pub(crate) fn iri_ref_raw(&mut self) -> Result<String, ParseError> {
        if !self.eat('<') {
            return Err(self.error("expected `<`"));
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) => value.push(c),
            }
        }
        Ok(value)
    }

    fn unicode_escape(&mut self) -> Result<char, ParseError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape in IRI")),
        };
        self.hex_char(len)
    }

    fn hex_char(&mut self, len: usize) -> Result<char, ParseError> {
        let digits = self
            .src
            .get(self.pos..self.pos + len)
            .ok_or_else(|| self.error("truncated unicode escape"))?;
        let code = u32::from_str_radix(digits, 16).map_err(|_| self.error("invalid hex digits"))?;
        let c = char::from_u32(code).ok_or_else(|| self.error("invalid code point"))?;
        self.advance(len);
        Ok(c)
    }

    pub(crate) fn blank_label(&mut self) -> Result<String, ParseError> {
        if !self.peek_str("_:") {
            return Err(self.error("expected `_:`"));
        }
        self.advance(2);
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-') {
                self.bump();
            } else if c == '.' {
                // A dot is part of the label only when another name char follows.
                let next = self.src[self.pos + 1..].chars().next();
                if next.is_some_and(|n| n.is_alphanumeric() || matches!(n, '_' | '-')) {
                    self.bump();
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        let label = &self.src[start..self.pos];
        if label.is_empty() {
            return Err(self.error("empty blank node label"));
        }
        Ok(label.to_owned())
    }

    /// A quoted string: `"..."`, or in Turtle also `'...'` and the long forms.
    pub(crate) fn quoted(&mut self, allow_turtle_forms: bool) -> Result<String, ParseError> {
        let (delim, long) = if self.peek_str("\"\"\"") && allow_turtle_forms {
            ("\"\"\"", true)
        } else if self.peek_str("'''") && allow_turtle_forms {
            ("'''", true)
        } else if self.peek() == Some('"') {
            ("\"", false)
        } else if self.peek() == Some('\'') && allow_turtle_forms {
            ("'", false)
        } else {
            return Err(self.error("expected string"));
        };
        self.advance(delim.len());
        let mut value = String::new();
        loop {
            if self.peek_str(delim) {
                self.advance(delim.len());
                break;
            }
            match self.bump() {
                None => return Err(self.error("unterminated string")),
                Some('\n') if !long => return Err(self.error("newline in string")),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(self.error("invalid string escape")),
                    };
                    value.push(c);
                }
                Some(c) => value.push(c),
            }
        }
        Ok(value)
    }

    /// A literal: string followed by an optional language tag or datatype.
    /// `datatype` parses the datatype reference after `^^`.
    pub(crate) fn literal(
        &mut self,
        datatype: impl FnOnce(&mut Self) -> Result<Iri, ParseError>,
    ) -> Result<Literal, ParseError> {
        self.literal_with(false, datatype)
    }

    pub(crate) fn literal_with(
        &mut self,
        turtle: bool,
        datatype: impl FnOnce(&mut Self) -> Result<Iri, ParseError>,
    ) -> Result<Literal, ParseError> {
        let lexical = self.quoted(turtle)?;
        if self.eat('@') {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                self.bump();
            }
            let tag = &self.src[start..self.pos];
            Literal::lang(lexical, tag).map_err(|e| self.error(e.to_string()))
        } else if self.peek_str("^^") {
            self.advance(2);
            let dt = datatype(self)?;
            Ok(Literal::typed(lexical, dt))
        } else {
            Ok(Literal::plain(lexical))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_empty_graph() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert!(parse_ntriples("\n# comment only\n   \n").unwrap().is_empty());
    }

    #[test]
    fn single_language_tagged_statement() {
        let g = parse_ntriples(
            "<http://ex/d1> <http://purl.org/dc/terms/title> \"Titel\"@de .\n",
        )
        .unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        let lit = t.object.as_literal().unwrap();
        assert_eq!(lit.lexical(), "Titel");
        assert_eq!(lit.language(), Some("de"));
    }

    #[test]
    fn duplicate_statements_collapse() {
        let line = "<http://ex/d1> <http://purl.org/dc/terms/title> \"Titel\"@de .\n";
        let g = parse_ntriples(&format!("{line}{line}")).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "<http://ex/a> <http://ex/p> <http://ex/b> .\n<http://ex/a> <http://ex/p> \"open .\n";
        let err = parse_ntriples(text).unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_ntriples("<http://ex/a> \"lit\" <http://ex/b> .").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("predicate"));
        assert!(parse_ntriples("<http://ex/a> <http://ex/p> <http://ex/b>").is_err());
    }

    #[test]
    fn escapes_round_trip() {
        let text = "<http://ex/a> <http://ex/p> \"quote \\\" back \\\\ nl \\n \\u00e4\" .\n";
        let g = parse_ntriples(text).unwrap();
        let lit = g.iter().next().unwrap().object.as_literal().unwrap().clone();
        assert_eq!(lit.lexical(), "quote \" back \\ nl \n ä");
        let again = parse_ntriples(&write_ntriples(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn typed_literals_and_blank_nodes() {
        let text = "_:b1 <http://ex/p> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n_:b1 <http://ex/q> _:b2 .";
        let g = parse_ntriples(text).unwrap();
        assert_eq!(g.len(), 2);
        let scoped = parse_ntriples_doc(text, Some("file-a")).unwrap();
        let other = parse_ntriples_doc(text, Some("file-b")).unwrap();
        assert_eq!(scoped.len(), 2);
        assert_ne!(scoped, other);
        assert_eq!(scoped, parse_ntriples_doc(text, Some("file-a")).unwrap());
    }
}
