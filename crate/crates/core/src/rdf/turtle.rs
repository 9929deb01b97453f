//! Read-only Turtle subset: `@prefix`/`PREFIX`, `a`, predicate and object
//! lists, `[...]` blank node property lists, and numeric/boolean shorthands.
//! Collections, `@base` and relative IRIs are not supported.

use std::collections::HashMap;

use super::graph::Graph;
use super::ntriples::{BlankScope, ParseError, Scanner};
use super::term::{Iri, Literal, Subject, Term, Triple};
use crate::vocab::{rdf, xsd};

pub fn parse_turtle(text: &str) -> Result<Graph, ParseError> {
    parse_turtle_doc(text, None)
}

pub fn parse_turtle_doc(text: &str, doc_id: Option<&str>) -> Result<Graph, ParseError> {
    let mut parser = TurtleParser {
        sc: Scanner::new(text, 1),
        prefixes: HashMap::new(),
        blanks: BlankScope::new(doc_id),
        graph: Graph::new(),
    };
    parser.document()?;
    Ok(parser.graph)
}

struct TurtleParser<'a> {
    sc: Scanner<'a>,
    prefixes: HashMap<String, String>,
    blanks: BlankScope,
    graph: Graph,
}

impl TurtleParser<'_> {
    fn document(&mut self) -> Result<(), ParseError> {
        loop {
            self.sc.skip_ws_comments();
            if self.sc.at_end() {
                return Ok(());
            }
            if self.sc.peek_str("@prefix") {
                self.sc.advance("@prefix".len());
                self.prefix_decl()?;
                self.sc.skip_ws_comments();
                if !self.sc.eat('.') {
                    return Err(self.sc.error("expected `.` after @prefix"));
                }
            } else if self.keyword("PREFIX") {
                self.prefix_decl()?;
            } else if self.sc.peek_str("@base") || self.keyword("BASE") {
                return Err(self.sc.error("base IRIs are not supported"));
            } else {
                self.triples()?;
                self.sc.skip_ws_comments();
                if !self.sc.eat('.') {
                    return Err(self.sc.error("expected `.` after statement"));
                }
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        let rest = self.sc.rest();
        if rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && rest[kw.len()..].starts_with([' ', '\t', '\n', '\r'])
        {
            self.sc.advance(kw.len());
            true
        } else {
            false
        }
    }

    fn prefix_decl(&mut self) -> Result<(), ParseError> {
        self.sc.skip_ws_comments();
        let start_rest = self.sc.rest();
        let colon = start_rest
            .find(':')
            .ok_or_else(|| self.sc.error("expected prefix name"))?;
        let name = start_rest[..colon].to_owned();
        if !name.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) {
            return Err(self.sc.error("invalid prefix name"));
        }
        self.sc.advance(colon + 1);
        self.sc.skip_ws_comments();
        let iri = self.sc.iri_ref_raw()?;
        self.prefixes.insert(name, iri);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), ParseError> {
        if self.sc.peek() == Some('[') {
            let subject = self.blank_property_list()?;
            self.sc.skip_ws_comments();
            if self.sc.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = match self.sc.peek() {
            Some('_') if self.sc.peek_str("_:") => {
                let label = self.sc.blank_label()?;
                Subject::Blank(self.blanks.get(&label))
            }
            _ => Subject::Iri(self.iri()?),
        };
        self.predicate_object_list(&subject)
    }

    fn predicate_object_list(&mut self, subject: &Subject) -> Result<(), ParseError> {
        loop {
            self.sc.skip_ws_comments();
            let predicate = self.verb()?;
            loop {
                self.sc.skip_ws_comments();
                let object = self.object()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.sc.skip_ws_comments();
                if !self.sc.eat(',') {
                    break;
                }
            }
            self.sc.skip_ws_comments();
            if !self.sc.eat(';') {
                return Ok(());
            }
            // Repeated or trailing semicolons are allowed.
            loop {
                self.sc.skip_ws_comments();
                if !self.sc.eat(';') {
                    break;
                }
            }
            if matches!(self.sc.peek(), Some('.' | ']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, ParseError> {
        let rest = self.sc.rest();
        if rest.starts_with('a')
            && rest[1..]
                .chars()
                .next()
                .is_some_and(|c| c.is_whitespace() || c == '<' || c == '"')
        {
            self.sc.bump();
            return Ok(rdf::type_());
        }
        self.iri()
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        match self.sc.peek() {
            Some('[') => Ok(Term::from(self.blank_property_list()?)),
            Some('_') if self.sc.peek_str("_:") => {
                let label = self.sc.blank_label()?;
                Ok(Term::Blank(self.blanks.get(&label)))
            }
            Some('"' | '\'') => {
                let prefixes = &self.prefixes;
                let lit = self.sc.literal_with(true, |sc| resolve_iri(sc, prefixes))?;
                Ok(Term::Literal(lit))
            }
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => {
                Ok(Term::Literal(self.numeric()?))
            }
            _ => {
                if self.keyword_bool("true") {
                    return Ok(Term::Literal(Literal::typed("true", xsd::boolean())));
                }
                if self.keyword_bool("false") {
                    return Ok(Term::Literal(Literal::typed("false", xsd::boolean())));
                }
                Ok(Term::Iri(self.iri()?))
            }
        }
    }

    fn keyword_bool(&mut self, kw: &str) -> bool {
        let rest = self.sc.rest();
        if rest.starts_with(kw)
            && !rest[kw.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_alphanumeric() || c == ':' || c == '_')
        {
            self.sc.advance(kw.len());
            true
        } else {
            false
        }
    }

    fn numeric(&mut self) -> Result<Literal, ParseError> {
        let rest = self.sc.rest();
        let mut end = 0;
        let bytes = rest.as_bytes();
        if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
            end += 1;
        }
        let mut seen_dot = false;
        let mut seen_exp = false;
        while end < bytes.len() {
            let b = bytes[end];
            if b.is_ascii_digit() {
                end += 1;
            } else if b == b'.'
                && !seen_dot
                && !seen_exp
                && bytes.get(end + 1).is_some_and(|n| n.is_ascii_digit())
            {
                seen_dot = true;
                end += 1;
            } else if (b == b'e' || b == b'E') && !seen_exp {
                seen_exp = true;
                end += 1;
                if bytes.get(end).is_some_and(|s| *s == b'+' || *s == b'-') {
                    end += 1;
                }
            } else {
                break;
            }
        }
        let token = &rest[..end];
        if !token.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.sc.error("invalid numeric literal"));
        }
        let datatype = if seen_exp {
            xsd::double()
        } else if seen_dot {
            xsd::decimal()
        } else {
            xsd::integer()
        };
        let lit = Literal::typed(token, datatype);
        self.sc.advance(end);
        Ok(lit)
    }

    fn blank_property_list(&mut self) -> Result<Subject, ParseError> {
        if !self.sc.eat('[') {
            return Err(self.sc.error("expected `[`"));
        }
        let node = Subject::Blank(self.blanks.fresh());
        self.sc.skip_ws_comments();
        if !self.sc.eat(']') {
            self.predicate_object_list(&node)?;
            self.sc.skip_ws_comments();
            if !self.sc.eat(']') {
                return Err(self.sc.error("expected `]`"));
            }
        }
        Ok(node)
    }

    fn iri(&mut self) -> Result<Iri, ParseError> {
        resolve_iri(&mut self.sc, &self.prefixes)
    }
}

/// An IRIREF or a prefixed name resolved against `prefixes`.
fn resolve_iri(sc: &mut Scanner<'_>, prefixes: &HashMap<String, String>) -> Result<Iri, ParseError> {
    if sc.peek() == Some('<') {
        return sc.iri_ref();
    }
    let rest = sc.rest();
    let colon = rest
        .find(':')
        .ok_or_else(|| sc.error("expected IRI or prefixed name"))?;
    let prefix = &rest[..colon];
    if !prefix
        .chars()
        .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
    {
        return Err(sc.error("expected IRI or prefixed name"));
    }
    let local_src = &rest[colon + 1..];
    let mut end = 0;
    for (i, c) in local_src.char_indices() {
        if c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '%') {
            end = i + c.len_utf8();
        } else if c == '.' {
            let next = local_src[i + 1..].chars().next();
            if next.is_some_and(|n| n.is_alphanumeric() || matches!(n, '_' | '-' | ':' | '%')) {
                end = i + 1;
            } else {
                break;
            }
        } else {
            break;
        }
    }
    let local = &local_src[..end];
    let Some(ns) = prefixes.get(prefix) else {
        return Err(sc.error(format!("undeclared prefix `{prefix}:`")));
    };
    let value = format!("{ns}{local}");
    sc.advance(colon + 1 + end);
    Iri::new(value).map_err(|e| sc.error(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_ntriples;

    #[test]
    fn prefixes_lists_and_a() {
        let ttl = r#"
            @prefix dcat: <http://www.w3.org/ns/dcat#> .
            @prefix dct: <http://purl.org/dc/terms/> .
            PREFIX ex: <http://ex/>

            ex:d1 a dcat:Dataset ;
                dct:title "Titel"@de, "Title"@en ;
                dcat:keyword "bus" ;
                dcat:distribution [ a dcat:Distribution ; dcat:downloadURL <http://ex/f.csv> ] .
        "#;
        let g = parse_turtle(ttl).unwrap();
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn matches_equivalent_ntriples() {
        let ttl = "@prefix ex: <http://ex/> .\nex:a ex:p ex:b , ex:c ; ex:q \"x\" .";
        let nt = "<http://ex/a> <http://ex/p> <http://ex/b> .\n<http://ex/a> <http://ex/p> <http://ex/c> .\n<http://ex/a> <http://ex/q> \"x\" .";
        assert_eq!(parse_turtle(ttl).unwrap(), parse_ntriples(nt).unwrap());
    }

    #[test]
    fn numbers_and_booleans() {
        let ttl = "@prefix ex: <http://ex/> .\nex:a ex:n 42 ; ex:d 1.5 ; ex:b true .";
        let g = parse_turtle(ttl).unwrap();
        let dts: Vec<_> = g
            .iter()
            .map(|t| t.object.as_literal().unwrap().datatype().unwrap().as_str().to_owned())
            .collect();
        assert!(dts.iter().any(|d| d.ends_with("#integer")));
        assert!(dts.iter().any(|d| d.ends_with("#decimal")));
        assert!(dts.iter().any(|d| d.ends_with("#boolean")));
    }

    #[test]
    fn prefixed_datatype() {
        let ttl = "@prefix ex: <http://ex/> .\n@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\nex:a ex:d \"2020-01-01\"^^xsd:date .";
        let g = parse_turtle(ttl).unwrap();
        let lit = g.iter().next().unwrap().object.as_literal().unwrap().clone();
        assert_eq!(lit.datatype().unwrap().as_str(), "http://www.w3.org/2001/XMLSchema#date");
    }

    #[test]
    fn undeclared_prefix_is_an_error_with_line() {
        let err = parse_turtle("\n\nfoo:a <http://ex/p> 1 .").unwrap_err();
        assert_eq!(err.line, 3);
    }
}
