use std::collections::{HashMap, HashSet};

use super::write::{contact_node, publisher_node, spatial_node, temporal_node};
use super::{
    parse_wkt_point, AgentRef, ContactInfo, DatasetRecord, Distribution, GeoAnnotation, GeoLevel,
    LangString, TemporalRange, Timestamp,
};
use crate::rdf::{BlankNode, Graph, Iri, Literal, Subject, Term, Triple};
use crate::vocab::{dcat, dct, foaf, mc, owl, rdf, rdfs, skos, vcard, IANA_MEDIA_TYPES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("dataset <{0}> is not a subject of the slice")]
    NotFound(Iri),
}

/// Maps a dataset slice onto a [`DatasetRecord`].
///
/// Lenient: unknown predicates go to `extra`, unparseable values become
/// warnings (and also stay in `extra`). Only fails when the dataset is absent.
pub fn from_graph(slice: &Graph, dataset: &Iri) -> Result<DatasetRecord, ModelError> {
    let root = Subject::Iri(dataset.clone());
    let mut reader = Reader::new(slice);
    let Some(outgoing) = reader.by_subject.get(&root).cloned() else {
        return Err(ModelError::NotFound(dataset.clone()));
    };
    let mut record = DatasetRecord::new(dataset.clone());

    for t in outgoing {
        let p = &t.predicate;
        if *p == rdf::type_() {
            if t.object == Term::Iri(dcat::dataset()) {
                reader.consume(t);
            }
        } else if *p == dct::title() {
            reader.lang_string(t, &mut record.titles);
        } else if *p == dct::description() {
            reader.lang_string(t, &mut record.descriptions);
        } else if *p == dcat::keyword() {
            reader.lang_string(t, &mut record.keywords);
        } else if *p == dcat::theme() {
            reader.iri_list(t, &mut record.themes);
        } else if *p == dct::language() {
            reader.iri_list(t, &mut record.languages);
        } else if *p == dct::is_part_of() {
            reader.single_iri(t, &mut record.catalog);
        } else if *p == dct::accrual_periodicity() {
            reader.single_iri(t, &mut record.accrual_periodicity);
        } else if *p == dcat::landing_page() {
            reader.single_iri(t, &mut record.landing_page);
        } else if *p == dct::issued() {
            reader.single_timestamp(t, &mut record.issued);
        } else if *p == dct::modified() {
            reader.single_timestamp(t, &mut record.modified);
        } else if *p == dct::identifier() {
            reader.single_string(t, &mut record.identifier);
        } else if *p == owl::version_info() {
            reader.single_string(t, &mut record.version);
        } else if *p == dct::publisher() && record.publisher.is_none() {
            record.publisher = reader.agent(t, dataset);
        } else if *p == dcat::contact_point() && record.contact_point.is_none() {
            record.contact_point = reader.contact(t, dataset);
        } else if *p == dct::temporal() && record.temporal.is_none() {
            record.temporal = reader.temporal(t, dataset);
        } else if *p == dct::spatial() {
            if let Some(geo) = reader.spatial(t, dataset) {
                record.spatial.push(geo);
            }
        } else if *p == dcat::distribution() {
            if let Some(dist) = reader.distribution(t) {
                record.distributions.push(dist);
            }
        }
    }
    record.distributions.sort_by(|a, b| a.node.cmp(&b.node));
    record.extra = reader.leftovers(slice);
    record.warnings = reader.warnings;
    Ok(record)
}

struct Reader<'g> {
    by_subject: HashMap<Subject, Vec<&'g Triple>>,
    consumed: HashSet<&'g Triple>,
    /// Blank nodes that writing back will relabel.
    renamed: HashMap<BlankNode, BlankNode>,
    warnings: Vec<String>,
}

impl<'g> Reader<'g> {
    fn new(slice: &'g Graph) -> Self {
        let mut by_subject: HashMap<Subject, Vec<&Triple>> = HashMap::new();
        for t in slice {
            by_subject.entry(t.subject.clone()).or_default().push(t);
        }
        Self {
            by_subject,
            consumed: HashSet::new(),
            renamed: HashMap::new(),
            warnings: Vec::new(),
        }
    }

    fn consume(&mut self, t: &'g Triple) {
        self.consumed.insert(t);
    }

    fn warn(&mut self, t: &Triple, what: &str) {
        self.warnings.push(format!("{what}: {t}"));
    }

    fn outgoing(&self, node: &Subject) -> Vec<&'g Triple> {
        self.by_subject.get(node).cloned().unwrap_or_default()
    }

    fn lang_string(&mut self, t: &'g Triple, out: &mut Vec<LangString>) {
        match t.object.as_literal() {
            Some(lit) if lit.datatype().is_none() => {
                out.push(LangString::new(lit.lexical(), lit.language()));
                self.consume(t);
            }
            _ => self.warn(t, "expected a plain or language-tagged literal"),
        }
    }

    fn iri_list(&mut self, t: &'g Triple, out: &mut Vec<Iri>) {
        match t.object.as_iri() {
            Some(iri) => {
                out.push(iri.clone());
                self.consume(t);
            }
            None => self.warn(t, "expected an IRI"),
        }
    }

    fn single_iri(&mut self, t: &'g Triple, slot: &mut Option<Iri>) {
        match t.object.as_iri() {
            Some(iri) if slot.is_none() => {
                *slot = Some(iri.clone());
                self.consume(t);
            }
            Some(_) => {}
            None => self.warn(t, "expected an IRI"),
        }
    }

    fn single_string(&mut self, t: &'g Triple, slot: &mut Option<String>) {
        if slot.is_some() {
            return;
        }
        match t.object.as_literal() {
            Some(lit) if lit.language().is_none() && lit.datatype().is_none() => {
                *slot = Some(lit.lexical().to_owned());
                self.consume(t);
            }
            _ => self.warn(t, "expected a plain literal"),
        }
    }

    fn single_timestamp(&mut self, t: &'g Triple, slot: &mut Option<Timestamp>) {
        if slot.is_some() {
            return;
        }
        match t.object.as_literal().and_then(|l| Timestamp::parse(l.lexical())) {
            Some(ts) => {
                *slot = Some(ts);
                self.consume(t);
            }
            None => self.warn(t, "expected an ISO-8601 date"),
        }
    }

    /// Text or IRI value as a string, consuming the triple. `mailto:` and
    /// `tel:` prefixes are stripped from IRIs.
    fn text_value(&mut self, t: &'g Triple) -> Option<String> {
        let value = match &t.object {
            Term::Literal(lit) => lit.lexical().to_owned(),
            Term::Iri(iri) => {
                let s = iri.as_str();
                s.strip_prefix("mailto:")
                    .or_else(|| s.strip_prefix("tel:"))
                    .unwrap_or(s)
                    .to_owned()
            }
            Term::Blank(_) => return None,
        };
        self.consume(t);
        Some(value)
    }

    fn relabel(&mut self, node: &Subject, target: BlankNode) {
        if let Subject::Blank(b) = node {
            if *b != target {
                self.renamed.insert(b.clone(), target);
            }
        }
    }

    fn agent(&mut self, t: &'g Triple, dataset: &Iri) -> Option<AgentRef> {
        let mut agent = AgentRef::default();
        let node = match &t.object {
            Term::Literal(lit) => {
                agent.name = Some(lit.lexical().to_owned());
                self.consume(t);
                return Some(agent);
            }
            Term::Iri(iri) => {
                agent.iri = Some(iri.clone());
                Subject::Iri(iri.clone())
            }
            Term::Blank(b) => Subject::Blank(b.clone()),
        };
        for u in self.outgoing(&node) {
            if u.predicate == foaf::name() && agent.name.is_none() {
                agent.name = literal_text(u);
                if agent.name.is_some() {
                    self.consume(u);
                }
            } else if u.predicate == foaf::homepage() && agent.homepage.is_none() {
                agent.homepage = u.object.as_iri().cloned();
                if agent.homepage.is_some() {
                    self.consume(u);
                }
            } else if u.predicate == foaf::mbox() && agent.email.is_none() {
                agent.email = self.text_value(u);
            }
        }
        if agent.is_empty() {
            return None;
        }
        self.consume(t);
        self.relabel(&node, publisher_node(dataset));
        Some(agent)
    }

    fn contact(&mut self, t: &'g Triple, dataset: &Iri) -> Option<ContactInfo> {
        let mut info = ContactInfo::default();
        let node = t.object.as_subject()?;
        info.iri = node.as_iri().cloned();
        for u in self.outgoing(&node) {
            let p = &u.predicate;
            let slot = if *p == vcard::fn_() {
                &mut info.name
            } else if *p == vcard::has_email() {
                &mut info.email
            } else if *p == vcard::has_url() {
                &mut info.url
            } else if *p == vcard::has_telephone() {
                &mut info.phone
            } else if *p == vcard::has_address() {
                &mut info.address
            } else {
                continue;
            };
            if slot.is_none() {
                *slot = self.text_value(u);
            }
        }
        if info.is_empty() {
            return None;
        }
        self.consume(t);
        self.relabel(&node, contact_node(dataset));
        Some(info)
    }

    fn temporal(&mut self, t: &'g Triple, dataset: &Iri) -> Option<TemporalRange> {
        let node = t.object.as_subject()?;
        if node.as_iri().is_some() {
            return None;
        }
        let mut range = TemporalRange::default();
        let mut used = Vec::new();
        for u in self.outgoing(&node) {
            let slot = if u.predicate == dcat::start_date() {
                &mut range.start
            } else if u.predicate == dcat::end_date() {
                &mut range.end
            } else {
                if u.predicate == rdf::type_() && u.object == Term::Iri(dct::period_of_time()) {
                    used.push(u);
                }
                continue;
            };
            if slot.is_none() {
                if let Some(ts) = u.object.as_literal().and_then(|l| Timestamp::parse(l.lexical())) {
                    *slot = Some(ts);
                    used.push(u);
                }
            }
        }
        if range.start.is_none() && range.end.is_none() {
            return None;
        }
        for u in used {
            self.consume(u);
        }
        self.consume(t);
        self.relabel(&node, temporal_node(dataset));
        Some(range)
    }

    fn spatial(&mut self, t: &'g Triple, dataset: &Iri) -> Option<GeoAnnotation> {
        let node = t.object.as_subject()?;
        let mut name: Option<(String, &'g Triple)> = None;
        let mut level: Option<(GeoLevel, &'g Triple)> = None;
        let mut centroid: Option<((f64, f64), &'g Triple)> = None;
        let mut typed: Option<&'g Triple> = None;
        for u in self.outgoing(&node) {
            if (u.predicate == rdfs::label() || u.predicate == skos::pref_label()) && name.is_none() {
                name = literal_text(u).map(|n| (n, u));
            } else if u.predicate == mc::geo_level() && level.is_none() {
                level = literal_text(u).and_then(|l| l.parse().ok()).map(|l| (l, u));
            } else if u.predicate == dcat::centroid() && centroid.is_none() {
                centroid = literal_text(u).and_then(|c| parse_wkt_point(&c)).map(|c| (c, u));
            } else if u.predicate == rdf::type_() && u.object == Term::Iri(dct::location()) {
                typed = Some(u);
            }
        }
        let ((lat, lon), centroid_triple) = centroid?;
        let geo = GeoAnnotation {
            place_iri: node.as_iri().cloned(),
            place_name: name.as_ref().map(|(n, _)| n.clone()).unwrap_or_default(),
            level: level.map_or(GeoLevel::Point, |(l, _)| l),
            lat,
            lon,
        };
        let used = [Some(centroid_triple), name.map(|(_, u)| u), level.map(|(_, u)| u), typed];
        for u in used.into_iter().flatten() {
            self.consume(u);
        }
        self.consume(t);
        self.relabel(&node, spatial_node(dataset, &geo));
        Some(geo)
    }

    fn distribution(&mut self, t: &'g Triple) -> Option<Distribution> {
        let Some(node) = t.object.as_subject() else {
            self.warn(t, "distribution must be a node");
            return None;
        };
        self.consume(t);
        let mut dist = Distribution::new(node.clone());
        for u in self.outgoing(&node) {
            let p = &u.predicate;
            if *p == rdf::type_() {
                if u.object == Term::Iri(dcat::distribution_class()) {
                    self.consume(u);
                }
            } else if *p == dcat::access_url() {
                self.single_iri(u, &mut dist.access_url);
            } else if *p == dcat::download_url() {
                self.single_iri(u, &mut dist.download_url);
            } else if *p == dct::license() {
                self.single_iri(u, &mut dist.license);
            } else if *p == dcat::media_type() && dist.media_type.is_none() {
                dist.media_type = match &u.object {
                    Term::Iri(iri) => Some(
                        iri.as_str()
                            .strip_prefix(IANA_MEDIA_TYPES)
                            .unwrap_or(iri.as_str())
                            .to_owned(),
                    ),
                    _ => literal_text(u),
                };
                if dist.media_type.is_some() {
                    self.consume(u);
                }
            } else if *p == dct::format() && dist.format.is_none() {
                match u.object.as_literal() {
                    Some(lit) if lit.language().is_none() && lit.datatype().is_none() => {
                        dist.format = Some(lit.lexical().to_owned());
                        self.consume(u);
                    }
                    _ => {}
                }
            } else if *p == dcat::byte_size() && dist.byte_size.is_none() {
                match u.object.as_literal().and_then(parse_byte_size) {
                    Some(n) => {
                        dist.byte_size = Some(n);
                        self.consume(u);
                    }
                    None => self.warn(u, "expected a non-negative byte size"),
                }
            } else if *p == dct::issued() {
                self.single_timestamp(u, &mut dist.issued);
            } else if *p == dct::modified() {
                self.single_timestamp(u, &mut dist.modified);
            }
        }
        if dist.access_url.is_none() && dist.download_url.is_none() {
            self.warnings
                .push(format!("distribution {} has neither access nor download URL", dist.node));
        }
        Some(dist)
    }

    fn leftovers(&self, slice: &Graph) -> Vec<Triple> {
        let rename = |s: &Subject| match s {
            Subject::Blank(b) => self.renamed.get(b).map(|n| Subject::Blank(n.clone())),
            Subject::Iri(_) => None,
        };
        slice
            .iter()
            .filter(|t| !self.consumed.contains(t))
            .map(|t| {
                let mut t = t.clone();
                if let Some(s) = rename(&t.subject) {
                    t.subject = s;
                }
                if let Some(o) = t.object.as_subject().and_then(|o| rename(&o)) {
                    t.object = o.into();
                }
                t
            })
            .collect()
    }
}

fn literal_text(t: &Triple) -> Option<String> {
    t.object.as_literal().map(|l| l.lexical().to_owned())
}

fn parse_byte_size(lit: &Literal) -> Option<u64> {
    let text = lit.lexical().trim();
    text.parse::<u64>().ok().or_else(|| {
        let f: f64 = text.parse().ok()?;
        (f >= 0.0 && f.fract() == 0.0 && f < u64::MAX as f64).then_some(f as u64)
    })
}
