use super::{wkt_point, DatasetRecord, GeoAnnotation, LangString};
use crate::rdf::{BlankNode, Graph, Iri, Literal, Subject, Term, Triple};
use crate::vocab::{dcat, dct, foaf, geosparql, mc, owl, rdf, rdfs, vcard, xsd, IANA_MEDIA_TYPES};

pub(crate) fn publisher_node(dataset: &Iri) -> BlankNode {
    BlankNode::derived(&[dataset.as_str(), "publisher"])
}

pub(crate) fn contact_node(dataset: &Iri) -> BlankNode {
    BlankNode::derived(&[dataset.as_str(), "contact"])
}

pub(crate) fn temporal_node(dataset: &Iri) -> BlankNode {
    BlankNode::derived(&[dataset.as_str(), "temporal"])
}

pub(crate) fn spatial_node(dataset: &Iri, geo: &GeoAnnotation) -> BlankNode {
    BlankNode::derived(&[
        dataset.as_str(),
        "spatial",
        &geo.place_name,
        geo.level.as_str(),
        &wkt_point(geo.lat, geo.lon),
    ])
}

fn lang_literal(s: &LangString) -> Literal {
    match &s.lang {
        Some(tag) => Literal::lang(&s.value, tag).unwrap_or_else(|_| Literal::plain(&s.value)),
        None => Literal::plain(&s.value),
    }
}

/// A URL-ish string as an IRI when it parses as one, else a literal.
fn iri_or_literal(value: &str) -> Term {
    match Iri::new(value) {
        Ok(iri) => Term::Iri(iri),
        Err(_) => Literal::plain(value).into(),
    }
}

fn email_term(email: &str) -> Term {
    match Iri::new(format!("mailto:{email}")) {
        Ok(iri) => Term::Iri(iri),
        Err(_) => Literal::plain(email).into(),
    }
}

/// Serializes a record; `extra` triples are emitted unchanged.
pub fn to_graph(record: &DatasetRecord) -> Graph {
    let mut g = Graph::new();
    let ds = Subject::Iri(record.iri.clone());
    let mut add = |s: &Subject, p: Iri, o: Term| {
        g.insert(Triple::new(s.clone(), p, o));
    };

    add(&ds, rdf::type_(), dcat::dataset().into());
    for t in &record.titles {
        add(&ds, dct::title(), lang_literal(t).into());
    }
    for t in &record.descriptions {
        add(&ds, dct::description(), lang_literal(t).into());
    }
    for t in &record.keywords {
        add(&ds, dcat::keyword(), lang_literal(t).into());
    }
    for iri in &record.themes {
        add(&ds, dcat::theme(), iri.clone().into());
    }
    for iri in &record.languages {
        add(&ds, dct::language(), iri.clone().into());
    }
    let single_iris = [
        (dct::is_part_of(), &record.catalog),
        (dct::accrual_periodicity(), &record.accrual_periodicity),
        (dcat::landing_page(), &record.landing_page),
    ];
    for (p, value) in single_iris {
        if let Some(iri) = value {
            add(&ds, p, iri.clone().into());
        }
    }
    if let Some(ts) = &record.issued {
        add(&ds, dct::issued(), ts.to_literal().into());
    }
    if let Some(ts) = &record.modified {
        add(&ds, dct::modified(), ts.to_literal().into());
    }
    if let Some(id) = &record.identifier {
        add(&ds, dct::identifier(), Literal::plain(id).into());
    }
    if let Some(v) = &record.version {
        add(&ds, owl::version_info(), Literal::plain(v).into());
    }

    if let Some(agent) = record.publisher.as_ref().filter(|a| !a.is_empty()) {
        let node = match &agent.iri {
            Some(iri) => Subject::Iri(iri.clone()),
            None => Subject::Blank(publisher_node(&record.iri)),
        };
        add(&ds, dct::publisher(), node.clone().into());
        if let Some(name) = &agent.name {
            add(&node, foaf::name(), Literal::plain(name).into());
        }
        if let Some(hp) = &agent.homepage {
            add(&node, foaf::homepage(), hp.clone().into());
        }
        if let Some(email) = &agent.email {
            add(&node, foaf::mbox(), email_term(email));
        }
    }

    if let Some(info) = record.contact_point.as_ref().filter(|c| !c.is_empty()) {
        let node = match &info.iri {
            Some(iri) => Subject::Iri(iri.clone()),
            None => Subject::Blank(contact_node(&record.iri)),
        };
        add(&ds, dcat::contact_point(), node.clone().into());
        if let Some(v) = &info.name {
            add(&node, vcard::fn_(), Literal::plain(v).into());
        }
        if let Some(v) = &info.email {
            add(&node, vcard::has_email(), email_term(v));
        }
        if let Some(v) = &info.url {
            add(&node, vcard::has_url(), iri_or_literal(v));
        }
        if let Some(v) = &info.phone {
            add(&node, vcard::has_telephone(), Literal::plain(v).into());
        }
        if let Some(v) = &info.address {
            add(&node, vcard::has_address(), Literal::plain(v).into());
        }
    }

    if let Some(range) = record.temporal.filter(|r| r.start.is_some() || r.end.is_some()) {
        let node = Subject::Blank(temporal_node(&record.iri));
        add(&ds, dct::temporal(), node.clone().into());
        add(&node, rdf::type_(), dct::period_of_time().into());
        if let Some(ts) = range.start {
            add(&node, dcat::start_date(), ts.to_literal().into());
        }
        if let Some(ts) = range.end {
            add(&node, dcat::end_date(), ts.to_literal().into());
        }
    }

    for geo in &record.spatial {
        let node = match &geo.place_iri {
            Some(iri) => Subject::Iri(iri.clone()),
            None => Subject::Blank(spatial_node(&record.iri, geo)),
        };
        add(&ds, dct::spatial(), node.clone().into());
        add(&node, rdf::type_(), dct::location().into());
        if !geo.place_name.is_empty() {
            add(&node, rdfs::label(), Literal::plain(&geo.place_name).into());
        }
        add(&node, mc::geo_level(), Literal::plain(geo.level.as_str()).into());
        add(
            &node,
            dcat::centroid(),
            Literal::typed(wkt_point(geo.lat, geo.lon), geosparql::wkt_literal()).into(),
        );
    }

    for dist in &record.distributions {
        let node = &dist.node;
        add(&ds, dcat::distribution(), node.clone().into());
        add(node, rdf::type_(), dcat::distribution_class().into());
        let links = [
            (dcat::access_url(), &dist.access_url),
            (dcat::download_url(), &dist.download_url),
            (dct::license(), &dist.license),
        ];
        for (p, value) in links {
            if let Some(iri) = value {
                add(node, p, iri.clone().into());
            }
        }
        if let Some(mt) = &dist.media_type {
            let object = if mt.contains('/') && !mt.contains(':') {
                iri_or_literal(&format!("{IANA_MEDIA_TYPES}{mt}"))
            } else {
                Literal::plain(mt).into()
            };
            add(node, dcat::media_type(), object);
        }
        if let Some(f) = &dist.format {
            add(node, dct::format(), Literal::plain(f).into());
        }
        if let Some(n) = dist.byte_size {
            add(node, dcat::byte_size(), Literal::typed(n.to_string(), xsd::non_negative_integer()).into());
        }
        if let Some(ts) = &dist.issued {
            add(node, dct::issued(), ts.to_literal().into());
        }
        if let Some(ts) = &dist.modified {
            add(node, dct::modified(), ts.to_literal().into());
        }
    }

    for t in &record.extra {
        g.insert(t.clone());
    }
    g
}
