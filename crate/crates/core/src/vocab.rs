//! Constants table: every class and property IRI the pipeline reads or writes.
//!
//! The selection covers DCAT 2 with Dublin Core terms, FOAF for agents, vCard
//! for contact points and DQV for quality measurements. Predicates that no
//! standard vocabulary offers live in the project namespace [`mc`].

use crate::rdf::Iri;

macro_rules! namespace {
    ($(#[$meta:meta])* $name:ident, $base:literal, { $($fname:ident => $local:literal),* $(,)? }) => {
        $(#[$meta])*
        pub mod $name {
            use super::Iri;
            pub const NS: &str = $base;
            $(
                pub fn $fname() -> Iri {
                    Iri::from_static(concat!($base, $local))
                }
            )*
        }
    };
}

namespace!(rdf, "http://www.w3.org/1999/02/22-rdf-syntax-ns#", {
    type_ => "type",
});

namespace!(rdfs, "http://www.w3.org/2000/01/rdf-schema#", {
    label => "label",
    see_also => "seeAlso",
});

namespace!(xsd, "http://www.w3.org/2001/XMLSchema#", {
    string => "string",
    integer => "integer",
    non_negative_integer => "nonNegativeInteger",
    decimal => "decimal",
    double => "double",
    boolean => "boolean",
    date => "date",
    date_time => "dateTime",
});

namespace!(dcat, "http://www.w3.org/ns/dcat#", {
    dataset => "Dataset",
    catalog => "Catalog",
    distribution_class => "Distribution",
    distribution => "distribution",
    keyword => "keyword",
    theme => "theme",
    landing_page => "landingPage",
    contact_point => "contactPoint",
    access_url => "accessURL",
    download_url => "downloadURL",
    media_type => "mediaType",
    byte_size => "byteSize",
    start_date => "startDate",
    end_date => "endDate",
    centroid => "centroid",
    dataset_link => "dataset",
});

namespace!(dct, "http://purl.org/dc/terms/", {
    title => "title",
    description => "description",
    publisher => "publisher",
    issued => "issued",
    modified => "modified",
    accrual_periodicity => "accrualPeriodicity",
    spatial => "spatial",
    temporal => "temporal",
    identifier => "identifier",
    language => "language",
    format => "format",
    license => "license",
    is_part_of => "isPartOf",
    conforms_to => "conformsTo",
    relation => "relation",
    is_referenced_by => "isReferencedBy",
    period_of_time => "PeriodOfTime",
    location => "Location",
});

namespace!(foaf, "http://xmlns.com/foaf/0.1/", {
    agent => "Agent",
    name => "name",
    homepage => "homepage",
    mbox => "mbox",
    page => "page",
});

namespace!(vcard, "http://www.w3.org/2006/vcard/ns#", {
    kind => "Kind",
    fn_ => "fn",
    has_email => "hasEmail",
    has_url => "hasURL",
    has_telephone => "hasTelephone",
    has_address => "hasAddress",
});

namespace!(owl, "http://www.w3.org/2002/07/owl#", {
    version_info => "versionInfo",
    same_as => "sameAs",
});

namespace!(skos, "http://www.w3.org/2004/02/skos/core#", {
    pref_label => "prefLabel",
    exact_match => "exactMatch",
});

namespace!(dqv, "http://www.w3.org/ns/dqv#", {
    quality_measurement => "QualityMeasurement",
    is_measurement_of => "isMeasurementOf",
    computed_on => "computedOn",
    value => "value",
    has_quality_measurement => "hasQualityMeasurement",
});

namespace!(geosparql, "http://www.opengis.net/ont/geosparql#", {
    wkt_literal => "wktLiteral",
});

namespace!(
    /// Project namespace for predicates without a standard equivalent.
    mc, "https://w3id.org/metacat/ns#", {
    geo_level => "geoLevel",
    signature => "signature",
    discussion => "discussion",
});

namespace!(
    /// Minimal lexicon vocabulary read by synonym extraction.
    lex, "https://w3id.org/metacat/lexicon#", {
    term => "Term",
    language => "language",
    part_of_speech => "partOfSpeech",
    noun => "Noun",
    canonical_form => "canonicalForm",
    synonym => "synonym",
});

/// Base IRI for quality metric identifiers.
pub const METRIC_BASE: &str = "https://w3id.org/metacat/metric/";
/// Base IRI for DQV measurement nodes.
pub const MEASUREMENT_BASE: &str = "https://w3id.org/metacat/measurement/";
/// Base IRI for gazetteer places.
pub const PLACE_BASE: &str = "https://w3id.org/metacat/place/";
/// Prefix of IANA media-type IRIs as used by `dcat:mediaType`.
pub const IANA_MEDIA_TYPES: &str = "https://www.iana.org/assignments/media-types/";

/// Namespaces published by W3C or similar standards bodies.
pub const STANDARD_NAMESPACES: &[&str] = &[
    rdf::NS,
    rdfs::NS,
    xsd::NS,
    dcat::NS,
    dct::NS,
    foaf::NS,
    vcard::NS,
    owl::NS,
    skos::NS,
    dqv::NS,
    geosparql::NS,
    "http://www.w3.org/ns/adms#",
    "http://www.w3.org/ns/locn#",
    "http://www.w3.org/ns/prov#",
    "http://schema.org/",
    "https://schema.org/",
];

/// The namespace part of an IRI, up to and including the last `#` or `/`.
pub fn namespace_of(iri: &str) -> &str {
    match iri.rfind(['#', '/']) {
        Some(idx) => &iri[..=idx],
        None => iri,
    }
}
