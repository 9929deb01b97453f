use std::collections::{BTreeSet, HashSet};

use chrono::Duration;

use super::formats::{format_traits, FormatTraits};
use super::text::{flesch_reading_ease, text_language, WordList};
use super::{Bands, Dimension, ExternalStores, MetricDescriptor, NotComputedReason, QualityConfig, Raw, Tier, DEFAULT_BANDS};
use crate::clean::MediaTypeTable;
use crate::enrich::{Gazetteer, LanguageDetector};
use crate::license::{Duty, LicenseSpec, Permission};
use crate::model::{DatasetRecord, Distribution, LangString, Timestamp};
use crate::rdf::{Graph, Iri, Literal, Subject, Term, Triple};
use crate::vocab::{self, dcat, dct, foaf, mc, rdf, rdfs, skos, vcard, xsd};

pub(super) struct Ctx<'a> {
    pub record: &'a DatasetRecord,
    pub slice: &'a Graph,
    pub config: &'a QualityConfig,
    pub stores: &'a ExternalStores<'a>,
}

type Measure = Result<Raw, NotComputedReason>;

/// Fields counted by the extent metrics, also the keys of the weight map.
pub const TRACKED_FIELDS: [&str; 14] = [
    "title",
    "description",
    "keyword",
    "theme",
    "publisher",
    "issued",
    "modified",
    "accrual_periodicity",
    "spatial",
    "temporal",
    "landing_page",
    "contact_point",
    "identifier",
    "distribution",
];

const PAIRS: Bands = [1, 1, 2, 2, 3];

macro_rules! registry {
    ($($id:literal $key:literal $dim:ident $tier:ident $bands:expr, $rule:literal;)*) => {
        pub(super) static REGISTRY: [MetricDescriptor; 48] = [
            $(MetricDescriptor {
                id: $id,
                key: $key,
                dimension: Dimension::$dim,
                tier: Tier::$tier,
                bands: $bands,
                rule: $rule,
            },)*
        ];
    };
}

registry! {
    1 "expressiveness.extent" Expressiveness MetadataOnly DEFAULT_BANDS,
        "ratio of the 14 tracked fields that hold a value";
    2 "expressiveness.weighted_extent" Expressiveness MetadataOnly DEFAULT_BANDS,
        "weighted ratio of tracked fields present; uniform weights by default";
    3 "expressiveness.categorization" Expressiveness MetadataOnly [1, 2, 3, 5, 8],
        "count of keywords and themes; bands 1, 2, 3, 5, 8";
    4 "expressiveness.description" Expressiveness MetadataOnly DEFAULT_BANDS,
        "best description not repeating the title, ratio of words to the configured minimum";
    5 "temporal.currency" Temporal MetadataOnly DEFAULT_BANDS,
        "age of the newest of issued/modified: under 30, 90, 365, 730, 1825 days gives 5 down to 1";
    6 "temporal.update_rate" Temporal MetadataOnly DEFAULT_BANDS,
        "distinct issued/modified instants of dataset and distributions, a declared periodicity adds two";
    7 "understandability.readability" Understandability MetadataOnly DEFAULT_BANDS,
        "mean Flesch reading ease of German/English descriptions, divided by 100 as a ratio";
    8 "understandability.language_errors" Understandability MetadataOnly DEFAULT_BANDS,
        "ratio of title and description words found in the bundled word list";
    9 "understandability.example_applications" Understandability MetadataOnly DEFAULT_BANDS,
        "link to related pages or uses (rdfs:seeAlso, dct:relation, dct:isReferencedBy, foaf:page)";
    10 "rights.machine_readable_license" Rights MetadataOnly DEFAULT_BANDS,
        "a license IRI is given";
    11 "rights.human_readable_license" Rights MetadataOnly DEFAULT_BANDS,
        "a license title is given, as a label on the license node or a literal license";
    12 "rights.known_license" Rights MetadataOnly DEFAULT_BANDS,
        "ratio of license IRIs found in the license table";
    13 "rights.open_license" Rights MetadataOnly DEFAULT_BANDS,
        "ratio of license IRIs known and marked open";
    14 "rights.commercial_use" Rights MetadataOnly DEFAULT_BANDS,
        "ratio of license IRIs known to permit commercial use";
    15 "rights.permission_attributes" Rights MetadataOnly DEFAULT_BANDS,
        "ratio of license IRIs known to require attribution or share-alike, or to be public domain";
    16 "trust.provider_identity" Trust ExternalStore DEFAULT_BANDS,
        "ratio of publisher name, homepage and provider-table entry present";
    17 "trust.trusted_provider" Trust ExternalStore DEFAULT_BANDS,
        "rating of the publisher in the provider table, 0 when unlisted";
    18 "trust.metadata_authenticity" Trust ExternalStore PAIRS,
        "distinct other sources in the duplicate cluster; bands 1, 1, 2, 2, 3";
    19 "trust.digital_signatures" Trust ExternalStore DEFAULT_BANDS,
        "a signature triple in the slice or a signing provider";
    20 "community.communication" Community ExternalStore DEFAULT_BANDS,
        "discussion channels known for the dataset";
    21 "community.trust_votes" Community ExternalStore DEFAULT_BANDS,
        "average user trust vote over 5 as a ratio";
    22 "community.correctness_votes" Community ExternalStore DEFAULT_BANDS,
        "average user correctness vote over 5 as a ratio";
    23 "community.confirmation" Community ExternalStore DEFAULT_BANDS,
        "ratio of own field values repeated by another member of the duplicate cluster";
    24 "versatility.serializations" Versatility MetadataOnly PAIRS,
        "distinct formats of linked distributions; bands 1, 1, 2, 2, 3";
    25 "versatility.languages" Versatility MetadataOnly PAIRS,
        "distinct languages of tagged texts and dct:language; bands 1, 1, 2, 2, 3";
    26 "versatility.access_methods" Versatility MetadataOnly [1, 2, 3, 3, 4],
        "distinct access methods among landing page, download, access URL, FTP and service endpoints";
    27 "representation.open_format" Representation MetadataOnly DEFAULT_BANDS,
        "ratio of descriptive triples using standard namespaces";
    28 "representation.registered_format" Representation MetadataOnly DEFAULT_BANDS,
        "ratio of descriptive triples understood by the DCAT mapping";
    29 "representation.machine_processable" Representation MetadataOnly DEFAULT_BANDS,
        "ratio of literals valid for their datatype";
    30 "representation.vocabulary" Representation MetadataOnly DEFAULT_BANDS,
        "dct:conformsTo declared on the dataset";
    31 "representation.date_format" Representation MetadataOnly DEFAULT_BANDS,
        "ratio of date values typed as xsd:date or xsd:dateTime and parseable";
    32 "representation.unique_identifier" Representation MetadataOnly [1, 1, 1, 2, 2],
        "identifier present, plus one if it looks persistent (IRI, URN, DOI, UUID)";
    33 "representation.locality" Representation MetadataOnly DEFAULT_BANDS,
        "5 with a spatial value, 3 when a gazetteer place occurs in the texts";
    34 "linking.labeled_data" Linking MetadataOnly DEFAULT_BANDS,
        "ratio of slice subjects carrying a label";
    35 "linking.linked_data" Linking MetadataOnly DEFAULT_BANDS,
        "a descriptive triple points to an HTTP IRI";
    36 "linking.metadata_linkage" Linking MetadataOnly DEFAULT_BANDS,
        "count of standard namespaces besides DCAT and Dublin Core";
    37 "reachability.contact_url" Reachability MetadataOnly DEFAULT_BANDS,
        "publisher homepage or contact URL given";
    38 "reachability.contact_email" Reachability MetadataOnly DEFAULT_BANDS,
        "a syntactically valid contact or publisher email";
    39 "reachability.classic_contact" Reachability MetadataOnly DEFAULT_BANDS,
        "ratio of address, phone and named contact present";
    40 "access.open_metadata" Access MetadataOnly DEFAULT_BANDS,
        "an HTTP landing page is given";
    41 "access.retrievability" Access LongRunning DEFAULT_BANDS,
        "landing page or dataset IRI answers with success";
    42 "versioning.version_number" Versioning MetadataOnly DEFAULT_BANDS,
        "5 with a version field, 3 when a description mentions a version";
    43 "versioning.time_span" Versioning MetadataOnly DEFAULT_BANDS,
        "5 for a closed temporal range, 3 for an open one, 2 for a year range in the texts";
    44 "data.open_format" Data MetadataOnly DEFAULT_BANDS,
        "ratio of distributions in a non-proprietary format";
    45 "data.standard_format" Data MetadataOnly DEFAULT_BANDS,
        "ratio of distributions in an IANA-registered format";
    46 "data.machine_processable" Data MetadataOnly DEFAULT_BANDS,
        "ratio of distributions in a structured format";
    47 "data.unique_identifier" Data MetadataOnly DEFAULT_BANDS,
        "ratio of distributions identified by an IRI";
    48 "data.serializations" Data MetadataOnly PAIRS,
        "distinct formats of downloadable distributions; bands 1, 1, 2, 2, 3";
}

pub(super) fn measure(id: u8, c: &Ctx<'_>) -> Measure {
    match id {
        1 => extent(c),
        2 => weighted_extent(c),
        3 => Ok(Raw::Count((c.record.keywords.len() + c.record.themes.len()) as u64)),
        4 => description(c),
        5 => currency(c),
        6 => update_rate(c),
        7 => readability(c),
        8 => language_errors(c),
        9 => example_applications(c),
        10 => Ok(Raw::Boolean(!license_iris(c).is_empty())),
        11 => human_readable_license(c),
        12 => license_ratio(c, |_| true),
        13 => license_ratio(c, |l| l.open),
        14 => license_ratio(c, |l| l.permissions.contains(&Permission::CommercialUse)),
        15 => license_ratio(c, |l| {
            l.duties.contains(&Duty::Attribution) || l.duties.contains(&Duty::ShareAlike) || l.is_public_domain()
        }),
        16 => provider_identity(c),
        17 => trusted_provider(c),
        18 => authenticity(c),
        19 => signatures(c),
        20 => communication(c),
        21 => votes(c, |e| e.trust),
        22 => votes(c, |e| e.correctness),
        23 => confirmation(c),
        24 => Ok(Raw::Count(distinct_formats(c, |d| d.access_url.is_some() || d.download_url.is_some()))),
        25 => languages(c),
        26 => access_methods(c),
        27 => open_metadata_format(c),
        28 => registered_metadata_format(c),
        29 => valid_literals(c),
        30 => Ok(Raw::Boolean(dataset_objects(c, &dct::conforms_to()).next().is_some())),
        31 => date_format(c),
        32 => unique_identifier(c),
        33 => locality(c),
        34 => labeled(c),
        35 => Ok(Raw::Boolean(descriptive(c.slice).any(|t| t.object.as_iri().is_some_and(Iri::is_http)))),
        36 => metadata_linkage(c),
        37 => contact_url(c),
        38 => contact_email(c),
        39 => classic_contact(c),
        40 => Ok(Raw::Boolean(c.record.landing_page.as_ref().is_some_and(Iri::is_http))),
        41 => retrievability(c),
        42 => version_number(c),
        43 => time_span(c),
        44 => format_ratio(c, |t| t.open),
        45 => format_ratio(c, |t| t.registered),
        46 => format_ratio(c, |t| t.machine_readable),
        47 => distribution_ratio(c, |d| matches!(d.node, Subject::Iri(_))),
        48 => Ok(Raw::Count(distinct_formats(c, |d| d.download_url.is_some()))),
        _ => Err(NotComputedReason::EvaluationError),
    }
}

fn ratio(hits: usize, total: usize) -> Raw {
    if total == 0 {
        Raw::Ratio(0.0)
    } else {
        Raw::Ratio(hits as f64 / total as f64)
    }
}

fn field_present(r: &DatasetRecord, field: &str) -> bool {
    match field {
        "title" => !r.titles.is_empty(),
        "description" => !r.descriptions.is_empty(),
        "keyword" => !r.keywords.is_empty(),
        "theme" => !r.themes.is_empty(),
        "publisher" => r.publisher.as_ref().is_some_and(|p| !p.is_empty()),
        "issued" => r.issued.is_some(),
        "modified" => r.modified.is_some(),
        "accrual_periodicity" => r.accrual_periodicity.is_some(),
        "spatial" => !r.spatial.is_empty(),
        "temporal" => r.temporal.is_some_and(|t| t.start.is_some() || t.end.is_some()),
        "landing_page" => r.landing_page.is_some(),
        "contact_point" => r.contact_point.as_ref().is_some_and(|c| !c.is_empty()),
        "identifier" => r.identifier.as_ref().is_some_and(|i| !i.trim().is_empty()),
        "distribution" => !r.distributions.is_empty(),
        _ => false,
    }
}

fn extent(c: &Ctx<'_>) -> Measure {
    let present = TRACKED_FIELDS.iter().filter(|f| field_present(c.record, f)).count();
    Ok(ratio(present, TRACKED_FIELDS.len()))
}

fn weighted_extent(c: &Ctx<'_>) -> Measure {
    let Some(weights) = &c.config.weights else {
        return extent(c);
    };
    c.config.validate().map_err(|_| NotComputedReason::EvaluationError)?;
    let total: f64 = weights.values().sum();
    let got: f64 = weights
        .iter()
        .filter(|(f, _)| field_present(c.record, f))
        .map(|(_, w)| w)
        .sum();
    Ok(Raw::Ratio(got / total))
}

fn normalize_text(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn word_count(s: &str) -> usize {
    s.split_whitespace().filter(|w| w.chars().any(char::is_alphanumeric)).count()
}

fn description(c: &Ctx<'_>) -> Measure {
    let titles: Vec<String> = c.record.titles.iter().map(|t| normalize_text(&t.value)).collect();
    let min_words = c.config.min_description_words.max(1);
    let best = c
        .record
        .descriptions
        .iter()
        .map(|d| {
            let norm = normalize_text(&d.value);
            if norm.is_empty() || titles.iter().any(|t| t.contains(&norm)) {
                0.0
            } else {
                word_count(&norm).min(min_words) as f64 / min_words as f64
            }
        })
        .fold(0.0, f64::max);
    Ok(Raw::Ratio(best))
}

fn currency(c: &Ctx<'_>) -> Measure {
    let newest = [c.record.issued, c.record.modified].into_iter().flatten().map(|t| t.to_utc()).max();
    let Some(newest) = newest else {
        return Ok(Raw::Count(0));
    };
    let age = (c.config.evaluation_time - newest).max(Duration::zero()).num_days();
    let score = [30, 90, 365, 730, 1825].iter().filter(|&&limit| age < limit).count();
    Ok(Raw::Count(score as u64))
}

fn update_rate(c: &Ctx<'_>) -> Measure {
    let r = c.record;
    let instants: BTreeSet<_> = [r.issued, r.modified]
        .into_iter()
        .chain(r.distributions.iter().flat_map(|d| [d.issued, d.modified]))
        .flatten()
        .map(|t| t.to_utc())
        .collect();
    let periodicity = if r.accrual_periodicity.is_some() { 2 } else { 0 };
    Ok(Raw::Count(instants.len() as u64 + periodicity))
}

fn readability(c: &Ctx<'_>) -> Measure {
    if c.record.descriptions.is_empty() {
        return Ok(Raw::Boolean(false));
    }
    let detector = LanguageDetector::bundled();
    let scores: Vec<f64> = c
        .record
        .descriptions
        .iter()
        .filter_map(|d| {
            let lang = text_language(d, detector)?;
            flesch_reading_ease(&d.value, lang).ok()
        })
        .collect();
    if scores.is_empty() {
        return Err(NotComputedReason::NotApplicable);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok(Raw::Ratio((mean / 100.0).clamp(0.0, 1.0)))
}

fn language_errors(c: &Ctx<'_>) -> Measure {
    let texts: Vec<&LangString> = c.record.titles.iter().chain(&c.record.descriptions).collect();
    if texts.is_empty() {
        return Ok(Raw::Boolean(false));
    }
    let detector = LanguageDetector::bundled();
    let (mut known, mut total, mut usable) = (0, 0, false);
    for s in texts {
        let Some(lang) = text_language(s, detector) else {
            continue;
        };
        usable = true;
        let (k, t) = WordList::bundled(lang).count_known(&s.value);
        known += k;
        total += t;
    }
    if !usable {
        return Err(NotComputedReason::NotApplicable);
    }
    Ok(ratio(known, total))
}

fn dataset_subject(c: &Ctx<'_>) -> Subject {
    Subject::Iri(c.record.iri.clone())
}

fn dataset_objects<'a>(c: &'a Ctx<'a>, predicate: &Iri) -> impl Iterator<Item = &'a Term> + 'a {
    let subject = dataset_subject(c);
    let predicate = predicate.clone();
    c.slice
        .iter()
        .filter(move |t| t.subject == subject && t.predicate == predicate)
        .map(|t| &t.object)
}

fn example_applications(c: &Ctx<'_>) -> Measure {
    let preds = [rdfs::see_also(), dct::relation(), dct::is_referenced_by(), foaf::page()];
    let subject = dataset_subject(c);
    let found = c
        .slice
        .iter()
        .any(|t| t.subject == subject && preds.contains(&t.predicate) && t.object.as_iri().is_some());
    Ok(Raw::Boolean(found))
}

/// License IRIs on the dataset and its distributions.
fn license_iris(c: &Ctx<'_>) -> BTreeSet<Iri> {
    let mut out: BTreeSet<Iri> = c.record.distributions.iter().filter_map(|d| d.license.clone()).collect();
    out.extend(dataset_objects(c, &dct::license()).filter_map(|o| o.as_iri().cloned()));
    out
}

fn label_predicates() -> [Iri; 5] {
    [dct::title(), rdfs::label(), skos::pref_label(), foaf::name(), vcard::fn_()]
}

fn human_readable_license(c: &Ctx<'_>) -> Measure {
    let labels = label_predicates();
    let license = dct::license();
    let literal_license = c.slice.iter().any(|t| {
        t.predicate == license && t.object.as_literal().is_some_and(|l| !l.lexical().trim().is_empty())
    });
    let labeled = license_iris(c).into_iter().any(|iri| {
        let node = Subject::Iri(iri);
        let labeled = c
            .slice
            .with_subject(&node)
            .any(|t| labels.contains(&t.predicate) && t.object.as_literal().is_some());
        labeled
    });
    Ok(Raw::Boolean(literal_license || labeled))
}

fn license_ratio(c: &Ctx<'_>, pred: impl Fn(&LicenseSpec) -> bool) -> Measure {
    let iris = license_iris(c);
    let hits = iris
        .iter()
        .filter(|iri| c.stores.license_db.get(iri).is_some_and(|l| l.known && pred(l)))
        .count();
    Ok(ratio(hits, iris.len()))
}

fn provider_identity(c: &Ctx<'_>) -> Measure {
    let providers = c.stores.provider_db.ok_or(NotComputedReason::StoreUnavailable)?;
    let Some(p) = &c.record.publisher else {
        return Ok(Raw::Ratio(0.0));
    };
    let signals = [
        p.name.as_ref().is_some_and(|n| !n.trim().is_empty()),
        p.homepage.is_some(),
        providers.lookup(p).is_some(),
    ];
    Ok(ratio(signals.iter().filter(|s| **s).count(), signals.len()))
}

fn trusted_provider(c: &Ctx<'_>) -> Measure {
    let providers = c.stores.provider_db.ok_or(NotComputedReason::StoreUnavailable)?;
    let rating = c.record.publisher.as_ref().and_then(|p| providers.lookup(p)).map_or(0, |e| e.rating);
    Ok(Raw::Count(u64::from(rating)))
}

/// Catalog, else publisher, else host of the dataset IRI.
fn source_key(r: &DatasetRecord) -> String {
    if let Some(cat) = &r.catalog {
        return cat.to_string();
    }
    if let Some(p) = &r.publisher {
        if let Some(key) = p.iri.as_ref().map(|i| i.to_string()).or_else(|| p.name.as_ref().map(|n| n.to_lowercase())) {
            return key;
        }
    }
    let rest = r.iri.as_str().split_once("://").map_or(r.iri.as_str(), |(_, rest)| rest);
    rest.split('/').next().unwrap_or_default().to_owned()
}

fn authenticity(c: &Ctx<'_>) -> Measure {
    let clusters = c.stores.clusters.ok_or(NotComputedReason::NotApplicable)?;
    let own = source_key(c.record);
    let sources: HashSet<String> = clusters
        .others(&c.record.iri)
        .iter()
        .map(source_key)
        .filter(|s| *s != own)
        .collect();
    Ok(Raw::Count(sources.len() as u64))
}

fn signatures(c: &Ctx<'_>) -> Measure {
    let providers = c.stores.provider_db.ok_or(NotComputedReason::StoreUnavailable)?;
    let sig = mc::signature();
    let in_slice = c.slice.iter().any(|t| t.predicate == sig);
    let provider_signs = c.record.publisher.as_ref().and_then(|p| providers.lookup(p)).is_some_and(|e| e.signed);
    Ok(Raw::Boolean(in_slice || provider_signs))
}

fn communication(c: &Ctx<'_>) -> Measure {
    let community = c.stores.community_db.ok_or(NotComputedReason::StoreUnavailable)?;
    let listed = community.get(&c.record.iri).is_some_and(|e| !e.channels.is_empty());
    let disc = mc::discussion();
    Ok(Raw::Boolean(listed || c.slice.iter().any(|t| t.predicate == disc)))
}

fn votes(c: &Ctx<'_>, pick: impl Fn(&super::CommunityEntry) -> Option<f64>) -> Measure {
    let community = c.stores.community_db.ok_or(NotComputedReason::StoreUnavailable)?;
    let avg = community.get(&c.record.iri).and_then(pick).unwrap_or(0.0);
    Ok(Raw::Ratio(avg / 5.0))
}

/// Comparable values per field: normalized text or IRI strings.
fn field_values(r: &DatasetRecord) -> Vec<(&'static str, BTreeSet<String>)> {
    let texts = |list: &[LangString]| list.iter().map(|s| normalize_text(&s.value)).collect::<BTreeSet<_>>();
    let one = |v: Option<String>| v.into_iter().collect::<BTreeSet<_>>();
    vec![
        ("title", texts(&r.titles)),
        ("description", texts(&r.descriptions)),
        ("keyword", texts(&r.keywords)),
        ("publisher", one(r.publisher.as_ref().and_then(|p| p.name.as_ref().map(|n| normalize_text(n))))),
        ("landing_page", one(r.landing_page.as_ref().map(|i| i.to_string()))),
        ("identifier", one(r.identifier.clone())),
        ("download", r.download_urls().map(|i| i.to_string()).collect()),
    ]
}

fn confirmation(c: &Ctx<'_>) -> Measure {
    let clusters = c.stores.clusters.ok_or(NotComputedReason::NotApplicable)?;
    let others: Vec<_> = clusters.others(&c.record.iri).iter().map(field_values).collect();
    let own = field_values(c.record);
    let present: Vec<_> = own.iter().filter(|(_, v)| !v.is_empty()).collect();
    let confirmed = present
        .iter()
        .filter(|(field, values)| {
            others.iter().any(|o| o.iter().any(|(f, ov)| f == field && !ov.is_disjoint(values)))
        })
        .count();
    Ok(ratio(confirmed, present.len()))
}

fn normalized_format(d: &Distribution) -> Option<String> {
    let value = d.media_type.as_ref().or(d.format.as_ref())?;
    let (norm, _) = MediaTypeTable::bundled().normalize(value);
    (!norm.is_empty()).then_some(norm)
}

fn distinct_formats(c: &Ctx<'_>, include: impl Fn(&Distribution) -> bool) -> u64 {
    let set: BTreeSet<String> = c
        .record
        .distributions
        .iter()
        .filter(|d| include(d))
        .filter_map(normalized_format)
        .collect();
    set.len() as u64
}

fn language_key(iri: &Iri) -> String {
    let code = iri.as_str().rsplit(['/', '#']).next().unwrap_or_default().to_lowercase();
    match code.as_str() {
        "deu" | "ger" => "de".into(),
        "eng" => "en".into(),
        "fra" | "fre" => "fr".into(),
        "spa" => "es".into(),
        "ita" => "it".into(),
        "nld" | "dut" => "nl".into(),
        "pol" => "pl".into(),
        "dan" => "da".into(),
        _ => code,
    }
}

fn languages(c: &Ctx<'_>) -> Measure {
    let r = c.record;
    let mut langs: BTreeSet<String> = r
        .titles
        .iter()
        .chain(&r.descriptions)
        .chain(&r.keywords)
        .filter_map(|s| s.lang.as_ref())
        .map(|l| l.split('-').next().unwrap_or_default().to_owned())
        .collect();
    langs.extend(r.languages.iter().map(language_key));
    Ok(Raw::Count(langs.len() as u64))
}

fn access_methods(c: &Ctx<'_>) -> Measure {
    let r = c.record;
    let mut methods = BTreeSet::new();
    let is_service = |d: &Distribution, url: &Iri| {
        let lower = url.as_str().to_ascii_lowercase();
        lower.contains("service=") || lower.contains("sparql") || normalized_format(d).is_some_and(|f| f.contains("ogc"))
    };
    if r.landing_page.is_some() {
        methods.insert("landing");
    }
    for d in &r.distributions {
        for url in d.download_url.iter().chain(&d.access_url) {
            if url.scheme().eq_ignore_ascii_case("ftp") {
                methods.insert("ftp");
            }
            if is_service(d, url) {
                methods.insert("service");
            }
        }
        if d.download_url.as_ref().is_some_and(Iri::is_http) {
            methods.insert("download");
        }
        if d.access_url.as_ref().is_some_and(|a| a.is_http() && Some(a) != d.download_url.as_ref()) {
            methods.insert("access");
        }
    }
    Ok(Raw::Count(methods.len() as u64))
}

fn descriptive(slice: &Graph) -> impl Iterator<Item = &Triple> {
    let type_ = rdf::type_();
    slice.iter().filter(move |t| t.predicate != type_)
}

fn open_metadata_format(c: &Ctx<'_>) -> Measure {
    let total = descriptive(c.slice).count();
    if total == 0 {
        return Ok(Raw::Boolean(false));
    }
    let standard = descriptive(c.slice)
        .filter(|t| vocab::STANDARD_NAMESPACES.contains(&vocab::namespace_of(t.predicate.as_str())))
        .count();
    Ok(ratio(standard, total))
}

fn registered_metadata_format(c: &Ctx<'_>) -> Measure {
    let total = descriptive(c.slice).count();
    if total == 0 {
        return Ok(Raw::Boolean(false));
    }
    let type_ = rdf::type_();
    let unmapped = c.record.extra.iter().filter(|t| t.predicate != type_).count().min(total);
    Ok(ratio(total - unmapped, total))
}

fn literal_is_valid(lit: &Literal) -> bool {
    let Some(dt) = lit.datatype() else {
        return true;
    };
    let v = lit.lexical().trim();
    match dt.as_str() {
        s if s == xsd::integer().as_str() => v.parse::<i64>().is_ok(),
        s if s == xsd::non_negative_integer().as_str() => v.parse::<u64>().is_ok(),
        s if s == xsd::decimal().as_str() || s == xsd::double().as_str() => v.parse::<f64>().is_ok(),
        s if s == xsd::boolean().as_str() => matches!(v, "true" | "false" | "0" | "1"),
        s if s == xsd::date().as_str() => matches!(Timestamp::parse(v), Some(Timestamp::Date(_))),
        s if s == xsd::date_time().as_str() => matches!(Timestamp::parse(v), Some(Timestamp::DateTime(_))),
        _ => true,
    }
}

fn valid_literals(c: &Ctx<'_>) -> Measure {
    if descriptive(c.slice).next().is_none() {
        return Ok(Raw::Boolean(false));
    }
    let literals: Vec<&Literal> = c.slice.iter().filter_map(|t| t.object.as_literal()).collect();
    if literals.is_empty() {
        return Ok(Raw::Boolean(true));
    }
    Ok(ratio(literals.iter().filter(|l| literal_is_valid(l)).count(), literals.len()))
}

fn date_format(c: &Ctx<'_>) -> Measure {
    let preds = [dct::issued(), dct::modified(), dcat::start_date(), dcat::end_date()];
    let dates: Vec<&Term> = c.slice.iter().filter(|t| preds.contains(&t.predicate)).map(|t| &t.object).collect();
    if dates.is_empty() {
        return Ok(Raw::Boolean(false));
    }
    let typed = dates
        .iter()
        .filter(|o| {
            o.as_literal().is_some_and(|l| {
                l.datatype().is_some_and(|dt| *dt == xsd::date() || *dt == xsd::date_time()) && literal_is_valid(l)
            })
        })
        .count();
    Ok(ratio(typed, dates.len()))
}

fn looks_persistent(id: &str) -> bool {
    let lower = id.trim().to_ascii_lowercase();
    let uuid = lower.len() == 36
        && lower.chars().enumerate().all(|(i, ch)| {
            if matches!(i, 8 | 13 | 18 | 23) {
                ch == '-'
            } else {
                ch.is_ascii_hexdigit()
            }
        });
    let doi = lower.starts_with("10.") && lower.contains('/');
    uuid || doi || ["http://", "https://", "urn:", "doi:"].iter().any(|p| lower.starts_with(p))
}

fn unique_identifier(c: &Ctx<'_>) -> Measure {
    let Some(id) = c.record.identifier.as_ref().filter(|i| !i.trim().is_empty()) else {
        return Ok(Raw::Count(0));
    };
    Ok(Raw::Count(1 + u64::from(looks_persistent(id))))
}

fn all_texts(r: &DatasetRecord) -> impl Iterator<Item = &str> {
    r.titles.iter().chain(&r.descriptions).chain(&r.keywords).map(|s| s.value.as_str())
}

fn locality(c: &Ctx<'_>) -> Measure {
    if !c.record.spatial.is_empty() {
        return Ok(Raw::Count(5));
    }
    let gaz = Gazetteer::bundled();
    let found = all_texts(c.record).any(|t| !gaz.find(t).is_empty());
    Ok(Raw::Count(if found { 3 } else { 0 }))
}

fn labeled(c: &Ctx<'_>) -> Measure {
    let labels = label_predicates();
    let subjects: BTreeSet<&Subject> = c.slice.iter().map(|t| &t.subject).collect();
    if subjects.is_empty() {
        return Ok(Raw::Boolean(false));
    }
    let with_label = subjects
        .iter()
        .filter(|s| {
            c.slice
                .with_subject(s)
                .any(|t| labels.contains(&t.predicate) && t.object.as_literal().is_some_and(|l| !l.lexical().trim().is_empty()))
        })
        .count();
    Ok(ratio(with_label, subjects.len()))
}

fn metadata_linkage(c: &Ctx<'_>) -> Measure {
    let namespaces: BTreeSet<&str> = descriptive(c.slice)
        .map(|t| vocab::namespace_of(t.predicate.as_str()))
        .filter(|ns| vocab::STANDARD_NAMESPACES.contains(ns) && *ns != dcat::NS && *ns != dct::NS)
        .collect();
    Ok(Raw::Count(namespaces.len() as u64))
}

fn contact_url(c: &Ctx<'_>) -> Measure {
    let homepage = c.record.publisher.as_ref().is_some_and(|p| p.homepage.is_some());
    let url = c.record.contact_point.as_ref().is_some_and(|cp| cp.url.as_ref().is_some_and(|u| !u.trim().is_empty()));
    Ok(Raw::Boolean(homepage || url))
}

/// Local part of permitted characters, one `@`, and a dotted domain whose
/// last label is alphabetic.
pub(crate) fn valid_email(email: &str) -> bool {
    let Some((local, domain)) = email.trim().split_once('@') else {
        return false;
    };
    let local_ok = !local.is_empty()
        && local.len() <= 64
        && local.chars().all(|c| c.is_ascii_alphanumeric() || "!#$%&'*+/=?^_`{|}~.-".contains(c))
        && !local.starts_with('.')
        && !local.ends_with('.')
        && !local.contains("..");
    let labels: Vec<&str> = domain.split('.').collect();
    let domain_ok = labels.len() >= 2
        && labels.iter().all(|l| {
            !l.is_empty() && !l.starts_with('-') && !l.ends_with('-') && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
        })
        && labels.last().is_some_and(|tld| tld.len() >= 2 && tld.chars().all(|c| c.is_ascii_alphabetic()));
    local_ok && domain_ok
}

fn contact_email(c: &Ctx<'_>) -> Measure {
    let emails = c
        .record
        .contact_point
        .iter()
        .filter_map(|cp| cp.email.as_deref())
        .chain(c.record.publisher.iter().filter_map(|p| p.email.as_deref()));
    Ok(Raw::Boolean(emails.into_iter().any(valid_email)))
}

fn classic_contact(c: &Ctx<'_>) -> Measure {
    let cp = c.record.contact_point.as_ref();
    let filled = |v: Option<&String>| v.is_some_and(|s| !s.trim().is_empty());
    let signals = [
        filled(cp.and_then(|c| c.address.as_ref())),
        filled(cp.and_then(|c| c.phone.as_ref())),
        filled(cp.and_then(|c| c.name.as_ref())) || filled(c.record.publisher.as_ref().and_then(|p| p.name.as_ref())),
    ];
    Ok(ratio(signals.iter().filter(|s| **s).count(), signals.len()))
}

fn retrievability(c: &Ctx<'_>) -> Measure {
    let prober = c.stores.url_prober.ok_or(NotComputedReason::StoreUnavailable)?;
    let target = c
        .record
        .landing_page
        .as_ref()
        .filter(|i| i.is_http())
        .or(Some(&c.record.iri).filter(|i| i.is_http()));
    Ok(Raw::Boolean(target.is_some_and(|url| prober.probe(url))))
}

/// "version 2", "Version: 1.3", "v2.0" and the like.
fn mentions_version(text: &str) -> bool {
    let lower = text.to_lowercase();
    let tokens: Vec<&str> = lower
        .split(|c: char| c.is_whitespace() || c == ',' || c == ';' || c == '(' || c == ')')
        .filter(|t| !t.is_empty())
        .collect();
    let numeric = |t: &str| {
        let t = t.trim_end_matches(['.', ':']);
        !t.is_empty() && t.starts_with(|c: char| c.is_ascii_digit()) && t.chars().all(|c| c.is_ascii_digit() || c == '.')
    };
    tokens.windows(2).any(|w| w[0].trim_end_matches(':') == "version" && numeric(w[1]))
        || tokens.iter().any(|t| t.strip_prefix('v').is_some_and(|rest| rest.contains('.') && numeric(rest)))
}

fn version_number(c: &Ctx<'_>) -> Measure {
    if c.record.version.as_ref().is_some_and(|v| !v.trim().is_empty()) {
        return Ok(Raw::Count(5));
    }
    let mentioned = c.record.descriptions.iter().any(|d| mentions_version(&d.value));
    Ok(Raw::Count(if mentioned { 3 } else { 0 }))
}

/// Two distinct four-digit years from 1900 to 2099 in one text.
fn mentions_year_range(text: &str) -> bool {
    let years: BTreeSet<u32> = text
        .split(|c: char| !c.is_ascii_digit())
        .filter(|t| t.len() == 4)
        .filter_map(|t| t.parse().ok())
        .filter(|y| (1900..2100).contains(y))
        .collect();
    years.len() >= 2
}

fn time_span(c: &Ctx<'_>) -> Measure {
    if let Some(t) = c.record.temporal {
        match (t.start, t.end) {
            (Some(_), Some(_)) => return Ok(Raw::Count(5)),
            (Some(_), None) | (None, Some(_)) => return Ok(Raw::Count(3)),
            (None, None) => {}
        }
    }
    let in_text = all_texts(c.record).any(mentions_year_range);
    Ok(Raw::Count(if in_text { 2 } else { 0 }))
}

fn distribution_ratio(c: &Ctx<'_>, pred: impl Fn(&Distribution) -> bool) -> Measure {
    let dists = &c.record.distributions;
    Ok(ratio(dists.iter().filter(|d| pred(d)).count(), dists.len()))
}

fn format_ratio(c: &Ctx<'_>, pred: impl Fn(FormatTraits) -> bool) -> Measure {
    distribution_ratio(c, |d| normalized_format(d).and_then(|f| format_traits(&f)).is_some_and(&pred))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn email_syntax() {
        assert!(valid_email("verkehr@paderborn.de"));
        assert!(valid_email("first.last+tag@sub.example.org"));
        assert!(!valid_email("no-at-sign.example.org"));
        assert!(!valid_email("a@b"));
        assert!(!valid_email("a@@b.de"));
        assert!(!valid_email("a b@c.de"));
        assert!(!valid_email("a@c.d1"));
    }

    #[test]
    fn version_mentions() {
        assert!(mentions_version("Dies ist Version 2.1 der Daten"));
        assert!(mentions_version("Release v1.3 (2020)"));
        assert!(!mentions_version("Die Daten werden monatlich aktualisiert."));
        assert!(!mentions_version("vorhanden"));
    }

    #[test]
    fn year_ranges() {
        assert!(mentions_year_range("Daten von 2015 bis 2019"));
        assert!(!mentions_year_range("Stand 2019"));
        assert!(!mentions_year_range("12345 Einträge"));
    }

    #[test]
    fn persistent_identifiers() {
        assert!(looks_persistent("https://doi.org/10.1000/182"));
        assert!(looks_persistent("10.1000/182"));
        assert!(looks_persistent("123e4567-e89b-12d3-a456-426614174000"));
        assert!(!looks_persistent("DE-PB-0042"));
    }
}
