use chrono::{FixedOffset, NaiveDate, TimeZone};
use rand::seq::SliceRandom;
use rand::Rng;

use super::TestRng;
use crate::model::{
    AgentRef, ContactInfo, DatasetRecord, Distribution, GeoAnnotation, GeoLevel, LangString,
    TemporalRange, Timestamp,
};
use crate::rdf::{BlankNode, Iri, Literal, Triple};

const WORDS: &[&str] = &[
    "Haltestellen", "Verkehr", "Stadt", "Daten", "Luftqualität", "Bus", "stops", "transport",
    "air", "quality", "Paderborn", "Bonn", "Messwerte", "annual", "report", "Bevölkerung",
    "", " ", "x", "Straßenbahn", "S-Bahn", "2020",
];
const LANGS: &[Option<&str>] = &[None, Some("de"), Some("en"), Some("fr"), Some("de-at")];
const MEDIA: &[&str] = &["text/csv", "CSV", "application/json", "xlsx", "weird/x", "PDF", "", "application/zip"];

fn iri(s: String) -> Iri {
    Iri::new(s).expect("generated IRI")
}

fn words(rng: &mut TestRng, max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn lang_strings(rng: &mut TestRng, max_items: usize, max_words: usize) -> Vec<LangString> {
    (0..rng.gen_range(0..=max_items))
        .map(|_| LangString::new(words(rng, max_words), *LANGS.choose(rng).unwrap()))
        .collect()
}

fn maybe<T>(rng: &mut TestRng, p: f64, f: impl FnOnce(&mut TestRng) -> T) -> Option<T> {
    rng.gen_bool(p).then(|| f(rng))
}

fn timestamp(rng: &mut TestRng) -> Timestamp {
    let date = NaiveDate::from_ymd_opt(rng.gen_range(1995..=2026), rng.gen_range(1..=12), rng.gen_range(1..=28))
        .expect("valid date");
    if rng.gen_bool(0.5) {
        Timestamp::Date(date)
    } else {
        let offset = FixedOffset::east_opt(rng.gen_range(-12..=12) * 3600).unwrap();
        let naive = date.and_hms_opt(rng.gen_range(0..24), rng.gen_range(0..60), 0).unwrap();
        Timestamp::DateTime(offset.from_local_datetime(&naive).single().unwrap())
    }
}

fn text(rng: &mut TestRng) -> String {
    ["Amt für Statistik", "info@example.org", "not an email", "+49 5251 600", "Hauptstr. 1", "", "https://example.org/kontakt"]
        .choose(rng)
        .unwrap()
        .to_string()
}

/// A random record that satisfies the model invariants and survives a
/// write/read cycle. Values are deliberately uneven: empty strings, foreign
/// language tags, unknown formats and missing URLs all occur.
pub fn random_record(rng: &mut TestRng, id: usize) -> DatasetRecord {
    let base = format!("http://ex/dataset/{id}");
    let mut r = DatasetRecord::new(iri(base.clone()));
    r.titles = lang_strings(rng, 2, 5);
    r.descriptions = lang_strings(rng, 2, 30);
    r.keywords = lang_strings(rng, 9, 1);
    r.themes = (0..rng.gen_range(0..4))
        .map(|_| iri(format!("http://publications.europa.eu/resource/authority/data-theme/T{}", rng.gen_range(0..8))))
        .collect();
    r.publisher = maybe(rng, 0.7, |rng| {
        let mut a = AgentRef {
            iri: maybe(rng, 0.5, |rng| iri(format!("http://ex/agent/{}", rng.gen_range(0..5)))),
            name: maybe(rng, 0.7, text),
            homepage: maybe(rng, 0.4, |rng| iri(format!("https://agency{}.example.org/", rng.gen_range(0..3)))),
            email: maybe(rng, 0.4, text),
        };
        if a.is_empty() {
            a.name = Some("Agency".into());
        }
        a
    });
    r.catalog = maybe(rng, 0.5, |rng| iri(format!("http://ex/catalog/{}", rng.gen_range(0..3))));
    r.issued = maybe(rng, 0.6, timestamp);
    r.modified = maybe(rng, 0.6, timestamp);
    r.accrual_periodicity = maybe(rng, 0.4, |rng| {
        let f = ["DAILY", "WEEKLY", "MONTHLY", "ANNUAL", "IRREG", "UNKNOWN"].choose(rng).unwrap();
        iri(format!("http://publications.europa.eu/resource/authority/frequency/{f}"))
    });
    r.spatial = (0..rng.gen_range(0..3))
        .map(|i| GeoAnnotation {
            place_iri: maybe(rng, 0.5, |_| iri(format!("{base}/place/{i}"))),
            place_name: ["Paderborn", "Bonn", "Nordrhein-Westfalen", ""].choose(rng).unwrap().to_string(),
            level: *[GeoLevel::Nuts0, GeoLevel::Nuts1, GeoLevel::Lau, GeoLevel::Point].choose(rng).unwrap(),
            lat: f64::from(rng.gen_range(-900..=900)) / 10.0,
            lon: f64::from(rng.gen_range(-1800..=1800)) / 10.0,
        })
        .collect();
    r.temporal = maybe(rng, 0.4, |rng| TemporalRange {
        start: maybe(rng, 0.8, timestamp),
        end: maybe(rng, 0.6, timestamp),
    })
    .filter(|t| t.start.is_some() || t.end.is_some());
    r.landing_page = maybe(rng, 0.5, |_| iri(format!("{base}/page")));
    r.contact_point = maybe(rng, 0.5, |rng| ContactInfo {
        iri: None,
        name: maybe(rng, 0.6, text),
        email: maybe(rng, 0.6, text),
        url: maybe(rng, 0.3, |_| "https://example.org/kontakt".to_string()),
        phone: maybe(rng, 0.3, text),
        address: maybe(rng, 0.3, text),
    })
    .filter(|c| !c.is_empty());
    r.identifier = maybe(rng, 0.5, |rng| format!("id-{}", rng.gen_range(0..1000)));
    r.version = maybe(rng, 0.3, |rng| format!("{}.{}", rng.gen_range(0..3), rng.gen_range(0..10)));
    r.languages = (0..rng.gen_range(0..3))
        .map(|_| {
            let l = ["DEU", "ENG", "FRA"].choose(rng).unwrap();
            iri(format!("http://publications.europa.eu/resource/authority/language/{l}"))
        })
        .collect();
    r.distributions = (0..rng.gen_range(0..4))
        .map(|i| {
            let mut d = if rng.gen_bool(0.5) {
                Distribution::new(iri(format!("{base}/dist/{i}")))
            } else {
                Distribution::new(BlankNode::new(format!("d{id}x{i}")).unwrap())
            };
            let host = rng.gen_range(0..4);
            d.access_url = maybe(rng, 0.6, |_| iri(format!("https://portal{host}.example.org/{id}/{i}")));
            d.download_url = maybe(rng, 0.6, |rng| {
                iri(format!("https://files{host}.example.org/data/{}.csv", rng.gen_range(0..20)))
            });
            d.media_type = maybe(rng, 0.6, |rng| MEDIA.choose(rng).unwrap().to_string());
            d.format = maybe(rng, 0.4, |rng| MEDIA.choose(rng).unwrap().to_uppercase());
            d.license = maybe(rng, 0.6, |rng| {
                let l = ["CC-BY-4.0", "CC0-1.0", "ODbL-1.0", "CC-BY-SA-4.0", "proprietary"].choose(rng).unwrap();
                iri(format!("http://ex/license/{l}"))
            });
            d.byte_size = maybe(rng, 0.3, |rng| rng.gen_range(0..10_000_000));
            d.issued = maybe(rng, 0.3, timestamp);
            d.modified = maybe(rng, 0.3, timestamp);
            d
        })
        .collect();
    r.extra = (0..rng.gen_range(0..3))
        .map(|k| Triple::new(r.iri.clone(), iri(format!("http://ex/unmapped/{k}")), Literal::plain(words(rng, 3))))
        .collect();
    r.canonicalize();
    r
}
