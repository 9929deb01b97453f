use std::fmt;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime, SecondsFormat, TimeZone, Utc};

use crate::rdf::Literal;
use crate::vocab::xsd;

/// An ISO-8601 date or date-time as found in `dct:issued` / `dct:modified`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timestamp {
    Date(NaiveDate),
    DateTime(DateTime<FixedOffset>),
}

impl Timestamp {
    /// Accepts `YYYY-MM-DD`, RFC 3339 date-times and offset-less date-times
    /// (read as UTC).
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Ok(date) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
            return Some(Timestamp::Date(date));
        }
        if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
            return Some(Timestamp::DateTime(dt));
        }
        ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"]
            .iter()
            .find_map(|fmt| NaiveDateTime::parse_from_str(text, fmt).ok())
            .map(|naive| Timestamp::DateTime(Utc.from_utc_datetime(&naive).fixed_offset()))
    }

    /// Instant in UTC; dates count from midnight.
    pub fn to_utc(&self) -> DateTime<Utc> {
        match self {
            Timestamp::Date(d) => Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight")),
            Timestamp::DateTime(dt) => dt.with_timezone(&Utc),
        }
    }

    pub fn to_literal(&self) -> Literal {
        match self {
            Timestamp::Date(_) => Literal::typed(self.to_string(), xsd::date()),
            Timestamp::DateTime(_) => Literal::typed(self.to_string(), xsd::date_time()),
        }
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timestamp::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            Timestamp::DateTime(dt) => f.write_str(&dt.to_rfc3339_opts(SecondsFormat::AutoSi, true)),
        }
    }
}
