/// Properties of a data format: non-proprietary, IANA-registered, and
/// structured enough for automatic processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormatTraits {
    pub open: bool,
    pub registered: bool,
    pub machine_readable: bool,
}

const fn t(open: bool, registered: bool, machine_readable: bool) -> FormatTraits {
    FormatTraits {
        open,
        registered,
        machine_readable,
    }
}

const TABLE: &[(&str, FormatTraits)] = &[
    ("text/csv", t(true, true, true)),
    ("text/tab-separated-values", t(true, true, true)),
    ("text/plain", t(true, true, false)),
    ("text/html", t(true, true, false)),
    ("application/xml", t(true, true, true)),
    ("application/json", t(true, true, true)),
    ("application/geo+json", t(true, true, true)),
    ("application/ld+json", t(true, true, true)),
    ("application/rdf+xml", t(true, true, true)),
    ("text/turtle", t(true, true, true)),
    ("application/n-triples", t(true, true, true)),
    ("application/pdf", t(true, true, false)),
    ("application/zip", t(true, true, false)),
    ("application/gzip", t(true, true, false)),
    ("application/vnd.ms-excel", t(false, true, true)),
    ("application/vnd.openxmlformats-officedocument.spreadsheetml.sheet", t(false, true, true)),
    ("application/msword", t(false, true, false)),
    ("application/vnd.openxmlformats-officedocument.wordprocessingml.document", t(false, true, false)),
    ("application/vnd.oasis.opendocument.spreadsheet", t(true, true, true)),
    ("application/vnd.oasis.opendocument.text", t(true, true, false)),
    ("application/vnd.google-earth.kml+xml", t(true, true, true)),
    ("application/vnd.google-earth.kmz", t(true, true, true)),
    ("application/gml+xml", t(true, true, true)),
    ("application/x-shapefile", t(false, false, true)),
    ("application/vnd.ogc.wms_xml", t(true, false, true)),
    ("application/vnd.ogc.wfs_xml", t(true, false, true)),
    ("image/png", t(true, true, false)),
    ("image/jpeg", t(true, true, false)),
    ("image/tiff", t(true, true, false)),
    ("image/svg+xml", t(true, true, false)),
];

/// Traits of a normalized media type, if known.
pub fn format_traits(media_type: &str) -> Option<FormatTraits> {
    TABLE.iter().find(|(name, _)| *name == media_type).map(|(_, traits)| *traits)
}
