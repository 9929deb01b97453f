//! Metadata quality and integration pipeline for DCAT catalogs.

pub mod api;
pub mod clean;
pub mod dedup;
pub mod enrich;
pub mod license;
pub mod model;
pub mod quality;
pub mod search;
pub mod rdf;
pub mod util;
pub mod vocab;

#[cfg(feature = "testkit")]
pub mod testkit;
