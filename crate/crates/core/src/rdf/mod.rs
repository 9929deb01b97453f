//! RDF terms, graphs, N-Triples/Turtle I/O, a three-way triple index and
//! per-dataset slicing.

mod graph;
mod index;
mod ntriples;
mod slice;
mod term;
mod turtle;

pub use graph::Graph;
pub use index::{Pattern, TripleIndex};
pub use ntriples::{parse_ntriples, parse_ntriples_doc, write_ntriples, write_ntriples_to, ParseError};
pub use slice::{dataset_iris, slice_dataset, split_dataset_graphs, split_indexed, SliceError};
pub use term::{normalize_lang_tag, BlankNode, Iri, Literal, Subject, Term, TermError, Triple};
pub use turtle::{parse_turtle, parse_turtle_doc};

/// Parses either serialization, choosing by file extension (`.ttl` is Turtle,
/// anything else N-Triples).
pub fn parse_document(text: &str, file_name: &str) -> Result<Graph, ParseError> {
    if file_name.ends_with(".ttl") {
        parse_turtle_doc(text, Some(file_name))
    } else {
        parse_ntriples_doc(text, Some(file_name))
    }
}
