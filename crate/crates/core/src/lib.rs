//! Core building blocks for knowledge-graph matching: an indexed in-memory
//! RDF store, alignments of correspondences with extensible feature values,
//! label-based candidate matchers, structural feature filters, and
//! gold-standard-aware evaluation.

pub mod alignment;
pub mod evaluation;
pub mod filters;
pub mod matchers;
pub mod numfmt;
pub mod rdf;
pub mod vocab;

pub use alignment::{
    judge, Alignment, AlignmentError, Correspondence, GoldStandardCompleteness, Judgement,
    Relation, TestCase,
};
pub use rdf::{Direction, Graph, GraphBuilder, Literal, NtParseError, Object};
