//! Detection of requirements smells in natural-language requirements.
//!
//! The crate is organised along the analysis pipeline:
//!
//! - [`ingest`] loads requirements artifacts and segments them into items,
//! - [`nlp`] annotates item text with tokens, POS tags, lemmas and degree,
//! - [`smells`] runs the eight smell detectors over annotated items,
//! - [`metrics`] turns findings into densities, story-part tallies and treemaps,
//! - [`evalkit`] compares findings against gold annotations.
//!
//! [`pipeline`] glues the first four together for whole corpora.

pub mod evalkit;
pub mod ingest;
pub mod metrics;
pub mod nlp;
pub mod pipeline;
pub mod smells;
mod span;

pub use span::{Span, TokenSpan};
