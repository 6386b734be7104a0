//! Extraction of actor-topic ("socio-semantic") networks from tweet corpora.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`corpus`] loads delimited tweet exports and filters records,
//! * [`tokenizer`] splits text into hashtags, mentions, urls and words,
//! * [`freq`] counts document frequencies and selects thresholded vocabularies,
//! * [`matrix`] builds the tweets × actants incidence matrix and its
//!   co-occurrence matrix `AᵀA`,
//! * [`graph`] turns co-occurrences into weighted graphs, compares the
//!   whole-matrix network with the 2-mode network, clusters and lays out,
//! * [`export`] writes Pajek, VOSviewer, CSV and SVG files,
//! * [`pipeline`] wires everything together for the command line.

pub mod actant;
pub mod corpus;
pub mod error;
pub mod export;
pub mod freq;
pub mod graph;
pub mod matrix;
pub mod pipeline;
pub mod tokenizer;

pub use actant::{ActantClass, ActantKey};
pub use error::{Error, Result};
