//! Sentence-level pre-attribution and quote attribution for answers produced
//! by retrieval-augmented generation.
//!
//! The pipeline has two stages. A class-weighted random forest first predicts
//! whether a generated sentence needs zero, one, or multiple references from
//! 24 surface features. The sentence is then either skipped or matched to the
//! closest source quote (or closest quote pair) in embedding space.
//!
//! Modules follow the pipeline order:
//!
//! * [`corpus`]: dataset records, citation-marker parsing, deduplication,
//!   class labels and stratified splits.
//! * [`features`]: tokenizer, syllable counter, n-gram model, lexicons and
//!   the 24-feature extractor.
//! * [`forest`]: balanced class weights, CART trees and the random forest.
//! * [`attribution`]: embedding providers, closest-quote and closest-pair
//!   matching, routing and correctness judging.
//! * [`eval`]: repeated stratified experiments, quartiles, confusion
//!   matrices, the Wilcoxon signed-rank test and a synthetic oracle corpus.
//! * [`document`]: document segmentation and transcript-style attribution
//!   reports.

pub mod attribution;
pub mod corpus;
pub mod document;
mod error;
pub mod eval;
pub mod features;
pub mod forest;

pub use attribution::{
    attribute_closest, attribute_closest_pair, cosine_distance, judge_attribution,
    route_and_attribute, AttributionMethod, AttributionResult, EmbeddingProvider,
    EmbeddingVector, HashEmbedder, HttpEmbedder, HttpEmbedderConfig,
};
pub use corpus::{
    assign_ref_class, load_samples, normalize_and_dedupe, parse_reference_markers,
    stratified_split, CleanLabel, LabeledCorpus, LabeledSentence, QuerySample, Quote, RefClass,
    Schema,
};
pub use document::{attribute_document, attribute_document_with, segment_document, AttributionReport};
pub use error::{Error, MarkerError, Result};
pub use features::{extract_features, FeatureExtractor, FeatureVector, Lexicons, NgramModel};
pub use forest::{balanced_class_weights, fit_forest, ForestModel, ForestParams};

/// Crate version recorded in model files and run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
