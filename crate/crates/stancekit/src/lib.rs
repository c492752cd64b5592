//! Semi-supervised stance classification for tweets.
//!
//! The pipeline harvests weakly labeled training data with stance-bearing
//! seed hashtags, cleans and normalizes it, extracts lexicon-generalized
//! features over dependency parses, trains per-topic Multinomial Naive Bayes
//! models, and evaluates them with the two-class averaged F1 used for stance
//! tasks. Every stage is deterministic under a fixed seed.
//!
//! Modules follow the pipeline order:
//!
//! - [`corpus`]: tweet and dependency-parse records with file formats
//! - [`harvest`]: seed rules, weak labeling, quality filters, balancing
//! - [`normalize`]: tokenization, squeezing, dictionary/lexicon repair
//! - [`stem`]: suffix-stripping stemmer for n-gram generalization
//! - [`lexicons`]: category, scored, and polarity lexicons
//! - [`pmi`]: n-gram/topic association tables and pools
//! - [`features`]: the feature families and batch extraction
//! - [`model`]: Multinomial Naive Bayes
//! - [`selection`]: correlation and gain-ratio feature ranking
//! - [`eval`]: metrics, ablations, learning curves
//! - [`config`], [`commands`], [`cli`], [`manifest`]: the runnable pipeline

pub mod cli;
pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod harvest;
pub mod lexicons;
pub mod manifest;
pub mod model;
pub mod normalize;
pub mod pmi;
pub mod selection;
pub mod stem;

pub use error::{Error, Result};
