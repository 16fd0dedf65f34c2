//! Unsupervised neural machine translation on synthetic language pairs, with
//! back-translation and two self-training strategies for the case where one
//! monolingual corpus is much larger than the other.
//!
//! Pipeline: [`toylang`] generates an invertible language pair and its
//! corpora; [`corpus`] builds the shared vocabulary and batches; [`noise`]
//! corrupts inputs for denoising; [`seq2seq`] is the translation model;
//! [`unmt`] trains the baseline; [`selftrain`] adds the self-training
//! strategies; [`eval`] scores with BLEU and bootstrap tests; [`harness`]
//! runs and reports experiments.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod harness;
pub mod noise;
pub mod selftrain;
pub mod seq2seq;
pub mod toylang;
pub mod unmt;

pub use error::{Error, Result};
