//! Corpus BLEU and paired bootstrap significance.

mod bleu;
mod bootstrap;

pub use bleu::{bleu, BleuReport, BleuStats, MAX_ORDER};
pub use bootstrap::{paired_bootstrap, SignificanceResult, MIN_SAMPLES};
