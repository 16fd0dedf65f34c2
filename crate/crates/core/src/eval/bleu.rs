//! Corpus-level BLEU-4 with multi-bleu semantics: clipped n-gram matches
//! aggregated over the corpus, unsmoothed geometric mean, brevity penalty.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
    pub score: f64,
}

/// Additive sufficient statistics of one or more sentences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

impl BleuStats {
    pub fn sentence<T: Eq + Hash>(hyp: &[T], reference: &[T]) -> Self {
        let mut s = BleuStats {
            hyp_len: hyp.len(),
            ref_len: reference.len(),
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let h = ngram_counts(hyp, n);
            let r = ngram_counts(reference, n);
            s.totals[n - 1] = hyp.len().saturating_sub(n - 1);
            s.matches[n - 1] = h
                .iter()
                .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
                .sum();
        }
        s
    }

    pub fn add(&mut self, o: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
    }

    pub fn report(&self) -> BleuReport {
        let mut precisions = [0.0; MAX_ORDER];
        for n in 0..MAX_ORDER {
            if self.totals[n] > 0 {
                precisions[n] = self.matches[n] as f64 / self.totals[n] as f64;
            }
        }
        let (c, r) = (self.hyp_len as f64, self.ref_len as f64);
        let brevity_penalty = if c == 0.0 {
            0.0
        } else {
            (1.0 - r / c).exp().min(1.0)
        };
        let score = if precisions.iter().any(|&p| p == 0.0) {
            0.0
        } else {
            let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
            100.0 * brevity_penalty * log_mean.exp()
        };
        BleuReport {
            precisions,
            brevity_penalty,
            hyp_len: self.hyp_len,
            ref_len: self.ref_len,
            score,
        }
    }
}

pub(crate) fn corpus_stats<T: Eq + Hash>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<Vec<BleuStats>> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            what: "hypotheses/references",
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if refs.is_empty() {
        return Err(Error::EmptyCorpus("references"));
    }
    Ok(hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| BleuStats::sentence(h, r))
        .collect())
}

/// Single-reference corpus BLEU over any token type.
pub fn bleu<T: Eq + Hash>(hyps: &[Vec<T>], refs: &[Vec<T>]) -> Result<BleuReport> {
    let mut total = BleuStats::default();
    for s in corpus_stats(hyps, refs)? {
        total.add(&s);
    }
    Ok(total.report())
}
