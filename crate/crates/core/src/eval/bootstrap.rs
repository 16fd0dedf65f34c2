//! Paired bootstrap resampling over test sentences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::hash::Hash;

use super::bleu::{corpus_stats, BleuStats};
use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub system_a: String,
    pub system_b: String,
    pub samples: usize,
    /// Fraction of resamples where A scored strictly higher.
    pub win_fraction: f64,
    /// Fraction of resamples where B scored at least as high as A.
    pub p_value: f64,
    pub significant_at_01: bool,
}

/// Tests whether system A beats system B: resamples test indices with
/// replacement `samples` times and counts how often BLEU(B) ≥ BLEU(A).
#[allow(clippy::too_many_arguments)]
pub fn paired_bootstrap<T: Eq + Hash>(
    system_a: &str,
    hyp_a: &[Vec<T>],
    system_b: &str,
    hyp_b: &[Vec<T>],
    refs: &[Vec<T>],
    samples: usize,
    seed: u64,
) -> Result<SignificanceResult> {
    if samples < MIN_SAMPLES {
        return Err(Error::invalid("samples", format!("at least {MIN_SAMPLES} required")));
    }
    let a = corpus_stats(hyp_a, refs)?;
    let b = corpus_stats(hyp_b, refs)?;
    let n = refs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut wins, mut not_better) = (0usize, 0usize);
    for _ in 0..samples {
        let (mut sa, mut sb) = (BleuStats::default(), BleuStats::default());
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            sa.add(&a[i]);
            sb.add(&b[i]);
        }
        let (ba, bb) = (sa.report().score, sb.report().score);
        if ba > bb {
            wins += 1;
        }
        if bb >= ba {
            not_better += 1;
        }
    }
    let p_value = not_better as f64 / samples as f64;
    Ok(SignificanceResult {
        system_a: system_a.to_string(),
        system_b: system_b.to_string(),
        samples,
        win_fraction: wins as f64 / samples as f64,
        p_value,
        significant_at_01: p_value < 0.01,
    })
}
