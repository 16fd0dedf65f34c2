//! Corruption function for the denoising auto-encoder: token drops, UNK
//! blanks and bounded local shuffles.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{TokenId, UNK};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub p_drop: f64,
    pub p_blank: f64,
    pub shuffle_k: usize,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            p_drop: 0.1,
            p_blank: 0.1,
            shuffle_k: 3,
        }
    }
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec {
        p_drop: 0.0,
        p_blank: 0.0,
        shuffle_k: 0,
    };

    pub fn validate(&self) -> Result<()> {
        for (field, p) in [("p_drop", self.p_drop), ("p_blank", self.p_blank)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(field, format!("{p} is not a probability")));
            }
        }
        if self.p_drop + self.p_blank > 1.0 {
            return Err(Error::invalid("p_blank", "p_drop + p_blank exceeds 1"));
        }
        Ok(())
    }
}

/// Drops or blanks each token independently, then shuffles by sorting on
/// `position + U(0, k + 1)`, which moves no token more than `k` places.
/// At least one token always survives.
pub fn apply_noise<R: Rng + ?Sized>(sentence: &[TokenId], spec: &NoiseSpec, rng: &mut R) -> Vec<TokenId> {
    debug_assert!(!sentence.is_empty());
    let mut kept = Vec::with_capacity(sentence.len());
    for &t in sentence {
        let u: f64 = rng.gen();
        if u < spec.p_drop {
            continue;
        }
        kept.push(if u < spec.p_drop + spec.p_blank { UNK } else { t });
    }
    if kept.is_empty() && !sentence.is_empty() {
        kept.push(sentence[rng.gen_range(0..sentence.len())]);
    }
    if spec.shuffle_k == 0 || kept.len() < 2 {
        return kept;
    }
    let span = (spec.shuffle_k + 1) as f64;
    let mut keyed: Vec<(f64, TokenId)> = kept
        .into_iter()
        .enumerate()
        .map(|(i, t)| (i as f64 + rng.gen::<f64>() * span, t))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_noise_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = [7, 8, 9, 10, 11];
        assert_eq!(apply_noise(&s, &NoiseSpec::NONE, &mut rng), s);
    }

    #[test]
    fn full_drop_keeps_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = NoiseSpec {
            p_drop: 1.0,
            p_blank: 0.0,
            shuffle_k: 0,
        };
        for _ in 0..100 {
            let out = apply_noise(&[7, 8, 9, 10, 11], &spec, &mut rng);
            assert_eq!(out.len(), 1);
            assert!((7..=11).contains(&out[0]));
        }
    }

    #[test]
    fn full_blank_gives_unks() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = NoiseSpec {
            p_drop: 0.0,
            p_blank: 1.0,
            shuffle_k: 2,
        };
        assert_eq!(apply_noise(&[7, 8, 9], &spec, &mut rng), vec![UNK; 3]);
    }

    #[test]
    fn pure_shuffle_is_bounded_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = NoiseSpec {
            p_drop: 0.0,
            p_blank: 0.0,
            shuffle_k: 2,
        };
        let s: Vec<TokenId> = (10..22).collect();
        for _ in 0..500 {
            let out = apply_noise(&s, &spec, &mut rng);
            let mut sorted = out.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, s);
            for (pos, t) in out.iter().enumerate() {
                assert!(pos.abs_diff((t - 10) as usize) <= 2);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(NoiseSpec::default().validate().is_ok());
        let bad = NoiseSpec {
            p_drop: 0.7,
            p_blank: 0.6,
            shuffle_k: 0,
        };
        assert!(bad.validate().is_err());
        let bad = NoiseSpec {
            p_drop: -0.1,
            ..NoiseSpec::NONE
        };
        assert!(matches!(bad.validate(), Err(Error::Invalid { field: "p_drop", .. })));
    }
}
