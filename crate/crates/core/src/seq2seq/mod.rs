//! A small attentional GRU encoder-decoder shared by both translation
//! directions, with hand-derived gradients, Adam, and greedy decoding.
//!
//! The decoder is Luong-style: the recurrent state is computed from the
//! previous token only, then attended against the encoder states and passed
//! through a tanh combination layer before the output projection. The target
//! language is selected by feeding its tag token as the first decoder input.

mod adam;
mod decode;
mod gradcheck;
pub mod linalg;
mod model;
mod snapshot;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use adam::{clip_norm, OptConfig, OptState};
pub use decode::{step_distributions, Translator};
pub use gradcheck::{grad_check, grad_check_with};
pub use model::{forward_loss, loss_only, Loss};

use crate::corpus::{Ids, Lang};
use crate::error::{Error, Result};

pub const INIT_RANGE: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub max_decode_len: usize,
}

impl ModelDims {
    pub fn new(vocab_size: usize) -> Self {
        ModelDims {
            vocab_size,
            embed_dim: 32,
            hidden_dim: 64,
            max_decode_len: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("vocab_size", self.vocab_size),
            ("embed_dim", self.embed_dim),
            ("hidden_dim", self.hidden_dim),
            ("max_decode_len", self.max_decode_len),
        ] {
            if v == 0 {
                return Err(Error::invalid(field, "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    fn uniform<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Tensor {
            rows,
            cols,
            data: (0..rows * cols)
                .map(|_| rng.gen_range(-INIT_RANGE..INIT_RANGE))
                .collect(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Gated recurrent cell; gate blocks are laid out `[update | reset | candidate]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gru {
    pub wx: Tensor,
    pub uh: Tensor,
    pub bx: Tensor,
    pub bh: Tensor,
}

impl Gru {
    fn uniform<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        Gru {
            wx: Tensor::uniform(input, 3 * hidden, rng),
            uh: Tensor::uniform(hidden, 3 * hidden, rng),
            bx: Tensor::uniform(1, 3 * hidden, rng),
            bh: Tensor::uniform(1, 3 * hidden, rng),
        }
    }

    fn zeros(input: usize, hidden: usize) -> Self {
        Gru {
            wx: Tensor::zeros(input, 3 * hidden),
            uh: Tensor::zeros(hidden, 3 * hidden),
            bx: Tensor::zeros(1, 3 * hidden),
            bh: Tensor::zeros(1, 3 * hidden),
        }
    }
}

/// Every trainable tensor; gradients and Adam moments share this layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub embed: Tensor,
    pub enc: Gru,
    pub dec: Gru,
    pub w_comb: Tensor,
    pub b_comb: Tensor,
    pub w_out: Tensor,
    pub b_out: Tensor,
}

pub const PARAM_NAMES: [&str; 13] = [
    "embed", "enc.wx", "enc.uh", "enc.bx", "enc.bh", "dec.wx", "dec.uh", "dec.bx", "dec.bh",
    "w_comb", "b_comb", "w_out", "b_out",
];

impl Params {
    fn uniform<R: Rng>(d: &ModelDims, rng: &mut R) -> Self {
        let (v, e, h) = (d.vocab_size, d.embed_dim, d.hidden_dim);
        Params {
            embed: Tensor::uniform(v, e, rng),
            enc: Gru::uniform(e, h, rng),
            dec: Gru::uniform(e, h, rng),
            w_comb: Tensor::uniform(2 * h, h, rng),
            b_comb: Tensor::uniform(1, h, rng),
            w_out: Tensor::uniform(h, v, rng),
            b_out: Tensor::uniform(1, v, rng),
        }
    }

    pub fn zeros(d: &ModelDims) -> Self {
        let (v, e, h) = (d.vocab_size, d.embed_dim, d.hidden_dim);
        Params {
            embed: Tensor::zeros(v, e),
            enc: Gru::zeros(e, h),
            dec: Gru::zeros(e, h),
            w_comb: Tensor::zeros(2 * h, h),
            b_comb: Tensor::zeros(1, h),
            w_out: Tensor::zeros(h, v),
            b_out: Tensor::zeros(1, v),
        }
    }

    /// Tensors in `PARAM_NAMES` order.
    pub fn tensors(&self) -> [&Tensor; 13] {
        [
            &self.embed,
            &self.enc.wx,
            &self.enc.uh,
            &self.enc.bx,
            &self.enc.bh,
            &self.dec.wx,
            &self.dec.uh,
            &self.dec.bx,
            &self.dec.bh,
            &self.w_comb,
            &self.b_comb,
            &self.w_out,
            &self.b_out,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor; 13] {
        [
            &mut self.embed,
            &mut self.enc.wx,
            &mut self.enc.uh,
            &mut self.enc.bx,
            &mut self.enc.bh,
            &mut self.dec.wx,
            &mut self.dec.uh,
            &mut self.dec.bx,
            &mut self.dec.bh,
            &mut self.w_comb,
            &mut self.b_comb,
            &mut self.w_out,
            &mut self.b_out,
        ]
    }

    pub fn len(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, other: &Params, scale: f64) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.data.iter_mut().zip(&b.data) {
                *x += scale * y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for t in self.tensors_mut() {
            t.data.iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.data.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Name of the first tensor holding a NaN or infinity.
    pub fn first_non_finite(&self) -> Option<&'static str> {
        PARAM_NAMES
            .iter()
            .zip(self.tensors())
            .find(|(_, t)| t.data.iter().any(|x| !x.is_finite()))
            .map(|(n, _)| *n)
    }

    pub fn check_shapes(&self, other: &Params) -> Result<()> {
        for ((name, a), b) in PARAM_NAMES.iter().zip(self.tensors()).zip(other.tensors()) {
            if a.shape() != b.shape() {
                return Err(Error::Shape {
                    param: name.to_string(),
                    expected: a.shape(),
                    got: b.shape(),
                });
            }
        }
        Ok(())
    }
}

/// Immutable parameter set of a translation model at an iteration boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSnapshot {
    pub dims: ModelDims,
    pub params: Params,
    /// Optimizer updates applied since initialisation.
    pub step: u64,
    /// Restricts what greedy decoding may emit in each target language.
    pub output_mask: Option<OutputMask>,
}

/// Per-language set of tokens the decoder may emit. Built from the tokens
/// observed in each language's monolingual corpus, it stops the model from
/// answering a request for one language with words of the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputMask {
    l1: Vec<bool>,
    l2: Vec<bool>,
}

impl OutputMask {
    pub fn observed(vocab_size: usize, l1: &[Ids], l2: &[Ids]) -> Result<Self> {
        let mark = |corpus: &[Ids]| -> Result<Vec<bool>> {
            let mut seen = vec![false; vocab_size];
            for &t in corpus.iter().flatten() {
                *seen.get_mut(t as usize).ok_or_else(|| Error::OutOfVocabulary { token: format!("id {t}") })? = true;
            }
            Ok(seen)
        };
        OutputMask::from_flags(mark(l1)?, mark(l2)?)
    }

    pub(crate) fn from_flags(l1: Vec<bool>, l2: Vec<bool>) -> Result<Self> {
        if l1.len() != l2.len() {
            return Err(Error::invalid("output_mask", "languages disagree on vocabulary size"));
        }
        if !l1.iter().any(|&b| b) || !l2.iter().any(|&b| b) {
            return Err(Error::invalid("output_mask", "a language allows no token"));
        }
        Ok(OutputMask { l1, l2 })
    }

    pub fn vocab_size(&self) -> usize {
        self.l1.len()
    }

    pub fn allowed(&self, lang: Lang) -> &[bool] {
        match lang {
            Lang::L1 => &self.l1,
            Lang::L2 => &self.l2,
        }
    }
}

/// Uniform(−0.08, 0.08) initialisation, deterministic per seed.
pub fn init_model(dims: ModelDims, seed: u64) -> Result<ModelSnapshot> {
    dims.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ModelSnapshot {
        params: Params::uniform(&dims, &mut rng),
        dims,
        step: 0,
        output_mask: None,
    })
}
