//! Greedy decoding.

use super::linalg::{add_row, gemm, softmax_in_place};
use super::model::{attend, encode, gather_rows, gru_cell, input_gates, pad_source};
use super::ModelSnapshot;
use crate::corpus::{Ids, Lang, TokenId, BOS, EOS, PAD, TAG_L1, TAG_L2, UNK};

/// Anything that maps sentences into a target language: a trained model or
/// the ground-truth oracle.
pub trait Translator: Sync {
    /// Stable identifier of the generating model.
    fn model_id(&self) -> String;
    fn translate(&self, sentences: &[Ids], target: Lang) -> Vec<Ids>;
}

const CHUNK: usize = 64;
const NEVER_EMIT: [TokenId; 5] = [PAD, BOS, UNK, TAG_L1, TAG_L2];

fn argmax(probs: &[f64], first_step: bool, allowed: Option<&[bool]>) -> TokenId {
    let mut best = None::<(usize, f64)>;
    for (i, &p) in probs.iter().enumerate() {
        let id = i as TokenId;
        let masked = id != EOS && allowed.is_some_and(|a| !a[i]);
        if masked || NEVER_EMIT.contains(&id) || (first_step && id == EOS) {
            continue;
        }
        // Strict comparison keeps the lowest id on ties.
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((i, p));
        }
    }
    best.map_or(EOS, |(i, _)| i as TokenId)
}

/// Greedy decode of one chunk; `observe` sees every step's distribution of
/// every still-active sentence.
fn decode_chunk(
    model: &ModelSnapshot,
    src: &[Ids],
    target: Lang,
    max_len: usize,
    observe: &mut dyn FnMut(usize, &[f64]),
) -> Vec<Ids> {
    let d = model.dims;
    let p = &model.params;
    let (v, e, hd) = (d.vocab_size, d.embed_dim, d.hidden_dim);
    let batch = src.len();
    let padded = pad_source(src, v);
    let (enc, _) = encode(model, &padded);
    let mut h = enc.out[(padded.steps - 1) * batch * hd..].to_vec();
    let mut h_next = vec![0.0; batch * hd];
    let mut prev = vec![target.tag(); batch];
    let mut out: Vec<Ids> = vec![Vec::new(); batch];
    let mut done = vec![false; batch];
    let ones = vec![1.0; batch];
    let mut alpha = vec![0.0; padded.steps];
    let mut hc = vec![0.0; batch * 2 * hd];
    let mut comb = vec![0.0; batch * hd];
    let mut logits = vec![0.0; batch * v];
    let allowed = model.output_mask.as_ref().map(|m| m.allowed(target));

    for step in 0..max_len {
        let x = gather_rows(&p.embed.data, e, &prev);
        let gx = input_gates(&p.dec, &x, batch, e);
        gru_cell(&p.dec, &gx, &h, &ones, batch, hd, &mut h_next, None);
        std::mem::swap(&mut h, &mut h_next);
        for b in 0..batch {
            let (hp, cp) = hc[b * 2 * hd..(b + 1) * 2 * hd].split_at_mut(hd);
            hp.copy_from_slice(&h[b * hd..(b + 1) * hd]);
            attend(hp, &enc.out, &padded.mask, b, batch, hd, &mut alpha, cp);
        }
        gemm(batch, 2 * hd, hd, &hc, false, &p.w_comb.data, false, &mut comb, 0.0);
        add_row(&mut comb, &p.b_comb.data);
        comb.iter_mut().for_each(|x| *x = x.tanh());
        gemm(batch, hd, v, &comb, false, &p.w_out.data, false, &mut logits, 0.0);
        add_row(&mut logits, &p.b_out.data);
        for b in 0..batch {
            if done[b] {
                continue;
            }
            let row = &mut logits[b * v..(b + 1) * v];
            softmax_in_place(row);
            observe(b, row);
            let tok = argmax(row, step == 0, allowed);
            if tok == EOS {
                done[b] = true;
            } else {
                out[b].push(tok);
                prev[b] = tok;
            }
        }
        if done.iter().all(|&x| x) {
            break;
        }
    }
    out
}

impl ModelSnapshot {
    /// Greedy translation into `target`, at most `max_len` tokens per
    /// sentence. Never emits PAD, BOS, UNK, a language tag or a token the
    /// output mask excludes, and never an empty sentence (EOS is barred at
    /// the first step).
    pub fn translate_with(&self, sentences: &[Ids], target: Lang, max_len: usize) -> Vec<Ids> {
        let mut out = Vec::with_capacity(sentences.len());
        for chunk in sentences.chunks(CHUNK) {
            out.extend(decode_chunk(self, chunk, target, max_len, &mut |_, _| {}));
        }
        out
    }
}

impl Translator for ModelSnapshot {
    fn model_id(&self) -> String {
        self.fingerprint()
    }

    fn translate(&self, sentences: &[Ids], target: Lang) -> Vec<Ids> {
        self.translate_with(sentences, target, self.dims.max_decode_len)
    }
}

/// Output distribution at every decode step of a single sentence.
pub fn step_distributions(model: &ModelSnapshot, src: &Ids, target: Lang, max_len: usize) -> Vec<Vec<f64>> {
    let mut dists = Vec::new();
    decode_chunk(model, std::slice::from_ref(src), target, max_len, &mut |_, p| {
        dists.push(p.to_vec())
    });
    dists
}
