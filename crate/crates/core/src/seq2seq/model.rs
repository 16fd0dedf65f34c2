//! Teacher-forced forward pass and its reverse-mode gradient.
//!
//! All per-step activations are stored time-major (`row = t * batch + b`).

use super::linalg::{add_col_sums, add_row, dot, gemm, sigmoid, softmax_in_place};
use super::{Gru, ModelSnapshot, Params};
use crate::corpus::{Ids, Lang, TokenId, EOS, PAD, UNK};
use crate::error::{Error, Result};

/// Mean per-real-token cross-entropy and its gradient.
#[derive(Debug, Clone)]
pub struct Loss {
    pub value: f64,
    pub tokens: usize,
    pub grads: Params,
}

/// Activations of one GRU pass kept for the backward sweep.
pub(super) struct GruTrace {
    pub steps: usize,
    pub batch: usize,
    pub hidden: usize,
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub n: Vec<f64>,
    pub gh_n: Vec<f64>,
    pub mask: Vec<f64>,
    /// Output state after each step (held through padding).
    pub out: Vec<f64>,
}

/// One GRU transition for a whole batch.
///
/// `gx` is `x·Wx + bx` (B×3H), `h` the previous state (B×H). Writes the new
/// state into `h_out` and, when given, the gate activations into `trace_*`.
#[allow(clippy::too_many_arguments)]
pub(super) fn gru_cell(
    p: &Gru,
    gx: &[f64],
    h: &[f64],
    mask: &[f64],
    batch: usize,
    hidden: usize,
    h_out: &mut [f64],
    mut trace: Option<(&mut [f64], &mut [f64], &mut [f64], &mut [f64])>,
) {
    let h3 = 3 * hidden;
    let mut gh = vec![0.0; batch * h3];
    for row in gh.chunks_exact_mut(h3) {
        row.copy_from_slice(&p.bh.data);
    }
    gemm(batch, hidden, h3, h, false, &p.uh.data, false, &mut gh, 1.0);
    for b in 0..batch {
        let gxr = &gx[b * h3..(b + 1) * h3];
        let ghr = &gh[b * h3..(b + 1) * h3];
        let m = mask[b];
        for j in 0..hidden {
            let z = sigmoid(gxr[j] + ghr[j]);
            let r = sigmoid(gxr[hidden + j] + ghr[hidden + j]);
            let ghn = ghr[2 * hidden + j];
            let n = (gxr[2 * hidden + j] + r * ghn).tanh();
            let hp = h[b * hidden + j];
            let hc = (1.0 - z) * n + z * hp;
            h_out[b * hidden + j] = m * hc + (1.0 - m) * hp;
            if let Some((tz, tr, tn, tg)) = trace.as_mut() {
                let i = b * hidden + j;
                tz[i] = z;
                tr[i] = r;
                tn[i] = n;
                tg[i] = ghn;
            }
        }
    }
}

/// Runs a GRU over `steps` precomputed input projections.
pub(super) fn gru_forward(
    p: &Gru,
    gx_all: &[f64],
    h0: &[f64],
    mask: &[f64],
    steps: usize,
    batch: usize,
    hidden: usize,
) -> GruTrace {
    let bh = batch * hidden;
    let mut tr = GruTrace {
        steps,
        batch,
        hidden,
        h_prev: vec![0.0; steps * bh],
        z: vec![0.0; steps * bh],
        r: vec![0.0; steps * bh],
        n: vec![0.0; steps * bh],
        gh_n: vec![0.0; steps * bh],
        mask: mask.to_vec(),
        out: vec![0.0; steps * bh],
    };
    let mut h = h0.to_vec();
    for t in 0..steps {
        let sl = t * bh..(t + 1) * bh;
        tr.h_prev[sl.clone()].copy_from_slice(&h);
        let (z, r, n, g) = (
            &mut tr.z[sl.clone()],
            &mut tr.r[sl.clone()],
            &mut tr.n[sl.clone()],
            &mut tr.gh_n[sl.clone()],
        );
        gru_cell(
            p,
            &gx_all[t * batch * 3 * hidden..(t + 1) * batch * 3 * hidden],
            &h.clone(),
            &mask[t * batch..(t + 1) * batch],
            batch,
            hidden,
            &mut h,
            Some((z, r, n, g)),
        );
        tr.out[sl].copy_from_slice(&h);
    }
    tr
}

/// Back-propagates `d_out` (gradient w.r.t. every output state, consumed)
/// plus `dh_last` through the recurrence. Accumulates `uh`/`bh` gradients and
/// returns (gradient w.r.t. the input projections, gradient w.r.t. h0).
pub(super) fn gru_backward(
    p: &Gru,
    tr: &GruTrace,
    d_out: &mut [f64],
    dh_last: Option<&[f64]>,
    grad: &mut Gru,
) -> (Vec<f64>, Vec<f64>) {
    let (steps, batch, hidden) = (tr.steps, tr.batch, tr.hidden);
    let h3 = 3 * hidden;
    let bh = batch * hidden;
    let mut dgx = vec![0.0; steps * batch * h3];
    let mut carry = match dh_last {
        Some(d) => d.to_vec(),
        None => vec![0.0; bh],
    };
    let mut dgh = vec![0.0; batch * h3];
    for t in (0..steps).rev() {
        let off = t * bh;
        let mut dh_prev = vec![0.0; bh];
        for b in 0..batch {
            let m = tr.mask[t * batch + b];
            for j in 0..hidden {
                let i = b * hidden + j;
                let dh = d_out[off + i] + carry[i];
                let dhc = m * dh;
                dh_prev[i] = (1.0 - m) * dh;
                let (z, r, n, ghn, hp) = (
                    tr.z[off + i],
                    tr.r[off + i],
                    tr.n[off + i],
                    tr.gh_n[off + i],
                    tr.h_prev[off + i],
                );
                let dn = dhc * (1.0 - z);
                let dz = dhc * (hp - n);
                dh_prev[i] += dhc * z;
                let dan = dn * (1.0 - n * n);
                let dr = dan * ghn;
                let daz = dz * z * (1.0 - z);
                let dar = dr * r * (1.0 - r);
                let gx_row = &mut dgx[(t * batch + b) * h3..(t * batch + b + 1) * h3];
                gx_row[j] = daz;
                gx_row[hidden + j] = dar;
                gx_row[2 * hidden + j] = dan;
                let gh_row = &mut dgh[b * h3..(b + 1) * h3];
                gh_row[j] = daz;
                gh_row[hidden + j] = dar;
                gh_row[2 * hidden + j] = dan * r;
            }
        }
        gemm(hidden, batch, h3, &tr.h_prev[off..off + bh], true, &dgh, false, &mut grad.uh.data, 1.0);
        add_col_sums(&mut grad.bh.data, &dgh);
        gemm(batch, h3, hidden, &dgh, false, &p.uh.data, true, &mut dh_prev, 1.0);
        carry = dh_prev;
    }
    (dgx, carry)
}

/// Padded, time-major view of a batch.
pub(super) struct Padded {
    pub steps: usize,
    pub batch: usize,
    pub ids: Vec<TokenId>,
    pub mask: Vec<f64>,
}

/// Source side: tokens followed by EOS.
pub(super) fn pad_source(src: &[Ids], vocab: usize) -> Padded {
    let batch = src.len();
    let steps = src.iter().map(|s| s.len() + 1).max().unwrap_or(1);
    let mut ids = vec![PAD; steps * batch];
    let mut mask = vec![0.0; steps * batch];
    for (b, s) in src.iter().enumerate() {
        for (t, &tok) in s.iter().chain(std::iter::once(&EOS)).enumerate() {
            ids[t * batch + b] = if (tok as usize) < vocab { tok } else { UNK };
            mask[t * batch + b] = 1.0;
        }
    }
    Padded {
        steps,
        batch,
        ids,
        mask,
    }
}

pub(super) fn gather_rows(table: &[f64], cols: usize, ids: &[TokenId]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ids.len() * cols);
    for &i in ids {
        out.extend_from_slice(&table[i as usize * cols..(i as usize + 1) * cols]);
    }
    out
}

/// `x · Wx + bx` for every row of `x`.
pub(super) fn input_gates(p: &Gru, x: &[f64], rows: usize, input: usize) -> Vec<f64> {
    let h3 = p.wx.cols;
    let mut gx = vec![0.0; rows * h3];
    gemm(rows, input, h3, x, false, &p.wx.data, false, &mut gx, 0.0);
    add_row(&mut gx, &p.bx.data);
    gx
}

/// Encodes a padded source batch; returns the trace (its `out` doubles as
/// the attention memory) and the embedded inputs.
pub(super) fn encode(model: &ModelSnapshot, src: &Padded) -> (GruTrace, Vec<f64>) {
    let d = &model.dims;
    let p = &model.params;
    let x = gather_rows(&p.embed.data, d.embed_dim, &src.ids);
    let gx = input_gates(&p.enc, &x, src.steps * src.batch, d.embed_dim);
    let h0 = vec![0.0; src.batch * d.hidden_dim];
    let tr = gru_forward(&p.enc, &gx, &h0, &src.mask, src.steps, src.batch, d.hidden_dim);
    (tr, x)
}

/// Masked dot-product attention of one decoder state against the encoder
/// memory of sentence `b`. Writes weights into `alpha` (len `src_steps`) and
/// the context into `ctx`.
#[allow(clippy::too_many_arguments)]
pub(super) fn attend(
    h: &[f64],
    memory: &[f64],
    src_mask: &[f64],
    b: usize,
    batch: usize,
    hidden: usize,
    alpha: &mut [f64],
    ctx: &mut [f64],
) {
    let s_steps = alpha.len();
    let mut max = f64::NEG_INFINITY;
    for s in 0..s_steps {
        if src_mask[s * batch + b] > 0.0 {
            let e = &memory[(s * batch + b) * hidden..(s * batch + b + 1) * hidden];
            alpha[s] = dot(h, e);
            max = max.max(alpha[s]);
        }
    }
    let mut sum = 0.0;
    for s in 0..s_steps {
        if src_mask[s * batch + b] > 0.0 {
            alpha[s] = (alpha[s] - max).exp();
            sum += alpha[s];
        } else {
            alpha[s] = 0.0;
        }
    }
    ctx.iter_mut().for_each(|c| *c = 0.0);
    for s in 0..s_steps {
        alpha[s] /= sum;
        if alpha[s] != 0.0 {
            let e = &memory[(s * batch + b) * hidden..(s * batch + b + 1) * hidden];
            for (c, v) in ctx.iter_mut().zip(e) {
                *c += alpha[s] * v;
            }
        }
    }
}

struct Forward {
    src: Padded,
    enc: GruTrace,
    enc_x: Vec<f64>,
    dec_ids: Vec<TokenId>,
    dec_x: Vec<f64>,
    dec: GruTrace,
    tgt_steps: usize,
    gold: Vec<TokenId>,
    loss_mask: Vec<f64>,
    alpha: Vec<f64>,
    hc: Vec<f64>,
    comb: Vec<f64>,
    probs: Vec<f64>,
    loss_sum: f64,
    tokens: usize,
}

fn forward(model: &ModelSnapshot, src: &[Ids], tgt: &[Ids], target: Lang) -> Result<Forward> {
    if src.len() != tgt.len() {
        return Err(Error::LengthMismatch {
            what: "source/target batch",
            left: src.len(),
            right: tgt.len(),
        });
    }
    if src.is_empty() {
        return Err(Error::EmptyCorpus("batch"));
    }
    let d = model.dims;
    let p = &model.params;
    let (v, e, hd) = (d.vocab_size, d.embed_dim, d.hidden_dim);
    let batch = src.len();

    let src = pad_source(src, v);
    let (enc, enc_x) = encode(model, &src);
    let h_final = enc.out[(src.steps - 1) * batch * hd..].to_vec();

    // Decoder: inputs [tag, y1..yn], gold [y1..yn, EOS].
    let tgt_steps = tgt.iter().map(|t| t.len() + 1).max().unwrap_or(1);
    let mut dec_ids = vec![PAD; tgt_steps * batch];
    let mut gold = vec![PAD; tgt_steps * batch];
    let mut loss_mask = vec![0.0; tgt_steps * batch];
    for (b, y) in tgt.iter().enumerate() {
        let clip = |t: TokenId| if (t as usize) < v { t } else { UNK };
        dec_ids[b] = target.tag();
        for (t, &tok) in y.iter().enumerate() {
            dec_ids[(t + 1) * batch + b] = clip(tok);
            gold[t * batch + b] = clip(tok);
            loss_mask[t * batch + b] = 1.0;
        }
        gold[y.len() * batch + b] = EOS;
        loss_mask[y.len() * batch + b] = 1.0;
    }
    // Steps past the EOS of the longest target never exist, so the decoder
    // sequence is exactly tgt_steps long; dec_ids beyond len+1 stay PAD.
    let dec_x = gather_rows(&p.embed.data, e, &dec_ids);
    let dec_gx = input_gates(&p.dec, &dec_x, tgt_steps * batch, e);
    let dec = gru_forward(&p.dec, &dec_gx, &h_final, &loss_mask, tgt_steps, batch, hd);

    let rows = tgt_steps * batch;
    let mut alpha = vec![0.0; rows * src.steps];
    let mut hc = vec![0.0; rows * 2 * hd];
    for t in 0..tgt_steps {
        for b in 0..batch {
            let r = t * batch + b;
            let (hpart, cpart) = hc[r * 2 * hd..(r + 1) * 2 * hd].split_at_mut(hd);
            hpart.copy_from_slice(&dec.out[r * hd..(r + 1) * hd]);
            attend(
                hpart,
                &enc.out,
                &src.mask,
                b,
                batch,
                hd,
                &mut alpha[r * src.steps..(r + 1) * src.steps],
                cpart,
            );
        }
    }
    let mut comb = vec![0.0; rows * hd];
    gemm(rows, 2 * hd, hd, &hc, false, &p.w_comb.data, false, &mut comb, 0.0);
    add_row(&mut comb, &p.b_comb.data);
    comb.iter_mut().for_each(|x| *x = x.tanh());
    let mut probs = vec![0.0; rows * v];
    gemm(rows, hd, v, &comb, false, &p.w_out.data, false, &mut probs, 0.0);
    add_row(&mut probs, &p.b_out.data);

    let mut loss_sum = 0.0;
    let mut tokens = 0;
    for r in 0..rows {
        let row = &mut probs[r * v..(r + 1) * v];
        let gold_logit = row[gold[r] as usize];
        let lse = softmax_in_place(row);
        if loss_mask[r] > 0.0 {
            loss_sum += lse - gold_logit;
            tokens += 1;
        }
    }
    if !loss_sum.is_finite() {
        return Err(Error::Numeric {
            param: "loss".into(),
        });
    }
    Ok(Forward {
        src,
        enc,
        enc_x,
        dec_ids,
        dec_x,
        dec,
        tgt_steps,
        gold,
        loss_mask,
        alpha,
        hc,
        comb,
        probs,
        loss_sum,
        tokens,
    })
}

/// Mean token cross-entropy without gradients.
pub fn loss_only(model: &ModelSnapshot, src: &[Ids], tgt: &[Ids], target: Lang) -> Result<f64> {
    let f = forward(model, src, tgt, target)?;
    Ok(f.loss_sum / f.tokens as f64)
}

fn embed_backward(grad: &mut [f64], cols: usize, ids: &[TokenId], dx: &[f64]) {
    for (r, &i) in ids.iter().enumerate() {
        let g = &mut grad[i as usize * cols..(i as usize + 1) * cols];
        for (a, b) in g.iter_mut().zip(&dx[r * cols..(r + 1) * cols]) {
            *a += b;
        }
    }
}

/// Teacher-forced loss over `tgt` given `src`, decoding into `target`.
/// `tgt` holds bare sentences; the tag/EOS framing is added here.
pub fn forward_loss(model: &ModelSnapshot, src: &[Ids], tgt: &[Ids], target: Lang) -> Result<Loss> {
    let f = forward(model, src, tgt, target)?;
    let d = model.dims;
    let p = &model.params;
    let (v, e, hd) = (d.vocab_size, d.embed_dim, d.hidden_dim);
    let batch = f.src.batch;
    let rows = f.tgt_steps * batch;
    let s_steps = f.src.steps;
    let inv = 1.0 / f.tokens as f64;
    let mut g = Params::zeros(&d);

    // Output layer.
    let mut dlogits = f.probs;
    for r in 0..rows {
        let row = &mut dlogits[r * v..(r + 1) * v];
        let m = f.loss_mask[r] * inv;
        if m == 0.0 {
            row.iter_mut().for_each(|x| *x = 0.0);
            continue;
        }
        row[f.gold[r] as usize] -= 1.0;
        row.iter_mut().for_each(|x| *x *= m);
    }
    gemm(hd, rows, v, &f.comb, true, &dlogits, false, &mut g.w_out.data, 0.0);
    add_col_sums(&mut g.b_out.data, &dlogits);
    let mut dcomb = vec![0.0; rows * hd];
    gemm(rows, v, hd, &dlogits, false, &p.w_out.data, true, &mut dcomb, 0.0);
    for (dc, a) in dcomb.iter_mut().zip(&f.comb) {
        *dc *= 1.0 - a * a;
    }
    gemm(2 * hd, rows, hd, &f.hc, true, &dcomb, false, &mut g.w_comb.data, 0.0);
    add_col_sums(&mut g.b_comb.data, &dcomb);
    let mut dhc = vec![0.0; rows * 2 * hd];
    gemm(rows, hd, 2 * hd, &dcomb, false, &p.w_comb.data, true, &mut dhc, 0.0);

    // Attention.
    let mut d_dec_out = vec![0.0; rows * hd];
    let mut d_mem = vec![0.0; s_steps * batch * hd];
    let mut dalpha = vec![0.0; s_steps];
    for r in 0..rows {
        let b = r % batch;
        let (dh_att, dctx) = dhc[r * 2 * hd..(r + 1) * 2 * hd].split_at(hd);
        let alpha = &f.alpha[r * s_steps..(r + 1) * s_steps];
        let h = &f.dec.out[r * hd..(r + 1) * hd];
        d_dec_out[r * hd..(r + 1) * hd].copy_from_slice(dh_att);
        let mut weighted = 0.0;
        for s in 0..s_steps {
            if alpha[s] == 0.0 {
                dalpha[s] = 0.0;
                continue;
            }
            let mem = &f.enc.out[(s * batch + b) * hd..(s * batch + b + 1) * hd];
            dalpha[s] = dot(dctx, mem);
            weighted += alpha[s] * dalpha[s];
            let dm = &mut d_mem[(s * batch + b) * hd..(s * batch + b + 1) * hd];
            for (x, c) in dm.iter_mut().zip(dctx) {
                *x += alpha[s] * c;
            }
        }
        for s in 0..s_steps {
            if alpha[s] == 0.0 {
                continue;
            }
            let ds = alpha[s] * (dalpha[s] - weighted);
            let mem_off = (s * batch + b) * hd;
            for j in 0..hd {
                d_dec_out[r * hd + j] += ds * f.enc.out[mem_off + j];
                d_mem[mem_off + j] += ds * h[j];
            }
        }
    }

    // Decoder recurrence, then its input projection and embeddings.
    let (dgx_dec, dh0) = gru_backward(&p.dec, &f.dec, &mut d_dec_out, None, &mut g.dec);
    gemm(e, rows, 3 * hd, &f.dec_x, true, &dgx_dec, false, &mut g.dec.wx.data, 1.0);
    add_col_sums(&mut g.dec.bx.data, &dgx_dec);
    let mut dx = vec![0.0; rows * e];
    gemm(rows, 3 * hd, e, &dgx_dec, false, &p.dec.wx.data, true, &mut dx, 0.0);
    embed_backward(&mut g.embed.data, e, &f.dec_ids, &dx);

    // Encoder: attention memory gradients plus the decoder's initial state.
    let (dgx_enc, _) = gru_backward(&p.enc, &f.enc, &mut d_mem, Some(&dh0), &mut g.enc);
    let src_rows = s_steps * batch;
    gemm(e, src_rows, 3 * hd, &f.enc_x, true, &dgx_enc, false, &mut g.enc.wx.data, 1.0);
    add_col_sums(&mut g.enc.bx.data, &dgx_enc);
    let mut dxs = vec![0.0; src_rows * e];
    gemm(src_rows, 3 * hd, e, &dgx_enc, false, &p.enc.wx.data, true, &mut dxs, 0.0);
    embed_backward(&mut g.embed.data, e, &f.src.ids, &dxs);

    if let Some(name) = g.first_non_finite() {
        return Err(Error::Numeric {
            param: name.to_string(),
        });
    }
    Ok(Loss {
        value: f.loss_sum * inv,
        tokens: f.tokens,
        grads: g,
    })
}
