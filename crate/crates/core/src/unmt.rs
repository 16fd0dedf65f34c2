//! Baseline unsupervised trainer: a denoising warm-start followed by joint
//! denoising and online back-translation.
//!
//! Every joint step is a single optimizer update over four loss terms: the
//! denoising loss in each language and the back-translation loss in each
//! direction, summed without weights. Self-training reuses the same update
//! routine, which keeps optimizer-step budgets comparable across strategies.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{BatchStream, Ids, Lang, MonoCorpus, Origin, ParallelCorpus};
use crate::error::{Error, Result};
use crate::eval::bleu;
use crate::noise::{apply_noise, NoiseSpec};
use crate::seq2seq::{clip_norm, forward_loss, init_model, ModelDims, ModelSnapshot, OptConfig, OptState, OutputMask, Translator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnmtConfig {
    /// Denoising-only steps, alternating languages.
    pub warmstart_steps: u64,
    /// Joint denoising plus back-translation steps.
    pub bt_steps: u64,
    pub noise: NoiseSpec,
    pub batch_size_tokens: usize,
    pub optim: OptConfig,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub max_decode_len: usize,
    pub eval_every: u64,
    /// Limit each decoding language to the tokens seen in its own corpus.
    pub restrict_output: bool,
    pub seed: u64,
}

impl Default for UnmtConfig {
    fn default() -> Self {
        UnmtConfig {
            warmstart_steps: 300,
            bt_steps: 1200,
            noise: NoiseSpec::default(),
            batch_size_tokens: 500,
            optim: OptConfig::default(),
            embed_dim: 32,
            hidden_dim: 64,
            max_decode_len: 12,
            eval_every: 300,
            restrict_output: true,
            seed: 1,
        }
    }
}

impl UnmtConfig {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.eval_every == 0 {
            return Err(Error::invalid("eval_every", "must be positive"));
        }
        if self.batch_size_tokens == 0 {
            return Err(Error::invalid("batch_size_tokens", "must be positive"));
        }
        if !(self.optim.lr > 0.0 && self.optim.lr.is_finite()) {
            return Err(Error::invalid("optim.lr", "must be positive and finite"));
        }
        self.dims(1).validate()
    }

    pub fn dims(&self, vocab_size: usize) -> ModelDims {
        ModelDims {
            vocab_size,
            embed_dim: self.embed_dim,
            hidden_dim: self.hidden_dim,
            max_decode_len: self.max_decode_len,
        }
    }
}

/// One supervised loss term of an update: predict `tgt` in `target` from `src`.
#[derive(Debug, Clone)]
pub struct Term {
    pub stream: &'static str,
    /// Data origin of each target sentence.
    pub origins: Vec<Origin>,
    pub src: Vec<Ids>,
    pub tgt: Vec<Ids>,
    pub target: Lang,
}

/// Applies one optimizer update over the unweighted sum of `terms`, with
/// global-norm clipping when configured. Returns each term's mean loss.
pub fn update(model: &mut ModelSnapshot, opt: &mut OptState, terms: &[Term]) -> Result<Vec<f64>> {
    if terms.is_empty() {
        return Err(Error::invalid("terms", "an update needs at least one loss term"));
    }
    let mut losses = Vec::with_capacity(terms.len());
    let mut total = None;
    for t in terms {
        let l = forward_loss(model, &t.src, &t.tgt, t.target)?;
        if !l.value.is_finite() {
            return Err(Error::Numeric {
                param: format!("loss:{}", t.stream),
            });
        }
        losses.push(l.value);
        match &mut total {
            None => total = Some(l.grads),
            Some(g) => g.add_scaled(&l.grads, 1.0),
        }
    }
    let mut grads = total.expect("terms is non-empty");
    if let Some(max) = opt.config.clip_norm {
        clip_norm(&mut grads, max);
    }
    opt.step(model, &grads)?;
    Ok(losses)
}

/// The denoising term for a monolingual batch: reconstruct each sentence from
/// its corrupted copy.
pub fn dae_term<R: rand::Rng>(
    stream: &'static str,
    batch: &[Ids],
    lang: Lang,
    origin: Origin,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Term {
    Term {
        stream,
        origins: vec![origin; batch.len()],
        src: batch.iter().map(|s| apply_noise(s, noise, rng)).collect(),
        tgt: batch.to_vec(),
        target: lang,
    }
}

/// One denoising update on a monolingual batch.
pub fn dae_step<R: rand::Rng>(
    model: &mut ModelSnapshot,
    opt: &mut OptState,
    batch: &[Ids],
    lang: Lang,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<f64> {
    let term = dae_term("dae", batch, lang, Origin::Natural, noise, rng);
    Ok(update(model, opt, &[term])?[0])
}

/// The two back-translation terms. Pseudo-sources are generated by
/// `generator` before any gradient is taken, so nothing flows through
/// generation: the X batch yields `(ŷ → x)` and the Y batch `(x̂ → y)`.
pub fn backtranslation_terms(
    generator: &dyn Translator,
    x_batch: &[Ids],
    x_origins: Vec<Origin>,
    y_batch: &[Ids],
    y_origins: Vec<Origin>,
) -> [Term; 2] {
    let y_hat = generator.translate(x_batch, Lang::L2);
    let x_hat = generator.translate(y_batch, Lang::L1);
    [
        Term {
            stream: "bt_yx",
            origins: x_origins,
            src: y_hat,
            tgt: x_batch.to_vec(),
            target: Lang::L1,
        },
        Term {
            stream: "bt_xy",
            origins: y_origins,
            src: x_hat,
            tgt: y_batch.to_vec(),
            target: Lang::L2,
        },
    ]
}

/// Losses of one back-translation update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtLosses {
    /// −log P(y | x̂), the loss of the model translating into L2.
    pub xy: f64,
    /// −log P(x | ŷ), the loss of the model translating into L1.
    pub yx: f64,
}

/// One back-translation update; the current parameters, frozen, generate the
/// pseudo-sources.
pub fn backtranslation_step(
    model: &mut ModelSnapshot,
    opt: &mut OptState,
    x_batch: &[Ids],
    y_batch: &[Ids],
) -> Result<BtLosses> {
    let terms = backtranslation_terms(
        model,
        x_batch,
        vec![Origin::Natural; x_batch.len()],
        y_batch,
        vec![Origin::Natural; y_batch.len()],
    );
    let l = update(model, opt, &terms)?;
    Ok(BtLosses { yx: l[0], xy: l[1] })
}

/// Dev BLEU in both directions; `dev` maps L1 sources to L2 references.
pub fn dev_bleu(model: &dyn Translator, dev: &ParallelCorpus) -> Result<(f64, f64)> {
    let src = dev.sources();
    let tgt = dev.targets();
    let xy = bleu(&model.translate(&src, Lang::L2), &tgt)?.score;
    let yx = bleu(&model.translate(&tgt, Lang::L1), &src)?.score;
    Ok((xy, yx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    /// Optimizer updates applied in this run so far.
    pub step: u64,
    pub dae_loss_x: Option<f64>,
    pub dae_loss_y: Option<f64>,
    pub bt_loss_xy: Option<f64>,
    pub bt_loss_yx: Option<f64>,
    pub bleu_xy: Option<f64>,
    pub bleu_yx: Option<f64>,
    /// Completed passes over each natural corpus at this point.
    pub passes_x: u64,
    pub passes_y: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub rows: Vec<HistoryRow>,
    /// Sentences consumed per loss stream and data origin.
    pub consumed: BTreeMap<String, BTreeMap<Origin, u64>>,
    /// Number of updates each loss stream took part in.
    pub terms_per_step: BTreeMap<String, u64>,
}

pub const HISTORY_COLUMNS: [&str; 7] = [
    "step",
    "dae_loss_x",
    "dae_loss_y",
    "bt_loss_xy",
    "bt_loss_yx",
    "bleu_xy",
    "bleu_yx",
];

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl TrainHistory {
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", HISTORY_COLUMNS.join(","))?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.step,
                opt_cell(r.dae_loss_x),
                opt_cell(r.dae_loss_y),
                opt_cell(r.bt_loss_xy),
                opt_cell(r.bt_loss_yx),
                opt_cell(r.bleu_xy),
                opt_cell(r.bleu_yx)
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).map_err(|e| Error::io(path, e))?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn last_bleu(&self) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .rev()
            .find_map(|r| Some((r.bleu_xy?, r.bleu_yx?)))
    }

    pub(crate) fn record(&mut self, t: &Term) {
        let per = self.consumed.entry(t.stream.to_string()).or_default();
        for &o in &t.origins {
            *per.entry(o).or_default() += 1;
        }
        *self.terms_per_step.entry(t.stream.to_string()).or_default() += 1;
    }
}

#[derive(Default)]
struct Running {
    sums: BTreeMap<&'static str, (f64, u64)>,
}

impl Running {
    fn add(&mut self, stream: &'static str, v: f64) {
        let e = self.sums.entry(stream).or_default();
        e.0 += v;
        e.1 += 1;
    }

    fn mean(&self, stream: &str) -> Option<f64> {
        self.sums.get(stream).map(|&(s, n)| s / n as f64)
    }
}

/// Online UNMT training state over fixed natural corpora. The Y-side
/// back-translation pool starts as the natural Y corpus and may be widened
/// with synthetic sentences.
pub struct UnmtTrainer {
    pub model: ModelSnapshot,
    pub opt: OptState,
    pub history: TrainHistory,
    config: UnmtConfig,
    x: MonoCorpus,
    y: MonoCorpus,
    y_pool: Vec<Ids>,
    y_pool_origin: Vec<Origin>,
    dae_x: BatchStream,
    dae_y: BatchStream,
    bt_x: BatchStream,
    bt_y: BatchStream,
    rng: ChaCha8Rng,
    running: Running,
    steps: u64,
}

fn stream_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k)
}

impl UnmtTrainer {
    /// `model` is trained in place with fresh optimizer moments.
    pub fn new(model: ModelSnapshot, config: UnmtConfig, x: &MonoCorpus, y: &MonoCorpus) -> Result<Self> {
        config.validate()?;
        for (c, name) in [(x, "X"), (y, "Y")] {
            if c.is_empty() {
                return Err(Error::EmptyCorpus(name));
            }
            c.validate(model.dims.vocab_size)?;
        }
        if x.lang != Lang::L1 || y.lang != Lang::L2 {
            return Err(Error::invalid("corpora", "X must be L1 and Y must be L2"));
        }
        let b = config.batch_size_tokens;
        let s = config.seed;
        Ok(UnmtTrainer {
            opt: OptState::new(config.optim, &model),
            model,
            history: TrainHistory::default(),
            dae_x: BatchStream::for_mono(x, b, stream_seed(s, 1))?,
            dae_y: BatchStream::for_mono(y, b, stream_seed(s, 2))?,
            bt_x: BatchStream::for_mono(x, b, stream_seed(s, 3))?,
            bt_y: BatchStream::for_mono(y, b, stream_seed(s, 4))?,
            y_pool: y.sentences.clone(),
            y_pool_origin: vec![y.origin; y.len()],
            x: x.clone(),
            y: y.clone(),
            rng: ChaCha8Rng::seed_from_u64(stream_seed(s, 5)),
            running: Running::default(),
            steps: 0,
            config,
        })
    }

    pub fn config(&self) -> &UnmtConfig {
        &self.config
    }

    /// Updates applied by this trainer.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Sentences the Y-side back-translation stream samples from.
    pub fn y_pool(&self) -> (&[Ids], &[Origin]) {
        (&self.y_pool, &self.y_pool_origin)
    }

    /// Replaces the Y-side back-translation pool with natural Y followed by
    /// `extra`; the pool is sampled uniformly.
    pub fn set_y_extra(&mut self, extra: &MonoCorpus, seed: u64) -> Result<()> {
        if extra.lang != Lang::L2 {
            return Err(Error::invalid("extra", "extra Y-side sentences must be L2"));
        }
        extra.validate(self.model.dims.vocab_size)?;
        self.y_pool = self.y.sentences.iter().chain(&extra.sentences).cloned().collect();
        self.y_pool_origin = std::iter::repeat_n(self.y.origin, self.y.len())
            .chain(std::iter::repeat_n(extra.origin, extra.len()))
            .collect();
        let lens = self.y_pool.iter().map(Vec::len).collect();
        self.bt_y = BatchStream::new(lens, self.config.batch_size_tokens, seed)?;
        Ok(())
    }

    fn take(stream: &mut BatchStream, pool: &[Ids]) -> Vec<Ids> {
        stream.next_batch().iter().map(|&i| pool[i].clone()).collect()
    }

    /// One denoising update, alternating X and Y by step parity.
    pub fn warmstart_step(&mut self) -> Result<()> {
        let noise = self.config.noise;
        let term = if self.steps % 2 == 0 {
            let b = Self::take(&mut self.dae_x, &self.x.sentences);
            dae_term("dae_x", &b, Lang::L1, self.x.origin, &noise, &mut self.rng)
        } else {
            let b = Self::take(&mut self.dae_y, &self.y.sentences);
            dae_term("dae_y", &b, Lang::L2, self.y.origin, &noise, &mut self.rng)
        };
        self.apply(vec![term])
    }

    /// One joint update: denoising in both languages plus back-translation in
    /// both directions.
    pub fn joint_step(&mut self) -> Result<()> {
        let noise = self.config.noise;
        let xb = Self::take(&mut self.dae_x, &self.x.sentences);
        let yb = Self::take(&mut self.dae_y, &self.y.sentences);
        let dx = dae_term("dae_x", &xb, Lang::L1, self.x.origin, &noise, &mut self.rng);
        let dy = dae_term("dae_y", &yb, Lang::L2, self.y.origin, &noise, &mut self.rng);
        let bx = Self::take(&mut self.bt_x, &self.x.sentences);
        let idx = self.bt_y.next_batch().to_vec();
        let by: Vec<Ids> = idx.iter().map(|&i| self.y_pool[i].clone()).collect();
        let y_origins = idx.iter().map(|&i| self.y_pool_origin[i]).collect();
        let [bt_yx, bt_xy] = backtranslation_terms(
            &self.model,
            &bx,
            vec![self.x.origin; bx.len()],
            &by,
            y_origins,
        );
        self.apply(vec![dx, dy, bt_yx, bt_xy])
    }

    fn apply(&mut self, terms: Vec<Term>) -> Result<()> {
        let losses = update(&mut self.model, &mut self.opt, &terms)?;
        for (t, l) in terms.iter().zip(losses) {
            self.history.record(t);
            self.running.add(t.stream, l);
        }
        self.steps += 1;
        Ok(())
    }

    /// Appends a history row with running loss means since the previous row
    /// and, when `dev` is given, dev BLEU.
    pub fn log(&mut self, dev: Option<&ParallelCorpus>) -> Result<()> {
        let (bleu_xy, bleu_yx) = match dev {
            Some(d) => {
                let (a, b) = dev_bleu(&self.model, d)?;
                (Some(a), Some(b))
            }
            None => (None, None),
        };
        let r = &self.running;
        let row = HistoryRow {
            step: self.steps,
            dae_loss_x: r.mean("dae_x"),
            dae_loss_y: r.mean("dae_y"),
            bt_loss_xy: r.mean("bt_xy"),
            bt_loss_yx: r.mean("bt_yx"),
            bleu_xy,
            bleu_yx,
            passes_x: self.dae_x.epochs_completed(),
            passes_y: self.dae_y.epochs_completed(),
        };
        if self.history.rows.last().is_some_and(|l| l.step >= row.step) {
            return Ok(());
        }
        self.history.rows.push(row);
        self.running = Running::default();
        Ok(())
    }

    /// Runs `n` joint steps, logging every `eval_every` updates.
    pub fn run_joint(&mut self, n: u64, dev: Option<&ParallelCorpus>) -> Result<()> {
        for _ in 0..n {
            self.joint_step()?;
            if self.steps % self.config.eval_every == 0 {
                self.log(dev)?;
            }
        }
        Ok(())
    }
}

/// Result of a full baseline run.
#[derive(Debug, Clone)]
pub struct UnmtRun {
    pub model: ModelSnapshot,
    pub history: TrainHistory,
    /// Snapshot at the end of the warm-start phase.
    pub warmstart: ModelSnapshot,
}

/// Trains the baseline from a seeded initialisation: `warmstart_steps`
/// denoising updates, then `bt_steps` joint updates.
pub fn train_unmt(
    config: &UnmtConfig,
    vocab_size: usize,
    x: &MonoCorpus,
    y: &MonoCorpus,
    dev: Option<&ParallelCorpus>,
) -> Result<UnmtRun> {
    let model = init_model(config.dims(vocab_size), config.seed)?;
    let mut t = UnmtTrainer::new(model, *config, x, y)?;
    if config.restrict_output {
        t.model.output_mask = Some(OutputMask::observed(vocab_size, &x.sentences, &y.sentences)?);
    }
    for _ in 0..config.warmstart_steps {
        t.warmstart_step()?;
        if t.steps() % config.eval_every == 0 {
            t.log(dev)?;
        }
    }
    t.log(dev)?;
    let warmstart = t.model.clone();
    t.run_joint(config.bt_steps, dev)?;
    t.log(dev)?;
    Ok(UnmtRun {
        model: t.model,
        history: t.history,
        warmstart,
    })
}
