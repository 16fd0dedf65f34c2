//! Self-training on top of a trained unsupervised model.
//!
//! Each epoch translates monolingual data with the previous epoch's model and
//! trains on the result. ST-UT widens the Y-side back-translation pool with
//! synthetic L2 sentences translated from a random subset of X. ST-PT trains
//! a pseudo-supervised model, in both directions, on synthetic pairs built
//! from that subset of X and from all of Y.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{with_suffix, BatchStream, Ids, Lang, MonoCorpus, Origin, ParallelCorpus, Vocab};
use crate::error::{Error, Result};
use crate::seq2seq::{init_model, ModelSnapshot, OptConfig, OptState, Translator};
use crate::toylang::{Direction, LanguagePair};
use crate::unmt::{dev_bleu, update, Term, TrainHistory, UnmtConfig, UnmtTrainer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    StUt,
    StPt,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::StUt => "st_ut",
            Strategy::StPt => "st_pt",
        }
    }
}

/// How each epoch's model is initialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmStart {
    /// Start from the previous epoch's parameters.
    Continue,
    /// Start from a fresh seeded initialisation.
    Reinit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelfTrainConfig {
    pub strategy: Strategy,
    /// Fraction of X translated each epoch.
    pub epsilon: f64,
    pub max_epochs: usize,
    pub steps_per_epoch: u64,
    pub warm_start: WarmStart,
    pub seed: u64,
}

impl Default for SelfTrainConfig {
    fn default() -> Self {
        SelfTrainConfig {
            strategy: Strategy::StPt,
            epsilon: 0.10,
            max_epochs: 2,
            steps_per_epoch: 600,
            warm_start: WarmStart::Continue,
            seed: 1,
        }
    }
}

impl SelfTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::invalid("epsilon", format!("{} is outside (0, 1]", self.epsilon)));
        }
        if self.max_epochs == 0 {
            return Err(Error::invalid("max_epochs", "must be at least 1"));
        }
        if self.steps_per_epoch == 0 {
            return Err(Error::invalid("steps_per_epoch", "must be at least 1"));
        }
        Ok(())
    }

    fn epoch_seed(&self, epoch: usize, salt: u64) -> u64 {
        self.seed
            .wrapping_mul(0xD1B5_4A32_D192_ED03)
            .wrapping_add((epoch as u64) << 8)
            .wrapping_add(salt)
    }
}

/// The data produced by one generation pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SyntheticData {
    /// Translations of the X subset into L2, in subset order.
    Mono(MonoCorpus),
    /// `sub` pairs each X-subset sentence with its translation; `all` pairs
    /// every Y sentence (source side) with its translation into L1.
    Parallel { sub: ParallelCorpus, all: ParallelCorpus },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticRecord {
    /// 1-based epoch this data trains.
    pub epoch: usize,
    /// Identifier of the model that generated the data.
    pub generator: String,
    pub epsilon: f64,
    pub seed: u64,
    /// Indices into X of the translated subset, ascending.
    pub x_subset: Vec<usize>,
    pub data: SyntheticData,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RecordManifest<'a> {
    epoch: usize,
    generator: &'a str,
    epsilon: f64,
    seed: u64,
    files: Vec<(String, usize)>,
}

impl SyntheticRecord {
    /// Number of synthetic sentences generated from the X subset.
    pub fn sub_len(&self) -> usize {
        match &self.data {
            SyntheticData::Mono(m) => m.len(),
            SyntheticData::Parallel { sub, .. } => sub.len(),
        }
    }

    /// Writes the data as parallel text under `dir` plus a JSON manifest,
    /// all prefixed `epoch<N>`.
    pub fn dump(&self, vocab: &Vocab, x: &MonoCorpus, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let stem = |name: &str| dir.join(format!("epoch{}.{name}", self.epoch));
        let mut files = Vec::new();
        match &self.data {
            SyntheticData::Mono(m) => {
                let sub = ParallelCorpus {
                    src_lang: Lang::L1,
                    tgt_lang: Lang::L2,
                    pairs: self
                        .x_subset
                        .iter()
                        .map(|&i| x.sentences[i].clone())
                        .zip(m.sentences.iter().cloned())
                        .collect(),
                    origin: Origin::Synthetic,
                };
                sub.write_text(vocab, &stem("sub"))?;
                files.push(("sub".to_string(), sub.len()));
            }
            SyntheticData::Parallel { sub, all } => {
                sub.write_text(vocab, &stem("sub"))?;
                all.write_text(vocab, &stem("all"))?;
                files.push(("sub".to_string(), sub.len()));
                files.push(("all".to_string(), all.len()));
            }
        }
        let manifest = RecordManifest {
            epoch: self.epoch,
            generator: &self.generator,
            epsilon: self.epsilon,
            seed: self.seed,
            files,
        };
        let path = with_suffix(&stem("manifest"), "json");
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

/// Translates in fixed-size chunks, concurrently when the `parallel` feature
/// is on; output order follows input order either way.
pub fn translate_all(generator: &dyn Translator, sentences: &[Ids], target: Lang) -> Vec<Ids> {
    const CHUNK: usize = 256;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        sentences
            .par_chunks(CHUNK)
            .map(|c| generator.translate(c, target))
            .collect::<Vec<_>>()
            .concat()
    }
    #[cfg(not(feature = "parallel"))]
    {
        sentences
            .chunks(CHUNK)
            .flat_map(|c| generator.translate(c, target))
            .collect()
    }
}

/// Translates a uniform ε-subset of X into L2.
pub fn generate_synthetic_mono(
    generator: &dyn Translator,
    x: &MonoCorpus,
    epsilon: f64,
    seed: u64,
    epoch: usize,
) -> Result<SyntheticRecord> {
    let x_subset = x.subsample_indices(epsilon, seed)?;
    let sub = x.select(&x_subset);
    let sentences = translate_all(generator, &sub.sentences, Lang::L2);
    Ok(SyntheticRecord {
        epoch,
        generator: generator.model_id(),
        epsilon,
        seed,
        x_subset,
        data: SyntheticData::Mono(MonoCorpus {
            lang: Lang::L2,
            sentences,
            origin: Origin::Synthetic,
        }),
    })
}

/// Pairs a uniform ε-subset of X with its L2 translation, and every Y
/// sentence with its L1 translation.
pub fn generate_synthetic_parallel(
    generator: &dyn Translator,
    x: &MonoCorpus,
    y: &MonoCorpus,
    epsilon: f64,
    seed: u64,
    epoch: usize,
) -> Result<SyntheticRecord> {
    let x_subset = x.subsample_indices(epsilon, seed)?;
    let x_sub = x.select(&x_subset).sentences;
    let y_hat = translate_all(generator, &x_sub, Lang::L2);
    let x_hat = translate_all(generator, &y.sentences, Lang::L1);
    Ok(SyntheticRecord {
        epoch,
        generator: generator.model_id(),
        epsilon,
        seed,
        x_subset,
        data: SyntheticData::Parallel {
            sub: ParallelCorpus {
                src_lang: Lang::L1,
                tgt_lang: Lang::L2,
                pairs: x_sub.into_iter().zip(y_hat).collect(),
                origin: Origin::Synthetic,
            },
            all: ParallelCorpus {
                src_lang: Lang::L2,
                tgt_lang: Lang::L1,
                pairs: y.sentences.iter().cloned().zip(x_hat).collect(),
                origin: Origin::Synthetic,
            },
        },
    })
}

/// The ground-truth translator of a toy pair, usable wherever a model is.
pub struct OracleTranslator<'a> {
    pub pair: &'a LanguagePair,
    pub vocab: &'a Vocab,
}

impl Translator for OracleTranslator<'_> {
    fn model_id(&self) -> String {
        "oracle".to_string()
    }

    fn translate(&self, sentences: &[Ids], target: Lang) -> Vec<Ids> {
        let direction = match target {
            Lang::L2 => Direction::L1ToL2,
            Lang::L1 => Direction::L2ToL1,
        };
        sentences
            .iter()
            .map(|s| {
                let words = self.vocab.decode(s);
                let out = self
                    .pair
                    .oracle_translate(&words, direction)
                    .expect("sentences come from the pair's own vocabulary");
                self.vocab.encode(&out)
            })
            .collect()
    }
}

/// BLEU and bookkeeping after one self-training epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochSummary {
    pub epoch: usize,
    /// Model that generated this epoch's data.
    pub generator: String,
    /// Model produced by this epoch.
    pub model: String,
    pub dev_bleu_xy: Option<f64>,
    pub dev_bleu_yx: Option<f64>,
    /// Sentences consumed per loss stream and origin during the epoch.
    pub consumed: BTreeMap<String, BTreeMap<Origin, u64>>,
    /// Updates each loss stream took part in during the epoch.
    pub terms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone)]
pub struct SelfTrainRun {
    pub model: ModelSnapshot,
    pub records: Vec<SyntheticRecord>,
    pub epochs: Vec<EpochSummary>,
    /// Model after each epoch, in order.
    pub snapshots: Vec<ModelSnapshot>,
}

fn summarize(
    epoch: usize,
    generator: String,
    model: &ModelSnapshot,
    dev: Option<&ParallelCorpus>,
    history: &mut TrainHistory,
) -> Result<EpochSummary> {
    let (dev_bleu_xy, dev_bleu_yx) = match dev {
        Some(d) => {
            let (a, b) = dev_bleu(model, d)?;
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    Ok(EpochSummary {
        epoch,
        generator,
        model: model.fingerprint(),
        dev_bleu_xy,
        dev_bleu_yx,
        consumed: std::mem::take(&mut history.consumed),
        terms: std::mem::take(&mut history.terms_per_step),
    })
}

fn fresh_like(model: &ModelSnapshot, seed: u64) -> Result<ModelSnapshot> {
    init_model(model.dims, seed)
}

/// ST-UT: each epoch translates a fresh ε-subset of X with the previous
/// epoch's model and continues unsupervised training with the Y-side
/// back-translation pool widened to Y plus those translations.
pub fn train_st_ut(
    base: &ModelSnapshot,
    x: &MonoCorpus,
    y: &MonoCorpus,
    dev: Option<&ParallelCorpus>,
    unmt: &UnmtConfig,
    cfg: &SelfTrainConfig,
) -> Result<SelfTrainRun> {
    cfg.validate()?;
    let trainer_cfg = UnmtConfig {
        seed: cfg.epoch_seed(0, 1),
        ..*unmt
    };
    let mut trainer = UnmtTrainer::new(base.clone(), trainer_cfg, x, y)?;
    let mut run = SelfTrainRun {
        model: base.clone(),
        records: Vec::new(),
        epochs: Vec::new(),
        snapshots: Vec::new(),
    };
    for epoch in 1..=cfg.max_epochs {
        let record = generate_synthetic_mono(&trainer.model, x, cfg.epsilon, cfg.epoch_seed(epoch, 2), epoch)?;
        if cfg.warm_start == WarmStart::Reinit {
            let fresh = fresh_like(&trainer.model, cfg.epoch_seed(epoch, 3))?;
            trainer = UnmtTrainer::new(fresh, trainer_cfg, x, y)?;
        }
        let SyntheticData::Mono(extra) = &record.data else {
            unreachable!("mono generation yields mono data")
        };
        trainer.set_y_extra(extra, cfg.epoch_seed(epoch, 4))?;
        trainer.run_joint(cfg.steps_per_epoch, None)?;
        let summary = summarize(epoch, record.generator.clone(), &trainer.model, dev, &mut trainer.history)?;
        run.epochs.push(summary);
        run.snapshots.push(trainer.model.clone());
        run.records.push(record);
    }
    run.model = trainer.model;
    Ok(run)
}

/// The control arm: plain unsupervised training continued from `base` for
/// the same number of epochs and steps as a self-training run, with the same
/// batch order as ST-UT.
pub fn train_continuation(
    base: &ModelSnapshot,
    x: &MonoCorpus,
    y: &MonoCorpus,
    dev: Option<&ParallelCorpus>,
    unmt: &UnmtConfig,
    cfg: &SelfTrainConfig,
) -> Result<SelfTrainRun> {
    cfg.validate()?;
    let trainer_cfg = UnmtConfig {
        seed: cfg.epoch_seed(0, 1),
        ..*unmt
    };
    let mut trainer = UnmtTrainer::new(base.clone(), trainer_cfg, x, y)?;
    let mut run = SelfTrainRun {
        model: base.clone(),
        records: Vec::new(),
        epochs: Vec::new(),
        snapshots: Vec::new(),
    };
    for epoch in 1..=cfg.max_epochs {
        let generator = trainer.model.fingerprint();
        trainer.run_joint(cfg.steps_per_epoch, None)?;
        run.epochs.push(summarize(epoch, generator, &trainer.model, dev, &mut trainer.history)?);
        run.snapshots.push(trainer.model.clone());
    }
    run.model = trainer.model;
    Ok(run)
}

/// Supervised training on parallel corpora, each pair used in both
/// directions. Every update draws one batch from each corpus and sums the
/// two directional losses of each batch.
pub struct PnmtTrainer {
    pub model: ModelSnapshot,
    pub opt: OptState,
    pub history: TrainHistory,
    corpora: Vec<(ParallelCorpus, [&'static str; 2], BatchStream)>,
}

impl PnmtTrainer {
    /// `corpora` pairs each corpus with the stream names of its
    /// source-to-target and target-to-source terms.
    pub fn new(
        model: ModelSnapshot,
        optim: OptConfig,
        corpora: Vec<(ParallelCorpus, [&'static str; 2])>,
        batch_size_tokens: usize,
        seed: u64,
    ) -> Result<Self> {
        if corpora.is_empty() {
            return Err(Error::EmptyCorpus("parallel corpora"));
        }
        let mut streams = Vec::with_capacity(corpora.len());
        for (i, (c, names)) in corpora.into_iter().enumerate() {
            c.validate()?;
            if c.is_empty() {
                return Err(Error::EmptyCorpus("parallel corpus"));
            }
            let s = BatchStream::for_parallel(&c, batch_size_tokens, seed.wrapping_add(i as u64))?;
            streams.push((c, names, s));
        }
        Ok(PnmtTrainer {
            opt: OptState::new(optim, &model),
            model,
            history: TrainHistory::default(),
            corpora: streams,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let mut terms = Vec::with_capacity(2 * self.corpora.len());
        for (c, names, stream) in &mut self.corpora {
            let idx = stream.next_batch();
            let src: Vec<Ids> = idx.iter().map(|&i| c.pairs[i].0.clone()).collect();
            let tgt: Vec<Ids> = idx.iter().map(|&i| c.pairs[i].1.clone()).collect();
            let origins = vec![c.origin; idx.len()];
            terms.push(Term {
                stream: names[0],
                origins: origins.clone(),
                src: src.clone(),
                tgt: tgt.clone(),
                target: c.tgt_lang,
            });
            terms.push(Term {
                stream: names[1],
                origins,
                src: tgt,
                tgt: src,
                target: c.src_lang,
            });
        }
        update(&mut self.model, &mut self.opt, &terms)?;
        for t in &terms {
            self.history.record(t);
        }
        Ok(())
    }

    pub fn run(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }
}

/// Stream names of the four pseudo-supervised terms.
pub const PT_STREAMS: [&str; 4] = ["pt_sub_xy", "pt_sub_yx", "pt_all_yx", "pt_all_xy"];

/// ST-PT with the first epoch's data generated by `first_generator`; later
/// epochs are generated by the previous epoch's model. With the unsupervised
/// base as generator this is the plain strategy; an oracle generator turns
/// the first epoch into supervised training on true pairs.
pub fn train_st_pt_from(
    base: &ModelSnapshot,
    first_generator: &dyn Translator,
    x: &MonoCorpus,
    y: &MonoCorpus,
    dev: Option<&ParallelCorpus>,
    unmt: &UnmtConfig,
    cfg: &SelfTrainConfig,
) -> Result<SelfTrainRun> {
    cfg.validate()?;
    let mut model = base.clone();
    let mut opt = None;
    let mut run = SelfTrainRun {
        model: base.clone(),
        records: Vec::new(),
        epochs: Vec::new(),
        snapshots: Vec::new(),
    };
    for epoch in 1..=cfg.max_epochs {
        let seed = cfg.epoch_seed(epoch, 2);
        let record = if epoch == 1 {
            generate_synthetic_parallel(first_generator, x, y, cfg.epsilon, seed, epoch)?
        } else {
            generate_synthetic_parallel(&model, x, y, cfg.epsilon, seed, epoch)?
        };
        let SyntheticData::Parallel { sub, all } = &record.data else {
            unreachable!("parallel generation yields parallel data")
        };
        if cfg.warm_start == WarmStart::Reinit {
            model = fresh_like(&model, cfg.epoch_seed(epoch, 3))?;
            opt = None;
        }
        let mut trainer = PnmtTrainer::new(
            model,
            unmt.optim,
            vec![
                (sub.clone(), [PT_STREAMS[0], PT_STREAMS[1]]),
                (all.clone(), [PT_STREAMS[2], PT_STREAMS[3]]),
            ],
            unmt.batch_size_tokens,
            cfg.epoch_seed(epoch, 4),
        )?;
        if let Some(o) = opt.take() {
            trainer.opt = o;
        }
        trainer.run(cfg.steps_per_epoch)?;
        let summary = summarize(epoch, record.generator.clone(), &trainer.model, dev, &mut trainer.history)?;
        model = trainer.model;
        opt = Some(trainer.opt);
        run.epochs.push(summary);
        run.snapshots.push(model.clone());
        run.records.push(record);
    }
    run.model = model;
    Ok(run)
}

/// ST-PT: each epoch builds synthetic pairs with the previous epoch's model,
/// starting from the unsupervised base, and trains only on those pairs.
pub fn train_st_pt(
    base: &ModelSnapshot,
    x: &MonoCorpus,
    y: &MonoCorpus,
    dev: Option<&ParallelCorpus>,
    unmt: &UnmtConfig,
    cfg: &SelfTrainConfig,
) -> Result<SelfTrainRun> {
    train_st_pt_from(base, base, x, y, dev, unmt, cfg)
}

/// Runs the strategy named in `cfg`.
pub fn train_self(
    base: &ModelSnapshot,
    x: &MonoCorpus,
    y: &MonoCorpus,
    dev: Option<&ParallelCorpus>,
    unmt: &UnmtConfig,
    cfg: &SelfTrainConfig,
) -> Result<SelfTrainRun> {
    match cfg.strategy {
        Strategy::StUt => train_st_ut(base, x, y, dev, unmt, cfg),
        Strategy::StPt => train_st_pt(base, x, y, dev, unmt, cfg),
    }
}
