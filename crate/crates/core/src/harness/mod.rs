//! Experiment runner: data-size grids, strategy comparisons branched from a
//! shared unsupervised model, and quantity-ratio and epoch sweeps.

mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use report::{
    emit_grid, emit_report, emit_sweep, Format, GRID_COLUMNS, REPORT_COLUMNS, SWEEP_COLUMNS,
};

use crate::corpus::{Ids, Lang, MonoCorpus, Origin, ParallelCorpus, Vocab, DEFAULT_MAX_LEN};
use crate::error::{Error, Result};
use crate::eval::{bleu, paired_bootstrap, SignificanceResult, MIN_SAMPLES};
use crate::selftrain::{
    train_continuation, train_st_pt, train_st_ut, SelfTrainConfig, SelfTrainRun,
};
use crate::seq2seq::{ModelSnapshot, Translator};
use crate::toylang::{generate_corpora, generate_language_pair, LanguagePair, LanguagePairSpec};
use crate::unmt::{train_unmt, UnmtConfig};

/// One arm of a strategy comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// The unsupervised model itself, unchanged across epochs.
    Baseline,
    /// Unsupervised training continued for the self-training step budget.
    BaselineExtraSteps,
    StUt,
    StPt,
}

impl Arm {
    pub const ALL: [Arm; 4] = [Arm::Baseline, Arm::BaselineExtraSteps, Arm::StUt, Arm::StPt];

    pub fn label(self) -> &'static str {
        match self {
            Arm::Baseline => "baseline",
            Arm::BaselineExtraSteps => "baseline_extra_steps",
            Arm::StUt => "st_ut",
            Arm::StPt => "st_pt",
        }
    }

    pub fn parse(s: &str) -> Result<Arm> {
        Arm::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::invalid("strategy", format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub pair: LanguagePairSpec,
    pub n_x: usize,
    pub n_y: usize,
    pub n_test: usize,
    /// Held-out pairs for training-time monitoring, drawn apart from the test set.
    pub n_dev: usize,
    pub unmt: UnmtConfig,
    pub selftrain: SelfTrainConfig,
    pub strategies: Vec<Arm>,
    pub seeds: Vec<u64>,
    pub bootstrap_samples: usize,
    /// Where reports, histories and synthetic records are written.
    pub output_dir: Option<PathBuf>,
    /// Where trained unsupervised models are cached by configuration hash.
    pub cache_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pair: LanguagePairSpec::default(),
            n_x: 20_000,
            n_y: 1_000,
            n_test: 500,
            n_dev: 200,
            unmt: UnmtConfig::default(),
            selftrain: SelfTrainConfig::default(),
            strategies: Arm::ALL.to_vec(),
            seeds: vec![1, 2, 3],
            bootstrap_samples: MIN_SAMPLES,
            output_dir: None,
            cache_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.pair.validate()?;
        self.unmt.validate()?;
        self.selftrain.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::invalid("seeds", "at least one seed required"));
        }
        if self.strategies.is_empty() {
            return Err(Error::invalid("strategies", "at least one strategy required"));
        }
        for (field, v) in [("n_x", self.n_x), ("n_y", self.n_y), ("n_test", self.n_test)] {
            if v == 0 {
                return Err(Error::invalid(field, "must be at least 1"));
            }
        }
        if self.bootstrap_samples < MIN_SAMPLES {
            return Err(Error::invalid("bootstrap_samples", format!("at least {MIN_SAMPLES} required")));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Derives an independent seed for one purpose from a run seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Encoded corpora of one seed. X and Y are cleaned; `test` and `dev` map L1
/// sources to L2 references.
#[derive(Debug, Clone)]
pub struct SeedData {
    pub pair: LanguagePair,
    pub vocab: Vocab,
    pub x: MonoCorpus,
    pub y: MonoCorpus,
    pub test: ParallelCorpus,
    pub dev: ParallelCorpus,
}

pub fn prepare_data(pair: &LanguagePair, n_x: usize, n_y: usize, n_test: usize, n_dev: usize, seed: u64) -> Result<SeedData> {
    let c = generate_corpora(pair, n_x, n_y, n_test + n_dev.max(1), seed)?;
    let vocab = Vocab::build(&[&c.x, &c.y]);
    let x = vocab.encode_mono(Lang::L1, &c.x, Origin::Natural).clean(DEFAULT_MAX_LEN);
    let y = vocab.encode_mono(Lang::L2, &c.y, Origin::Natural).clean(DEFAULT_MAX_LEN);
    let (test, dev) = c.test.split_at(n_test);
    Ok(SeedData {
        pair: pair.clone(),
        x,
        y,
        test: vocab.encode_parallel(Lang::L1, test, Origin::Reference),
        dev: vocab.encode_parallel(Lang::L1, dev, Origin::Reference),
        vocab,
    })
}

#[derive(Serialize)]
struct BaseKey<'a> {
    pair: &'a LanguagePairSpec,
    n_x: usize,
    n_y: usize,
    n_test: usize,
    n_dev: usize,
    unmt: &'a UnmtConfig,
    seed: u64,
}

fn cache_key(cfg: &ExperimentConfig, n_x: usize, n_y: usize, seed: u64) -> Result<String> {
    let key = BaseKey {
        pair: &cfg.pair,
        n_x,
        n_y,
        n_test: cfg.n_test,
        n_dev: cfg.n_dev,
        unmt: &cfg.unmt,
        seed,
    };
    let digest = Sha256::digest(serde_json::to_vec(&key)?);
    Ok(digest[..8].iter().map(|b| format!("{b:02x}")).collect())
}

/// Trains (or loads from the cache) the unsupervised model of one seed.
pub fn base_model(cfg: &ExperimentConfig, data: &SeedData, n_x: usize, n_y: usize, seed: u64) -> Result<ModelSnapshot> {
    let cached = match &cfg.cache_dir {
        Some(dir) => Some(dir.join(format!("m0-{}.snap", cache_key(cfg, n_x, n_y, seed)?))),
        None => None,
    };
    if let Some(path) = &cached {
        if path.exists() {
            return ModelSnapshot::load(path);
        }
    }
    let unmt = UnmtConfig {
        seed: mix_seed(cfg.unmt.seed, seed),
        ..cfg.unmt
    };
    let run = train_unmt(&unmt, data.vocab.len(), &data.x, &data.y, Some(&data.dev))?;
    if let Some(dir) = &cfg.output_dir {
        let d = dir.join("histories");
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
        run.history.save_csv(&d.join(format!("m0-{n_x}x{n_y}-seed{seed}.csv")))?;
    }
    if let Some(path) = &cached {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        // Write then rename so concurrent readers never see a partial file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        run.model.save(&tmp)?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    }
    Ok(run.model)
}

/// Hypotheses of one model on a test set, both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutput {
    pub hyp_xy: Vec<Ids>,
    pub hyp_yx: Vec<Ids>,
    pub bleu_xy: f64,
    pub bleu_yx: f64,
}

pub fn evaluate(model: &dyn Translator, test: &ParallelCorpus) -> Result<TestOutput> {
    let src = test.sources();
    let tgt = test.targets();
    let hyp_xy = model.translate(&src, Lang::L2);
    let hyp_yx = model.translate(&tgt, Lang::L1);
    Ok(TestOutput {
        bleu_xy: bleu(&hyp_xy, &tgt)?.score,
        bleu_yx: bleu(&hyp_yx, &src)?.score,
        hyp_xy,
        hyp_yx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochBleu {
    pub epoch: usize,
    pub bleu_xy: f64,
    pub bleu_yx: f64,
}

/// Synthetic data bookkeeping of one epoch of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub epoch: usize,
    pub generator: String,
    pub sub_len: usize,
    pub all_len: Option<usize>,
    /// Sentences consumed per loss stream and origin during the epoch.
    pub consumed: std::collections::BTreeMap<String, std::collections::BTreeMap<Origin, u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub strategy: Arm,
    pub seed: u64,
    pub status: Status,
    pub error: Option<String>,
    /// Test BLEU after each epoch, epoch 0 being the shared base model.
    pub epochs: Vec<EpochBleu>,
    pub base_model: Option<String>,
    pub final_model: Option<String>,
    /// Optimizer updates applied on top of the base model.
    pub extra_steps: u64,
    pub records: Vec<RecordSummary>,
    pub wall_time_s: f64,
}

impl CellReport {
    pub fn final_bleu(&self) -> Option<(f64, f64)> {
        self.epochs.last().map(|e| (e.bleu_xy, e.bleu_yx))
    }

    fn errored(strategy: Arm, seed: u64, e: &Error, base_model: Option<String>, wall: f64) -> Self {
        CellReport {
            strategy,
            seed,
            status: Status::Error,
            error: Some(e.to_string()),
            epochs: Vec::new(),
            base_model,
            final_model: None,
            extra_steps: 0,
            records: Vec::new(),
            wall_time_s: wall,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Arm,
    pub cells_ok: usize,
    pub mean_xy: f64,
    pub std_xy: f64,
    pub mean_yx: f64,
    pub std_yx: f64,
    /// Seed-mean BLEU after each epoch, `(xy, yx)`.
    pub epoch_means: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    pub direction: String,
    pub result: SignificanceResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
    pub summary: Vec<StrategySummary>,
    /// Each self-training arm against the base model and against the
    /// extra-steps control, on seed-pooled test sets.
    pub significance: Vec<PairedTest>,
}

impl ExperimentReport {
    pub fn all_ok(&self) -> bool {
        self.cells.iter().all(|c| c.status == Status::Ok)
    }

    pub fn summary_for(&self, arm: Arm) -> Option<&StrategySummary> {
        self.summary.iter().find(|s| s.strategy == arm)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn summarize(cells: &[CellReport], arms: &[Arm]) -> Vec<StrategySummary> {
    arms.iter()
        .map(|&arm| {
            let ok: Vec<&CellReport> = cells
                .iter()
                .filter(|c| c.strategy == arm && c.status == Status::Ok)
                .collect();
            let xy: Vec<f64> = ok.iter().filter_map(|c| c.final_bleu()).map(|b| b.0).collect();
            let yx: Vec<f64> = ok.iter().filter_map(|c| c.final_bleu()).map(|b| b.1).collect();
            let (mean_xy, std_xy) = mean_std(&xy);
            let (mean_yx, std_yx) = mean_std(&yx);
            let n_epochs = ok.iter().map(|c| c.epochs.len()).min().unwrap_or(0);
            let epoch_means = (0..n_epochs)
                .map(|e| {
                    let a: Vec<f64> = ok.iter().map(|c| c.epochs[e].bleu_xy).collect();
                    let b: Vec<f64> = ok.iter().map(|c| c.epochs[e].bleu_yx).collect();
                    (mean_std(&a).0, mean_std(&b).0)
                })
                .collect();
            StrategySummary {
                strategy: arm,
                cells_ok: ok.len(),
                mean_xy,
                std_xy,
                mean_yx,
                std_yx,
                epoch_means,
            }
        })
        .collect()
}

/// Final-epoch hypotheses of one cell, kept in memory for pooled tests.
struct CellOutput {
    report: CellReport,
    finals: Option<TestOutput>,
}

fn arm_run(
    arm: Arm,
    base: &ModelSnapshot,
    data: &SeedData,
    unmt: &UnmtConfig,
    st: &SelfTrainConfig,
) -> Result<SelfTrainRun> {
    match arm {
        Arm::Baseline => Ok(SelfTrainRun {
            model: base.clone(),
            records: Vec::new(),
            epochs: Vec::new(),
            snapshots: vec![base.clone(); st.max_epochs],
        }),
        Arm::BaselineExtraSteps => train_continuation(base, &data.x, &data.y, Some(&data.dev), unmt, st),
        Arm::StUt => train_st_ut(base, &data.x, &data.y, Some(&data.dev), unmt, st),
        Arm::StPt => train_st_pt(base, &data.x, &data.y, Some(&data.dev), unmt, st),
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    arm: Arm,
    seed: u64,
    base: &ModelSnapshot,
    base_eval: &TestOutput,
    data: &SeedData,
    st: &SelfTrainConfig,
) -> Result<(CellReport, TestOutput)> {
    let start = Instant::now();
    let run = arm_run(arm, base, data, &cfg.unmt, st)?;
    let mut epochs = vec![EpochBleu {
        epoch: 0,
        bleu_xy: base_eval.bleu_xy,
        bleu_yx: base_eval.bleu_yx,
    }];
    let mut last = base_eval.clone();
    for (i, snap) in run.snapshots.iter().enumerate() {
        if arm != Arm::Baseline {
            last = evaluate(snap, &data.test)?;
        }
        epochs.push(EpochBleu {
            epoch: i + 1,
            bleu_xy: last.bleu_xy,
            bleu_yx: last.bleu_yx,
        });
    }
    if let Some(dir) = &cfg.output_dir {
        let d = dir.join("records").join(arm.label()).join(format!("seed{seed}"));
        for r in &run.records {
            r.dump(&data.vocab, &data.x, &d)?;
        }
    }
    let records = run
        .records
        .iter()
        .zip(&run.epochs)
        .map(|(r, e)| RecordSummary {
            epoch: r.epoch,
            generator: r.generator.clone(),
            sub_len: r.sub_len(),
            all_len: match &r.data {
                crate::selftrain::SyntheticData::Parallel { all, .. } => Some(all.len()),
                crate::selftrain::SyntheticData::Mono(_) => None,
            },
            consumed: e.consumed.clone(),
        })
        .collect();
    let report = CellReport {
        strategy: arm,
        seed,
        status: Status::Ok,
        error: None,
        epochs,
        base_model: Some(base.fingerprint()),
        final_model: Some(run.model.fingerprint()),
        extra_steps: run.model.step - base.step,
        records,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((report, last))
}

/// Cells of one seed plus its test sources and references, when the data built.
type SeedOutput = (Vec<CellOutput>, Option<(Vec<Ids>, Vec<Ids>)>);

fn run_seed(cfg: &ExperimentConfig, pair: &LanguagePair, seed: u64) -> SeedOutput {
    let start = Instant::now();
    let prepared = prepare_data(pair, cfg.n_x, cfg.n_y, cfg.n_test, cfg.n_dev, seed).and_then(|data| {
        let base = base_model(cfg, &data, cfg.n_x, cfg.n_y, seed)?;
        let eval = evaluate(&base, &data.test)?;
        Ok((data, base, eval))
    });
    let (data, base, base_eval) = match prepared {
        Ok(p) => p,
        Err(e) => {
            let wall = start.elapsed().as_secs_f64();
            let cells = cfg
                .strategies
                .iter()
                .map(|&arm| CellOutput {
                    report: CellReport::errored(arm, seed, &e, None, wall),
                    finals: None,
                })
                .collect();
            return (cells, None);
        }
    };
    let st = SelfTrainConfig {
        seed: mix_seed(cfg.selftrain.seed, seed),
        ..cfg.selftrain
    };
    let cells = cfg
        .strategies
        .iter()
        .map(|&arm| match run_cell(cfg, arm, seed, &base, &base_eval, &data, &st) {
            Ok((report, out)) => CellOutput {
                report,
                finals: Some(out),
            },
            Err(e) => CellOutput {
                report: CellReport::errored(arm, seed, &e, Some(base.fingerprint()), 0.0),
                finals: None,
            },
        })
        .collect();
    (cells, Some((data.test.sources(), data.test.targets())))
}

fn map_seeds<T: Send>(seeds: &[u64], f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        seeds.par_iter().map(|&s| f(s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds.iter().map(|&s| f(s)).collect()
    }
}

/// Pools each arm's final hypotheses over seeds and tests them against the
/// base model and the extra-steps control.
fn pooled_tests(
    cfg: &ExperimentConfig,
    outputs: &[Vec<CellOutput>],
    refs: &[(Vec<Ids>, Vec<Ids>)],
) -> Vec<PairedTest> {
    let pooled = |arm: Arm| -> Option<(Vec<Ids>, Vec<Ids>)> {
        let mut xy = Vec::new();
        let mut yx = Vec::new();
        for seed_out in outputs {
            let cell = seed_out.iter().find(|c| c.report.strategy == arm)?;
            let out = cell.finals.as_ref()?;
            xy.extend(out.hyp_xy.iter().cloned());
            yx.extend(out.hyp_yx.iter().cloned());
        }
        Some((xy, yx))
    };
    let ref_xy: Vec<Ids> = refs.iter().flat_map(|r| r.1.iter().cloned()).collect();
    let ref_yx: Vec<Ids> = refs.iter().flat_map(|r| r.0.iter().cloned()).collect();
    let mut tests = Vec::new();
    for arm in [Arm::StUt, Arm::StPt] {
        if !cfg.strategies.contains(&arm) {
            continue;
        }
        let Some(a) = pooled(arm) else { continue };
        for against in [Arm::Baseline, Arm::BaselineExtraSteps] {
            if !cfg.strategies.contains(&against) {
                continue;
            }
            let Some(b) = pooled(against) else { continue };
            for (direction, ha, hb, r) in [("l1_l2", &a.0, &b.0, &ref_xy), ("l2_l1", &a.1, &b.1, &ref_yx)] {
                if let Ok(result) = paired_bootstrap(
                    arm.label(),
                    ha,
                    against.label(),
                    hb,
                    r,
                    cfg.bootstrap_samples,
                    mix_seed(cfg.selftrain.seed, 77),
                ) {
                    tests.push(PairedTest {
                        direction: direction.to_string(),
                        result,
                    });
                }
            }
        }
    }
    tests
}

/// Runs every configured arm for every seed, each arm branching from the
/// seed's shared unsupervised model. Errors are recorded per cell.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pair = generate_language_pair(&cfg.pair)?;
    let (outputs, refs): (Vec<_>, Vec<_>) = map_seeds(&cfg.seeds, |seed| run_seed(cfg, &pair, seed))
        .into_iter()
        .unzip();
    // Pooled tests need every seed's test set.
    let refs: Vec<(Vec<Ids>, Vec<Ids>)> = refs.into_iter().flatten().collect();
    let significance = if refs.len() == cfg.seeds.len() {
        pooled_tests(cfg, &outputs, &refs)
    } else {
        Vec::new()
    };
    let cells: Vec<CellReport> = outputs.into_iter().flatten().map(|c| c.report).collect();
    let summary = summarize(&cells, &cfg.strategies);
    let report = ExperimentReport {
        config: cfg.clone(),
        cells,
        summary,
        significance,
    };
    if let Some(dir) = &cfg.output_dir {
        emit_report(&report, Format::Csv, &dir.join("report.csv"))?;
        emit_report(&report, Format::Json, &dir.join("report.json"))?;
    }
    Ok(report)
}

/// Per-epoch BLEU of the extra-steps control and both self-training arms
/// for `max_epochs` epochs.
pub fn sweep_epochs(cfg: &ExperimentConfig, max_epochs: usize) -> Result<ExperimentReport> {
    if max_epochs == 0 {
        return Err(Error::invalid("max_epochs", "must be at least 1"));
    }
    let cfg = ExperimentConfig {
        strategies: vec![Arm::BaselineExtraSteps, Arm::StUt, Arm::StPt],
        selftrain: SelfTrainConfig {
            max_epochs,
            ..cfg.selftrain
        },
        ..cfg.clone()
    };
    run_experiment(&cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub n_x: usize,
    pub n_y: usize,
    pub seed: u64,
    pub status: Status,
    pub error: Option<String>,
    pub bleu_xy: Option<f64>,
    pub bleu_yx: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub n_x: usize,
    pub n_y: usize,
    pub mean_xy: f64,
    pub std_xy: f64,
    pub mean_yx: f64,
    pub std_yx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
    /// One row per grid entry, in grid order.
    pub rows: Vec<GridRow>,
}

impl GridReport {
    pub fn all_ok(&self) -> bool {
        self.cells.iter().all(|c| c.status == Status::Ok)
    }

    pub fn row(&self, n_x: usize, n_y: usize) -> Option<&GridRow> {
        self.rows.iter().find(|r| r.n_x == n_x && r.n_y == n_y)
    }
}

/// One baseline run per (grid entry, seed); test BLEU of each.
pub fn run_datasize_grid(cfg: &ExperimentConfig, grid: &[(usize, usize)]) -> Result<GridReport> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(Error::invalid("grid", "at least one cell required"));
    }
    let pair = generate_language_pair(&cfg.pair)?;
    let jobs: Vec<(usize, usize, u64)> = grid
        .iter()
        .flat_map(|&(nx, ny)| cfg.seeds.iter().map(move |&s| (nx, ny, s)))
        .collect();
    let job_ids: Vec<u64> = (0..jobs.len() as u64).collect();
    let cells = map_seeds(&job_ids, |j| {
        let (n_x, n_y, seed) = jobs[j as usize];
        let result = prepare_data(&pair, n_x, n_y, cfg.n_test, cfg.n_dev, seed).and_then(|data| {
            let m = base_model(cfg, &data, n_x, n_y, seed)?;
            evaluate(&m, &data.test)
        });
        match result {
            Ok(out) => GridCell {
                n_x,
                n_y,
                seed,
                status: Status::Ok,
                error: None,
                bleu_xy: Some(out.bleu_xy),
                bleu_yx: Some(out.bleu_yx),
            },
            Err(e) => GridCell {
                n_x,
                n_y,
                seed,
                status: Status::Error,
                error: Some(e.to_string()),
                bleu_xy: None,
                bleu_yx: None,
            },
        }
    });
    let rows = grid
        .iter()
        .map(|&(n_x, n_y)| {
            let here: Vec<&GridCell> = cells.iter().filter(|c| c.n_x == n_x && c.n_y == n_y).collect();
            let (mean_xy, std_xy) = mean_std(&here.iter().filter_map(|c| c.bleu_xy).collect::<Vec<_>>());
            let (mean_yx, std_yx) = mean_std(&here.iter().filter_map(|c| c.bleu_yx).collect::<Vec<_>>());
            GridRow {
                n_x,
                n_y,
                mean_xy,
                std_xy,
                mean_yx,
                std_yx,
            }
        })
        .collect();
    let report = GridReport { cells, rows };
    if let Some(dir) = &cfg.output_dir {
        emit_grid(&report, Format::Csv, &dir.join("grid.csv"))?;
        emit_grid(&report, Format::Json, &dir.join("grid.json"))?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub strategy: Arm,
    /// Quantity ratio; absent for the control arm.
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub status: Status,
    pub error: Option<String>,
    pub bleu_xy: Option<f64>,
    pub bleu_yx: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn all_ok(&self) -> bool {
        self.cells.iter().all(|c| c.status == Status::Ok)
    }

    /// Seed-mean `(xy, yx)` of one arm at one ratio.
    pub fn mean(&self, strategy: Arm, epsilon: Option<f64>) -> Option<(f64, f64)> {
        let here: Vec<&SweepCell> = self
            .cells
            .iter()
            .filter(|c| c.strategy == strategy && c.epsilon == epsilon && c.status == Status::Ok)
            .collect();
        if here.is_empty() {
            return None;
        }
        let xy: Vec<f64> = here.iter().filter_map(|c| c.bleu_xy).collect();
        let yx: Vec<f64> = here.iter().filter_map(|c| c.bleu_yx).collect();
        Some((mean_std(&xy).0, mean_std(&yx).0))
    }
}

pub const DEFAULT_RATIOS: [f64; 6] = [0.01, 0.05, 0.10, 0.30, 0.50, 1.00];

/// One-epoch ST-UT and ST-PT runs per ratio plus a one-epoch extra-steps
/// control, all branched from each seed's base model.
pub fn sweep_ratio(cfg: &ExperimentConfig, ratios: &[f64]) -> Result<SweepReport> {
    cfg.validate()?;
    if ratios.is_empty() {
        return Err(Error::invalid("ratios", "at least one ratio required"));
    }
    if let Some(bad) = ratios.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::invalid("ratios", format!("{bad} is outside (0, 1]")));
    }
    let pair = generate_language_pair(&cfg.pair)?;
    let per_seed = map_seeds(&cfg.seeds, |seed| {
        let mut out = Vec::new();
        let prepared = prepare_data(&pair, cfg.n_x, cfg.n_y, cfg.n_test, cfg.n_dev, seed)
            .and_then(|data| Ok((base_model(cfg, &data, cfg.n_x, cfg.n_y, seed)?, data)));
        let mut arms: Vec<(Arm, Option<f64>)> = vec![(Arm::BaselineExtraSteps, None)];
        for &r in ratios {
            arms.push((Arm::StUt, Some(r)));
            arms.push((Arm::StPt, Some(r)));
        }
        for (arm, epsilon) in arms {
            let result = prepared.as_ref().map_err(|e| e.to_string()).and_then(|(base, data)| {
                let st = SelfTrainConfig {
                    seed: mix_seed(cfg.selftrain.seed, seed),
                    max_epochs: 1,
                    epsilon: epsilon.unwrap_or(cfg.selftrain.epsilon),
                    ..cfg.selftrain
                };
                arm_run(arm, base, data, &cfg.unmt, &st)
                    .and_then(|run| evaluate(&run.model, &data.test))
                    .map_err(|e| e.to_string())
            });
            out.push(match result {
                Ok(o) => SweepCell {
                    strategy: arm,
                    epsilon,
                    seed,
                    status: Status::Ok,
                    error: None,
                    bleu_xy: Some(o.bleu_xy),
                    bleu_yx: Some(o.bleu_yx),
                },
                Err(e) => SweepCell {
                    strategy: arm,
                    epsilon,
                    seed,
                    status: Status::Error,
                    error: Some(e),
                    bleu_xy: None,
                    bleu_yx: None,
                },
            });
        }
        out
    });
    let report = SweepReport {
        cells: per_seed.into_iter().flatten().collect(),
    };
    if let Some(dir) = &cfg.output_dir {
        emit_sweep(&report, Format::Csv, &dir.join("sweep_ratio.csv"))?;
        emit_sweep(&report, Format::Json, &dir.join("sweep_ratio.json"))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(super) fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            n_x: 60,
            n_y: 30,
            n_test: 8,
            n_dev: 4,
            unmt: UnmtConfig {
                warmstart_steps: 2,
                bt_steps: 2,
                batch_size_tokens: 60,
                embed_dim: 8,
                hidden_dim: 10,
                max_decode_len: 8,
                eval_every: 2,
                ..UnmtConfig::default()
            },
            selftrain: SelfTrainConfig {
                steps_per_epoch: 2,
                ..SelfTrainConfig::default()
            },
            seeds: vec![1, 2],
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn experiment_branches_from_one_base() {
        let r = run_experiment(&tiny()).unwrap();
        assert!(r.all_ok());
        assert_eq!(r.cells.len(), 8);
        for seed in [1, 2] {
            let bases: Vec<&Option<String>> =
                r.cells.iter().filter(|c| c.seed == seed).map(|c| &c.base_model).collect();
            assert!(bases.windows(2).all(|w| w[0] == w[1]));
            let epoch0: Vec<f64> = r.cells.iter().filter(|c| c.seed == seed).map(|c| c.epochs[0].bleu_xy).collect();
            assert!(epoch0.windows(2).all(|w| w[0] == w[1]));
        }
        let steps: Vec<u64> = r
            .cells
            .iter()
            .filter(|c| c.strategy != Arm::Baseline)
            .map(|c| c.extra_steps)
            .collect();
        assert!(steps.iter().all(|&s| s == 4));
        assert_eq!(r.significance.len(), 8);
        assert_eq!(r.summary.len(), 4);
        assert_eq!(r.summary[0].epoch_means.len(), 3);
    }

    #[test]
    fn report_json_round_trips() {
        let r = run_experiment(&ExperimentConfig {
            strategies: vec![Arm::Baseline, Arm::StPt],
            seeds: vec![4],
            ..tiny()
        })
        .unwrap();
        let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn failing_cells_are_reported() {
        // Too many sentences for the grammar: corpus generation fails.
        let cfg = ExperimentConfig {
            pair: LanguagePairSpec {
                content_vocab_size: 10,
                anchor_vocab_size: 1,
                ..LanguagePairSpec::default()
            },
            n_x: 200_000,
            strategies: vec![Arm::Baseline, Arm::StUt],
            seeds: vec![1],
            ..tiny()
        };
        let r = run_experiment(&cfg).unwrap();
        assert!(!r.all_ok());
        assert_eq!(r.cells.len(), 2);
        assert!(r.cells.iter().all(|c| c.status == Status::Error && c.error.is_some()));
    }

    #[test]
    fn config_json_fills_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"n_x": 100, "seeds": [5]}"#).unwrap();
        assert_eq!(cfg.n_x, 100);
        assert_eq!(cfg.seeds, vec![5]);
        assert_eq!(cfg.selftrain.epsilon, 0.10);
        assert_eq!(cfg.selftrain.max_epochs, 2);
        assert!(ExperimentConfig::from_json(r#"{"seeds": []}"#).is_err());
        assert_eq!(Arm::parse("st_pt").unwrap(), Arm::StPt);
        assert!(Arm::parse("nope").is_err());
    }

    #[test]
    fn grid_and_sweep_shapes() {
        let cfg = ExperimentConfig {
            seeds: vec![1],
            ..tiny()
        };
        let g = run_datasize_grid(&cfg, &[(60, 30), (30, 60)]).unwrap();
        assert!(g.all_ok());
        assert_eq!(g.rows.len(), 2);
        assert!(g.row(30, 60).is_some());
        let s = sweep_ratio(&cfg, &[0.1, 1.0]).unwrap();
        assert_eq!(s.cells.len(), 5);
        assert!(s.mean(Arm::StPt, Some(1.0)).is_some());
        assert!(sweep_ratio(&cfg, &[0.0]).is_err());
    }

    #[test]
    fn cache_reuses_base_model() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            seeds: vec![1],
            strategies: vec![Arm::Baseline],
            cache_dir: Some(dir.path().to_path_buf()),
            ..tiny()
        };
        let a = run_experiment(&cfg).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.cells[0].base_model, b.cells[0].base_model);
    }
}
