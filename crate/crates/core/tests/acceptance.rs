//! Acceptance suite: one PASS or FAIL line per criterion.
//!
//! Criteria 4 to 9 train real models on the reference toy configuration and
//! share unsupervised base models through an on-disk cache, so running them
//! together is much cheaper than running them apart. Set
//! `UNMT_ACCEPT_ONLY=4,5` to run a subset.
//!
//! Failed criteria are reported but do not fail the test run. Set
//! `UNMT_ACCEPT_STRICT=1` to exit nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unmt_lab::corpus::{Ids, Lang, Origin, ParallelCorpus};
use unmt_lab::eval::bleu;
use unmt_lab::harness::{
    base_model, evaluate, mix_seed, prepare_data, run_datasize_grid, run_experiment, sweep_ratio, Arm,
    ExperimentConfig, ExperimentReport, DEFAULT_RATIOS,
};
use unmt_lab::noise::{apply_noise, NoiseSpec};
use unmt_lab::selftrain::{
    train_st_pt, train_st_pt_from, train_st_ut, OracleTranslator, SelfTrainConfig, Strategy, SyntheticData,
    PT_STREAMS,
};
use unmt_lab::seq2seq::{grad_check, init_model, ModelDims, Translator};
use unmt_lab::toylang::generate_language_pair;
use unmt_lab::unmt::{train_unmt, UnmtConfig};

const SEEDS: [u64; 3] = [1, 2, 3];
const BALANCED: (usize, usize) = (20_000, 20_000);
const UNBALANCED: (usize, usize) = (20_000, 1_000);
const SMALL: (usize, usize) = (1_000, 1_000);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Ctx {
    cache: PathBuf,
    scratch: PathBuf,
    /// The unbalanced self-training experiment, reused by the epoch criterion.
    table3: Option<(ExperimentReport, f64)>,
}

fn reference(ctx: &Ctx) -> ExperimentConfig {
    ExperimentConfig {
        seeds: SEEDS.to_vec(),
        cache_dir: Some(ctx.cache.clone()),
        ..ExperimentConfig::default()
    }
}

fn fmt_pair((a, b): (f64, f64)) -> String {
    format!("{a:.2}/{b:.2}")
}

// Criterion 1.

fn random_ids(rng: &mut ChaCha8Rng, vocab: usize, len: std::ops::Range<usize>) -> Ids {
    let n = rng.gen_range(len);
    (0..n).map(|_| rng.gen_range(6..vocab as u32)).collect()
}

fn gradients(_: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for draw in 0..10u64 {
        let dims = ModelDims {
            vocab_size: rng.gen_range(12..24),
            embed_dim: rng.gen_range(3..7),
            hidden_dim: rng.gen_range(4..8),
            max_decode_len: 8,
        };
        let model = init_model(dims, 100 + draw).unwrap();
        let batch = rng.gen_range(1..5);
        let src: Vec<Ids> = (0..batch).map(|_| random_ids(&mut rng, dims.vocab_size, 1..7)).collect();
        let tgt: Vec<Ids> = (0..batch).map(|_| random_ids(&mut rng, dims.vocab_size, 1..7)).collect();
        let target = if draw % 2 == 0 { Lang::L1 } else { Lang::L2 };
        match grad_check(&model, &src, &tgt, target, 1e-5, draw) {
            Ok(err) => worst = worst.max(err),
            Err(e) => return outcome(false, format!("draw {draw}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-4 && secs < 60.0,
        format!("max relative error {worst:.2e} over 10 draws in {secs:.1}s"),
    )
}

// Criterion 2.

/// Clipped n-gram matches by exhaustive pairwise comparison, with no hashing.
fn brute_matches(hyp: &[u32], rf: &[u32], n: usize) -> (u64, u64) {
    if hyp.len() < n {
        return (0, 0);
    }
    let hyp_grams: Vec<&[u32]> = hyp.windows(n).collect();
    let ref_grams: Vec<&[u32]> = if rf.len() >= n { rf.windows(n).collect() } else { Vec::new() };
    let mut matched = 0u64;
    let mut done: Vec<&[u32]> = Vec::new();
    for g in &hyp_grams {
        if done.contains(g) {
            continue;
        }
        done.push(g);
        let in_hyp = hyp_grams.iter().filter(|h| *h == g).count() as u64;
        let in_ref = ref_grams.iter().filter(|r| *r == g).count() as u64;
        matched += in_hyp.min(in_ref);
    }
    (matched, hyp_grams.len() as u64)
}

fn brute_bleu(hyps: &[Vec<u32>], refs: &[Vec<u32>]) -> f64 {
    let mut m = [0u64; 4];
    let mut t = [0u64; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (h, rf) in hyps.iter().zip(refs) {
        c += h.len();
        r += rf.len();
        for n in 1..=4 {
            let (a, b) = brute_matches(h, rf, n);
            m[n - 1] += a;
            t[n - 1] += b;
        }
    }
    if (0..4).any(|i| m[i] == 0 || t[i] == 0) {
        return 0.0;
    }
    let log_p: f64 = (0..4).map(|i| (m[i] as f64 / t[i] as f64).ln()).sum::<f64>() / 4.0;
    let bp = if c >= r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    100.0 * bp * log_p.exp()
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn bleu_oracle(_: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..8);
        let mut hyps = Vec::new();
        let mut refs = Vec::new();
        for _ in 0..n {
            let r: Vec<u32> = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(0..5)).collect();
            // Hypotheses are noisy copies so that high orders sometimes match.
            let mut h = Vec::new();
            for &t in &r {
                if rng.gen_bool(0.85) {
                    h.push(if rng.gen_bool(0.15) { rng.gen_range(0..5) } else { t });
                }
            }
            hyps.push(h);
            refs.push(r);
        }
        let lib = bleu(&hyps, &refs).unwrap().score;
        let want = brute_bleu(&hyps, &refs);
        if want > 0.0 {
            nonzero += 1;
        }
        worst = worst.max((round4(lib) - round4(want)).abs());
    }
    let refs: Vec<Vec<u32>> = (0..20).map(|i| (0..5 + i % 4).map(|j| (i * 7 + j) as u32).collect()).collect();
    let identity = bleu(&refs, &refs).unwrap().score;
    // Hypotheses are strict prefixes, so every precision is one.
    let mut bp_worst = 0.0f64;
    for k in 0..20 {
        let r: Vec<u32> = (0..8 + k).map(|j| (j * 3 + k) as u32).collect();
        let h: Vec<u32> = r[..4 + k % 4].to_vec();
        let lib = bleu(&[h.clone()], &[r.clone()]).unwrap();
        let want = 100.0 * (1.0 - r.len() as f64 / h.len() as f64).exp();
        if lib.precisions != [1.0; 4] {
            return outcome(false, format!("prefix case {k} has precisions {:?}", lib.precisions));
        }
        bp_worst = bp_worst.max((round4(lib.score) - round4(want)).abs());
    }
    outcome(
        worst == 0.0 && identity == 100.0 && bp_worst == 0.0,
        format!(
            "oracle mismatch {worst:.4} ({nonzero}/100 non-zero corpora), identity {identity}, brevity mismatch {bp_worst:.4}"
        ),
    )
}

// Criterion 3.

fn noise_invariants(_: &mut Ctx) -> Outcome {
    const TRIALS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let k = 3;
    let shuffle = NoiseSpec {
        p_drop: 0.0,
        p_blank: 0.0,
        shuffle_k: k,
    };
    let mut multiset_ok = true;
    let mut max_disp = 0usize;
    for _ in 0..TRIALS {
        let len = rng.gen_range(1..15);
        // Distinct tokens make each token's displacement observable.
        let s: Vec<u32> = (10..10 + len as u32).collect();
        let out = apply_noise(&s, &shuffle, &mut rng);
        let mut sorted = out.clone();
        sorted.sort_unstable();
        multiset_ok &= sorted == s;
        for (pos, t) in out.iter().enumerate() {
            max_disp = max_disp.max(pos.abs_diff((t - 10) as usize));
        }
    }
    let p_drop = 0.1;
    let drop = NoiseSpec {
        p_drop,
        p_blank: 0.0,
        shuffle_k: 0,
    };
    let s: Vec<u32> = (10..30).collect();
    let mut dropped = 0usize;
    for _ in 0..TRIALS {
        dropped += s.len() - apply_noise(&s, &drop, &mut rng).len();
    }
    let rate = dropped as f64 / (TRIALS * s.len()) as f64;
    outcome(
        multiset_ok && max_disp <= k && (rate - p_drop).abs() <= 0.02,
        format!("multiset preserved {multiset_ok}, max displacement {max_disp} (k={k}), drop rate {rate:.4} (p={p_drop})"),
    )
}

// Criterion 4.

fn table1(ctx: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let cfg = reference(ctx);
    let grid = [BALANCED, UNBALANCED, SMALL];
    let report = match run_datasize_grid(&cfg, &grid) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    if !report.all_ok() {
        return outcome(false, "a grid cell failed");
    }
    let mean = |(nx, ny)| {
        let r = report.row(nx, ny).unwrap();
        (r.mean_xy, r.mean_yx)
    };
    let (b, u, s) = (mean(BALANCED), mean(UNBALANCED), mean(SMALL));
    let dirs = [(b.0, u.0, s.0), (b.1, u.1, s.1)];
    let gap = dirs.iter().all(|&(b, u, _)| b - u >= 2.0);
    let bounded = dirs.iter().all(|&(b, u, s)| u - s < b - s);
    outcome(
        gap && bounded && secs <= 1800.0,
        format!(
            "20k/20k {} 20k/1k {} 1k/1k {} (l1->l2/l2->l1), {secs:.0}s",
            fmt_pair(b),
            fmt_pair(u),
            fmt_pair(s)
        ),
    )
}

// Criterion 5.

fn table3_report(ctx: &mut Ctx) -> Result<(ExperimentReport, f64), String> {
    if let Some(r) = &ctx.table3 {
        return Ok(r.clone());
    }
    let start = Instant::now();
    let mut cfg = reference(ctx);
    (cfg.n_x, cfg.n_y) = UNBALANCED;
    cfg.selftrain.epsilon = 0.10;
    cfg.selftrain.max_epochs = 2;
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    if !report.all_ok() {
        return Err("an experiment cell failed".into());
    }
    let out = (report, start.elapsed().as_secs_f64());
    ctx.table3 = Some(out.clone());
    Ok(out)
}

fn table3(ctx: &mut Ctx) -> Outcome {
    let (report, secs) = match table3_report(ctx) {
        Ok(r) => r,
        Err(e) => return outcome(false, e),
    };
    let m = |arm| {
        let s = report.summary_for(arm).unwrap();
        (s.mean_xy, s.mean_yx)
    };
    let (base, extra, ut, pt) = (m(Arm::Baseline), m(Arm::BaselineExtraSteps), m(Arm::StUt), m(Arm::StPt));
    let order = pt.0 > ut.0 && ut.0 > extra.0 && pt.1 > ut.1 && ut.1 > extra.1;
    let margin = pt.0 - extra.0 >= 1.0 && pt.1 - extra.1 >= 1.0;
    let p: Vec<(String, f64)> = report
        .significance
        .iter()
        .filter(|t| t.result.system_a == "st_pt" && t.result.system_b == "baseline")
        .map(|t| (t.direction.clone(), t.result.p_value))
        .collect();
    let significant = p.len() == 2 && p.iter().all(|(_, p)| *p < 0.05);
    let p_text: Vec<String> = p.iter().map(|(d, p)| format!("{d} p={p:.3}")).collect();
    outcome(
        order && margin && significant && secs <= 1800.0,
        format!(
            "baseline {} extra {} st_ut {} st_pt {}; st_pt vs baseline {}; {secs:.0}s",
            fmt_pair(base),
            fmt_pair(extra),
            fmt_pair(ut),
            fmt_pair(pt),
            p_text.join(", ")
        ),
    )
}

// Criterion 6.

fn ratios(ctx: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let mut cfg = reference(ctx);
    (cfg.n_x, cfg.n_y) = UNBALANCED;
    let report = match sweep_ratio(&cfg, &DEFAULT_RATIOS) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    if !report.all_ok() {
        return outcome(false, "a sweep cell failed");
    }
    let control = report.mean(Arm::BaselineExtraSteps, None).unwrap();
    let mut ok = true;
    let mut parts = vec![format!("control {}", fmt_pair(control))];
    for arm in [Arm::StUt, Arm::StPt] {
        let mut curve = Vec::new();
        for &eps in &DEFAULT_RATIOS {
            let v = report.mean(arm, Some(eps)).unwrap();
            ok &= v.0 >= control.0 && v.1 >= control.1;
            curve.push(fmt_pair(v));
        }
        let at = |e| report.mean(arm, Some(e)).unwrap();
        let (a, b) = (at(0.10), at(1.00));
        ok &= (a.0 - b.0).abs() <= 1.5 && (a.1 - b.1).abs() <= 1.5;
        parts.push(format!("{} {}", arm.label(), curve.join(" ")));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok, format!("{}; {secs:.0}s", parts.join("; ")))
}

// Criterion 7.

fn gains(curve: &[(f64, f64)]) -> Vec<(f64, f64)> {
    curve.windows(2).map(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1)).collect()
}

fn epochs(ctx: &mut Ctx) -> Outcome {
    let (report, _) = match table3_report(ctx) {
        Ok(r) => r,
        Err(e) => return outcome(false, e),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for arm in [Arm::StUt, Arm::StPt, Arm::BaselineExtraSteps] {
        let g = gains(&report.summary_for(arm).unwrap().epoch_means);
        if arm == Arm::BaselineExtraSteps {
            ok &= g.iter().all(|&(a, b)| a < 1.0 && b < 1.0);
        } else {
            ok &= g.windows(2).all(|w| w[1].0 <= w[0].0 + 0.5 && w[1].1 <= w[0].1 + 0.5);
        }
        let text: Vec<String> = g.iter().map(|&p| fmt_pair(p)).collect();
        parts.push(format!("{} gains {}", arm.label(), text.join(" ")));
    }
    outcome(ok, parts.join("; "))
}

// Criterion 8.

fn contracts(_: &mut Ctx) -> Outcome {
    let pair = generate_language_pair(&Default::default()).unwrap();
    let data = prepare_data(&pair, 300, 40, 20, 10, 5).unwrap();
    let unmt = UnmtConfig {
        warmstart_steps: 4,
        bt_steps: 4,
        batch_size_tokens: 120,
        embed_dim: 8,
        hidden_dim: 12,
        eval_every: 4,
        ..UnmtConfig::default()
    };
    let base = train_unmt(&unmt, data.vocab.len(), &data.x, &data.y, None).unwrap().model;
    let mut problems = Vec::new();
    for (strategy, eps) in [(Strategy::StPt, 0.10), (Strategy::StPt, 0.37), (Strategy::StUt, 0.10)] {
        let cfg = SelfTrainConfig {
            strategy,
            epsilon: eps,
            max_epochs: 3,
            steps_per_epoch: 4,
            seed: 11,
            ..SelfTrainConfig::default()
        };
        let run = match strategy {
            Strategy::StPt => train_st_pt(&base, &data.x, &data.y, None, &unmt, &cfg),
            Strategy::StUt => train_st_ut(&base, &data.x, &data.y, None, &unmt, &cfg),
        };
        let run = match run {
            Ok(r) => r,
            Err(e) => return outcome(false, e.to_string()),
        };
        let want_sub = (eps * data.x.len() as f64).round() as usize;
        for (n, rec) in run.records.iter().enumerate() {
            let expected = if n == 0 { base.fingerprint() } else { run.snapshots[n - 1].fingerprint() };
            if rec.generator != expected {
                problems.push(format!("{} epoch {} generated by {}", strategy.label(), n + 1, rec.generator));
            }
            if rec.sub_len() != want_sub {
                problems.push(format!("{} |Y_sub| {} != {want_sub}", strategy.label(), rec.sub_len()));
            }
            if let SyntheticData::Parallel { all, .. } = &rec.data {
                if all.len() != data.y.len() {
                    problems.push(format!("|X_all| {} != |Y| {}", all.len(), data.y.len()));
                }
            }
        }
        if strategy == Strategy::StPt {
            for e in &run.epochs {
                let streams: Vec<&str> = e.consumed.keys().map(String::as_str).collect();
                let mut want: Vec<&str> = PT_STREAMS.to_vec();
                want.sort_unstable();
                if streams != want {
                    problems.push(format!("st_pt streams {streams:?}"));
                }
                for (name, origins) in &e.consumed {
                    if origins.keys().any(|&o| o != Origin::Synthetic) {
                        problems.push(format!("stream {name} consumed {origins:?}"));
                    }
                }
            }
        }
    }
    let detail = if problems.is_empty() {
        "synthetic-only ST-PT streams, generator chain and corpus sizes hold for 3 epochs".to_string()
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

// Criterion 9.

fn gold_corpora(
    pair: &unmt_lab::toylang::LanguagePair,
    vocab: &unmt_lab::corpus::Vocab,
    x: &unmt_lab::corpus::MonoCorpus,
    y: &unmt_lab::corpus::MonoCorpus,
) -> Vec<(ParallelCorpus, [&'static str; 2])> {
    let oracle = OracleTranslator { pair, vocab };
    let to_pairs = |c: &unmt_lab::corpus::MonoCorpus, target: Lang| -> Vec<(Ids, Ids)> {
        let out = oracle.translate(&c.sentences, target);
        c.sentences.iter().cloned().zip(out).collect()
    };
    let xy = ParallelCorpus {
        src_lang: Lang::L1,
        tgt_lang: Lang::L2,
        pairs: to_pairs(x, Lang::L2),
        origin: Origin::Reference,
    };
    let yx = ParallelCorpus {
        src_lang: Lang::L2,
        tgt_lang: Lang::L1,
        pairs: to_pairs(y, Lang::L1),
        origin: Origin::Reference,
    };
    vec![(xy, ["gold_xy", "gold_yx"]), (yx, ["gold_all_yx", "gold_all_xy"])]
}

fn oracle_fixed_point(ctx: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let mut cfg = reference(ctx);
    (cfg.n_x, cfg.n_y) = UNBALANCED;
    let pair = generate_language_pair(&cfg.pair).unwrap();
    let mut oracle_scores = Vec::new();
    let mut ceiling_scores = Vec::new();
    for &seed in &SEEDS {
        let data = prepare_data(&pair, cfg.n_x, cfg.n_y, cfg.n_test, cfg.n_dev, seed).unwrap();
        let base = match base_model(&cfg, &data, cfg.n_x, cfg.n_y, seed) {
            Ok(b) => b,
            Err(e) => return outcome(false, e.to_string()),
        };
        let st = SelfTrainConfig {
            max_epochs: 1,
            seed: mix_seed(cfg.selftrain.seed, seed),
            ..cfg.selftrain
        };
        let oracle = OracleTranslator {
            pair: &pair,
            vocab: &data.vocab,
        };
        let run = train_st_pt_from(&base, &oracle, &data.x, &data.y, None, &cfg.unmt, &st).unwrap();
        oracle_scores.push(evaluate(&run.model, &data.test).unwrap());

        // The ceiling trains from scratch on true pairs for all of X and Y,
        // twice as long as the oracle epoch.
        let mut fresh = init_model(cfg.unmt.dims(data.vocab.len()), mix_seed(seed, 91)).unwrap();
        fresh.output_mask = base.output_mask.clone();
        let mut sup = unmt_lab::selftrain::PnmtTrainer::new(
            fresh,
            cfg.unmt.optim,
            gold_corpora(&pair, &data.vocab, &data.x, &data.y),
            cfg.unmt.batch_size_tokens,
            mix_seed(seed, 92),
        )
        .unwrap();
        sup.run(2 * st.steps_per_epoch).unwrap();
        ceiling_scores.push(evaluate(&sup.model, &data.test).unwrap());
    }
    let mean = |v: &[unmt_lab::harness::TestOutput]| {
        let n = v.len() as f64;
        (
            v.iter().map(|t| t.bleu_xy).sum::<f64>() / n,
            v.iter().map(|t| t.bleu_yx).sum::<f64>() / n,
        )
    };
    let (o, c) = (mean(&oracle_scores), mean(&ceiling_scores));
    let secs = start.elapsed().as_secs_f64();
    outcome(
        o.0 >= c.0 - 5.0 && o.1 >= c.1 - 5.0,
        format!("oracle ST-PT {} vs supervised ceiling {}; {secs:.0}s", fmt_pair(o), fmt_pair(c)),
    )
}

// Criterion 10.

fn small_config(out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        n_x: 300,
        n_y: 60,
        n_test: 20,
        n_dev: 10,
        seeds: vec![1, 2],
        output_dir: Some(out.to_path_buf()),
        ..ExperimentConfig::default()
    };
    cfg.unmt.warmstart_steps = 4;
    cfg.unmt.bt_steps = 4;
    cfg.unmt.eval_every = 2;
    cfg.unmt.embed_dim = 8;
    cfg.unmt.hidden_dim = 12;
    cfg.unmt.batch_size_tokens = 100;
    cfg.selftrain.steps_per_epoch = 3;
    cfg
}

fn csv_files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism(ctx: &mut Ctx) -> Outcome {
    let mut runs = Vec::new();
    for i in 0..2 {
        let dir = ctx.scratch.join(format!("determinism{i}"));
        let _ = std::fs::remove_dir_all(&dir);
        let cfg = small_config(&dir);
        let steps = [
            run_experiment(&cfg).map(|_| ()),
            run_datasize_grid(&cfg, &[(300, 60), (100, 100)]).map(|_| ()),
            sweep_ratio(&cfg, &[0.2, 1.0]).map(|_| ()),
        ];
        if let Some(Err(e)) = steps.into_iter().find(|r| r.is_err()) {
            return outcome(false, e.to_string());
        }
        runs.push(csv_files(&dir));
    }
    let same = runs[0] == runs[1];
    let names: Vec<String> = runs[0].keys().map(|p| p.display().to_string()).collect();
    outcome(
        same && !runs[0].is_empty(),
        format!("{} CSV files compared ({})", names.len(), names.join(", ")),
    )
}

type Check = fn(&mut Ctx) -> Outcome;

fn main() {
    let checks: [(u32, &str, Check); 10] = [
        (1, "gradient correctness", gradients),
        (2, "BLEU oracle equivalence", bleu_oracle),
        (3, "noise invariants", noise_invariants),
        (4, "data-size pattern", table1),
        (5, "self-training pattern", table3),
        (6, "quantity ratio pattern", ratios),
        (7, "epoch pattern", epochs),
        (8, "algorithm contracts", contracts),
        (9, "oracle fixed point", oracle_fixed_point),
        (10, "determinism", determinism),
    ];
    let only: Option<Vec<u32>> = std::env::var("UNMT_ACCEPT_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let mut ctx = Ctx {
        cache: root.join("models"),
        scratch: root.join("scratch"),
        table3: None,
    };
    if std::env::var_os("UNMT_ACCEPT_KEEP_CACHE").is_none() {
        let _ = std::fs::remove_dir_all(&ctx.cache);
    }
    let mut failed = 0;
    for (n, name, check) in checks {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let r = check(&mut ctx);
        println!("criterion {n:>2} {:<4} {name}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
        if !r.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        if std::env::var_os("UNMT_ACCEPT_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
