//! `unmt-lab`: generate toy corpora, train models and run experiments.
//!
//! Every subcommand reads an optional JSON experiment config; flags override
//! individual fields. Outputs go under `--out`, else `$UNMT_LAB_OUT`, else
//! `./unmt-lab-out`. The exit code is 0 only when every cell succeeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use unmt_lab::corpus::read_lines;
use unmt_lab::eval::{bleu, paired_bootstrap, MIN_SAMPLES};
use unmt_lab::harness::{
    base_model, mix_seed, prepare_data, run_datasize_grid, run_experiment, sweep_epochs,
    sweep_ratio, Arm, ExperimentConfig, ExperimentReport, DEFAULT_RATIOS,
};
use unmt_lab::toylang::generate_language_pair;
use unmt_lab::unmt::{train_unmt, UnmtConfig};
use unmt_lab::{Error, Result};

#[derive(Parser)]
#[command(name = "unmt-lab", version, about = "Unsupervised NMT and self-training on synthetic language pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run seed; repeat to run several. Overrides the config's seed list.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    /// Output directory.
    #[arg(long, env = "UNMT_LAB_OUT", default_value = "unmt-lab-out")]
    out: PathBuf,
    /// Directory caching trained unsupervised models between runs.
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds.clone();
        }
        cfg.output_dir = Some(self.out.clone());
        if self.cache.is_some() {
            cfg.cache_dir = self.cache.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a language pair and its corpora for one seed.
    Gen(Common),
    /// Train one unsupervised model and write its snapshot and history.
    Train(Common),
    /// Compare strategies branched from a shared unsupervised model.
    Experiment {
        #[command(flatten)]
        common: Common,
        /// Strategy to run (baseline, baseline_extra_steps, st_ut, st_pt); repeatable.
        #[arg(long = "strategy")]
        strategies: Vec<String>,
    },
    /// Baseline BLEU over a grid of corpus sizes.
    Grid {
        #[command(flatten)]
        common: Common,
        /// Cells as NXxNY, comma separated.
        #[arg(long, default_value = "20000x20000,10000x10000,20000x1000,1000x20000,1000x1000")]
        cells: String,
    },
    /// One-epoch self-training at several quantity ratios.
    SweepRatio {
        #[command(flatten)]
        common: Common,
        /// Ratios in (0, 1], comma separated.
        #[arg(long)]
        ratios: Option<String>,
    },
    /// BLEU after each self-training epoch.
    SweepEpochs {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        max_epochs: usize,
    },
    /// Corpus BLEU of a hypothesis file against a reference file.
    Bleu {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
    },
    /// Paired bootstrap test of system A against system B.
    Signif {
        #[arg(long)]
        hyp_a: PathBuf,
        #[arg(long)]
        hyp_b: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, default_value_t = MIN_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, field: &'static str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Invalid {
                    field,
                    reason: format!("cannot parse {t:?}"),
                })
        })
        .collect()
}

fn parse_cells(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|c| {
            let bad = || Error::Invalid {
                field: "cells",
                reason: format!("expected NXxNY, got {c:?}"),
            };
            let (a, b) = c.trim().split_once('x').ok_or_else(bad)?;
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
        })
        .collect()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn create(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn gen(common: &Common) -> Result<bool> {
    let cfg = common.load()?;
    let pair = generate_language_pair(&cfg.pair)?;
    let out = &common.out;
    create(out)?;
    write_json(&out.join("pair.json"), &pair.manifest())?;
    for &seed in &cfg.seeds {
        let data = prepare_data(&pair, cfg.n_x, cfg.n_y, cfg.n_test, cfg.n_dev, seed)?;
        let dir = out.join(format!("seed{seed}"));
        create(&dir)?;
        let vocab_path = dir.join("vocab.txt");
        let mut buf = Vec::new();
        data.vocab.write_to(&mut buf).map_err(|e| Error::io(&vocab_path, e))?;
        std::fs::write(&vocab_path, buf).map_err(|e| Error::io(&vocab_path, e))?;
        data.x.write_text(&data.vocab, &dir.join("x.l1.txt"))?;
        data.y.write_text(&data.vocab, &dir.join("y.l2.txt"))?;
        data.test.write_text(&data.vocab, &dir.join("test"))?;
        data.dev.write_text(&data.vocab, &dir.join("dev"))?;
        println!("seed {seed}: |X|={} |Y|={} test={} vocab={}", data.x.len(), data.y.len(), data.test.len(), data.vocab.len());
    }
    Ok(true)
}

fn train(common: &Common) -> Result<bool> {
    let cfg = common.load()?;
    let pair = generate_language_pair(&cfg.pair)?;
    create(&common.out)?;
    for &seed in &cfg.seeds {
        let data = prepare_data(&pair, cfg.n_x, cfg.n_y, cfg.n_test, cfg.n_dev, seed)?;
        let unmt = UnmtConfig {
            seed: mix_seed(cfg.unmt.seed, seed),
            ..cfg.unmt
        };
        let model = if cfg.cache_dir.is_some() {
            base_model(&cfg, &data, cfg.n_x, cfg.n_y, seed)?
        } else {
            let run = train_unmt(&unmt, data.vocab.len(), &data.x, &data.y, Some(&data.dev))?;
            run.history.save_csv(&common.out.join(format!("history-seed{seed}.csv")))?;
            run.model
        };
        model.save(&common.out.join(format!("model-seed{seed}.snap")))?;
        let test = unmt_lab::harness::evaluate(&model, &data.test)?;
        println!(
            "seed {seed}: model {} test BLEU l1->l2 {:.2} l2->l1 {:.2}",
            model.fingerprint(),
            test.bleu_xy,
            test.bleu_yx
        );
    }
    Ok(true)
}

fn print_report(r: &ExperimentReport) {
    println!("{:<22} {:>4} {:>14} {:>14}", "strategy", "ok", "l1->l2", "l2->l1");
    for s in &r.summary {
        println!(
            "{:<22} {:>4} {:>7.2} ±{:<5.2} {:>7.2} ±{:<5.2}",
            s.strategy.label(),
            s.cells_ok,
            s.mean_xy,
            s.std_xy,
            s.mean_yx,
            s.std_yx
        );
    }
    for t in &r.significance {
        println!(
            "{} vs {} ({}): p = {:.4}",
            t.result.system_a, t.result.system_b, t.direction, t.result.p_value
        );
    }
    for c in r.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!("cell {} seed {} failed: {}", c.strategy.label(), c.seed, c.error.as_deref().unwrap_or(""));
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gen(c) => gen(&c),
        Command::Train(c) => train(&c),
        Command::Experiment { common, strategies } => {
            let mut cfg = common.load()?;
            if !strategies.is_empty() {
                cfg.strategies = strategies.iter().map(|s| Arm::parse(s)).collect::<Result<_>>()?;
            }
            let r = run_experiment(&cfg)?;
            print_report(&r);
            Ok(r.all_ok())
        }
        Command::Grid { common, cells } => {
            let cfg = common.load()?;
            let r = run_datasize_grid(&cfg, &parse_cells(&cells)?)?;
            println!("{:>7} {:>7} {:>8} {:>8}", "n_x", "n_y", "l1->l2", "l2->l1");
            for row in &r.rows {
                println!("{:>7} {:>7} {:>8.2} {:>8.2}", row.n_x, row.n_y, row.mean_xy, row.mean_yx);
            }
            Ok(r.all_ok())
        }
        Command::SweepRatio { common, ratios } => {
            let cfg = common.load()?;
            let ratios = match ratios {
                Some(s) => parse_list(&s, "ratios")?,
                None => DEFAULT_RATIOS.to_vec(),
            };
            let r = sweep_ratio(&cfg, &ratios)?;
            if let Some((a, b)) = r.mean(Arm::BaselineExtraSteps, None) {
                println!("baseline_extra_steps: {a:.2} / {b:.2}");
            }
            for &eps in &ratios {
                for arm in [Arm::StUt, Arm::StPt] {
                    if let Some((a, b)) = r.mean(arm, Some(eps)) {
                        println!("{} eps={eps}: {a:.2} / {b:.2}", arm.label());
                    }
                }
            }
            Ok(r.all_ok())
        }
        Command::SweepEpochs { common, max_epochs } => {
            let cfg = common.load()?;
            let r = sweep_epochs(&cfg, max_epochs)?;
            for s in &r.summary {
                let curve: Vec<String> = s.epoch_means.iter().map(|(a, b)| format!("{a:.2}/{b:.2}")).collect();
                println!("{:<22} {}", s.strategy.label(), curve.join("  "));
            }
            Ok(r.all_ok())
        }
        Command::Bleu { hyp, reference } => {
            let r = bleu(&read_lines(&hyp)?, &read_lines(&reference)?)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(true)
        }
        Command::Signif {
            hyp_a,
            hyp_b,
            reference,
            samples,
            seed,
        } => {
            let name = |p: &Path| p.display().to_string();
            let r = paired_bootstrap(
                &name(&hyp_a),
                &read_lines(&hyp_a)?,
                &name(&hyp_b),
                &read_lines(&hyp_b)?,
                &read_lines(&reference)?,
                samples,
                seed,
            )?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
