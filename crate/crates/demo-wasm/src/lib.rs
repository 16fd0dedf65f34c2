//! Browser bindings. Each export takes plain values and returns a JSON
//! string, which keeps the page script free of generated glue types.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use unmt_lab::corpus::Vocab;
use unmt_lab::eval::bleu;
use unmt_lab::noise::{apply_noise, NoiseSpec};
use unmt_lab::toylang::{generate_language_pair, Direction, LanguagePairSpec};

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, JsValue> {
    serde_json::to_string(value).map_err(js_err)
}

fn words(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_string).collect()
}

fn lines(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(words).collect()
}

#[derive(Serialize)]
struct PairRow {
    l1: String,
    l2: String,
    back: String,
}

#[derive(Serialize)]
struct PairSample {
    anchors: Vec<String>,
    lexicon: Vec<(String, String)>,
    rows: Vec<PairRow>,
}

/// Builds the language pair for `pair_seed` and samples `count` L1
/// sentences with their oracle L2 translation and the round trip back.
#[wasm_bindgen]
pub fn sample_pair(pair_seed: u32, reorder_window: u32, count: u32, sample_seed: u32) -> Result<String, JsValue> {
    let spec = LanguagePairSpec {
        seed: pair_seed.into(),
        reorder_window: reorder_window as usize,
        ..LanguagePairSpec::default()
    };
    let pair = generate_language_pair(&spec).map_err(js_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed.into());
    let mut rows = Vec::with_capacity(count as usize);
    for _ in 0..count.min(200) {
        let l1 = pair.sample_l1(&mut rng);
        let l2 = pair.oracle_translate(&l1, Direction::L1ToL2).map_err(js_err)?;
        let back = pair.oracle_translate(&l2, Direction::L2ToL1).map_err(js_err)?;
        rows.push(PairRow {
            l1: l1.join(" "),
            l2: l2.join(" "),
            back: back.join(" "),
        });
    }
    to_json(&PairSample {
        anchors: pair.anchors().to_vec(),
        lexicon: pair.lexicon().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        rows,
    })
}

#[derive(Serialize)]
struct NoiseSample {
    noised: Vec<String>,
}

/// Corrupts `sentence` `trials` times with the denoising noise model.
#[wasm_bindgen]
pub fn noise(sentence: &str, p_drop: f64, p_blank: f64, shuffle_k: u32, trials: u32, seed: u32) -> Result<String, JsValue> {
    let spec = NoiseSpec {
        p_drop,
        p_blank,
        shuffle_k: shuffle_k as usize,
    };
    spec.validate().map_err(js_err)?;
    let tokens = words(sentence);
    if tokens.is_empty() {
        return Err(js_err("the sentence is empty"));
    }
    let vocab = Vocab::build(&[std::slice::from_ref(&tokens)]);
    let ids = vocab.encode(&tokens);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.into());
    let noised = (0..trials.clamp(1, 50))
        .map(|_| vocab.decode(&apply_noise(&ids, &spec, &mut rng)).join(" "))
        .collect();
    to_json(&NoiseSample { noised })
}

/// Corpus BLEU of one hypothesis per line against one reference per line,
/// with the n-gram precisions and brevity penalty.
#[wasm_bindgen]
pub fn bleu_breakdown(hypotheses: &str, references: &str) -> Result<String, JsValue> {
    let report = bleu(&lines(hypotheses), &lines(references)).map_err(js_err)?;
    to_json(&report)
}
