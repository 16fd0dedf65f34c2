//! Synthetic, invertible language pairs with an exact reference translator.
//!
//! Sentences are generated in L1 from slot templates. Content words are drawn
//! from per-class Zipf distributions mixed with sparse word-to-word affinities,
//! so both languages carry a learnable language-model signal. L2 is the exact
//! image of L1 under a bijective lexicon followed by a local block-reversal
//! reordering; anchor tokens are shared verbatim.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Lang;
use crate::error::{Error, Result};

/// Sentence as a list of surface tokens.
pub type Sentence = Vec<String>;

/// Longest sentence any spec may ask for (matches the cleaning threshold).
pub const MAX_SENTENCE_LEN: usize = 50;

/// Maximum fraction of duplicate sentences tolerated inside one corpus.
pub const DUPLICATION_CAP: f64 = 0.05;

/// Probability that a content word follows one of its predecessor's favoured words.
const AFFINITY_WEIGHT: f64 = 0.6;
/// Probability that an anchor is the favoured anchor of the preceding content word.
const ANCHOR_AFFINITY: f64 = 0.7;
/// Number of favoured successor words per (word, class).
const FANOUT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    L1ToL2,
    L2ToL1,
}

impl Direction {
    pub fn source(self) -> Lang {
        match self {
            Direction::L1ToL2 => Lang::L1,
            Direction::L2ToL1 => Lang::L2,
        }
    }

    pub fn target(self) -> Lang {
        match self {
            Direction::L1ToL2 => Lang::L2,
            Direction::L2ToL1 => Lang::L1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::L1ToL2 => "l1-l2",
            Direction::L2ToL1 => "l2-l1",
        }
    }
}

/// One position of a sentence template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Content { class: usize, optional: bool },
    Anchor { optional: bool },
}

impl Slot {
    fn optional(self) -> bool {
        match self {
            Slot::Content { optional, .. } | Slot::Anchor { optional } => optional,
        }
    }
}

/// A slot sequence written compactly as e.g. `"c0 c1 c2? # c0"`: `cN` is a
/// content word of class N, `#` an anchor, and a trailing `?` marks the slot
/// optional (filled with probability 1/2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Template(pub Vec<Slot>);

impl Template {
    pub fn required_len(&self) -> usize {
        self.0.iter().filter(|s| !s.optional()).count()
    }

    fn has_required_anchor(&self) -> bool {
        self.0
            .iter()
            .any(|s| matches!(s, Slot::Anchor { optional: false }))
    }

    fn max_class(&self) -> Option<usize> {
        self.0
            .iter()
            .filter_map(|s| match s {
                Slot::Content { class, .. } => Some(*class),
                Slot::Anchor { .. } => None,
            })
            .max()
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut slots = Vec::new();
        for raw in s.split_whitespace() {
            let (body, optional) = match raw.strip_suffix('?') {
                Some(b) => (b, true),
                None => (raw, false),
            };
            let slot = if body == "#" {
                Slot::Anchor { optional }
            } else if let Some(n) = body.strip_prefix('c') {
                let class = n
                    .parse()
                    .map_err(|_| Error::invalid("grammar_templates", format!("bad slot `{raw}`")))?;
                Slot::Content { class, optional }
            } else {
                return Err(Error::invalid(
                    "grammar_templates",
                    format!("bad slot `{raw}`"),
                ));
            };
            slots.push(slot);
        }
        if slots.is_empty() {
            return Err(Error::invalid("grammar_templates", "empty template"));
        }
        Ok(Template(slots))
    }
}

impl TryFrom<String> for Template {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Template> for String {
    fn from(t: Template) -> String {
        t.to_string()
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|s| match s {
                Slot::Content { class, optional } => {
                    format!("c{class}{}", if *optional { "?" } else { "" })
                }
                Slot::Anchor { optional } => format!("#{}", if *optional { "?" } else { "" }),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LanguagePairSpec {
    pub content_vocab_size: usize,
    pub anchor_vocab_size: usize,
    pub reorder_window: usize,
    pub grammar_templates: Vec<Template>,
    pub max_sentence_len: usize,
    pub seed: u64,
}

impl Default for LanguagePairSpec {
    fn default() -> Self {
        // Every class precedes an anchor in some template, so every content
        // word gets an anchor cue.
        let templates = [
            "c0 c1 # c2 c0 # c3?",
            "c2 # c0 c1 c3 #",
            "# c0 c3 # c1 c2?",
            "c1 c0 # c2 c3 c0?",
            "c3 # c1 c2 # c0",
        ];
        LanguagePairSpec {
            content_vocab_size: 120,
            anchor_vocab_size: 120,
            reorder_window: 0,
            grammar_templates: templates.iter().map(|t| t.parse().unwrap()).collect(),
            max_sentence_len: 12,
            seed: 7,
        }
    }
}

impl LanguagePairSpec {
    pub fn validate(&self) -> Result<()> {
        if self.content_vocab_size < 10 {
            return Err(Error::invalid("content_vocab_size", "must be at least 10"));
        }
        if self.anchor_vocab_size < 1 {
            return Err(Error::invalid("anchor_vocab_size", "must be at least 1"));
        }
        if self.max_sentence_len == 0 || self.max_sentence_len > MAX_SENTENCE_LEN {
            return Err(Error::invalid(
                "max_sentence_len",
                format!("must be in 1..={MAX_SENTENCE_LEN}"),
            ));
        }
        if self.grammar_templates.is_empty() {
            return Err(Error::invalid("grammar_templates", "at least one template required"));
        }
        let classes = self.class_count();
        if classes > self.content_vocab_size {
            return Err(Error::invalid(
                "grammar_templates",
                format!("{classes} word classes but only {} content words", self.content_vocab_size),
            ));
        }
        for t in &self.grammar_templates {
            if t.0.len() > self.max_sentence_len {
                return Err(Error::invalid(
                    "grammar_templates",
                    format!("template `{t}` longer than max_sentence_len"),
                ));
            }
            if !t.has_required_anchor() {
                return Err(Error::invalid(
                    "grammar_templates",
                    format!("template `{t}` has no mandatory anchor slot"),
                ));
            }
        }
        Ok(())
    }

    pub fn class_count(&self) -> usize {
        self.grammar_templates
            .iter()
            .filter_map(Template::max_class)
            .max()
            .map_or(1, |c| c + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokenKind {
    L1(usize),
    L2(usize),
    Anchor(usize),
}

/// Generated bilingual world: lexicon, anchors, reorder rule and sampler tables.
#[derive(Debug, Clone)]
pub struct LanguagePair {
    spec: LanguagePairSpec,
    l1_words: Vec<String>,
    l2_words: Vec<String>,
    anchors: Vec<String>,
    /// L1 content index -> L2 content index.
    lexicon: Vec<usize>,
    inverse: Vec<usize>,
    class_words: Vec<Vec<usize>>,
    class_weights: Vec<Vec<f64>>,
    /// favoured[w][c]: preferred successors of word `w` among class `c`.
    favoured: Vec<Vec<[usize; FANOUT]>>,
    favoured_anchor: Vec<usize>,
    anchor_weights: Vec<f64>,
    lookup: HashMap<String, TokenKind>,
}

/// Serializable description sufficient to audit and rebuild a pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairManifest {
    pub spec: LanguagePairSpec,
    pub lexicon: Vec<(String, String)>,
    pub anchors: Vec<String>,
}

fn zipf(n: usize) -> Vec<f64> {
    (1..=n).map(|r| 1.0 / r as f64).collect()
}

fn sample_weighted<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Block-reversal permutation: `out[i] = input[perm[i]]`, every block of
/// `window + 1` positions reversed, so no token moves more than `window`.
pub fn reorder_permutation(len: usize, window: usize) -> Vec<usize> {
    let block = window + 1;
    let mut perm = Vec::with_capacity(len);
    let mut start = 0;
    while start < len {
        let end = (start + block).min(len);
        perm.extend((start..end).rev());
        start = end;
    }
    perm
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

pub fn generate_language_pair(spec: &LanguagePairSpec) -> Result<LanguagePair> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.content_vocab_size;
    let classes = spec.class_count();

    let l1_words: Vec<String> = (0..n).map(|i| format!("a{i:03}")).collect();
    let l2_words: Vec<String> = (0..n).map(|i| format!("b{i:03}")).collect();
    let anchors: Vec<String> = (0..spec.anchor_vocab_size).map(|i| format!("#{i}")).collect();

    // Word w belongs to class w % classes; the lexicon is a free bijection.
    let mut class_words = vec![Vec::new(); classes];
    for w in 0..n {
        class_words[w % classes].push(w);
    }
    for words in &mut class_words {
        words.shuffle(&mut rng);
    }
    let class_weights: Vec<Vec<f64>> = class_words.iter().map(|w| zipf(w.len())).collect();

    let mut lexicon: Vec<usize> = (0..n).collect();
    lexicon.shuffle(&mut rng);
    let inverse = invert(&lexicon);

    let favoured = (0..n)
        .map(|_| {
            class_words
                .iter()
                .map(|words| {
                    let mut arr = [0; FANOUT];
                    for slot in arr.iter_mut() {
                        *slot = words[rng.gen_range(0..words.len())];
                    }
                    arr
                })
                .collect()
        })
        .collect();
    let favoured_anchor = (0..n)
        .map(|_| rng.gen_range(0..spec.anchor_vocab_size))
        .collect();

    let mut lookup = HashMap::new();
    for (i, w) in l1_words.iter().enumerate() {
        lookup.insert(w.clone(), TokenKind::L1(i));
    }
    for (i, w) in l2_words.iter().enumerate() {
        lookup.insert(w.clone(), TokenKind::L2(i));
    }
    for (i, a) in anchors.iter().enumerate() {
        lookup.insert(a.clone(), TokenKind::Anchor(i));
    }

    Ok(LanguagePair {
        spec: spec.clone(),
        l1_words,
        l2_words,
        anchor_weights: zipf(spec.anchor_vocab_size),
        anchors,
        lexicon,
        inverse,
        class_words,
        class_weights,
        favoured,
        favoured_anchor,
        lookup,
    })
}

impl LanguagePair {
    pub fn spec(&self) -> &LanguagePairSpec {
        &self.spec
    }

    pub fn anchors(&self) -> &[String] {
        &self.anchors
    }

    pub fn content_words(&self, lang: Lang) -> &[String] {
        match lang {
            Lang::L1 => &self.l1_words,
            Lang::L2 => &self.l2_words,
        }
    }

    /// `(l1, l2)` lexicon entries in L1 index order.
    pub fn lexicon(&self) -> impl Iterator<Item = (&str, &str)> {
        self.lexicon
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.l1_words[i].as_str(), self.l2_words[j].as_str()))
    }

    pub fn is_anchor(&self, token: &str) -> bool {
        matches!(self.lookup.get(token), Some(TokenKind::Anchor(_)))
    }

    /// Every token of either language, anchors included.
    pub fn inventory(&self) -> impl Iterator<Item = &str> {
        self.l1_words
            .iter()
            .chain(&self.l2_words)
            .chain(&self.anchors)
            .map(String::as_str)
    }

    pub fn manifest(&self) -> PairManifest {
        PairManifest {
            spec: self.spec.clone(),
            lexicon: self
                .lexicon()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            anchors: self.anchors.clone(),
        }
    }

    /// Rebuilds the pair from its spec and checks the recorded lexicon matches.
    pub fn from_manifest(manifest: &PairManifest) -> Result<Self> {
        let pair = generate_language_pair(&manifest.spec)?;
        if pair.manifest() != *manifest {
            return Err(Error::invalid(
                "manifest",
                "lexicon or anchors disagree with the regenerated pair",
            ));
        }
        Ok(pair)
    }

    fn map_token(&self, token: &str, direction: Direction) -> Result<String> {
        let oov = || Error::OutOfVocabulary {
            token: token.to_string(),
        };
        match (self.lookup.get(token).ok_or_else(oov)?, direction) {
            (TokenKind::Anchor(_), _) => Ok(token.to_string()),
            (TokenKind::L1(i), Direction::L1ToL2) => Ok(self.l2_words[self.lexicon[*i]].clone()),
            (TokenKind::L2(j), Direction::L2ToL1) => Ok(self.l1_words[self.inverse[*j]].clone()),
            _ => Err(oov()),
        }
    }

    /// Ground-truth translation: lexicon image composed with the reorder rule.
    pub fn oracle_translate<S: AsRef<str>>(
        &self,
        sentence: &[S],
        direction: Direction,
    ) -> Result<Sentence> {
        let perm = reorder_permutation(sentence.len(), self.spec.reorder_window);
        match direction {
            Direction::L1ToL2 => {
                let mapped = sentence
                    .iter()
                    .map(|t| self.map_token(t.as_ref(), direction))
                    .collect::<Result<Vec<_>>>()?;
                Ok(perm.iter().map(|&p| mapped[p].clone()).collect())
            }
            Direction::L2ToL1 => {
                let inv = invert(&perm);
                inv.iter()
                    .map(|&p| self.map_token(sentence[p].as_ref(), direction))
                    .collect()
            }
        }
    }

    /// Samples one L1 sentence from the template grammar.
    pub fn sample_l1<R: Rng>(&self, rng: &mut R) -> Sentence {
        let template = &self.spec.grammar_templates[rng.gen_range(0..self.spec.grammar_templates.len())];
        let mut out = Vec::with_capacity(template.0.len());
        let mut prev: Option<usize> = None;
        for slot in &template.0 {
            if slot.optional() && rng.gen_bool(0.5) {
                continue;
            }
            match *slot {
                Slot::Content { class, .. } => {
                    let w = match prev {
                        Some(p) if rng.gen_bool(AFFINITY_WEIGHT) => {
                            self.favoured[p][class][rng.gen_range(0..FANOUT)]
                        }
                        _ => self.class_words[class][sample_weighted(rng, &self.class_weights[class])],
                    };
                    out.push(self.l1_words[w].clone());
                    prev = Some(w);
                }
                Slot::Anchor { .. } => {
                    let a = match prev {
                        Some(p) if rng.gen_bool(ANCHOR_AFFINITY) => self.favoured_anchor[p],
                        _ => sample_weighted(rng, &self.anchor_weights),
                    };
                    out.push(self.anchors[a].clone());
                }
            }
        }
        out
    }
}

/// Text-level corpora with the unbalanced sizes under study.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCorpora {
    /// L1 monolingual training text.
    pub x: Vec<Sentence>,
    /// L2 monolingual training text.
    pub y: Vec<Sentence>,
    /// `(l1, l2)` reference pairs.
    pub test: Vec<(Sentence, Sentence)>,
}

fn draw_pool<R: Rng>(
    pair: &LanguagePair,
    rng: &mut R,
    n: usize,
    seen: &mut HashSet<Sentence>,
) -> Result<Vec<Sentence>> {
    let mut pool = Vec::with_capacity(n);
    let mut attempts = 0usize;
    let budget = 50 * n + 1000;
    while pool.len() < n && attempts < budget {
        attempts += 1;
        let s = pair.sample_l1(rng);
        if seen.insert(s.clone()) {
            pool.push(s);
        }
    }
    if pool.len() < n {
        let cap = (DUPLICATION_CAP * n as f64).floor() as usize;
        let missing = n - pool.len();
        if missing > cap || pool.is_empty() {
            return Err(Error::Capacity {
                needed: n,
                generated: pool.len(),
                cap,
            });
        }
        for _ in 0..missing {
            let dup = pool[rng.gen_range(0..pool.len())].clone();
            pool.push(dup);
        }
    }
    Ok(pool)
}

/// Draws disjoint sentence pools for test, X and Y (in that order, so the
/// test set for a seed does not depend on the training sizes).
pub fn generate_corpora(
    pair: &LanguagePair,
    n_x: usize,
    n_y: usize,
    n_test: usize,
    seed: u64,
) -> Result<GeneratedCorpora> {
    for (field, v) in [("n_x", n_x), ("n_y", n_y), ("n_test", n_test)] {
        if v == 0 {
            return Err(Error::invalid(field, "must be at least 1"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let test_src = draw_pool(pair, &mut rng, n_test, &mut seen)?;
    let x = draw_pool(pair, &mut rng, n_x, &mut seen)?;
    let y_src = draw_pool(pair, &mut rng, n_y, &mut seen)?;

    let y = y_src
        .iter()
        .map(|s| pair.oracle_translate(s, Direction::L1ToL2))
        .collect::<Result<Vec<_>>>()?;
    let test = test_src
        .into_iter()
        .map(|s| {
            let t = pair.oracle_translate(&s, Direction::L1ToL2)?;
            Ok((s, t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratedCorpora { x, y, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(window: usize) -> LanguagePair {
        let spec = LanguagePairSpec {
            reorder_window: window,
            ..Default::default()
        };
        generate_language_pair(&spec).unwrap()
    }

    #[test]
    fn same_seed_same_pair() {
        let a = pair(2);
        let b = pair(2);
        assert_eq!(
            serde_json::to_string(&a.manifest()).unwrap(),
            serde_json::to_string(&b.manifest()).unwrap()
        );
    }

    #[test]
    fn cardinalities_follow_spec() {
        let spec = LanguagePairSpec {
            content_vocab_size: 120,
            anchor_vocab_size: 20,
            ..Default::default()
        };
        let p = generate_language_pair(&spec).unwrap();
        assert_eq!(p.lexicon().count(), 120);
        assert_eq!(p.anchors().len(), 20);
        let l2: HashSet<&str> = p.lexicon().map(|(_, b)| b).collect();
        assert_eq!(l2.len(), 120, "lexicon must be a bijection");
    }

    #[test]
    fn zero_window_is_identity() {
        for n in 0..12 {
            assert_eq!(reorder_permutation(n, 0), (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn anchor_only_sentence_unchanged() {
        let p = pair(0);
        let s: Vec<String> = p.anchors().iter().take(4).cloned().collect();
        assert_eq!(p.oracle_translate(&s, Direction::L1ToL2).unwrap(), s);
    }

    #[test]
    fn displacement_bounded_by_window() {
        // Brute force over every position of a 6-token sentence.
        let perm = reorder_permutation(6, 2);
        for (out_pos, &src_pos) in perm.iter().enumerate() {
            assert!(out_pos.abs_diff(src_pos) <= 2);
        }
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn round_trip_identity() {
        let p = pair(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let s = p.sample_l1(&mut rng);
            let t = p.oracle_translate(&s, Direction::L1ToL2).unwrap();
            assert_eq!(t.len(), s.len());
            assert_eq!(p.oracle_translate(&t, Direction::L2ToL1).unwrap(), s);
        }
    }

    #[test]
    fn oov_token_reported() {
        let p = pair(1);
        let err = p.oracle_translate(&["nope"], Direction::L1ToL2).unwrap_err();
        assert!(matches!(err, Error::OutOfVocabulary { token } if token == "nope"));
        // L2 words are out of vocabulary for the L1 -> L2 direction.
        let err = p.oracle_translate(&["b000"], Direction::L1ToL2).unwrap_err();
        assert!(matches!(err, Error::OutOfVocabulary { .. }));
    }

    #[test]
    fn invalid_spec_names_field() {
        let spec = LanguagePairSpec {
            content_vocab_size: 5,
            ..Default::default()
        };
        match generate_language_pair(&spec) {
            Err(Error::Invalid { field, .. }) => assert_eq!(field, "content_vocab_size"),
            other => panic!("unexpected {other:?}"),
        }
        let spec = LanguagePairSpec {
            max_sentence_len: 51,
            ..Default::default()
        };
        assert!(matches!(
            generate_language_pair(&spec),
            Err(Error::Invalid { field: "max_sentence_len", .. })
        ));
    }

    #[test]
    fn templates_round_trip_through_strings() {
        let t: Template = "c0 c1? # #? c2".parse().unwrap();
        assert_eq!(t.to_string(), "c0 c1? # #? c2");
        assert_eq!(t.required_len(), 3);
        assert!("c0 x".parse::<Template>().is_err());
    }

    #[test]
    fn corpora_sizes_disjointness_and_closure() {
        let p = pair(1);
        let c = generate_corpora(&p, 2000, 100, 50, 11).unwrap();
        assert_eq!(c.x.len(), 2000);
        assert_eq!(c.y.len(), 100);
        assert_eq!(c.x.len() / c.y.len(), 20);

        let inventory: HashSet<&str> = p.inventory().collect();
        let x_set: HashSet<&Sentence> = c.x.iter().collect();
        let y_back: Vec<Sentence> = c
            .y
            .iter()
            .map(|s| p.oracle_translate(s, Direction::L2ToL1).unwrap())
            .collect();
        for s in &y_back {
            assert!(!x_set.contains(s), "X and Y pools overlap");
        }
        for (src, tgt) in &c.test {
            assert!(!x_set.contains(src));
            assert!(!y_back.contains(src));
            assert_eq!(&p.oracle_translate(src, Direction::L1ToL2).unwrap(), tgt);
        }
        for s in c.x.iter().chain(&c.y) {
            assert!(s.iter().all(|t| inventory.contains(t.as_str())));
            assert!(s.iter().any(|t| p.is_anchor(t)), "every sentence carries an anchor");
        }
        assert_eq!(c, generate_corpora(&p, 2000, 100, 50, 11).unwrap());
    }

    #[test]
    fn capacity_error_when_grammar_too_small() {
        let spec = LanguagePairSpec {
            content_vocab_size: 10,
            anchor_vocab_size: 1,
            grammar_templates: vec!["c0 #".parse().unwrap()],
            ..Default::default()
        };
        let p = generate_language_pair(&spec).unwrap();
        assert!(matches!(
            generate_corpora(&p, 100, 10, 10, 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn manifest_rebuilds_pair() {
        let p = pair(2);
        let json = serde_json::to_string(&p.manifest()).unwrap();
        let m: PairManifest = serde_json::from_str(&json).unwrap();
        let q = LanguagePair::from_manifest(&m).unwrap();
        assert_eq!(q.manifest(), p.manifest());
    }
}
