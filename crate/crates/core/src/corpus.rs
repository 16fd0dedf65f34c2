//! Shared vocabulary, id-level corpora, cleaning, ε-subsampling and token-budget batching.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toylang::Sentence;

pub type TokenId = u32;
pub type Ids = Vec<TokenId>;

pub const PAD: TokenId = 0;
pub const BOS: TokenId = 1;
pub const EOS: TokenId = 2;
pub const UNK: TokenId = 3;
pub const TAG_L1: TokenId = 4;
pub const TAG_L2: TokenId = 5;
pub const RESERVED: usize = 6;

const SPECIALS: [&str; RESERVED] = ["<pad>", "<s>", "</s>", "<unk>", "<2l1>", "<2l2>"];

/// Default cleaning threshold, in words.
pub const DEFAULT_MAX_LEN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lang {
    L1,
    L2,
}

impl Lang {
    pub fn tag(self) -> TokenId {
        match self {
            Lang::L1 => TAG_L1,
            Lang::L2 => TAG_L2,
        }
    }

    pub fn other(self) -> Lang {
        match self {
            Lang::L1 => Lang::L2,
            Lang::L2 => Lang::L1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Natural,
    Reference,
    Synthetic,
}

/// Token/id bijection shared by both languages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    ids: HashMap<String, TokenId>,
}

impl Vocab {
    /// Orders tokens by descending frequency, ties broken lexicographically,
    /// after the six reserved entries.
    pub fn build(corpora: &[&[Sentence]]) -> Self {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for corpus in corpora {
            for sentence in corpus.iter() {
                for t in sentence {
                    *counts.entry(t.as_str()).or_default() += 1;
                }
            }
        }
        let mut entries: Vec<(&str, usize)> = counts
            .into_iter()
            .filter(|(t, _)| !SPECIALS.contains(t))
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Self::from_tokens(
            SPECIALS
                .iter()
                .map(|s| s.to_string())
                .chain(entries.into_iter().map(|(t, _)| t.to_string()))
                .collect(),
        )
        .expect("specials are well-formed")
    }

    fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < RESERVED || tokens[..RESERVED] != SPECIALS.map(String::from) {
            return Err(Error::invalid("vocab", "reserved tokens missing or out of order"));
        }
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if ids.insert(t.clone(), i as TokenId).is_some() {
                return Err(Error::invalid("vocab", format!("duplicate token `{t}`")));
            }
        }
        Ok(Vocab { tokens, ids })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> &str {
        &self.tokens[id as usize]
    }

    pub fn encode<S: AsRef<str>>(&self, sentence: &[S]) -> Ids {
        sentence
            .iter()
            .map(|t| self.id(t.as_ref()).unwrap_or(UNK))
            .collect()
    }

    pub fn decode(&self, ids: &[TokenId]) -> Sentence {
        ids.iter().map(|&i| self.token(i).to_string()).collect()
    }

    pub fn encode_mono(&self, lang: Lang, text: &[Sentence], origin: Origin) -> MonoCorpus {
        MonoCorpus {
            lang,
            sentences: text.iter().map(|s| self.encode(s)).collect(),
            origin,
        }
    }

    pub fn encode_parallel(
        &self,
        src_lang: Lang,
        pairs: &[(Sentence, Sentence)],
        origin: Origin,
    ) -> ParallelCorpus {
        ParallelCorpus {
            src_lang,
            tgt_lang: src_lang.other(),
            pairs: pairs
                .iter()
                .map(|(s, t)| (self.encode(s), self.encode(t)))
                .collect(),
            origin,
        }
    }

    /// One token per line, in id order.
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        for t in &self.tokens {
            writeln!(w, "{t}")?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let tokens = r
            .lines()
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(|e| Error::io("<vocab>", e))?;
        Self::from_tokens(tokens)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoCorpus {
    pub lang: Lang,
    pub sentences: Vec<Ids>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelCorpus {
    pub src_lang: Lang,
    pub tgt_lang: Lang,
    pub pairs: Vec<(Ids, Ids)>,
    pub origin: Origin,
}

impl MonoCorpus {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Checks every id is below `vocab_size` and no sentence is empty.
    pub fn validate(&self, vocab_size: usize) -> Result<()> {
        for s in &self.sentences {
            if s.is_empty() {
                return Err(Error::invalid("sentences", "empty sentence"));
            }
            if let Some(&bad) = s.iter().find(|&&t| t as usize >= vocab_size) {
                return Err(Error::invalid("sentences", format!("id {bad} outside vocab")));
            }
        }
        Ok(())
    }

    /// Keeps sentences of at most `max_len` tokens, in their original order.
    pub fn clean(&self, max_len: usize) -> MonoCorpus {
        MonoCorpus {
            lang: self.lang,
            sentences: self
                .sentences
                .iter()
                .filter(|s| s.len() <= max_len)
                .cloned()
                .collect(),
            origin: self.origin,
        }
    }

    /// Indices of a uniform sample without replacement of `subsample_size(ε, n)` sentences.
    pub fn subsample_indices(&self, ratio: f64, seed: u64) -> Result<Vec<usize>> {
        let k = subsample_size(ratio, self.len())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, self.len(), k).into_vec();
        idx.sort_unstable();
        Ok(idx)
    }

    /// Uniform sample without replacement; ε = 1 returns every sentence in order.
    pub fn subsample(&self, ratio: f64, seed: u64) -> Result<MonoCorpus> {
        let idx = self.subsample_indices(ratio, seed)?;
        Ok(self.select(&idx))
    }

    pub fn select(&self, idx: &[usize]) -> MonoCorpus {
        MonoCorpus {
            lang: self.lang,
            sentences: idx.iter().map(|&i| self.sentences[i].clone()).collect(),
            origin: self.origin,
        }
    }

    pub fn batches(&self, budget: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
        let lens: Vec<usize> = self.sentences.iter().map(Vec::len).collect();
        plan_batches(&lens, budget, seed)
    }

    pub fn write_text(&self, vocab: &Vocab, path: &Path) -> Result<()> {
        write_lines(path, self.sentences.iter().map(|s| vocab.decode(s)))
    }
}

impl ParallelCorpus {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> Vec<Ids> {
        self.pairs.iter().map(|p| p.0.clone()).collect()
    }

    pub fn targets(&self) -> Vec<Ids> {
        self.pairs.iter().map(|p| p.1.clone()).collect()
    }

    /// The same pairs with source and target swapped.
    pub fn reversed(&self) -> ParallelCorpus {
        ParallelCorpus {
            src_lang: self.tgt_lang,
            tgt_lang: self.src_lang,
            pairs: self.pairs.iter().map(|(s, t)| (t.clone(), s.clone())).collect(),
            origin: self.origin,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.iter().any(|(s, t)| s.is_empty() || t.is_empty()) {
            return Err(Error::invalid("pairs", "empty side in parallel pair"));
        }
        Ok(())
    }

    /// Batches bounded on each side separately by the longer of the two sides.
    pub fn batches(&self, budget: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
        let lens: Vec<usize> = self.pairs.iter().map(|(s, t)| s.len().max(t.len())).collect();
        plan_batches(&lens, budget, seed)
    }

    /// Writes `<stem>.src` and `<stem>.tgt`, aligned by line number.
    pub fn write_text(&self, vocab: &Vocab, stem: &Path) -> Result<()> {
        write_lines(
            &with_suffix(stem, "src"),
            self.pairs.iter().map(|(s, _)| vocab.decode(s)),
        )?;
        write_lines(
            &with_suffix(stem, "tgt"),
            self.pairs.iter().map(|(_, t)| vocab.decode(t)),
        )
    }
}

/// `<stem>.<ext>`, keeping any dots already in the stem.
pub fn with_suffix(stem: &Path, ext: &str) -> std::path::PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    s.into()
}

/// `round(ε·n)` with half-up rounding and a floor of one sentence.
pub fn subsample_size(ratio: f64, n: usize) -> Result<usize> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::invalid("epsilon", format!("{ratio} is outside (0, 1]")));
    }
    if n == 0 {
        return Err(Error::EmptyCorpus("subsample"));
    }
    Ok(((ratio * n as f64 + 0.5).floor() as usize).clamp(1, n))
}

/// Shuffles sentence indices with `seed` and packs them greedily so that
/// `count × longest` never exceeds `budget`.
pub fn plan_batches(lens: &[usize], budget: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if let Some((index, &len)) = lens.iter().enumerate().find(|(_, &l)| l > budget) {
        return Err(Error::SentenceTooLong { index, len, budget });
    }
    let mut order: Vec<usize> = (0..lens.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut batches = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut longest = 0;
    for i in order {
        let l = lens[i].max(1);
        let new_longest = longest.max(l);
        if !current.is_empty() && (current.len() + 1) * new_longest > budget {
            batches.push(std::mem::take(&mut current));
            longest = 0;
        }
        longest = longest.max(l);
        current.push(i);
    }
    if !current.is_empty() {
        batches.push(current);
    }
    Ok(batches)
}

/// Endless batch source over one corpus: each pass is a fresh seeded shuffle,
/// so a small corpus recycles while a large one streams.
#[derive(Debug, Clone)]
pub struct BatchStream {
    lens: Vec<usize>,
    budget: usize,
    seed: u64,
    epoch: u64,
    plan: Vec<Vec<usize>>,
    cursor: usize,
}

impl BatchStream {
    pub fn new(lens: Vec<usize>, budget: usize, seed: u64) -> Result<Self> {
        if lens.is_empty() {
            return Err(Error::EmptyCorpus("batch stream"));
        }
        let plan = plan_batches(&lens, budget, seed)?;
        Ok(BatchStream {
            lens,
            budget,
            seed,
            epoch: 0,
            plan,
            cursor: 0,
        })
    }

    pub fn for_mono(corpus: &MonoCorpus, budget: usize, seed: u64) -> Result<Self> {
        Self::new(corpus.sentences.iter().map(Vec::len).collect(), budget, seed)
    }

    pub fn for_parallel(corpus: &ParallelCorpus, budget: usize, seed: u64) -> Result<Self> {
        Self::new(
            corpus.pairs.iter().map(|(s, t)| s.len().max(t.len())).collect(),
            budget,
            seed,
        )
    }

    /// Completed passes over the corpus.
    pub fn epochs_completed(&self) -> u64 {
        self.epoch
    }

    pub fn next_batch(&mut self) -> &[usize] {
        if self.cursor == self.plan.len() {
            self.epoch += 1;
            let seed = self
                .seed
                .wrapping_add(self.epoch.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            self.plan = plan_batches(&self.lens, self.budget, seed).expect("lengths already checked");
            self.cursor = 0;
        }
        self.cursor += 1;
        &self.plan[self.cursor - 1]
    }
}

pub fn write_lines(path: &Path, lines: impl Iterator<Item = Sentence>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for line in lines {
        writeln!(w, "{}", line.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_lines(path: &Path) -> Result<Vec<Sentence>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    std::io::BufReader::new(file)
        .lines()
        .map(|l| {
            l.map(|l| l.split_whitespace().map(String::from).collect())
                .map_err(|e| Error::io(path, e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn words(s: &str) -> Sentence {
        s.split_whitespace().map(String::from).collect()
    }

    fn mono(lens: &[usize]) -> MonoCorpus {
        MonoCorpus {
            lang: Lang::L1,
            sentences: lens.iter().map(|&l| vec![7; l]).collect(),
            origin: Origin::Natural,
        }
    }

    #[test]
    fn vocab_cardinality_and_reserved_ids() {
        let a = vec![words("a b a")];
        let b = vec![words("c")];
        let v = Vocab::build(&[&a, &b]);
        assert_eq!(v.len(), 3 + RESERVED);
        assert_eq!(v.token(PAD), "<pad>");
        assert_eq!(v.token(TAG_L2), "<2l2>");
        assert_eq!(v.id("a"), Some(6), "most frequent token first");
    }

    #[test]
    fn vocab_independent_of_input_order() {
        let a = vec![words("x y z y"), words("q")];
        let b = vec![words("z y")];
        let v1 = Vocab::build(&[&a, &b]);
        let v2 = Vocab::build(&[&b, &a]);
        let mut a_rev = a.clone();
        a_rev.reverse();
        let v3 = Vocab::build(&[&b, &a_rev]);
        assert_eq!(v1, v2);
        assert_eq!(v1, v3);
    }

    #[test]
    fn shared_token_gets_one_id() {
        let a = vec![words("#1 a")];
        let b = vec![words("#1 b")];
        let v = Vocab::build(&[&a, &b]);
        assert_eq!(v.len(), RESERVED + 3);
        assert_eq!(v.encode(&a[0])[0], v.encode(&b[0])[0]);
    }

    #[test]
    fn vocab_text_round_trip() {
        let a = vec![words("a b c d")];
        let v = Vocab::build(&[&a]);
        let mut buf = Vec::new();
        v.write_to(&mut buf).unwrap();
        assert_eq!(Vocab::read_from(buf.as_slice()).unwrap(), v);
    }

    #[test]
    fn clean_drops_long_lines() {
        let c = mono(&[3, 50, 49]);
        assert_eq!(c.clean(DEFAULT_MAX_LEN), c);
        let c = mono(&[5, 5, 5, 51, 5, 5, 5, 5, 5, 5]);
        let cleaned = c.clean(DEFAULT_MAX_LEN);
        assert_eq!(cleaned.len(), 9);
        assert_eq!(cleaned.clean(DEFAULT_MAX_LEN), cleaned);
    }

    #[test]
    fn subsample_sizes() {
        let c = mono(&[4; 1000]);
        assert_eq!(c.subsample(0.10, 1).unwrap().len(), 100);
        assert_eq!(c.subsample(1.0, 1).unwrap(), c);
        assert_eq!(c.subsample(0.1, 5).unwrap(), c.subsample(0.1, 5).unwrap());
        for eps in [0.01, 0.05, 0.1, 0.3, 0.5, 1.0] {
            let want = ((eps * 1000.0_f64) + 0.5).floor() as usize;
            assert_eq!(c.subsample(eps, 2).unwrap().len(), want);
        }
        assert_eq!(subsample_size(0.0001, 10).unwrap(), 1, "floor of one sentence");
        assert_eq!(subsample_size(0.25, 10).unwrap(), 3, "half rounds up");
        assert!(matches!(c.subsample(0.0, 1), Err(Error::Invalid { .. })));
        assert!(matches!(c.subsample(1.5, 1), Err(Error::Invalid { .. })));
    }

    #[test]
    fn batches_respect_budget() {
        let c = mono(&[5; 10]);
        let b = c.batches(25, 3).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|x| x.len() <= 5));
        let mut all: Vec<usize> = b.concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(b, c.batches(25, 3).unwrap());

        let singles = c.batches(5, 3).unwrap();
        assert_eq!(singles.len(), 10);

        match mono(&[3, 9, 2]).batches(8, 0) {
            Err(Error::SentenceTooLong { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stream_recycles_with_fresh_order() {
        let c = mono(&[2; 6]);
        let mut s = BatchStream::for_mono(&c, 4, 9).unwrap();
        let first: Vec<Vec<usize>> = (0..3).map(|_| s.next_batch().to_vec()).collect();
        assert_eq!(s.epochs_completed(), 0);
        let second: Vec<Vec<usize>> = (0..3).map(|_| s.next_batch().to_vec()).collect();
        assert_eq!(s.epochs_completed(), 1);
        let mut a = first.concat();
        let mut b = second.concat();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn batch_coverage_and_bound(lens in prop::collection::vec(1usize..12, 1..80), extra in 0usize..40, seed: u64) {
            let budget = 12 + extra;
            let plan = plan_batches(&lens, budget, seed).unwrap();
            let mut seen: Vec<usize> = plan.concat();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..lens.len()).collect::<Vec<_>>());
            for b in &plan {
                let longest = b.iter().map(|&i| lens[i]).max().unwrap();
                prop_assert!(b.len() * longest <= budget);
            }
        }

        #[test]
        fn subsample_is_exact_size(n in 1usize..3000, eps in 0.001f64..=1.0, seed: u64) {
            let c = mono(&vec![3; n]);
            let s = c.subsample_indices(eps, seed).unwrap();
            prop_assert_eq!(s.len(), subsample_size(eps, n).unwrap());
            prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
