//! N-gram language models: sparse counting, MLE and smoothed conditional
//! probabilities, sentence scoring and next-word prediction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub const START: &str = "<s>";
pub const END: &str = "</s>";
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NGramError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1, got {0}")]
    BadOrder(usize),
    #[error("unknown smoothing mode `{0}` (expected mle, add-one or witten-bell)")]
    UnknownMode(String),
    #[error("zero probability for `{word}` after [{history}]; a smoothing mode is needed")]
    ZeroProbability { word: String, history: String },
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub enum SmoothingMode {
    #[default]
    #[serde(rename = "mle")]
    Mle,
    #[serde(rename = "add-one")]
    AddOne,
    #[serde(rename = "witten-bell")]
    WittenBell,
}

impl SmoothingMode {
    pub const ALL: [SmoothingMode; 3] = [Self::Mle, Self::AddOne, Self::WittenBell];
}

impl FromStr for SmoothingMode {
    type Err = NGramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "mle" => Ok(Self::Mle),
            "add-one" | "addone" | "laplace" => Ok(Self::AddOne),
            "witten-bell" | "wittenbell" | "wb" => Ok(Self::WittenBell),
            _ => Err(NGramError::UnknownMode(s.to_string())),
        }
    }
}

impl fmt::Display for SmoothingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mle => "mle",
            Self::AddOne => "add-one",
            Self::WittenBell => "witten-bell",
        })
    }
}

/// Continuation counts after one history.
#[derive(Debug, Clone, Default, PartialEq)]
struct Row {
    words: BTreeMap<String, u64>,
    total: u64,
}

impl Row {
    fn add(&mut self, word: &str, count: u64) {
        *self.words.entry(word.to_string()).or_insert(0) += count;
        self.total += count;
    }

    fn types(&self) -> u64 {
        self.words.len() as u64
    }
}

/// A trained n-gram model. Counts are sparse: unobserved n-grams are absent.
///
/// Counts are kept for every history length `0..order`, so a model of order
/// `n` also answers lower-order queries.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    vocab: BTreeSet<String>,
    rows: BTreeMap<Vec<String>, Row>,
}

impl NGramModel {
    fn empty(order: usize) -> Self {
        NGramModel {
            order,
            vocab: [START, END, UNK].into_iter().map(String::from).collect(),
            rows: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    /// Total token count `N` (sum of unigram counts).
    pub fn token_count(&self) -> u64 {
        self.rows.get(&Vec::new()).map_or(0, |r| r.total)
    }

    /// `C(history, word)`, after vocabulary mapping.
    pub fn count(&self, history: &[&str], word: &str) -> u64 {
        let h: Vec<String> = history.iter().map(|t| self.map_token(t)).collect();
        self.rows
            .get(&h)
            .and_then(|r| r.words.get(&self.map_token(word)))
            .copied()
            .unwrap_or(0)
    }

    /// `C(history)`, the number of tokens observed after `history`.
    pub fn history_count(&self, history: &[&str]) -> u64 {
        let h: Vec<String> = history.iter().map(|t| self.map_token(t)).collect();
        self.rows.get(&h).map_or(0, |r| r.total)
    }

    /// Histories with at least one observed continuation.
    pub fn histories(&self) -> impl Iterator<Item = &[String]> {
        self.rows.keys().map(Vec::as_slice)
    }

    /// Number of stored (history, word) entries.
    pub fn stored_ngrams(&self) -> usize {
        self.rows.values().map(|r| r.words.len()).sum()
    }

    fn map_token(&self, token: &str) -> String {
        if self.vocab.contains(token) {
            token.to_string()
        } else {
            UNK.to_string()
        }
    }

    /// The last `order - 1` tokens of `history`, mapped into the vocabulary.
    fn context<S: AsRef<str>>(&self, history: &[S]) -> Vec<String> {
        let keep = (self.order - 1).min(history.len());
        history[history.len() - keep..]
            .iter()
            .map(|t| self.map_token(t.as_ref()))
            .collect()
    }

    /// `P(word | history)` under `mode`. Only the last `order - 1` history
    /// tokens are consulted; a shorter history falls back to the
    /// corresponding lower-order counts.
    pub fn probability<S: AsRef<str>>(
        &self,
        word: &str,
        history: &[S],
        mode: SmoothingMode,
    ) -> f64 {
        let context = self.context(history);
        let word = self.map_token(word);
        let v = self.vocab.len() as f64;
        let row = self.rows.get(&context);
        let (c_hw, c_h, t_h) = match row {
            Some(r) => (
                r.words.get(&word).copied().unwrap_or(0) as f64,
                r.total as f64,
                r.types() as f64,
            ),
            None => (0.0, 0.0, 0.0),
        };
        match mode {
            SmoothingMode::Mle => {
                if c_h == 0.0 {
                    0.0
                } else {
                    c_hw / c_h
                }
            }
            SmoothingMode::AddOne => (c_hw + 1.0) / (c_h + v),
            SmoothingMode::WittenBell => {
                if c_h == 0.0 {
                    return 1.0 / v;
                }
                let unseen = v - t_h;
                if unseen == 0.0 {
                    // Every vocabulary word was seen: nothing to reserve.
                    return c_hw / c_h;
                }
                if c_hw > 0.0 {
                    c_hw / (c_h + t_h)
                } else {
                    t_h / ((c_h + t_h) * unseen)
                }
            }
        }
    }

    /// Natural-log probability of `sentence` followed by the end marker,
    /// with `order - 1` start markers as left padding.
    pub fn sequence_logprob<S: AsRef<str>>(
        &self,
        sentence: &[S],
        mode: SmoothingMode,
    ) -> Result<f64, NGramError> {
        let padded = pad(sentence, self.order);
        let mut total = 0.0;
        for i in self.order - 1..padded.len() {
            let p = self.probability(&padded[i], &padded[..i], mode);
            if p == 0.0 {
                return Err(NGramError::ZeroProbability {
                    word: padded[i].clone(),
                    history: self.context(&padded[..i]).join(" "),
                });
            }
            total += p.ln();
        }
        Ok(total)
    }

    /// The `k` most probable next words, descending; ties go to the
    /// lexicographically smaller word.
    pub fn predict_next<S: AsRef<str>>(
        &self,
        history: &[S],
        k: usize,
        mode: SmoothingMode,
    ) -> Vec<(String, f64)> {
        let mut scored: Vec<(String, f64)> = self
            .vocab
            .iter()
            .map(|w| (w.clone(), self.probability(w, history, mode)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        scored
    }

    /// Serializes to the `#ngram v1` TSV format.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#ngram v1 order={}\n", self.order);
        for (history, row) in &self.rows {
            for (word, count) in &row.words {
                out.push_str(&format!("{}\t{}\t{}\n", history.join(" "), word, count));
            }
        }
        out
    }

    /// Parses the `#ngram v1` TSV format.
    pub fn from_tsv(text: &str) -> Result<Self, NGramError> {
        let mut lines = text.lines().enumerate();
        let header = lines
            .next()
            .map(|(_, l)| l.trim())
            .ok_or(NGramError::Format {
                line: 1,
                message: "missing header".into(),
            })?;
        let order = header
            .strip_prefix("#ngram v1 order=")
            .and_then(|n| n.trim().parse::<usize>().ok())
            .ok_or(NGramError::Format {
                line: 1,
                message: format!("bad header `{header}`"),
            })?;
        if order == 0 {
            return Err(NGramError::BadOrder(0));
        }
        let mut model = NGramModel::empty(order);
        for (i, line) in lines {
            let err = |message: String| NGramError::Format {
                line: i + 1,
                message,
            };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [history, word, count] = fields.as_slice() else {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            };
            let history: Vec<String> = history.split_whitespace().map(String::from).collect();
            if history.len() >= order {
                return Err(err(format!(
                    "history longer than order - 1 = {}",
                    order - 1
                )));
            }
            if word.is_empty() {
                return Err(err("empty word".into()));
            }
            let count: u64 = count
                .trim()
                .parse()
                .ok()
                .filter(|c| *c >= 1)
                .ok_or_else(|| err(format!("invalid count `{count}`")))?;
            model.vocab.extend(history.iter().cloned());
            model.vocab.insert(word.to_string());
            model.rows.entry(history).or_default().add(word, count);
        }
        Ok(model)
    }
}

fn pad<S: AsRef<str>>(sentence: &[S], order: usize) -> Vec<String> {
    let mut padded: Vec<String> = vec![START.to_string(); order - 1];
    padded.extend(sentence.iter().map(|t| t.as_ref().to_string()));
    padded.push(END.to_string());
    padded
}

/// Counts every n-gram of length `1..=order` in `corpus`. Each sentence is
/// padded with `order - 1` start markers and one end marker.
pub fn train<S: AsRef<str>>(corpus: &[Vec<S>], order: usize) -> Result<NGramModel, NGramError> {
    if order < 1 {
        return Err(NGramError::BadOrder(order));
    }
    if corpus.iter().all(|s| s.is_empty()) {
        return Err(NGramError::EmptyCorpus);
    }
    let mut model = NGramModel::empty(order);
    for sentence in corpus.iter().filter(|s| !s.is_empty()) {
        let padded = pad(sentence, order);
        model.vocab.extend(padded.iter().cloned());
        for i in order - 1..padded.len() {
            for len in 0..order {
                let history = padded[i - len..i].to_vec();
                model.rows.entry(history).or_default().add(&padded[i], 1);
            }
        }
    }
    Ok(model)
}

/// Splits a corpus file: one sentence per line, whitespace-separated tokens.
pub fn read_corpus(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split_whitespace().map(String::from).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect()
}
