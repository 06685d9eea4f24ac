//! Part-of-speech tagging.
//!
//! Two taggers share one count model: a stochastic bigram tagger decoded
//! with Viterbi, and a rule-based tagger that resolves ambiguity classes
//! with hand-written previous-tag rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Distinguished tag for the sentence boundary.
pub const BOUNDARY: &str = "<s>";
/// Vocabulary slot shared by all unseen words.
pub const UNKNOWN_WORD: &str = "<unk>";
/// Tags that may emit unseen words unless a model says otherwise.
pub const DEFAULT_OPEN_TAGS: [&str; 5] = ["NN", "VB", "JJ", "ADJ", "ADV"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaggerError {
    #[error("tag `{0}` is not in the tagset")]
    UnknownTag(String),
    #[error("tagged corpus is empty")]
    EmptyCorpus,
    #[error("invalid tag label `{0}`")]
    BadLabel(String),
    #[error("{file} line {line}: {message}")]
    Parse {
        file: &'static str,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagInfo {
    pub description: String,
    pub examples: String,
}

/// The inventory of tag labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TagSet {
    tags: BTreeMap<String, TagInfo>,
}

/// Labels are uppercase alphanumerics (optionally with `-`/`$`), or
/// punctuation-only labels such as `,` for punctuation tokens.
fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && (label.chars().all(|c| c.is_ascii_punctuation())
            || (label.chars().any(|c| c.is_ascii_uppercase())
                && label
                    .chars()
                    .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '-' || c == '$')))
}

impl TagSet {
    pub fn new<I, S>(labels: I) -> Result<Self, TaggerError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = TagSet::default();
        for l in labels {
            set.insert(l.into(), String::new(), String::new())?;
        }
        Ok(set)
    }

    fn insert(
        &mut self,
        label: String,
        description: String,
        examples: String,
    ) -> Result<(), TaggerError> {
        if !valid_label(&label) || label == BOUNDARY {
            return Err(TaggerError::BadLabel(label));
        }
        if self.tags.contains_key(&label) {
            return Err(TaggerError::BadLabel(format!("{label} (duplicate)")));
        }
        self.tags.insert(
            label,
            TagInfo {
                description,
                examples,
            },
        );
        Ok(())
    }

    /// Parses `TAG<TAB>description<TAB>examples` lines.
    pub fn parse(text: &str) -> Result<Self, TaggerError> {
        let mut set = TagSet::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() > 3 {
                return Err(TaggerError::Parse {
                    file: "tagset",
                    line: i + 1,
                    message: format!("expected at most 3 fields, found {}", fields.len()),
                });
            }
            let get = |n: usize| fields.get(n).copied().unwrap_or_default().to_string();
            set.insert(get(0), get(1), get(2))?;
        }
        Ok(set)
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.contains_key(tag)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.tags.keys().map(String::as_str)
    }

    pub fn info(&self, tag: &str) -> Option<&TagInfo> {
        self.tags.get(tag)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

pub const BUNDLED_TAGSET: &str = include_str!("../data/tagset.tsv");
pub const BUNDLED_TAGGED_CORPUS: &str = include_str!("../data/tagged.txt");
pub const BUNDLED_RULES: &str = include_str!("../data/rules.txt");

pub type TaggedSentence = Vec<(String, String)>;

/// Parses one sentence per line, tokens as `word/TAG` (split at the last `/`).
pub fn parse_tagged_corpus(text: &str) -> Result<Vec<TaggedSentence>, TaggerError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut sentence = Vec::new();
        for tok in line.split_whitespace() {
            let (word, tag) = tok
                .rsplit_once('/')
                .filter(|(w, t)| !w.is_empty() && !t.is_empty())
                .ok_or_else(|| TaggerError::Parse {
                    file: "tagged corpus",
                    line: i + 1,
                    message: format!("token `{tok}` is not of the form word/TAG"),
                })?;
            sentence.push((word.to_string(), tag.to_string()));
        }
        out.push(sentence);
    }
    Ok(out)
}

/// Sparse emission and transition counts plus the tag inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    tags: Vec<String>,
    open: BTreeSet<String>,
    vocab: BTreeSet<String>,
    emissions: BTreeMap<String, BTreeMap<String, u64>>,
    emission_totals: BTreeMap<String, u64>,
    transitions: BTreeMap<String, BTreeMap<String, u64>>,
    transition_totals: BTreeMap<String, u64>,
}

/// Counts emissions `C(tag, word)` and transitions `C(prev, tag)`, with the
/// sentence start counted as [`BOUNDARY`].
pub fn train_tagger(
    corpus: &[TaggedSentence],
    tagset: &TagSet,
) -> Result<TaggerModel, TaggerError> {
    if corpus.iter().all(Vec::is_empty) {
        return Err(TaggerError::EmptyCorpus);
    }
    let mut model = TaggerModel {
        tags: tagset.labels().map(String::from).collect(),
        open: DEFAULT_OPEN_TAGS
            .iter()
            .filter(|t| tagset.contains(t))
            .map(|t| t.to_string())
            .collect(),
        vocab: BTreeSet::from([UNKNOWN_WORD.to_string()]),
        emissions: BTreeMap::new(),
        emission_totals: BTreeMap::new(),
        transitions: BTreeMap::new(),
        transition_totals: BTreeMap::new(),
    };
    for sentence in corpus {
        let mut prev = BOUNDARY;
        for (word, tag) in sentence {
            if !tagset.contains(tag) {
                return Err(TaggerError::UnknownTag(tag.clone()));
            }
            model.vocab.insert(word.clone());
            bump(
                &mut model.emissions,
                &mut model.emission_totals,
                tag,
                word,
                1,
            );
            bump(
                &mut model.transitions,
                &mut model.transition_totals,
                prev,
                tag,
                1,
            );
            prev = tag;
        }
    }
    Ok(model)
}

fn bump(
    table: &mut BTreeMap<String, BTreeMap<String, u64>>,
    totals: &mut BTreeMap<String, u64>,
    key: &str,
    item: &str,
    by: u64,
) {
    *table
        .entry(key.to_string())
        .or_default()
        .entry(item.to_string())
        .or_insert(0) += by;
    *totals.entry(key.to_string()).or_insert(0) += by;
}

/// Tags a token may carry, most frequent first. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityClass(Vec<String>);

impl AmbiguityClass {
    /// `None` if `tags` is empty.
    pub fn new<I, S>(tags: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = Vec::new();
        for t in tags {
            let t = t.into();
            if !v.contains(&t) {
                v.push(t);
            }
        }
        (!v.is_empty()).then_some(AmbiguityClass(v))
    }

    pub fn tags(&self) -> &[String] {
        &self.0
    }

    pub fn most_frequent(&self) -> &str {
        &self.0[0]
    }

    fn as_set(&self) -> BTreeSet<&str> {
        self.0.iter().map(String::as_str).collect()
    }
}

impl TaggerModel {
    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn open_tags(&self) -> &BTreeSet<String> {
        &self.open
    }

    /// Replaces the open-class tag set (tags outside the inventory are
    /// rejected).
    pub fn set_open_tags<I, S>(&mut self, tags: I) -> Result<(), TaggerError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut open = BTreeSet::new();
        for t in tags {
            let t = t.into();
            if !self.tags.contains(&t) {
                return Err(TaggerError::UnknownTag(t));
            }
            open.insert(t);
        }
        self.open = open;
        Ok(())
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn emission_count(&self, tag: &str, word: &str) -> u64 {
        self.emissions
            .get(tag)
            .and_then(|r| r.get(word))
            .copied()
            .unwrap_or(0)
    }

    pub fn transition_count(&self, prev: &str, tag: &str) -> u64 {
        self.transitions
            .get(prev)
            .and_then(|r| r.get(tag))
            .copied()
            .unwrap_or(0)
    }

    /// The vocabulary key for `word`: itself, its lowercase form, or
    /// [`UNKNOWN_WORD`].
    pub fn word_key(&self, word: &str) -> String {
        if self.vocab.contains(word) {
            return word.to_string();
        }
        let lower = word.to_lowercase();
        if self.vocab.contains(&lower) {
            lower
        } else {
            UNKNOWN_WORD.to_string()
        }
    }

    /// Add-one smoothed `P(tag | prev)` over the tag inventory.
    pub fn transition_prob(&self, prev: &str, tag: &str) -> f64 {
        let total = self.transition_totals.get(prev).copied().unwrap_or(0) as f64;
        (self.transition_count(prev, tag) as f64 + 1.0) / (total + self.tags.len() as f64)
    }

    /// `P(word | tag)`. Open-class tags are add-one smoothed over the
    /// vocabulary (including [`UNKNOWN_WORD`]); closed-class tags only emit
    /// words seen with them in training.
    pub fn emission_prob(&self, tag: &str, word: &str) -> f64 {
        let key = self.word_key(word);
        let count = self.emission_count(tag, &key) as f64;
        let total = self.emission_totals.get(tag).copied().unwrap_or(0) as f64;
        if self.open.contains(tag) {
            (count + 1.0) / (total + self.vocab.len() as f64)
        } else if total == 0.0 {
            0.0
        } else {
            count / total
        }
    }

    /// Candidate tags for `word`: those with nonzero emission probability,
    /// or the whole inventory when none qualifies.
    fn candidates(&self, word: &str) -> Vec<(usize, f64)> {
        let c: Vec<(usize, f64)> = self
            .tags
            .iter()
            .enumerate()
            .map(|(i, t)| (i, self.emission_prob(t, word)))
            .filter(|(_, p)| *p > 0.0)
            .map(|(i, p)| (i, p.ln()))
            .collect();
        if c.is_empty() {
            (0..self.tags.len()).map(|i| (i, 0.0)).collect()
        } else {
            c
        }
    }

    /// Viterbi decoding of the tag sequence maximizing
    /// `prod P(tag_i | tag_i-1) * P(word_i | tag_i)`, in log space. Ties
    /// favour the lexicographically smaller tag at every backpointer and at
    /// the final position.
    pub fn tag<S: AsRef<str>>(&self, sentence: &[S]) -> Vec<(String, String)> {
        if sentence.is_empty() || self.tags.is_empty() {
            return Vec::new();
        }
        let ln_trans = |prev: &str, tag: usize| self.transition_prob(prev, &self.tags[tag]).ln();

        let mut columns: Vec<Vec<(usize, f64, usize)>> = Vec::with_capacity(sentence.len());
        let first: Vec<(usize, f64, usize)> = self
            .candidates(sentence[0].as_ref())
            .into_iter()
            .map(|(t, le)| (t, ln_trans(BOUNDARY, t) + le, usize::MAX))
            .collect();
        columns.push(first);

        for word in &sentence[1..] {
            let prev_col = columns.last().unwrap();
            let col = self
                .candidates(word.as_ref())
                .into_iter()
                .map(|(t, le)| {
                    let mut best = (f64::NEG_INFINITY, 0usize);
                    for (k, &(p, score, _)) in prev_col.iter().enumerate() {
                        let s = score + ln_trans(&self.tags[p], t) + le;
                        if k == 0 || s > best.0 {
                            best = (s, k);
                        }
                    }
                    (t, best.0, best.1)
                })
                .collect();
            columns.push(col);
        }

        let last = columns.last().unwrap();
        let mut best = 0;
        for (k, entry) in last.iter().enumerate() {
            if entry.1 > last[best].1 {
                best = k;
            }
        }
        let mut path = vec![0usize; sentence.len()];
        for i in (0..sentence.len()).rev() {
            let (tag, _, back) = columns[i][best];
            path[i] = tag;
            best = back;
        }
        sentence
            .iter()
            .zip(path)
            .map(|(w, t)| (w.as_ref().to_string(), self.tags[t].clone()))
            .collect()
    }

    /// Tags seen with `word` in training, most frequent first (ties by tag
    /// label). Unseen words get the open-class tags ordered by their overall
    /// frequency.
    pub fn ambiguity_class(&self, word: &str) -> AmbiguityClass {
        let key = self.word_key(word);
        let mut seen: Vec<(&str, u64)> = self
            .tags
            .iter()
            .map(|t| (t.as_str(), self.emission_count(t, &key)))
            .filter(|(_, c)| *c > 0)
            .collect();
        if seen.is_empty() {
            seen = self
                .open
                .iter()
                .map(|t| {
                    (
                        t.as_str(),
                        self.emission_totals.get(t).copied().unwrap_or(0),
                    )
                })
                .collect();
        }
        seen.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        AmbiguityClass::new(seen.into_iter().map(|(t, _)| t))
            .or_else(|| AmbiguityClass::new(self.tags.iter().take(1).cloned()))
            .expect("tag inventory is nonempty")
    }

    /// Serializes counts to the `#tagger v1` TSV format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("#tagger v1\n");
        out.push_str(&format!("tags\t{}\n", self.tags.join(" ")));
        out.push_str(&format!(
            "open\t{}\n",
            self.open.iter().cloned().collect::<Vec<_>>().join(" ")
        ));
        for (tag, row) in &self.emissions {
            for (word, c) in row {
                out.push_str(&format!("emit\t{tag}\t{word}\t{c}\n"));
            }
        }
        for (prev, row) in &self.transitions {
            for (tag, c) in row {
                out.push_str(&format!("trans\t{prev}\t{tag}\t{c}\n"));
            }
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, TaggerError> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, message: String| TaggerError::Parse {
            file: "tagger model",
            line,
            message,
        };
        match lines.next() {
            Some((_, h)) if h.trim() == "#tagger v1" => {}
            _ => return Err(err(1, "missing `#tagger v1` header".into())),
        }
        let mut model = TaggerModel {
            tags: Vec::new(),
            open: BTreeSet::new(),
            vocab: BTreeSet::from([UNKNOWN_WORD.to_string()]),
            emissions: BTreeMap::new(),
            emission_totals: BTreeMap::new(),
            transitions: BTreeMap::new(),
            transition_totals: BTreeMap::new(),
        };
        for (i, line) in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let count = |s: &str| {
                s.parse::<u64>()
                    .ok()
                    .filter(|c| *c > 0)
                    .ok_or_else(|| err(i + 1, format!("invalid count `{s}`")))
            };
            match fields.as_slice() {
                ["tags", tags] => {
                    let set = TagSet::new(tags.split_whitespace())?;
                    model.tags = set.labels().map(String::from).collect();
                }
                ["open", tags] => {
                    model.open = tags.split_whitespace().map(String::from).collect();
                }
                ["emit", tag, word, c] => {
                    model.vocab.insert(word.to_string());
                    bump(
                        &mut model.emissions,
                        &mut model.emission_totals,
                        tag,
                        word,
                        count(c)?,
                    );
                }
                ["trans", prev, tag, c] => {
                    bump(
                        &mut model.transitions,
                        &mut model.transition_totals,
                        prev,
                        tag,
                        count(c)?,
                    );
                }
                _ => return Err(err(i + 1, format!("unrecognised line `{line}`"))),
            }
        }
        let known = |t: &str| model.tags.iter().any(|x| x == t);
        for t in model
            .open
            .iter()
            .chain(model.emissions.keys())
            .chain(model.transitions.values().flat_map(|r| r.keys()))
        {
            if !known(t) {
                return Err(TaggerError::UnknownTag(t.clone()));
            }
        }
        for p in model.transitions.keys() {
            if p != BOUNDARY && !known(p) {
                return Err(TaggerError::UnknownTag(p.clone()));
            }
        }
        Ok(model)
    }
}

/// `PREV=<tag> AMBIG~<tag,...> => <tag>`: when the previous token's tag is
/// `prev` and the current token's ambiguity class is exactly `ambiguity`,
/// assign `tag`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextRule {
    pub prev: String,
    pub ambiguity: BTreeSet<String>,
    pub tag: String,
}

impl ContextRule {
    fn matches(&self, prev: &str, class: &AmbiguityClass) -> bool {
        self.prev == prev
            && self.ambiguity.len() == class.0.len()
            && self
                .ambiguity
                .iter()
                .map(String::as_str)
                .collect::<BTreeSet<_>>()
                == class.as_set()
    }
}

impl fmt::Display for ContextRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let amb: Vec<&str> = self.ambiguity.iter().map(String::as_str).collect();
        write!(
            f,
            "PREV={} AMBIG~{} => {}",
            self.prev,
            amb.join(","),
            self.tag
        )
    }
}

impl FromStr for ContextRule {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, String> {
        let (lhs, tag) = line.split_once("=>").ok_or("expected `=>`")?;
        let tag = tag.trim();
        let mut prev = None;
        let mut ambiguity = None;
        for part in lhs.split_whitespace() {
            if let Some(p) = part.strip_prefix("PREV=") {
                prev = Some(p.to_string());
            } else if let Some(a) = part.strip_prefix("AMBIG~") {
                ambiguity = Some(
                    a.split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(String::from)
                        .collect::<BTreeSet<_>>(),
                );
            } else {
                return Err(format!("unexpected trigger `{part}`"));
            }
        }
        let prev = prev.filter(|p| !p.is_empty()).ok_or("missing PREV=")?;
        let ambiguity = ambiguity
            .filter(|a| !a.is_empty())
            .ok_or("missing AMBIG~")?;
        if tag.is_empty() || tag.contains(char::is_whitespace) {
            return Err(format!("bad action tag `{tag}`"));
        }
        Ok(ContextRule {
            prev,
            ambiguity,
            tag: tag.to_string(),
        })
    }
}

/// Parses a rules file and checks every mentioned tag against `tagset`.
pub fn parse_rules(text: &str, tagset: &TagSet) -> Result<Vec<ContextRule>, TaggerError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule: ContextRule = line.parse().map_err(|message| TaggerError::Parse {
            file: "rules",
            line: i + 1,
            message,
        })?;
        for t in rule.ambiguity.iter().chain([&rule.tag]) {
            if !tagset.contains(t) {
                return Err(TaggerError::UnknownTag(t.clone()));
            }
        }
        if rule.prev != BOUNDARY && !tagset.contains(&rule.prev) {
            return Err(TaggerError::UnknownTag(rule.prev.clone()));
        }
        out.push(rule);
    }
    Ok(out)
}

/// Resolves each token left to right: the first rule (in order) whose
/// trigger matches wins; otherwise the token takes its most frequent tag.
pub fn apply_rules(
    tokens: &[(String, AmbiguityClass)],
    rules: &[ContextRule],
) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::with_capacity(tokens.len());
    for (word, class) in tokens {
        let prev = out.last().map_or(BOUNDARY, |(_, t)| t.as_str());
        let tag = rules
            .iter()
            .find(|r| r.matches(prev, class))
            .map_or_else(|| class.most_frequent().to_string(), |r| r.tag.clone());
        out.push((word.clone(), tag));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled() -> (TagSet, TaggerModel) {
        let tagset = TagSet::parse(BUNDLED_TAGSET).unwrap();
        let corpus = parse_tagged_corpus(BUNDLED_TAGGED_CORPUS).unwrap();
        let model = train_tagger(&corpus, &tagset).unwrap();
        (tagset, model)
    }

    #[test]
    fn counts_one_sentence() {
        let tagset = TagSet::new(["DT", "NN"]).unwrap();
        let corpus = parse_tagged_corpus("the/DT dog/NN").unwrap();
        let m = train_tagger(&corpus, &tagset).unwrap();
        assert_eq!(m.emission_count("DT", "the"), 1);
        assert_eq!(m.emission_count("NN", "dog"), 1);
        assert_eq!(m.transition_count(BOUNDARY, "DT"), 1);
        assert_eq!(m.transition_count("DT", "NN"), 1);
        assert_eq!(m.transition_count("NN", "DT"), 0);
    }

    #[test]
    fn training_errors() {
        let tagset = TagSet::new(["DT", "NN"]).unwrap();
        let corpus = parse_tagged_corpus("the/DT dog/XX").unwrap();
        assert_eq!(
            train_tagger(&corpus, &tagset),
            Err(TaggerError::UnknownTag("XX".into()))
        );
        assert_eq!(train_tagger(&[], &tagset), Err(TaggerError::EmptyCorpus));
        assert!(parse_tagged_corpus("dog").is_err());
        assert!(TagSet::new(["nn"]).is_err());
        assert!(TagSet::new(["NN", "NN"]).is_err());
    }

    #[test]
    fn tags_the_illustrative_sentence() {
        let (_, m) = bundled();
        let words = "The process is quite simple , as this sentence illustrates";
        let tokens: Vec<&str> = words.split(' ').collect();
        let tags: Vec<String> = m.tag(&tokens).into_iter().map(|(_, t)| t).collect();
        assert_eq!(tags.join(" "), "DET NN AUX ADV ADJ , CONJ DET NN VB");
    }

    #[test]
    fn single_unambiguous_word() {
        let (_, m) = bundled();
        assert_eq!(m.tag(&["this"]), vec![("this".into(), "DET".into())]);
    }

    #[test]
    fn rows_are_distributions() {
        let (_, m) = bundled();
        for prev in m.tags().iter().map(String::as_str).chain([BOUNDARY]) {
            let s: f64 = m.tags().iter().map(|t| m.transition_prob(prev, t)).sum();
            assert!((s - 1.0).abs() < 1e-9, "transition row {prev}: {s}");
        }
        for tag in m.tags() {
            if !m.emission_totals.contains_key(tag) && !m.open.contains(tag) {
                continue;
            }
            let s: f64 = m.vocabulary().iter().map(|w| m.emission_prob(tag, w)).sum();
            assert!((s - 1.0).abs() < 1e-9, "emission row {tag}: {s}");
        }
    }

    #[test]
    fn determiner_rule_resolves_flour() {
        let (tagset, m) = bundled();
        let rules = parse_rules(BUNDLED_RULES, &tagset).unwrap();
        let tokens: Vec<(String, AmbiguityClass)> = ["the", "flour"]
            .iter()
            .map(|w| (w.to_string(), m.ambiguity_class(w)))
            .collect();
        assert_eq!(tokens[1].1.as_set(), BTreeSet::from(["NN", "VB"]));
        let out = apply_rules(&tokens, &rules);
        assert_eq!(out[1], ("flour".into(), "NN".into()));

        let tokens = vec![
            ("you".to_string(), m.ambiguity_class("you")),
            ("flour".to_string(), m.ambiguity_class("flour")),
        ];
        assert_eq!(apply_rules(&tokens, &rules)[1].1, "VB");
    }

    #[test]
    fn rule_order_and_fallback() {
        let class = |tags: &[&str]| AmbiguityClass::new(tags.iter().copied()).unwrap();
        let r1: ContextRule = "PREV=DT AMBIG~NN,VB => VB".parse().unwrap();
        let r2: ContextRule = "PREV=DT AMBIG~NN,VB => NN".parse().unwrap();
        let tokens = vec![
            ("the".to_string(), class(&["DT"])),
            ("x".to_string(), class(&["NN", "VB"])),
        ];
        assert_eq!(apply_rules(&tokens, &[r1.clone(), r2.clone()])[1].1, "VB");
        assert_eq!(apply_rules(&tokens, &[r2, r1])[1].1, "NN");
        let single = vec![("dog".to_string(), class(&["NN"]))];
        assert_eq!(apply_rules(&single, &[])[0].1, "NN");
        let ambiguous = vec![("x".to_string(), class(&["VB", "NN"]))];
        assert_eq!(apply_rules(&ambiguous, &[])[0].1, "VB");
    }

    #[test]
    fn rules_are_validated() {
        let tagset = TagSet::new(["DT", "NN", "VB"]).unwrap();
        assert!(parse_rules("PREV=DT AMBIG~NN,VB => NN", &tagset).is_ok());
        assert_eq!(
            parse_rules("PREV=DT AMBIG~NN,VB => XX", &tagset),
            Err(TaggerError::UnknownTag("XX".into()))
        );
        assert!(parse_rules("PREV=DT => NN", &tagset).is_err());
        assert!(parse_rules("PREV=DT AMBIG~NN", &tagset).is_err());
        let rule: ContextRule = "PREV=DT AMBIG~VB,NN => NN".parse().unwrap();
        assert_eq!(rule.to_string(), "PREV=DT AMBIG~NN,VB => NN");
    }

    #[test]
    fn model_tsv_round_trip() {
        let (_, m) = bundled();
        assert_eq!(TaggerModel::from_tsv(&m.to_tsv()).unwrap(), m);
        assert!(TaggerModel::from_tsv("#tagger v1\ntags\tNN\nemit\tXX\tdog\t1\n").is_err());
    }
}
