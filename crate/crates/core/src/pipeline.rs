//! The three phases wired end to end.
//!
//! Each stage consumes only the previous stage's output. A failing stage is
//! recorded as a diagnostic naming the stage, and later stages are skipped.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::earley::{earley_parse, extract_trees, EarleyError, ParseTree};
use crate::grammar::{load_grammar, Grammar};
use crate::morphology::{MorphAnalysis, Morphology};
use crate::ngram::{self, NGramModel, SmoothingMode};
use crate::noisy_channel::{self, Candidate, EditCosts};
use crate::semantics::{canonicalize, compose, evaluate, Assignment, WorldModel};
use crate::tagger::{self, ContextRule, TagSet, TaggerModel};
use crate::tokenize::tokenize;

/// Environment variable naming a default configuration file.
pub const CONFIG_ENV: &str = "NLC_CONFIG";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid resource `{path}`: {message}")]
    Resource { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Sexpr,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "sexpr" => Ok(Self::Sexpr),
            "text" => Ok(Self::Text),
            _ => Err(format!(
                "unknown format `{s}` (expected json, sexpr or text)"
            )),
        }
    }
}

fn default_lambda() -> f64 {
    1.0
}

fn default_k() -> usize {
    3
}

/// Resource locations and knobs. Relative paths in a config file resolve
/// against the file's directory. Absent morphology and tagger resources fall
/// back to the bundled ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    #[serde(default)]
    pub affixes: Option<PathBuf>,
    #[serde(default)]
    pub ortho: Option<PathBuf>,
    #[serde(default)]
    pub grammar: Option<PathBuf>,
    #[serde(default)]
    pub tagset: Option<PathBuf>,
    #[serde(default)]
    pub rules: Option<PathBuf>,
    /// A `#tagger v1` model file or a `word/TAG` training corpus.
    #[serde(default)]
    pub tagger: Option<PathBuf>,
    /// A `#ngram v1` model file or a raw corpus (trained as a bigram model).
    #[serde(default)]
    pub lm: Option<PathBuf>,
    #[serde(default)]
    pub world: Option<PathBuf>,
    #[serde(default)]
    pub wordlist: Option<PathBuf>,
    #[serde(default)]
    pub smoothing: Option<String>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            lexicon: None,
            affixes: None,
            ortho: None,
            grammar: None,
            tagset: None,
            rules: None,
            tagger: None,
            lm: None,
            world: None,
            wordlist: None,
            smoothing: None,
            lambda: default_lambda(),
            k: default_k(),
            format: OutputFormat::Json,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut c: PipelineConfig =
            serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        for p in [
            &mut c.lexicon,
            &mut c.affixes,
            &mut c.ortho,
            &mut c.grammar,
            &mut c.tagset,
            &mut c.rules,
            &mut c.tagger,
            &mut c.lm,
            &mut c.world,
            &mut c.wordlist,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base)
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn resource<T, E: fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T, PipelineError> {
    r.map_err(|e| PipelineError::Resource {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Loads a tagger from a model file or trains one from a tagged corpus.
pub fn load_tagger(path: Option<&Path>, tagset: &TagSet) -> Result<TaggerModel, PipelineError> {
    match path {
        None => {
            let corpus = tagger::parse_tagged_corpus(tagger::BUNDLED_TAGGED_CORPUS)
                .expect("bundled corpus is valid");
            Ok(tagger::train_tagger(&corpus, tagset).expect("bundled corpus matches tagset"))
        }
        Some(p) => {
            let text = read(p)?;
            if text.trim_start().starts_with("#tagger") {
                resource(p, TaggerModel::from_tsv(&text))
            } else {
                let corpus = resource(p, tagger::parse_tagged_corpus(&text))?;
                resource(p, tagger::train_tagger(&corpus, tagset))
            }
        }
    }
}

/// Loads an n-gram model from a model file or trains a bigram model from a
/// raw corpus.
pub fn load_lm(path: &Path) -> Result<NGramModel, PipelineError> {
    let text = read(path)?;
    if text.trim_start().starts_with("#ngram") {
        resource(path, NGramModel::from_tsv(&text))
    } else {
        resource(path, ngram::train(&ngram::read_corpus(&text), 2))
    }
}

pub fn load_tagset(path: Option<&Path>) -> Result<TagSet, PipelineError> {
    match path {
        None => Ok(TagSet::parse(tagger::BUNDLED_TAGSET).expect("bundled tagset is valid")),
        Some(p) => resource(p, TagSet::parse(&read(p)?)),
    }
}

pub fn load_morphology(
    lexicon: Option<&Path>,
    affixes: Option<&Path>,
    ortho: Option<&Path>,
) -> Result<Morphology, PipelineError> {
    if lexicon.is_none() && affixes.is_none() && ortho.is_none() {
        return Ok(Morphology::bundled());
    }
    let text = |p: Option<&Path>, fallback: &str| p.map_or(Ok(fallback.to_string()), read);
    let lex = text(lexicon, crate::morphology::BUNDLED_LEXICON)?;
    let aff = text(affixes, crate::morphology::BUNDLED_AFFIXES)?;
    let ort = text(ortho, crate::morphology::BUNDLED_ORTHO)?;
    let blame = lexicon.or(affixes).or(ortho).unwrap();
    resource(blame, Morphology::from_texts(&lex, &aff, &ort))
}

pub fn load_grammar_file(path: &Path) -> Result<Grammar, PipelineError> {
    resource(path, load_grammar(&read(path)?))
}

pub fn load_world(path: &Path) -> Result<WorldModel, PipelineError> {
    resource(path, WorldModel::from_json(&read(path)?))
}

/// Every resource the pipeline needs, loaded once.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub morphology: Morphology,
    pub tagset: TagSet,
    pub tagger: TaggerModel,
    pub rules: Option<Vec<ContextRule>>,
    pub grammar: Option<Grammar>,
    pub world: Option<WorldModel>,
    pub lm: Option<NGramModel>,
    pub wordlist: Option<Vec<String>>,
    pub smoothing: SmoothingMode,
    pub lambda: f64,
    pub k: usize,
}

impl Pipeline {
    pub fn load(c: &PipelineConfig) -> Result<Self, PipelineError> {
        if c.k == 0 {
            return Err(PipelineError::Config("k must be at least 1".into()));
        }
        if !(c.lambda > 0.0 && c.lambda.is_finite()) {
            return Err(PipelineError::Config(format!(
                "lambda must be positive, got {}",
                c.lambda
            )));
        }
        let smoothing = match &c.smoothing {
            None => SmoothingMode::default(),
            Some(s) => s
                .parse()
                .map_err(|e: ngram::NGramError| PipelineError::Config(e.to_string()))?,
        };
        let tagset = load_tagset(c.tagset.as_deref())?;
        let tagger = load_tagger(c.tagger.as_deref(), &tagset)?;
        let rules = match &c.rules {
            None => None,
            Some(p) => Some(resource(p, tagger::parse_rules(&read(p)?, &tagset))?),
        };
        Ok(Pipeline {
            morphology: load_morphology(
                c.lexicon.as_deref(),
                c.affixes.as_deref(),
                c.ortho.as_deref(),
            )?,
            tagset,
            tagger,
            rules,
            grammar: c.grammar.as_deref().map(load_grammar_file).transpose()?,
            world: c.world.as_deref().map(load_world).transpose()?,
            lm: c.lm.as_deref().map(load_lm).transpose()?,
            wordlist: c
                .wordlist
                .as_deref()
                .map(|p| read(p).map(|t| noisy_channel::read_wordlist(&t)))
                .transpose()?,
            smoothing,
            lambda: c.lambda,
            k: c.k,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Tokenize,
    Morphology,
    Tag,
    Parse,
    Compose,
    Canonicalize,
    Evaluate,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Tokenize => "tokenize",
            Stage::Morphology => "morphology",
            Stage::Tag => "tag",
            Stage::Parse => "parse",
            Stage::Compose => "compose",
            Stage::Canonicalize => "canonicalize",
            Stage::Evaluate => "evaluate",
        })
    }
}

/// A stage failure. `suggestions` is filled for unknown tokens.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub stage: Stage,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suggestions: Vec<Candidate>,
}

impl Diagnostic {
    fn new(stage: Stage, message: impl Into<String>) -> Self {
        Diagnostic {
            stage,
            message: message.into(),
            suggestions: Vec::new(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)?;
        if !self.suggestions.is_empty() {
            let words: Vec<&str> = self.suggestions.iter().map(|c| c.word.as_str()).collect();
            write!(f, " (did you mean: {})", words.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordAnalyses {
    pub token: String,
    pub analyses: Vec<MorphAnalysis>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interpretation {
    pub tree: ParseTree,
    /// The composed formula as an s-expression.
    pub formula: String,
    pub canonical: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    pub input: String,
    pub tokens: Vec<String>,
    pub morphology: Vec<WordAnalyses>,
    pub tags: Vec<(String, String)>,
    pub trees: Vec<ParseTree>,
    pub interpretations: Vec<Interpretation>,
    pub diagnostics: Vec<Diagnostic>,
}

impl PipelineResult {
    pub fn failed_stage(&self) -> Option<Stage> {
        self.diagnostics.first().map(|d| d.stage)
    }
}

/// Analyses of each token; a capitalized token that has no analysis is
/// retried in lowercase.
pub fn morphology_stage(m: &Morphology, tokens: &[String]) -> Vec<WordAnalyses> {
    tokens
        .iter()
        .map(|t| {
            let mut set: BTreeSet<MorphAnalysis> = m.parse_word(t);
            let lower = t.to_lowercase();
            if set.is_empty() && lower != *t {
                set = m.parse_word(&lower);
            }
            WordAnalyses {
                token: t.clone(),
                analyses: set.into_iter().collect(),
            }
        })
        .collect()
}

/// Viterbi tags, or rule-resolved ambiguity classes when rules are given.
pub fn tag_stage(
    model: &TaggerModel,
    rules: Option<&[ContextRule]>,
    tokens: &[String],
) -> Vec<(String, String)> {
    match rules {
        None => model.tag(tokens),
        Some(rules) => {
            let classes: Vec<_> = tokens
                .iter()
                .map(|t| (t.clone(), model.ambiguity_class(t)))
                .collect();
            tagger::apply_rules(&classes, rules)
        }
    }
}

/// Spelling suggestions for a token unknown to the grammar. Candidates are
/// the word list if one is configured, otherwise the grammar's terminals;
/// the prior comes from the language model, or a uniform unigram model over
/// the candidates.
pub fn suggest(p: &Pipeline, grammar: &Grammar, token: &str) -> Vec<Candidate> {
    let words: Vec<String> = match &p.wordlist {
        Some(w) => w.clone(),
        None => grammar.terminals().into_iter().map(String::from).collect(),
    };
    let uniform;
    let lm = match &p.lm {
        Some(lm) => lm,
        None => {
            let corpus: Vec<Vec<&str>> = words.iter().map(|w| vec![w.as_str()]).collect();
            match ngram::train(&corpus, 1) {
                Ok(m) => {
                    uniform = m;
                    &uniform
                }
                Err(_) => return Vec::new(),
            }
        }
    };
    noisy_channel::correct(token, &words, lm, p.lambda, &EditCosts::default(), p.k)
        .unwrap_or_default()
}

/// Chart parse plus feature-filtered extraction of at most `k` trees.
pub fn parse_stage(p: &Pipeline, tokens: &[String]) -> Result<Vec<ParseTree>, Diagnostic> {
    let grammar = p
        .grammar
        .as_ref()
        .ok_or_else(|| Diagnostic::new(Stage::Parse, "no grammar configured"))?;
    let chart = earley_parse(grammar, tokens).map_err(|e| match e {
        EarleyError::UnknownToken { ref token, .. } => Diagnostic {
            suggestions: suggest(p, grammar, token),
            ..Diagnostic::new(Stage::Parse, e.to_string())
        },
        other => Diagnostic::new(Stage::Parse, other.to_string()),
    })?;
    if !chart.accepted() {
        return Err(Diagnostic::new(Stage::Parse, "no parse"));
    }
    let trees = extract_trees(&chart, p.k);
    if trees.is_empty() {
        return Err(Diagnostic::new(
            Stage::Parse,
            "no parse: every derivation violates a feature constraint",
        ));
    }
    Ok(trees)
}

/// Composition, canonicalization and (with a world model) evaluation of
/// each tree. Trees that fail are dropped; the diagnostics of the first
/// failure are returned when none survive.
pub fn interpret_stage(
    p: &Pipeline,
    trees: &[ParseTree],
) -> Result<Vec<Interpretation>, Diagnostic> {
    let grammar = p
        .grammar
        .as_ref()
        .ok_or_else(|| Diagnostic::new(Stage::Compose, "no grammar configured"))?;
    let mut out = Vec::new();
    let mut first_error = None;
    for t in trees {
        let mut tree = t.clone();
        let step = compose(&mut tree, grammar)
            .map_err(|e| Diagnostic::new(Stage::Compose, e.to_string()))
            .and_then(|f| {
                let canonical = canonicalize(&f)
                    .map_err(|e| Diagnostic::new(Stage::Canonicalize, e.to_string()))?;
                let truth = match &p.world {
                    None => None,
                    Some(w) => Some(
                        evaluate(&f, w, &Assignment::new())
                            .map_err(|e| Diagnostic::new(Stage::Evaluate, e.to_string()))?,
                    ),
                };
                Ok((f, canonical, truth))
            });
        match step {
            Ok((f, canonical, truth)) => out.push(Interpretation {
                tree,
                formula: f.to_sexpr(),
                canonical,
                truth,
            }),
            Err(d) => {
                first_error.get_or_insert(d);
            }
        }
    }
    match (out.is_empty(), first_error) {
        (true, Some(d)) => Err(d),
        _ => Ok(out),
    }
}

impl Pipeline {
    pub fn run(&self, text: &str) -> PipelineResult {
        let mut r = PipelineResult {
            input: text.to_string(),
            tokens: tokenize(text),
            morphology: Vec::new(),
            tags: Vec::new(),
            trees: Vec::new(),
            interpretations: Vec::new(),
            diagnostics: Vec::new(),
        };
        if r.tokens.is_empty() {
            r.diagnostics
                .push(Diagnostic::new(Stage::Tokenize, "no tokens"));
            return r;
        }
        r.morphology = morphology_stage(&self.morphology, &r.tokens);
        r.tags = tag_stage(&self.tagger, self.rules.as_deref(), &r.tokens);
        match parse_stage(self, &r.tokens) {
            Ok(trees) => r.trees = trees,
            Err(d) => {
                r.diagnostics.push(d);
                return r;
            }
        }
        match interpret_stage(self, &r.trees) {
            Ok(i) => r.interpretations = i,
            Err(d) => r.diagnostics.push(d),
        }
        r
    }
}

/// Loads every resource named by `config` and runs all stages on `text`.
pub fn run_pipeline(text: &str, config: &PipelineConfig) -> Result<PipelineResult, PipelineError> {
    Ok(Pipeline::load(config)?.run(text))
}

// Renderers shared by `run` and the per-stage subcommands, so that stage
// output is byte-identical either way.

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

pub fn render_tokens(tokens: &[String], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(tokens),
        OutputFormat::Sexpr => format!("({})\n", tokens.join(" ")),
        OutputFormat::Text => tokens.iter().map(|t| format!("{t}\n")).collect(),
    }
}

pub fn render_morphology(words: &[WordAnalyses], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(words),
        _ => words
            .iter()
            .map(|w| {
                let a: Vec<String> = w.analyses.iter().map(ToString::to_string).collect();
                if a.is_empty() {
                    format!("{}\t-\n", w.token)
                } else {
                    format!("{}\t{}\n", w.token, a.join(" "))
                }
            })
            .collect(),
    }
}

pub fn render_tags(tags: &[(String, String)], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(tags),
        OutputFormat::Sexpr => {
            let parts: Vec<String> = tags.iter().map(|(w, t)| format!("({t} {w})")).collect();
            format!("({})\n", parts.join(" "))
        }
        OutputFormat::Text => {
            let parts: Vec<String> = tags.iter().map(|(w, t)| format!("{w}/{t}")).collect();
            parts.join(" ") + "\n"
        }
    }
}

/// JSON: one compact document per tree, one per line.
pub fn render_trees(trees: &[ParseTree], format: OutputFormat) -> String {
    trees
        .iter()
        .map(|t| match format {
            OutputFormat::Json => serde_json::to_string(t).expect("serializable") + "\n",
            _ => t.to_sexpr() + "\n",
        })
        .collect()
}

pub fn render_interpretations(items: &[Interpretation], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(items),
        OutputFormat::Sexpr => items.iter().map(|i| format!("{}\n", i.canonical)).collect(),
        OutputFormat::Text => items
            .iter()
            .map(|i| match i.truth {
                Some(t) => format!("{}\ttruth={t}\n", i.canonical),
                None => format!("{}\n", i.canonical),
            })
            .collect(),
    }
}

pub fn render_result(r: &PipelineResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(r),
        _ => {
            let mut out = String::new();
            out.push_str(&render_tokens(&r.tokens, OutputFormat::Sexpr));
            out.push_str(&render_tags(&r.tags, format));
            out.push_str(&render_trees(&r.trees, OutputFormat::Sexpr));
            out.push_str(&render_interpretations(&r.interpretations, format));
            for d in &r.diagnostics {
                out.push_str(&format!("error: {d}\n"));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("data")
            .join(name)
    }

    fn bundle(name: &str) -> Pipeline {
        Pipeline::load(&PipelineConfig::from_file(&data(name)).unwrap()).unwrap()
    }

    #[test]
    fn julia_sleeps_is_true() {
        let r = bundle("semantics.json").run("Julia sleeps");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        assert_eq!(r.interpretations.len(), 1);
        assert_eq!(r.interpretations[0].canonical, "(sleep Julia)");
        assert_eq!(r.interpretations[0].truth, Some(true));
        assert_eq!(r.tags.len(), 2);
    }

    #[test]
    fn false_sentence() {
        let r = bundle("semantics.json").run("John sleeps");
        assert_eq!(r.interpretations[0].truth, Some(false));
    }

    #[test]
    fn empty_input_fails_at_tokenize() {
        let r = bundle("semantics.json").run("   ");
        assert_eq!(r.failed_stage(), Some(Stage::Tokenize));
        assert_eq!(r.diagnostics[0].message, "no tokens");
    }

    #[test]
    fn unknown_token_suggests() {
        let r = bundle("semantics.json").run("Julai sleeps");
        assert_eq!(r.failed_stage(), Some(Stage::Parse));
        assert_eq!(r.diagnostics[0].suggestions[0].word, "Julia");
        assert!(r.trees.is_empty() && r.interpretations.is_empty());
    }

    #[test]
    fn agreement_failure_is_a_parse_failure() {
        let p = bundle("agreement.json");
        assert!(p.run("The ball rolls").trees.len() == 1);
        let r = p.run("The ball roll");
        assert_eq!(r.failed_stage(), Some(Stage::Parse));
        assert!(r.diagnostics[0].message.contains("feature"));
    }

    #[test]
    fn missing_attachments_fail_compose() {
        let r = bundle("air.json").run("I want a morning flight");
        assert_eq!(r.trees.len(), 1);
        assert_eq!(r.failed_stage(), Some(Stage::Compose));
    }

    #[test]
    fn no_truth_without_world() {
        let mut c = PipelineConfig::from_file(&data("semantics.json")).unwrap();
        c.world = None;
        let r = run_pipeline("Julia sleeps", &c).unwrap();
        assert_eq!(r.interpretations[0].truth, None);
        assert!(!render_result(&r, OutputFormat::Json).contains("truth"));
    }

    #[test]
    fn config_rejects_unknown_fields_and_bad_values() {
        assert!(PipelineConfig::from_json(r#"{"gramar": "x"}"#, Path::new(".")).is_err());
        let c = PipelineConfig::from_json(r#"{"k": 0}"#, Path::new(".")).unwrap();
        assert!(matches!(Pipeline::load(&c), Err(PipelineError::Config(_))));
        let c = PipelineConfig::from_json(r#"{"smoothing": "kneser"}"#, Path::new(".")).unwrap();
        assert!(matches!(Pipeline::load(&c), Err(PipelineError::Config(_))));
        let c =
            PipelineConfig::from_json(r#"{"grammar": "missing.gr"}"#, Path::new("/nonexistent"))
                .unwrap();
        assert!(matches!(Pipeline::load(&c), Err(PipelineError::Io { .. })));
    }

    #[test]
    fn rendering_is_deterministic() {
        let p = bundle("semantics.json");
        let a = render_result(
            &p.run("Maharani serves vegetarian food"),
            OutputFormat::Json,
        );
        let b = render_result(
            &p.run("Maharani serves vegetarian food"),
            OutputFormat::Json,
        );
        assert_eq!(a, b);
        assert!(a.contains("(Serves Maharani VegetarianFood)"));
    }
}
