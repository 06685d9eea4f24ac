//! Command-line front end. Every pipeline stage is a subcommand whose output
//! matches what `run` computes for that stage.
//!
//! Exit status: 0 on success, 1 on a negative answer (no parse, false
//! query), 2 on usage or resource errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::morphology::FeatureBundle;
use crate::ngram::{self, SmoothingMode};
use crate::noisy_channel::{self, EditCosts};
use crate::pipeline::{
    self, load_lm, render_interpretations, render_morphology, render_result, render_tags,
    render_tokens, render_trees, OutputFormat, Pipeline, PipelineConfig, PipelineError, CONFIG_ENV,
};
use crate::semantics::{evaluate, infer, Assignment, Formula};
use crate::tagger;
use crate::tokenize::tokenize;

#[derive(Debug, Parser)]
#[command(
    name = "nlc",
    version,
    about = "Natural-language understanding as a three-phase compiler"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Resource and option overrides shared by all subcommands. Each flag
/// overrides the config field of the same name.
#[derive(Debug, Args, Default)]
struct Common {
    /// JSON config file (defaults to $NLC_CONFIG if set).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Morphology lexicon (for `correct`: the candidate word list).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    affixes: Option<PathBuf>,
    #[arg(long)]
    ortho: Option<PathBuf>,
    #[arg(long)]
    grammar: Option<PathBuf>,
    #[arg(long)]
    tagset: Option<PathBuf>,
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Tagger model or tagged training corpus.
    #[arg(long)]
    tagger: Option<PathBuf>,
    /// N-gram model or raw training corpus.
    #[arg(long)]
    lm: Option<PathBuf>,
    #[arg(long)]
    world: Option<PathBuf>,
    #[arg(long)]
    wordlist: Option<PathBuf>,
    /// mle, add-one or witten-bell.
    #[arg(long)]
    smoothing: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of results to keep.
    #[arg(long)]
    k: Option<usize>,
    /// json, sexpr or text.
    #[arg(long)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split text into tokens.
    Tokenize {
        text: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Morphological analysis, or generation with --generate.
    Morph {
        words: Vec<String>,
        /// Generate the surface form of the (single) stem with these features, e.g. +PLURAL.
        #[arg(long)]
        generate: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Train an n-gram model from a corpus (one sentence per line).
    TrainLm {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Write the model here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Most probable next words after a history.
    Predict {
        history: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Rank spelling corrections for a word.
    Correct {
        word: String,
        #[command(flatten)]
        common: Common,
    },
    /// Train a tagger from a word/TAG corpus.
    TrainTagger {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        tagset: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Part-of-speech tag text.
    Tag {
        text: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Parse text and print the feature-consistent trees.
    Parse {
        text: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Parse and compose meanings.
    Interpret {
        text: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a closed formula in --world, or prove it from --kb.
    Eval {
        formula: String,
        /// Knowledge base: one formula per line.
        #[arg(long)]
        kb: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run every stage.
    Run {
        text: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure modes mapped to exit codes.
enum Failure {
    Negative(String),
    Usage(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

impl Common {
    /// The config file (flag, then environment) with flag overrides applied.
    fn config(&self) -> Result<PipelineConfig, PipelineError> {
        let path = self.config.clone().or_else(|| {
            std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        });
        let mut c = match path {
            Some(p) => PipelineConfig::from_file(&p)?,
            None => PipelineConfig::default(),
        };
        let set = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
            if v.is_some() {
                slot.clone_from(v);
            }
        };
        set(&mut c.lexicon, &self.lexicon);
        set(&mut c.affixes, &self.affixes);
        set(&mut c.ortho, &self.ortho);
        set(&mut c.grammar, &self.grammar);
        set(&mut c.tagset, &self.tagset);
        set(&mut c.rules, &self.rules);
        set(&mut c.tagger, &self.tagger);
        set(&mut c.lm, &self.lm);
        set(&mut c.world, &self.world);
        set(&mut c.wordlist, &self.wordlist);
        if self.smoothing.is_some() {
            c.smoothing.clone_from(&self.smoothing);
        }
        if let Some(l) = self.lambda {
            c.lambda = l;
        }
        if let Some(k) = self.k {
            c.k = k;
        }
        if let Some(f) = self.format {
            c.format = f;
        }
        Ok(c)
    }

    fn load(&self) -> Result<(Pipeline, OutputFormat), Failure> {
        let c = self.config()?;
        Ok((Pipeline::load(&c)?, c.format))
    }
}

fn text_arg(words: &[String]) -> Result<String, Failure> {
    if !words.is_empty() {
        return Ok(words.join(" "));
    }
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).map_err(usage)?;
    Ok(s)
}

fn tokens_of(words: &[String]) -> Result<Vec<String>, Failure> {
    let tokens = tokenize(&text_arg(words)?);
    if tokens.is_empty() {
        return Err(Failure::Negative("tokenize: no tokens".into()));
    }
    Ok(tokens)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read `{}`: {e}", path.display())))
}

fn write_or_return(out: &Option<PathBuf>, text: String) -> Outcome {
    match out {
        None => Ok(text),
        Some(p) => {
            fs::write(p, text)
                .map_err(|e| usage(format!("cannot write `{}`: {e}", p.display())))?;
            Ok(String::new())
        }
    }
}

fn json_or_lines<T: serde::Serialize>(
    items: &[T],
    format: OutputFormat,
    line: impl Fn(&T) -> String,
) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(items).expect("serializable") + "\n",
        _ => items.iter().map(|i| line(i) + "\n").collect(),
    }
}

fn require_grammar(p: &Pipeline) -> Result<(), Failure> {
    match p.grammar {
        Some(_) => Ok(()),
        None => Err(usage("a grammar is required (--grammar or config)")),
    }
}

fn truth(b: bool) -> Outcome {
    if b {
        Ok("true\n".into())
    } else {
        Err(Failure::Negative("false".into()))
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Tokenize { text, common } => {
            let c = common.config()?;
            Ok(render_tokens(&tokens_of(&text)?, c.format))
        }
        Command::Morph {
            words,
            generate,
            common,
        } => {
            let (p, format) = common.load()?;
            if let Some(feats) = generate {
                let [stem] = words.as_slice() else {
                    return Err(usage("--generate takes exactly one stem"));
                };
                let feats: FeatureBundle = feats.parse().map_err(usage)?;
                return p
                    .morphology
                    .generate(stem, &feats)
                    .map(|s| s + "\n")
                    .map_err(|e| Failure::Negative(e.to_string()));
            }
            let tokens = tokens_of(&words)?;
            let analyses = pipeline::morphology_stage(&p.morphology, &tokens);
            let text = render_morphology(&analyses, format);
            if analyses.iter().all(|a| a.analyses.is_empty()) {
                stdout.write_all(text.as_bytes()).map_err(usage)?;
                return Err(Failure::Negative("no analysis".into()));
            }
            Ok(text)
        }
        Command::TrainLm { corpus, order, out } => {
            let model = ngram::train(&ngram::read_corpus(&read(&corpus)?), order).map_err(usage)?;
            write_or_return(&out, model.to_tsv())
        }
        Command::Predict { history, common } => {
            let c = common.config()?;
            let lm =
                c.lm.as_deref()
                    .ok_or_else(|| usage("an n-gram model is required (--lm)"))?;
            let mode: SmoothingMode = c
                .smoothing
                .as_deref()
                .unwrap_or("mle")
                .parse()
                .map_err(usage)?;
            if c.k == 0 {
                return Err(usage("k must be at least 1"));
            }
            let ranked = load_lm(lm)?.predict_next(&history, c.k, mode);
            Ok(json_or_lines(&ranked, c.format, |(w, p)| {
                format!("{w}\t{p}")
            }))
        }
        Command::Correct { word, common } => {
            let c = common.config()?;
            let list = common
                .lexicon
                .clone()
                .or(c.wordlist.clone())
                .ok_or_else(|| usage("a word list is required (--lexicon or --wordlist)"))?;
            let lm =
                c.lm.as_deref()
                    .ok_or_else(|| usage("an n-gram model is required (--lm)"))?;
            if c.k == 0 {
                return Err(usage("k must be at least 1"));
            }
            let words = noisy_channel::read_wordlist(&read(&list)?);
            let ranked = noisy_channel::correct(
                &word,
                &words,
                &load_lm(lm)?,
                c.lambda,
                &EditCosts::default(),
                c.k,
            )
            .map_err(usage)?;
            Ok(json_or_lines(&ranked, c.format, |cand| {
                format!("{}\t{}", cand.word, cand.score)
            }))
        }
        Command::TrainTagger {
            corpus,
            tagset,
            out,
        } => {
            let tagset = pipeline::load_tagset(tagset.as_deref())?;
            let sentences = tagger::parse_tagged_corpus(&read(&corpus)?).map_err(usage)?;
            let model = tagger::train_tagger(&sentences, &tagset).map_err(usage)?;
            write_or_return(&out, model.to_tsv())
        }
        Command::Tag { text, common } => {
            let (p, format) = common.load()?;
            let tokens = tokens_of(&text)?;
            Ok(render_tags(
                &pipeline::tag_stage(&p.tagger, p.rules.as_deref(), &tokens),
                format,
            ))
        }
        Command::Parse { text, common } => {
            let (p, format) = common.load()?;
            require_grammar(&p)?;
            let trees = pipeline::parse_stage(&p, &tokens_of(&text)?)
                .map_err(|d| Failure::Negative(d.to_string()))?;
            Ok(render_trees(&trees, format))
        }
        Command::Interpret { text, common } => {
            let (p, format) = common.load()?;
            require_grammar(&p)?;
            let trees = pipeline::parse_stage(&p, &tokens_of(&text)?)
                .map_err(|d| Failure::Negative(d.to_string()))?;
            let items = pipeline::interpret_stage(&p, &trees)
                .map_err(|d| Failure::Negative(d.to_string()))?;
            Ok(render_interpretations(&items, format))
        }
        Command::Eval {
            formula,
            kb,
            common,
        } => {
            let f = Formula::parse(&formula).map_err(usage)?;
            if let Some(kb) = kb {
                let mut facts = Vec::new();
                for (i, line) in read(&kb)?.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    facts.push(
                        Formula::parse(line)
                            .map_err(|e| usage(format!("{} line {}: {e}", kb.display(), i + 1)))?,
                    );
                }
                return truth(infer(&facts, &f).map_err(usage)?);
            }
            let c = common.config()?;
            let world = c
                .world
                .as_deref()
                .ok_or_else(|| usage("a world model (--world) or --kb is required"))?;
            truth(evaluate(&f, &pipeline::load_world(world)?, &Assignment::new()).map_err(usage)?)
        }
        Command::Run { text, common } => {
            let (p, format) = common.load()?;
            let r = p.run(&text_arg(&text)?);
            let rendered = render_result(&r, format);
            if r.interpretations.is_empty() {
                stdout.write_all(rendered.as_bytes()).map_err(usage)?;
                let why = r
                    .diagnostics
                    .first()
                    .map_or_else(|| "no interpretation".into(), ToString::to_string);
                return Err(Failure::Negative(why));
            }
            Ok(rendered)
        }
    }
}

/// Parses `args` (program name first), runs the subcommand, and returns the
/// exit status.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(text) => match stdout.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                2
            }
        },
        Err(Failure::Negative(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = run_cli(args, &mut out, &mut io::stderr());
    let _ = out.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str) -> String {
        format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn nlc(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(
            std::iter::once("nlc").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn parse_exit_codes() {
        let g = data("air.gr");
        let (code, out, _) = nlc(&["parse", "--grammar", &g, "I want a morning flight"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1);
        let (code, out, err) = nlc(&["parse", "--grammar", &g, "flight a want"]);
        assert_eq!((code, out.as_str()), (1, ""));
        assert!(err.contains("no parse"), "{err}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(nlc(&["frobnicate"]).0, 2);
        assert_eq!(nlc(&["parse", "--grammar", "/nonexistent.gr", "x"]).0, 2);
        assert_eq!(
            nlc(&["parse", "--k", "0", "--grammar", &data("air.gr"), "I"]).0,
            2
        );
        assert_eq!(nlc(&["correct", "Taes"]).0, 2);
        assert_eq!(nlc(&["--help"]).0, 0);
    }

    #[test]
    fn correct_ranks() {
        let (code, out, _) = nlc(&[
            "correct",
            "Julai",
            "--lexicon",
            &data("words.txt"),
            "--lm",
            &data("corpus.txt"),
            "--format",
            "text",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("Julia\t"), "{out}");
        assert_eq!(out.lines().count(), 3);
    }

    #[test]
    fn morph_and_generate() {
        let (code, out, _) = nlc(&["morph", "wolves", "--format", "text"]);
        assert_eq!(code, 0);
        assert!(out.contains("wolf"), "{out}");
        let (code, out, _) = nlc(&["morph", "city", "--generate", "+PLURAL"]);
        assert_eq!((code, out.as_str()), (0, "cities\n"));
    }

    #[test]
    fn eval_world_and_kb() {
        let w = data("world.json");
        assert_eq!(nlc(&["eval", "(sleep Julia)", "--world", &w]).0, 0);
        assert_eq!(nlc(&["eval", "(sleep John)", "--world", &w]).0, 1);
        assert_eq!(nlc(&["eval", "(exists x (sleep x))", "--world", &w]).0, 0);
        let dir = tempfile::tempdir().unwrap();
        let kb = dir.path().join("kb.txt");
        fs::write(
            &kb,
            "(forall x (implies (Serves x VegetarianFood) (VegetarianRestaurant x)))\n(Serves Maharani VegetarianFood)\n",
        )
        .unwrap();
        let kb = kb.to_str().unwrap();
        assert_eq!(
            nlc(&["eval", "(VegetarianRestaurant Maharani)", "--kb", kb]).0,
            0
        );
        assert_eq!(
            nlc(&["eval", "(VegetarianRestaurant Julia)", "--kb", kb]).0,
            1
        );
    }

    #[test]
    fn train_then_predict() {
        let dir = tempfile::tempdir().unwrap();
        let model = dir.path().join("lm.tsv");
        let m = model.to_str().unwrap();
        assert_eq!(
            nlc(&["train-lm", "--corpus", &data("corpus.txt"), "--out", m]).0,
            0
        );
        let (code, out, _) = nlc(&["predict", "the", "--lm", m, "--k", "1", "--format", "text"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1);
    }

    #[test]
    fn tag_with_rules() {
        let (code, out, _) = nlc(&[
            "tag",
            "--rules",
            &data("rules.txt"),
            "--format",
            "text",
            "the flour",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "the/DT flour/NN\n");
    }
}
