//! Context-free grammars whose productions carry PATR-style feature
//! equations and semantic attachments, plus a word lexicon.
//!
//! File format, one rule per line (`#` starts a comment):
//!
//! ```text
//! %start S
//! S -> NP VP { <rhs1 NUMBER> = <rhs2 NUMBER> } :: ($2 $1)
//! NP -> Det Noun { <lhs NUMBER> = <rhs2 NUMBER> } :: $2 | Pronoun :: $1
//! NP -> 'vegetarian' 'food' :: VegetarianFood
//! balls : Noun { NUMBER = PL } :: ball
//! ```
//!
//! `|` separates alternatives, each with its own equations and attachment.
//! Quoted symbols are terminals matched against input tokens. Equations
//! name `lhs` or `rhsN` (1-based) followed by a feature path; the right
//! side may be another path or an atom. Lexicon lines are
//! `word : Category { PATH = atom ; ... } :: expr`.

mod features;
mod load;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use features::{
    subsumes, unify, unify_values, FValue, FeatureStructure, FsParseError, UnifyFailure,
};
pub use load::load_grammar;

use crate::semantics::Expr;

/// Prefix reserved for nonterminals introduced by grammar transformations.
pub const RESERVED_PREFIX: &str = "_cnf_";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrammarError {
    #[error("line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: production for `{lhs}` has an empty right-hand side")]
    EpsilonProduction { line: usize, lhs: String },
    #[error("line {line}: undefined symbol `{symbol}`")]
    UndefinedSymbol { line: usize, symbol: String },
    #[error("line {line}: constraint path `{path}` does not fit the rule")]
    BadConstraintPath { line: usize, path: String },
    #[error("production has {expected} right-hand symbols but {found} children were given")]
    ArityMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    NonTerminal(String),
    Terminal(String),
}

impl Symbol {
    pub fn nt(name: &str) -> Symbol {
        Symbol::NonTerminal(name.to_string())
    }

    pub fn t(word: &str) -> Symbol {
        Symbol::Terminal(word.to_string())
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::NonTerminal(s) | Symbol::Terminal(s) => s,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }
}

/// Quotes a word for the grammar file format.
pub fn quote(word: &str) -> String {
    let mut out = String::from("'");
    for c in word.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::NonTerminal(s) => f.write_str(s),
            Symbol::Terminal(s) => f.write_str(&quote(s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathNode {
    Lhs,
    /// 1-based right-hand-side position.
    Rhs(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeaturePath {
    pub node: PathNode,
    pub features: Vec<String>,
}

impl fmt::Display for FeaturePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            PathNode::Lhs => f.write_str("<lhs")?,
            PathNode::Rhs(i) => write!(f, "<rhs{i}")?,
        }
        for feat in &self.features {
            write!(f, " {feat}")?;
        }
        f.write_str(">")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstraintValue {
    Path(FeaturePath),
    Atom(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub left: FeaturePath,
    pub right: ConstraintValue,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.right {
            ConstraintValue::Path(p) => write!(f, "{} = {p}", self.left),
            ConstraintValue::Atom(a) => write!(f, "{} = {a}", self.left),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
    pub constraints: Vec<Constraint>,
    pub attachment: Option<Expr>,
    /// Source line, 0 when built programmatically.
    pub line: usize,
}

/// Equality ignores the source line.
impl PartialEq for Production {
    fn eq(&self, other: &Self) -> bool {
        self.lhs == other.lhs
            && self.rhs == other.rhs
            && self.constraints == other.constraints
            && self.attachment == other.attachment
    }
}

impl Production {
    pub fn new(lhs: &str, rhs: Vec<Symbol>) -> Production {
        Production {
            lhs: lhs.to_string(),
            rhs,
            constraints: vec![],
            attachment: None,
            line: 0,
        }
    }

    pub fn with_constraints(mut self, constraints: Vec<Constraint>) -> Production {
        self.constraints = constraints;
        self
    }

    pub fn with_attachment(mut self, e: Expr) -> Production {
        self.attachment = Some(e);
        self
    }

    /// `LHS -> A B` without equations or attachment.
    pub fn signature(&self) -> String {
        let rhs: Vec<String> = self.rhs.iter().map(Symbol::to_string).collect();
        format!("{} -> {}", self.lhs, rhs.join(" "))
    }

    fn path_fits(&self, p: &FeaturePath) -> bool {
        match p.node {
            PathNode::Lhs => true,
            PathNode::Rhs(i) => i >= 1 && i <= self.rhs.len(),
        }
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.signature())?;
        if !self.constraints.is_empty() {
            let cs: Vec<String> = self.constraints.iter().map(Constraint::to_string).collect();
            write!(f, " {{ {} }}", cs.join(" ; "))?;
        }
        if let Some(a) = &self.attachment {
            write!(f, " :: {a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LexicalEntry {
    pub word: String,
    pub category: String,
    pub features: FeatureStructure,
    pub semantics: Option<Expr>,
    pub line: usize,
}

/// Equality ignores the source line.
impl PartialEq for LexicalEntry {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
            && self.category == other.category
            && self.features == other.features
            && self.semantics == other.semantics
    }
}

impl LexicalEntry {
    pub fn new(word: &str, category: &str) -> LexicalEntry {
        LexicalEntry {
            word: word.to_string(),
            category: category.to_string(),
            features: FeatureStructure::new(),
            semantics: None,
            line: 0,
        }
    }
}

impl fmt::Display for LexicalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", quote(&self.word), self.category)?;
        let eqs: Vec<String> = self
            .features
            .paths()
            .into_iter()
            .map(|(p, a)| format!("{} = {a}", p.join(" ")))
            .collect();
        if !eqs.is_empty() {
            write!(f, " {{ {} }}", eqs.join(" ; "))?;
        }
        if let Some(s) = &self.semantics {
            write!(f, " :: {s}")?;
        }
        Ok(())
    }
}

/// Whether input `token` matches grammar word `word`: exact, or after
/// lowercasing the token.
pub fn token_matches(word: &str, token: &str) -> bool {
    word == token || word == token.to_lowercase()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    start: String,
    productions: Vec<Production>,
    lexicon: Vec<LexicalEntry>,
}

impl Grammar {
    /// Validates and builds a grammar. Productions may not be empty, may not
    /// use reserved names, and every nonterminal must be defined by a
    /// production or the lexicon.
    pub fn new(
        start: &str,
        productions: Vec<Production>,
        lexicon: Vec<LexicalEntry>,
    ) -> Result<Grammar, GrammarError> {
        let g = Grammar {
            start: start.to_string(),
            productions,
            lexicon,
        };
        g.validate()?;
        Ok(g)
    }

    /// Assembles a grammar without validation. Used for transformed
    /// grammars, which may use reserved names or leave the start symbol
    /// without rules.
    pub(crate) fn from_parts_unchecked(
        start: &str,
        productions: Vec<Production>,
        lexicon: Vec<LexicalEntry>,
    ) -> Grammar {
        Grammar {
            start: start.to_string(),
            productions,
            lexicon,
        }
    }

    fn validate(&self) -> Result<(), GrammarError> {
        let defined = self.defined_symbols();
        for p in &self.productions {
            if p.rhs.is_empty() {
                return Err(GrammarError::EpsilonProduction {
                    line: p.line,
                    lhs: p.lhs.clone(),
                });
            }
            let names = std::iter::once(p.lhs.as_str())
                .chain(p.rhs.iter().filter(|s| !s.is_terminal()).map(Symbol::name));
            for n in names {
                if n.starts_with(RESERVED_PREFIX) {
                    return Err(GrammarError::SyntaxError {
                        line: p.line,
                        column: 1,
                        message: format!("`{n}` uses the reserved prefix `{RESERVED_PREFIX}`"),
                    });
                }
                if !defined.contains(n) {
                    return Err(GrammarError::UndefinedSymbol {
                        line: p.line,
                        symbol: n.to_string(),
                    });
                }
            }
            for c in &p.constraints {
                let bad = if !p.path_fits(&c.left) {
                    Some(&c.left)
                } else if let ConstraintValue::Path(r) = &c.right {
                    (!p.path_fits(r)).then_some(r)
                } else {
                    None
                };
                if let Some(path) = bad {
                    return Err(GrammarError::BadConstraintPath {
                        line: p.line,
                        path: path.to_string(),
                    });
                }
            }
        }
        for e in &self.lexicon {
            if e.word.is_empty() || e.category.is_empty() {
                return Err(GrammarError::SyntaxError {
                    line: e.line,
                    column: 1,
                    message: "lexical entry needs a word and a category".into(),
                });
            }
            if e.category.starts_with(RESERVED_PREFIX) {
                return Err(GrammarError::SyntaxError {
                    line: e.line,
                    column: 1,
                    message: format!("`{}` uses the reserved prefix", e.category),
                });
            }
        }
        if !defined.contains(self.start.as_str()) {
            return Err(GrammarError::UndefinedSymbol {
                line: 0,
                symbol: self.start.clone(),
            });
        }
        Ok(())
    }

    fn defined_symbols(&self) -> BTreeSet<&str> {
        self.productions
            .iter()
            .map(|p| p.lhs.as_str())
            .chain(self.lexicon.iter().map(|e| e.category.as_str()))
            .collect()
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn lexicon(&self) -> &[LexicalEntry] {
        &self.lexicon
    }

    /// Lexicon entries whose word matches `token`, in file order.
    pub fn lexical_entries(&self, token: &str) -> impl Iterator<Item = (usize, &LexicalEntry)> {
        let token = token.to_string();
        self.lexicon
            .iter()
            .enumerate()
            .filter(move |(_, e)| token_matches(&e.word, &token))
    }

    pub fn terminals(&self) -> BTreeSet<&str> {
        self.productions
            .iter()
            .flat_map(|p| p.rhs.iter())
            .filter(|s| s.is_terminal())
            .map(Symbol::name)
            .chain(self.lexicon.iter().map(|e| e.word.as_str()))
            .collect()
    }

    pub fn nonterminals(&self) -> BTreeSet<&str> {
        self.defined_symbols()
    }

    /// Whether `token` can be consumed by any lexicon entry or terminal.
    pub fn knows_token(&self, token: &str) -> bool {
        self.terminals().iter().any(|w| token_matches(w, token))
    }

    /// Round-trippable text form.
    pub fn to_text(&self) -> String {
        let mut out = format!("%start {}\n", self.start);
        for p in &self.productions {
            out.push_str(&format!("{p}\n"));
        }
        for e in &self.lexicon {
            out.push_str(&format!("{e}\n"));
        }
        out
    }
}

/// Error from applying a production's equations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApplyError {
    #[error(transparent)]
    Arity(#[from] GrammarError),
    #[error("{0}")]
    Conflict(UnifyFailureError),
}

/// [`UnifyFailure`] as an error value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct UnifyFailureError(pub UnifyFailure);

impl ApplyError {
    pub fn conflict(&self) -> Option<&UnifyFailure> {
        match self {
            ApplyError::Conflict(UnifyFailureError(f)) => Some(f),
            ApplyError::Arity(_) => None,
        }
    }
}

/// Runs the equations of `p` over its children's structures until nothing
/// changes and returns the resulting left-hand structure. Equations only
/// add information, so the loop terminates.
pub fn apply_production(
    p: &Production,
    children: &[FeatureStructure],
) -> Result<FeatureStructure, ApplyError> {
    if children.len() != p.rhs.len() {
        return Err(GrammarError::ArityMismatch {
            expected: p.rhs.len(),
            found: children.len(),
        }
        .into());
    }
    let mut nodes: Vec<FeatureStructure> = std::iter::once(FeatureStructure::new())
        .chain(children.iter().cloned())
        .collect();
    let index = |node: PathNode| match node {
        PathNode::Lhs => 0,
        PathNode::Rhs(i) => i,
    };
    let conflict = |f: UnifyFailure| ApplyError::Conflict(UnifyFailureError(f));
    loop {
        let mut changed = false;
        for c in &p.constraints {
            let left = resolve(&nodes[index(c.left.node)], &c.left.features).map_err(conflict)?;
            let right = match &c.right {
                ConstraintValue::Atom(a) => Some(FValue::Atom(a.clone())),
                ConstraintValue::Path(r) => {
                    resolve(&nodes[index(r.node)], &r.features).map_err(conflict)?
                }
            };
            let value = match (left, right) {
                (None, None) => continue,
                (Some(v), None) | (None, Some(v)) => v,
                (Some(a), Some(b)) => unify_values(&a, &b).map_err(|f| {
                    let mut path = c.left.features.clone();
                    path.extend(f.path);
                    conflict(UnifyFailure { path, ..f })
                })?,
            };
            changed |= nodes[index(c.left.node)]
                .unify_at(&c.left.features, &value)
                .map_err(conflict)?;
            if let ConstraintValue::Path(r) = &c.right {
                changed |= nodes[index(r.node)]
                    .unify_at(&r.features, &value)
                    .map_err(conflict)?;
            }
        }
        if !changed {
            return Ok(nodes.swap_remove(0));
        }
    }
}

fn resolve(fs: &FeatureStructure, path: &[String]) -> Result<Option<FValue>, UnifyFailure> {
    if path.is_empty() {
        return Ok(Some(FValue::Fs(fs.clone())));
    }
    fs.at_path(path).map(|v| v.cloned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(s: &str) -> FeatureStructure {
        s.parse().unwrap()
    }

    fn agreement_rule() -> Production {
        let g = load_grammar(
            "S -> NP VP { <rhs1 NUMBER> = <rhs2 NUMBER> ; <lhs NUMBER> = <rhs1 NUMBER> }\n\
             x : NP\ny : VP\n",
        )
        .unwrap();
        g.productions()[0].clone()
    }

    #[test]
    fn agreement_succeeds_and_fails() {
        let p = agreement_rule();
        assert_eq!(
            apply_production(&p, &[fs("[NUMBER=SG]"), fs("[NUMBER=SG]")]).unwrap(),
            fs("[NUMBER=SG]")
        );
        let err = apply_production(&p, &[fs("[NUMBER=SG]"), fs("[NUMBER=PL]")]).unwrap_err();
        assert_eq!(err.conflict().unwrap().path, ["NUMBER"]);
    }

    #[test]
    fn propagates_to_fixpoint() {
        // The lhs equation comes first but needs the second to fire.
        let g =
            load_grammar("S -> A B { <lhs N> = <rhs1 N> ; <rhs1 N> = <rhs2 N> }\na : A\nb : B\n")
                .unwrap();
        let p = &g.productions()[0];
        assert_eq!(
            apply_production(p, &[fs("[]"), fs("[N=PL]")]).unwrap(),
            fs("[N=PL]")
        );
    }

    #[test]
    fn no_constraints_gives_empty() {
        let p = Production::new("S", vec![Symbol::nt("A")]);
        assert_eq!(
            apply_production(&p, &[fs("[X=1]")]).unwrap(),
            FeatureStructure::new()
        );
        assert!(matches!(
            apply_production(&p, &[]),
            Err(ApplyError::Arity(GrammarError::ArityMismatch {
                expected: 1,
                found: 0
            }))
        ));
    }

    #[test]
    fn atom_equations_and_whole_node_paths() {
        let g = load_grammar("S -> A { <rhs1 CASE> = NOM ; <lhs> = <rhs1> }\na : A\n").unwrap();
        let p = &g.productions()[0];
        assert_eq!(
            apply_production(p, &[fs("[N=SG]")]).unwrap(),
            fs("[CASE=NOM, N=SG]")
        );
        assert!(apply_production(p, &[fs("[CASE=ACC]")]).is_err());
    }

    #[test]
    fn token_matching() {
        assert!(token_matches("the", "The"));
        assert!(token_matches("John", "John"));
        assert!(!token_matches("John", "john"));
        assert!(!token_matches("the", "then"));
    }
}
