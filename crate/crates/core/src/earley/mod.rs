//! Earley chart parsing with shared backpointers, tree extraction under
//! feature constraints, and a CNF/CYK recognizer used as an oracle.
//!
//! Lexicon entries behave like preterminal rules `Category -> word`. The
//! chart is built one token at a time, so callers that explore many inputs
//! with common prefixes can [`Chart::push`] and [`Chart::truncate`] instead
//! of reparsing.

mod cnf;
mod tree;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use thiserror::Error;

use crate::grammar::{token_matches, Grammar, Symbol};

pub use cnf::{cyk_recognize, is_cnf, to_cnf, CykTable};
pub use tree::{extract_trees, ParseTree, TreeChild, DEFAULT_ITEM_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EarleyError {
    #[error("unknown token `{token}` at position {position}")]
    UnknownToken { token: String, position: usize },
    #[error("no input tokens")]
    EmptyInput,
    #[error("grammar is not in Chomsky normal form: {0}")]
    NotCnf(String),
}

/// A grammar rule as seen by the chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleRef {
    Production(usize),
    Lexical(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId {
    pub set: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Child {
    Item(ItemId),
    Token(usize),
}

/// How an item was reached: the item one dot position back (absent when
/// that was the freshly predicted item) and what was consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link {
    pub prev: Option<ItemId>,
    pub child: Child,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub rule: RuleRef,
    pub dot: usize,
    pub origin: usize,
    pub links: Vec<Link>,
}

#[derive(Debug, Clone, Default)]
struct ItemSet<'g> {
    items: Vec<Item>,
    index: HashMap<(RuleRef, usize, usize), usize>,
    /// Items whose next symbol is the given nonterminal.
    waiting: HashMap<&'g str, Vec<usize>>,
    /// Items whose next symbol is a terminal.
    scanning: Vec<usize>,
    predicted: HashSet<&'g str>,
}

/// Rule lookup tables shared by every chart over one grammar.
#[derive(Debug, Clone)]
pub struct Prepared<'g> {
    grammar: &'g Grammar,
    by_lhs: HashMap<&'g str, Vec<usize>>,
    by_category: HashMap<&'g str, Vec<usize>>,
}

impl<'g> Prepared<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        let mut by_lhs: HashMap<&str, Vec<usize>> = HashMap::default();
        for (i, p) in grammar.productions().iter().enumerate() {
            by_lhs.entry(p.lhs.as_str()).or_default().push(i);
        }
        let mut by_category: HashMap<&str, Vec<usize>> = HashMap::default();
        for (i, e) in grammar.lexicon().iter().enumerate() {
            by_category.entry(e.category.as_str()).or_default().push(i);
        }
        Prepared {
            grammar,
            by_lhs,
            by_category,
        }
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    pub fn lhs(&self, rule: RuleRef) -> &'g str {
        match rule {
            RuleRef::Production(p) => &self.grammar.productions()[p].lhs,
            RuleRef::Lexical(e) => &self.grammar.lexicon()[e].category,
        }
    }

    /// Right-hand side length; lexical rules have one symbol.
    pub fn rhs_len(&self, rule: RuleRef) -> usize {
        match rule {
            RuleRef::Production(p) => self.grammar.productions()[p].rhs.len(),
            RuleRef::Lexical(_) => 1,
        }
    }

    fn next_symbol(&self, rule: RuleRef, dot: usize) -> Option<&'g Symbol> {
        match rule {
            RuleRef::Production(p) => self.grammar.productions()[p].rhs.get(dot),
            RuleRef::Lexical(_) => None,
        }
    }
}

/// The chart for a token sequence: one item set per input position.
#[derive(Debug, Clone)]
pub struct Chart<'g> {
    prep: Prepared<'g>,
    tokens: Vec<String>,
    sets: Vec<ItemSet<'g>>,
}

impl<'g> Chart<'g> {
    /// An empty chart with the start symbol predicted at position 0.
    pub fn new(grammar: &'g Grammar) -> Self {
        let mut chart = Chart {
            prep: Prepared::new(grammar),
            tokens: Vec::new(),
            sets: vec![ItemSet::default()],
        };
        chart.predict(0, grammar.start());
        chart.process(0);
        chart
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.prep.grammar
    }

    pub fn prepared(&self) -> &Prepared<'g> {
        &self.prep
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.sets[id.set].items[id.index]
    }

    pub fn set(&self, k: usize) -> &[Item] {
        &self.sets[k].items
    }

    pub fn item_count(&self) -> usize {
        self.sets.iter().map(|s| s.items.len()).sum()
    }

    /// Adds `rule` at `dot` from `origin` to set `k`, or records another
    /// link on the existing item. Returns the item's index.
    fn add(
        &mut self,
        k: usize,
        rule: RuleRef,
        dot: usize,
        origin: usize,
        link: Option<Link>,
    ) -> usize {
        let set = &mut self.sets[k];
        if let Some(&i) = set.index.get(&(rule, dot, origin)) {
            if let Some(l) = link {
                if !set.items[i].links.contains(&l) {
                    set.items[i].links.push(l);
                }
            }
            return i;
        }
        let i = set.items.len();
        set.items.push(Item {
            rule,
            dot,
            origin,
            links: link.into_iter().collect(),
        });
        set.index.insert((rule, dot, origin), i);
        match self.prep.next_symbol(rule, dot) {
            Some(Symbol::NonTerminal(x)) => set.waiting.entry(x.as_str()).or_default().push(i),
            Some(Symbol::Terminal(_)) => set.scanning.push(i),
            None => {}
        }
        i
    }

    fn predict(&mut self, k: usize, x: &'g str) {
        if !self.sets[k].predicted.insert(x) {
            return;
        }
        // Borrow the rule list out of the table while items are added.
        let Some(ps) = self.prep.by_lhs.get_mut(x).map(std::mem::take) else {
            return;
        };
        for &p in &ps {
            self.add(k, RuleRef::Production(p), 0, k, None);
        }
        self.prep.by_lhs.insert(x, ps);
    }

    /// Predictor/completer closure over set `k`.
    fn process(&mut self, k: usize) {
        let mut i = 0;
        while i < self.sets[k].items.len() {
            let Item {
                rule, dot, origin, ..
            } = self.sets[k].items[i];
            let id = ItemId { set: k, index: i };
            match self.prep.next_symbol(rule, dot) {
                Some(Symbol::NonTerminal(x)) => self.predict(k, x),
                Some(Symbol::Terminal(_)) => {}
                None if dot == self.prep.rhs_len(rule) => {
                    let lhs = self.prep.lhs(rule);
                    // Completing into another set leaves the origin's list
                    // untouched, so it can be moved out instead of copied.
                    let waiting = if origin == k {
                        self.sets[origin].waiting.get(lhs).cloned()
                    } else {
                        self.sets[origin].waiting.get_mut(lhs).map(std::mem::take)
                    };
                    let Some(waiting) = waiting else {
                        i += 1;
                        continue;
                    };
                    for &w in &waiting {
                        let b = &self.sets[origin].items[w];
                        let (brule, bdot, borigin) = (b.rule, b.dot, b.origin);
                        let prev = (bdot > 0).then_some(ItemId {
                            set: origin,
                            index: w,
                        });
                        self.add(
                            k,
                            brule,
                            bdot + 1,
                            borigin,
                            Some(Link {
                                prev,
                                child: Child::Item(id),
                            }),
                        );
                    }
                    if origin != k {
                        self.sets[origin].waiting.insert(lhs, waiting);
                    }
                }
                None => {}
            }
            i += 1;
        }
    }

    /// Scans the next token and closes the new item set.
    pub fn push(&mut self, token: &str) {
        let k = self.tokens.len();
        self.tokens.push(token.to_string());
        self.sets.push(ItemSet::default());
        let scanning = self.sets[k].scanning.clone();
        for i in scanning {
            let item = &self.sets[k].items[i];
            let (rule, dot, origin) = (item.rule, item.dot, item.origin);
            if let Some(Symbol::Terminal(t)) = self.prep.next_symbol(rule, dot) {
                if token_matches(t, token) {
                    let prev = (dot > 0).then_some(ItemId { set: k, index: i });
                    self.add(
                        k + 1,
                        rule,
                        dot + 1,
                        origin,
                        Some(Link {
                            prev,
                            child: Child::Token(k),
                        }),
                    );
                }
            }
        }
        // Lexical rules for every category predicted here, in lexicon order.
        let mut entries: Vec<usize> = self.sets[k]
            .predicted
            .iter()
            .filter_map(|x| self.prep.by_category.get(x))
            .flatten()
            .copied()
            .filter(|&e| token_matches(&self.prep.grammar.lexicon()[e].word, token))
            .collect();
        entries.sort_unstable();
        for e in entries {
            self.add(
                k + 1,
                RuleRef::Lexical(e),
                1,
                k,
                Some(Link {
                    prev: None,
                    child: Child::Token(k),
                }),
            );
        }
        self.process(k + 1);
    }

    /// Drops everything after the first `len` tokens.
    pub fn truncate(&mut self, len: usize) {
        if len < self.tokens.len() {
            self.tokens.truncate(len);
            self.sets.truncate(len + 1);
        }
    }

    /// Complete start-symbol items spanning the whole input, in insertion
    /// order.
    pub fn roots(&self) -> Vec<ItemId> {
        let n = self.tokens.len();
        if n == 0 {
            return vec![];
        }
        let start = self.prep.grammar.start();
        self.sets[n]
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| {
                it.origin == 0
                    && it.dot == self.prep.rhs_len(it.rule)
                    && self.prep.lhs(it.rule) == start
            })
            .map(|(index, _)| ItemId { set: n, index })
            .collect()
    }

    pub fn accepted(&self) -> bool {
        !self.roots().is_empty()
    }
}

/// Parses `tokens`, rejecting empty input and tokens the grammar cannot
/// consume.
pub fn earley_parse<'g, S: AsRef<str>>(
    g: &'g Grammar,
    tokens: &[S],
) -> Result<Chart<'g>, EarleyError> {
    if tokens.is_empty() {
        return Err(EarleyError::EmptyInput);
    }
    for (position, t) in tokens.iter().enumerate() {
        if !g.knows_token(t.as_ref()) {
            return Err(EarleyError::UnknownToken {
                token: t.as_ref().to_string(),
                position,
            });
        }
    }
    let mut chart = Chart::new(g);
    for t in tokens {
        chart.push(t.as_ref());
    }
    Ok(chart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::load_grammar;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn air_grammar() {
        let g = load_grammar(include_str!("../../data/air.gr")).unwrap();
        assert!(earley_parse(&g, &words("I want a morning flight"))
            .unwrap()
            .accepted());
        assert!(!earley_parse(&g, &words("flight a want"))
            .unwrap()
            .accepted());
        assert_eq!(
            earley_parse(&g, &words("I want a zeppelin")).unwrap_err(),
            EarleyError::UnknownToken {
                token: "zeppelin".into(),
                position: 3
            }
        );
        assert_eq!(
            earley_parse(&g, &words("")).unwrap_err(),
            EarleyError::EmptyInput
        );
    }

    #[test]
    fn left_recursion_terminates() {
        let g = load_grammar("A -> A 'a' | 'a'\n").unwrap();
        for n in 1..6 {
            let input = vec!["a"; n];
            assert!(earley_parse(&g, &input).unwrap().accepted());
        }
    }

    #[test]
    fn unit_cycles_terminate() {
        let g = load_grammar("S -> T | 'x'\nT -> S\n").unwrap();
        let chart = earley_parse(&g, &["x"]).unwrap();
        assert!(chart.accepted());
    }

    #[test]
    fn incremental_matches_fresh() {
        let g = load_grammar(include_str!("../../data/air.gr")).unwrap();
        let mut chart = Chart::new(&g);
        for t in words("I want a morning flight") {
            chart.push(t);
        }
        assert!(chart.accepted());
        chart.truncate(2);
        assert!(chart.accepted(), "`I want` is a sentence");
        chart.push("flight");
        assert!(!chart.accepted());
        chart.truncate(2);
        for t in words("a morning flight") {
            chart.push(t);
        }
        let fresh = earley_parse(&g, &words("I want a morning flight")).unwrap();
        assert_eq!(chart.item_count(), fresh.item_count());
    }

    #[test]
    fn case_folding() {
        let g = load_grammar(include_str!("../../data/agreement.gr")).unwrap();
        assert!(earley_parse(&g, &words("The ball rolls"))
            .unwrap()
            .accepted());
    }
}
