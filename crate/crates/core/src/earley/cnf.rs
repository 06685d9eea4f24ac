//! Chomsky normal form conversion and CYK recognition.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::EarleyError;
use crate::grammar::{token_matches, Grammar, Production, Symbol, RESERVED_PREFIX};

/// Weakly equivalent grammar with only `A -> B C` and `A -> 'w'` rules.
/// Lexicon entries become terminal rules; equations and attachments are
/// dropped. Fresh nonterminals use the reserved prefix.
pub fn to_cnf(g: &Grammar) -> Grammar {
    let mut rules: Vec<(String, Vec<Symbol>)> = g
        .productions()
        .iter()
        .map(|p| (p.lhs.clone(), p.rhs.clone()))
        .chain(
            g.lexicon()
                .iter()
                .map(|e| (e.category.clone(), vec![Symbol::Terminal(e.word.clone())])),
        )
        .collect();

    // Lift terminals out of long rules.
    let mut lifted: BTreeMap<String, String> = BTreeMap::new();
    let mut extra = Vec::new();
    for (_, rhs) in rules.iter_mut().filter(|(_, rhs)| rhs.len() > 1) {
        for sym in rhs.iter_mut() {
            if let Symbol::Terminal(t) = sym {
                let next = lifted.len();
                let name = lifted
                    .entry(t.clone())
                    .or_insert_with(|| {
                        let name = format!("{RESERVED_PREFIX}t{next}");
                        extra.push((name.clone(), vec![Symbol::Terminal(t.clone())]));
                        name
                    })
                    .clone();
                *sym = Symbol::NonTerminal(name);
            }
        }
    }
    rules.extend(extra);

    // Binarize.
    let mut binary = Vec::new();
    let mut fresh = 0;
    for (lhs, rhs) in rules {
        if rhs.len() <= 2 {
            binary.push((lhs, rhs));
            continue;
        }
        let mut head = lhs;
        let mut rest = &rhs[..];
        while rest.len() > 2 {
            let name = format!("{RESERVED_PREFIX}b{fresh}");
            fresh += 1;
            binary.push((
                head,
                vec![rest[0].clone(), Symbol::NonTerminal(name.clone())],
            ));
            head = name;
            rest = &rest[1..];
        }
        binary.push((head, rest.to_vec()));
    }

    // Eliminate unit rules through their closure.
    let is_unit = |rhs: &[Symbol]| rhs.len() == 1 && !rhs[0].is_terminal();
    let mut unit_edges: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (lhs, rhs) in &binary {
        if is_unit(rhs) {
            unit_edges.entry(lhs).or_default().insert(rhs[0].name());
        }
    }
    let lhs_order: Vec<&str> = {
        let mut seen = BTreeSet::new();
        binary
            .iter()
            .map(|(l, _)| l.as_str())
            .filter(|l| seen.insert(*l))
            .collect()
    };
    let mut out: Vec<(String, Vec<Symbol>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for a in &lhs_order {
        let mut reach = vec![*a];
        let mut set: BTreeSet<&str> = [*a].into();
        let mut i = 0;
        while i < reach.len() {
            for b in unit_edges.get(reach[i]).into_iter().flatten() {
                if set.insert(b) {
                    reach.push(b);
                }
            }
            i += 1;
        }
        for b in reach {
            for (lhs, rhs) in &binary {
                if lhs == b && !is_unit(rhs) && seen.insert((a.to_string(), rhs.clone())) {
                    out.push((a.to_string(), rhs.clone()));
                }
            }
        }
    }

    // Drop rules that mention nonterminals left without rules.
    loop {
        let defined: BTreeSet<&str> = out.iter().map(|(l, _)| l.as_str()).collect();
        let keep: Vec<bool> = out
            .iter()
            .map(|(_, rhs)| {
                rhs.iter()
                    .all(|s| s.is_terminal() || defined.contains(s.name()))
            })
            .collect();
        if keep.iter().all(|k| *k) {
            break;
        }
        let mut k = keep.into_iter();
        out.retain(|_| k.next().unwrap());
    }

    let productions = out
        .into_iter()
        .map(|(lhs, rhs)| Production::new(&lhs, rhs))
        .collect();
    Grammar::from_parts_unchecked(g.start(), productions, vec![])
}

/// Checks the CNF shape; lexicon entries count as terminal rules.
pub fn is_cnf(g: &Grammar) -> Result<(), EarleyError> {
    for p in g.productions() {
        let ok = matches!(
            p.rhs.as_slice(),
            [Symbol::Terminal(_)] | [Symbol::NonTerminal(_), Symbol::NonTerminal(_)]
        );
        if !ok {
            return Err(EarleyError::NotCnf(p.signature()));
        }
    }
    Ok(())
}

/// Incremental CYK table: `cols[e][i]` holds the nonterminals deriving
/// tokens `i..e`.
#[derive(Debug, Clone)]
pub struct CykTable<'g> {
    grammar: &'g Grammar,
    ids: HashMap<&'g str, usize>,
    words: usize,
    terminal_rules: Vec<(&'g str, usize)>,
    binary_rules: Vec<(usize, usize, usize)>,
    start: Option<usize>,
    cols: Vec<Vec<Vec<u64>>>,
}

impl<'g> CykTable<'g> {
    pub fn new(g: &'g Grammar) -> Result<Self, EarleyError> {
        is_cnf(g)?;
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let names = g
            .productions()
            .iter()
            .map(|p| p.lhs.as_str())
            .chain(g.lexicon().iter().map(|e| e.category.as_str()))
            .chain(std::iter::once(g.start()));
        for n in names {
            let next = ids.len();
            ids.entry(n).or_insert(next);
        }
        let mut terminal_rules = Vec::new();
        let mut binary_rules = Vec::new();
        for p in g.productions() {
            let a = ids[p.lhs.as_str()];
            match p.rhs.as_slice() {
                [Symbol::Terminal(t)] => terminal_rules.push((t.as_str(), a)),
                [b, c] => {
                    if let (Some(&b), Some(&c)) = (ids.get(b.name()), ids.get(c.name())) {
                        binary_rules.push((a, b, c));
                    }
                }
                _ => unreachable!("checked by is_cnf"),
            }
        }
        for e in g.lexicon() {
            terminal_rules.push((e.word.as_str(), ids[e.category.as_str()]));
        }
        let words = ids.len().div_ceil(64).max(1);
        Ok(CykTable {
            grammar: g,
            start: ids.get(g.start()).copied(),
            ids,
            words,
            terminal_rules,
            binary_rules,
            cols: vec![vec![]],
        })
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    fn has(set: &[u64], i: usize) -> bool {
        set[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.cols.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, token: &str) {
        let e = self.cols.len();
        let mut col = vec![vec![0u64; self.words]; e];
        for &(t, a) in &self.terminal_rules {
            if token_matches(t, token) {
                col[e - 1][a / 64] |= 1 << (a % 64);
            }
        }
        for i in (0..e - 1).rev() {
            for k in i + 1..e {
                let (lo, hi) = col.split_at_mut(k);
                let (left, right, cell) = (&self.cols[k][i], &hi[0], &mut lo[i]);
                if left.iter().all(|&w| w == 0) || right.iter().all(|&w| w == 0) {
                    continue;
                }
                for &(a, b, c) in &self.binary_rules {
                    if Self::has(left, b) && Self::has(right, c) {
                        cell[a / 64] |= 1 << (a % 64);
                    }
                }
            }
        }
        self.cols.push(col);
    }

    pub fn truncate(&mut self, len: usize) {
        self.cols.truncate(len + 1);
    }

    pub fn accepted(&self) -> bool {
        let n = self.len();
        n > 0 && self.start.is_some_and(|s| Self::has(&self.cols[n][0], s))
    }

    /// Nonterminals spanning `i..e`.
    pub fn span(&self, i: usize, e: usize) -> BTreeSet<&'g str> {
        self.ids
            .iter()
            .filter(|(_, &id)| Self::has(&self.cols[e][i], id))
            .map(|(n, _)| *n)
            .collect()
    }
}

/// Bottom-up recognition with a CNF grammar.
pub fn cyk_recognize<S: AsRef<str>>(g: &Grammar, tokens: &[S]) -> Result<bool, EarleyError> {
    let mut table = CykTable::new(g)?;
    for t in tokens {
        table.push(t.as_ref());
    }
    Ok(table.accepted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earley::earley_parse;
    use crate::grammar::load_grammar;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn air_grammar_cnf() {
        let g = load_grammar(include_str!("../../data/air.gr")).unwrap();
        let c = to_cnf(&g);
        is_cnf(&c).unwrap();
        assert!(c.lexicon().is_empty());
        assert_eq!(
            cyk_recognize(&c, &words("I want a morning flight")),
            Ok(true)
        );
        assert_eq!(cyk_recognize(&c, &words("flight a want")), Ok(false));
        assert_eq!(cyk_recognize(&c, &words("zeppelin")), Ok(false));
        assert!(matches!(
            cyk_recognize(&g, &words("I")),
            Err(EarleyError::NotCnf(_))
        ));
    }

    #[test]
    fn binary_rule_unchanged() {
        let g = load_grammar("S -> NP VP\nI : NP\nran : VP\n").unwrap();
        let c = to_cnf(&g);
        let sigs: Vec<String> = c.productions().iter().map(|p| p.signature()).collect();
        assert_eq!(sigs, ["S -> NP VP", "NP -> 'I'", "VP -> 'ran'"]);
    }

    #[test]
    fn long_rule_gets_one_fresh_symbol() {
        let g = load_grammar("VP -> Verb NP PP\nsaw : Verb\nme : NP\nhere : PP\n").unwrap();
        let c = to_cnf(&g);
        let sigs: Vec<String> = c.productions().iter().map(|p| p.signature()).collect();
        assert_eq!(
            sigs,
            [
                "VP -> Verb _cnf_b0",
                "_cnf_b0 -> NP PP",
                "Verb -> 'saw'",
                "NP -> 'me'",
                "PP -> 'here'"
            ]
        );
    }

    #[test]
    fn terminals_lifted_and_units_removed() {
        let g = load_grammar("S -> 'a' S 'b' | T\nT -> 'c' | U\nU -> 'd' 'd'\n").unwrap();
        let c = to_cnf(&g);
        is_cnf(&c).unwrap();
        for s in ["c", "d d", "a c b", "a a d d b b"] {
            assert_eq!(cyk_recognize(&c, &words(s)), Ok(true), "{s}");
            assert!(earley_parse(&g, &words(s)).unwrap().accepted(), "{s}");
        }
        for s in ["a b", "a c", "d"] {
            assert_eq!(cyk_recognize(&c, &words(s)), Ok(false), "{s}");
        }
    }

    #[test]
    fn unit_cycle_without_base() {
        let g = load_grammar("S -> A 'x' | 'y'\nA -> B\nB -> A\n").unwrap();
        let c = to_cnf(&g);
        assert_eq!(cyk_recognize(&c, &["y"]), Ok(true));
        assert_eq!(cyk_recognize(&c, &["x"]), Ok(false));
    }
}
