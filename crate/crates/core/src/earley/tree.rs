//! Parse-tree extraction from a chart, filtered by feature constraints.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{Chart, Child, ItemId, RuleRef};
use crate::grammar::{apply_production, FeatureStructure};
use crate::semantics::Expr;

/// Per-item bound on enumerated alternatives. Keeps extraction finite on
/// cyclic or highly ambiguous grammars.
pub const DEFAULT_ITEM_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeChild {
    Node(ParseTree),
    Leaf(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<TreeChild>,
    pub features: FeatureStructure,
    /// Filled in by semantic composition.
    pub semantics: Option<Expr>,
    pub rule: RuleRef,
}

impl Serialize for TreeChild {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TreeChild::Node(t) => t.serialize(s),
            TreeChild::Leaf(w) => s.serialize_str(w),
        }
    }
}

impl Serialize for ParseTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("label", &self.label)?;
        m.serialize_entry("children", &self.children)?;
        m.serialize_entry("features", &self.features)?;
        if let Some(e) = &self.semantics {
            m.serialize_entry("semantics", &e.to_sexpr())?;
        }
        m.end()
    }
}

impl ParseTree {
    /// Tokens at the leaves, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        for c in &self.children {
            match c {
                TreeChild::Node(t) => t.collect_leaves(out),
                TreeChild::Leaf(w) => out.push(w),
            }
        }
    }

    /// Bracketed form, e.g. `(S (NP (Pronoun I)) (VP (Verb want)))`.
    pub fn to_sexpr(&self) -> String {
        let mut out = format!("({}", self.label);
        for c in &self.children {
            out.push(' ');
            match c {
                TreeChild::Node(t) => out.push_str(&t.to_sexpr()),
                TreeChild::Leaf(w) => out.push_str(w),
            }
        }
        out.push(')');
        out
    }

    pub fn subtrees(&self) -> impl Iterator<Item = &ParseTree> {
        self.children.iter().filter_map(|c| match c {
            TreeChild::Node(t) => Some(t),
            TreeChild::Leaf(_) => None,
        })
    }
}

type Seq = Vec<TreeChild>;

struct Extractor<'c, 'g> {
    chart: &'c Chart<'g>,
    cap: usize,
    trees: HashMap<ItemId, Rc<Vec<ParseTree>>>,
    seqs: HashMap<ItemId, Rc<Vec<Seq>>>,
    active: HashSet<ItemId>,
    /// Set when a cycle was cut; results computed meanwhile may be partial
    /// and are not memoized.
    cut: bool,
}

impl Extractor<'_, '_> {
    fn child_trees(&mut self, child: Child) -> Rc<Vec<TreeChild>> {
        match child {
            Child::Token(j) => Rc::new(vec![TreeChild::Leaf(self.chart.tokens()[j].clone())]),
            Child::Item(id) => Rc::new(
                self.trees(id)
                    .iter()
                    .cloned()
                    .map(TreeChild::Node)
                    .collect(),
            ),
        }
    }

    /// Children sequences for the consumed part of item `id`.
    fn seqs(&mut self, id: ItemId) -> Rc<Vec<Seq>> {
        if let Some(s) = self.seqs.get(&id) {
            return s.clone();
        }
        let was_cut = std::mem::replace(&mut self.cut, false);
        let mut out = Vec::new();
        let links = self.chart.item(id).links.clone();
        'links: for link in links {
            let left = match link.prev {
                None => Rc::new(vec![Vec::new()]),
                Some(p) => self.seqs(p),
            };
            if left.is_empty() {
                continue;
            }
            let right = self.child_trees(link.child);
            for l in left.iter() {
                for r in right.iter() {
                    let mut s = l.clone();
                    s.push(r.clone());
                    out.push(s);
                    if out.len() >= self.cap {
                        break 'links;
                    }
                }
            }
        }
        let out = Rc::new(out);
        if !self.cut {
            self.seqs.insert(id, out.clone());
        }
        self.cut |= was_cut;
        out
    }

    /// Feature-consistent trees for the complete item `id`.
    fn trees(&mut self, id: ItemId) -> Rc<Vec<ParseTree>> {
        if let Some(t) = self.trees.get(&id) {
            return t.clone();
        }
        if !self.active.insert(id) {
            self.cut = true;
            return Rc::new(vec![]);
        }
        let was_cut = std::mem::replace(&mut self.cut, false);
        let g = self.chart.grammar();
        let item = self.chart.item(id);
        let rule = item.rule;
        let out = match rule {
            RuleRef::Lexical(e) => {
                let entry = &g.lexicon()[e];
                let token = self.chart.tokens()[item.origin].clone();
                vec![ParseTree {
                    label: entry.category.clone(),
                    children: vec![TreeChild::Leaf(token)],
                    features: entry.features.clone(),
                    semantics: None,
                    rule,
                }]
            }
            RuleRef::Production(p) => {
                let prod = &g.productions()[p];
                let mut out = Vec::new();
                for seq in self.seqs(id).iter() {
                    let child_fs: Vec<FeatureStructure> = seq
                        .iter()
                        .map(|c| match c {
                            TreeChild::Node(t) => t.features.clone(),
                            TreeChild::Leaf(_) => FeatureStructure::new(),
                        })
                        .collect();
                    if let Ok(features) = apply_production(prod, &child_fs) {
                        out.push(ParseTree {
                            label: prod.lhs.clone(),
                            children: seq.clone(),
                            features,
                            semantics: None,
                            rule,
                        });
                        if out.len() >= self.cap {
                            break;
                        }
                    }
                }
                out
            }
        };
        self.active.remove(&id);
        let out = Rc::new(out);
        if !self.cut {
            self.trees.insert(id, out.clone());
        }
        self.cut |= was_cut;
        out
    }
}

/// Up to `limit` full parses, in backpointer order, whose feature
/// equations all succeed.
pub fn extract_trees(chart: &Chart, limit: usize) -> Vec<ParseTree> {
    extract_trees_with_cap(chart, limit, DEFAULT_ITEM_CAP)
}

pub fn extract_trees_with_cap(chart: &Chart, limit: usize, cap: usize) -> Vec<ParseTree> {
    let mut ex = Extractor {
        chart,
        cap: cap.max(limit),
        trees: HashMap::new(),
        seqs: HashMap::new(),
        active: HashSet::new(),
        cut: false,
    };
    let mut out = Vec::new();
    for root in chart.roots() {
        for t in ex.trees(root).iter() {
            if out.len() >= limit {
                return out;
            }
            out.push(t.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earley::earley_parse;
    use crate::grammar::load_grammar;

    fn parse(grammar: &str, input: &str, limit: usize) -> Vec<ParseTree> {
        let g = load_grammar(grammar).unwrap();
        let toks: Vec<&str> = input.split_whitespace().collect();
        let chart = earley_parse(&g, &toks).unwrap();
        extract_trees(&chart, limit)
    }

    #[test]
    fn morning_flight() {
        let trees = parse(
            include_str!("../../data/air.gr"),
            "I want a morning flight",
            10,
        );
        assert_eq!(trees.len(), 1);
        assert_eq!(
            trees[0].to_sexpr(),
            "(S (NP (Pronoun I)) (VP (Verb want) (NP (Det a) (Nominal (Noun morning) (Nominal (Noun flight))))))"
        );
        assert_eq!(trees[0].leaves(), ["I", "want", "a", "morning", "flight"]);
    }

    #[test]
    fn agreement_filter() {
        let g = include_str!("../../data/agreement.gr");
        assert_eq!(parse(g, "The ball rolls", 10).len(), 1);
        assert_eq!(parse(g, "The balls roll", 10).len(), 1);
        assert_eq!(parse(g, "The ball roll", 10).len(), 0);
        assert_eq!(parse(g, "The balls rolls", 10).len(), 0);
        let t = &parse(g, "The balls roll", 1)[0];
        assert_eq!(t.features.to_string(), "[]");
        assert_eq!(
            t.subtrees().next().unwrap().features.to_string(),
            "[NUMBER=PL]"
        );
    }

    #[test]
    fn pp_attachment_ambiguity() {
        let trees = parse(
            include_str!("../../data/pp.gr"),
            "saw the man with the telescope",
            10,
        );
        let shapes: Vec<String> = trees.iter().map(ParseTree::to_sexpr).collect();
        assert_eq!(shapes.len(), 2, "{shapes:#?}");
        assert!(shapes.contains(
            &"(VP (VP (V saw) (NP (Det the) (N man))) (PP (P with) (NP (Det the) (N telescope))))"
                .to_string()
        ));
        assert!(shapes.contains(
            &"(VP (V saw) (NP (NP (Det the) (N man)) (PP (P with) (NP (Det the) (N telescope)))))"
                .to_string()
        ));
        assert_eq!(
            parse(
                include_str!("../../data/pp.gr"),
                "saw the man with the telescope",
                1
            )
            .len(),
            1
        );
    }

    #[test]
    fn extraction_is_deterministic() {
        let g = include_str!("../../data/pp.gr");
        let input = "saw the man on the hill with the telescope";
        let a: Vec<String> = parse(g, input, 100)
            .iter()
            .map(ParseTree::to_sexpr)
            .collect();
        let b: Vec<String> = parse(g, input, 100)
            .iter()
            .map(ParseTree::to_sexpr)
            .collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5, "Catalan-style growth for two PPs");
    }

    #[test]
    fn cyclic_grammar_yields_finite_trees() {
        let trees = parse("S -> T | 'x'\nT -> S\n", "x", 10);
        assert!(!trees.is_empty());
        assert_eq!(trees[0].to_sexpr(), "(S x)");
    }

    #[test]
    fn json_shape() {
        let trees = parse("S -> N\nball : N { NUMBER = SG }\n", "ball", 1);
        assert_eq!(
            serde_json::to_string(&trees[0]).unwrap(),
            r#"{"label":"S","children":[{"label":"N","children":["ball"],"features":{"NUMBER":"SG"}}],"features":{}}"#
        );
    }
}
