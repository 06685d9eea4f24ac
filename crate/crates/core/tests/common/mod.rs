//! Test-only oracles and generators. Each oracle is written independently
//! of the library algorithm it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nlc::grammar::{Grammar, Production, Symbol};
use nlc::semantics::{Formula, Term, WorldModel};
use nlc::tagger::TaggerModel;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- edit distance

/// Unit-cost edit distance by breadth-first search over strings: each edge is
/// one insertion, deletion or substitution from `alphabet`. Intermediate
/// strings never need to be longer than the longer endpoint, so states are
/// numbered densely by length and base-`|alphabet|` value.
pub fn bfs_edit_distance(source: &str, target: &str, alphabet: &[char]) -> usize {
    let k = alphabet.len();
    let encode = |s: &str| -> Vec<usize> {
        s.chars()
            .map(|c| {
                alphabet
                    .iter()
                    .position(|&a| a == c)
                    .expect("symbol in alphabet")
            })
            .collect()
    };
    let (s, t) = (encode(source), encode(target));
    let max_len = s.len().max(t.len());
    // offset[l] = number of strings shorter than l.
    let mut offset = vec![0usize; max_len + 2];
    for l in 0..=max_len {
        offset[l + 1] = offset[l] + k.pow(l as u32);
    }
    let id = |w: &[usize]| offset[w.len()] + w.iter().fold(0, |acc, &d| acc * k + d);
    let goal = id(&t);
    let decode = |mut i: usize, out: &mut Vec<usize>| {
        let len = (0..=max_len).rev().find(|&l| offset[l] <= i).unwrap();
        i -= offset[len];
        out.clear();
        out.resize(len, 0);
        for p in (0..len).rev() {
            out[p] = i % k;
            i /= k;
        }
    };
    let mut seen = vec![false; offset[max_len + 1]];
    seen[id(&s)] = true;
    let mut queue = VecDeque::from([(id(&s), 0usize)]);
    let mut cur = Vec::with_capacity(max_len + 1);
    while let Some((node, d)) = queue.pop_front() {
        if node == goal {
            return d;
        }
        decode(node, &mut cur);
        // Each neighbour is made by editing `cur` in place and undoing it.
        let mut visit = |w: &[usize]| {
            let i = id(w);
            if !seen[i] {
                seen[i] = true;
                queue.push_back((i, d + 1));
            }
        };
        for i in 0..cur.len() {
            let old = cur.remove(i);
            visit(&cur);
            cur.insert(i, old);
            for c in (0..k).filter(|&c| c != old) {
                cur[i] = c;
                visit(&cur);
            }
            cur[i] = old;
        }
        if cur.len() < max_len {
            for i in 0..=cur.len() {
                for c in 0..k {
                    cur.insert(i, c);
                    visit(&cur);
                    cur.remove(i);
                }
            }
        }
    }
    unreachable!("target is always reachable")
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

// ---------------------------------------------------------------- tagging

/// Exhaustive argmax over every tag sequence built from each token's
/// candidate tags. Scores accumulate left to right exactly as a log-space
/// product would; ties go to the sequence that is smallest when compared
/// from the last position backwards.
pub fn brute_force_tags(model: &TaggerModel, sentence: &[&str]) -> Vec<String> {
    let tags = model.tags();
    let cands: Vec<Vec<usize>> = sentence
        .iter()
        .map(|w| {
            let c: Vec<usize> = (0..tags.len())
                .filter(|&t| model.emission_prob(&tags[t], w) > 0.0)
                .collect();
            if c.is_empty() {
                (0..tags.len()).collect()
            } else {
                c
            }
        })
        .collect();
    let ln_emit = |t: usize, w: &str| {
        let p = model.emission_prob(&tags[t], w);
        if p > 0.0 {
            p.ln()
        } else {
            0.0
        }
    };
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx = vec![0usize; sentence.len()];
    loop {
        let seq: Vec<usize> = idx.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
        let mut score = 0.0;
        let mut prev = nlc::tagger::BOUNDARY.to_string();
        for (pos, &t) in seq.iter().enumerate() {
            let tr = model.transition_prob(&prev, &tags[t]).ln();
            score = if pos == 0 {
                tr + ln_emit(t, sentence[pos])
            } else {
                score + tr + ln_emit(t, sentence[pos])
            };
            prev = tags[t].clone();
        }
        let better = match &best {
            None => true,
            Some((b, bseq)) => {
                score > *b || (score == *b && seq.iter().rev().lt(bseq.iter().rev()))
            }
        };
        if better {
            best = Some((score, seq));
        }
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                let (_, seq) = best.unwrap();
                return seq.into_iter().map(|t| tags[t].clone()).collect();
            }
            idx[pos] += 1;
            if idx[pos] < cands[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// A model trained on a random corpus over words `w0..w7`, each allowed at
/// most four of six tags, with no open classes. Returns the seen words.
pub fn random_tagger(r: &mut ChaCha8Rng) -> (nlc::tagger::TaggerModel, Vec<String>) {
    let tags = ["A", "B", "C", "D", "E", "F"];
    let tagset = nlc::tagger::TagSet::new(tags).unwrap();
    let words: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
    let allowed: Vec<Vec<&str>> = words
        .iter()
        .map(|_| {
            let mut t = tags.to_vec();
            t.shuffle(r);
            t.truncate(r.gen_range(1..=4));
            t
        })
        .collect();
    let corpus: Vec<nlc::tagger::TaggedSentence> = (0..r.gen_range(3..12))
        .map(|_| {
            (0..r.gen_range(1..6))
                .map(|_| {
                    let w = r.gen_range(0..words.len());
                    (words[w].clone(), allowed[w].choose(r).unwrap().to_string())
                })
                .collect()
        })
        .collect();
    let mut model = nlc::tagger::train_tagger(&corpus, &tagset).unwrap();
    model.set_open_tags(Vec::<String>::new()).unwrap();
    let seen: Vec<String> = corpus
        .iter()
        .flatten()
        .map(|(w, _)| w.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    (model, seen)
}

// ---------------------------------------------------------------- grammars

/// A random epsilon-free grammar with at most `max_nt` nonterminals and
/// `max_prods` productions over the given terminals. Every right-hand
/// nonterminal has at least one production.
pub fn random_grammar(
    rng: &mut ChaCha8Rng,
    max_nt: usize,
    max_prods: usize,
    terminals: &[&str],
) -> Grammar {
    let nts: Vec<String> = (0..rng.gen_range(1..=max_nt))
        .map(|i| format!("N{i}"))
        .collect();
    let n_prods = rng.gen_range(nts.len().max(1)..=max_prods.max(nts.len()));
    // Every nonterminal gets one production first so all are defined.
    let mut lhs: Vec<&String> = nts.iter().collect();
    while lhs.len() < n_prods {
        lhs.push(nts.choose(rng).unwrap());
    }
    let productions = lhs
        .into_iter()
        .map(|l| {
            let len = rng.gen_range(1..=3);
            let rhs = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.45) {
                        Symbol::Terminal(terminals.choose(rng).unwrap().to_string())
                    } else {
                        Symbol::NonTerminal(nts.choose(rng).unwrap().clone())
                    }
                })
                .collect();
            Production::new(l, rhs)
        })
        .collect();
    Grammar::new("N0", productions, vec![]).expect("generated grammar is valid")
}

/// Calls `visit(prefix)` on every nonempty string up to `max_len` over
/// `alphabet`, depth first, after `push`ing its last symbol; `pop` undoes it.
pub fn for_each_string<S>(
    state: &mut S,
    alphabet: &[&str],
    max_len: usize,
    push: &mut impl FnMut(&mut S, &str),
    pop: &mut impl FnMut(&mut S, usize),
    visit: &mut impl FnMut(&mut S, &[&str]),
) {
    fn go<'a, S>(
        state: &mut S,
        alphabet: &[&'a str],
        max_len: usize,
        prefix: &mut Vec<&'a str>,
        push: &mut impl FnMut(&mut S, &str),
        pop: &mut impl FnMut(&mut S, usize),
        visit: &mut impl FnMut(&mut S, &[&str]),
    ) {
        if prefix.len() == max_len {
            return;
        }
        for &a in alphabet {
            push(state, a);
            prefix.push(a);
            visit(state, prefix);
            go(state, alphabet, max_len, prefix, push, pop, visit);
            prefix.pop();
            pop(state, prefix.len());
        }
    }
    go(state, alphabet, max_len, &mut Vec::new(), push, pop, visit);
}

// ---------------------------------------------------------------- logic

/// Truth by grounding: quantifiers are expanded into finite conjunctions and
/// disjunctions by substituting entity names, then the variable-free
/// formula is checked against the extensions.
pub fn naive_truth(f: &Formula, m: &WorldModel) -> bool {
    fn subst_term(t: &Term, var: &str, entity: &str) -> Term {
        match t {
            Term::Var(v) if v == var => Term::Const(format!("#{entity}")),
            Term::Func(n, args) => Term::Func(
                n.clone(),
                args.iter().map(|a| subst_term(a, var, entity)).collect(),
            ),
            other => other.clone(),
        }
    }
    fn subst(f: &Formula, var: &str, entity: &str) -> Formula {
        let b = |g: &Formula| Box::new(subst(g, var, entity));
        match f {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter().map(|a| subst_term(a, var, entity)).collect(),
            ),
            Formula::Not(g) => Formula::Not(b(g)),
            Formula::And(x, y) => Formula::And(b(x), b(y)),
            Formula::Or(x, y) => Formula::Or(b(x), b(y)),
            Formula::Implies(x, y) => Formula::Implies(b(x), b(y)),
            Formula::Exists(vs, g) if vs.iter().any(|v| v == var) => f.clone(),
            Formula::ForAll(vs, g) if vs.iter().any(|v| v == var) => f.clone(),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), b(g)),
            Formula::ForAll(vs, g) => Formula::ForAll(vs.clone(), b(g)),
        }
    }
    fn denote(t: &Term, m: &WorldModel) -> String {
        match t {
            Term::Const(c) => match c.strip_prefix('#') {
                Some(e) => e.to_string(),
                None => m.constant(c).expect("constant interpreted").to_string(),
            },
            Term::Func(n, args) => {
                let key: Vec<String> = args.iter().map(|a| denote(a, m)).collect();
                m.function(n).expect("function interpreted")[&key].clone()
            }
            Term::Var(v) => panic!("free variable {v}"),
        }
    }
    fn expand(vs: &[String], body: &Formula, m: &WorldModel, all: bool) -> bool {
        let Some((v, rest)) = vs.split_first() else {
            return naive_truth(body, m);
        };
        let mut results = m
            .domain()
            .iter()
            .map(|e| expand(rest, &subst(body, v, e), m, all));
        if all {
            results.all(|r| r)
        } else {
            results.any(|r| r)
        }
    }
    match f {
        Formula::Atom(p, args) => {
            let tuple: Vec<String> = args.iter().map(|a| denote(a, m)).collect();
            m.extension(p).is_some_and(|ext| ext.contains(&tuple))
        }
        Formula::Not(g) => !naive_truth(g, m),
        Formula::And(a, b) => naive_truth(a, m) && naive_truth(b, m),
        Formula::Or(a, b) => naive_truth(a, m) || naive_truth(b, m),
        Formula::Implies(a, b) => !naive_truth(a, m) || naive_truth(b, m),
        Formula::Exists(vs, g) => expand(vs, g, m, false),
        Formula::ForAll(vs, g) => expand(vs, g, m, true),
    }
}

/// Every subset of `items`.
fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1u32 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// All models over domains `{e0..e(n-1)}` for `n` in `1..=max_domain`, for
/// the given constants and predicate arities. Every predicate is listed in
/// each model, possibly with an empty extension.
pub fn all_models(
    max_domain: usize,
    constants: &[&str],
    predicates: &[(&str, usize)],
) -> Vec<WorldModel> {
    let mut out = Vec::new();
    for n in 1..=max_domain {
        let domain: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        // Constant interpretations: all functions constants -> domain.
        let mut const_maps: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
        for c in constants {
            const_maps = const_maps
                .into_iter()
                .flat_map(|m| {
                    domain.iter().map(move |e| {
                        let mut m = m.clone();
                        m.insert(c.to_string(), e.clone());
                        m
                    })
                })
                .collect();
        }
        let mut pred_maps: Vec<BTreeMap<String, BTreeSet<Vec<String>>>> = vec![BTreeMap::new()];
        for (p, arity) in predicates {
            let mut tuples: Vec<Vec<String>> = vec![vec![]];
            for _ in 0..*arity {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        domain.iter().map(move |e| {
                            let mut t = t.clone();
                            t.push(e.clone());
                            t
                        })
                    })
                    .collect();
            }
            let exts = subsets(&tuples);
            pred_maps = pred_maps
                .into_iter()
                .flat_map(|m| {
                    exts.iter().map(move |ext| {
                        let mut m = m.clone();
                        m.insert(p.to_string(), ext.iter().cloned().collect());
                        m
                    })
                })
                .collect();
        }
        for c in &const_maps {
            for p in &pred_maps {
                out.push(
                    WorldModel::new(domain.clone(), c.clone(), p.clone(), BTreeMap::new())
                        .expect("generated model is valid"),
                );
            }
        }
    }
    out
}

/// Closed formulas over `P/1`, `R/2` and the constant `c`.
pub const FIXTURE_FORMULAS: &[&str] = &[
    "(P c)",
    "(R c c)",
    "(not (P c))",
    "(and (P c) (R c c))",
    "(or (P c) (not (R c c)))",
    "(implies (P c) (R c c))",
    "(exists x (P x))",
    "(forall x (P x))",
    "(exists x (and (P x) (R x c)))",
    "(forall x (implies (P x) (R x x)))",
    "(forall x (exists y (R x y)))",
    "(exists y (forall x (R x y)))",
    "(exists (x y) (and (R x y) (not (R y x))))",
    "(forall (x y) (implies (R x y) (R y x)))",
    "(not (exists x (and (P x) (not (R c x)))))",
    "(forall x (or (P x) (exists y (and (R x y) (P y)))))",
    "(exists x (forall y (implies (R x y) (exists z (and (R y z) (P z))))))",
];
