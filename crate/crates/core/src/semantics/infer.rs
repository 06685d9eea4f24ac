//! Forward chaining over function-free Horn clauses.
//!
//! A knowledge base may contain ground atoms and universally quantified
//! implications `(forall (x ...) (implies (and A1 ... An) H))` whose body
//! and head are atoms over constants and quantified variables. Head
//! variables missing from the body range over every constant mentioned in
//! the knowledge base and the query.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::formula::{Formula, Term};
use super::SemanticsError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Arg {
    Const(String),
    Var(String),
}

#[derive(Debug, Clone)]
struct Pattern {
    predicate: String,
    args: Vec<Arg>,
}

#[derive(Debug, Clone)]
struct Rule {
    body: Vec<Pattern>,
    head: Pattern,
}

fn unsupported(f: &Formula, why: &str) -> SemanticsError {
    SemanticsError::UnsupportedFormula(format!("{f}: {why}"))
}

fn pattern(f: &Formula, vars: &[String], whole: &Formula) -> Result<Pattern, SemanticsError> {
    let Formula::Atom(p, args) = f else {
        return Err(unsupported(whole, "expected an atom"));
    };
    let args = args
        .iter()
        .map(|t| match t {
            Term::Const(c) => Ok(Arg::Const(c.clone())),
            Term::Var(v) if vars.contains(v) => Ok(Arg::Var(v.clone())),
            Term::Var(v) => Err(unsupported(whole, &format!("free variable `{v}`"))),
            Term::Func(..) => Err(unsupported(whole, "function terms are not supported")),
        })
        .collect::<Result<_, _>>()?;
    Ok(Pattern {
        predicate: p.clone(),
        args,
    })
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(x, y) => {
            conjuncts(x, out);
            conjuncts(y, out);
        }
        other => out.push(other),
    }
}

fn to_rule(f: &Formula) -> Result<Rule, SemanticsError> {
    let mut vars = Vec::new();
    let mut cur = f;
    while let Formula::ForAll(vs, body) = cur {
        vars.extend(vs.iter().cloned());
        cur = body;
    }
    match cur {
        Formula::Implies(body, head) => {
            let mut parts = Vec::new();
            conjuncts(body, &mut parts);
            Ok(Rule {
                body: parts
                    .into_iter()
                    .map(|p| pattern(p, &vars, f))
                    .collect::<Result<_, _>>()?,
                head: pattern(head, &vars, f)?,
            })
        }
        atom @ Formula::Atom(..) => Ok(Rule {
            body: vec![],
            head: pattern(atom, &vars, f)?,
        }),
        _ => Err(unsupported(f, "not a Horn clause")),
    }
}

fn collect_constants(rule: &Rule, out: &mut BTreeSet<String>) {
    for p in rule.body.iter().chain(std::iter::once(&rule.head)) {
        for a in &p.args {
            if let Arg::Const(c) = a {
                out.insert(c.clone());
            }
        }
    }
}

/// Extends `binding` with every way of matching `patterns` against `facts`.
fn join(
    patterns: &[Pattern],
    facts: &BTreeSet<GroundAtom>,
    binding: &mut BTreeMap<String, String>,
    out: &mut Vec<BTreeMap<String, String>>,
) {
    let Some((first, rest)) = patterns.split_first() else {
        out.push(binding.clone());
        return;
    };
    for fact in facts {
        if fact.predicate != first.predicate || fact.args.len() != first.args.len() {
            continue;
        }
        let mut added = Vec::new();
        let mut ok = true;
        for (a, value) in first.args.iter().zip(&fact.args) {
            match a {
                Arg::Const(c) => ok = c == value,
                Arg::Var(v) => match binding.get(v) {
                    Some(bound) => ok = bound == value,
                    None => {
                        binding.insert(v.clone(), value.clone());
                        added.push(v.clone());
                    }
                },
            }
            if !ok {
                break;
            }
        }
        if ok {
            join(rest, facts, binding, out);
        }
        for v in added {
            binding.remove(&v);
        }
    }
}

fn instantiate_head(
    head: &Pattern,
    binding: &BTreeMap<String, String>,
    constants: &[String],
    out: &mut Vec<GroundAtom>,
) {
    let free: Vec<&String> = head
        .args
        .iter()
        .filter_map(|a| match a {
            Arg::Var(v) if !binding.contains_key(v) => Some(v),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut choice = vec![0usize; free.len()];
    if !free.is_empty() && constants.is_empty() {
        return;
    }
    loop {
        let args = head
            .args
            .iter()
            .map(|a| match a {
                Arg::Const(c) => c.clone(),
                Arg::Var(v) => binding.get(v).cloned().unwrap_or_else(|| {
                    let i = free
                        .iter()
                        .position(|f| *f == v)
                        .expect("free head variable");
                    constants[choice[i]].clone()
                }),
            })
            .collect();
        out.push(GroundAtom {
            predicate: head.predicate.clone(),
            args,
        });
        // Odometer over the free-variable choices.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return;
            }
            choice[i] += 1;
            if choice[i] < constants.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Every ground atom derivable from `kb`, with `extra_constants` added to
/// the range of unrestricted head variables.
pub fn forward_closure(
    kb: &[Formula],
    extra_constants: &BTreeSet<String>,
) -> Result<BTreeSet<GroundAtom>, SemanticsError> {
    let rules = kb.iter().map(to_rule).collect::<Result<Vec<_>, _>>()?;
    let mut constants = extra_constants.clone();
    rules
        .iter()
        .for_each(|r| collect_constants(r, &mut constants));
    let constants: Vec<String> = constants.into_iter().collect();

    let mut facts = BTreeSet::new();
    loop {
        let mut derived = Vec::new();
        for rule in &rules {
            let mut bindings = Vec::new();
            join(&rule.body, &facts, &mut BTreeMap::new(), &mut bindings);
            for b in &bindings {
                instantiate_head(&rule.head, b, &constants, &mut derived);
            }
        }
        let before = facts.len();
        facts.extend(derived);
        if facts.len() == before {
            return Ok(facts);
        }
    }
}

/// Whether the ground atom `query` follows from `kb`.
pub fn infer(kb: &[Formula], query: &Formula) -> Result<bool, SemanticsError> {
    let goal = match query {
        Formula::Atom(p, args) => GroundAtom {
            predicate: p.clone(),
            args: args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Ok(c.clone()),
                    _ => Err(unsupported(
                        query,
                        "query must be a ground, function-free atom",
                    )),
                })
                .collect::<Result<_, _>>()?,
        },
        _ => return Err(unsupported(query, "query must be an atom")),
    };
    let extra = goal.args.iter().cloned().collect();
    Ok(forward_closure(kb, &extra)?.contains(&goal))
}
