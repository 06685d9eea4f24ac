//! Terms and formulas, conversion from reduced lambda expressions, and the
//! canonical form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::expr::Expr;
use super::SemanticsError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
    Func(String, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    ForAll(Vec<String>, Box<Formula>),
}

impl Term {
    fn from_expr(e: &Expr) -> Result<Term, SemanticsError> {
        match e {
            Expr::Const(c) => Ok(Term::Const(c.clone())),
            Expr::Var(v) => Ok(Term::Var(v.clone())),
            Expr::Func(f, args) => Ok(Term::Func(
                f.clone(),
                args.iter().map(Term::from_expr).collect::<Result<_, _>>()?,
            )),
            other => Err(SemanticsError::NotAFormula(format!(
                "`{other}` in argument position is not a term"
            ))),
        }
    }

    fn to_expr(&self) -> Expr {
        match self {
            Term::Const(c) => Expr::Const(c.clone()),
            Term::Var(v) => Expr::Var(v.clone()),
            Term::Func(f, args) => Expr::Func(f.clone(), args.iter().map(Term::to_expr).collect()),
        }
    }

    fn collect_free(&self, bound: &[String], out: &mut BTreeSet<String>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Func(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
            Term::Func(name, args) => write!(f, "{name}({})", join(args, ", ")),
        }
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

impl Formula {
    pub fn atom(pred: &str, args: &[&str]) -> Formula {
        Formula::Atom(
            pred.to_string(),
            args.iter().map(|a| Term::Const(a.to_string())).collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Formula, SemanticsError> {
        Formula::from_expr(&Expr::parse(text)?)
    }

    /// Converts a fully reduced expression. Lambdas, applications and slots
    /// are rejected, as is inconsistent predicate or function arity.
    pub fn from_expr(e: &Expr) -> Result<Formula, SemanticsError> {
        let f = Formula::convert(e)?;
        f.check_arity()?;
        Ok(f)
    }

    fn convert(e: &Expr) -> Result<Formula, SemanticsError> {
        let b = |e: &Expr| Formula::convert(e).map(Box::new);
        Ok(match e {
            Expr::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter().map(Term::from_expr).collect::<Result<_, _>>()?,
            ),
            // A bare constant in formula position is a propositional atom.
            Expr::Const(c) => Formula::Atom(c.clone(), vec![]),
            Expr::Not(a) => Formula::Not(b(a)?),
            Expr::And(x, y) => Formula::And(b(x)?, b(y)?),
            Expr::Or(x, y) => Formula::Or(b(x)?, b(y)?),
            Expr::Implies(x, y) => Formula::Implies(b(x)?, b(y)?),
            Expr::Exists(vs, a) => Formula::Exists(vs.clone(), b(a)?),
            Expr::ForAll(vs, a) => Formula::ForAll(vs.clone(), b(a)?),
            other => {
                return Err(SemanticsError::NotAFormula(other.to_sexpr()));
            }
        })
    }

    pub fn to_expr(&self) -> Expr {
        let b = |f: &Formula| Box::new(f.to_expr());
        match self {
            Formula::Atom(p, args) => {
                Expr::Atom(p.clone(), args.iter().map(Term::to_expr).collect())
            }
            Formula::Not(a) => Expr::Not(b(a)),
            Formula::And(x, y) => Expr::And(b(x), b(y)),
            Formula::Or(x, y) => Expr::Or(b(x), b(y)),
            Formula::Implies(x, y) => Expr::Implies(b(x), b(y)),
            Formula::Exists(vs, a) => Expr::Exists(vs.clone(), b(a)),
            Formula::ForAll(vs, a) => Expr::ForAll(vs.clone(), b(a)),
        }
    }

    fn check_arity(&self) -> Result<(), SemanticsError> {
        let mut preds = BTreeMap::new();
        let mut funcs = BTreeMap::new();
        let mut err = None;
        let mut note = |table: &mut BTreeMap<String, usize>, name: &str, n: usize| {
            let expected = *table.entry(name.to_string()).or_insert(n);
            if expected != n && err.is_none() {
                err = Some(SemanticsError::ArityError {
                    name: name.to_string(),
                    expected,
                    found: n,
                });
            }
        };
        self.visit_atoms(&mut |p, args| {
            note(&mut preds, p, args.len());
            for a in args {
                visit_funcs(a, &mut |f, n| note(&mut funcs, f, n));
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&str, &[Term])) {
        match self {
            Formula::Atom(p, args) => f(p, args),
            Formula::Not(a) | Formula::Exists(_, a) | Formula::ForAll(_, a) => a.visit_atoms(f),
            Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) => {
                x.visit_atoms(f);
                y.visit_atoms(f);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) => {
                x.collect_free(bound, out);
                y.collect_free(bound, out);
            }
            Formula::Exists(vs, a) | Formula::ForAll(vs, a) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                a.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// S-expression text. Right-nested conjunction chains print as one
    /// n-ary `and`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut Vec::new(), &mut out);
        out
    }

    /// Free variables print with a `?` prefix so the text reads back as
    /// the same formula.
    fn write_sexpr(&self, bound: &mut Vec<String>, out: &mut String) {
        match self {
            Formula::Atom(p, args) => {
                if args.is_empty() {
                    out.push_str(p);
                } else {
                    out.push('(');
                    out.push_str(p);
                    for a in args {
                        out.push(' ');
                        write_term_sexpr(a, bound, out);
                    }
                    out.push(')');
                }
            }
            Formula::Not(a) => {
                out.push_str("(not ");
                a.write_sexpr(bound, out);
                out.push(')');
            }
            Formula::And(..) => {
                out.push_str("(and");
                let mut cur = self;
                while let Formula::And(x, y) = cur {
                    out.push(' ');
                    x.write_sexpr(bound, out);
                    cur = y;
                }
                out.push(' ');
                cur.write_sexpr(bound, out);
                out.push(')');
            }
            Formula::Or(x, y) | Formula::Implies(x, y) => {
                out.push_str(if matches!(self, Formula::Or(..)) {
                    "(or "
                } else {
                    "(implies "
                });
                x.write_sexpr(bound, out);
                out.push(' ');
                y.write_sexpr(bound, out);
                out.push(')');
            }
            Formula::Exists(vs, a) | Formula::ForAll(vs, a) => {
                let kw = if matches!(self, Formula::Exists(..)) {
                    "exists"
                } else {
                    "forall"
                };
                out.push_str(&format!("({kw} ({}) ", vs.join(" ")));
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                a.write_sexpr(bound, out);
                bound.truncate(n);
                out.push(')');
            }
        }
    }
}

fn visit_funcs(t: &Term, f: &mut impl FnMut(&str, usize)) {
    if let Term::Func(name, args) = t {
        f(name, args.len());
        args.iter().for_each(|a| visit_funcs(a, f));
    }
}

fn write_term_sexpr(t: &Term, bound: &[String], out: &mut String) {
    match t {
        Term::Const(c) => out.push_str(c),
        Term::Var(v) => {
            if !bound.contains(v) {
                out.push('?');
            }
            out.push_str(v);
        }
        Term::Func(name, args) => {
            out.push('(');
            out.push_str(name);
            for a in args {
                out.push(' ');
                write_term_sexpr(a, bound, out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    /// Conventional notation: `Serves(Maharani, VegetarianFood)`,
    /// `∀x (VegetarianRestaurant(x) → Serves(x, VegetarianFood))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = |g: &Formula| match g {
            Formula::Atom(..) | Formula::Not(_) => g.to_string(),
            _ => format!("({g})"),
        };
        match self {
            Formula::Atom(p, args) if args.is_empty() => f.write_str(p),
            Formula::Atom(p, args) => write!(f, "{p}({})", join(args, ", ")),
            Formula::Not(a) => write!(f, "¬{}", paren(a)),
            Formula::And(x, y) => {
                // Chains of ∧ associate without extra parentheses.
                let lhs = paren(x);
                let rhs = if matches!(y.as_ref(), Formula::And(..)) {
                    y.to_string()
                } else {
                    paren(y)
                };
                write!(f, "{lhs} ∧ {rhs}")
            }
            Formula::Or(x, y) => write!(f, "{} ∨ {}", paren(x), paren(y)),
            Formula::Implies(x, y) => write!(f, "{} → {}", paren(x), paren(y)),
            Formula::Exists(vs, a) => write!(f, "∃{} {}", vs.join(","), paren(a)),
            Formula::ForAll(vs, a) => write!(f, "∀{} {}", vs.join(","), paren(a)),
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sexpr())
    }
}

/// Canonical text of a closed formula; see [`canonical_formula`].
pub fn canonicalize(f: &Formula) -> Result<String, SemanticsError> {
    Ok(canonical_formula(f)?.to_sexpr())
}

/// Renames bound variables to `x1, x2, ...` in binder order and sorts the
/// conjuncts of every flattened `And` chain. Conjuncts are ordered by a
/// name-independent key (bound variables replaced by their binder
/// positions), so alpha-equivalent inputs with permuted conjuncts produce
/// the same result. `Or` and `Implies` are left as written.
pub fn canonical_formula(f: &Formula) -> Result<Formula, SemanticsError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(SemanticsError::FreeVariable(v));
    }
    let sorted = sort_conjuncts(f, &mut Vec::new());
    let mut counter = 0;
    Ok(rename(&sorted, &mut Vec::new(), &mut counter))
}

/// Name-independent rendering: a bound variable prints as `#d.i`, the
/// i-th variable of the binder d scopes out.
fn shape_key(f: &Formula, scopes: &mut Vec<Vec<String>>) -> String {
    fn term_key(t: &Term, scopes: &[Vec<String>]) -> String {
        match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => scopes
                .iter()
                .rev()
                .enumerate()
                .find_map(|(d, s)| s.iter().position(|x| x == v).map(|i| format!("#{d}.{i}")))
                .unwrap_or_else(|| format!("?{v}")),
            Term::Func(name, args) => format!(
                "({name} {})",
                args.iter()
                    .map(|a| term_key(a, scopes))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        }
    }
    match f {
        Formula::Atom(p, args) => format!(
            "({p} {})",
            args.iter()
                .map(|a| term_key(a, scopes))
                .collect::<Vec<_>>()
                .join(" ")
        ),
        Formula::Not(a) => format!("(not {})", shape_key(a, scopes)),
        Formula::And(x, y) => format!("(and {} {})", shape_key(x, scopes), shape_key(y, scopes)),
        Formula::Or(x, y) => format!("(or {} {})", shape_key(x, scopes), shape_key(y, scopes)),
        Formula::Implies(x, y) => format!(
            "(implies {} {})",
            shape_key(x, scopes),
            shape_key(y, scopes)
        ),
        Formula::Exists(vs, a) | Formula::ForAll(vs, a) => {
            let kw = if matches!(f, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            scopes.push(vs.clone());
            let body = shape_key(a, scopes);
            scopes.pop();
            format!("({kw} {} {body})", vs.len())
        }
    }
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(x, y) => {
            flatten_and(x, out);
            flatten_and(y, out);
        }
        other => out.push(other),
    }
}

fn sort_conjuncts(f: &Formula, scopes: &mut Vec<Vec<String>>) -> Formula {
    match f {
        Formula::Atom(..) => f.clone(),
        Formula::Not(a) => Formula::Not(Box::new(sort_conjuncts(a, scopes))),
        Formula::And(..) => {
            let mut parts = Vec::new();
            flatten_and(f, &mut parts);
            let mut keyed: Vec<(String, Formula)> = parts
                .into_iter()
                .map(|p| {
                    let p = sort_conjuncts(p, scopes);
                    (shape_key(&p, scopes), p)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            let mut iter = keyed.into_iter().rev().map(|(_, p)| p);
            let last = iter.next().expect("conjunction has operands");
            iter.fold(last, |acc, p| Formula::And(Box::new(p), Box::new(acc)))
        }
        Formula::Or(x, y) => Formula::Or(
            Box::new(sort_conjuncts(x, scopes)),
            Box::new(sort_conjuncts(y, scopes)),
        ),
        Formula::Implies(x, y) => Formula::Implies(
            Box::new(sort_conjuncts(x, scopes)),
            Box::new(sort_conjuncts(y, scopes)),
        ),
        Formula::Exists(vs, a) | Formula::ForAll(vs, a) => {
            scopes.push(vs.clone());
            let body = Box::new(sort_conjuncts(a, scopes));
            scopes.pop();
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(vs.clone(), body)
            } else {
                Formula::ForAll(vs.clone(), body)
            }
        }
    }
}

fn rename(f: &Formula, scopes: &mut Vec<Vec<(String, String)>>, counter: &mut usize) -> Formula {
    fn term(t: &Term, scopes: &[Vec<(String, String)>]) -> Term {
        match t {
            Term::Const(_) => t.clone(),
            Term::Var(v) => Term::Var(
                scopes
                    .iter()
                    .rev()
                    .find_map(|s| {
                        s.iter()
                            .find(|(old, _)| old == v)
                            .map(|(_, new)| new.clone())
                    })
                    .unwrap_or_else(|| v.clone()),
            ),
            Term::Func(name, args) => {
                Term::Func(name.clone(), args.iter().map(|a| term(a, scopes)).collect())
            }
        }
    }
    match f {
        Formula::Atom(p, args) => {
            Formula::Atom(p.clone(), args.iter().map(|a| term(a, scopes)).collect())
        }
        Formula::Not(a) => Formula::Not(Box::new(rename(a, scopes, counter))),
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) => {
            let x = Box::new(rename(x, scopes, counter));
            let y = Box::new(rename(y, scopes, counter));
            match f {
                Formula::And(..) => Formula::And(x, y),
                Formula::Or(..) => Formula::Or(x, y),
                _ => Formula::Implies(x, y),
            }
        }
        Formula::Exists(vs, a) | Formula::ForAll(vs, a) => {
            let mapping: Vec<(String, String)> = vs
                .iter()
                .map(|v| {
                    *counter += 1;
                    (v.clone(), format!("x{counter}"))
                })
                .collect();
            let names = mapping.iter().map(|(_, n)| n.clone()).collect();
            scopes.push(mapping);
            let body = Box::new(rename(a, scopes, counter));
            scopes.pop();
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(names, body)
            } else {
                Formula::ForAll(names, body)
            }
        }
    }
}
