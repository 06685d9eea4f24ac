//! Lambda expressions over first-order formulas, used as semantic
//! attachments and reduced to formulas during composition.
//!
//! Text syntax (S-expressions):
//!
//! ```text
//! (lambda x (runs x))           abstraction
//! (apply f a b)  or  ($2 $1)    application (curried)
//! (forall (x y) body)  (exists (x) body)
//! (and a b ...) (or a b) (implies a b) (not a)
//! (Serves x VegetarianFood)     atom; in argument position, a function term
//! $1 $2 ...                     attachment slots for child meanings
//! ?x                            a free variable
//! ```
//!
//! A bare symbol is a variable when an enclosing `lambda`/quantifier binds
//! it and a constant otherwise.

use std::collections::BTreeSet;
use std::fmt;

use super::SemanticsError;
use crate::sexpr::{self, SExp};

pub const DEFAULT_STEP_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Const(String),
    /// 1-based reference to a child's meaning inside an attachment.
    Slot(usize),
    Func(String, Vec<Expr>),
    Atom(String, Vec<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Exists(Vec<String>, Box<Expr>),
    ForAll(Vec<String>, Box<Expr>),
    Lam(String, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
}

const KEYWORDS: [&str; 8] = [
    "lambda", "apply", "not", "and", "or", "implies", "exists", "forall",
];

fn syntax(msg: impl Into<String>) -> SemanticsError {
    SemanticsError::Syntax(msg.into())
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('$')
        && !s.starts_with('?')
        && !KEYWORDS.contains(&s)
        && s.chars()
            .all(|c| !c.is_whitespace() && c != '(' && c != ')')
}

impl Expr {
    pub fn lam(var: &str, body: Expr) -> Expr {
        Expr::Lam(var.to_string(), Box::new(body))
    }

    pub fn app(f: Expr, arg: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(arg))
    }

    pub fn parse(text: &str) -> Result<Expr, SemanticsError> {
        let s = sexpr::parse(text).map_err(|e| syntax(e.to_string()))?;
        Expr::from_sexp(&s)
    }

    pub fn from_sexp(s: &SExp) -> Result<Expr, SemanticsError> {
        Reader::default().formula(s)
    }

    /// Highest slot index used, 0 if none.
    pub fn max_slot(&self) -> usize {
        let mut max = 0;
        self.visit(&mut |e| {
            if let Expr::Slot(n) = e {
                max = max.max(*n);
            }
        });
        max
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Var(_) | Expr::Const(_) | Expr::Slot(_) => {}
            Expr::Func(_, args) | Expr::Atom(_, args) => args.iter().for_each(|a| a.visit(f)),
            Expr::Not(a) | Expr::Exists(_, a) | Expr::ForAll(_, a) | Expr::Lam(_, a) => a.visit(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) | Expr::App(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Expr::Const(_) | Expr::Slot(_) => {}
            Expr::Func(_, args) | Expr::Atom(_, args) => {
                args.iter().for_each(|a| a.collect_free(bound, out))
            }
            Expr::Not(a) => a.collect_free(bound, out),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) | Expr::App(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Exists(vs, a) | Expr::ForAll(vs, a) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                a.collect_free(bound, out);
                bound.truncate(n);
            }
            Expr::Lam(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        self.visit(&mut |e| match e {
            Expr::Var(v) | Expr::Lam(v, _) => {
                out.insert(v.clone());
            }
            Expr::Exists(vs, _) | Expr::ForAll(vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
    }

    /// Replaces `$n` with `children[n-1]`.
    pub fn fill_slots(&self, children: &[Expr]) -> Result<Expr, SemanticsError> {
        Ok(match self {
            Expr::Slot(n) => children
                .get(n - 1)
                .cloned()
                .ok_or_else(|| syntax(format!("slot ${n} has no matching child")))?,
            Expr::Var(_) | Expr::Const(_) => self.clone(),
            Expr::Func(f, args) => Expr::Func(f.clone(), fill_all(args, children)?),
            Expr::Atom(p, args) => Expr::Atom(p.clone(), fill_all(args, children)?),
            Expr::Not(a) => Expr::Not(Box::new(a.fill_slots(children)?)),
            Expr::And(a, b) => Expr::And(
                Box::new(a.fill_slots(children)?),
                Box::new(b.fill_slots(children)?),
            ),
            Expr::Or(a, b) => Expr::Or(
                Box::new(a.fill_slots(children)?),
                Box::new(b.fill_slots(children)?),
            ),
            Expr::Implies(a, b) => Expr::Implies(
                Box::new(a.fill_slots(children)?),
                Box::new(b.fill_slots(children)?),
            ),
            Expr::App(a, b) => Expr::App(
                Box::new(a.fill_slots(children)?),
                Box::new(b.fill_slots(children)?),
            ),
            Expr::Exists(vs, a) => Expr::Exists(vs.clone(), Box::new(a.fill_slots(children)?)),
            Expr::ForAll(vs, a) => Expr::ForAll(vs.clone(), Box::new(a.fill_slots(children)?)),
            Expr::Lam(v, a) => Expr::Lam(v.clone(), Box::new(a.fill_slots(children)?)),
        })
    }

    /// Capture-avoiding substitution of `value` for free occurrences of `var`.
    pub fn substitute(&self, var: &str, value: &Expr) -> Expr {
        let value_free = value.free_vars();
        self.subst(var, value, &value_free)
    }

    fn subst(&self, var: &str, value: &Expr, value_free: &BTreeSet<String>) -> Expr {
        let rec = |e: &Expr| Box::new(e.subst(var, value, value_free));
        match self {
            Expr::Var(v) if v == var => value.clone(),
            Expr::Var(_) | Expr::Const(_) | Expr::Slot(_) => self.clone(),
            Expr::Func(f, args) => Expr::Func(
                f.clone(),
                args.iter()
                    .map(|a| a.subst(var, value, value_free))
                    .collect(),
            ),
            Expr::Atom(p, args) => Expr::Atom(
                p.clone(),
                args.iter()
                    .map(|a| a.subst(var, value, value_free))
                    .collect(),
            ),
            Expr::Not(a) => Expr::Not(rec(a)),
            Expr::And(a, b) => Expr::And(rec(a), rec(b)),
            Expr::Or(a, b) => Expr::Or(rec(a), rec(b)),
            Expr::Implies(a, b) => Expr::Implies(rec(a), rec(b)),
            Expr::App(a, b) => Expr::App(rec(a), rec(b)),
            Expr::Lam(v, body) => {
                if v == var || !body.free_vars().contains(var) {
                    return self.clone();
                }
                let (names, body) =
                    rename_binders(std::slice::from_ref(v), body, var, value, value_free);
                Expr::Lam(
                    names.into_iter().next().unwrap(),
                    Box::new(body.subst(var, value, value_free)),
                )
            }
            Expr::Exists(vs, body) | Expr::ForAll(vs, body) => {
                if vs.iter().any(|v| v == var) || !body.free_vars().contains(var) {
                    return self.clone();
                }
                let (names, body) = rename_binders(vs, body, var, value, value_free);
                let body = Box::new(body.subst(var, value, value_free));
                match self {
                    Expr::Exists(..) => Expr::Exists(names, body),
                    _ => Expr::ForAll(names, body),
                }
            }
        }
    }

    /// Normal-order reduction to beta-normal form.
    pub fn beta_reduce(&self) -> Result<Expr, SemanticsError> {
        self.beta_reduce_with_budget(DEFAULT_STEP_BUDGET)
    }

    pub fn beta_reduce_with_budget(&self, budget: usize) -> Result<Expr, SemanticsError> {
        let mut current = self.clone();
        for _ in 0..budget {
            match current.step() {
                Some(next) => current = next,
                None => return Ok(current),
            }
        }
        match current.step() {
            None => Ok(current),
            Some(_) => Err(SemanticsError::NonTerminating(budget)),
        }
    }

    /// Contracts the leftmost-outermost redex, if any.
    fn step(&self) -> Option<Expr> {
        match self {
            Expr::App(f, arg) => {
                if let Expr::Lam(v, body) = f.as_ref() {
                    return Some(body.substitute(v, arg));
                }
                if let Some(f2) = f.step() {
                    return Some(Expr::App(Box::new(f2), arg.clone()));
                }
                arg.step().map(|a2| Expr::App(f.clone(), Box::new(a2)))
            }
            Expr::Var(_) | Expr::Const(_) | Expr::Slot(_) => None,
            Expr::Func(name, args) | Expr::Atom(name, args) => {
                let i = args.iter().position(|a| a.step().is_some())?;
                let mut args = args.clone();
                args[i] = args[i].step()?;
                Some(match self {
                    Expr::Func(..) => Expr::Func(name.clone(), args),
                    _ => Expr::Atom(name.clone(), args),
                })
            }
            Expr::Not(a) => a.step().map(|a| Expr::Not(Box::new(a))),
            Expr::Lam(v, a) => a.step().map(|a| Expr::Lam(v.clone(), Box::new(a))),
            Expr::Exists(vs, a) => a.step().map(|a| Expr::Exists(vs.clone(), Box::new(a))),
            Expr::ForAll(vs, a) => a.step().map(|a| Expr::ForAll(vs.clone(), Box::new(a))),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) => {
                let (a2, b2) = match a.step() {
                    Some(a2) => (a2, (**b).clone()),
                    None => ((**a).clone(), b.step()?),
                };
                let (a2, b2) = (Box::new(a2), Box::new(b2));
                Some(match self {
                    Expr::And(..) => Expr::And(a2, b2),
                    Expr::Or(..) => Expr::Or(a2, b2),
                    _ => Expr::Implies(a2, b2),
                })
            }
        }
    }

    /// The S-expression text form.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut Vec::new(), &mut out);
        out
    }

    fn write_sexpr(&self, bound: &mut Vec<String>, out: &mut String) {
        let list = |out: &mut String, head: &str, args: &[Expr], bound: &mut Vec<String>| {
            out.push('(');
            out.push_str(head);
            for a in args {
                out.push(' ');
                a.write_sexpr(bound, out);
            }
            out.push(')');
        };
        match self {
            Expr::Var(v) => {
                if !bound.contains(v) {
                    out.push('?');
                }
                out.push_str(v);
            }
            Expr::Const(c) => out.push_str(c),
            Expr::Slot(n) => out.push_str(&format!("${n}")),
            Expr::Func(name, args) | Expr::Atom(name, args) => list(out, name, args, bound),
            Expr::Not(a) => list(out, "not", std::slice::from_ref(a.as_ref()), bound),
            Expr::And(a, b) => list(out, "and", &[(**a).clone(), (**b).clone()], bound),
            Expr::Or(a, b) => list(out, "or", &[(**a).clone(), (**b).clone()], bound),
            Expr::Implies(a, b) => list(out, "implies", &[(**a).clone(), (**b).clone()], bound),
            Expr::App(a, b) => list(out, "apply", &[(**a).clone(), (**b).clone()], bound),
            Expr::Exists(vs, a) | Expr::ForAll(vs, a) => {
                let kw = if matches!(self, Expr::Exists(..)) {
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
            Expr::Lam(v, a) => {
                out.push_str(&format!("(lambda {v} "));
                bound.push(v.clone());
                a.write_sexpr(bound, out);
                bound.pop();
                out.push(')');
            }
        }
    }
}

fn fill_all(args: &[Expr], children: &[Expr]) -> Result<Vec<Expr>, SemanticsError> {
    args.iter().map(|a| a.fill_slots(children)).collect()
}

/// Renames any binder in `vars` that would capture a free variable of the
/// substituted value.
fn rename_binders(
    vars: &[String],
    body: &Expr,
    var: &str,
    value: &Expr,
    value_free: &BTreeSet<String>,
) -> (Vec<String>, Expr) {
    let mut avoid = value_free.clone();
    body.all_names(&mut avoid);
    value.all_names(&mut avoid);
    avoid.insert(var.to_string());
    avoid.extend(vars.iter().cloned());
    let mut body = body.clone();
    let mut names = Vec::with_capacity(vars.len());
    for v in vars {
        if value_free.contains(v) {
            let fresh = fresh_name(v, &avoid);
            avoid.insert(fresh.clone());
            body = body.substitute(v, &Expr::Var(fresh.clone()));
            names.push(fresh);
        } else {
            names.push(v.clone());
        }
    }
    (names, body)
}

/// `v'`, `v''`, ... until unused.
pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

#[derive(Default)]
struct Reader {
    bound: Vec<String>,
}

impl Reader {
    fn symbol(&self, s: &str) -> Result<Expr, SemanticsError> {
        if let Some(n) = s.strip_prefix('$') {
            let n: usize = n
                .parse()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| syntax(format!("bad slot `{s}`")))?;
            return Ok(Expr::Slot(n));
        }
        if let Some(v) = s.strip_prefix('?') {
            if !valid_name(v) {
                return Err(syntax(format!("bad variable `{s}`")));
            }
            return Ok(Expr::Var(v.to_string()));
        }
        if !valid_name(s) {
            return Err(syntax(format!("unexpected `{s}`")));
        }
        if self.bound.iter().any(|b| b == s) {
            Ok(Expr::Var(s.to_string()))
        } else {
            Ok(Expr::Const(s.to_string()))
        }
    }

    fn binders(&self, s: &SExp) -> Result<Vec<String>, SemanticsError> {
        let names: Vec<String> = match s {
            SExp::Symbol(v) => vec![v.clone()],
            SExp::List(items) => items
                .iter()
                .map(|i| {
                    i.as_symbol()
                        .map(String::from)
                        .ok_or_else(|| syntax("binder list must contain symbols"))
                })
                .collect::<Result<_, _>>()?,
        };
        if names.is_empty() {
            return Err(syntax("empty binder list"));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !valid_name(n) {
                return Err(syntax(format!("bad variable name `{n}`")));
            }
            if !seen.insert(n) {
                return Err(syntax(format!("variable `{n}` bound twice")));
            }
        }
        Ok(names)
    }

    fn with_bound<T>(&mut self, vars: &[String], f: impl FnOnce(&mut Self) -> T) -> T {
        let n = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let out = f(self);
        self.bound.truncate(n);
        out
    }

    fn fold_binary(
        &mut self,
        items: &[SExp],
        kw: &str,
        ctor: fn(Box<Expr>, Box<Expr>) -> Expr,
    ) -> Result<Expr, SemanticsError> {
        if items.len() < 2 {
            return Err(syntax(format!("`{kw}` needs at least two operands")));
        }
        let mut parts: Vec<Expr> = items
            .iter()
            .map(|i| self.formula(i))
            .collect::<Result<_, _>>()?;
        let mut acc = parts.pop().unwrap();
        while let Some(p) = parts.pop() {
            acc = ctor(Box::new(p), Box::new(acc));
        }
        Ok(acc)
    }

    /// Expression in formula (or general) position.
    fn formula(&mut self, s: &SExp) -> Result<Expr, SemanticsError> {
        let items = match s {
            SExp::Symbol(sym) => return self.symbol(sym),
            SExp::List(items) => items,
        };
        let Some((head, rest)) = items.split_first() else {
            return Err(syntax("empty list"));
        };
        match head {
            SExp::Symbol(h) => match h.as_str() {
                "lambda" => {
                    let [vars, body] = rest else {
                        return Err(syntax("`lambda` takes a variable and a body"));
                    };
                    let vars = self.binders(vars)?;
                    let body = self.with_bound(&vars, |r| r.formula(body))?;
                    Ok(vars.iter().rev().fold(body, |b, v| Expr::lam(v, b)))
                }
                "apply" => {
                    let Some((f, args)) = rest.split_first().filter(|(_, a)| !a.is_empty()) else {
                        return Err(syntax("`apply` takes a function and arguments"));
                    };
                    let mut acc = self.formula(f)?;
                    for a in args {
                        acc = Expr::app(acc, self.formula(a)?);
                    }
                    Ok(acc)
                }
                "not" => {
                    let [a] = rest else {
                        return Err(syntax("`not` takes one operand"));
                    };
                    Ok(Expr::Not(Box::new(self.formula(a)?)))
                }
                "and" => self.fold_binary(rest, "and", Expr::And),
                "or" => self.fold_binary(rest, "or", Expr::Or),
                "implies" => {
                    let [a, b] = rest else {
                        return Err(syntax("`implies` takes two operands"));
                    };
                    Ok(Expr::Implies(
                        Box::new(self.formula(a)?),
                        Box::new(self.formula(b)?),
                    ))
                }
                "exists" | "forall" => {
                    let [vars, body] = rest else {
                        return Err(syntax(format!("`{h}` takes a variable list and a body")));
                    };
                    let vars = self.binders(vars)?;
                    let body = Box::new(self.with_bound(&vars, |r| r.formula(body))?);
                    Ok(if h == "exists" {
                        Expr::Exists(vars, body)
                    } else {
                        Expr::ForAll(vars, body)
                    })
                }
                _ => {
                    let head_expr = self.symbol(h)?;
                    match head_expr {
                        Expr::Const(name) => {
                            let args = rest
                                .iter()
                                .map(|a| self.term(a))
                                .collect::<Result<_, _>>()?;
                            Ok(Expr::Atom(name, args))
                        }
                        other => self.application(other, rest),
                    }
                }
            },
            SExp::List(_) => {
                let f = self.formula(head)?;
                self.application(f, rest)
            }
        }
    }

    fn application(&mut self, f: Expr, args: &[SExp]) -> Result<Expr, SemanticsError> {
        if args.is_empty() {
            return Err(syntax("application without arguments"));
        }
        let mut acc = f;
        for a in args {
            acc = Expr::app(acc, self.formula(a)?);
        }
        Ok(acc)
    }

    /// Expression in argument position: plain symbols are terms and
    /// `(f ...)` with a constant head is a function term.
    fn term(&mut self, s: &SExp) -> Result<Expr, SemanticsError> {
        match s {
            SExp::Symbol(sym) => self.symbol(sym),
            SExp::List(items) => match items.first() {
                Some(SExp::Symbol(h)) if !KEYWORDS.contains(&h.as_str()) => match self.symbol(h)? {
                    Expr::Const(name) => {
                        let args = items[1..]
                            .iter()
                            .map(|a| self.term(a))
                            .collect::<Result<_, _>>()?;
                        Ok(Expr::Func(name, args))
                    }
                    other => self.application(other, &items[1..]),
                },
                _ => self.formula(s),
            },
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}
