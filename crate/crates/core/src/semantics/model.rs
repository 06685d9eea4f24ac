//! Finite world models and Tarskian truth evaluation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::formula::{Formula, Term};
use super::SemanticsError;

/// Variable name to entity.
pub type Assignment = BTreeMap<String, String>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    domain: Vec<String>,
    #[serde(default)]
    constants: BTreeMap<String, String>,
    #[serde(default)]
    predicates: BTreeMap<String, Vec<Vec<String>>>,
    /// Each row lists the arguments followed by the value.
    #[serde(default)]
    functions: BTreeMap<String, Vec<Vec<String>>>,
}

/// A finite domain with interpretations for constants, predicates and
/// (optionally) functions. Immutable once validated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorldModel {
    domain: BTreeSet<String>,
    constants: BTreeMap<String, String>,
    predicates: BTreeMap<String, BTreeSet<Vec<String>>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    functions: BTreeMap<String, BTreeMap<Vec<String>, String>>,
}

fn invalid(msg: String) -> SemanticsError {
    SemanticsError::InvalidModel(msg)
}

impl WorldModel {
    pub fn new(
        domain: impl IntoIterator<Item = String>,
        constants: BTreeMap<String, String>,
        predicates: BTreeMap<String, BTreeSet<Vec<String>>>,
        functions: BTreeMap<String, BTreeMap<Vec<String>, String>>,
    ) -> Result<WorldModel, SemanticsError> {
        let m = WorldModel {
            domain: domain.into_iter().collect(),
            constants,
            predicates,
            functions,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<WorldModel, SemanticsError> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        let mut functions = BTreeMap::new();
        for (name, rows) in raw.functions {
            let mut table = BTreeMap::new();
            for mut row in rows {
                let value = row
                    .pop()
                    .ok_or_else(|| invalid(format!("function `{name}` has an empty row")))?;
                if table.insert(row.clone(), value).is_some() {
                    return Err(invalid(format!(
                        "function `{name}` defined twice at {row:?}"
                    )));
                }
            }
            functions.insert(name, table);
        }
        let predicates = raw
            .predicates
            .into_iter()
            .map(|(p, rows)| (p, rows.into_iter().collect()))
            .collect();
        WorldModel::new(raw.domain, raw.constants, predicates, functions)
    }

    fn validate(&self) -> Result<(), SemanticsError> {
        if self.domain.is_empty() {
            return Err(invalid("domain is empty".into()));
        }
        let check = |e: &String, what: &dyn Fn() -> String| {
            if self.domain.contains(e) {
                Ok(())
            } else {
                Err(invalid(format!(
                    "{} refers to `{e}`, which is not in the domain",
                    what()
                )))
            }
        };
        for (c, e) in &self.constants {
            check(e, &|| format!("constant `{c}`"))?;
        }
        for (p, rows) in &self.predicates {
            let mut arity = None;
            for row in rows {
                if *arity.get_or_insert(row.len()) != row.len() {
                    return Err(invalid(format!(
                        "predicate `{p}` has tuples of different lengths"
                    )));
                }
                for e in row {
                    check(e, &|| format!("predicate `{p}`"))?;
                }
            }
        }
        for (f, table) in &self.functions {
            let mut arity = None;
            for (args, value) in table {
                if *arity.get_or_insert(args.len()) != args.len() {
                    return Err(invalid(format!(
                        "function `{f}` has rows of different lengths"
                    )));
                }
                for e in args.iter().chain(std::iter::once(value)) {
                    check(e, &|| format!("function `{f}`"))?;
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &BTreeSet<String> {
        &self.domain
    }

    pub fn constant(&self, name: &str) -> Option<&str> {
        self.constants.get(name).map(String::as_str)
    }

    pub fn constants(&self) -> &BTreeMap<String, String> {
        &self.constants
    }

    pub fn extension(&self, predicate: &str) -> Option<&BTreeSet<Vec<String>>> {
        self.predicates.get(predicate)
    }

    pub fn predicates(&self) -> &BTreeMap<String, BTreeSet<Vec<String>>> {
        &self.predicates
    }

    pub fn function(&self, name: &str) -> Option<&BTreeMap<Vec<String>, String>> {
        self.functions.get(name)
    }

    /// Arity from the first stored tuple; `None` for empty or unknown
    /// predicates.
    pub fn predicate_arity(&self, predicate: &str) -> Option<usize> {
        self.predicates.get(predicate)?.iter().next().map(Vec::len)
    }
}

/// Truth of `f` in `m` under `assignment`. Every symbol in `f` must be
/// interpreted and every free variable assigned.
pub fn evaluate(
    f: &Formula,
    m: &WorldModel,
    assignment: &Assignment,
) -> Result<bool, SemanticsError> {
    for (v, e) in assignment {
        if !m.domain.contains(e) {
            return Err(SemanticsError::UnknownEntity(format!(
                "{e} (assigned to {v})"
            )));
        }
    }
    if let Some(v) = f
        .free_vars()
        .into_iter()
        .find(|v| !assignment.contains_key(v))
    {
        return Err(SemanticsError::UnboundVariable(v));
    }
    let mut err = None;
    f.visit_atoms(&mut |p, args| {
        if err.is_some() {
            return;
        }
        if !m.predicates.contains_key(p) {
            err = Some(SemanticsError::UninterpretedSymbol(p.to_string()));
        } else if let Some(n) = m.predicate_arity(p).filter(|n| *n != args.len()) {
            err = Some(SemanticsError::ArityError {
                name: p.to_string(),
                expected: n,
                found: args.len(),
            });
        }
        for a in args {
            check_term(a, m, &mut err);
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut env = assignment.clone();
    eval(f, m, &mut env)
}

fn check_term(t: &Term, m: &WorldModel, err: &mut Option<SemanticsError>) {
    if err.is_some() {
        return;
    }
    match t {
        Term::Var(_) => {}
        Term::Const(c) => {
            if !m.constants.contains_key(c) {
                *err = Some(SemanticsError::UninterpretedSymbol(c.clone()));
            }
        }
        Term::Func(f, args) => {
            if !m.functions.contains_key(f) {
                *err = Some(SemanticsError::UninterpretedSymbol(f.clone()));
            }
            args.iter().for_each(|a| check_term(a, m, err));
        }
    }
}

fn denote(t: &Term, m: &WorldModel, env: &Assignment) -> Result<String, SemanticsError> {
    match t {
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| SemanticsError::UnboundVariable(v.clone())),
        Term::Const(c) => m
            .constants
            .get(c)
            .cloned()
            .ok_or_else(|| SemanticsError::UninterpretedSymbol(c.clone())),
        Term::Func(f, args) => {
            let values = args
                .iter()
                .map(|a| denote(a, m, env))
                .collect::<Result<Vec<_>, _>>()?;
            m.functions
                .get(f)
                .and_then(|table| table.get(&values))
                .cloned()
                .ok_or_else(|| {
                    SemanticsError::UninterpretedSymbol(format!("{f}({})", values.join(", ")))
                })
        }
    }
}

fn eval(f: &Formula, m: &WorldModel, env: &mut Assignment) -> Result<bool, SemanticsError> {
    Ok(match f {
        Formula::Atom(p, args) => {
            let tuple = args
                .iter()
                .map(|a| denote(a, m, env))
                .collect::<Result<Vec<_>, _>>()?;
            m.predicates.get(p).is_some_and(|ext| ext.contains(&tuple))
        }
        Formula::Not(a) => !eval(a, m, env)?,
        Formula::And(x, y) => eval(x, m, env)? && eval(y, m, env)?,
        Formula::Or(x, y) => eval(x, m, env)? || eval(y, m, env)?,
        Formula::Implies(x, y) => !eval(x, m, env)? || eval(y, m, env)?,
        Formula::Exists(vs, body) => quantify(vs, body, m, env, true)?,
        Formula::ForAll(vs, body) => quantify(vs, body, m, env, false)?,
    })
}

/// Enumerates every assignment of domain entities to `vars`. Existential
/// stops at the first witness, universal at the first counterexample.
fn quantify(
    vars: &[String],
    body: &Formula,
    m: &WorldModel,
    env: &mut Assignment,
    existential: bool,
) -> Result<bool, SemanticsError> {
    let Some((v, rest)) = vars.split_first() else {
        return eval(body, m, env);
    };
    let saved = env.get(v).cloned();
    let mut result = !existential;
    for e in &m.domain {
        env.insert(v.clone(), e.clone());
        if quantify(rest, body, m, env, existential)? == existential {
            result = existential;
            break;
        }
    }
    match saved {
        Some(old) => env.insert(v.clone(), old),
        None => env.remove(v),
    };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn julia(sleeping: bool) -> WorldModel {
        let rows = if sleeping { r#"[["j"]]"# } else { "[]" };
        WorldModel::from_json(&format!(
            r#"{{"domain":["j"],"constants":{{"Julia":"j"}},"predicates":{{"sleep":{rows}}}}}"#
        ))
        .unwrap()
    }

    fn eval_closed(f: &str, m: &WorldModel) -> Result<bool, SemanticsError> {
        evaluate(&Formula::parse(f).unwrap(), m, &Assignment::new())
    }

    #[test]
    fn julia_sleeps() {
        assert_eq!(eval_closed("(sleep Julia)", &julia(true)), Ok(true));
        assert_eq!(eval_closed("(sleep Julia)", &julia(false)), Ok(false));
    }

    #[test]
    fn quantifiers() {
        let m = WorldModel::from_json(
            r#"{"domain":["a","b","c"],
                "constants":{"Maharani":"a","VegetarianFood":"c"},
                "predicates":{"VegetarianRestaurant":[["a"],["b"]],
                              "Serves":[["a","c"],["b","c"]]}}"#,
        )
        .unwrap();
        let rule = "(forall (x) (implies (VegetarianRestaurant x) (Serves x VegetarianFood)))";
        assert_eq!(eval_closed(rule, &m), Ok(true));
        assert_eq!(eval_closed("(exists (x) (Serves x x))", &m), Ok(false));
        assert_eq!(
            eval_closed("(forall (x y) (or (Serves x y) (not (Serves x y))))", &m),
            Ok(true)
        );
    }

    #[test]
    fn errors() {
        let m = julia(true);
        assert_eq!(
            eval_closed("(snores Julia)", &m),
            Err(SemanticsError::UninterpretedSymbol("snores".into()))
        );
        assert_eq!(
            eval_closed("(sleep John)", &m),
            Err(SemanticsError::UninterpretedSymbol("John".into()))
        );
        assert_eq!(
            eval_closed("(sleep ?x)", &m),
            Err(SemanticsError::UnboundVariable("x".into()))
        );
        let a: Assignment = [("x".to_string(), "j".to_string())].into();
        assert_eq!(
            evaluate(&Formula::parse("(sleep ?x)").unwrap(), &m, &a),
            Ok(true)
        );
    }

    #[test]
    fn validation() {
        assert!(WorldModel::from_json(r#"{"domain":["j"],"constants":{"Julia":"k"}}"#).is_err());
        assert!(
            WorldModel::from_json(r#"{"domain":["j"],"predicates":{"p":[["j"],["j","j"]]}}"#)
                .is_err()
        );
        assert!(WorldModel::from_json(r#"{"domain":[]}"#).is_err());
        let m = WorldModel::from_json(
            r#"{"domain":["j","m"],"constants":{"Julia":"j"},"predicates":{"p":[["m"]]},
                "functions":{"mother":[["j","m"]]}}"#,
        )
        .unwrap();
        assert_eq!(eval_closed("(p (mother Julia))", &m), Ok(true));
    }
}
