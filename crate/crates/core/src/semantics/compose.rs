//! Syntax-directed composition: each node's meaning is its rule's
//! attachment with `$n` replaced by the meaning of the n-th child.

use crate::earley::{ParseTree, RuleRef, TreeChild};
use crate::grammar::Grammar;

use super::expr::Expr;
use super::formula::Formula;
use super::SemanticsError;

fn node_meaning(tree: &mut ParseTree, g: &Grammar) -> Result<Expr, SemanticsError> {
    let (template, what) = match tree.rule {
        RuleRef::Production(p) => {
            let prod = &g.productions()[p];
            (
                prod.attachment.clone(),
                format!("production `{}`", prod.signature()),
            )
        }
        RuleRef::Lexical(e) => {
            let entry = &g.lexicon()[e];
            (
                entry.semantics.clone(),
                format!("lexical entry `{} : {}`", entry.word, entry.category),
            )
        }
    };
    let template = template.ok_or(SemanticsError::MissingAttachment(what))?;
    let mut children = Vec::with_capacity(tree.children.len());
    for c in tree.children.iter_mut() {
        children.push(match c {
            TreeChild::Node(t) => node_meaning(t, g)?,
            TreeChild::Leaf(w) => Expr::Const(w.clone()),
        });
    }
    // Lexical nodes have the token as their only child; it is not a slot.
    let value = match tree.rule {
        RuleRef::Lexical(_) => template,
        RuleRef::Production(_) => template.fill_slots(&children)?,
    }
    .beta_reduce()?;
    tree.semantics = Some(value.clone());
    Ok(value)
}

/// Annotates every node of `tree` with its reduced meaning and returns the
/// root meaning as a closed formula.
pub fn compose(tree: &mut ParseTree, g: &Grammar) -> Result<Formula, SemanticsError> {
    let value = node_meaning(tree, g)?;
    let formula = Formula::from_expr(&value)?;
    let free = formula.free_vars();
    if !free.is_empty() {
        return Err(SemanticsError::NonClosedResult(free.into_iter().collect()));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earley::{earley_parse, extract_trees};
    use crate::grammar::load_grammar;
    use crate::semantics::canonicalize;

    const GRAMMAR: &str = include_str!("../../data/semantics.gr");

    fn meaning(grammar: &str, input: &str) -> Result<String, SemanticsError> {
        let g = load_grammar(grammar).unwrap();
        let toks: Vec<&str> = input.split_whitespace().collect();
        let chart = earley_parse(&g, &toks).unwrap();
        let mut trees = extract_trees(&chart, 1);
        let f = compose(&mut trees[0], &g)?;
        canonicalize(&f)
    }

    #[test]
    fn toy_sentences() {
        assert_eq!(meaning(GRAMMAR, "John runs").unwrap(), "(runs John)");
        assert_eq!(meaning(GRAMMAR, "Sally eats").unwrap(), "(eats Sally)");
        assert_eq!(meaning(GRAMMAR, "Julia sleeps").unwrap(), "(sleep Julia)");
        assert_eq!(
            meaning(GRAMMAR, "Maharani serves vegetarian food").unwrap(),
            "(Serves Maharani VegetarianFood)"
        );
    }

    #[test]
    fn nodes_are_annotated() {
        let g = load_grammar(GRAMMAR).unwrap();
        let chart = earley_parse(&g, &["John", "runs"]).unwrap();
        let mut t = extract_trees(&chart, 1).remove(0);
        compose(&mut t, &g).unwrap();
        let vp = t.subtrees().nth(1).unwrap();
        assert_eq!(
            vp.semantics.as_ref().unwrap().to_sexpr(),
            "(lambda x (runs x))"
        );
        assert_eq!(t.semantics.as_ref().unwrap().to_sexpr(), "(runs John)");
    }

    #[test]
    fn missing_attachment() {
        let err = meaning("S -> N\nJohn : N :: John\n", "John").unwrap_err();
        assert_eq!(
            err,
            SemanticsError::MissingAttachment("production `S -> N`".into())
        );
    }

    #[test]
    fn free_variables_remain() {
        let err = meaning("S -> N :: (P ?y $1)\nJohn : N :: John\n", "John").unwrap_err();
        assert_eq!(err, SemanticsError::NonClosedResult(vec!["y".into()]));
    }

    #[test]
    fn unreduced_result_is_not_a_formula() {
        let err = meaning("S -> N :: $1\nJohn : N :: (lambda x (P x))\n", "John").unwrap_err();
        assert!(matches!(err, SemanticsError::NotAFormula(_)));
    }

    #[test]
    fn arity_clash() {
        let err = meaning(
            "S -> N N :: (and (P $1) (P $1 $2))\nJohn : N :: John\n",
            "John John",
        )
        .unwrap_err();
        assert!(matches!(err, SemanticsError::ArityError { .. }));
    }
}
