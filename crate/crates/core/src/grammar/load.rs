//! Reader for the grammar file format.

use super::{
    Constraint, ConstraintValue, FValue, FeaturePath, FeatureStructure, Grammar, GrammarError,
    LexicalEntry, PathNode, Production, Symbol,
};
use crate::semantics::Expr;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Arrow,
    Colon,
    Pipe,
    LBrace,
    RBrace,
    Semi,
    Eq,
    Path(String),
    Attach(String),
}

struct Lexed {
    tok: Tok,
    col: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::SyntaxError {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str, line: usize) -> Result<Vec<Lexed>, GrammarError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let single = match c {
            '|' => Some(Tok::Pipe),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Lexed { tok, col });
            i += 1;
            continue;
        }
        match c {
            '<' => {
                let end = chars[i..]
                    .iter()
                    .position(|&d| d == '>')
                    .ok_or_else(|| syntax(line, col, "unclosed `<`"))?;
                out.push(Lexed {
                    tok: Tok::Path(chars[i + 1..i + end].iter().collect()),
                    col,
                });
                i += end + 1;
            }
            '\'' => {
                let mut word = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(syntax(line, col, "unclosed quote")),
                        Some('\\') => {
                            let next = chars
                                .get(i + 1)
                                .ok_or_else(|| syntax(line, i + 1, "dangling escape"))?;
                            word.push(*next);
                            i += 2;
                        }
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(&d) => {
                            word.push(d);
                            i += 1;
                        }
                    }
                }
                if word.is_empty() {
                    return Err(syntax(line, col, "empty quoted word"));
                }
                out.push(Lexed {
                    tok: Tok::Quoted(word),
                    col,
                });
            }
            _ => {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !matches!(chars[i], '|' | '{' | '}' | ';' | '=' | '<' | '\'' | '#')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "->" => out.push(Lexed {
                        tok: Tok::Arrow,
                        col,
                    }),
                    ":" => out.push(Lexed {
                        tok: Tok::Colon,
                        col,
                    }),
                    "::" => {
                        // The attachment runs to the next `|` outside
                        // parentheses, a comment, or the end of the line.
                        let mut depth = 0i32;
                        let begin = i;
                        while i < chars.len() {
                            match chars[i] {
                                '(' => depth += 1,
                                ')' => depth -= 1,
                                '|' | '#' if depth <= 0 => break,
                                _ => {}
                            }
                            i += 1;
                        }
                        let body: String = chars[begin..i].iter().collect();
                        if body.trim().is_empty() {
                            return Err(syntax(line, col, "`::` without an attachment"));
                        }
                        out.push(Lexed {
                            tok: Tok::Attach(body.trim().to_string()),
                            col: col + 2,
                        });
                    }
                    _ => out.push(Lexed {
                        tok: Tok::Word(word),
                        col,
                    }),
                }
            }
        }
    }
    Ok(out)
}

fn parse_path(text: &str, line: usize, col: usize) -> Result<FeaturePath, GrammarError> {
    let mut parts = text.split_whitespace();
    let bad = || GrammarError::BadConstraintPath {
        line,
        path: format!("<{text}>"),
    };
    let head = parts
        .next()
        .ok_or_else(|| syntax(line, col, "empty path"))?;
    let node = if head == "lhs" {
        PathNode::Lhs
    } else if let Some(n) = head.strip_prefix("rhs") {
        PathNode::Rhs(n.parse().map_err(|_| bad())?)
    } else {
        return Err(bad());
    };
    Ok(FeaturePath {
        node,
        features: parts.map(String::from).collect(),
    })
}

fn parse_attachment(text: &str, line: usize, col: usize) -> Result<Expr, GrammarError> {
    Expr::parse(text).map_err(|e| syntax(line, col, format!("bad attachment: {e}")))
}

struct Cursor<'a> {
    toks: &'a [Lexed],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |l| l.col)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> GrammarError {
        syntax(self.line, self.col(), message)
    }

    /// `{ ... }` block: a list of items separated by `;`.
    fn braced<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, GrammarError>,
    ) -> Result<Vec<T>, GrammarError> {
        let mut items = Vec::new();
        if self.peek() != Some(&Tok::LBrace) {
            return Ok(items);
        }
        self.next();
        if self.peek() == Some(&Tok::RBrace) {
            self.next();
            return Ok(items);
        }
        loop {
            items.push(item(self)?);
            match self.next() {
                Some(Tok::Semi) => {}
                Some(Tok::RBrace) => return Ok(items),
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected `;` or `}`"));
                }
            }
        }
    }

    fn attachment(&mut self) -> Result<Option<Expr>, GrammarError> {
        if let Some(Tok::Attach(text)) = self.peek() {
            let col = self.col();
            self.next();
            return parse_attachment(text, self.line, col).map(Some);
        }
        Ok(None)
    }

    fn constraint(&mut self) -> Result<Constraint, GrammarError> {
        let col = self.col();
        let Some(Tok::Path(left)) = self.next() else {
            self.pos -= 1;
            return Err(self.err("expected a path like `<rhs1 NUMBER>`"));
        };
        let left = parse_path(left, self.line, col)?;
        if self.next() != Some(&Tok::Eq) {
            self.pos -= 1;
            return Err(self.err("expected `=`"));
        }
        let col = self.col();
        let right = match self.next() {
            Some(Tok::Path(p)) => ConstraintValue::Path(parse_path(p, self.line, col)?),
            Some(Tok::Word(a)) => ConstraintValue::Atom(a.clone()),
            _ => {
                self.pos -= 1;
                return Err(self.err("expected a path or an atom"));
            }
        };
        Ok(Constraint { left, right })
    }

    fn lexical_feature(&mut self) -> Result<(Vec<String>, String), GrammarError> {
        let mut path = Vec::new();
        while let Some(Tok::Word(w)) = self.peek() {
            path.push(w.clone());
            self.next();
        }
        if path.is_empty() {
            return Err(self.err("expected a feature name"));
        }
        if self.next() != Some(&Tok::Eq) {
            self.pos -= 1;
            return Err(self.err("expected `=`"));
        }
        match self.next() {
            Some(Tok::Word(a)) => Ok((path, a.clone())),
            _ => {
                self.pos -= 1;
                Err(self.err("expected an atomic value"))
            }
        }
    }
}

/// Parses and validates a grammar file.
pub fn load_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut start: Option<String> = None;
    let mut productions = Vec::new();
    let mut lexicon = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_start();
        if let Some(rest) = trimmed.strip_prefix("%start") {
            let name = rest.split('#').next().unwrap_or("").trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(syntax(line, 1, "`%start` takes one symbol"));
            }
            if start.is_some() {
                return Err(syntax(line, 1, "duplicate `%start`"));
            }
            start = Some(name.to_string());
            continue;
        }
        let toks = lex(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line,
            end_col: raw.chars().count() + 1,
        };
        match toks.get(1).map(|t| &t.tok) {
            Some(Tok::Arrow) => productions.extend(parse_rule(&mut cur)?),
            Some(Tok::Colon) => lexicon.push(parse_entry(&mut cur)?),
            _ => {
                cur.pos = 1;
                return Err(cur.err("expected `->` or `:`"));
            }
        }
    }
    let start = match start {
        Some(s) => s,
        None => productions
            .first()
            .map(|p: &Production| p.lhs.clone())
            .ok_or_else(|| syntax(1, 1, "grammar has no productions and no `%start`"))?,
    };
    Grammar::new(&start, productions, lexicon)
}

fn parse_rule(cur: &mut Cursor) -> Result<Vec<Production>, GrammarError> {
    let lhs = match cur.next() {
        Some(Tok::Word(w)) => w.clone(),
        _ => {
            cur.pos -= 1;
            return Err(cur.err("expected a nonterminal"));
        }
    };
    cur.next(); // the arrow
    let mut out = Vec::new();
    loop {
        let mut rhs = Vec::new();
        loop {
            match cur.peek() {
                Some(Tok::Word(w)) => rhs.push(Symbol::NonTerminal(w.clone())),
                Some(Tok::Quoted(w)) => rhs.push(Symbol::Terminal(w.clone())),
                _ => break,
            }
            cur.next();
        }
        if rhs.is_empty() {
            return Err(GrammarError::EpsilonProduction {
                line: cur.line,
                lhs,
            });
        }
        let constraints = cur.braced(Cursor::constraint)?;
        let attachment = cur.attachment()?;
        out.push(Production {
            lhs: lhs.clone(),
            rhs,
            constraints,
            attachment,
            line: cur.line,
        });
        match cur.next() {
            None => return Ok(out),
            Some(Tok::Pipe) => {}
            Some(_) => {
                cur.pos -= 1;
                return Err(cur.err("unexpected token"));
            }
        }
    }
}

fn parse_entry(cur: &mut Cursor) -> Result<LexicalEntry, GrammarError> {
    let word = match cur.next() {
        Some(Tok::Word(w)) | Some(Tok::Quoted(w)) => w.clone(),
        _ => unreachable!("checked by caller"),
    };
    cur.next(); // the colon
    let category = match cur.next() {
        Some(Tok::Word(w)) => w.clone(),
        _ => {
            cur.pos -= 1;
            return Err(cur.err("expected a category"));
        }
    };
    let mut features = FeatureStructure::new();
    let col = cur.col();
    for (path, atom) in cur.braced(Cursor::lexical_feature)? {
        features
            .unify_at(&path, &FValue::Atom(atom))
            .map_err(|e| syntax(cur.line, col, format!("inconsistent features: {e}")))?;
    }
    let semantics = cur.attachment()?;
    if cur.peek().is_some() {
        return Err(cur.err("unexpected token after lexical entry"));
    }
    Ok(LexicalEntry {
        word,
        category,
        features,
        semantics,
        line: cur.line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const AIR: &str = include_str!("../../data/air.gr");

    #[test]
    fn air_grammar_has_eleven_productions() {
        let g = load_grammar(AIR).unwrap();
        assert_eq!(g.productions().len(), 11);
        assert_eq!(g.start(), "S");
    }

    #[test]
    fn round_trip_is_fixed_point() {
        for text in [
            AIR,
            include_str!("../../data/agreement.gr"),
            include_str!("../../data/semantics.gr"),
        ] {
            let g = load_grammar(text).unwrap();
            let again = load_grammar(&g.to_text()).unwrap();
            assert_eq!(again, g);
            assert_eq!(again.to_text(), g.to_text());
        }
    }

    #[test]
    fn epsilon_rejected() {
        assert!(matches!(
            load_grammar("NP ->\n"),
            Err(GrammarError::EpsilonProduction { line: 1, .. })
        ));
        assert!(matches!(
            load_grammar("S -> A |\na : A\n"),
            Err(GrammarError::EpsilonProduction { .. })
        ));
    }

    #[test]
    fn constraint_path_out_of_range() {
        let err =
            load_grammar("S -> A B { <lhs NUMBER> = <rhs3 NUMBER> }\na : A\nb : B\n").unwrap_err();
        assert!(
            matches!(err, GrammarError::BadConstraintPath { line: 1, .. }),
            "{err:?}"
        );
        assert!(matches!(
            load_grammar("S -> A { <mid X> = Y }\na : A\n"),
            Err(GrammarError::BadConstraintPath { .. })
        ));
    }

    #[test]
    fn undefined_and_reserved_symbols() {
        assert!(matches!(
            load_grammar("S -> A B\na : A\n"),
            Err(GrammarError::UndefinedSymbol { symbol, .. }) if symbol == "B"
        ));
        assert!(matches!(
            load_grammar("%start T\nS -> A\na : A\n"),
            Err(GrammarError::UndefinedSymbol { symbol, .. }) if symbol == "T"
        ));
        assert!(matches!(
            load_grammar("S -> _cnf_A\na : _cnf_A\n"),
            Err(GrammarError::SyntaxError { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = load_grammar("S -> A\na : A\nB = c\n").unwrap_err();
        assert_eq!(
            err,
            GrammarError::SyntaxError {
                line: 3,
                column: 3,
                message: "expected `->` or `:`".into()
            }
        );
        let err = load_grammar("S -> A { <lhs X> <rhs1 X> }\na : A\n").unwrap_err();
        assert!(
            matches!(
                err,
                GrammarError::SyntaxError {
                    line: 1,
                    column: 18,
                    ..
                }
            ),
            "{err:?}"
        );
        assert!(load_grammar("S -> A :: (lambda\na : A\n").is_err());
    }

    #[test]
    fn alternatives_keep_their_own_annotations() {
        let g = load_grammar(
            "NP -> Det N { <lhs NUM> = <rhs2 NUM> } :: ($1 $2) | PN :: $1 | 'vegetarian' 'food' :: VegetarianFood\n\
             a : Det\ncat : N { NUM = SG }\nJohn : PN :: John\n",
        )
        .unwrap();
        let ps = g.productions();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps[0].constraints.len(), 1);
        assert_eq!(ps[1].constraints.len(), 0);
        assert_eq!(ps[1].attachment.as_ref().unwrap().to_sexpr(), "$1");
        assert_eq!(ps[2].rhs, vec![Symbol::t("vegetarian"), Symbol::t("food")]);
        assert_eq!(g.lexicon()[1].features.to_string(), "[NUM=SG]");
    }

    #[test]
    fn nested_lexical_features() {
        let g = load_grammar("S -> N\ngeese : N { AGR NUM = PL ; AGR PER = 3 }\n").unwrap();
        assert_eq!(g.lexicon()[0].features.to_string(), "[AGR=[NUM=PL, PER=3]]");
        assert!(load_grammar("S -> N\nx : N { A = 1 ; A = 2 }\n").is_err());
    }
}
