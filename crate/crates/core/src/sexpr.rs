//! Minimal S-expression reader shared by the formula and attachment syntaxes.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExp {
    Symbol(String),
    List(Vec<SExp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SExpError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SExpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for SExpError {}

impl SExp {
    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExp::Symbol(s) => Some(s),
            SExp::List(_) => None,
        }
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Symbol(s) => f.write_str(s),
            SExp::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')'
}

/// Parses exactly one S-expression from `text`.
pub fn parse(text: &str) -> Result<SExp, SExpError> {
    let mut pos = 0;
    let exp = parse_at(text, &mut pos)?;
    skip_ws(text, &mut pos);
    if pos < text.len() {
        return Err(SExpError {
            offset: pos,
            message: "trailing input after expression".into(),
        });
    }
    Ok(exp)
}

fn skip_ws(text: &str, pos: &mut usize) {
    while let Some(c) = text[*pos..].chars().next() {
        if c.is_whitespace() {
            *pos += c.len_utf8();
        } else {
            break;
        }
    }
}

fn parse_at(text: &str, pos: &mut usize) -> Result<SExp, SExpError> {
    skip_ws(text, pos);
    let start = *pos;
    match text[*pos..].chars().next() {
        None => Err(SExpError {
            offset: start,
            message: "unexpected end of input".into(),
        }),
        Some(')') => Err(SExpError {
            offset: start,
            message: "unexpected `)`".into(),
        }),
        Some('(') => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(text, pos);
                match text[*pos..].chars().next() {
                    None => {
                        return Err(SExpError {
                            offset: start,
                            message: "unclosed `(`".into(),
                        })
                    }
                    Some(')') => {
                        *pos += 1;
                        return Ok(SExp::List(items));
                    }
                    Some(_) => items.push(parse_at(text, pos)?),
                }
            }
        }
        Some(_) => {
            let len: usize = text[*pos..]
                .chars()
                .take_while(|c| !is_delimiter(*c))
                .map(char::len_utf8)
                .sum();
            *pos += len;
            Ok(SExp::Symbol(text[start..*pos].to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let e = parse("(forall (x) (implies (R x) (S x c)))").unwrap();
        assert_eq!(e.to_string(), "(forall (x) (implies (R x) (S x c)))");
        assert_eq!(parse("  atom ").unwrap(), SExp::Symbol("atom".into()));
        assert_eq!(parse("()").unwrap(), SExp::List(vec![]));
    }

    #[test]
    fn reports_errors() {
        assert!(parse("(a b").is_err());
        assert!(parse("a b").is_err());
        assert!(parse(")").is_err());
        assert!(parse("").is_err());
    }
}
