//! Feature structures as finite trees, with unification and subsumption.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FValue {
    Atom(String),
    Fs(FeatureStructure),
}

/// Feature label to value, kept in label order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureStructure(BTreeMap<String, FValue>);

/// Why unification failed: the first conflicting path in feature order and
/// the two clashing values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifyFailure {
    pub path: Vec<String>,
    pub left: String,
    pub right: String,
}

impl fmt::Display for UnifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "feature clash at <{}>: {} vs {}",
            self.path.join(" "),
            self.left,
            self.right
        )
    }
}

impl fmt::Display for FValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FValue::Atom(a) => f.write_str(a),
            FValue::Fs(fs) => write!(f, "{fs}"),
        }
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("]")
    }
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, feature: &str) -> Option<&FValue> {
        self.0.get(feature)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &FValue)> {
        self.0.iter()
    }

    pub fn insert(&mut self, feature: impl Into<String>, value: FValue) -> Option<FValue> {
        self.0.insert(feature.into(), value)
    }

    /// Builder for atomic features.
    pub fn with(mut self, feature: &str, atom: &str) -> Self {
        self.0
            .insert(feature.to_string(), FValue::Atom(atom.to_string()));
        self
    }

    /// Builder for nested features.
    pub fn with_fs(mut self, feature: &str, fs: FeatureStructure) -> Self {
        self.0.insert(feature.to_string(), FValue::Fs(fs));
        self
    }

    /// Value at `path`; `Err` if the path runs through an atom.
    pub fn at_path(&self, path: &[String]) -> Result<Option<&FValue>, UnifyFailure> {
        let Some((first, rest)) = path.split_first() else {
            return Err(UnifyFailure {
                path: vec![],
                left: "empty path".into(),
                right: self.to_string(),
            });
        };
        match (self.0.get(first), rest.is_empty()) {
            (None, _) => Ok(None),
            (Some(v), true) => Ok(Some(v)),
            (Some(FValue::Fs(inner)), false) => inner.at_path(rest).map_err(|mut e| {
                e.path.insert(0, first.clone());
                e
            }),
            (Some(FValue::Atom(a)), false) => Err(UnifyFailure {
                path: vec![first.clone()],
                left: a.clone(),
                right: format!("<{}>", rest.join(" ")),
            }),
        }
    }

    /// Unifies `value` into the structure at `path`, creating intermediate
    /// structures. Returns whether anything changed.
    pub fn unify_at(&mut self, path: &[String], value: &FValue) -> Result<bool, UnifyFailure> {
        let Some((first, rest)) = path.split_first() else {
            return match value {
                FValue::Fs(fs) => {
                    let merged = unify(self, fs)?;
                    let changed = merged != *self;
                    *self = merged;
                    Ok(changed)
                }
                FValue::Atom(a) => Err(UnifyFailure {
                    path: vec![],
                    left: self.to_string(),
                    right: a.clone(),
                }),
            };
        };
        let prefix = |mut e: UnifyFailure| {
            e.path.insert(0, first.clone());
            e
        };
        if rest.is_empty() {
            let merged = match self.0.get(first) {
                None => value.clone(),
                Some(old) => unify_values(old, value).map_err(prefix)?,
            };
            let changed = self.0.get(first) != Some(&merged);
            self.0.insert(first.clone(), merged);
            return Ok(changed);
        }
        match self
            .0
            .entry(first.clone())
            .or_insert_with(|| FValue::Fs(FeatureStructure::new()))
        {
            FValue::Fs(inner) => inner.unify_at(rest, value).map_err(prefix),
            FValue::Atom(a) => Err(UnifyFailure {
                path: vec![first.clone()],
                left: a.clone(),
                right: value.to_string(),
            }),
        }
    }

    /// All atomic paths, in feature order.
    pub fn paths(&self) -> Vec<(Vec<String>, String)> {
        let mut out = Vec::new();
        for (k, v) in &self.0 {
            match v {
                FValue::Atom(a) => out.push((vec![k.clone()], a.clone())),
                FValue::Fs(inner) => {
                    for (mut p, a) in inner.paths() {
                        p.insert(0, k.clone());
                        out.push((p, a));
                    }
                }
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.0
            .values()
            .map(|v| match v {
                FValue::Atom(_) => 1,
                FValue::Fs(inner) => 1 + inner.depth(),
            })
            .max()
            .unwrap_or(0)
    }
}

/// Unifies two values: equal atoms, or structures recursively.
pub fn unify_values(a: &FValue, b: &FValue) -> Result<FValue, UnifyFailure> {
    match (a, b) {
        (FValue::Atom(x), FValue::Atom(y)) if x == y => Ok(a.clone()),
        (FValue::Fs(x), FValue::Fs(y)) => unify(x, y).map(FValue::Fs),
        _ => Err(UnifyFailure {
            path: vec![],
            left: a.to_string(),
            right: b.to_string(),
        }),
    }
}

/// Most general structure subsumed by both inputs, or the first clash
/// found walking shared features in label order.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Result<FeatureStructure, UnifyFailure> {
    let mut out = a.clone();
    for (k, bv) in &b.0 {
        let merged = match a.0.get(k) {
            None => bv.clone(),
            Some(av) => unify_values(av, bv).map_err(|mut e| {
                e.path.insert(0, k.clone());
                e
            })?,
        };
        out.0.insert(k.clone(), merged);
    }
    Ok(out)
}

/// True iff everything `general` says also holds in `specific`.
pub fn subsumes(general: &FeatureStructure, specific: &FeatureStructure) -> bool {
    general
        .0
        .iter()
        .all(|(k, gv)| match (gv, specific.0.get(k)) {
            (FValue::Atom(x), Some(FValue::Atom(y))) => x == y,
            (FValue::Fs(x), Some(FValue::Fs(y))) => subsumes(x, y),
            _ => false,
        })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad feature structure at offset {offset}: {message}")]
pub struct FsParseError {
    pub offset: usize,
    pub message: String,
}

impl FromStr for FeatureStructure {
    type Err = FsParseError;

    /// Reads the display form, e.g. `[AGR=[NUM=SG, PER=3], CAT=N]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let fs = parse_fs(&chars, &mut pos)?;
        skip(&chars, &mut pos);
        if pos != chars.len() {
            return Err(FsParseError {
                offset: pos,
                message: "trailing input".into(),
            });
        }
        Ok(fs)
    }
}

fn skip(c: &[char], pos: &mut usize) {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn expect(c: &[char], pos: &mut usize, want: char) -> Result<(), FsParseError> {
    skip(c, pos);
    if c.get(*pos) == Some(&want) {
        *pos += 1;
        Ok(())
    } else {
        Err(FsParseError {
            offset: *pos,
            message: format!("expected `{want}`"),
        })
    }
}

fn ident(c: &[char], pos: &mut usize) -> Result<String, FsParseError> {
    skip(c, pos);
    let start = *pos;
    while *pos < c.len() && !matches!(c[*pos], '[' | ']' | '=' | ',') && !c[*pos].is_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(FsParseError {
            offset: start,
            message: "expected a label".into(),
        });
    }
    Ok(c[start..*pos].iter().collect())
}

fn parse_fs(c: &[char], pos: &mut usize) -> Result<FeatureStructure, FsParseError> {
    expect(c, pos, '[')?;
    let mut fs = FeatureStructure::new();
    skip(c, pos);
    if c.get(*pos) == Some(&']') {
        *pos += 1;
        return Ok(fs);
    }
    loop {
        let at = *pos;
        let key = ident(c, pos)?;
        expect(c, pos, '=')?;
        skip(c, pos);
        let value = if c.get(*pos) == Some(&'[') {
            FValue::Fs(parse_fs(c, pos)?)
        } else {
            FValue::Atom(ident(c, pos)?)
        };
        if fs.0.insert(key.clone(), value).is_some() {
            return Err(FsParseError {
                offset: at,
                message: format!("feature `{key}` repeated"),
            });
        }
        skip(c, pos);
        match c.get(*pos) {
            Some(',') => *pos += 1,
            Some(']') => {
                *pos += 1;
                return Ok(fs);
            }
            _ => {
                return Err(FsParseError {
                    offset: *pos,
                    message: "expected `,` or `]`".into(),
                })
            }
        }
    }
}
