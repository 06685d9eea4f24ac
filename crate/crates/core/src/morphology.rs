//! Morphological parsing and generation.
//!
//! A word form is built from a lexicon stem plus zero or more affixes, with
//! orthographic rewrite rules applied at each stem/affix join. Irregular
//! forms listed in the lexicon replace the corresponding stem+affix
//! combination. Parsing runs generation in reverse: every derivation the
//! resources license is enumerated once, gated through the morphotactic
//! automaton, and indexed by surface form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::fsa::{self, Automaton, AutomatonSpec, FsaError, Transition};

/// Upper bound on affixes stacked onto one stem.
const MAX_AFFIXES: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorphError {
    #[error("{file} line {line}: {message}")]
    Parse {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error("unknown stem `{0}`")]
    UnknownStem(String),
    #[error("features {features} cannot be realized on `{stem}`: {reason}")]
    UnrealizableFeatures {
        stem: String,
        features: FeatureBundle,
        reason: &'static str,
    },
    #[error(transparent)]
    Fsa(#[from] FsaError),
}

/// A flat set of feature labels such as `+PLURAL` or `+PRES-PART`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureBundle(BTreeSet<String>);

impl FeatureBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn union(&self, other: &FeatureBundle) -> FeatureBundle {
        FeatureBundle(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_disjoint(&self, other: &FeatureBundle) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Lowercase, dash-joined form used in morpheme-class names.
    fn slug(&self) -> String {
        self.labels()
            .map(|l| match l {
                "PLURAL" => "pl".to_string(),
                other => other.to_ascii_lowercase(),
            })
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl<S: Into<String>> FromIterator<S> for FeatureBundle {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        FeatureBundle(iter.into_iter().map(Into::into).collect())
    }
}

/// Accepts `+PLURAL`, `PLURAL`, `+PAST+PART`, `PAST,PART`; `-` or empty is
/// the empty bundle.
impl FromStr for FeatureBundle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(FeatureBundle::new());
        }
        let mut out = BTreeSet::new();
        for label in s.split(['+', ',']).map(str::trim).filter(|l| !l.is_empty()) {
            if !label
                .chars()
                .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '-' || c == '_')
            {
                return Err(format!("invalid feature label `{label}`"));
            }
            out.insert(label.to_string());
        }
        Ok(FeatureBundle(out))
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "+{l}")?;
        }
        Ok(())
    }
}

impl Serialize for FeatureBundle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Paradigm {
    Regular,
    Irregular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub stem: String,
    pub category: String,
    pub paradigm: Paradigm,
    pub irregular_forms: BTreeMap<FeatureBundle, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffixKind {
    Inflectional,
    Derivational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Affix {
    /// Written form, e.g. `-s`.
    pub form: String,
    pub attaches_to: String,
    pub yields: String,
    pub features: FeatureBundle,
    pub kind: AffixKind,
}

impl Affix {
    /// The form with its leading hyphen stripped.
    pub fn text(&self) -> &str {
        self.form.trim_start_matches('-')
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MorphAnalysis {
    pub surface: String,
    pub stem: String,
    pub category: String,
    pub features: FeatureBundle,
}

impl fmt::Display for MorphAnalysis {
    /// `[wolves (PN) +PLURAL wolf]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} ({})", self.surface, self.category)?;
        if !self.features.is_empty() {
            write!(f, " ({})", self.features)?;
        }
        write!(f, " {}]", self.stem)
    }
}

/// One orthographic rewrite: when the stem ends in `pattern` and the affix
/// is `affix`, the matched stem suffix plus the affix become `replacement`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoRule {
    pub pattern: String,
    pub affix: String,
    pub replacement: String,
    elems: Vec<PatternClass>,
}

#[derive(Debug, Clone, PartialEq)]
enum PatternClass {
    Literal(char),
    Consonant,
    Vowel,
    Set(Vec<char>),
}

const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

impl PatternClass {
    fn matches(&self, c: char) -> bool {
        match self {
            PatternClass::Literal(l) => *l == c,
            PatternClass::Vowel => VOWELS.contains(&c),
            PatternClass::Consonant => {
                c.is_alphabetic() && !VOWELS.contains(&c.to_ascii_lowercase())
            }
            PatternClass::Set(set) => set.contains(&c),
        }
    }
}

impl OrthoRule {
    pub fn new(pattern: &str, affix: &str, replacement: &str) -> Result<Self, String> {
        let elems = parse_pattern(pattern)?;
        if affix.trim_start_matches('-').is_empty() {
            return Err("affix must be nonempty".into());
        }
        for (i, c) in replacement.char_indices() {
            if c == '$' {
                let n = replacement[i + 1..]
                    .chars()
                    .next()
                    .and_then(|d| d.to_digit(10))
                    .ok_or_else(|| format!("`$` must be followed by a digit in `{replacement}`"))?;
                if n == 0 || n as usize > elems.len() {
                    return Err(format!("`${n}` is out of range for pattern `{pattern}`"));
                }
            }
        }
        Ok(OrthoRule {
            pattern: pattern.to_string(),
            affix: affix.to_string(),
            replacement: replacement.to_string(),
            elems,
        })
    }

    /// Rewrites `stem + affix` if this rule fires.
    pub fn apply(&self, stem: &str, affix: &str) -> Option<String> {
        if self.affix.trim_start_matches('-') != affix.trim_start_matches('-') {
            return None;
        }
        let chars: Vec<char> = stem.chars().collect();
        if chars.len() < self.elems.len() {
            return None;
        }
        let tail = &chars[chars.len() - self.elems.len()..];
        if !tail.iter().zip(&self.elems).all(|(c, e)| e.matches(*c)) {
            return None;
        }
        let mut out: String = chars[..chars.len() - self.elems.len()].iter().collect();
        let mut rep = self.replacement.chars().peekable();
        while let Some(c) = rep.next() {
            if c == '$' {
                let n = rep.next().and_then(|d| d.to_digit(10)).unwrap_or(0) as usize;
                out.push(tail[n - 1]);
            } else {
                out.push(c);
            }
        }
        Some(out)
    }
}

fn parse_pattern(pattern: &str) -> Result<Vec<PatternClass>, String> {
    let mut elems = Vec::new();
    let mut chars = pattern.chars();
    while let Some(c) = chars.next() {
        let elem = match c {
            'C' => PatternClass::Consonant,
            'V' => PatternClass::Vowel,
            '[' => {
                let set: Vec<char> = chars.by_ref().take_while(|&c| c != ']').collect();
                if set.is_empty() {
                    return Err(format!("empty character set in `{pattern}`"));
                }
                PatternClass::Set(set)
            }
            c if c.is_lowercase() || !c.is_alphabetic() => PatternClass::Literal(c),
            c => return Err(format!("unknown pattern class `{c}` in `{pattern}`")),
        };
        elems.push(elem);
    }
    if elems.is_empty() {
        return Err("pattern must be nonempty".into());
    }
    Ok(elems)
}

/// Joins `stem` and `affix`: the first matching orthographic rule rewrites
/// the join, otherwise the stem and the hyphen-stripped affix concatenate.
pub fn apply_orthography(stem: &str, affix: &Affix, ortho: &[OrthoRule]) -> String {
    join(stem, affix.text(), ortho)
}

fn join(stem: &str, affix_text: &str, ortho: &[OrthoRule]) -> String {
    ortho
        .iter()
        .find_map(|r| r.apply(stem, affix_text))
        .unwrap_or_else(|| format!("{stem}{affix_text}"))
}

fn category_name(category: &str) -> String {
    match category {
        "N" => "noun".into(),
        "V" => "verb".into(),
        other => other.to_ascii_lowercase(),
    }
}

fn stem_class(entry: &LexiconEntry) -> String {
    match (entry.paradigm, entry.category.as_str()) {
        (Paradigm::Regular, cat) => format!("reg-{}-stem", category_name(cat)),
        (Paradigm::Irregular, "N") => "irreg-sg-stem".into(),
        (Paradigm::Irregular, cat) => format!("irreg-{}-stem", category_name(cat)),
    }
}

fn irregular_form_class(category: &str, bundle: &FeatureBundle) -> String {
    match category {
        "N" => format!("irreg-{}-stem", bundle.slug()),
        cat => format!("irreg-{}-{}-form", category_name(cat), bundle.slug()),
    }
}

fn affix_class(affix: &Affix) -> String {
    let slug = affix.features.slug();
    if slug == "pl" {
        "plural-affix".into()
    } else {
        format!("{slug}-affix")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Open,
    OpenIrregular,
    Closed,
}

fn state_name(category: &str, slot: Slot) -> String {
    match slot {
        Slot::Open => category.to_string(),
        Slot::OpenIrregular => format!("{category}.irreg"),
        Slot::Closed => format!("{category}.done"),
    }
}

fn target_slot(kind: AffixKind) -> Slot {
    match kind {
        AffixKind::Inflectional => Slot::Closed,
        AffixKind::Derivational => Slot::Open,
    }
}

/// The affix an irregular form stands in for, if any.
fn affix_for<'a>(
    affixes: &'a [Affix],
    category: &str,
    bundle: &FeatureBundle,
) -> Option<&'a Affix> {
    affixes
        .iter()
        .find(|a| a.attaches_to == category && &a.features == bundle)
}

/// Builds the automaton over morpheme-class symbols that accepts exactly
/// the legal stem/affix sequences.
///
/// Every category gets an open state (after a regular stem or a
/// derivational affix), an irregular open state, and a closed state (after
/// an inflection). An irregular stem only continues with an affix when some
/// irregular entry of its category does not list that affix's features.
pub fn build_morphotactics(
    lex: &[LexiconEntry],
    affixes: &[Affix],
) -> Result<Automaton, MorphError> {
    let mut edges: BTreeSet<(String, String, String)> = BTreeSet::new();
    let mut spec = AutomatonSpec::new("start");

    for entry in lex {
        let slot = match entry.paradigm {
            Paradigm::Regular => Slot::Open,
            Paradigm::Irregular => Slot::OpenIrregular,
        };
        edges.insert((
            "start".into(),
            stem_class(entry),
            state_name(&entry.category, slot),
        ));
        for bundle in entry.irregular_forms.keys() {
            let (category, slot) = match affix_for(affixes, &entry.category, bundle) {
                Some(a) => (a.yields.as_str(), target_slot(a.kind)),
                None => (entry.category.as_str(), Slot::Closed),
            };
            edges.insert((
                "start".into(),
                irregular_form_class(&entry.category, bundle),
                state_name(category, slot),
            ));
        }
    }

    for affix in affixes {
        let symbol = affix_class(affix);
        let to = state_name(&affix.yields, target_slot(affix.kind));
        edges.insert((
            state_name(&affix.attaches_to, Slot::Open),
            symbol.clone(),
            to.clone(),
        ));
        let irregular_leaves_open = lex.iter().any(|e| {
            e.paradigm == Paradigm::Irregular
                && e.category == affix.attaches_to
                && !e.irregular_forms.contains_key(&affix.features)
        });
        if irregular_leaves_open {
            edges.insert((
                state_name(&affix.attaches_to, Slot::OpenIrregular),
                symbol,
                to,
            ));
        }
    }

    for (from, symbol, to) in edges {
        spec.edge(Transition::new(from, symbol, to));
    }
    let every_state: Vec<String> = spec
        .states
        .iter()
        .filter(|s| *s != "start")
        .cloned()
        .collect();
    for s in every_state {
        spec.final_state(s);
    }
    Ok(fsa::compile(&spec)?)
}

/// One way of building a word form from a stem.
#[derive(Debug, Clone, PartialEq)]
struct Derivation {
    analysis: MorphAnalysis,
    classes: Vec<String>,
    slot: Slot,
}

fn derivations(lex: &[LexiconEntry], affixes: &[Affix], ortho: &[OrthoRule]) -> Vec<Derivation> {
    let mut out = Vec::new();
    for entry in lex {
        let base = Derivation {
            analysis: MorphAnalysis {
                surface: entry.stem.clone(),
                stem: entry.stem.clone(),
                category: entry.category.clone(),
                features: FeatureBundle::new(),
            },
            classes: vec![stem_class(entry)],
            slot: match entry.paradigm {
                Paradigm::Regular => Slot::Open,
                Paradigm::Irregular => Slot::OpenIrregular,
            },
        };
        let mut frontier = vec![base.clone()];
        out.push(base);

        // Irregular forms that stand in for no affix at all.
        for (bundle, form) in &entry.irregular_forms {
            if affix_for(affixes, &entry.category, bundle).is_none() {
                out.push(Derivation {
                    analysis: MorphAnalysis {
                        surface: form.clone(),
                        stem: entry.stem.clone(),
                        category: entry.category.clone(),
                        features: bundle.clone(),
                    },
                    classes: vec![irregular_form_class(&entry.category, bundle)],
                    slot: Slot::Closed,
                });
            }
        }

        for _ in 0..MAX_AFFIXES {
            let mut next = Vec::new();
            for d in &frontier {
                if d.slot == Slot::Closed {
                    continue;
                }
                for affix in affixes {
                    if affix.attaches_to != d.analysis.category
                        || !affix.features.is_disjoint(&d.analysis.features)
                    {
                        continue;
                    }
                    let irregular = (d.classes.len() == 1)
                        .then(|| entry.irregular_forms.get(&affix.features))
                        .flatten();
                    let (surface, classes) = match irregular {
                        Some(form) => (
                            form.clone(),
                            vec![irregular_form_class(&entry.category, &affix.features)],
                        ),
                        None => {
                            let mut classes = d.classes.clone();
                            classes.push(affix_class(affix));
                            (
                                apply_orthography(&d.analysis.surface, affix, ortho),
                                classes,
                            )
                        }
                    };
                    next.push(Derivation {
                        analysis: MorphAnalysis {
                            surface,
                            stem: entry.stem.clone(),
                            category: affix.yields.clone(),
                            features: d.analysis.features.union(&affix.features),
                        },
                        classes,
                        slot: target_slot(affix.kind),
                    });
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
    }
    out
}

/// Loaded morphological resources plus the surface-form index built from
/// them.
#[derive(Debug, Clone)]
pub struct Morphology {
    lexicon: Vec<LexiconEntry>,
    affixes: Vec<Affix>,
    ortho: Vec<OrthoRule>,
    morphotactics: Automaton,
    by_surface: BTreeMap<String, BTreeSet<MorphAnalysis>>,
    by_stem: BTreeMap<String, Vec<MorphAnalysis>>,
}

impl Morphology {
    pub fn new(
        lexicon: Vec<LexiconEntry>,
        affixes: Vec<Affix>,
        ortho: Vec<OrthoRule>,
    ) -> Result<Self, MorphError> {
        let morphotactics = build_morphotactics(&lexicon, &affixes)?;
        let mut by_surface: BTreeMap<String, BTreeSet<MorphAnalysis>> = BTreeMap::new();
        let mut by_stem: BTreeMap<String, Vec<MorphAnalysis>> = BTreeMap::new();
        for d in derivations(&lexicon, &affixes, &ortho) {
            if !morphotactics.accepts(&d.classes) {
                continue;
            }
            by_stem
                .entry(d.analysis.stem.clone())
                .or_default()
                .push(d.analysis.clone());
            by_surface
                .entry(d.analysis.surface.clone())
                .or_default()
                .insert(d.analysis);
        }
        Ok(Morphology {
            lexicon,
            affixes,
            ortho,
            morphotactics,
            by_surface,
            by_stem,
        })
    }

    /// Loads the three TSV resources.
    pub fn from_texts(lexicon: &str, affixes: &str, ortho: &str) -> Result<Self, MorphError> {
        Morphology::new(
            parse_lexicon(lexicon)?,
            parse_affixes(affixes)?,
            parse_ortho(ortho)?,
        )
    }

    /// The resources shipped in `data/`.
    pub fn bundled() -> Self {
        Morphology::from_texts(BUNDLED_LEXICON, BUNDLED_AFFIXES, BUNDLED_ORTHO)
            .expect("bundled morphology resources are valid")
    }

    pub fn lexicon(&self) -> &[LexiconEntry] {
        &self.lexicon
    }

    pub fn affixes(&self) -> &[Affix] {
        &self.affixes
    }

    pub fn ortho(&self) -> &[OrthoRule] {
        &self.ortho
    }

    pub fn morphotactics(&self) -> &Automaton {
        &self.morphotactics
    }

    /// Every analysis whose regeneration is `surface`; empty if none.
    pub fn parse_word(&self, surface: &str) -> BTreeSet<MorphAnalysis> {
        self.by_surface.get(surface).cloned().unwrap_or_default()
    }

    /// Realizes `stem` with `features`. Irregular forms take priority over
    /// affixation.
    pub fn generate(&self, stem: &str, features: &FeatureBundle) -> Result<String, MorphError> {
        let analyses = self
            .by_stem
            .get(stem)
            .ok_or_else(|| MorphError::UnknownStem(stem.to_string()))?;
        let surfaces: BTreeSet<&str> = analyses
            .iter()
            .filter(|a| &a.features == features)
            .map(|a| a.surface.as_str())
            .collect();
        let unrealizable = |reason| MorphError::UnrealizableFeatures {
            stem: stem.to_string(),
            features: features.clone(),
            reason,
        };
        match surfaces.len() {
            0 => Err(unrealizable("no affix path or irregular form carries them")),
            1 => Ok(surfaces.into_iter().next().unwrap().to_string()),
            _ => Err(unrealizable("more than one distinct surface form")),
        }
    }

    /// Feature bundles realizable on `stem`, in sorted order.
    pub fn realizable_features(&self, stem: &str) -> Vec<FeatureBundle> {
        let set: BTreeSet<FeatureBundle> = self
            .by_stem
            .get(stem)
            .into_iter()
            .flatten()
            .map(|a| a.features.clone())
            .collect();
        set.into_iter()
            .filter(|f| self.generate(stem, f).is_ok())
            .collect()
    }

    /// Morpheme-class sequence of the derivation behind `analysis`, if any.
    pub fn morpheme_classes(&self, analysis: &MorphAnalysis) -> Option<Vec<String>> {
        derivations(&self.lexicon, &self.affixes, &self.ortho)
            .into_iter()
            .find(|d| &d.analysis == analysis)
            .map(|d| d.classes)
    }
}

/// Free-function form of [`Morphology::parse_word`].
pub fn parse_word(
    surface: &str,
    lex: &[LexiconEntry],
    affixes: &[Affix],
    ortho: &[OrthoRule],
) -> Result<BTreeSet<MorphAnalysis>, MorphError> {
    Ok(Morphology::new(lex.to_vec(), affixes.to_vec(), ortho.to_vec())?.parse_word(surface))
}

/// Free-function form of [`Morphology::generate`].
pub fn generate(
    stem: &str,
    features: &FeatureBundle,
    lex: &[LexiconEntry],
    affixes: &[Affix],
    ortho: &[OrthoRule],
) -> Result<String, MorphError> {
    Morphology::new(lex.to_vec(), affixes.to_vec(), ortho.to_vec())?.generate(stem, features)
}

pub const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.tsv");
pub const BUNDLED_AFFIXES: &str = include_str!("../data/affixes.tsv");
pub const BUNDLED_ORTHO: &str = include_str!("../data/ortho.tsv");

fn tsv_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed.split('\t').map(str::trim).collect()))
        }
    })
}

fn valid_category(c: &str) -> bool {
    !c.is_empty() && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-')
}

/// Parses `stem<TAB>category<TAB>paradigm<TAB>key=value;key=value`.
pub fn parse_lexicon(text: &str) -> Result<Vec<LexiconEntry>, MorphError> {
    let mut out = Vec::new();
    for (line, fields) in tsv_lines(text) {
        let err = |message: String| MorphError::Parse {
            file: "lexicon",
            line,
            message,
        };
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!(
                "expected 3 or 4 fields, found {}",
                fields.len()
            )));
        }
        let stem = fields[0];
        if stem.is_empty() {
            return Err(err("empty stem".into()));
        }
        if !valid_category(fields[1]) {
            return Err(err(format!("invalid category `{}`", fields[1])));
        }
        let paradigm = match fields[2] {
            "regular" => Paradigm::Regular,
            "irregular" => Paradigm::Irregular,
            other => return Err(err(format!("unknown paradigm `{other}`"))),
        };
        let mut irregular_forms = BTreeMap::new();
        if let Some(forms) = fields.get(3).filter(|f| !f.is_empty() && **f != "-") {
            for pair in forms.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected key=value, found `{pair}`")))?;
                let bundle: FeatureBundle = key.parse().map_err(err)?;
                if bundle.is_empty() || value.trim().is_empty() {
                    return Err(err(format!("empty irregular form entry `{pair}`")));
                }
                irregular_forms.insert(bundle, value.trim().to_string());
            }
        }
        if (paradigm == Paradigm::Irregular) == irregular_forms.is_empty() {
            return Err(err(
                "irregular paradigm requires irregular forms, and only it may list them".into(),
            ));
        }
        out.push(LexiconEntry {
            stem: stem.to_string(),
            category: fields[1].to_string(),
            paradigm,
            irregular_forms,
        });
    }
    Ok(out)
}

/// Parses `form<TAB>attaches_to<TAB>yields<TAB>features<TAB>kind`.
pub fn parse_affixes(text: &str) -> Result<Vec<Affix>, MorphError> {
    let mut out = Vec::new();
    for (line, fields) in tsv_lines(text) {
        let err = |message: String| MorphError::Parse {
            file: "affixes",
            line,
            message,
        };
        let [form, attaches_to, yields, features, kind] = fields.as_slice() else {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        };
        if form.trim_start_matches('-').is_empty() {
            return Err(err("empty affix form".into()));
        }
        for c in [attaches_to, yields] {
            if !valid_category(c) {
                return Err(err(format!("invalid category `{c}`")));
            }
        }
        let kind = match *kind {
            "inflectional" => AffixKind::Inflectional,
            "derivational" => AffixKind::Derivational,
            other => return Err(err(format!("unknown affix kind `{other}`"))),
        };
        // Inflection stays within a category family: the category itself or
        // its plural-marked variant (N -> PN).
        if kind == AffixKind::Inflectional
            && yields != attaches_to
            && *yields != format!("P{attaches_to}")
        {
            return Err(err(format!(
                "inflectional affix cannot change category {attaches_to} to {yields}"
            )));
        }
        let features: FeatureBundle = features.parse().map_err(err)?;
        if features.is_empty() {
            return Err(err("affix contributes no features".into()));
        }
        out.push(Affix {
            form: form.to_string(),
            attaches_to: attaches_to.to_string(),
            yields: yields.to_string(),
            features,
            kind,
        });
    }
    Ok(out)
}

/// Parses `pattern<TAB>affix<TAB>replacement`, keeping file order.
pub fn parse_ortho(text: &str) -> Result<Vec<OrthoRule>, MorphError> {
    tsv_lines(text)
        .map(|(line, fields)| {
            let err = |message: String| MorphError::Parse {
                file: "ortho",
                line,
                message,
            };
            let [pattern, affix, replacement] = fields.as_slice() else {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            };
            OrthoRule::new(pattern, affix, replacement).map_err(err)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle(s: &str) -> FeatureBundle {
        s.parse().unwrap()
    }

    fn analysis(surface: &str, stem: &str, cat: &str, features: &str) -> MorphAnalysis {
        MorphAnalysis {
            surface: surface.into(),
            stem: stem.into(),
            category: cat.into(),
            features: bundle(features),
        }
    }

    #[test]
    fn parses_paper_examples() {
        let m = Morphology::bundled();
        assert_eq!(
            m.parse_word("wolves"),
            BTreeSet::from([analysis("wolves", "wolf", "PN", "+PLURAL")])
        );
        assert_eq!(
            m.parse_word("running"),
            BTreeSet::from([analysis("running", "run", "V", "+PRES-PART")])
        );
        assert_eq!(
            m.parse_word("geese"),
            BTreeSet::from([analysis("geese", "goose", "PN", "+PLURAL")])
        );
        assert!(m.parse_word("zzrq").is_empty());
    }

    #[test]
    fn irregulars_block_regular_affixation() {
        let m = Morphology::bundled();
        assert!(m.parse_word("gooses").is_empty());
        assert!(m.parse_word("eated").is_empty());
        assert_eq!(m.generate("goose", &bundle("+PLURAL")).unwrap(), "geese");
        assert_eq!(m.generate("eat", &bundle("+PAST")).unwrap(), "ate");
        assert_eq!(m.generate("eat", &bundle("+PRES-PART")).unwrap(), "eating");
    }

    #[test]
    fn generation_goldens() {
        let m = Morphology::bundled();
        assert_eq!(m.generate("wolf", &bundle("+PLURAL")).unwrap(), "wolves");
        assert_eq!(m.generate("dog", &bundle("+PLURAL")).unwrap(), "dogs");
        assert_eq!(m.generate("city", &bundle("+PLURAL")).unwrap(), "cities");
        assert_eq!(m.generate("fox", &bundle("+PLURAL")).unwrap(), "foxes");
        assert_eq!(m.generate("carry", &bundle("+PAST")).unwrap(), "carried");
        assert_eq!(
            m.generate("computerize", &bundle("+NMLZ")).unwrap(),
            "computerization"
        );
        assert_eq!(
            m.generate("computerize", &bundle("+NMLZ+PLURAL")).unwrap(),
            "computerizations"
        );
    }

    #[test]
    fn generation_errors() {
        let m = Morphology::bundled();
        assert_eq!(
            m.generate("blorp", &bundle("+PLURAL")),
            Err(MorphError::UnknownStem("blorp".into()))
        );
        assert!(matches!(
            m.generate("dog", &bundle("+PAST")),
            Err(MorphError::UnrealizableFeatures { .. })
        ));
    }

    #[test]
    fn orthography() {
        let ortho = parse_ortho(BUNDLED_ORTHO).unwrap();
        let affixes = parse_affixes(BUNDLED_AFFIXES).unwrap();
        let plural = &affixes[0];
        let ing = affixes.iter().find(|a| a.form == "-ing").unwrap();
        assert_eq!(apply_orthography("city", plural, &ortho), "cities");
        assert_eq!(apply_orthography("dog", plural, &ortho), "dogs");
        assert_eq!(apply_orthography("day", plural, &ortho), "days");
        assert_eq!(apply_orthography("run", ing, &ortho), "running");
        assert_eq!(apply_orthography("roll", ing, &ortho), "rolling");
        assert_eq!(apply_orthography("illustrate", ing, &ortho), "illustrating");
    }

    #[test]
    fn first_matching_rule_wins() {
        let rules = vec![
            OrthoRule::new("y", "-s", "ys").unwrap(),
            OrthoRule::new("Cy", "-s", "$1ies").unwrap(),
        ];
        assert_eq!(join("city", "s", &rules), "citys");
        assert_eq!(join("city", "s", &rules[1..]), "cities");
    }

    #[test]
    fn noun_morphotactics() {
        let m = Morphology::bundled();
        let a = m.morphotactics();
        assert!(a.accepts(&["reg-noun-stem", "plural-affix"]));
        assert!(a.accepts(&["reg-noun-stem"]));
        assert!(a.accepts(&["irreg-pl-stem"]));
        assert!(a.accepts(&["irreg-sg-stem"]));
        assert!(!a.accepts(&["irreg-pl-stem", "plural-affix"]));
        assert!(!a.accepts(&["irreg-sg-stem", "plural-affix"]));
        assert!(!a.accepts(&["reg-noun-stem", "plural-affix", "plural-affix"]));
        assert!(!a.accepts::<&str>(&[]));
    }

    #[test]
    fn ambiguity_is_preserved() {
        let m = Morphology::bundled();
        let flours = m.parse_word("flours");
        assert_eq!(
            flours,
            BTreeSet::from([
                analysis("flours", "flour", "PN", "+PLURAL"),
                analysis("flours", "flour", "V", "+3SG"),
            ])
        );
    }

    #[test]
    fn resource_validation() {
        assert!(parse_lexicon("goose\tN\tirregular\n").is_err());
        assert!(parse_lexicon("dog\tN\tregular\tPLURAL=dogz\n").is_err());
        assert!(parse_lexicon("dog\tN\tweird\n").is_err());
        assert!(parse_affixes("-s\tN\tV\tPLURAL\tinflectional\n").is_err());
        assert!(parse_affixes("-ation\tV\tN\tNMLZ\tderivational\n").is_ok());
        assert!(parse_ortho("\t-s\tx\n").is_err());
        assert!(parse_ortho("Cy\t-s\t$3ies\n").is_err());
    }
}
