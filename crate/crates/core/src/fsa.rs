//! Deterministic finite-state recognizers, optionally weighted.
//!
//! An [`AutomatonSpec`] is the declarative form (what a spec file or a
//! builder produces); [`Automaton`] is the compiled, table-driven machine.
//! Symbols are opaque strings, so the same engine runs over characters of a
//! word or over morpheme-class labels.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Tolerance used when checking that outgoing weights stay sub-stochastic.
const WEIGHT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FsaError {
    #[error("determinism violation: state `{state}` has two transitions on `{symbol}`")]
    DeterminismViolation { state: String, symbol: String },
    #[error("transition or declaration references unknown state `{0}`")]
    DanglingState(String),
    #[error("bad weight {weight} on transition {from} --{symbol}-->: {reason}")]
    BadWeight {
        from: String,
        symbol: String,
        weight: f64,
        reason: &'static str,
    },
    #[error("automaton is not weighted")]
    NotWeighted,
    #[error("input is not accepted")]
    NotAccepted,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: String,
    pub symbol: String,
    pub to: String,
    pub weight: Option<f64>,
}

impl Transition {
    pub fn new(from: impl Into<String>, symbol: impl Into<String>, to: impl Into<String>) -> Self {
        Transition {
            from: from.into(),
            symbol: symbol.into(),
            to: to.into(),
            weight: None,
        }
    }

    pub fn weighted(
        from: impl Into<String>,
        symbol: impl Into<String>,
        to: impl Into<String>,
        weight: f64,
    ) -> Self {
        Transition {
            weight: Some(weight),
            ..Transition::new(from, symbol, to)
        }
    }
}

/// Declarative description of an automaton.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AutomatonSpec {
    pub states: BTreeSet<String>,
    pub start: String,
    pub finals: BTreeSet<String>,
    pub transitions: Vec<Transition>,
}

impl AutomatonSpec {
    pub fn new(start: impl Into<String>) -> Self {
        let start = start.into();
        AutomatonSpec {
            states: BTreeSet::from([start.clone()]),
            start,
            ..Default::default()
        }
    }

    /// Declares `state` (idempotent).
    pub fn state(&mut self, state: impl Into<String>) -> &mut Self {
        self.states.insert(state.into());
        self
    }

    /// Declares `state` and marks it final.
    pub fn final_state(&mut self, state: impl Into<String>) -> &mut Self {
        let state = state.into();
        self.states.insert(state.clone());
        self.finals.insert(state);
        self
    }

    /// Adds a transition, declaring both endpoints.
    pub fn edge(&mut self, transition: Transition) -> &mut Self {
        self.states.insert(transition.from.clone());
        self.states.insert(transition.to.clone());
        self.transitions.push(transition);
        self
    }

    /// Parses the line-oriented spec format:
    ///
    /// ```text
    /// # comment
    /// start S
    /// final F
    /// state X        (optional explicit declaration)
    /// edge S t 1     (optional fourth field: weight)
    /// ```
    ///
    /// States mentioned anywhere are declared implicitly.
    pub fn parse(text: &str) -> Result<Self, FsaError> {
        let mut spec = AutomatonSpec::default();
        let mut start = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let syntax = |message: String| FsaError::Syntax {
                line: line_no,
                message,
            };
            match fields.as_slice() {
                ["start", s] => {
                    if start.replace(s.to_string()).is_some() {
                        return Err(syntax("duplicate `start` declaration".into()));
                    }
                    spec.states.insert(s.to_string());
                }
                ["final", rest @ ..] if !rest.is_empty() => {
                    for f in rest {
                        spec.final_state(*f);
                    }
                }
                ["state", rest @ ..] if !rest.is_empty() => {
                    for s in rest {
                        spec.state(*s);
                    }
                }
                ["edge", from, symbol, to] => {
                    spec.edge(Transition::new(*from, *symbol, *to));
                }
                ["edge", from, symbol, to, weight] => {
                    let w: f64 = weight
                        .parse()
                        .map_err(|_| syntax(format!("invalid weight `{weight}`")))?;
                    spec.edge(Transition::weighted(*from, *symbol, *to, w));
                }
                _ => return Err(syntax(format!("unrecognised declaration `{line}`"))),
            }
        }
        spec.start = start.ok_or(FsaError::Syntax {
            line: 0,
            message: "missing `start` declaration".into(),
        })?;
        Ok(spec)
    }

    /// Renders the spec back into the line format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = format!("start {}\n", self.start);
        for s in &self.states {
            out.push_str(&format!("state {s}\n"));
        }
        for f in &self.finals {
            out.push_str(&format!("final {f}\n"));
        }
        for t in &self.transitions {
            match t.weight {
                Some(w) => out.push_str(&format!("edge {} {} {} {}\n", t.from, t.symbol, t.to, w)),
                None => out.push_str(&format!("edge {} {} {}\n", t.from, t.symbol, t.to)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge {
    to: usize,
    weight: f64,
}

/// A compiled deterministic automaton. Immutable once built.
#[derive(Debug, Clone)]
pub struct Automaton {
    names: Vec<String>,
    start: usize,
    finals: Vec<bool>,
    table: Vec<HashMap<String, Edge>>,
    weighted: bool,
}

/// Outcome of feeding a symbol sequence through an automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub accepted: bool,
    /// Visited states, starting with the start state.
    pub trace: Vec<String>,
    /// Symbols consumed before halting.
    pub consumed: usize,
    /// Product of traversed weights, for weighted automata.
    pub weight: Option<f64>,
}

/// Compiles a spec into a table-driven automaton, checking determinism,
/// state references and weights.
pub fn compile(spec: &AutomatonSpec) -> Result<Automaton, FsaError> {
    let names: Vec<String> = spec.states.iter().cloned().collect();
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| FsaError::DanglingState(s.to_string()))
    };

    let start = lookup(&spec.start)?;
    let mut finals = vec![false; names.len()];
    for f in &spec.finals {
        finals[lookup(f)?] = true;
    }

    let weighted = spec.transitions.iter().any(|t| t.weight.is_some());
    let mut table: Vec<HashMap<String, Edge>> = vec![HashMap::new(); names.len()];
    let mut outgoing = vec![0.0f64; names.len()];
    for t in &spec.transitions {
        let from = lookup(&t.from)?;
        let to = lookup(&t.to)?;
        let weight = t.weight.unwrap_or(1.0);
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(FsaError::BadWeight {
                from: t.from.clone(),
                symbol: t.symbol.clone(),
                weight,
                reason: "weight must lie in (0, 1]",
            });
        }
        if table[from]
            .insert(t.symbol.clone(), Edge { to, weight })
            .is_some()
        {
            return Err(FsaError::DeterminismViolation {
                state: t.from.clone(),
                symbol: t.symbol.clone(),
            });
        }
        outgoing[from] += weight;
        if weighted && outgoing[from] > 1.0 + WEIGHT_EPSILON {
            return Err(FsaError::BadWeight {
                from: t.from.clone(),
                symbol: t.symbol.clone(),
                weight,
                reason: "outgoing weights of a state sum to more than 1",
            });
        }
    }

    Ok(Automaton {
        names,
        start,
        finals,
        table,
        weighted,
    })
}

impl Automaton {
    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn start(&self) -> &str {
        &self.names[self.start]
    }

    pub fn states(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn is_final(&self, state: &str) -> bool {
        self.names
            .iter()
            .position(|n| n == state)
            .is_some_and(|i| self.finals[i])
    }

    /// Successor of `state` on `symbol`, if any.
    pub fn successor(&self, state: &str, symbol: &str) -> Option<&str> {
        let i = self.names.iter().position(|n| n == state)?;
        self.table[i].get(symbol).map(|e| self.names[e.to].as_str())
    }

    /// All (from, symbol, to) triples, sorted.
    pub fn transitions(&self) -> Vec<(&str, &str, &str)> {
        let mut out: Vec<_> = self
            .table
            .iter()
            .enumerate()
            .flat_map(|(from, row)| {
                row.iter().map(move |(sym, e)| {
                    (
                        self.names[from].as_str(),
                        sym.as_str(),
                        self.names[e.to].as_str(),
                    )
                })
            })
            .collect();
        out.sort();
        out
    }

    /// Runs the machine. A missing transition halts the run and rejects,
    /// recording how many symbols were consumed.
    pub fn run<S: AsRef<str>>(&self, input: &[S]) -> RunResult {
        let mut state = self.start;
        let mut trace = vec![self.names[state].clone()];
        let mut weight = 1.0;
        let mut consumed = 0;
        for sym in input {
            match self.table[state].get(sym.as_ref()) {
                Some(edge) => {
                    state = edge.to;
                    weight *= edge.weight;
                    trace.push(self.names[state].clone());
                    consumed += 1;
                }
                None => break,
            }
        }
        RunResult {
            accepted: consumed == input.len() && self.finals[state],
            trace,
            consumed,
            weight: self.weighted.then_some(weight),
        }
    }

    /// Convenience for character-level machines.
    pub fn run_str(&self, word: &str) -> RunResult {
        let symbols: Vec<String> = word.chars().map(String::from).collect();
        self.run(&symbols)
    }

    pub fn accepts<S: AsRef<str>>(&self, input: &[S]) -> bool {
        self.run(input).accepted
    }

    /// Product of the weights along the accepting path.
    pub fn path_weight<S: AsRef<str>>(&self, input: &[S]) -> Result<f64, FsaError> {
        if !self.weighted {
            return Err(FsaError::NotWeighted);
        }
        let result = self.run(input);
        if !result.accepted {
            return Err(FsaError::NotAccepted);
        }
        Ok(result.weight.unwrap_or(1.0))
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start {}", self.start())?;
        for (i, name) in self.names.iter().enumerate() {
            if self.finals[i] {
                writeln!(f, "final {name}")?;
            }
        }
        for (from, sym, to) in self.transitions() {
            writeln!(f, "edge {from} {sym} {to}")?;
        }
        Ok(())
    }
}

/// The bundled recognizer for the demonstratives `this`, `that`, `these`, `those`.
pub const DEMONSTRATIVES: &str = include_str!("../data/demonstratives.fsa");

pub fn demonstratives() -> Automaton {
    let spec = AutomatonSpec::parse(DEMONSTRATIVES).expect("bundled spec parses");
    compile(&spec).expect("bundled spec compiles")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<String> {
        s.chars().map(String::from).collect()
    }

    #[test]
    fn demonstratives_accept_exactly_four_words() {
        let a = demonstratives();
        for w in ["this", "that", "these", "those"] {
            assert!(a.run_str(w).accepted, "{w}");
        }
        for w in ["th", "thes", "thos", "thise", "", "t"] {
            assert!(!a.run_str(w).accepted, "{w}");
        }
    }

    #[test]
    fn prefix_halts_in_non_final_state() {
        let r = demonstratives().run_str("th");
        assert!(!r.accepted);
        assert_eq!(r.consumed, 2);
        assert_eq!(r.trace.len(), 3);
    }

    #[test]
    fn crash_on_first_symbol() {
        let r = demonstratives().run_str("xyz");
        assert!(!r.accepted);
        assert_eq!(r.consumed, 0);
        assert_eq!(r.trace, vec!["S".to_string()]);
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        let mut spec = AutomatonSpec::new("S");
        spec.edge(Transition::new("S", "t", "1"))
            .edge(Transition::new("S", "t", "2"));
        assert!(matches!(
            compile(&spec),
            Err(FsaError::DeterminismViolation { .. })
        ));
    }

    #[test]
    fn dangling_state_is_rejected() {
        let mut spec = AutomatonSpec::new("S");
        spec.transitions.push(Transition::new("S", "a", "nowhere"));
        assert_eq!(
            compile(&spec).unwrap_err(),
            FsaError::DanglingState("nowhere".into())
        );
        let mut spec = AutomatonSpec::new("S");
        spec.finals.insert("F".into());
        assert!(matches!(compile(&spec), Err(FsaError::DanglingState(_))));
    }

    #[test]
    fn empty_machine_accepts_only_empty_input() {
        let mut spec = AutomatonSpec::new("S");
        spec.final_state("S");
        let a = compile(&spec).unwrap();
        assert!(a.run::<&str>(&[]).accepted);
        assert!(!a.run(&["a"]).accepted);
    }

    #[test]
    fn weights_out_of_range() {
        for w in [0.0, -0.5, 1.5, f64::NAN] {
            let mut spec = AutomatonSpec::new("S");
            spec.edge(Transition::weighted("S", "a", "S", w));
            assert!(
                matches!(compile(&spec), Err(FsaError::BadWeight { .. })),
                "{w}"
            );
        }
        let mut spec = AutomatonSpec::new("S");
        spec.edge(Transition::weighted("S", "a", "S", 0.6))
            .edge(Transition::weighted("S", "b", "S", 0.6));
        assert!(matches!(compile(&spec), Err(FsaError::BadWeight { .. })));
    }

    #[test]
    fn path_weight_products() {
        let mut spec = AutomatonSpec::new("S");
        spec.edge(Transition::weighted("S", "a", "1", 1.0))
            .edge(Transition::weighted("1", "b", "F", 1.0))
            .final_state("F");
        let a = compile(&spec).unwrap();
        assert_eq!(a.path_weight(&["a", "b"]).unwrap(), 1.0);

        let mut spec = AutomatonSpec::new("S");
        spec.edge(Transition::weighted("S", "a", "1", 0.5))
            .edge(Transition::weighted("S", "b", "2", 0.5))
            .edge(Transition::weighted("1", "c", "F", 0.5))
            .edge(Transition::weighted("1", "d", "F", 0.5))
            .edge(Transition::weighted("2", "c", "F", 1.0))
            .final_state("F");
        let a = compile(&spec).unwrap();
        assert_eq!(a.path_weight(&["a", "c"]).unwrap(), 0.25);
        assert_eq!(a.path_weight(&["b", "c"]).unwrap(), 0.5);
        assert_eq!(a.path_weight(&["a"]), Err(FsaError::NotAccepted));
        assert_eq!(
            demonstratives().path_weight(&chars("this")),
            Err(FsaError::NotWeighted)
        );
    }

    #[test]
    fn spec_text_round_trip() {
        let spec = AutomatonSpec::parse(DEMONSTRATIVES).unwrap();
        let again = AutomatonSpec::parse(&spec.to_text()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = AutomatonSpec::parse("start S\nedge S a\n").unwrap_err();
        assert_eq!(
            err,
            FsaError::Syntax {
                line: 2,
                message: "unrecognised declaration `edge S a`".into()
            }
        );
        assert!(AutomatonSpec::parse("final F\n").is_err());
        assert!(AutomatonSpec::parse("start S\nedge S a F x\n").is_err());
    }
}
