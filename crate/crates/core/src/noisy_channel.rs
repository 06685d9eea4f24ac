//! Minimum edit distance and noisy-channel word correction.
//!
//! Candidates are ranked by `P(O|w) * P(w)`: the channel likelihood decays
//! exponentially with edit distance and the prior is the add-one unigram
//! probability from a language model. `P(O)` is shared by every candidate
//! and is never computed.

use serde::Serialize;
use thiserror::Error;

use crate::ngram::{NGramModel, SmoothingMode};

pub const DEFAULT_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("lambda must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error("correction lexicon is empty")]
    EmptyLexicon,
    #[error("edit costs must be nonnegative")]
    BadCosts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EditCosts {
    pub insert: f64,
    pub delete: f64,
    pub substitute: f64,
}

impl Default for EditCosts {
    fn default() -> Self {
        EditCosts {
            insert: 1.0,
            delete: 1.0,
            substitute: 1.0,
        }
    }
}

impl EditCosts {
    pub fn new(insert: f64, delete: f64, substitute: f64) -> Result<Self, ChannelError> {
        if [insert, delete, substitute]
            .iter()
            .all(|c| c.is_finite() && *c >= 0.0)
        {
            Ok(EditCosts {
                insert,
                delete,
                substitute,
            })
        } else {
            Err(ChannelError::BadCosts)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub word: String,
    pub prior: f64,
    pub likelihood: f64,
    pub score: f64,
}

impl Candidate {
    pub fn new(word: impl Into<String>, prior: f64, likelihood: f64) -> Self {
        Candidate {
            word: word.into(),
            prior,
            likelihood,
            score: prior * likelihood,
        }
    }
}

/// Cheapest insert/delete/substitute script turning `source` into `target`,
/// over Unicode scalar values. Fills the usual `(|s|+1) x (|t|+1)` table,
/// keeping two rows.
pub fn min_edit_distance(source: &str, target: &str, costs: &EditCosts) -> f64 {
    let s: Vec<char> = source.chars().collect();
    let t: Vec<char> = target.chars().collect();
    let mut prev: Vec<f64> = (0..=t.len()).map(|j| j as f64 * costs.insert).collect();
    let mut cur = vec![0.0; t.len() + 1];
    for i in 1..=s.len() {
        cur[0] = i as f64 * costs.delete;
        for j in 1..=t.len() {
            let sub = if s[i - 1] == t[j - 1] {
                0.0
            } else {
                costs.substitute
            };
            cur[j] = (prev[j - 1] + sub)
                .min(prev[j] + costs.delete)
                .min(cur[j - 1] + costs.insert);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[t.len()]
}

/// `exp(-lambda * distance)`.
pub fn channel_likelihood(
    observed: &str,
    candidate: &str,
    lambda: f64,
    costs: &EditCosts,
) -> Result<f64, ChannelError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ChannelError::BadLambda(lambda));
    }
    Ok((-lambda * min_edit_distance(observed, candidate, costs)).exp())
}

/// Sorts by descending score, ties to the lexicographically smaller word,
/// and keeps the top `k`.
pub fn rank(mut candidates: Vec<Candidate>, k: usize) -> Vec<Candidate> {
    candidates.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.word.cmp(&b.word))
    });
    candidates.truncate(k);
    candidates
}

/// Scores every lexicon word against `observed` and returns the best `k`.
pub fn correct<S: AsRef<str>>(
    observed: &str,
    lexicon: &[S],
    lm: &NGramModel,
    lambda: f64,
    costs: &EditCosts,
    k: usize,
) -> Result<Vec<Candidate>, ChannelError> {
    if lexicon.is_empty() {
        return Err(ChannelError::EmptyLexicon);
    }
    let none: [&str; 0] = [];
    let candidates = lexicon
        .iter()
        .map(|w| {
            let w = w.as_ref();
            let likelihood = channel_likelihood(observed, w, lambda, costs)?;
            let prior = lm.probability(w, &none, SmoothingMode::AddOne);
            Ok(Candidate::new(w, prior, likelihood))
        })
        .collect::<Result<Vec<_>, ChannelError>>()?;
    Ok(rank(candidates, k))
}

/// Reads a word list: one word per line, blank lines and `#` comments
/// skipped.
pub fn read_wordlist(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::train;

    fn unit() -> EditCosts {
        EditCosts::default()
    }

    #[test]
    fn sidebar_distances() {
        assert_eq!(min_edit_distance("Ta", "Da", &unit()), 1.0);
        assert_eq!(min_edit_distance("Taes", "Days", &unit()), 2.0);
        assert_eq!(min_edit_distance("", "abc", &unit()), 3.0);
        assert_eq!(min_edit_distance("abc", "", &unit()), 3.0);
        assert_eq!(min_edit_distance("same", "same", &unit()), 0.0);
        assert_eq!(min_edit_distance("kitten", "sitting", &unit()), 3.0);
    }

    #[test]
    fn weighted_costs() {
        let c = EditCosts::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(min_edit_distance("Ta", "Da", &c), 2.0);
        let c = EditCosts::new(1.0, 1.0, 5.0).unwrap();
        assert_eq!(min_edit_distance("Ta", "Da", &c), 2.0);
        assert_eq!(EditCosts::new(-1.0, 1.0, 1.0), Err(ChannelError::BadCosts));
    }

    #[test]
    fn unicode_scalars() {
        assert_eq!(min_edit_distance("café", "cafe", &unit()), 1.0);
    }

    #[test]
    fn likelihood() {
        assert_eq!(channel_likelihood("abc", "abc", 1.0, &unit()).unwrap(), 1.0);
        let l = channel_likelihood("Ta", "Da", 1.0, &unit()).unwrap();
        assert!((l - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(
            channel_likelihood("a", "b", 0.0, &unit()),
            Err(ChannelError::BadLambda(0.0))
        );
    }

    #[test]
    fn correction_ranking() {
        let lm = train(&[vec!["Days", "Dogs"]], 1).unwrap();
        let ranked = correct("Taes", &["Dogs", "Days"], &lm, 1.0, &unit(), 2).unwrap();
        assert_eq!(ranked[0].word, "Days");
        assert_eq!(ranked[1].word, "Dogs");
        assert!(ranked[0].score > ranked[1].score);
        let empty: [&str; 0] = [];
        assert_eq!(
            correct("x", &empty, &lm, 1.0, &unit(), 1),
            Err(ChannelError::EmptyLexicon)
        );
    }

    #[test]
    fn prior_breaks_distance_ties() {
        let ranked = rank(
            vec![
                Candidate::new("cat", 0.1, 0.5),
                Candidate::new("cot", 0.2, 0.5),
            ],
            2,
        );
        assert_eq!(ranked[0].word, "cot");
        let tied = rank(
            vec![Candidate::new("b", 0.1, 0.5), Candidate::new("a", 0.1, 0.5)],
            1,
        );
        assert_eq!(tied[0].word, "a");
    }
}
