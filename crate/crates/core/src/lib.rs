//! `nlc`: natural-language understanding organised like a compiler.
//!
//! Lexical analysis ([`tokenize`], [`morphology`], [`fsa`], [`ngram`],
//! [`noisy_channel`]) feeds syntax analysis ([`tagger`], [`grammar`],
//! [`earley`]), which feeds semantic analysis ([`semantics`]). The
//! [`pipeline`] module wires the phases together and [`cli`] exposes each
//! stage as a subcommand.

pub mod cli;
pub mod earley;
pub mod fsa;
pub mod grammar;
pub mod morphology;
pub mod ngram;
pub mod noisy_channel;
pub mod pipeline;
pub mod semantics;
pub mod sexpr;
pub mod tagger;
pub mod tokenize;
