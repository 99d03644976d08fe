//! Test support: brute-force oracles that re-derive engine and concordance
//! results without sharing code with them, plus seeded random corpora and
//! operation sequences.

pub mod corpus;
pub mod invariants;
pub mod oracle;
