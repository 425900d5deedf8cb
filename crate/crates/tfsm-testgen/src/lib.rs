//! Test generation and scoring for timed machines: a breadth-first
//! distinguishing-sequence search over the synchronous product of reference
//! and mutant, an independent oracle to cross-check it, greedy suite
//! derivation with kill matrices, in-process execution, and exact mutation
//! scores.

pub mod execute;
pub mod oracle;
pub mod random;
pub mod score;
pub mod search;
pub mod suite;

pub use execute::{compare_outputs, execute_test, Execution, TestOutcome};
pub use oracle::oracle_distinguish;
pub use random::random_machine;
pub use score::{mutation_score, Score, ScoreError};
pub use search::{candidate_deltas, distinguish, param_pools, ParamPools, SearchConfig};
pub use suite::{derive_suite, DeriveError, DerivedSuite, KillMatrix};
