//! Dyck-Motzkin shifts.
//!
//! Words over `m` bracket pairs and `n` neutral symbols, their reduction in
//! the bracket monoid, the Krieger embeddings of the one-sided collapsed
//! shifts, invariant measures (Bernoulli, Markov, periodic orbits and their
//! pushforwards), paths of ergodic measures and ergodic optimization over
//! periodic orbits.

pub mod error;
pub mod function;
pub mod krieger;
pub mod language;
pub mod measures;
pub mod optimize;
pub mod paths;
pub mod reduce;
pub mod symbol;

pub use error::{Error, Result};
pub use function::LocallyConstantFn;
pub use krieger::{
    collapse, in_b, in_k, match_in_cycle, match_position, reconstruct, MatchResult, PeriodicPoint,
};
pub use language::{count_words, enumerate_words, entropy_estimate};
pub use measures::{
    classify_measure, cylinder_prob, entropy, integral, transport_condition, Bernoulli, CylinderQuery, EntropyValue,
    MarkovChain, MeasureSpec, Value,
};
pub use optimize::{lambda_markov_lower, lambda_periodic, maximizer_probe, MaximizerProbe, OptimizationResult};
pub use reduce::{classify, height_profile, is_admissible, reduce, ErgodicClass, ReducedForm, WordClass};
pub use symbol::{AlphabetParams, Ambient, Gamma, Symbol, Word};
