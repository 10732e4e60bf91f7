//! Survey propagation, belief propagation and the cover combinatorics of CNF
//! formulas.
//!
//! * [`formula`]: CNF representation, DIMACS, random instances, factor graphs.
//! * [`solver`]: DPLL decision/enumeration oracle and WalkSAT sampler.
//! * [`covers`]: generalized assignments, the cover predicate, peeling,
//!   true/false classification and cover enumeration.
//! * [`propagation`]: survey propagation, BP on the request/warning
//!   reformulation, plain BP, marginals.
//! * [`pipelines`]: decimation and the marginal estimators.
//! * [`experiments`]: seed-stamped CSV reproductions of the experiments.

pub mod covers;
pub mod error;
pub mod experiments;
pub mod formula;
pub mod pipelines;
pub mod propagation;
pub mod solver;

pub use error::{Error, Result};
