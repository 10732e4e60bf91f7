//! Survey-inspired decimation and the marginal estimators compared against
//! each other: exact and sampled solution marginals, exact and peeled cover
//! marginals, SP and plain BP.
//!
//! Solution tables and cover tables measure different distributions and
//! carry their [`Semantics`](crate::propagation::Semantics) with them.

mod decimate;
mod estimators;

pub use decimate::{decimate, DecimationConfig, DecimationOutcome, DecimationRound, DecimationStatus, RoundStatus};
pub use estimators::{
    bp_marginals, cover_marginals_of, cover_table, enumerate_covers, exact_cover_marginals, exact_solution_marginals,
    exact_solution_marginals_with_cap, peel_all, peeled_cover_marginals, peeled_cover_marginals_from,
    sampled_solution_marginals, sampled_solution_marginals_with, sp_marginals, CoverMethod, SampleReport,
    DEFAULT_MODEL_CAP,
};
