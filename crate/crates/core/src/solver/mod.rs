//! Exact and stochastic SAT oracles.
//!
//! [`dpll_solve`] and [`enumerate_models`] are complete; [`walksat`] and
//! [`sample_solutions`] are the local-search sampler.
//! [`enumerate_models_projected`] uses clause learning and exists for the
//! cover encoding, which chronological DPLL cannot enumerate at n = 90. WalkSAT samples are not
//! uniform over solutions, and estimates built from them inherit that bias.

mod cdcl;
mod dpll;
mod walksat;

pub use cdcl::Cdcl;
pub use dpll::Dpll;
pub use walksat::{sample_solutions, walksat, SampleSet, WalkSatConfig};

use crate::formula::{Assignment, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub flips: u64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: Status,
    /// Present iff `status == Sat`.
    pub model: Option<Assignment>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub(crate) fn sat(model: Assignment, stats: SolveStats) -> Self {
        SolveResult { status: Status::Sat, model: Some(model), stats }
    }

    pub(crate) fn unsat(stats: SolveStats) -> Self {
        SolveResult { status: Status::Unsat, model: None, stats }
    }

    pub(crate) fn unknown(stats: SolveStats) -> Self {
        SolveResult { status: Status::Unknown, model: None, stats }
    }

    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

/// Decision budget large enough to be effectively unlimited.
pub const UNLIMITED: u64 = u64::MAX;

/// Complete DPLL search, giving up with `Unknown` after `budget` decisions.
pub fn dpll_solve(f: &Formula, budget: u64) -> SolveResult {
    let result = Dpll::new(f).solve(budget);
    if let Some(model) = &result.model {
        assert!(f.evaluate(model), "dpll returned a non-model");
    }
    result
}

/// Clause-learning search, giving up with `Unknown` after `budget`
/// conflicts. Much faster than [`dpll_solve`] on hard random instances.
pub fn cdcl_solve(f: &Formula, budget: u64) -> SolveResult {
    let (mut models, complete, stats) = Cdcl::new(f).enumerate_projected(&[], 1, budget);
    match models.pop() {
        Some(m) => {
            assert!(f.evaluate(&m), "cdcl returned a non-model");
            SolveResult::sat(m, stats)
        }
        None if complete => SolveResult::unsat(stats),
        None => SolveResult::unknown(stats),
    }
}

/// Models of a formula, found by DPLL with blocking of each model's decision
/// path.
#[derive(Clone, Debug)]
pub struct ModelList {
    pub models: Vec<Assignment>,
    /// True when the list is every model of the formula.
    pub complete: bool,
    pub stats: SolveStats,
}

pub fn enumerate_models(f: &Formula, limit: usize) -> ModelList {
    enumerate_models_with_budget(f, limit, UNLIMITED)
}

pub fn enumerate_models_with_budget(f: &Formula, limit: usize, budget: u64) -> ModelList {
    let (models, complete, stats) = Dpll::new(f).enumerate(limit, budget);
    for m in &models {
        assert!(f.evaluate(m), "enumeration returned a non-model");
    }
    ModelList { models, complete, stats }
}

/// Models that differ on the `projection` variables, one per distinct
/// projection, found by CDCL with blocking clauses. `budget` counts conflicts.
pub fn enumerate_models_projected(f: &Formula, projection: &[usize], limit: usize, budget: u64) -> ModelList {
    let (models, complete, stats) = Cdcl::new(f).enumerate_projected(projection, limit, budget);
    for m in &models {
        assert!(f.evaluate(m), "enumeration returned a non-model");
    }
    ModelList { models, complete, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fixtures::{four_clause, three_clause};
    use crate::formula::generate_random_3sat;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn bits(models: &[Assignment]) -> BTreeSet<String> {
        models.iter().map(|m| m.to_string()).collect()
    }

    fn brute_force_count(f: &Formula) -> usize {
        let n = f.num_vars();
        (0u32..1 << n).filter(|b| f.evaluate(&Assignment::new((0..n).map(|i| b >> i & 1 == 1).collect()))).count()
    }

    #[test]
    fn three_clause_solution() {
        // lowest index first, value 1 first: x = 1, y = 1 forces z = 1
        let r = dpll_solve(&three_clause(), UNLIMITED);
        assert_eq!(r.status, Status::Sat);
        assert_eq!(r.model.unwrap().to_string(), "111");
        let all = enumerate_models(&three_clause(), usize::MAX);
        assert_eq!(all.models.len(), 5);
    }

    #[test]
    fn direct_conflict_is_unsat() {
        let f = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let r = dpll_solve(&f, UNLIMITED);
        assert_eq!(r.status, Status::Unsat);
        assert!(r.model.is_none());
    }

    #[test]
    fn empty_formula_is_sat() {
        let r = dpll_solve(&Formula::empty(3), UNLIMITED);
        assert!(r.is_sat());
        assert_eq!(r.model.unwrap().len(), 3);
    }

    #[test]
    fn budget_gives_unknown() {
        let f = generate_random_3sat(60, 300, 5).unwrap();
        let r = dpll_solve(&f, 1);
        assert_eq!(r.status, Status::Unknown);
    }

    #[test]
    fn four_clause_models() {
        let list = enumerate_models(&four_clause(), usize::MAX);
        assert!(list.complete);
        assert_eq!(bits(&list.models), ["000", "111"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn binary_clause_models() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        let list = enumerate_models(&f, usize::MAX);
        assert_eq!(bits(&list.models), ["01", "10", "11"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn unsat_has_no_models() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]).unwrap();
        let list = enumerate_models(&f, usize::MAX);
        assert!(list.models.is_empty());
        assert!(list.complete);
    }

    #[test]
    fn projected_limit_and_unsat() {
        let f = Formula::empty(4);
        let list = enumerate_models_projected(&f, &[0, 1, 2, 3], 5, UNLIMITED);
        assert_eq!(list.models.len(), 5);
        assert!(!list.complete);
        let list = enumerate_models_projected(&f, &[0, 1, 2, 3], 16, UNLIMITED);
        assert!(list.complete);
        let g = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]).unwrap();
        let list = enumerate_models_projected(&g, &[0, 1], usize::MAX, UNLIMITED);
        assert!(list.complete && list.models.is_empty());
        let units = Formula::from_dimacs_clauses(2, &[&[1], &[-2]]).unwrap();
        let list = enumerate_models_projected(&units, &[0, 1], usize::MAX, UNLIMITED);
        assert_eq!(bits(&list.models), ["10"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn limit_is_respected() {
        let f = Formula::empty(4);
        let list = enumerate_models(&f, 5);
        assert_eq!(list.models.len(), 5);
        assert!(!list.complete);
        let all = enumerate_models(&f, 16);
        assert_eq!(all.models.len(), 16);
        assert!(all.complete);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn enumeration_matches_brute_force(n in 3usize..=12, alpha in 1.0f64..6.0, seed in any::<u64>()) {
            let f = generate_random_3sat(n, (alpha * n as f64).round() as usize, seed).unwrap();
            let list = enumerate_models(&f, usize::MAX);
            prop_assert!(list.complete);
            let distinct = bits(&list.models);
            prop_assert_eq!(distinct.len(), list.models.len());
            prop_assert_eq!(list.models.len(), brute_force_count(&f));
            let r = dpll_solve(&f, UNLIMITED);
            prop_assert_eq!(r.is_sat(), !list.models.is_empty());
            prop_assert_eq!(cdcl_solve(&f, UNLIMITED).is_sat(), r.is_sat());
            let all: Vec<usize> = (0..n).collect();
            let cdcl = enumerate_models_projected(&f, &all, usize::MAX, UNLIMITED);
            prop_assert!(cdcl.complete);
            prop_assert_eq!(bits(&cdcl.models), distinct);
        }

        #[test]
        fn projected_enumeration_counts_projections(n in 3usize..=12, alpha in 1.0f64..5.0, seed in any::<u64>(), k in 1usize..=3) {
            let f = generate_random_3sat(n, (alpha * n as f64).round() as usize, seed).unwrap();
            let proj: Vec<usize> = (0..k).collect();
            let expected: BTreeSet<String> = enumerate_models(&f, usize::MAX)
                .models
                .iter()
                .map(|m| m.to_string()[..k].to_string())
                .collect();
            let got = enumerate_models_projected(&f, &proj, usize::MAX, UNLIMITED);
            prop_assert!(got.complete);
            let got: Vec<String> = got.models.iter().map(|m| m.to_string()[..k].to_string()).collect();
            prop_assert_eq!(got.len(), expected.len());
            prop_assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), expected);
        }
    }
}
