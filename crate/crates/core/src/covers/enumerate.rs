use super::{clause_ok, clause_supports, CoverKind, CoverRecord, GeneralizedAssignment, Value};
use crate::error::{Error, Result};
use crate::formula::{simplify, Assignment, Formula};
use crate::solver::{dpll_solve, Status};

/// Largest formula the exhaustive `3^N` scan accepts by default.
pub const BRUTE_FORCE_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct Classification {
    pub kind: CoverKind,
    pub witness: Option<Assignment>,
}

/// Decides whether a cover is true (extends to a solution) or false, by
/// solving the formula restricted to the cover's 0/1 values. The all-`*`
/// cover is reported as [`CoverKind::Trivial`] with a witness iff the
/// formula is satisfiable.
pub fn classify_cover(f: &Formula, sigma: &GeneralizedAssignment, budget: u64) -> Result<Classification> {
    if !super::is_cover(f, sigma) {
        return Err(Error::Precondition(format!("{sigma} is not a cover")));
    }
    let trivial = sigma.is_trivial();
    let restricted = match simplify(f, &sigma.to_partial()) {
        Ok(s) => s,
        Err(Error::Contradiction(_)) => {
            return Ok(Classification {
                kind: if trivial { CoverKind::Trivial } else { CoverKind::False },
                witness: None,
            })
        }
        Err(e) => return Err(e),
    };
    let result = dpll_solve(&restricted.residual, budget);
    let (kind, witness) = match result.status {
        Status::Sat => {
            let lifted = Assignment::new(restricted.lift(result.model.as_ref().unwrap().values()));
            debug_assert!(f.evaluate(&lifted) && sigma.generalizes(&lifted));
            (CoverKind::True, Some(lifted))
        }
        Status::Unsat => (CoverKind::False, None),
        Status::Unknown => (CoverKind::Unknown, None),
    };
    let kind = if trivial && kind != CoverKind::Unknown { CoverKind::Trivial } else { kind };
    Ok(Classification { kind, witness })
}

pub(crate) fn record(f: &Formula, sigma: GeneralizedAssignment, budget: u64) -> Result<CoverRecord> {
    let c = classify_cover(f, &sigma, budget)?;
    Ok(CoverRecord { star_count: sigma.star_count(), assignment: sigma, kind: c.kind, witness: c.witness })
}

/// Covers of a formula with a completeness flag.
#[derive(Clone, Debug)]
pub struct CoverEnumeration {
    /// Sorted by assignment; includes the trivial cover when it qualifies.
    pub covers: Vec<CoverRecord>,
    pub complete: bool,
}

impl CoverEnumeration {
    pub fn non_trivial(&self) -> impl Iterator<Item = &CoverRecord> {
        self.covers.iter().filter(|c| c.kind != CoverKind::Trivial)
    }

    pub fn num_non_trivial(&self) -> usize {
        self.non_trivial().count()
    }

    pub fn num_false(&self) -> usize {
        self.covers.iter().filter(|c| c.kind == CoverKind::False).count()
    }
}

pub fn enumerate_covers_bruteforce(f: &Formula) -> Result<CoverEnumeration> {
    enumerate_covers_bruteforce_with_cap(f, BRUTE_FORCE_CAP)
}

/// Exhaustive scan of `{0, 1, *}^N` in variable order. A branch is cut as
/// soon as a clause whose variables are all assigned breaks the clause
/// condition, or a 0/1 variable whose whole neighbourhood is assigned is
/// unsupported; every surviving leaf is a cover.
pub fn enumerate_covers_bruteforce_with_cap(f: &Formula, cap: usize) -> Result<CoverEnumeration> {
    let n = f.num_vars();
    if n > cap {
        return Err(Error::OverCap { what: "variable count", got: n, cap });
    }
    // clauses checked once their last variable is assigned
    let mut clauses_at = vec![Vec::new(); n];
    for (ci, c) in f.clauses().iter().enumerate() {
        let last = c.iter().map(|l| l.var()).max().unwrap();
        clauses_at[last].push(ci);
    }
    // support of x checked once x and every clause-neighbour is assigned
    let mut horizon: Vec<usize> = (0..n).collect();
    for c in f.clauses() {
        let last = c.iter().map(|l| l.var()).max().unwrap();
        for l in c {
            horizon[l.var()] = horizon[l.var()].max(last);
        }
    }
    let mut support_at = vec![Vec::new(); n];
    for x in 0..n {
        support_at[horizon[x]].push(x);
    }
    let clauses_of: Vec<Vec<usize>> = {
        let mut v = vec![Vec::new(); n];
        for (ci, c) in f.clauses().iter().enumerate() {
            for l in c {
                v[l.var()].push(ci);
            }
        }
        v
    };

    struct Scan<'a> {
        f: &'a Formula,
        clauses_at: Vec<Vec<usize>>,
        support_at: Vec<Vec<usize>>,
        clauses_of: Vec<Vec<usize>>,
        sigma: GeneralizedAssignment,
        found: Vec<GeneralizedAssignment>,
    }

    impl Scan<'_> {
        fn consistent_at(&self, depth: usize) -> bool {
            self.clauses_at[depth].iter().all(|&ci| clause_ok(&self.sigma, self.f.clause(ci)))
                && self.support_at[depth].iter().all(|&x| {
                    self.sigma.get(x) == Value::Star
                        || self.clauses_of[x].iter().any(|&ci| clause_supports(&self.sigma, self.f.clause(ci), x))
                })
        }

        fn go(&mut self, depth: usize) {
            if depth == self.sigma.len() {
                self.found.push(self.sigma.clone());
                return;
            }
            for v in [Value::Zero, Value::One, Value::Star] {
                self.sigma.set(depth, v);
                if self.consistent_at(depth) {
                    self.go(depth + 1);
                }
            }
            self.sigma.set(depth, Value::Star);
        }
    }

    let mut scan =
        Scan { f, clauses_at, support_at, clauses_of, sigma: GeneralizedAssignment::all_star(n), found: Vec::new() };
    scan.go(0);
    let mut found = scan.found;
    found.sort();
    let covers = found.into_iter().map(|s| record(f, s, crate::solver::UNLIMITED)).collect::<Result<Vec<_>>>()?;
    Ok(CoverEnumeration { covers, complete: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::is_cover;
    use crate::formula::fixtures::{four_clause, three_clause};
    use crate::formula::{generate_random_3sat, generate_random_tree};
    use proptest::prelude::*;

    fn listing(e: &CoverEnumeration) -> Vec<(String, CoverKind)> {
        e.covers.iter().map(|c| (c.assignment.to_string(), c.kind)).collect()
    }

    /// Independent oracle: test every string in {0,1,*}^n with `is_cover`.
    fn naive(f: &Formula) -> Vec<String> {
        let n = f.num_vars();
        let mut out = Vec::new();
        for code in 0..3usize.pow(n as u32) {
            let vals =
                (0..n).map(|i| [Value::Zero, Value::One, Value::Star][code / 3usize.pow(i as u32) % 3]).collect();
            let s = GeneralizedAssignment::new(vals);
            if is_cover(f, &s) {
                out.push(s);
            }
        }
        out.sort();
        out.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn three_clause_example() {
        let e = enumerate_covers_bruteforce(&three_clause()).unwrap();
        assert_eq!(listing(&e), vec![("111".into(), CoverKind::True), ("***".into(), CoverKind::Trivial)]);
        assert_eq!(e.covers[0].witness.as_ref().unwrap().to_string(), "111");
    }

    #[test]
    fn four_clause_example() {
        let e = enumerate_covers_bruteforce(&four_clause()).unwrap();
        assert_eq!(
            listing(&e),
            vec![("000".into(), CoverKind::True), ("111".into(), CoverKind::True), ("***".into(), CoverKind::Trivial)]
        );
    }

    #[test]
    fn tree_formulas_have_only_trivial_cover() {
        for seed in 0..30 {
            let f = generate_random_tree(2 + seed as usize % 15, seed).unwrap();
            let e = enumerate_covers_bruteforce(&f).unwrap();
            assert_eq!(listing(&e), vec![("*".repeat(f.num_vars()), CoverKind::Trivial)]);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let f = generate_random_3sat(17, 10, 0).unwrap();
        assert!(matches!(enumerate_covers_bruteforce(&f), Err(Error::OverCap { .. })));
        assert!(enumerate_covers_bruteforce_with_cap(&f, 17).is_ok());
    }

    #[test]
    fn classify_rejects_non_covers() {
        assert!(classify_cover(&three_clause(), &GeneralizedAssignment::parse("100").unwrap(), 10).is_err());
    }

    #[test]
    fn trivial_cover_of_unsat_formula() {
        // all four 2-clauses over x, y: unsatisfiable, no unit clause
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]).unwrap();
        let c = classify_cover(&f, &GeneralizedAssignment::all_star(2), 100).unwrap();
        assert_eq!(c.kind, CoverKind::Trivial);
        assert!(c.witness.is_none());
    }

    #[test]
    fn false_covers_exist() {
        // search small dense random formulas for a false cover
        let mut seen = 0;
        for seed in 0..400 {
            let f = generate_random_3sat(12, 50, seed).unwrap();
            let e = enumerate_covers_bruteforce(&f).unwrap();
            for c in e.covers.iter().filter(|c| c.kind == CoverKind::False) {
                assert!(c.witness.is_none());
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_naive_scan(n in 3usize..=7, alpha in 1.0f64..6.0, seed in any::<u64>()) {
            let f = generate_random_3sat(n, (alpha * n as f64) as usize, seed).unwrap();
            let e = enumerate_covers_bruteforce(&f).unwrap();
            let got: Vec<String> = e.covers.iter().map(|c| c.assignment.to_string()).collect();
            prop_assert_eq!(got, naive(&f));
            for c in &e.covers {
                prop_assert_eq!(c.kind == CoverKind::Trivial, c.star_count == n);
                if let Some(w) = &c.witness {
                    prop_assert!(f.evaluate(w) && c.assignment.generalizes(w));
                }
            }
        }
    }
}
