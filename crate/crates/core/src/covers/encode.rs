use std::io::Write;

use super::enumerate::{record, CoverEnumeration};
use super::{CoverKind, GeneralizedAssignment, Value};
use crate::error::Result;
use crate::formula::{Assignment, Formula, Lit};
use crate::solver::enumerate_models_projected;

/// What a variable of the cover encoding stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingRole {
    /// Original variable is 1.
    IsTrue { var: usize },
    /// Original variable is 0.
    IsFalse { var: usize },
    /// Original variable is the sole satisfier of the clause, whose other
    /// literals are all false.
    Supports { var: usize, clause: usize },
}

/// A CNF formula whose models are in bijection with the covers of another.
///
/// Original variable `x` becomes two indicators, "x = 1" and "x = 0"; a star
/// is neither. Each occurrence of `x` in clause `a` gets a support indicator
/// defined by both implication directions, so every model is determined by
/// its indicator values.
#[derive(Clone, Debug)]
pub struct CoverEncoding {
    pub formula: Formula,
    pub roles: Vec<EncodingRole>,
    num_original: usize,
}

impl CoverEncoding {
    #[inline]
    fn is_true_var(x: usize) -> usize {
        2 * x
    }

    #[inline]
    fn is_false_var(x: usize) -> usize {
        2 * x + 1
    }

    /// Reads a model of the encoding back as a generalized assignment.
    pub fn decode(&self, model: &Assignment) -> GeneralizedAssignment {
        GeneralizedAssignment::new(
            (0..self.num_original)
                .map(|x| match (model.get(Self::is_true_var(x)), model.get(Self::is_false_var(x))) {
                    (true, false) => Value::One,
                    (false, true) => Value::Zero,
                    (false, false) => Value::Star,
                    (true, true) => unreachable!("encoding forbids both indicators"),
                })
                .collect(),
        )
    }

    /// Writes the `g_var,role,orig_var,clause` map, 1-based; `clause` is
    /// empty for the value indicators.
    pub fn write_decode_map<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["g_var", "role", "orig_var", "clause"])?;
        for (g, role) in self.roles.iter().enumerate() {
            let (name, var, clause) = match *role {
                EncodingRole::IsTrue { var } => ("true", var, None),
                EncodingRole::IsFalse { var } => ("false", var, None),
                EncodingRole::Supports { var, clause } => ("support", var, Some(clause)),
            };
            out.write_record([
                (g + 1).to_string(),
                name.to_string(),
                (var + 1).to_string(),
                clause.map(|c| (c + 1).to_string()).unwrap_or_default(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Builds the cover encoding of `f`.
pub fn encode_covers_as_cnf(f: &Formula) -> CoverEncoding {
    let n = f.num_vars();
    let mut roles = Vec::with_capacity(2 * n + f.num_literals());
    for var in 0..n {
        roles.push(EncodingRole::IsTrue { var });
        roles.push(EncodingRole::IsFalse { var });
    }
    // G-literal "literal l of f is true" / "is false"
    let lit_true = |l: Lit| {
        if l.is_positive() {
            Lit::positive(CoverEncoding::is_true_var(l.var()))
        } else {
            Lit::positive(CoverEncoding::is_false_var(l.var()))
        }
    };
    let lit_false = |l: Lit| {
        if l.is_positive() {
            Lit::positive(CoverEncoding::is_false_var(l.var()))
        } else {
            Lit::positive(CoverEncoding::is_true_var(l.var()))
        }
    };

    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    for x in 0..n {
        clauses.push(vec![Lit::negative(CoverEncoding::is_true_var(x)), Lit::negative(CoverEncoding::is_false_var(x))]);
    }

    // per variable, the support indicators that can justify x = 1 / x = 0
    let mut justify_true: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut justify_false: Vec<Vec<usize>> = vec![Vec::new(); n];

    for (ci, clause) in f.clauses().iter().enumerate() {
        // no true literal and at most one star is forbidden: if all literals
        // but one are false, the remaining one must be true
        for (j, &lj) in clause.iter().enumerate() {
            let mut c = vec![lit_true(lj)];
            c.extend(clause.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &li)| !lit_false(li)));
            clauses.push(c);
        }
        for (j, &lj) in clause.iter().enumerate() {
            let s = roles.len();
            roles.push(EncodingRole::Supports { var: lj.var(), clause: ci });
            let s_lit = Lit::positive(s);
            // s -> lj true, s -> others false
            clauses.push(vec![!s_lit, lit_true(lj)]);
            let mut back = vec![s_lit, !lit_true(lj)];
            for (i, &li) in clause.iter().enumerate() {
                if i != j {
                    clauses.push(vec![!s_lit, lit_false(li)]);
                    back.push(!lit_false(li));
                }
            }
            // lj true and others false -> s
            clauses.push(back);
            if lj.is_positive() {
                justify_true[lj.var()].push(s);
            } else {
                justify_false[lj.var()].push(s);
            }
        }
    }
    for x in 0..n {
        let mut t = vec![Lit::negative(CoverEncoding::is_true_var(x))];
        t.extend(justify_true[x].iter().map(|&s| Lit::positive(s)));
        clauses.push(t);
        let mut fl = vec![Lit::negative(CoverEncoding::is_false_var(x))];
        fl.extend(justify_false[x].iter().map(|&s| Lit::positive(s)));
        clauses.push(fl);
    }
    let formula = Formula::new(roles.len(), clauses).expect("cover encoding is well formed");
    CoverEncoding { formula, roles, num_original: n }
}

/// Covers found by enumerating models of the encoding, each classified as
/// true, false or trivial. `limit` bounds the number of covers and `budget`
/// the solver effort (conflicts for the encoding, decisions for each
/// classification); the result is flagged incomplete when either bites.
///
/// Models are blocked on the value indicators only. The support indicators
/// are functions of those, so this loses nothing.
pub fn enumerate_covers_sat(f: &Formula, limit: usize, budget: u64) -> Result<CoverEnumeration> {
    let enc = encode_covers_as_cnf(f);
    let projection: Vec<usize> = (0..2 * f.num_vars()).collect();
    let list = enumerate_models_projected(&enc.formula, &projection, limit, budget);
    let mut found: Vec<GeneralizedAssignment> = list.models.iter().map(|m| enc.decode(m)).collect();
    found.sort();
    let covers = found.into_iter().map(|s| record(f, s, budget)).collect::<Result<Vec<_>>>()?;
    let classified = covers.iter().all(|c| c.kind != CoverKind::Unknown);
    Ok(CoverEnumeration { covers, complete: list.complete && classified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{enumerate_covers_bruteforce, is_cover};
    use crate::formula::fixtures::{four_clause, three_clause};
    use crate::formula::{generate_random_3sat, render_dimacs};
    use crate::solver::{enumerate_models, UNLIMITED};
    use proptest::prelude::*;

    fn strings(e: &CoverEnumeration) -> Vec<String> {
        e.covers.iter().map(|c| c.assignment.to_string()).collect()
    }

    #[test]
    fn three_clause_encoding_has_two_models() {
        let enc = encode_covers_as_cnf(&three_clause());
        let models = enumerate_models(&enc.formula, usize::MAX);
        assert!(models.complete);
        let mut decoded: Vec<GeneralizedAssignment> = models.models.iter().map(|m| enc.decode(m)).collect();
        decoded.sort();
        let decoded: Vec<String> = decoded.iter().map(|d| d.to_string()).collect();
        assert_eq!(decoded, vec!["111", "***"]);
    }

    #[test]
    fn four_clause_via_sat() {
        let e = enumerate_covers_sat(&four_clause(), usize::MAX, UNLIMITED).unwrap();
        assert!(e.complete);
        assert_eq!(strings(&e), vec!["000", "111", "***"]);
    }

    #[test]
    fn unit_clause_excludes_trivial_cover() {
        // (x) & (x | y | z): x must be 1 and supported by the unit clause
        let f = Formula::from_dimacs_clauses(3, &[&[1], &[1, 2, 3]]).unwrap();
        let e = enumerate_covers_sat(&f, usize::MAX, UNLIMITED).unwrap();
        assert!(strings(&e).iter().all(|s| s != "***"));
        assert_eq!(strings(&e), vec!["1**"]);
        let g = Formula::from_dimacs_clauses(3, &[&[1, 2, 3]]).unwrap();
        let e = enumerate_covers_sat(&g, usize::MAX, UNLIMITED).unwrap();
        assert_eq!(strings(&e), vec!["***"]);
    }

    #[test]
    fn limit_marks_incomplete() {
        let e = enumerate_covers_sat(&four_clause(), 2, UNLIMITED).unwrap();
        assert_eq!(e.covers.len(), 2);
        assert!(!e.complete);
    }

    #[test]
    fn decode_map_csv() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, -2]]).unwrap();
        let enc = encode_covers_as_cnf(&f);
        let mut buf = Vec::new();
        enc.write_decode_map(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "g_var,role,orig_var,clause\n1,true,1,\n2,false,1,\n3,true,2,\n4,false,2,\n5,support,1,1\n6,support,2,1\n"
        );
        assert!(render_dimacs(&enc.formula).starts_with("p cnf 6 "));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn decode_is_a_bijection_onto_covers(n in 3usize..=9, alpha in 1.0f64..6.0, seed in any::<u64>()) {
            let f = generate_random_3sat(n, (alpha * n as f64) as usize, seed).unwrap();
            let enc = encode_covers_as_cnf(&f);
            let models = enumerate_models(&enc.formula, usize::MAX);
            let mut decoded: Vec<GeneralizedAssignment> = models.models.iter().map(|m| enc.decode(m)).collect();
            for d in &decoded {
                prop_assert!(is_cover(&f, d));
            }
            decoded.sort();
            let len = decoded.len();
            decoded.dedup();
            prop_assert_eq!(decoded.len(), len);
            let brute = enumerate_covers_bruteforce(&f).unwrap();
            let b: Vec<GeneralizedAssignment> = brute.covers.into_iter().map(|c| c.assignment).collect();
            prop_assert_eq!(decoded, b);
        }
    }
}
