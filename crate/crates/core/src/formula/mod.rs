//! CNF formulas: representation, DIMACS I/O, random generation, evaluation,
//! simplification under partial assignments and factor-graph construction.
//!
//! Variables are 0-based inside the library. DIMACS text and the cover file
//! format use the usual 1-based numbering.

mod dimacs;
mod generate;
mod graph;
mod simplify;

pub use dimacs::{parse_dimacs, parse_model, render_dimacs, write_dimacs, ParseWarning, Parsed};
pub use generate::{generate_random_3sat, generate_random_ksat, generate_random_tree, rng_from_seed, sub_seed};
pub use graph::{Edge, FactorGraph};
pub use simplify::{simplify, write_renumbering_csv, Simplified};

use std::fmt;

use crate::error::{Error, Result};

/// A signed reference to a variable, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Self {
        Lit(((var as u32) << 1) | (!positive) as u32)
    }

    pub fn positive(var: usize) -> Self {
        Self::new(var, true)
    }

    pub fn negative(var: usize) -> Self {
        Self::new(var, false)
    }

    /// From a non-zero DIMACS integer (1-based, sign = polarity).
    pub fn from_dimacs(value: i64) -> Self {
        debug_assert!(value != 0);
        Self::new(value.unsigned_abs() as usize - 1, value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense code in `0..2 * num_vars`, handy for indexing watch lists.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    /// Truth value of the literal when its variable takes `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// An immutable CNF formula.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    num_literals: usize,
}

impl Formula {
    /// Builds a formula, rejecting empty clauses, out-of-range variables and
    /// repeated literals. Clauses containing both `x` and `!x` are accepted.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        let mut num_literals = 0;
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidFormula(format!("clause {i} is empty")));
            }
            for (j, lit) in clause.iter().enumerate() {
                if lit.var() >= num_vars {
                    return Err(Error::InvalidFormula(format!(
                        "clause {i} mentions variable {} but the formula has {num_vars}",
                        lit.var() + 1
                    )));
                }
                if clause[..j].contains(lit) {
                    return Err(Error::InvalidFormula(format!("clause {i} repeats literal {lit}")));
                }
            }
            num_literals += clause.len();
        }
        Ok(Formula { num_vars, clauses, num_literals })
    }

    /// Convenience constructor from DIMACS-style signed integers.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self> {
        let clauses = clauses.iter().map(|c| c.iter().map(|&v| Lit::from_dimacs(v)).collect()).collect();
        Self::new(num_vars, clauses)
    }

    pub fn empty(num_vars: usize) -> Self {
        Formula { num_vars, clauses: Vec::new(), num_literals: 0 }
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    #[inline]
    pub fn num_literals(&self) -> usize {
        self.num_literals
    }

    #[inline]
    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    #[inline]
    pub fn clause(&self, index: usize) -> &[Lit] {
        &self.clauses[index]
    }

    /// Clause-to-variable ratio.
    pub fn ratio(&self) -> f64 {
        if self.num_vars == 0 {
            0.0
        } else {
            self.clauses.len() as f64 / self.num_vars as f64
        }
    }

    pub fn has_unit_clause(&self) -> bool {
        self.clauses.iter().any(|c| c.len() == 1)
    }

    pub fn is_tautology(clause: &[Lit]) -> bool {
        clause.iter().enumerate().any(|(i, &l)| clause[i + 1..].contains(&!l))
    }

    /// True iff every clause has a literal made true by `assignment`.
    pub fn evaluate(&self, assignment: &Assignment) -> bool {
        assert_eq!(assignment.len(), self.num_vars, "assignment length mismatch");
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(assignment.get(l.var()))))
    }

    /// Per-variable occurrence lists `(clause index, literal)` in clause order.
    pub fn occurrences(&self) -> Vec<Vec<(usize, Lit)>> {
        let mut occ = vec![Vec::new(); self.num_vars];
        for (ci, clause) in self.clauses.iter().enumerate() {
            for &l in clause {
                occ[l.var()].push((ci, l));
            }
        }
        occ
    }
}

/// A total truth assignment.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn all_false(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bits(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, var: usize) -> bool {
        self.0[var]
    }

    #[inline]
    pub fn set(&mut self, var: usize, value: bool) {
        self.0[var] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn into_values(self) -> Vec<bool> {
        self.0
    }

    /// Signed DIMACS literals, one per variable.
    pub fn to_dimacs_literals(&self) -> Vec<i64> {
        self.0.iter().enumerate().map(|(i, &v)| Lit::new(i, v).to_dimacs()).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A partial truth assignment, `None` meaning unassigned.
pub type PartialAssignment = Vec<Option<bool>>;
