//! Generalized assignments over `{0, 1, *}` and covers.
//!
//! A variable set to 0 or 1 is *supported* when some clause has it as the
//! only true literal and every other literal false. A cover satisfies every
//! clause or leaves at least two of its literals at `*`, and has no
//! unsupported 0/1 variable. The all-`*` string is the trivial cover.

mod encode;
mod enumerate;
mod io;
mod peel;

pub use encode::{encode_covers_as_cnf, enumerate_covers_sat, CoverEncoding, EncodingRole};
pub use enumerate::{
    classify_cover, enumerate_covers_bruteforce, enumerate_covers_bruteforce_with_cap, Classification,
    CoverEnumeration, BRUTE_FORCE_CAP,
};
pub use io::{read_covers, write_covers};
pub use peel::{star_propagate, PeelOrder, Peeled};

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula, Lit};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Value {
    Zero,
    One,
    Star,
}

impl Value {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Value::One
        } else {
            Value::Zero
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Zero => Some(false),
            Value::One => Some(true),
            Value::Star => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Value::Zero => '0',
            Value::One => '1',
            Value::Star => '*',
        }
    }

    pub fn from_symbol(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Value::Zero),
            '1' => Ok(Value::One),
            '*' => Ok(Value::Star),
            other => Err(Error::InvalidArgument(format!("not a generalized value: {other:?}"))),
        }
    }
}

/// Value of a literal under a generalized assignment.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LitState {
    True,
    False,
    Star,
}

/// A string over `{0, 1, *}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct GeneralizedAssignment(Vec<Value>);

impl GeneralizedAssignment {
    pub fn new(values: Vec<Value>) -> Self {
        GeneralizedAssignment(values)
    }

    pub fn all_star(n: usize) -> Self {
        GeneralizedAssignment(vec![Value::Star; n])
    }

    /// Parses a compact string such as `"1*0"`; whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(Value::from_symbol)
            .collect::<Result<Vec<_>>>()
            .map(GeneralizedAssignment)
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
    pub fn get(&self, var: usize) -> Value {
        self.0[var]
    }

    #[inline]
    pub fn set(&mut self, var: usize, v: Value) {
        self.0[var] = v;
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn star_count(&self) -> usize {
        self.0.iter().filter(|&&v| v == Value::Star).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&v| v == Value::Star)
    }

    #[inline]
    pub fn lit_state(&self, l: Lit) -> LitState {
        match self.0[l.var()].as_bool() {
            None => LitState::Star,
            Some(b) if l.eval(b) => LitState::True,
            Some(_) => LitState::False,
        }
    }

    /// True iff `self` agrees with `a` wherever it is not `*`.
    pub fn generalizes(&self, a: &Assignment) -> bool {
        self.0.iter().enumerate().all(|(i, v)| v.as_bool().map_or(true, |b| b == a.get(i)))
    }

    /// The non-`*` positions as a partial assignment.
    pub fn to_partial(&self) -> Vec<Option<bool>> {
        self.0.iter().map(|v| v.as_bool()).collect()
    }

    /// Space-separated tokens, as used by the cover file format.
    pub fn to_tokens(&self) -> String {
        let mut s = String::with_capacity(2 * self.0.len());
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push(v.symbol());
        }
        s
    }
}

impl From<&Assignment> for GeneralizedAssignment {
    fn from(a: &Assignment) -> Self {
        GeneralizedAssignment(a.values().iter().map(|&b| Value::from_bool(b)).collect())
    }
}

impl fmt::Display for GeneralizedAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{}", v.symbol())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum CoverKind {
    True,
    False,
    Trivial,
    /// The solver budget ran out before the cover could be classified.
    Unknown,
}

impl CoverKind {
    pub fn label(self) -> &'static str {
        match self {
            CoverKind::True => "TRUE",
            CoverKind::False => "FALSE",
            CoverKind::Trivial => "TRIVIAL",
            CoverKind::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverRecord {
    pub assignment: GeneralizedAssignment,
    pub kind: CoverKind,
    pub star_count: usize,
    /// A satisfying assignment generalized by the cover, for true covers.
    pub witness: Option<Assignment>,
}

fn check_len(f: &Formula, sigma: &GeneralizedAssignment) -> Result<()> {
    if sigma.len() != f.num_vars() {
        return Err(Error::InvalidArgument(format!(
            "generalized assignment has length {} but the formula has {} variables",
            sigma.len(),
            f.num_vars()
        )));
    }
    Ok(())
}

/// True iff `clause` has `x` as its only true literal and every other
/// literal is false.
fn clause_supports(sigma: &GeneralizedAssignment, clause: &[Lit], x: usize) -> bool {
    let mut found = false;
    for &l in clause {
        match sigma.lit_state(l) {
            LitState::True if l.var() == x => found = true,
            LitState::False => {}
            _ => return false,
        }
    }
    found
}

/// Whether the 0/1 variable `x` is the sole satisfier of some clause whose
/// other literals are all false.
pub fn is_supported(f: &Formula, sigma: &GeneralizedAssignment, x: usize) -> Result<bool> {
    check_len(f, sigma)?;
    if sigma.get(x) == Value::Star {
        return Err(Error::InvalidArgument(format!("variable {} is *", x + 1)));
    }
    Ok(f.clauses().iter().any(|c| c.iter().any(|l| l.var() == x) && clause_supports(sigma, c, x)))
}

/// First cover condition: every clause has a true literal or at least two
/// `*` literals.
pub fn satisfies_clause_condition(f: &Formula, sigma: &GeneralizedAssignment) -> bool {
    f.clauses().iter().all(|c| clause_ok(sigma, c))
}

fn clause_ok(sigma: &GeneralizedAssignment, clause: &[Lit]) -> bool {
    let mut stars = 0;
    for &l in clause {
        match sigma.lit_state(l) {
            LitState::True => return true,
            LitState::Star => stars += 1,
            LitState::False => {}
        }
    }
    stars >= 2
}

pub fn is_cover(f: &Formula, sigma: &GeneralizedAssignment) -> bool {
    if sigma.len() != f.num_vars() || !satisfies_clause_condition(f, sigma) {
        return false;
    }
    let mut supported = vec![false; f.num_vars()];
    for c in f.clauses() {
        for &l in c {
            if sigma.lit_state(l) == LitState::True && clause_supports(sigma, c, l.var()) {
                supported[l.var()] = true;
            }
        }
    }
    (0..f.num_vars()).all(|x| sigma.get(x) == Value::Star || supported[x])
}
