use std::collections::VecDeque;
use std::io::Write;

use super::{Formula, Lit, PartialAssignment};
use crate::error::{Error, Result};

/// Result of restricting a formula by a partial assignment.
#[derive(Clone, Debug)]
pub struct Simplified {
    /// Residual formula over the unfixed variables, renumbered densely.
    pub residual: Formula,
    /// Every fixing in force: the caller's plus those implied by unit
    /// propagation. Indexed by original variable.
    pub fixed: PartialAssignment,
    /// Original index to residual index, `None` for fixed variables.
    pub old_to_new: Vec<Option<usize>>,
    /// Residual index to original index.
    pub new_to_old: Vec<usize>,
}

impl Simplified {
    /// Lifts an assignment of the residual back to the original variables.
    /// Fixed variables take their fixed value.
    pub fn lift(&self, residual_values: &[bool]) -> Vec<bool> {
        assert_eq!(residual_values.len(), self.new_to_old.len());
        let mut out: Vec<bool> = self.fixed.iter().map(|v| v.unwrap_or(false)).collect();
        for (new, &old) in self.new_to_old.iter().enumerate() {
            out[old] = residual_values[new];
        }
        out
    }

    pub fn num_implied(&self, given: &PartialAssignment) -> usize {
        self.fixed.iter().zip(given).filter(|(f, g)| f.is_some() && g.is_none()).count()
    }
}

/// Removes satisfied clauses and falsified literals, then unit-propagates to
/// a fixpoint. Fails with [`Error::Contradiction`] when a clause loses all of
/// its literals.
pub fn simplify(f: &Formula, fixed: &PartialAssignment) -> Result<Simplified> {
    let n = f.num_vars();
    if fixed.len() != n {
        return Err(Error::InvalidArgument(format!(
            "partial assignment has length {} but the formula has {n} variables",
            fixed.len()
        )));
    }
    let mut value = fixed.clone();
    let occurrences = f.occurrences();
    let mut queue: VecDeque<usize> = VecDeque::new();

    // clause state: satisfied flag and number of unassigned literals
    let mut satisfied = vec![false; f.num_clauses()];
    let mut open = vec![0usize; f.num_clauses()];

    let lit_value = |value: &PartialAssignment, l: Lit| value[l.var()].map(|b| l.eval(b));

    let mut units = Vec::new();
    for (ci, clause) in f.clauses().iter().enumerate() {
        for &l in clause {
            match lit_value(&value, l) {
                Some(true) => satisfied[ci] = true,
                Some(false) => {}
                None => open[ci] += 1,
            }
        }
        if !satisfied[ci] {
            match open[ci] {
                0 => return Err(Error::Contradiction(format!("clause {ci} is falsified"))),
                1 => units.push(ci),
                _ => {}
            }
        }
    }
    let force_unit = |ci: usize, value: &mut PartialAssignment, queue: &mut VecDeque<usize>| -> Result<()> {
        let l = f
            .clause(ci)
            .iter()
            .copied()
            .find(|l| value[l.var()].is_none())
            .ok_or_else(|| Error::Contradiction(format!("clause {ci} is falsified")))?;
        value[l.var()] = Some(l.is_positive());
        queue.push_back(l.var());
        Ok(())
    };

    for ci in units {
        if !satisfied[ci] && open[ci] == 1 {
            force_unit(ci, &mut value, &mut queue)?;
            while let Some(v) = queue.pop_front() {
                propagate(f, &occurrences, v, &mut value, &mut satisfied, &mut open, &mut queue)?;
            }
        }
    }

    let mut old_to_new = vec![None; n];
    let mut new_to_old = Vec::new();
    for v in 0..n {
        if value[v].is_none() {
            old_to_new[v] = Some(new_to_old.len());
            new_to_old.push(v);
        }
    }
    let clauses = f
        .clauses()
        .iter()
        .zip(&satisfied)
        .filter(|(_, &s)| !s)
        .map(|(clause, _)| {
            clause
                .iter()
                .filter(|l| value[l.var()].is_none())
                .map(|l| Lit::new(old_to_new[l.var()].unwrap(), l.is_positive()))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(Simplified { residual: Formula::new(new_to_old.len(), clauses)?, fixed: value, old_to_new, new_to_old })
}

fn propagate(
    f: &Formula,
    occurrences: &[Vec<(usize, Lit)>],
    var: usize,
    value: &mut PartialAssignment,
    satisfied: &mut [bool],
    open: &mut [usize],
    queue: &mut VecDeque<usize>,
) -> Result<()> {
    let b = value[var].expect("propagating an unassigned variable");
    for &(ci, l) in &occurrences[var] {
        if satisfied[ci] {
            continue;
        }
        if l.eval(b) {
            satisfied[ci] = true;
            continue;
        }
        open[ci] -= 1;
        match open[ci] {
            0 => return Err(Error::Contradiction(format!("clause {ci} is falsified"))),
            1 => {
                let unit = f.clause(ci).iter().copied().find(|u| value[u.var()].is_none());
                if let Some(u) = unit {
                    value[u.var()] = Some(u.is_positive());
                    queue.push_back(u.var());
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Writes the `old_index,new_index` map (1-based) for unfixed variables.
pub fn write_renumbering_csv<W: Write>(s: &Simplified, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["old_index", "new_index"])?;
    for (new, &old) in s.new_to_old.iter().enumerate() {
        out.write_record([(old + 1).to_string(), (new + 1).to_string()])?;
    }
    out.flush()?;
    Ok(())
}
