use super::{SolveResult, SolveStats};
use crate::formula::{Assignment, Formula, Lit};

const UNASSIGNED: u8 = 2;

/// Chronological-backtracking DPLL with two watched literals.
///
/// Branching picks the lowest-index unassigned variable and tries `true`
/// first. There is no clause learning.
pub struct Dpll {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    trail: Vec<Lit>,
    /// Trail position where each decision level starts, plus whether the
    /// decision at that level has already been flipped.
    levels: Vec<(usize, bool)>,
    queue_head: usize,
    next_var: usize,
    /// Set when the input holds complementary unit clauses.
    root_conflict: bool,
    stats: SolveStats,
}

enum Step {
    Model,
    Exhausted,
    Budget,
}

impl Dpll {
    pub fn new(f: &Formula) -> Self {
        let n = f.num_vars();
        let mut solver = Dpll {
            num_vars: n,
            clauses: Vec::with_capacity(f.num_clauses()),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNASSIGNED; n],
            trail: Vec::with_capacity(n),
            levels: Vec::new(),
            queue_head: 0,
            next_var: 0,
            root_conflict: false,
            stats: SolveStats::default(),
        };
        let mut units = Vec::new();
        for clause in f.clauses() {
            if Formula::is_tautology(clause) {
                continue;
            }
            if clause.len() == 1 {
                units.push(clause[0]);
                continue;
            }
            let id = solver.clauses.len();
            solver.watches[clause[0].code()].push(id);
            solver.watches[clause[1].code()].push(id);
            solver.clauses.push(clause.clone());
        }
        for &u in &units {
            match solver.lit_value(u) {
                UNASSIGNED => solver.assign(u),
                0 => solver.root_conflict = true,
                _ => {}
            }
        }
        solver
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.value[l.var()];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            (v == l.is_positive() as u8) as u8
        }
    }

    #[inline]
    fn assign(&mut self, l: Lit) {
        self.value[l.var()] = l.is_positive() as u8;
        self.trail.push(l);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.queue_head < self.trail.len() {
            let false_lit = !self.trail[self.queue_head];
            self.queue_head += 1;
            self.stats.propagations += 1;
            let mut watchers = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut ok = true;
            while i < watchers.len() {
                let cid = watchers[i];
                let clause = &mut self.clauses[cid];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_value = {
                    let v = self.value[other.var()];
                    if v == UNASSIGNED {
                        UNASSIGNED
                    } else {
                        (v == other.is_positive() as u8) as u8
                    }
                };
                if other_value == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.value[l.var()];
                    if v == UNASSIGNED || v == l.is_positive() as u8 {
                        clause.swap(1, k);
                        self.watches[clause[1].code()].push(cid);
                        watchers.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if other_value == 0 {
                    ok = false;
                    break;
                }
                self.value[other.var()] = other.is_positive() as u8;
                self.trail.push(other);
                i += 1;
            }
            self.watches[false_lit.code()] = watchers;
            if !ok {
                return false;
            }
        }
        true
    }

    fn backtrack_to(&mut self, trail_len: usize) {
        while self.trail.len() > trail_len {
            let l = self.trail.pop().unwrap();
            self.value[l.var()] = UNASSIGNED;
            if l.var() < self.next_var {
                self.next_var = l.var();
            }
        }
        self.queue_head = trail_len;
    }

    /// Undo levels until one with an unflipped decision is found and flip it.
    /// Returns false when the search space is exhausted.
    fn resolve_conflict(&mut self) -> bool {
        while let Some((start, flipped)) = self.levels.pop() {
            let decision = self.trail[start];
            self.backtrack_to(start);
            if !flipped {
                self.levels.push((start, true));
                self.assign(!decision);
                return true;
            }
        }
        false
    }

    fn pick_branch_var(&mut self) -> Option<usize> {
        while self.next_var < self.num_vars && self.value[self.next_var] != UNASSIGNED {
            self.next_var += 1;
        }
        (self.next_var < self.num_vars).then_some(self.next_var)
    }

    fn search(&mut self, budget: u64) -> Step {
        loop {
            if !self.propagate() {
                self.stats.conflicts += 1;
                if !self.resolve_conflict() {
                    return Step::Exhausted;
                }
                continue;
            }
            let Some(var) = self.pick_branch_var() else {
                return Step::Model;
            };
            if self.stats.decisions >= budget {
                return Step::Budget;
            }
            self.stats.decisions += 1;
            self.levels.push((self.trail.len(), false));
            self.assign(Lit::positive(var));
        }
    }

    fn model(&self) -> Assignment {
        Assignment::new(self.value.iter().map(|&v| v == 1).collect())
    }

    /// Decides satisfiability within `budget` decisions.
    pub fn solve(mut self, budget: u64) -> SolveResult {
        if self.root_conflict {
            return SolveResult::unsat(self.stats);
        }
        match self.search(budget) {
            Step::Model => SolveResult::sat(self.model(), self.stats),
            Step::Exhausted => SolveResult::unsat(self.stats),
            Step::Budget => SolveResult::unknown(self.stats),
        }
    }

    /// Enumerates models up to `limit`. After each model the decision path is
    /// blocked and the search resumes by flipping the deepest unflipped
    /// decision, which is the effect of adding the blocking clause
    /// `!(d1 & ... & dk)` over the current decisions.
    pub fn enumerate(mut self, limit: usize, budget: u64) -> (Vec<Assignment>, bool, SolveStats) {
        let mut models = Vec::new();
        if self.root_conflict || limit == 0 {
            let complete = self.root_conflict;
            return (models, complete, self.stats);
        }
        loop {
            match self.search(budget) {
                Step::Model => {
                    models.push(self.model());
                    if models.len() >= limit {
                        // exact only if nothing else remains
                        let complete = !self.resolve_conflict() || self.search(budget).is_exhausted();
                        return (models, complete, self.stats);
                    }
                    if !self.resolve_conflict() {
                        return (models, true, self.stats);
                    }
                }
                Step::Exhausted => return (models, true, self.stats),
                Step::Budget => return (models, false, self.stats),
            }
        }
    }
}

impl Step {
    fn is_exhausted(&self) -> bool {
        matches!(self, Step::Exhausted)
    }
}
