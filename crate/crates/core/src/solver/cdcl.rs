use super::SolveStats;
use crate::formula::{Assignment, Formula, Lit};

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;
const ABSENT: usize = usize::MAX;

#[inline]
fn lit_value(values: &[u8], l: Lit) -> u8 {
    let v = values[l.var()];
    if v == UNDEF {
        UNDEF
    } else {
        (v == l.is_positive() as u8) as u8
    }
}

#[derive(Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
}

/// Max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    index: Vec<usize>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap { heap: Vec::with_capacity(n), index: vec![ABSENT; n] }
    }

    fn contains(&self, v: usize) -> bool {
        self.index[v] != ABSENT
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.index[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.index[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child =
                if right < self.heap.len() && act[self.heap[right]] > act[self.heap[left]] { right } else { left };
            if act[self.heap[child]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.index[self.heap[i]] = i;
            i = child;
        }
        self.heap[i] = v;
        self.index[v] = i;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.index[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.index[top] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

/// Finite Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut x: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

enum Outcome {
    Sat,
    Unsat,
    Budget,
}

/// Conflict-driven clause learning: first-UIP learning with local
/// minimization, VSIDS branching, phase saving, Luby restarts and periodic
/// removal of learnt clauses with high literal-block distance.
///
/// Only used for projected model enumeration, where chronological DPLL
/// keeps rediscovering the same dead ends.
pub struct Cdcl {
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    unsat: bool,
    num_learnt: usize,
    max_learnt: usize,
    stats: SolveStats,
}

impl Cdcl {
    pub fn new(f: &Formula) -> Self {
        let n = f.num_vars();
        let mut s = Cdcl {
            num_vars: n,
            clauses: Vec::with_capacity(f.num_clauses()),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            phase: vec![false; n],
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: VarHeap::new(n),
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            unsat: false,
            num_learnt: 0,
            max_learnt: f.num_clauses() / 3 + 2000,
            stats: SolveStats::default(),
        };
        for v in 0..n {
            s.heap.insert(v, &s.activity);
        }
        for c in f.clauses() {
            if Formula::is_tautology(c) {
                continue;
            }
            s.add_root_clause(c.clone());
        }
        s
    }

    /// Adds a clause while at decision level 0. Returns false once the
    /// formula is known to be unsatisfiable.
    fn add_root_clause(&mut self, mut lits: Vec<Lit>) -> bool {
        debug_assert!(self.trail_lim.is_empty());
        if self.unsat {
            return false;
        }
        if lits.iter().any(|&l| lit_value(&self.value, l) == 1) {
            return true;
        }
        lits.retain(|&l| lit_value(&self.value, l) == UNDEF);
        match lits.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                self.attach(Clause { lits, learnt: false, lbd: 0 });
            }
        }
        !self.unsat
    }

    fn attach(&mut self, c: Clause) -> u32 {
        let id = self.clauses.len() as u32;
        self.watches[(!c.lits[0]).code()].push(Watcher { clause: id, blocker: c.lits[1] });
        self.watches[(!c.lits[1]).code()].push(Watcher { clause: id, blocker: c.lits[0] });
        if c.learnt {
            self.num_learnt += 1;
        }
        self.clauses.push(c);
        id
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    #[inline]
    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        self.value[v] = l.is_positive() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Watches are keyed by the negation of the watched literal, so the list
    /// visited for a newly true literal `p` holds the clauses watching `!p`.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.value, w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let lits = &mut self.clauses[w.clause as usize].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let kept = Watcher { clause: w.clause, blocker: first };
                if first != w.blocker && lit_value(&self.value, first) == 1 {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if lit_value(&self.value, lits[k]) != 0 {
                        lits.swap(1, k);
                        self.watches[(!lits[1]).code()].push(kept);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = kept;
                j += 1;
                if lit_value(&self.value, first) == 0 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
        }
        if conflict.is_some() {
            self.qhead = self.trail.len();
        }
        conflict
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    /// First-UIP conflict analysis. Returns the learnt clause, asserting
    /// literal first and a literal of the backjump level second.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit::positive(0)];
        let mut pending = 0;
        let mut index = self.trail.len();
        let current = self.decision_level();
        let mut p: Option<Lit> = None;
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var()] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            confl = self.reason[lit.var()];
        }
        learnt[0] = !p.unwrap();

        // drop literals implied by the rest of the clause
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let r = self.reason[q.var()];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|l| self.seen[l.var()] || self.level[l.var()] == 0);
            if !redundant {
                keep.push(q);
            }
        }
        for &q in &learnt[1..] {
            self.seen[q.var()] = false;
        }
        let mut learnt = keep;

        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[best].var()] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            back = self.level[learnt[1].var()];
        }
        (learnt, back)
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for k in (start..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.phase[v] = l.is_positive();
            self.value[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    /// Forgets the worse half of the learnt clauses. Only called at level 0,
    /// where no learnt clause is the reason of a literal that analysis can
    /// reach.
    fn reduce_learnt(&mut self) {
        debug_assert_eq!(self.decision_level(), 0);
        let mut lbds: Vec<u32> = self.clauses.iter().filter(|c| c.learnt).map(|c| c.lbd).collect();
        lbds.sort_unstable();
        let cutoff = lbds[lbds.len() / 2].max(3);
        self.clauses.retain(|c| !c.learnt || c.lbd < cutoff);
        for w in &mut self.watches {
            w.clear();
        }
        for r in &mut self.reason {
            *r = NO_REASON;
        }
        let clauses = std::mem::take(&mut self.clauses);
        self.num_learnt = 0;
        for c in clauses {
            self.attach(c);
        }
    }

    fn search(&mut self, budget: u64) -> Outcome {
        if self.unsat {
            return Outcome::Unsat;
        }
        let mut restart_no = 0;
        let mut until_restart = 100 * luby(restart_no);
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return Outcome::Unsat;
                }
                let (learnt, back) = self.analyze(confl);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let id = self.attach(Clause { lits: learnt, learnt: true, lbd });
                    self.enqueue(asserting, id);
                }
                self.var_inc /= 0.95;
                until_restart = until_restart.saturating_sub(1);
                continue;
            }
            if until_restart == 0 {
                restart_no += 1;
                until_restart = 100 * luby(restart_no);
                self.cancel_until(0);
                if self.num_learnt > self.max_learnt {
                    self.reduce_learnt();
                    self.max_learnt += self.max_learnt / 10;
                }
                continue;
            }
            if self.stats.conflicts >= budget {
                return Outcome::Budget;
            }
            let next = loop {
                match self.heap.pop(&self.activity) {
                    Some(v) if self.value[v] == UNDEF => break Some(v),
                    Some(_) => continue,
                    None => break None,
                }
            };
            let Some(v) = next else {
                return Outcome::Sat;
            };
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            self.enqueue(Lit::new(v, self.phase[v]), NO_REASON);
        }
    }

    /// Enumerates models that differ on `projection`, one per distinct
    /// projection, until `limit` are found or `budget` conflicts are spent.
    /// Each model is excluded by a blocking clause over the projected
    /// variables. Returns the models and whether the list is exhaustive.
    pub fn enumerate_projected(
        mut self,
        projection: &[usize],
        limit: usize,
        budget: u64,
    ) -> (Vec<Assignment>, bool, SolveStats) {
        let mut models = Vec::new();
        loop {
            match self.search(budget) {
                Outcome::Unsat => return (models, true, self.stats),
                Outcome::Budget => return (models, false, self.stats),
                Outcome::Sat => {
                    if models.len() == limit {
                        return (models, false, self.stats);
                    }
                    debug_assert_eq!(self.trail.len(), self.num_vars);
                    models.push(Assignment::new(self.value.iter().map(|&v| v == 1).collect()));
                    let block: Vec<Lit> = projection.iter().map(|&v| Lit::new(v, self.value[v] == 0)).collect();
                    self.cancel_until(0);
                    if !self.add_root_clause(block) {
                        return (models, true, self.stats);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }
}
