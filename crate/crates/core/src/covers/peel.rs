use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{clause_ok, GeneralizedAssignment, LitState, Value};
use crate::error::{Error, Result};
use crate::formula::{rng_from_seed, Formula};

/// Which unsupported variable *-propagation stars next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelOrder {
    LowestIndex,
    /// First-in first-out in order of becoming unsupported.
    Queue,
    Random(u64),
}

impl Default for PeelOrder {
    fn default() -> Self {
        PeelOrder::LowestIndex
    }
}

#[derive(Clone, Debug)]
pub struct Peeled {
    pub cover: GeneralizedAssignment,
    /// `(star_count, unsupported_count)` before the first step and after
    /// every step. Empty unless tracing was requested.
    pub trace: Vec<(usize, usize)>,
}

enum Pending {
    Lowest(BTreeSet<usize>),
    Fifo(VecDeque<usize>, Vec<bool>),
    Random(Vec<usize>, Vec<usize>, ChaCha8Rng),
}

const ABSENT: usize = usize::MAX;

impl Pending {
    fn new(order: PeelOrder, n: usize) -> Self {
        match order {
            PeelOrder::LowestIndex => Pending::Lowest(BTreeSet::new()),
            PeelOrder::Queue => Pending::Fifo(VecDeque::new(), vec![false; n]),
            PeelOrder::Random(seed) => Pending::Random(Vec::new(), vec![ABSENT; n], rng_from_seed(seed)),
        }
    }

    fn insert(&mut self, x: usize) {
        match self {
            Pending::Lowest(set) => {
                set.insert(x);
            }
            Pending::Fifo(queue, queued) => {
                if !queued[x] {
                    queued[x] = true;
                    queue.push_back(x);
                }
            }
            Pending::Random(items, pos, _) => {
                if pos[x] == ABSENT {
                    pos[x] = items.len();
                    items.push(x);
                }
            }
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Pending::Lowest(set) => set.pop_first(),
            Pending::Fifo(queue, queued) => {
                let x = queue.pop_front()?;
                queued[x] = false;
                Some(x)
            }
            Pending::Random(items, pos, rng) => {
                if items.is_empty() {
                    return None;
                }
                let i = rng.gen_range(0..items.len());
                let x = items.swap_remove(i);
                if i < items.len() {
                    pos[items[i]] = i;
                }
                pos[x] = ABSENT;
                Some(x)
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            Pending::Lowest(set) => set.len(),
            Pending::Fifo(queue, _) => queue.len(),
            Pending::Random(items, _, _) => items.len(),
        }
    }
}

/// *-propagation: repeatedly turns an unsupported 0/1 variable into `*`
/// until none is left.
///
/// `start` must already satisfy the clause condition of a cover (every clause
/// has a true literal or two `*`s); a satisfying assignment always does, and
/// then the result is a true cover generalizing it.
pub fn star_propagate(f: &Formula, start: &GeneralizedAssignment, order: PeelOrder, trace: bool) -> Result<Peeled> {
    let n = f.num_vars();
    if start.len() != n {
        return Err(Error::InvalidArgument(format!(
            "generalized assignment has length {} but the formula has {n} variables",
            start.len()
        )));
    }
    if let Some(ci) = f.clauses().iter().position(|c| !clause_ok(start, c)) {
        return Err(Error::Precondition(format!("clause {} has no true literal and fewer than two stars", ci + 1)));
    }

    let mut sigma = start.clone();
    let occ = f.occurrences();
    let m = f.num_clauses();
    let mut n_true = vec![0u32; m];
    let mut n_star = vec![0u32; m];
    let mut true_sum = vec![0usize; m];
    for (ci, c) in f.clauses().iter().enumerate() {
        for &l in c {
            match sigma.lit_state(l) {
                LitState::True => {
                    n_true[ci] += 1;
                    true_sum[ci] += l.var();
                }
                LitState::Star => n_star[ci] += 1,
                LitState::False => {}
            }
        }
    }
    let supports = |ci: usize, n_true: &[u32], n_star: &[u32]| n_true[ci] == 1 && n_star[ci] == 0;
    let mut support_count = vec![0u32; n];
    for ci in 0..m {
        if supports(ci, &n_true, &n_star) {
            support_count[true_sum[ci]] += 1;
        }
    }

    let mut pending = Pending::new(order, n);
    let mut stars = 0;
    for x in 0..n {
        match sigma.get(x) {
            Value::Star => stars += 1,
            _ if support_count[x] == 0 => pending.insert(x),
            _ => {}
        }
    }

    let mut steps = Vec::new();
    if trace {
        steps.push((stars, pending.len()));
    }
    while let Some(x) = pending.pop() {
        let was_true_in = |positive: bool| sigma.get(x) == Value::from_bool(positive);
        for &(ci, l) in &occ[x] {
            if supports(ci, &n_true, &n_star) {
                let y = true_sum[ci];
                support_count[y] -= 1;
                if support_count[y] == 0 && y != x {
                    pending.insert(y);
                }
            }
            if was_true_in(l.is_positive()) {
                n_true[ci] -= 1;
                true_sum[ci] -= x;
            }
            n_star[ci] += 1;
        }
        sigma.set(x, Value::Star);
        stars += 1;
        if trace {
            steps.push((stars, pending.len()));
        }
    }
    Ok(Peeled { cover: sigma, trace: steps })
}
