use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use super::{SolveResult, SolveStats};
use crate::error::{Error, Result};
use crate::formula::{rng_from_seed, sub_seed, Assignment, Formula};

#[derive(Clone, Debug)]
pub struct WalkSatConfig {
    pub max_flips: u64,
    /// Probability of a random-walk move when no free flip exists.
    pub noise: f64,
    /// Flips between restarts from a fresh random assignment; `None` means
    /// `100 * n`.
    pub restart_interval: Option<u64>,
    pub seed: u64,
    /// Starting point of the first try; random when absent.
    pub initial: Option<Assignment>,
}

impl Default for WalkSatConfig {
    fn default() -> Self {
        WalkSatConfig { max_flips: 10_000_000, noise: 0.5, restart_interval: None, seed: 0, initial: None }
    }
}

struct State<'a> {
    f: &'a Formula,
    occ: Vec<Vec<(u32, bool)>>,
    value: Vec<bool>,
    true_count: Vec<u32>,
    /// Sum of variable ids of the true literals of each clause; identifies
    /// the sole satisfier when `true_count == 1`.
    true_sum: Vec<usize>,
    break_count: Vec<u32>,
    unsat: Vec<u32>,
    unsat_pos: Vec<u32>,
}

const NOT_LISTED: u32 = u32::MAX;

impl<'a> State<'a> {
    fn new(f: &'a Formula) -> Self {
        let mut occ = vec![Vec::new(); f.num_vars()];
        for (ci, c) in f.clauses().iter().enumerate() {
            for l in c {
                occ[l.var()].push((ci as u32, l.is_positive()));
            }
        }
        State {
            f,
            occ,
            value: vec![false; f.num_vars()],
            true_count: vec![0; f.num_clauses()],
            true_sum: vec![0; f.num_clauses()],
            break_count: vec![0; f.num_vars()],
            unsat: Vec::new(),
            unsat_pos: vec![NOT_LISTED; f.num_clauses()],
        }
    }

    fn reset(&mut self, values: Vec<bool>) {
        self.value = values;
        self.unsat.clear();
        self.break_count.iter_mut().for_each(|b| *b = 0);
        for (ci, c) in self.f.clauses().iter().enumerate() {
            let mut count = 0;
            let mut sum = 0;
            for l in c {
                if l.eval(self.value[l.var()]) {
                    count += 1;
                    sum += l.var();
                }
            }
            self.true_count[ci] = count;
            self.true_sum[ci] = sum;
            if count == 0 {
                self.unsat_pos[ci] = self.unsat.len() as u32;
                self.unsat.push(ci as u32);
            } else {
                self.unsat_pos[ci] = NOT_LISTED;
                if count == 1 {
                    self.break_count[sum] += 1;
                }
            }
        }
    }

    fn remove_unsat(&mut self, ci: usize) {
        let pos = self.unsat_pos[ci] as usize;
        let last = self.unsat.pop().unwrap();
        if pos < self.unsat.len() {
            self.unsat[pos] = last;
            self.unsat_pos[last as usize] = pos as u32;
        }
        self.unsat_pos[ci] = NOT_LISTED;
    }

    fn flip(&mut self, v: usize) {
        self.value[v] = !self.value[v];
        let now = self.value[v];
        for k in 0..self.occ[v].len() {
            let (ci, positive) = self.occ[v][k];
            let ci = ci as usize;
            if positive == now {
                self.true_count[ci] += 1;
                match self.true_count[ci] {
                    1 => {
                        self.remove_unsat(ci);
                        self.break_count[v] += 1;
                    }
                    2 => self.break_count[self.true_sum[ci]] -= 1,
                    _ => {}
                }
                self.true_sum[ci] += v;
            } else {
                self.true_count[ci] -= 1;
                self.true_sum[ci] -= v;
                match self.true_count[ci] {
                    0 => {
                        self.unsat_pos[ci] = self.unsat.len() as u32;
                        self.unsat.push(ci as u32);
                        self.break_count[v] -= 1;
                    }
                    1 => self.break_count[self.true_sum[ci]] += 1,
                    _ => {}
                }
            }
        }
    }
}

/// WalkSAT: pick a random unsatisfied clause; flip a variable with zero
/// break count if one exists, otherwise with probability `noise` a random
/// variable of the clause and else one with minimum break count.
pub fn walksat(f: &Formula, cfg: &WalkSatConfig) -> Result<SolveResult> {
    if !(0.0..=1.0).contains(&cfg.noise) {
        return Err(Error::InvalidArgument(format!("noise {} outside [0, 1]", cfg.noise)));
    }
    let n = f.num_vars();
    let mut rng = rng_from_seed(cfg.seed);
    let restart = cfg.restart_interval.unwrap_or(100 * n as u64).max(1);
    let mut stats = SolveStats::default();
    let mut state = State::new(f);

    let first = match &cfg.initial {
        Some(a) if a.len() == n => a.values().to_vec(),
        Some(a) => {
            return Err(Error::InvalidArgument(format!(
                "initial assignment has length {} but the formula has {n} variables",
                a.len()
            )))
        }
        None => (0..n).map(|_| rng.gen()).collect(),
    };
    state.reset(first);
    let mut since_restart = 0u64;
    let mut candidates: Vec<usize> = Vec::with_capacity(8);

    loop {
        if state.unsat.is_empty() {
            let model = Assignment::new(state.value.clone());
            assert!(f.evaluate(&model), "walksat bookkeeping produced a non-model");
            return Ok(SolveResult::sat(model, stats));
        }
        if stats.flips >= cfg.max_flips {
            return Ok(SolveResult::unknown(stats));
        }
        if since_restart >= restart {
            state.reset((0..n).map(|_| rng.gen()).collect());
            since_restart = 0;
            continue;
        }
        let ci = state.unsat[rng.gen_range(0..state.unsat.len())] as usize;
        let clause = f.clause(ci);
        candidates.clear();
        let mut best = u32::MAX;
        for l in clause {
            let b = state.break_count[l.var()];
            if b < best {
                best = b;
                candidates.clear();
            }
            if b == best {
                candidates.push(l.var());
            }
        }
        let var = if best > 0 && rng.gen::<f64>() < cfg.noise {
            clause[rng.gen_range(0..clause.len())].var()
        } else {
            candidates[rng.gen_range(0..candidates.len())]
        };
        state.flip(var);
        stats.flips += 1;
        since_restart += 1;
    }
}

/// Solutions drawn by independent seeded WalkSAT runs.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub models: Vec<Assignment>,
    pub distinct: usize,
    /// Runs that hit their flip budget.
    pub failures: usize,
    pub flips: u64,
}

/// Draws `k` solutions from independent WalkSAT runs seeded by
/// `(seed, run index)`. A run that exhausts its flip budget is replaced by
/// a run with the next index, at most `k` times in all, so fewer than `k`
/// solutions come back only when that many runs fail.
pub fn sample_solutions(f: &Formula, k: usize, cfg: &WalkSatConfig) -> Result<SampleSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut models = Vec::with_capacity(k);
    let mut failures = 0;
    let mut flips = 0;
    let mut next = 0u64;
    while models.len() < k && failures < k {
        let batch = (k - models.len()).min(k - failures) as u64;
        let runs: Vec<Result<SolveResult>> = (next..next + batch)
            .into_par_iter()
            .map(|i| walksat(f, &WalkSatConfig { seed: sub_seed(cfg.seed, i), initial: None, ..cfg.clone() }))
            .collect();
        next += batch;
        for r in runs {
            let r = r?;
            flips += r.stats.flips;
            match r.model {
                Some(m) => models.push(m),
                None => failures += 1,
            }
        }
    }
    if failures > 0 {
        log::warn!("sample_solutions: {failures} runs exhausted their flip budget; {} of {k} samples", models.len());
    }
    let distinct = models.iter().collect::<HashSet<_>>().len();
    Ok(SampleSet { models, distinct, failures, flips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fixtures::{three_clause, unique_model};
    use crate::formula::generate_random_3sat;
    use crate::solver::Status;

    #[test]
    fn finds_unique_solution() {
        for seed in 0..20 {
            let cfg = WalkSatConfig { max_flips: 100_000, seed, ..Default::default() };
            let r = walksat(&unique_model(), &cfg).unwrap();
            assert_eq!(r.model.unwrap().to_string(), "11");
            assert!(walksat(&three_clause(), &cfg).unwrap().is_sat());
        }
    }

    #[test]
    fn satisfying_start_needs_no_flips() {
        let cfg = WalkSatConfig { initial: Some(Assignment::from_bits("111").unwrap()), ..Default::default() };
        let r = walksat(&three_clause(), &cfg).unwrap();
        assert_eq!(r.stats.flips, 0);
        assert!(r.is_sat());
    }

    #[test]
    fn unsat_runs_out_of_budget() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]).unwrap();
        let cfg = WalkSatConfig { max_flips: 1000, ..Default::default() };
        let r = walksat(&f, &cfg).unwrap();
        assert_eq!(r.status, Status::Unknown);
        assert_eq!(r.stats.flips, 1000);
    }

    #[test]
    fn bad_noise_rejected() {
        let cfg = WalkSatConfig { noise: 1.5, ..Default::default() };
        assert!(walksat(&three_clause(), &cfg).is_err());
    }

    #[test]
    fn reproducible_flip_sequence() {
        let f = generate_random_3sat(200, 800, 11).unwrap();
        let cfg = WalkSatConfig { seed: 99, ..Default::default() };
        let a = walksat(&f, &cfg).unwrap();
        let b = walksat(&f, &cfg).unwrap();
        assert_eq!(a.stats.flips, b.stats.flips);
        assert_eq!(a.model, b.model);
        assert!(a.is_sat());
    }

    #[test]
    fn solves_moderate_instance_with_restarts() {
        let f = generate_random_3sat(300, 1200, 4).unwrap();
        let cfg = WalkSatConfig { seed: 1, restart_interval: Some(500), ..Default::default() };
        assert!(walksat(&f, &cfg).unwrap().is_sat());
    }

    #[test]
    fn sampling() {
        let set = sample_solutions(&unique_model(), 10, &WalkSatConfig::default()).unwrap();
        assert_eq!(set.models.len(), 10);
        assert_eq!(set.distinct, 1);
        assert!(sample_solutions(&three_clause(), 0, &WalkSatConfig::default()).is_err());

        let f = generate_random_3sat(40, 100, 2).unwrap();
        let set = sample_solutions(&f, 30, &WalkSatConfig { seed: 5, ..Default::default() }).unwrap();
        assert_eq!(set.models.len(), 30);
        assert!(set.distinct > 1);
        assert!(set.models.iter().all(|m| f.evaluate(m)));
    }
    #[test]
    fn failed_runs_are_replaced() {
        let f = generate_random_3sat(100, 350, 3).unwrap();
        let cfg = WalkSatConfig { max_flips: 400, seed: 1, ..Default::default() };
        let set = sample_solutions(&f, 20, &cfg).unwrap();
        assert!(set.failures > 0 && set.failures < 20, "{} failures", set.failures);
        assert_eq!(set.models.len(), 20);
        assert!(set.models.iter().all(|m| f.evaluate(m)));

        let unsat = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]).unwrap();
        let set = sample_solutions(&unsat, 5, &WalkSatConfig { max_flips: 100, ..Default::default() }).unwrap();
        assert_eq!((set.models.len(), set.failures), (0, 5));
    }
}
