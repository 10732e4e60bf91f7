use rayon::prelude::*;

use crate::covers::{
    enumerate_covers_bruteforce, enumerate_covers_sat, star_propagate, CoverEnumeration, GeneralizedAssignment,
    PeelOrder, Value,
};
use crate::error::{Error, Result};
use crate::formula::{sub_seed, Assignment, FactorGraph, Formula};
use crate::propagation::{
    plain_bp_marginals, plain_bp_run, sp_biases, sp_run, BpRun, Estimator, MarginalTable, RunConfig, Semantics, SpRun,
};
use crate::solver::{enumerate_models, sample_solutions, WalkSatConfig, UNLIMITED};

/// Largest model count [`exact_solution_marginals`] will enumerate.
pub const DEFAULT_MODEL_CAP: usize = 5_000_000;

fn solution_table(n: usize, models: &[Assignment], estimator: Estimator) -> MarginalTable {
    let mut plus = vec![0usize; n];
    for m in models {
        for (x, &v) in m.values().iter().enumerate() {
            plus[x] += v as usize;
        }
    }
    let minus: Vec<usize> = plus.iter().map(|&p| models.len() - p).collect();
    MarginalTable::from_counts(Semantics::Solution, estimator, &plus, &minus, models.len())
}

/// Frequencies over all models, each weighted equally.
pub fn exact_solution_marginals(f: &Formula) -> Result<MarginalTable> {
    exact_solution_marginals_with_cap(f, DEFAULT_MODEL_CAP)
}

pub fn exact_solution_marginals_with_cap(f: &Formula, cap: usize) -> Result<MarginalTable> {
    let list = enumerate_models(f, cap);
    if !list.complete {
        return Err(Error::OverCap { what: "model count", got: list.models.len() + 1, cap });
    }
    if list.models.is_empty() {
        return Err(Error::Unsatisfiable);
    }
    Ok(solution_table(f.num_vars(), &list.models, Estimator::Exact))
}

/// What the sampler delivered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub requested: usize,
    pub obtained: usize,
    pub distinct: usize,
}

/// Frequencies over `k` WalkSAT samples, duplicates counted. WalkSAT is not
/// a uniform sampler, so this estimates a biased distribution.
pub fn sampled_solution_marginals(f: &Formula, k: usize, seed: u64) -> Result<(MarginalTable, SampleReport)> {
    sampled_solution_marginals_with(f, k, &WalkSatConfig { seed, ..Default::default() })
}

pub fn sampled_solution_marginals_with(
    f: &Formula,
    k: usize,
    cfg: &WalkSatConfig,
) -> Result<(MarginalTable, SampleReport)> {
    let set = sample_solutions(f, k, cfg)?;
    if set.models.is_empty() {
        return Err(Error::Incomplete("the sampler found no solution".into()));
    }
    let mut table = solution_table(f.num_vars(), &set.models, Estimator::Sampled);
    table.complete = set.models.len() == k;
    let report = SampleReport { requested: k, obtained: set.models.len(), distinct: set.distinct };
    Ok((table, report))
}

/// Frequencies of 1, 0 and `*` over a list of covers.
pub fn cover_table<'a, I>(n: usize, covers: I, estimator: Estimator) -> MarginalTable
where
    I: IntoIterator<Item = &'a GeneralizedAssignment>,
{
    let mut plus = vec![0usize; n];
    let mut minus = vec![0usize; n];
    let mut total = 0;
    for c in covers {
        total += 1;
        for (x, v) in c.values().iter().enumerate() {
            match v {
                Value::One => plus[x] += 1,
                Value::Zero => minus[x] += 1,
                Value::Star => {}
            }
        }
    }
    MarginalTable::from_counts(Semantics::Cover, estimator, &plus, &minus, total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMethod {
    BruteForce,
    Sat,
}

pub fn enumerate_covers(f: &Formula, method: CoverMethod) -> Result<CoverEnumeration> {
    match method {
        CoverMethod::BruteForce => enumerate_covers_bruteforce(f),
        CoverMethod::Sat => enumerate_covers_sat(f, usize::MAX, UNLIMITED),
    }
}

/// Uniform frequencies over all covers, the trivial one included. The
/// table is flagged incomplete when the enumeration was.
pub fn exact_cover_marginals(f: &Formula, method: CoverMethod) -> Result<MarginalTable> {
    Ok(cover_marginals_of(f.num_vars(), &enumerate_covers(f, method)?, true))
}

/// Cover marginals from an existing enumeration. With `include_trivial`
/// false the all-`*` cover is left out, which is the distribution
/// conditioned on being non-trivial; its magnetization has the same sign
/// and is larger by the factor `covers / (covers - 1)`.
pub fn cover_marginals_of(n: usize, e: &CoverEnumeration, include_trivial: bool) -> MarginalTable {
    let chosen = e.covers.iter().filter(|c| include_trivial || !c.assignment.is_trivial()).map(|c| &c.assignment);
    let mut table = cover_table(n, chosen, Estimator::Exact);
    table.complete = e.complete;
    table
}

/// Terminal covers of peeling each solution.
pub fn peel_all(f: &Formula, solutions: &[Assignment], order: PeelOrder) -> Result<Vec<GeneralizedAssignment>> {
    solutions.iter().map(|s| star_propagate(f, &s.into(), order, false).map(|p| p.cover)).collect()
}

/// Frequencies over the covers reached by peeling the given solutions,
/// trivial outcomes included and duplicates kept.
pub fn peeled_cover_marginals_from(f: &Formula, solutions: &[Assignment], order: PeelOrder) -> Result<MarginalTable> {
    let covers = peel_all(f, solutions, order)?;
    Ok(cover_table(f.num_vars(), &covers, Estimator::Peeled))
}

/// Samples `k` solutions with WalkSAT and peels each one. Random peeling
/// orders get a distinct seed per sample.
pub fn peeled_cover_marginals(
    f: &Formula,
    k: usize,
    seed: u64,
    order: PeelOrder,
) -> Result<(MarginalTable, SampleReport)> {
    let set = sample_solutions(f, k, &WalkSatConfig { seed, ..Default::default() })?;
    if set.models.is_empty() {
        return Err(Error::Incomplete("the sampler found no solution".into()));
    }
    let covers: Vec<GeneralizedAssignment> = set
        .models
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let order = match order {
                PeelOrder::Random(s) => PeelOrder::Random(sub_seed(s, i as u64)),
                other => other,
            };
            star_propagate(f, &m.into(), order, false).map(|p| p.cover)
        })
        .collect::<Result<_>>()?;
    let mut table = cover_table(f.num_vars(), &covers, Estimator::Peeled);
    table.complete = set.models.len() == k;
    let report = SampleReport { requested: k, obtained: set.models.len(), distinct: set.distinct };
    Ok((table, report))
}

/// SP biases after [`sp_run`]. The table is flagged incomplete when SP did
/// not converge.
pub fn sp_marginals(f: &Formula, cfg: &RunConfig) -> Result<(MarginalTable, SpRun)> {
    let g = FactorGraph::new(f);
    let run = sp_run(&g, cfg)?;
    let mut table = sp_biases(&g, &run.state)?;
    table.complete = run.converged();
    Ok((table, run))
}

/// Plain BP marginals from the final state, converged or not.
pub fn bp_marginals(f: &Formula, cfg: &RunConfig) -> Result<(MarginalTable, BpRun)> {
    let g = FactorGraph::new(f);
    let run = plain_bp_run(&g, cfg)?;
    let mut table = plain_bp_marginals(&g, &run.state)?;
    table.complete = run.converged();
    Ok((table, run))
}
