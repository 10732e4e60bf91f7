use super::{check_damping, Convergence, Estimator, Marginal, MarginalTable, RunConfig, Semantics};
use crate::error::{Error, Result};
use crate::formula::FactorGraph;

/// Sum-product messages for the formula itself.
#[derive(Clone, Debug, PartialEq)]
pub struct BpState {
    /// For edge (a, x): probability, under the message x -> a, that `x`
    /// takes the value violating its literal in `a`.
    pub violate: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl BpState {
    pub fn new(violate: Vec<f64>) -> Self {
        BpState { violate, iterations: 0, residual: f64::INFINITY }
    }
}

#[derive(Clone, Debug)]
pub struct BpRun {
    pub state: BpState,
    pub status: Convergence,
    pub residuals: Vec<f64>,
}

impl BpRun {
    pub fn converged(&self) -> bool {
        self.status == Convergence::Converged
    }
}

/// Clause -> variable messages as `P(x = 1)`. With `d` the product of the
/// other literals' violation probabilities, the clause puts weight 1 on the
/// satisfying value and `1 - d` on the violating one.
fn clause_messages(g: &FactorGraph, violate: &[f64]) -> Vec<f64> {
    let mut to_var = vec![0.0; g.num_edges()];
    for a in 0..g.num_clauses() {
        let edges = g.clause_edges(a);
        for e in edges.clone() {
            let d: f64 = edges.clone().filter(|&f| f != e).map(|f| violate[f]).product();
            let sat = 1.0 / (2.0 - d);
            to_var[e] = if g.edge(e).positive { sat } else { 1.0 - sat };
        }
    }
    to_var
}

/// Pairwise product `(p1, p0)` renormalized after every factor so long
/// products neither underflow nor lose their ratio.
#[inline]
fn times(acc: (f64, f64), p1: f64) -> (f64, f64) {
    let a = acc.0 * p1;
    let b = acc.1 * (1.0 - p1);
    let s = a + b;
    if s > 0.0 {
        (a / s, b / s)
    } else {
        (0.0, 0.0)
    }
}

fn contradiction(x: usize) -> Error {
    Error::Contradiction(format!("variable {} is forced both ways", x + 1))
}

/// One synchronous sweep followed by damping of the variable -> clause
/// messages.
pub fn plain_bp_update(g: &FactorGraph, s: &BpState, damping: f64) -> Result<BpState> {
    check_damping(damping)?;
    if s.violate.len() != g.num_edges() {
        return Err(Error::InvalidArgument("state does not match the graph".into()));
    }
    let to_var = clause_messages(g, &s.violate);
    let mut violate = vec![0.0; g.num_edges()];
    let mut residual: f64 = 0.0;
    let mut prefix = Vec::new();
    for x in 0..g.num_vars() {
        let edges = g.var_edges(x);
        prefix.clear();
        let mut acc = (1.0, 1.0);
        for &e in edges {
            prefix.push(acc);
            acc = times(acc, to_var[e]);
        }
        let mut suffix = (1.0, 1.0);
        for (k, &e) in edges.iter().enumerate().rev() {
            let (p1, p0) = (prefix[k].0 * suffix.0, prefix[k].1 * suffix.1);
            let total = p1 + p0;
            if !(total > 0.0) {
                return Err(contradiction(x));
            }
            let computed = if g.edge(e).positive { p0 / total } else { p1 / total };
            let new = (1.0 - damping) * computed + damping * s.violate[e];
            residual = residual.max((new - s.violate[e]).abs());
            violate[e] = new;
            suffix = times(suffix, to_var[e]);
        }
    }
    Ok(BpState { violate, iterations: s.iterations + 1, residual })
}

/// Iterates [`plain_bp_update`] until the residual drops below
/// `cfg.epsilon` or `cfg.max_iters` sweeps have run.
pub fn plain_bp_run(g: &FactorGraph, cfg: &RunConfig) -> Result<BpRun> {
    cfg.validate()?;
    let mut state = BpState::new(cfg.init.values(g.num_edges())?);
    let mut residuals = Vec::new();
    while state.iterations < cfg.max_iters {
        state = plain_bp_update(g, &state, cfg.damping)?;
        residuals.push(state.residual);
        if state.residual < cfg.epsilon {
            return Ok(BpRun { state, status: Convergence::Converged, residuals });
        }
    }
    Ok(BpRun { state, status: Convergence::Unconverged, residuals })
}

/// Solution marginals from whatever state is given, converged or not.
pub fn plain_bp_marginals(g: &FactorGraph, s: &BpState) -> Result<MarginalTable> {
    if s.violate.len() != g.num_edges() {
        return Err(Error::InvalidArgument("state does not match the graph".into()));
    }
    let to_var = clause_messages(g, &s.violate);
    let mut rows = Vec::with_capacity(g.num_vars());
    for x in 0..g.num_vars() {
        let (p1, p0) = g.var_edges(x).iter().fold((0.5, 0.5), |acc, &e| times(acc, to_var[e]));
        if !(p1 + p0 > 0.0) {
            return Err(contradiction(x));
        }
        rows.push(Marginal::new(p1 / (p1 + p0), p0 / (p1 + p0), 0.0));
    }
    Ok(MarginalTable::new(Semantics::Solution, Estimator::Bp, rows))
}
