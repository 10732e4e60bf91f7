use super::{
    check_damping, exclusive_complements, Convergence, Estimator, Marginal, MarginalTable, RunConfig, Semantics,
};
use crate::error::{Error, Result};
use crate::formula::FactorGraph;

/// Warnings `eta[e]` for every edge `e = (a, x)`, read as a -> x.
#[derive(Clone, Debug, PartialEq)]
pub struct SpState {
    pub eta: Vec<f64>,
    /// `1 - eta`, carried separately so that warnings close to 1 keep
    /// their precision.
    pub eta_bar: Vec<f64>,
    /// Sweeps applied since initialization.
    pub iterations: usize,
    /// Max-norm change of the last sweep; infinite before the first.
    pub residual: f64,
}

impl SpState {
    pub fn new(eta: Vec<f64>) -> Self {
        SpState { eta_bar: eta.iter().map(|e| 1.0 - e).collect(), eta, iterations: 0, residual: f64::INFINITY }
    }
}

#[derive(Clone, Debug)]
pub struct SpRun {
    pub state: SpState,
    pub status: Convergence,
    /// Residual of every sweep, in order.
    pub residuals: Vec<f64>,
}

impl SpRun {
    pub fn converged(&self) -> bool {
        self.status == Convergence::Converged
    }
}

/// Products of `1 - eta` over the positive and negative occurrences of each
/// variable, excluding one edge on its own side, each with its complement
/// `1 - product` computed without cancellation.
struct Cavity {
    /// For edge (a, x): product over C_a^s(x).
    same: Vec<f64>,
    same_gap: Vec<f64>,
    /// For edge (a, x): product over C_a^u(x).
    opposite: Vec<f64>,
    opposite_gap: Vec<f64>,
}

fn cavity(g: &FactorGraph, s: &SpState) -> Cavity {
    let l = g.num_edges();
    let mut c =
        Cavity { same: vec![1.0; l], same_gap: vec![0.0; l], opposite: vec![1.0; l], opposite_gap: vec![0.0; l] };
    let mut ids = [Vec::new(), Vec::new()];
    let mut etas = [Vec::new(), Vec::new()];
    let mut excl = [Vec::new(), Vec::new()];
    let mut gaps = [Vec::new(), Vec::new()];
    for x in 0..g.num_vars() {
        for side in 0..2 {
            ids[side].clear();
            etas[side].clear();
        }
        for &e in g.var_edges(x) {
            let side = g.edge(e).positive as usize;
            ids[side].push(e);
            etas[side].push((s.eta[e], s.eta_bar[e]));
        }
        let totals = [0, 1].map(|side| exclusive_complements(&etas[side], &mut excl[side], &mut gaps[side]));
        for side in 0..2 {
            for (k, &e) in ids[side].iter().enumerate() {
                c.same[e] = excl[side][k];
                c.same_gap[e] = gaps[side][k];
                (c.opposite[e], c.opposite_gap[e]) = totals[1 - side];
            }
        }
    }
    c
}

/// One synchronous SP sweep:
///
/// ```text
/// eta[a->x] = prod_{y in V(a)\x} Pu / (Pu + Ps + P0)
/// Pu[y->a]  = prod_{C_a^s(y)} (1 - eta) * (1 - prod_{C_a^u(y)} (1 - eta))
/// Ps[y->a]  = prod_{C_a^u(y)} (1 - eta) * (1 - prod_{C_a^s(y)} (1 - eta))
/// P0[y->a]  = prod_{C(y)\a} (1 - eta)
/// ```
///
/// followed by damping. A zero denominator means `y` receives warnings
/// from both sides and is reported as a contradiction.
pub fn sp_update(g: &FactorGraph, s: &SpState, damping: f64) -> Result<SpState> {
    check_damping(damping)?;
    if s.eta.len() != g.num_edges() {
        return Err(Error::InvalidArgument(format!(
            "state has {} messages but the graph has {} edges",
            s.eta.len(),
            g.num_edges()
        )));
    }
    if s.eta_bar.len() != s.eta.len() {
        return Err(Error::InvalidArgument("eta and eta_bar differ in length".into()));
    }
    let cav = cavity(g, s);
    let mut ratio = vec![0.0; g.num_edges()];
    let mut ratio_bar = vec![0.0; g.num_edges()];
    for a in 0..g.num_clauses() {
        let edges = g.clause_edges(a);
        if edges.len() < 2 {
            continue;
        }
        for e in edges {
            let (ps, pu) = (cav.same[e], cav.opposite[e]);
            let p_u = ps * cav.opposite_gap[e];
            let p_s = pu * cav.same_gap[e];
            let p_0 = ps * pu;
            let denom = p_u + p_s + p_0;
            if denom <= 0.0 {
                return Err(Error::Contradiction(format!(
                    "variable {} is warned both ways (clause {})",
                    g.edge(e).var + 1,
                    a + 1
                )));
            }
            ratio[e] = p_u / denom;
            ratio_bar[e] = (p_s + p_0) / denom;
        }
    }
    let mut eta = vec![0.0; g.num_edges()];
    let mut eta_bar = vec![0.0; g.num_edges()];
    let mut residual: f64 = 0.0;
    for a in 0..g.num_clauses() {
        let edges = g.clause_edges(a);
        for e in edges.clone() {
            // 1 - prod r = sum_k (1 - r_k) prod_{j<k} r_j
            let (mut computed, mut computed_bar) = (1.0, 0.0);
            for f in edges.clone().filter(|&f| f != e) {
                computed_bar += computed * ratio_bar[f];
                computed *= ratio[f];
            }
            let new = (1.0 - damping) * computed + damping * s.eta[e];
            residual = residual.max((new - s.eta[e]).abs());
            eta[e] = new;
            eta_bar[e] = (1.0 - damping) * computed_bar + damping * s.eta_bar[e];
        }
    }
    Ok(SpState { eta, eta_bar, iterations: s.iterations + 1, residual })
}

/// Iterates [`sp_update`] until the residual drops below `cfg.epsilon` or
/// `cfg.max_iters` sweeps have run.
pub fn sp_run(g: &FactorGraph, cfg: &RunConfig) -> Result<SpRun> {
    cfg.validate()?;
    let mut state = SpState::new(cfg.init.values(g.num_edges())?);
    let mut residuals = Vec::new();
    while state.iterations < cfg.max_iters {
        state = sp_update(g, &state, cfg.damping)?;
        residuals.push(state.residual);
        if state.residual < cfg.epsilon {
            return Ok(SpRun { state, status: Convergence::Converged, residuals });
        }
    }
    Ok(SpRun { state, status: Convergence::Unconverged, residuals })
}

/// Cover marginals from warnings:
///
/// ```text
/// W+ = (1 - prod_{C+(x)} (1 - eta)) * prod_{C-(x)} (1 - eta)
/// W- = (1 - prod_{C-(x)} (1 - eta)) * prod_{C+(x)} (1 - eta)
/// W* = prod_{C(x)} (1 - eta)
/// ```
///
/// normalized per variable.
pub fn sp_biases(g: &FactorGraph, s: &SpState) -> Result<MarginalTable> {
    if s.eta.len() != g.num_edges() || s.eta_bar.len() != g.num_edges() {
        return Err(Error::InvalidArgument("state does not match the graph".into()));
    }
    let mut rows = Vec::with_capacity(g.num_vars());
    let (mut scratch, mut scratch_gap) = (Vec::new(), Vec::new());
    let mut side = |x: usize, positive: bool| {
        let etas: Vec<(f64, f64)> = g
            .var_edges(x)
            .iter()
            .filter(|&&e| g.edge(e).positive == positive)
            .map(|&e| (s.eta[e], s.eta_bar[e]))
            .collect();
        exclusive_complements(&etas, &mut scratch, &mut scratch_gap)
    };
    for x in 0..g.num_vars() {
        let (plus, plus_gap) = side(x, true);
        let (minus, minus_gap) = side(x, false);
        let row = Marginal::from_weights(plus_gap * minus, minus_gap * plus, plus * minus)
            .ok_or_else(|| Error::Contradiction(format!("variable {} is warned both ways", x + 1)))?;
        rows.push(row);
    }
    Ok(MarginalTable::new(Semantics::Cover, Estimator::Sp, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{generate_random_3sat, generate_random_tree, Formula};
    use crate::propagation::Init;
    use proptest::prelude::*;

    fn graph(f: &Formula) -> FactorGraph {
        FactorGraph::new(f)
    }

    #[test]
    fn zero_is_fixed_point_on_trees() {
        for seed in 0..20 {
            let g = graph(&generate_random_tree(15, seed).unwrap());
            let zero = SpState::new(vec![0.0; g.num_edges()]);
            let next = sp_update(&g, &zero, 0.0).unwrap();
            assert!(next.eta.iter().all(|&v| v == 0.0));
            assert_eq!(next.residual, 0.0);
            let run = sp_run(&g, &RunConfig { init: Init::Uniform(0.0), ..RunConfig::sp() }).unwrap();
            assert!(run.converged());
            assert_eq!(run.residuals, vec![0.0]);
        }
    }

    #[test]
    fn trees_converge_to_zero_from_random_starts() {
        for seed in 0..20 {
            let g = graph(&generate_random_tree(20, seed).unwrap());
            for init in 0..10 {
                let cfg = RunConfig { epsilon: 1e-12, ..RunConfig::sp().with_seed(init) };
                let run = sp_run(&g, &cfg).unwrap();
                assert!(run.converged());
                assert!(run.state.eta.iter().all(|&v| v == 0.0));
                let table = sp_biases(&g, &run.state).unwrap();
                assert!(table.rows.iter().all(|r| *r == Marginal::new(0.0, 0.0, 1.0)));
            }
        }
    }

    #[test]
    fn unit_clause_warns_with_certainty() {
        let f = Formula::from_dimacs_clauses(3, &[&[1], &[-1, 2, 3]]).unwrap();
        let g = graph(&f);
        let mut s = SpState::new(vec![0.3; g.num_edges()]);
        for _ in 0..5 {
            s = sp_update(&g, &s, 0.0).unwrap();
            assert_eq!(s.eta[0], 1.0);
        }
        let table = sp_biases(&g, &s).unwrap();
        assert_eq!(table.rows[0], Marginal::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn opposite_units_contradict() {
        let f = Formula::from_dimacs_clauses(2, &[&[1], &[-1], &[1, 2]]).unwrap();
        let g = graph(&f);
        let s = SpState::new(vec![1.0; g.num_edges()]);
        assert!(matches!(sp_update(&g, &s, 0.0), Err(Error::Contradiction(_))));
        assert!(matches!(sp_biases(&g, &s), Err(Error::Contradiction(_))));
    }

    #[test]
    fn damping_mixes_old_and_new() {
        let f = generate_random_3sat(20, 80, 1).unwrap();
        let g = graph(&f);
        let s = SpState::new(Init::Random(4).values(g.num_edges()).unwrap());
        let plain = sp_update(&g, &s, 0.0).unwrap();
        let damped = sp_update(&g, &s, 0.25).unwrap();
        for e in 0..g.num_edges() {
            let expected = 0.75 * plain.eta[e] + 0.25 * s.eta[e];
            assert!((damped.eta[e] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_residuals() {
        let g = graph(&generate_random_3sat(200, 840, 3).unwrap());
        let a = sp_run(&g, &RunConfig::sp().with_seed(9)).unwrap();
        let b = sp_run(&g, &RunConfig::sp().with_seed(9)).unwrap();
        assert_eq!(a.residuals, b.residuals);
        assert!(sp_run(&g, &RunConfig { epsilon: -1.0, ..RunConfig::sp() }).is_err());
    }

    proptest! {
        #[test]
        fn eta_stays_in_unit_interval(n in 3usize..40, alpha in 0.5f64..6.0, seed in any::<u64>(), damping in 0.0f64..0.9) {
            let f = generate_random_3sat(n, (alpha * n as f64) as usize, seed).unwrap();
            let g = graph(&f);
            let mut s = SpState::new(Init::Random(seed).values(g.num_edges()).unwrap());
            for _ in 0..5 {
                s = sp_update(&g, &s, damping).unwrap();
                prop_assert!(s.eta.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
            for r in sp_biases(&g, &s).unwrap().rows {
                prop_assert!((r.p_plus + r.p_minus + r.p_star - 1.0).abs() < 1e-9);
                prop_assert!(r.p_plus >= 0.0 && r.p_minus >= 0.0 && r.p_star >= 0.0);
            }
        }
    }
}
