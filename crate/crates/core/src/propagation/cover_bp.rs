use rand::Rng;

use super::product_gap;
use crate::error::{Error, Result};
use crate::formula::{rng_from_seed, FactorGraph};

/// Message over the request/warning pairs `(r[a->x], w[x->a])`, indexed by
/// [`RW00`], [`RW01`] and [`RW10`].
pub type Triple = [f64; 3];

pub const RW00: usize = 0;
pub const RW01: usize = 1;
pub const RW10: usize = 2;

/// BP messages on the request/warning problem, one triple per edge and
/// direction. Triples are kept normalized to sum 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverBpState {
    pub var_to_clause: Vec<Triple>,
    pub clause_to_var: Vec<Triple>,
    pub iterations: usize,
}

fn normalize(t: Triple) -> Option<Triple> {
    let t = t.map(|v| v.max(0.0));
    let s: f64 = t.iter().sum();
    (s > 0.0).then(|| t.map(|v| v / s))
}

impl CoverBpState {
    /// Random positive triples in both directions.
    pub fn random(num_edges: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let mut draw =
            || normalize([rng.gen::<f64>() + 1e-3, rng.gen::<f64>() + 1e-3, rng.gen::<f64>() + 1e-3]).unwrap();
        let var_to_clause = (0..num_edges).map(|_| draw()).collect();
        let clause_to_var = (0..num_edges).map(|_| draw()).collect();
        CoverBpState { var_to_clause, clause_to_var, iterations: 0 }
    }

    /// State matching the warnings `eta`: clause -> variable triples
    /// proportional to `(1 - eta, 1 - eta, eta)`, variable -> clause
    /// triples random with equal `(0,0)` and `(1,0)` entries.
    pub fn matched(eta: &[f64], seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let var_to_clause = eta
            .iter()
            .map(|_| {
                let q = rng.gen::<f64>() + 1e-3;
                let w = rng.gen::<f64>() + 1e-3;
                normalize([q, w, q]).unwrap()
            })
            .collect();
        let clause_to_var = eta.iter().map(|&h| normalize([1.0 - h, 1.0 - h, h]).unwrap()).collect();
        CoverBpState { var_to_clause, clause_to_var, iterations: 0 }
    }

    /// Warnings read off the clause -> variable messages,
    /// `lambda(1,0) / (lambda(0,0) + lambda(1,0))`.
    pub fn eta(&self) -> Vec<f64> {
        self.clause_to_var.iter().map(|t| t[RW10] / (t[RW00] + t[RW10])).collect()
    }
}

/// Variable -> clause messages from the clause -> variable ones:
///
/// ```text
/// (1,0): prod_{C_a^s} (l00 + l10) * prod_{C_a^u} l01
/// (0,1): prod_{C_a^s} l01 * [prod_{C_a^u} (l00 + l10) - prod_{C_a^u} l00]
/// (0,0): [prod_{C_a^s} (l00 + l10) - prod_{C_a^s} l00] * prod_{C_a^u} l01
///        + prod_{C(x)\a} l00
/// ```
///
/// The `(0,1)` bracket ranges over the opposite-sign clauses: a warning to
/// `a` needs a request from one of them.
fn variable_messages(g: &FactorGraph, clause_to_var: &[Triple], out: &mut [Triple]) -> Result<()> {
    let others = |x: usize, e: usize, same: bool| {
        let sign = g.edge(e).positive;
        g.var_edges(x)
            .iter()
            .filter(move |&&b| b != e && (g.edge(b).positive == sign) == same)
            .map(move |&b| clause_to_var[b])
    };
    for x in 0..g.num_vars() {
        for &e in g.var_edges(x) {
            let prod = |same: bool, k: usize| others(x, e, same).map(|t| t[k]).product::<f64>();
            // prod (l00 + l10) - prod l00, summed term by term
            let gap = |same: bool| product_gap(others(x, e, same).map(|t| (t[RW00], t[RW10])));
            let (s00, u00) = (prod(true, RW00), prod(false, RW00));
            let (s01, u01) = (prod(true, RW01), prod(false, RW01));
            let (s_gap, u_gap) = (gap(true), gap(false));
            let mut t = [0.0; 3];
            t[RW10] = (s_gap + s00) * u01;
            t[RW01] = s01 * u_gap;
            t[RW00] = s_gap * u01 + s00 * u00;
            out[e] = normalize(t)
                .ok_or_else(|| Error::Contradiction(format!("all-zero message from variable {}", x + 1)))?;
        }
    }
    Ok(())
}

/// Clause -> variable messages from the variable -> clause ones:
///
/// ```text
/// (1,0): prod l01
/// (0,0): prod (l00 + l01) - prod l01
/// (0,1): (0,0) + sum_y (l10[y] - l00[y]) * prod_{y' != y} l01
/// ```
///
/// with products over `V(a)\x`. Expanding in the number of `l00`
/// factors keeps every term non-negative: with `e0 = prod l01`, `e1` the
/// terms with one `l00`, `e2` those with two or more and `f1` the terms
/// with one `l10`, the entries are `e0`, `e1 + e2` and `e2 + f1`.
fn clause_messages(g: &FactorGraph, var_to_clause: &[Triple], out: &mut [Triple]) -> Result<()> {
    for a in 0..g.num_clauses() {
        let edges = g.clause_edges(a);
        for e in edges.clone() {
            let (mut e0, mut e1, mut e2, mut f1) = (1.0, 0.0, 0.0, 0.0);
            for f in edges.clone().filter(|&f| f != e) {
                let t = var_to_clause[f];
                e2 = e2 * (t[RW00] + t[RW01]) + e1 * t[RW00];
                e1 = e1 * t[RW01] + e0 * t[RW00];
                f1 = f1 * t[RW01] + e0 * t[RW10];
                e0 *= t[RW01];
            }
            let mut t = [0.0; 3];
            t[RW10] = e0;
            t[RW00] = e1 + e2;
            t[RW01] = e2 + f1;
            out[e] =
                normalize(t).ok_or_else(|| Error::Contradiction(format!("all-zero message from clause {}", a + 1)))?;
        }
    }
    Ok(())
}

/// One sweep: variable -> clause messages from the current clause ->
/// variable messages, then clause -> variable messages from those.
///
/// Starting from [`CoverBpState::matched`], [`CoverBpState::eta`] after `t`
/// sweeps equals the SP warnings after `t` undamped SP sweeps.
pub fn cover_bp_update(g: &FactorGraph, s: &CoverBpState) -> Result<CoverBpState> {
    let l = g.num_edges();
    if s.var_to_clause.len() != l || s.clause_to_var.len() != l {
        return Err(Error::InvalidArgument("state does not match the graph".into()));
    }
    let mut var_to_clause = vec![[0.0; 3]; l];
    variable_messages(g, &s.clause_to_var, &mut var_to_clause)?;
    let mut clause_to_var = vec![[0.0; 3]; l];
    clause_messages(g, &var_to_clause, &mut clause_to_var)?;
    Ok(CoverBpState { var_to_clause, clause_to_var, iterations: s.iterations + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{generate_random_3sat, Formula};
    use crate::propagation::{sp_update, Init, SpState};

    #[test]
    fn single_clause_request() {
        let f = Formula::from_dimacs_clauses(3, &[&[1, -2, 3]]).unwrap();
        let g = FactorGraph::new(&f);
        let s = CoverBpState::random(3, 5);
        let next = cover_bp_update(&g, &s).unwrap();
        // every variable occurs once, so its message to the clause is the
        // empty-product triple (1, 0, 1) / 2
        for t in &next.var_to_clause {
            assert_eq!(*t, [0.5, 0.0, 0.5]);
        }
        // no warnings arrive, so the clause never requests
        for t in &next.clause_to_var {
            assert_eq!(t[RW10], 0.0);
        }
        let mut v = [[1.0 / 3.0; 3]; 3];
        v[1] = [0.2, 0.5, 0.3];
        v[2] = [0.1, 0.6, 0.3];
        let mut out = [[0.0; 3]; 3];
        clause_messages(&g, &v, &mut out).unwrap();
        let w = 0.5 * 0.6;
        let sum = 0.7 * 0.7;
        let corr = (0.3 - 0.2) * 0.6 + (0.3 - 0.1) * 0.5;
        let total = w + 2.0 * (sum - w) + corr;
        assert!((out[0][RW10] - w / total).abs() < 1e-15);
        assert!((out[0][RW00] - (sum - w) / total).abs() < 1e-15);
    }

    #[test]
    fn matched_init_keeps_equal_entries() {
        let f = generate_random_3sat(25, 90, 3).unwrap();
        let g = FactorGraph::new(&f);
        let eta = Init::Random(1).values(g.num_edges()).unwrap();
        let mut s = CoverBpState::matched(&eta, 2);
        for _ in 0..20 {
            s = cover_bp_update(&g, &s).unwrap();
            for t in &s.var_to_clause {
                assert!((t[RW10] - t[RW00]).abs() < 1e-12);
            }
            for t in &s.clause_to_var {
                assert!((t[RW01] - t[RW00]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lockstep_with_sp() {
        for (seed, alpha) in [(0u64, 2.0), (1, 3.0), (2, 4.2)] {
            let f = generate_random_3sat(30, (alpha * 30.0) as usize, seed).unwrap();
            let g = FactorGraph::new(&f);
            let eta0 = Init::Random(seed + 10).values(g.num_edges()).unwrap();
            let mut sp = SpState::new(eta0.clone());
            let mut bp = CoverBpState::matched(&eta0, seed);
            for _ in 0..100 {
                sp = sp_update(&g, &sp, 0.0).unwrap();
                bp = cover_bp_update(&g, &bp).unwrap();
                for (a, b) in sp.eta.iter().zip(bp.eta()) {
                    assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn triples_stay_normalized() {
        let f = generate_random_3sat(20, 70, 8).unwrap();
        let g = FactorGraph::new(&f);
        let mut s = CoverBpState::random(g.num_edges(), 1);
        for _ in 0..10 {
            s = cover_bp_update(&g, &s).unwrap();
            for t in s.var_to_clause.iter().chain(&s.clause_to_var) {
                assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(t.iter().all(|&v| v >= 0.0));
            }
        }
    }
}
