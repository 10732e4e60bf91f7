//! Message passing on the factor graph of a formula.
//!
//! * [`sp_run`] iterates the survey propagation equations for the warnings
//!   `eta[a -> x]`; [`sp_biases`] turns a fixed point into cover marginals.
//! * [`cover_bp_update`] is belief propagation on the request/warning
//!   problem whose solutions are the covers. Under the matched
//!   initialization it reproduces SP edge for edge.
//! * [`plain_bp_run`] is textbook sum-product on the formula itself, with
//!   uniform prior and clause indicator factors.
//!
//! Messages are indexed by the edge ids of [`FactorGraph`](crate::formula::FactorGraph).
//! Updates are synchronous: every sweep reads only the previous state.

mod bp;
mod cover_bp;
mod marginals;
mod sp;

pub use bp::{plain_bp_marginals, plain_bp_run, plain_bp_update, BpRun, BpState};
pub use cover_bp::{cover_bp_update, CoverBpState, Triple, RW00, RW01, RW10};
pub use marginals::{magnetization, write_residuals_csv, Estimator, Marginal, MarginalTable, Semantics};
pub use sp::{sp_biases, sp_run, sp_update, SpRun, SpState};

use rand::Rng;

use crate::error::{Error, Result};
use crate::formula::rng_from_seed;

/// Starting messages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    /// I.i.d. uniform on (0, 1), seeded.
    Random(u64),
    /// Every message set to this value.
    Uniform(f64),
}

impl Init {
    /// `len` starting message values.
    pub fn values(self, len: usize) -> Result<Vec<f64>> {
        match self {
            Init::Random(seed) => {
                let mut rng = rng_from_seed(seed);
                Ok((0..len).map(|_| rng.gen::<f64>()).collect())
            }
            Init::Uniform(v) if (0.0..=1.0).contains(&v) => Ok(vec![v; len]),
            Init::Uniform(v) => Err(Error::InvalidArgument(format!("initial message {v} outside [0, 1]"))),
        }
    }
}

/// Iteration controls shared by SP and plain BP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub init: Init,
    /// Stop once the max-norm change of a sweep drops below this.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Weight of the old message: `new = (1 - d) * computed + d * old`.
    pub damping: f64,
}

impl RunConfig {
    /// No damping, random init, `epsilon = 1e-3`, 1000 sweeps.
    pub fn sp() -> Self {
        RunConfig { init: Init::Random(0), epsilon: 1e-3, max_iters: 1000, damping: 0.0 }
    }

    /// Damping 0.5, random init, `epsilon = 1e-3`, 10 000 sweeps.
    pub fn bp() -> Self {
        RunConfig { init: Init::Random(0), epsilon: 1e-3, max_iters: 10_000, damping: 0.5 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.init = Init::Random(seed);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        check_damping(self.damping)
    }
}

pub(crate) fn check_damping(d: f64) -> Result<()> {
    if (0.0..1.0).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("damping {d} outside [0, 1)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    Converged,
    Unconverged,
}

/// `prod (b + d) - prod b` for non-negative `b` and `d`, accumulated as
/// `sum_k d_k prod_{j<k} b_j prod_{j>k} (b_j + d_j)` so that a small
/// gap keeps its relative precision.
pub(crate) fn product_gap<I: IntoIterator<Item = (f64, f64)>>(items: I) -> f64 {
    let (mut gap, mut low) = (0.0, 1.0);
    for (b, d) in items {
        gap = gap * (b + d) + low * d;
        low *= b;
    }
    gap
}

/// For factors given as `(eta, 1 - eta)` pairs: the all-but-one products
/// of `1 - eta`, one minus each of them, and the same pair for the full
/// product. Nothing is subtracted from 1 after multiplying.
pub(crate) fn exclusive_complements(eta: &[(f64, f64)], prod: &mut Vec<f64>, gap: &mut Vec<f64>) -> (f64, f64) {
    let n = eta.len();
    prod.clear();
    gap.clear();
    prod.resize(n, 1.0);
    gap.resize(n, 0.0);
    let (mut p, mut g) = (1.0, 0.0);
    for k in 0..n {
        prod[k] = p;
        gap[k] = g;
        g += p * eta[k].0;
        p *= eta[k].1;
    }
    let total = (p, g);
    let (mut s, mut h) = (1.0, 0.0);
    for k in (0..n).rev() {
        gap[k] += prod[k] * h;
        prod[k] *= s;
        h += s * eta[k].0;
        s *= eta[k].1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_match_naive_and_keep_precision() {
        let eta = [0.3, 0.0, 0.9, 0.5];
        let pairs: Vec<(f64, f64)> = eta.iter().map(|&e| (e, 1.0 - e)).collect();
        let (mut prod, mut gap) = (Vec::new(), Vec::new());
        let (p, g) = exclusive_complements(&pairs, &mut prod, &mut gap);
        let c: Vec<f64> = eta.iter().map(|e| 1.0 - e).collect();
        assert!((p - c.iter().product::<f64>()).abs() < 1e-15 && (g - (1.0 - p)).abs() < 1e-15);
        for k in 0..4 {
            let ex: f64 = c.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, v)| v).product();
            assert!((prod[k] - ex).abs() < 1e-15 && (gap[k] - (1.0 - ex)).abs() < 1e-15);
        }
        // 1 - (1 - 1e-20)^2 rounds to 0 when computed naively
        let (_, g) = exclusive_complements(&[(1e-20, 1.0), (1e-20, 1.0)], &mut prod, &mut gap);
        assert!((g / 2e-20 - 1.0).abs() < 1e-12);
        assert_eq!(gap, vec![1e-20, 1e-20]);
        let pg = product_gap([(0.5, 1e-20), (0.25, 0.5)]);
        let exact = (0.5 + 1e-20) * 0.75 - 0.125;
        assert!((pg - 0.25).abs() < 1e-15 && (pg - exact).abs() < 1e-15);
        assert!((product_gap([(1.0, 1e-30)]) - 1e-30).abs() < 1e-45);
        assert_eq!(product_gap(std::iter::empty()), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::sp().validate().is_ok());
        assert!(RunConfig { epsilon: 0.0, ..RunConfig::sp() }.validate().is_err());
        assert!(RunConfig { damping: 1.0, ..RunConfig::bp() }.validate().is_err());
        assert!(Init::Uniform(1.5).values(3).is_err());
    }
}
