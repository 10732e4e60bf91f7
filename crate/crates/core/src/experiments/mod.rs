//! Seed-stamped reproductions of the experiments: peeling trajectories,
//! the cover phase transition, growth of non-trivial peeling outcomes with
//! N, magnetization scatter plots and a decimation benchmark.
//!
//! Every CSV starts with `# key=value` comment lines holding the full
//! parameter set, so a file can be regenerated from its own header. All
//! randomness derives from the master seed through [`sub_seed`], so results
//! do not depend on the number of worker threads.

mod bench;
mod growth;
mod peeling;
mod scatter;
mod transition;

pub use bench::{run_decimation_bench, BenchRow, BenchSpec, DecimationBench};
pub use growth::{run_growth, scale_base, Growth, GrowthRow, GrowthSpec};
pub use peeling::{peel_samples, run_peeling, Peeling, PeelingSpec, PeelingTrace};
pub use scatter::{run_scatter, Scatter, ScatterKind, ScatterRow, ScatterSpec};
pub use transition::{default_alpha_grid, run_transition, Transition, TransitionRow, TransitionSpec};

use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::formula::{generate_random_3sat, sub_seed, Formula};
use crate::solver::{cdcl_solve, walksat, Status, WalkSatConfig, UNLIMITED};

/// Ordered `key=value` pairs written as the CSV preamble.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Header(Vec<(String, String)>);

impl Header {
    pub fn new(kind: &str) -> Self {
        let mut h = Header::default();
        h.push("experiment", kind);
        h
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        for (k, v) in &self.0 {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }
}

/// Stops scheduling new work once a wall-clock budget is spent.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    start: Instant,
    budget: Option<Duration>,
}

impl Deadline {
    pub fn new(budget: Option<Duration>) -> Self {
        Deadline { start: Instant::now(), budget }
    }

    pub fn expired(&self) -> bool {
        self.budget.is_some_and(|b| self.start.elapsed() > b)
    }
}

pub(crate) fn clause_count(n: usize, alpha: f64) -> usize {
    (alpha * n as f64).round() as usize
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")))
    }
}

/// Slot `index` of a trial stream: draws random formulas from
/// `sub_seed(stream, attempt)` until one is satisfiable. Returns
/// the formula, its seed and how many unsatisfiable draws were discarded.
pub(crate) fn satisfiable_formula(
    n: usize,
    alpha: f64,
    stream: u64,
    max_attempts: u64,
) -> Result<Option<(Formula, u64, u64)>> {
    for attempt in 0..max_attempts {
        let seed = sub_seed(stream, attempt);
        let f = generate_random_3sat(n, clause_count(n, alpha), seed)?;
        if cdcl_solve(&f, UNLIMITED).status == Status::Sat {
            return Ok(Some((f, seed, attempt)));
        }
    }
    Ok(None)
}

/// Conflicts spent proving a draw unsatisfiable before falling back to a
/// WalkSAT probe.
pub(crate) const PROBE_CONFLICTS: u64 = 200_000;

/// Above this size the CDCL probe is skipped: near the threshold it rarely
/// finishes and costs more than the WalkSAT run.
pub(crate) const PROBE_MAX_VARS: usize = 300;

/// Like [`satisfiable_formula`] for sizes where exact solving may be slow:
/// a draw is kept once bounded CDCL (small `n` only) or one WalkSAT run
/// solves it, and discarded when CDCL refutes it or both give up.
pub(crate) fn solvable_formula(
    n: usize,
    alpha: f64,
    stream: u64,
    max_attempts: u64,
    sampler: &WalkSatConfig,
) -> Result<Option<(Formula, u64, u64)>> {
    for attempt in 0..max_attempts {
        let seed = sub_seed(stream, attempt);
        let f = generate_random_3sat(n, clause_count(n, alpha), seed)?;
        let status = if n <= PROBE_MAX_VARS { cdcl_solve(&f, PROBE_CONFLICTS).status } else { Status::Unknown };
        let solved = match status {
            Status::Sat => true,
            Status::Unsat => false,
            Status::Unknown => walksat(&f, &WalkSatConfig { seed, initial: None, ..sampler.clone() })?.is_sat(),
        };
        if solved {
            return Ok(Some((f, seed, attempt)));
        }
        log::info!("discarding unsolved draw {attempt} of stream {stream}");
    }
    Ok(None)
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
