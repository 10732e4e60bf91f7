use std::io::Write;
use std::time::{Duration, Instant};

use super::{check_alpha, clause_count, Deadline, Header};
use crate::error::{Error, Result};
use crate::formula::{generate_random_3sat, sub_seed};
use crate::pipelines::{decimate, DecimationConfig, DecimationStatus};

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub n: usize,
    pub alpha: f64,
    pub instances: usize,
    pub seed: u64,
    /// Its seed is replaced per instance.
    pub config: DecimationConfig,
    pub budget: Option<Duration>,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            n: 5000,
            alpha: 4.2,
            instances: 5,
            seed: 0,
            config: DecimationConfig { time_budget: Some(Duration::from_secs(600)), ..Default::default() },
            budget: None,
        }
    }
}

impl BenchSpec {
    pub fn header(&self) -> Header {
        let c = &self.config;
        let mut h = Header::new("decimation-bench");
        h.push("n", self.n)
            .push("alpha", self.alpha)
            .push("m", clause_count(self.n, self.alpha))
            .push("instances", self.instances)
            .push("seed", self.seed)
            .push("fix_fraction", c.fix_fraction)
            .push("extreme_threshold", c.extreme_threshold)
            .push("trivial_threshold", c.trivial_threshold)
            .push("sp_epsilon", c.sp.epsilon)
            .push("sp_max_iters", c.sp.max_iters)
            .push("sp_damping", c.sp.damping)
            .push("sp_retries", c.sp_retries)
            .push("walksat_max_flips", c.walksat.max_flips)
            .push("walksat_noise", c.walksat.noise)
            .push("instance_time_budget", c.time_budget.map(|d| d.as_secs_f64().to_string()).unwrap_or("none".into()))
            .push("budget_seconds", self.budget.map(|d| d.as_secs_f64().to_string()).unwrap_or("none".into()));
        h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance: usize,
    pub formula_seed: u64,
    pub status: DecimationStatus,
    pub rounds: usize,
    pub seconds: f64,
    /// The returned assignment satisfies the original formula.
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct DecimationBench {
    pub header: Header,
    pub rows: Vec<BenchRow>,
}

impl DecimationBench {
    pub fn solved(&self) -> usize {
        self.rows.iter().filter(|r| r.verified).count()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.header.write(&mut w)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["instance", "formula_seed", "status", "rounds", "seconds", "verified"])?;
        for r in &self.rows {
            out.write_record([
                r.instance.to_string(),
                r.formula_seed.to_string(),
                r.status.label().to_string(),
                r.rounds.to_string(),
                format!("{:.3}", r.seconds),
                r.verified.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Decimation on independent random formulas, one after another so that
/// the timings are not inflated by sharing cores. Instance `i` is drawn
/// from `sub_seed(seed, i)`, which also seeds its decimation run.
pub fn run_decimation_bench(spec: &BenchSpec) -> Result<DecimationBench> {
    check_alpha(spec.alpha)?;
    if spec.instances == 0 {
        return Err(Error::InvalidArgument("instances must be at least 1".into()));
    }
    let deadline = Deadline::new(spec.budget);
    let mut rows = Vec::new();
    for i in 0..spec.instances {
        if deadline.expired() {
            log::warn!("decimation-bench: budget spent after {i} instances");
            break;
        }
        let fs = sub_seed(spec.seed, i as u64);
        let f = generate_random_3sat(spec.n, clause_count(spec.n, spec.alpha), fs)?;
        let started = Instant::now();
        let out = decimate(&f, &DecimationConfig { seed: fs, ..spec.config.clone() })?;
        let seconds = started.elapsed().as_secs_f64();
        let verified = out.assignment.as_ref().is_some_and(|a| f.evaluate(a));
        log::info!("decimation-bench: instance {i} {} in {seconds:.1}s", out.status.label());
        rows.push(BenchRow {
            instance: i,
            formula_seed: fs,
            status: out.status,
            rounds: out.rounds.len(),
            seconds,
            verified,
        });
    }
    Ok(DecimationBench { header: spec.header(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bench() {
        let spec = BenchSpec { n: 300, alpha: 3.8, instances: 3, seed: 1, ..Default::default() };
        let b = run_decimation_bench(&spec).unwrap();
        assert_eq!(b.rows.len(), 3);
        assert!(b.rows.iter().all(|r| r.verified == (r.status == DecimationStatus::Solved)));
        assert_eq!(b.solved(), 3);
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("# experiment=decimation-bench\n"));
    }
}
