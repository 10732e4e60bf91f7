use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::formula::{simplify, sub_seed, Assignment, FactorGraph, Formula, PartialAssignment};
use crate::propagation::{sp_biases, sp_run, Init, RunConfig};
use crate::solver::{walksat, WalkSatConfig};

#[derive(Clone, Debug)]
pub struct DecimationConfig {
    /// Fraction of the remaining variables fixed per round.
    pub fix_fraction: f64,
    /// Variables with smaller `|m|` are never fixed.
    pub extreme_threshold: f64,
    /// A survey whose largest `|m|` is below this is trivial and the
    /// residual formula goes to WalkSAT.
    pub trivial_threshold: f64,
    /// SP controls. The init is replaced by a fresh random one per round.
    pub sp: RunConfig,
    /// Extra SP runs from new random inits when one fails to converge.
    pub sp_retries: usize,
    /// Endgame controls. The seed is derived per run.
    pub walksat: WalkSatConfig,
    pub seed: u64,
    /// Wall-clock limit for the whole run.
    pub time_budget: Option<Duration>,
}

impl Default for DecimationConfig {
    fn default() -> Self {
        DecimationConfig {
            fix_fraction: 0.01,
            extreme_threshold: 0.0,
            trivial_threshold: 0.01,
            sp: RunConfig::sp(),
            sp_retries: 2,
            walksat: WalkSatConfig::default(),
            seed: 0,
            time_budget: None,
        }
    }
}

impl DecimationConfig {
    fn validate(&self) -> Result<()> {
        if !(self.fix_fraction > 0.0 && self.fix_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!("fix_fraction {} outside (0, 1]", self.fix_fraction)));
        }
        for (name, v) in [("extreme_threshold", self.extreme_threshold), ("trivial_threshold", self.trivial_threshold)]
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecimationStatus {
    Solved,
    Contradiction,
    SpFailed,
    Budget,
}

impl DecimationStatus {
    pub fn label(self) -> &'static str {
        match self {
            DecimationStatus::Solved => "SOLVED",
            DecimationStatus::Contradiction => "CONTRADICTION",
            DecimationStatus::SpFailed => "SP_FAILED",
            DecimationStatus::Budget => "BUDGET",
        }
    }
}

/// What happened in one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundStatus {
    /// Variables were fixed by SP.
    Fixed,
    /// No clause was left.
    Empty,
    /// Trivial survey, WalkSAT solved the rest.
    Walksat,
    /// SP did not converge, WalkSAT solved the rest.
    UnconvergedWalksat,
    WalksatFailed,
    Contradiction,
    Budget,
}

impl RoundStatus {
    pub fn label(self) -> &'static str {
        match self {
            RoundStatus::Fixed => "fixed",
            RoundStatus::Empty => "empty",
            RoundStatus::Walksat => "walksat",
            RoundStatus::UnconvergedWalksat => "unconverged_walksat",
            RoundStatus::WalksatFailed => "walksat_failed",
            RoundStatus::Contradiction => "contradiction",
            RoundStatus::Budget => "budget",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecimationRound {
    pub round: usize,
    /// Unfixed variables that still occur in some clause.
    pub n_remaining: usize,
    /// SP sweeps of the round, retries included.
    pub sp_iters: usize,
    pub max_abs_m: f64,
    pub n_fixed: usize,
    pub status: RoundStatus,
}

#[derive(Clone, Debug)]
pub struct DecimationOutcome {
    pub status: DecimationStatus,
    /// Present iff solved; satisfies the input formula.
    pub assignment: Option<Assignment>,
    pub rounds: Vec<DecimationRound>,
    /// The formula WalkSAT gave up on, for `SpFailed`.
    pub residual: Option<Formula>,
}

impl DecimationOutcome {
    /// `round,n_remaining,sp_iters,max_abs_m,n_fixed,status`.
    pub fn write_log_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["round", "n_remaining", "sp_iters", "max_abs_m", "n_fixed", "status"])?;
        for r in &self.rounds {
            out.write_record([
                r.round.to_string(),
                r.n_remaining.to_string(),
                r.sp_iters.to_string(),
                r.max_abs_m.to_string(),
                r.n_fixed.to_string(),
                r.status.label().to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Survey-inspired decimation without backtracking.
///
/// Each round simplifies the input by the fixings so far (with unit
/// propagation), runs SP on what is left and fixes the
/// `ceil(fix_fraction * n_remaining)` variables of largest `|m|` to the
/// sign of `m`, ties broken by lower index. A trivial or unconverged survey
/// hands the residual formula to WalkSAT.
pub fn decimate(f: &Formula, cfg: &DecimationConfig) -> Result<DecimationOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let mut fixed: PartialAssignment = vec![None; f.num_vars()];
    let mut rounds = Vec::new();
    let log = |rounds: &mut Vec<DecimationRound>, round, n_remaining, sp_iters, max_abs_m, n_fixed, status| {
        log::debug!("round {round}: {n_remaining} left, {sp_iters} sweeps, max |m| {max_abs_m:.4}, fixed {n_fixed}");
        rounds.push(DecimationRound { round, n_remaining, sp_iters, max_abs_m, n_fixed, status });
    };
    let done = |status, assignment, rounds, residual| Ok(DecimationOutcome { status, assignment, rounds, residual });

    for round in 0.. {
        let simp = match simplify(f, &fixed) {
            Ok(s) => s,
            Err(Error::Contradiction(_)) => {
                log(&mut rounds, round, 0, 0, 0.0, 0, RoundStatus::Contradiction);
                return done(DecimationStatus::Contradiction, None, rounds, None);
            }
            Err(e) => return Err(e),
        };
        fixed = simp.fixed.clone();
        let r = &simp.residual;
        let g = FactorGraph::new(r);
        let active = (0..r.num_vars()).filter(|&x| g.var_degree(x) > 0).count();

        if r.num_clauses() == 0 {
            let a = Assignment::new(simp.lift(&vec![false; r.num_vars()]));
            assert!(f.evaluate(&a), "decimation produced a non-model");
            log(&mut rounds, round, 0, 0, 0.0, 0, RoundStatus::Empty);
            return done(DecimationStatus::Solved, Some(a), rounds, None);
        }
        if cfg.time_budget.is_some_and(|b| started.elapsed() > b) {
            log(&mut rounds, round, active, 0, 0.0, 0, RoundStatus::Budget);
            return done(DecimationStatus::Budget, None, rounds, Some(r.clone()));
        }

        let mut iters = 0;
        let mut attempt = 0;
        let run = loop {
            let sp_cfg =
                RunConfig { init: Init::Random(sub_seed(sub_seed(cfg.seed, round as u64), attempt)), ..cfg.sp };
            match sp_run(&g, &sp_cfg) {
                Ok(run) => {
                    iters += run.state.iterations;
                    if run.converged() || attempt as usize >= cfg.sp_retries {
                        break run;
                    }
                    attempt += 1;
                }
                Err(Error::Contradiction(_)) => {
                    log(&mut rounds, round, active, iters, 0.0, 0, RoundStatus::Contradiction);
                    return done(DecimationStatus::Contradiction, None, rounds, None);
                }
                Err(e) => return Err(e),
            }
        };
        let biases = match sp_biases(&g, &run.state) {
            Ok(t) => t,
            Err(Error::Contradiction(_)) => {
                log(&mut rounds, round, active, iters, 0.0, 0, RoundStatus::Contradiction);
                return done(DecimationStatus::Contradiction, None, rounds, None);
            }
            Err(e) => return Err(e),
        };
        let m = biases.magnetization();
        let max_abs_m = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

        let mut order: Vec<usize> =
            (0..r.num_vars()).filter(|&x| m[x] != 0.0 && m[x].abs() >= cfg.extreme_threshold).collect();
        let endgame = if !run.converged() {
            Some(RoundStatus::UnconvergedWalksat)
        } else if max_abs_m < cfg.trivial_threshold || order.is_empty() {
            Some(RoundStatus::Walksat)
        } else {
            None
        };

        if let Some(kind) = endgame {
            let ws_cfg =
                WalkSatConfig { seed: sub_seed(cfg.seed ^ 0x5eed, round as u64), initial: None, ..cfg.walksat.clone() };
            let result = walksat(r, &ws_cfg)?;
            return match result.model {
                Some(model) => {
                    let a = Assignment::new(simp.lift(model.values()));
                    assert!(f.evaluate(&a), "decimation produced a non-model");
                    log(&mut rounds, round, active, iters, max_abs_m, 0, kind);
                    done(DecimationStatus::Solved, Some(a), rounds, None)
                }
                None => {
                    log(&mut rounds, round, active, iters, max_abs_m, 0, RoundStatus::WalksatFailed);
                    done(DecimationStatus::SpFailed, None, rounds, Some(r.clone()))
                }
            };
        }

        order.sort_by(|&a, &b| m[b].abs().total_cmp(&m[a].abs()).then(a.cmp(&b)));
        let k = ((cfg.fix_fraction * active as f64).ceil() as usize).max(1);
        order.truncate(k);
        for &x in &order {
            fixed[simp.new_to_old[x]] = Some(m[x] > 0.0);
        }
        log(&mut rounds, round, active, iters, max_abs_m, order.len(), RoundStatus::Fixed);
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{generate_random_3sat, generate_random_tree};

    #[test]
    fn direct_conflict() {
        let f = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let out = decimate(&f, &DecimationConfig::default()).unwrap();
        assert_eq!(out.status, DecimationStatus::Contradiction);
        assert_eq!(out.rounds.len(), 1);
    }

    #[test]
    fn trivial_survey_goes_straight_to_walksat() {
        let f = generate_random_tree(30, 2).unwrap();
        let out = decimate(&f, &DecimationConfig::default()).unwrap();
        assert_eq!(out.status, DecimationStatus::Solved);
        assert_eq!(out.rounds.len(), 1);
        assert_eq!(out.rounds[0].status, RoundStatus::Walksat);
        assert!(f.evaluate(out.assignment.as_ref().unwrap()));
    }

    #[test]
    fn solves_moderate_instance() {
        let f = generate_random_3sat(1000, 4000, 7).unwrap();
        let cfg = DecimationConfig { fix_fraction: 0.04, seed: 3, ..Default::default() };
        let out = decimate(&f, &cfg).unwrap();
        assert_eq!(out.status, DecimationStatus::Solved);
        assert!(f.evaluate(out.assignment.as_ref().unwrap()));
        for w in out.rounds.windows(2) {
            assert!(w[1].n_remaining < w[0].n_remaining || w[1].status != RoundStatus::Fixed);
        }
        let mut buf = Vec::new();
        out.write_log_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("round,n_remaining,sp_iters,max_abs_m,n_fixed,status\n0,"));
    }

    #[test]
    fn rejects_bad_config() {
        let f = Formula::empty(2);
        for cfg in [
            DecimationConfig { fix_fraction: 0.0, ..Default::default() },
            DecimationConfig { trivial_threshold: 2.0, ..Default::default() },
        ] {
            assert!(decimate(&f, &cfg).is_err());
        }
    }

    #[test]
    fn zero_budget_stops_immediately() {
        let f = generate_random_3sat(200, 840, 1).unwrap();
        let cfg = DecimationConfig { time_budget: Some(Duration::ZERO), ..Default::default() };
        let out = decimate(&f, &cfg).unwrap();
        assert_eq!(out.status, DecimationStatus::Budget);
    }
}
