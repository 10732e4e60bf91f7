use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;

use super::{check_alpha, clause_count, satisfiable_formula, wilson_interval, Deadline, Header};
use crate::covers::enumerate_covers_sat;
use crate::error::{Error, Result};
use crate::formula::sub_seed;

#[derive(Clone, Debug)]
pub struct TransitionSpec {
    pub n: usize,
    pub alphas: Vec<f64>,
    pub formulas_per_point: usize,
    pub seed: u64,
    /// Cover cap per formula; hitting it marks the enumeration incomplete.
    pub cover_limit: usize,
    /// CDCL conflicts per formula for the cover encoding.
    pub conflict_budget: u64,
    /// Random draws per slot before it is given up as unsatisfiable.
    pub max_attempts: u64,
    pub budget: Option<Duration>,
}

/// 1.0, 1.25, ..., 6.0.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=20).map(|i| 1.0 + 0.25 * i as f64).collect()
}

impl Default for TransitionSpec {
    fn default() -> Self {
        TransitionSpec {
            n: 50,
            alphas: default_alpha_grid(),
            formulas_per_point: 500,
            seed: 0,
            cover_limit: 1_000_000,
            conflict_budget: 50_000_000,
            max_attempts: 1000,
            budget: None,
        }
    }
}

impl TransitionSpec {
    pub fn header(&self) -> Header {
        let grid: Vec<String> = self.alphas.iter().map(|a| a.to_string()).collect();
        let mut h = Header::new("transition");
        h.push("n", self.n)
            .push("alphas", grid.join(" "))
            .push("formulas_per_point", self.formulas_per_point)
            .push("seed", self.seed)
            .push("cover_limit", self.cover_limit)
            .push("conflict_budget", self.conflict_budget)
            .push("max_attempts", self.max_attempts)
            .push("unsat_policy", "discard_and_resample")
            .push("budget_seconds", self.budget.map(|d| d.as_secs_f64().to_string()).unwrap_or("none".into()));
        h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRow {
    pub alpha: f64,
    pub m: usize,
    /// Formulas with a complete enumeration; the statistics use only these.
    pub complete: usize,
    pub incomplete: usize,
    /// Unsatisfiable draws thrown away.
    pub discarded_unsat: u64,
    /// Slots with no satisfiable draw within `max_attempts`.
    pub missing: usize,
    /// Slots not started before the budget ran out.
    pub skipped: usize,
    pub with_nontrivial: usize,
    pub p_nontrivial: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_nontrivial: f64,
    pub mean_false: f64,
}

#[derive(Clone, Debug)]
pub struct Transition {
    pub header: Header,
    pub rows: Vec<TransitionRow>,
}

enum Slot {
    Done { complete: bool, nontrivial: usize, false_covers: usize, discarded: u64 },
    Missing(u64),
    Skipped,
}

impl Transition {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.header.write(&mut w)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "alpha",
            "m",
            "complete",
            "incomplete",
            "discarded_unsat",
            "missing",
            "skipped",
            "with_nontrivial",
            "p_nontrivial",
            "ci_low",
            "ci_high",
            "mean_nontrivial_covers",
            "mean_false_covers",
        ])?;
        for r in &self.rows {
            out.write_record([
                r.alpha.to_string(),
                r.m.to_string(),
                r.complete.to_string(),
                r.incomplete.to_string(),
                r.discarded_unsat.to_string(),
                r.missing.to_string(),
                r.skipped.to_string(),
                r.with_nontrivial.to_string(),
                r.p_nontrivial.to_string(),
                r.ci_low.to_string(),
                r.ci_high.to_string(),
                r.mean_nontrivial.to_string(),
                r.mean_false.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// First α at which the existence probability reaches 0.5, linearly
    /// interpolated between grid points.
    pub fn crossing(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> =
            self.rows.iter().filter(|r| r.complete > 0).map(|r| (r.alpha, r.p_nontrivial)).collect();
        if pts.first()?.1 >= 0.5 {
            return Some(pts[0].0);
        }
        pts.windows(2).find(|w| w[1].1 >= 0.5).map(|w| {
            let ((a0, p0), (a1, p1)) = (w[0], w[1]);
            a0 + (0.5 - p0) / (p1 - p0) * (a1 - a0)
        })
    }
}

/// Cover statistics of satisfiable random formulas along an α grid.
/// Slot `i` at grid point `j` draws from `sub_seed(sub_seed(seed, j), i)`.
pub fn run_transition(spec: &TransitionSpec) -> Result<Transition> {
    if spec.formulas_per_point == 0 || spec.alphas.is_empty() {
        return Err(Error::InvalidArgument("need at least one alpha and one formula per point".into()));
    }
    for &a in &spec.alphas {
        check_alpha(a)?;
    }
    let deadline = Deadline::new(spec.budget);
    let mut rows = Vec::with_capacity(spec.alphas.len());
    for (j, &alpha) in spec.alphas.iter().enumerate() {
        let stream = sub_seed(spec.seed, j as u64);
        let slots: Vec<Slot> = (0..spec.formulas_per_point)
            .into_par_iter()
            .map(|i| {
                if deadline.expired() {
                    return Ok(Slot::Skipped);
                }
                let Some((f, _, discarded)) =
                    satisfiable_formula(spec.n, alpha, sub_seed(stream, i as u64), spec.max_attempts)?
                else {
                    return Ok(Slot::Missing(spec.max_attempts));
                };
                let e = enumerate_covers_sat(&f, spec.cover_limit, spec.conflict_budget)?;
                Ok(Slot::Done {
                    complete: e.complete,
                    nontrivial: e.num_non_trivial(),
                    false_covers: e.num_false(),
                    discarded,
                })
            })
            .collect::<Result<_>>()?;
        let row = aggregate(alpha, clause_count(spec.n, alpha), &slots);
        log::info!(
            "transition: alpha={alpha} complete={} p={:.3} discarded_unsat={}",
            row.complete,
            row.p_nontrivial,
            row.discarded_unsat
        );
        rows.push(row);
    }
    Ok(Transition { header: spec.header(), rows })
}

fn aggregate(alpha: f64, m: usize, slots: &[Slot]) -> TransitionRow {
    let mut row = TransitionRow {
        alpha,
        m,
        complete: 0,
        incomplete: 0,
        discarded_unsat: 0,
        missing: 0,
        skipped: 0,
        with_nontrivial: 0,
        p_nontrivial: f64::NAN,
        ci_low: 0.0,
        ci_high: 1.0,
        mean_nontrivial: f64::NAN,
        mean_false: f64::NAN,
    };
    let (mut sum_nt, mut sum_false) = (0usize, 0usize);
    for s in slots {
        match *s {
            Slot::Done { complete, nontrivial, false_covers, discarded } => {
                row.discarded_unsat += discarded;
                if !complete {
                    row.incomplete += 1;
                    continue;
                }
                row.complete += 1;
                row.with_nontrivial += (nontrivial > 0) as usize;
                sum_nt += nontrivial;
                sum_false += false_covers;
            }
            Slot::Missing(d) => {
                row.missing += 1;
                row.discarded_unsat += d;
            }
            Slot::Skipped => row.skipped += 1,
        }
    }
    if row.complete > 0 {
        let c = row.complete as f64;
        row.p_nontrivial = row.with_nontrivial as f64 / c;
        (row.ci_low, row.ci_high) = wilson_interval(row.with_nontrivial, row.complete);
        row.mean_nontrivial = sum_nt as f64 / c;
        row.mean_false = sum_false as f64 / c;
    }
    row
}
