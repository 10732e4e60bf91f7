use std::io::Write;
use std::time::Duration;

use super::peeling::peel_samples;
use super::{check_alpha, solvable_formula, Deadline, Header};
use crate::covers::PeelOrder;
use crate::error::{Error, Result};
use crate::formula::sub_seed;
use crate::solver::WalkSatConfig;

#[derive(Clone, Debug)]
pub struct GrowthSpec {
    pub ns: Vec<usize>,
    pub alpha: f64,
    pub samples_per_formula: usize,
    pub formulas: usize,
    pub seed: u64,
    pub order: PeelOrder,
    pub walksat: WalkSatConfig,
    pub max_attempts: u64,
    pub budget: Option<Duration>,
}

impl Default for GrowthSpec {
    fn default() -> Self {
        GrowthSpec {
            ns: vec![100, 200, 400, 800, 1600],
            alpha: 4.2,
            samples_per_formula: 100,
            formulas: 10,
            seed: 0,
            order: PeelOrder::LowestIndex,
            walksat: WalkSatConfig::default(),
            max_attempts: 100,
            budget: None,
        }
    }
}

impl GrowthSpec {
    pub fn header(&self) -> Header {
        let ns: Vec<String> = self.ns.iter().map(|n| n.to_string()).collect();
        let mut h = Header::new("growth");
        h.push("ns", ns.join(" "))
            .push("alpha", self.alpha)
            .push("samples_per_formula", self.samples_per_formula)
            .push("formulas", self.formulas)
            .push("seed", self.seed)
            .push("peel_order", format!("{:?}", self.order))
            .push("walksat_max_flips", self.walksat.max_flips)
            .push("walksat_noise", self.walksat.noise)
            .push("max_attempts", self.max_attempts)
            .push("unsat_policy", "discard_and_resample")
            .push("scale_base", scale_base(self.alpha))
            .push("budget_seconds", self.budget.map(|d| d.as_secs_f64().to_string()).unwrap_or("none".into()));
        h
    }
}

/// Expected solutions per variable of random 3-SAT: `2 (7/8)^alpha`.
pub fn scale_base(alpha: f64) -> f64 {
    2.0 * (7.0f64 / 8.0).powf(alpha)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub formulas: usize,
    /// Unsatisfiable or unsolved draws thrown away.
    pub discarded: u64,
    pub samples: usize,
    pub nontrivial: usize,
    pub p: f64,
    /// `scale_base(alpha)^n`.
    pub scale: f64,
    pub scaled: f64,
    /// No non-trivial outcome was seen, so `p` is only an upper bound.
    pub censored: bool,
}

#[derive(Clone, Debug)]
pub struct Growth {
    pub header: Header,
    pub rows: Vec<GrowthRow>,
}

impl Growth {
    /// Least-squares fit of `ln(scaled) = a + n ln(b)` over uncensored
    /// rows; returns the per-variable growth base `b`.
    pub fn fitted_base(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| !r.censored && r.scaled > 0.0 && r.scaled.is_finite())
            .map(|r| (r.n as f64, r.scaled.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        (sxx > 0.0).then(|| (sxy / sxx).exp())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.header.write(&mut w)?;
        {
            let mut out = csv::Writer::from_writer(&mut w);
            out.write_record([
                "n",
                "formulas",
                "discarded",
                "samples",
                "nontrivial",
                "p",
                "scale",
                "scaled",
                "censored",
            ])?;
            for r in &self.rows {
                out.write_record([
                    r.n.to_string(),
                    r.formulas.to_string(),
                    r.discarded.to_string(),
                    r.samples.to_string(),
                    r.nontrivial.to_string(),
                    r.p.to_string(),
                    r.scale.to_string(),
                    r.scaled.to_string(),
                    r.censored.to_string(),
                ])?;
            }
            out.flush()?;
        }
        let base = self.fitted_base().map(|b| b.to_string()).unwrap_or("none".into());
        writeln!(w, "# fitted_base={base}")?;
        Ok(())
    }
}

/// Fraction of peeled WalkSAT samples that stop at a non-trivial cover,
/// per problem size. Formula `i` at grid index `j` draws from the stream
/// `sub_seed(sub_seed(seed, j), i)`, discarding unsolvable draws.
pub fn run_growth(spec: &GrowthSpec) -> Result<Growth> {
    check_alpha(spec.alpha)?;
    if spec.ns.is_empty() || spec.formulas == 0 || spec.samples_per_formula == 0 {
        return Err(Error::InvalidArgument("need sizes, formulas and samples".into()));
    }
    let deadline = Deadline::new(spec.budget);
    let base = scale_base(spec.alpha);
    let mut rows = Vec::new();
    'sizes: for (j, &n) in spec.ns.iter().enumerate() {
        let stream = sub_seed(spec.seed, j as u64);
        let mut row = GrowthRow {
            n,
            formulas: 0,
            discarded: 0,
            samples: 0,
            nontrivial: 0,
            p: 0.0,
            scale: base.powi(n as i32),
            scaled: 0.0,
            censored: true,
        };
        for i in 0..spec.formulas {
            if deadline.expired() {
                log::warn!("growth: budget spent at n={n} after {i} formulas");
                if row.samples > 0 {
                    rows.push(finish(row));
                }
                break 'sizes;
            }
            let Some((f, fs, discarded)) =
                solvable_formula(n, spec.alpha, sub_seed(stream, i as u64), spec.max_attempts, &spec.walksat)?
            else {
                log::warn!("growth: no solvable draw at n={n}, formula {i}");
                row.discarded += spec.max_attempts;
                continue;
            };
            row.discarded += discarded;
            let walksat = WalkSatConfig { seed: sub_seed(fs, 1), ..spec.walksat.clone() };
            let (traces, _) = peel_samples(&f, spec.samples_per_formula, &walksat, spec.order, i)?;
            if traces.is_empty() {
                log::warn!("growth: sampler found no solution at n={n}, formula {i}");
                continue;
            }
            row.formulas += 1;
            row.samples += traces.len();
            row.nontrivial += traces.iter().filter(|t| !t.trivial()).count();
        }
        log::info!("growth: n={n} nontrivial={}/{}", row.nontrivial, row.samples);
        rows.push(finish(row));
    }
    Ok(Growth { header: spec.header(), rows })
}

fn finish(mut row: GrowthRow) -> GrowthRow {
    if row.samples > 0 {
        row.p = row.nontrivial as f64 / row.samples as f64;
    }
    row.scaled = row.p * row.scale;
    row.censored = row.nontrivial == 0;
    row
}
