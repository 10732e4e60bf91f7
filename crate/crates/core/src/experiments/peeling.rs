use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use super::{check_alpha, clause_count, solvable_formula, Deadline, Header};
use crate::covers::{is_cover, star_propagate, GeneralizedAssignment, PeelOrder};
use crate::error::{Error, Result};
use crate::formula::{sub_seed, Formula};
use crate::solver::{sample_solutions, WalkSatConfig};

#[derive(Clone, Debug)]
pub struct PeelingSpec {
    pub n: usize,
    pub alpha: f64,
    pub samples: usize,
    pub formulas: usize,
    pub seed: u64,
    pub order: PeelOrder,
    pub walksat: WalkSatConfig,
    /// Draws per formula slot before the slot is given up.
    pub max_attempts: u64,
    pub budget: Option<std::time::Duration>,
}

impl Default for PeelingSpec {
    fn default() -> Self {
        PeelingSpec {
            n: 1000,
            alpha: 4.2,
            samples: 200,
            formulas: 1,
            seed: 0,
            order: PeelOrder::LowestIndex,
            walksat: WalkSatConfig::default(),
            max_attempts: 100,
            budget: None,
        }
    }
}

impl PeelingSpec {
    pub fn header(&self) -> Header {
        let mut h = Header::new("peeling");
        h.push("n", self.n)
            .push("alpha", self.alpha)
            .push("m", clause_count(self.n, self.alpha))
            .push("samples", self.samples)
            .push("formulas", self.formulas)
            .push("seed", self.seed)
            .push("peel_order", format!("{:?}", self.order))
            .push("walksat_max_flips", self.walksat.max_flips)
            .push("walksat_noise", self.walksat.noise)
            .push("walksat_restart", "100n")
            .push("max_attempts", self.max_attempts)
            .push("unsat_policy", "discard_and_resample")
            .push("budget_seconds", self.budget.map(|d| d.as_secs_f64().to_string()).unwrap_or("none".into()));
        h
    }
}

/// One peeled solution.
#[derive(Clone, Debug)]
pub struct PeelingTrace {
    pub formula: usize,
    pub sample: usize,
    /// `(star_count, unsupported_count)` per step.
    pub trace: Vec<(usize, usize)>,
    pub cover: GeneralizedAssignment,
    /// The terminal state passed [`is_cover`].
    pub cover_ok: bool,
}

impl PeelingTrace {
    pub fn trivial(&self) -> bool {
        self.cover.is_trivial()
    }

    pub fn monotone(&self) -> bool {
        self.trace.windows(2).all(|w| w[1].0 > w[0].0)
    }

    fn label(&self) -> &'static str {
        if self.trivial() {
            "TRIVIAL"
        } else {
            "NONTRIVIAL"
        }
    }
}

#[derive(Clone, Debug)]
pub struct Peeling {
    pub header: Header,
    pub traces: Vec<PeelingTrace>,
    /// Formula slots dropped because no solvable draw was found or the
    /// sampler came back empty.
    pub skipped: usize,
    /// Draws thrown away as unsatisfiable or unsolved.
    pub discarded: u64,
    /// Sampler runs that exhausted their flip budget on kept formulas.
    pub sampler_failures: usize,
}

impl Peeling {
    pub fn trivial(&self) -> usize {
        self.traces.iter().filter(|t| t.trivial()).count()
    }

    pub fn trivial_fraction(&self) -> f64 {
        if self.traces.is_empty() {
            return f64::NAN;
        }
        self.trivial() as f64 / self.traces.len() as f64
    }

    /// `formula,sample,step,stars,unsupported,terminal`, then the split as
    /// trailing comments.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.header.write(&mut w)?;
        {
            let mut out = csv::Writer::from_writer(&mut w);
            out.write_record(["formula", "sample", "step", "stars", "unsupported", "terminal"])?;
            for t in &self.traces {
                for (step, &(stars, unsupported)) in t.trace.iter().enumerate() {
                    out.write_record([
                        t.formula.to_string(),
                        t.sample.to_string(),
                        step.to_string(),
                        stars.to_string(),
                        unsupported.to_string(),
                        t.label().to_string(),
                    ])?;
                }
            }
            out.flush()?;
        }
        let mut summary = Header::default();
        summary
            .push("summary_traces", self.traces.len())
            .push("summary_trivial", self.trivial())
            .push("summary_nontrivial", self.traces.len() - self.trivial())
            .push("summary_trivial_fraction", self.trivial_fraction())
            .push("summary_skipped_formulas", self.skipped)
            .push("summary_discarded_draws", self.discarded)
            .push("summary_sampler_failures", self.sampler_failures);
        summary.write(&mut w)
    }

    /// Mean unsupported count at each star count, split by terminal label:
    /// `terminal,stars,mean_unsupported,traces`.
    pub fn write_curves_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut sums: BTreeMap<(&str, usize), (usize, usize)> = BTreeMap::new();
        for t in &self.traces {
            for &(stars, unsupported) in &t.trace {
                let e = sums.entry((t.label(), stars)).or_default();
                e.0 += unsupported;
                e.1 += 1;
            }
        }
        self.header.write(&mut w)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["terminal", "stars", "mean_unsupported", "traces"])?;
        for ((label, stars), (sum, count)) in sums {
            out.write_record([
                label.to_string(),
                stars.to_string(),
                (sum as f64 / count as f64).to_string(),
                count.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Samples `k` solutions of `f` and peels each with a tracing run. Random
/// peeling orders get a sub-seed per sample. Returns the traces and the
/// number of sampler runs that failed.
pub fn peel_samples(
    f: &Formula,
    k: usize,
    walksat: &WalkSatConfig,
    order: PeelOrder,
    formula_index: usize,
) -> Result<(Vec<PeelingTrace>, usize)> {
    let set = sample_solutions(f, k, walksat)?;
    let traces = set
        .models
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let order = match order {
                PeelOrder::Random(s) => PeelOrder::Random(sub_seed(s, i as u64)),
                other => other,
            };
            let p = star_propagate(f, &m.into(), order, true)?;
            Ok(PeelingTrace {
                formula: formula_index,
                sample: i,
                trace: p.trace,
                cover_ok: is_cover(f, &p.cover),
                cover: p.cover,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((traces, set.failures))
}

/// Peels WalkSAT samples of random formulas. Slot `i` draws from the
/// stream `sub_seed(seed, i)`, discarding unsolvable draws, and samples
/// with `sub_seed(seed ^ SAMPLER, i)`. A slot whose sampler finds nothing
/// is skipped.
pub fn run_peeling(spec: &PeelingSpec) -> Result<Peeling> {
    check_alpha(spec.alpha)?;
    if spec.samples == 0 || spec.formulas == 0 {
        return Err(Error::InvalidArgument("samples and formulas must be at least 1".into()));
    }
    let deadline = Deadline::new(spec.budget);
    let mut result =
        Peeling { header: spec.header(), traces: Vec::new(), skipped: 0, discarded: 0, sampler_failures: 0 };
    let mut done = 0;
    for i in 0..spec.formulas {
        if deadline.expired() {
            log::warn!("peeling: budget spent after {i} formulas");
            break;
        }
        let Some((f, _, discarded)) =
            solvable_formula(spec.n, spec.alpha, sub_seed(spec.seed, i as u64), spec.max_attempts, &spec.walksat)?
        else {
            log::warn!("peeling: no solvable draw for formula {i}, skipped");
            result.skipped += 1;
            result.discarded += spec.max_attempts;
            done += 1;
            continue;
        };
        result.discarded += discarded;
        let walksat = WalkSatConfig { seed: sub_seed(spec.seed ^ SAMPLER, i as u64), ..spec.walksat.clone() };
        let (traces, failures) = peel_samples(&f, spec.samples, &walksat, spec.order, i)?;
        done += 1;
        if traces.is_empty() {
            log::warn!("peeling: sampler found no solution of formula {i}, skipped");
            result.skipped += 1;
            continue;
        }
        result.sampler_failures += failures;
        result.traces.extend(traces);
    }
    result.header.push("formulas_done", done);
    Ok(result)
}

const SAMPLER: u64 = 0x5a3e_11e5;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::generate_random_tree;

    #[test]
    fn small_run() {
        let spec = PeelingSpec { n: 60, alpha: 3.5, samples: 20, formulas: 3, seed: 4, ..Default::default() };
        let r = run_peeling(&spec).unwrap();
        assert_eq!(r.traces.len() + 20 * r.skipped, 60);
        assert!(r.traces.iter().all(|t| t.monotone() && t.cover_ok));
        let mut a = Vec::new();
        r.write_csv(&mut a).unwrap();
        let mut b = Vec::new();
        run_peeling(&spec).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("# experiment=peeling\n"));
        assert!(text.contains("# summary_trivial_fraction="));
        let mut c = Vec::new();
        r.write_curves_csv(&mut c).unwrap();
        assert!(String::from_utf8(c).unwrap().contains("terminal,stars,mean_unsupported,traces"));
    }

    #[test]
    fn tree_traces_end_at_n() {
        let f = generate_random_tree(15, 3).unwrap();
        let (traces, _) = peel_samples(&f, 10, &WalkSatConfig::default(), PeelOrder::Queue, 0).unwrap();
        for t in traces {
            assert_eq!(t.trace.last().unwrap().0, 15);
            assert!(t.trivial());
        }
    }

    #[test]
    fn n12_terminal_states_are_covers() {
        for s in 0..10 {
            let f = crate::formula::generate_random_3sat(12, 40, s).unwrap();
            let (traces, _) = peel_samples(
                &f,
                10,
                &WalkSatConfig { max_flips: 10_000, ..Default::default() },
                PeelOrder::Random(s),
                0,
            )
            .unwrap();
            assert!(traces.iter().all(|t| t.cover_ok));
        }
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(run_peeling(&PeelingSpec { alpha: -1.0, ..Default::default() }).is_err());
        assert!(run_peeling(&PeelingSpec { samples: 0, ..Default::default() }).is_err());
    }
}
