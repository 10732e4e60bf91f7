use std::io::Write;
use std::str::FromStr;

use super::{check_alpha, clause_count, fmt_opt, satisfiable_formula, Header};
use crate::covers::{enumerate_covers_sat, PeelOrder};
use crate::error::{Error, Result};
use crate::formula::{generate_random_3sat, sub_seed, Formula};
use crate::pipelines::{
    bp_marginals, cover_marginals_of, exact_solution_marginals, peeled_cover_marginals, sampled_solution_marginals,
    sp_marginals,
};
use crate::propagation::{MarginalTable, RunConfig};
use crate::solver::UNLIMITED;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScatterKind {
    SpVsCover,
    CoverVsSolution,
    BpVsSolution,
}

impl ScatterKind {
    pub fn label(self) -> &'static str {
        match self {
            ScatterKind::SpVsCover => "sp-vs-cover",
            ScatterKind::CoverVsSolution => "cover-vs-solution",
            ScatterKind::BpVsSolution => "bp-vs-solution",
        }
    }
}

impl FromStr for ScatterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp-vs-cover" => Ok(ScatterKind::SpVsCover),
            "cover-vs-solution" => Ok(ScatterKind::CoverVsSolution),
            "bp-vs-solution" => Ok(ScatterKind::BpVsSolution),
            other => Err(Error::InvalidArgument(format!("unknown scatter kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScatterSpec {
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
    pub kind: ScatterKind,
    /// Exact covers and solutions by enumeration; otherwise peeled and
    /// sampled estimates from `samples` WalkSAT runs.
    pub exact: bool,
    pub samples: usize,
    pub sp: RunConfig,
    pub bp: RunConfig,
}

impl Default for ScatterSpec {
    fn default() -> Self {
        ScatterSpec {
            n: 50,
            alpha: 4.2,
            seed: 0,
            kind: ScatterKind::SpVsCover,
            exact: true,
            samples: 500,
            sp: RunConfig::sp(),
            bp: RunConfig { max_iters: 10_000, ..RunConfig::bp() },
        }
    }
}

impl ScatterSpec {
    pub fn header(&self) -> Header {
        let mut h = Header::new("scatter");
        h.push("kind", self.kind.label())
            .push("n", self.n)
            .push("alpha", self.alpha)
            .push("m", clause_count(self.n, self.alpha))
            .push("seed", self.seed)
            .push("exact", self.exact)
            .push("samples", self.samples)
            .push("exact_covers", "nontrivial_only")
            .push("sp_epsilon", self.sp.epsilon)
            .push("sp_max_iters", self.sp.max_iters)
            .push("sp_damping", self.sp.damping)
            .push("sp_init", format!("{:?}", self.sp.init))
            .push("bp_epsilon", self.bp.epsilon)
            .push("bp_max_iters", self.bp.max_iters)
            .push("bp_damping", self.bp.damping)
            .push("bp_init", format!("{:?}", self.bp.init));
        h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterRow {
    pub var: usize,
    pub x: Option<f64>,
    pub y: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Scatter {
    pub header: Header,
    pub formula: Formula,
    pub rows: Vec<ScatterRow>,
}

impl Scatter {
    /// `var,m_x,m_y` with 1-based variables; an absent estimate is empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.header.write(&mut w)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["var", "m_x", "m_y"])?;
        for r in &self.rows {
            out.write_record([(r.var + 1).to_string(), fmt_opt(r.x), fmt_opt(r.y)])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// One estimator's magnetizations, or `None` with the failure recorded.
fn column(h: &mut Header, axis: &str, r: Result<MarginalTable>) -> Option<Vec<f64>> {
    match r {
        Ok(t) => {
            h.push(&format!("{axis}_estimator"), t.estimator.label());
            h.push(&format!("{axis}_complete"), t.complete);
            Some(t.magnetization())
        }
        Err(e) => {
            log::warn!("scatter: {axis} estimator failed: {e}");
            h.push(&format!("{axis}_absent"), e.to_string().replace('\n', " "));
            None
        }
    }
}

/// Per-variable magnetizations of two estimators on one random formula.
/// Exact runs draw a satisfiable formula by discard-and-resample.
pub fn run_scatter(spec: &ScatterSpec) -> Result<Scatter> {
    check_alpha(spec.alpha)?;
    let mut header = spec.header();
    let f = if spec.exact {
        let Some((f, seed, discarded)) = satisfiable_formula(spec.n, spec.alpha, spec.seed, 1000)? else {
            return Err(Error::Unsatisfiable);
        };
        header.push("formula_seed", seed).push("discarded_unsat", discarded);
        f
    } else {
        header.push("formula_seed", spec.seed);
        generate_random_3sat(spec.n, clause_count(spec.n, spec.alpha), spec.seed)?
    };
    let sample_seed = sub_seed(spec.seed, 1);
    let cover = |h: &mut Header| -> Result<MarginalTable> {
        if spec.exact {
            let e = enumerate_covers_sat(&f, usize::MAX, UNLIMITED)?;
            h.push("nontrivial_covers", e.num_non_trivial());
            Ok(cover_marginals_of(f.num_vars(), &e, false))
        } else {
            peeled_cover_marginals(&f, spec.samples, sample_seed, PeelOrder::LowestIndex).map(|t| t.0)
        }
    };
    let solution = || -> Result<MarginalTable> {
        if spec.exact {
            exact_solution_marginals(&f)
        } else {
            sampled_solution_marginals(&f, spec.samples, sample_seed).map(|t| t.0)
        }
    };
    let (x, y) = match spec.kind {
        ScatterKind::SpVsCover => {
            let sp = sp_marginals(&f, &spec.sp).map(|r| r.0);
            let c = cover(&mut header);
            (column(&mut header, "x", sp), column(&mut header, "y", c))
        }
        ScatterKind::CoverVsSolution => {
            let c = cover(&mut header);
            (column(&mut header, "x", c), column(&mut header, "y", solution()))
        }
        ScatterKind::BpVsSolution => {
            let bp = bp_marginals(&f, &spec.bp).map(|r| r.0);
            (column(&mut header, "x", bp), column(&mut header, "y", solution()))
        }
    };
    let rows = (0..f.num_vars())
        .map(|var| ScatterRow { var, x: x.as_ref().map(|v| v[var]), y: y.as_ref().map(|v| v[var]) })
        .collect();
    Ok(Scatter { header, formula: f, rows })
}
