use std::io::Write;

use crate::error::Result;

/// Whether a table describes solutions (`p_star` is 0) or covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    Solution,
    Cover,
}

impl Semantics {
    pub fn label(self) -> &'static str {
        match self {
            Semantics::Solution => "solution",
            Semantics::Cover => "cover",
        }
    }
}

/// Where a table came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    Exact,
    Sampled,
    Peeled,
    Sp,
    Bp,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Estimator::Exact => "exact",
            Estimator::Sampled => "sampled",
            Estimator::Peeled => "peeled",
            Estimator::Sp => "sp",
            Estimator::Bp => "bp",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Marginal {
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_star: f64,
}

impl Marginal {
    pub fn new(p_plus: f64, p_minus: f64, p_star: f64) -> Self {
        Marginal { p_plus, p_minus, p_star }
    }

    /// Normalizes three non-negative weights; `None` when all are zero.
    pub fn from_weights(plus: f64, minus: f64, star: f64) -> Option<Self> {
        let total = plus + minus + star;
        (total > 0.0).then(|| Marginal::new(plus / total, minus / total, star / total))
    }

    #[inline]
    pub fn magnetization(&self) -> f64 {
        self.p_plus - self.p_minus
    }
}

/// Per-variable marginals with their provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalTable {
    pub semantics: Semantics,
    pub estimator: Estimator,
    pub rows: Vec<Marginal>,
    /// False when the table rests on an incomplete enumeration or a run
    /// that did not converge.
    pub complete: bool,
}

impl MarginalTable {
    pub fn new(semantics: Semantics, estimator: Estimator, rows: Vec<Marginal>) -> Self {
        MarginalTable { semantics, estimator, rows, complete: true }
    }

    /// Frequencies from per-variable counts over `total` observations.
    /// With no observations every row is `(0, 0, 0)`.
    pub fn from_counts(
        semantics: Semantics,
        estimator: Estimator,
        plus: &[usize],
        minus: &[usize],
        total: usize,
    ) -> Self {
        let rows = plus
            .iter()
            .zip(minus)
            .map(|(&p, &m)| {
                if total == 0 {
                    return Marginal::new(0.0, 0.0, 0.0);
                }
                let t = total as f64;
                Marginal::new(p as f64 / t, m as f64 / t, (total - p - m) as f64 / t)
            })
            .collect();
        MarginalTable::new(semantics, estimator, rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn magnetization(&self) -> Vec<f64> {
        magnetization(self)
    }

    /// Writes `var,p_plus,p_minus,p_star,m,semantics,estimator`, 1-based.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["var", "p_plus", "p_minus", "p_star", "m", "semantics", "estimator"])?;
        for (x, r) in self.rows.iter().enumerate() {
            out.write_record([
                (x + 1).to_string(),
                r.p_plus.to_string(),
                r.p_minus.to_string(),
                r.p_star.to_string(),
                r.magnetization().to_string(),
                self.semantics.label().to_string(),
                self.estimator.label().to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `p_plus - p_minus` per variable.
pub fn magnetization(t: &MarginalTable) -> Vec<f64> {
    t.rows.iter().map(Marginal::magnetization).collect()
}

/// Writes convergence telemetry as `iter,residual`, with 0-based sweeps.
pub fn write_residuals_csv<W: Write>(residuals: &[f64], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "residual"])?;
    for (i, r) in residuals.iter().enumerate() {
        out.write_record([i.to_string(), r.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magnetization_examples() {
        let t = MarginalTable::new(
            Semantics::Cover,
            Estimator::Exact,
            vec![Marginal::new(0.5, 0.5, 0.0), Marginal::new(1.0, 0.0, 0.0), Marginal::new(0.0, 0.0, 1.0)],
        );
        assert_eq!(magnetization(&t), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn weights_normalize() {
        let m = Marginal::from_weights(1.0, 1.0, 2.0).unwrap();
        assert_eq!((m.p_plus, m.p_minus, m.p_star), (0.25, 0.25, 0.5));
        assert!(Marginal::from_weights(0.0, 0.0, 0.0).is_none());
    }

    #[test]
    fn csv_layout() {
        let t = MarginalTable::from_counts(Semantics::Solution, Estimator::Exact, &[2, 2], &[1, 1], 3);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("var,p_plus,p_minus,p_star,m,semantics,estimator"));
        assert!(lines.next().unwrap().starts_with("1,0.6666666666666666,0.3333333333333333,0,"));
        let mut buf = Vec::new();
        write_residuals_csv(&[0.5, 0.25], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iter,residual\n0,0.5\n1,0.25\n");
    }
}
