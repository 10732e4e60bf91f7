//! Small versions of the four experiments and the decimation benchmark,
//! each printing its seed-stamped CSV.

use std::io::stdout;

use sp_covers::experiments::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let peel = run_peeling(&PeelingSpec { n: 500, samples: 50, formulas: 2, seed: 1, ..Default::default() })?;
    println!("peeling: trivial fraction {:.3} over {} traces", peel.trivial_fraction(), peel.traces.len());
    peel.write_curves_csv(stdout().lock())?;

    let t = run_transition(&TransitionSpec {
        n: 30,
        alphas: vec![1.5, 2.0, 2.5, 3.0, 3.5, 4.2],
        formulas_per_point: 50,
        seed: 1,
        ..Default::default()
    })?;
    t.write_csv(stdout().lock())?;
    println!("crossing near alpha {:?}", t.crossing());

    let g = run_growth(&GrowthSpec {
        ns: vec![50, 100, 200, 400],
        samples_per_formula: 30,
        formulas: 4,
        seed: 1,
        ..Default::default()
    })?;
    g.write_csv(stdout().lock())?;

    let s = run_scatter(&ScatterSpec {
        n: 30,
        alpha: 4.0,
        seed: 1,
        kind: ScatterKind::CoverVsSolution,
        ..Default::default()
    })?;
    s.write_csv(stdout().lock())?;

    let b = run_decimation_bench(&BenchSpec { n: 1000, instances: 2, seed: 1, ..Default::default() })?;
    b.write_csv(stdout().lock())?;
    Ok(())
}
