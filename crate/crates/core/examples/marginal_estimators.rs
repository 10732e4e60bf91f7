//! All five marginal estimators side by side on one small instance, written
//! as CSV tables.

use std::fs::File;

use sp_covers::covers::PeelOrder;
use sp_covers::formula::generate_random_3sat;
use sp_covers::pipelines::{
    bp_marginals, exact_cover_marginals, exact_solution_marginals, peeled_cover_marginals, sampled_solution_marginals,
    sp_marginals, CoverMethod,
};
use sp_covers::propagation::RunConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(40, 150, 11)?;
    let tables = [
        exact_solution_marginals(&f)?,
        sampled_solution_marginals(&f, 300, 1)?.0,
        exact_cover_marginals(&f, CoverMethod::Sat)?,
        peeled_cover_marginals(&f, 300, 1, PeelOrder::LowestIndex)?.0,
        sp_marginals(&f, &RunConfig::sp())?.0,
        bp_marginals(&f, &RunConfig::bp())?.0,
    ];
    print!("var");
    for t in &tables {
        print!(" {:>9}", format!("{}/{}", &t.semantics.label()[..3], t.estimator.label()));
    }
    println!();
    for x in 0..8 {
        print!("{:>3}", x + 1);
        for t in &tables {
            print!(" {:>9.3}", t.rows[x].magnetization());
        }
        println!();
    }
    let path = std::env::temp_dir().join("sp_marginals.csv");
    tables[4].write_csv(File::create(&path)?)?;
    println!("sp table written to {}", path.display());
    Ok(())
}
