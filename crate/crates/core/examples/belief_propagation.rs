//! Plain BP: exact on a tree, and stuck on a large instance near the
//! threshold where SP converges.

use sp_covers::formula::{generate_random_3sat, generate_random_tree, FactorGraph};
use sp_covers::pipelines::exact_solution_marginals;
use sp_covers::propagation::{plain_bp_marginals, plain_bp_run, sp_run, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = generate_random_tree(15, 8)?;
    let g = FactorGraph::new(&tree);
    let run = plain_bp_run(&g, &RunConfig { epsilon: 1e-14, damping: 0.0, ..RunConfig::bp() })?;
    let bp = plain_bp_marginals(&g, &run.state)?;
    let exact = exact_solution_marginals(&tree)?;
    let gap = bp.rows.iter().zip(&exact.rows).map(|(a, b)| (a.p_plus - b.p_plus).abs()).fold(0.0, f64::max);
    println!("tree: {} sweeps, max error {gap:.1e}", run.state.iterations);

    let f = generate_random_3sat(1000, 4200, 1)?;
    let g = FactorGraph::new(&f);
    let cfg = RunConfig { max_iters: 2000, ..RunConfig::bp() };
    let bp = plain_bp_run(&g, &cfg)?;
    let sp = sp_run(&g, &RunConfig::sp())?;
    println!(
        "n=1000 alpha=4.2: BP {:?} (residual {:.3}), SP {:?} in {} sweeps",
        bp.status, bp.state.residual, sp.status, sp.state.iterations
    );
    Ok(())
}
