//! SP on a random instance near the threshold: convergence, residuals and
//! the most biased variables.

use sp_covers::formula::{generate_random_3sat, FactorGraph};
use sp_covers::propagation::{sp_biases, sp_run, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(2000, 8400, 3)?;
    let g = FactorGraph::new(&f);
    let run = sp_run(&g, &RunConfig::sp().with_seed(3))?;
    println!("{:?} after {} sweeps, residual {:.2e}", run.status, run.state.iterations, run.state.residual);
    for (i, r) in run.residuals.iter().enumerate().step_by(20) {
        println!("  sweep {i:>4}: {r:.3e}");
    }
    let table = sp_biases(&g, &run.state)?;
    let mut order: Vec<usize> = (0..table.len()).collect();
    order.sort_by(|&a, &b| table.rows[b].magnetization().abs().total_cmp(&table.rows[a].magnetization().abs()));
    for &x in &order[..5] {
        let r = table.rows[x];
        println!("var {:>4}: W+ {:.3} W- {:.3} W* {:.3}", x + 1, r.p_plus, r.p_minus, r.p_star);
    }
    Ok(())
}
