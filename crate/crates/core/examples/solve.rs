//! The three solvers on one instance: DPLL, clause learning and WalkSAT,
//! plus full model enumeration on a small formula.

use std::time::Instant;

use sp_covers::formula::generate_random_3sat;
use sp_covers::solver::{cdcl_solve, dpll_solve, enumerate_models, walksat, WalkSatConfig, UNLIMITED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(150, 600, 1)?;
    let t = Instant::now();
    let d = dpll_solve(&f, UNLIMITED);
    println!("dpll    {:?} {:>8.1?} {:?}", d.status, t.elapsed(), d.stats);
    let t = Instant::now();
    let c = cdcl_solve(&f, UNLIMITED);
    println!("cdcl    {:?} {:>8.1?} {:?}", c.status, t.elapsed(), c.stats);
    let t = Instant::now();
    let w = walksat(&f, &WalkSatConfig { seed: 3, ..Default::default() })?;
    println!("walksat {:?} {:>8.1?} flips={}", w.status, t.elapsed(), w.stats.flips);

    let small = generate_random_3sat(16, 60, 2)?;
    let all = enumerate_models(&small, usize::MAX);
    println!("n=16 m=60: {} models (complete = {})", all.models.len(), all.complete);
    Ok(())
}
