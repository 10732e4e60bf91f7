//! BP on the cover problem, started from messages matched to an SP state,
//! tracks SP edge for edge.

use sp_covers::formula::{generate_random_3sat, FactorGraph};
use sp_covers::propagation::{cover_bp_update, sp_update, CoverBpState, Init, SpState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(30, 126, 4)?;
    let g = FactorGraph::new(&f);
    let eta = Init::Random(1).values(g.num_edges())?;
    let mut sp = SpState::new(eta.clone());
    let mut bp = CoverBpState::matched(&eta, 2);
    for sweep in 1..=100 {
        sp = sp_update(&g, &sp, 0.0)?;
        bp = cover_bp_update(&g, &bp)?;
        let gap = sp.eta.iter().zip(bp.eta()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if sweep % 20 == 0 {
            println!("sweep {sweep:>3}: max |eta_sp - eta_bp| = {gap:.1e}");
        }
    }
    Ok(())
}
