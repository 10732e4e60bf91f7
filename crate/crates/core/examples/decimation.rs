//! SP-guided decimation on a hard instance, with the round log.

use std::time::Instant;

use sp_covers::formula::generate_random_3sat;
use sp_covers::pipelines::{decimate, DecimationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(3000, 12450, 2)?;
    let t = Instant::now();
    let out = decimate(&f, &DecimationConfig { seed: 2, ..Default::default() })?;
    println!("{} in {:.1?} after {} rounds", out.status.label(), t.elapsed(), out.rounds.len());
    if let Some(a) = &out.assignment {
        assert!(f.evaluate(a));
    }
    out.write_log_csv(std::io::stdout().lock())?;
    Ok(())
}
