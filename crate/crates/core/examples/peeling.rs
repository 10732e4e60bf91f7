//! *-propagation from WalkSAT solutions: the star/unsupported trace and
//! whether it stops at the trivial cover.

use sp_covers::covers::{is_cover, star_propagate, PeelOrder};
use sp_covers::formula::{generate_random_3sat, generate_random_tree};
use sp_covers::solver::{sample_solutions, walksat, WalkSatConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(400, 1680, 5)?;
    let set = sample_solutions(&f, 20, &WalkSatConfig { seed: 1, ..Default::default() })?;
    let mut trivial = 0;
    for m in &set.models {
        let p = star_propagate(&f, &m.into(), PeelOrder::LowestIndex, true)?;
        assert!(is_cover(&f, &p.cover));
        trivial += p.cover.is_trivial() as usize;
        let (stars, _) = *p.trace.last().unwrap();
        println!(
            "{:>3} steps, {stars:>3} stars{}",
            p.trace.len() - 1,
            if p.cover.is_trivial() { ", trivial" } else { "" }
        );
    }
    println!("{trivial} of {} peeled to the trivial cover", set.models.len());

    // trees have no non-trivial cover, so every solution peels to ***...*
    let tree = generate_random_tree(30, 2)?;
    let m = walksat(&tree, &WalkSatConfig::default())?.model.unwrap();
    let p = star_propagate(&tree, &(&m).into(), PeelOrder::Random(9), false)?;
    println!("tree cover: {}", p.cover);
    Ok(())
}
