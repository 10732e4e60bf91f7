//! The three-clause formula (x|!y|!z)(!x|y|!z)(!x|!y|z): five solutions but
//! only two covers, 111 and ***.

use sp_covers::covers::{
    classify_cover, enumerate_covers_bruteforce, enumerate_covers_sat, is_cover, is_supported, GeneralizedAssignment,
};
use sp_covers::formula::Formula;
use sp_covers::solver::{enumerate_models, UNLIMITED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = Formula::from_dimacs_clauses(3, &[&[1, -2, -3], &[-1, 2, -3], &[-1, -2, 3]])?;
    let models = enumerate_models(&f, usize::MAX).models;
    println!("solutions: {}", models.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "));

    for e in [enumerate_covers_bruteforce(&f)?, enumerate_covers_sat(&f, usize::MAX, UNLIMITED)?] {
        for c in &e.covers {
            println!("  {} {}", c.assignment, c.kind.label());
        }
    }

    // 100 satisfies every clause but y and z support nothing
    let s = GeneralizedAssignment::parse("100")?;
    println!("100 is a cover: {}", is_cover(&f, &s));
    for x in 0..3 {
        println!("  var {} supported: {}", x + 1, is_supported(&f, &s, x)?);
    }
    let s = GeneralizedAssignment::parse("111")?;
    println!("111: {}", classify_cover(&f, &s, UNLIMITED)?.kind.label());
    Ok(())
}
