//! The SAT encoding of "is a cover": one model per cover, decoded back to
//! {0,1,*} strings, checked against brute force.

use sp_covers::covers::{encode_covers_as_cnf, enumerate_covers_bruteforce, enumerate_covers_sat};
use sp_covers::formula::generate_random_3sat;
use sp_covers::solver::{enumerate_models, UNLIMITED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(12, 40, 21)?;
    let enc = encode_covers_as_cnf(&f);
    println!("encoding: {} variables, {} clauses", enc.formula.num_vars(), enc.formula.num_clauses());
    let mut decoded: Vec<String> =
        enumerate_models(&enc.formula, usize::MAX).models.iter().map(|m| enc.decode(m).to_string()).collect();
    decoded.sort();
    let mut brute: Vec<String> =
        enumerate_covers_bruteforce(&f)?.covers.iter().map(|c| c.assignment.to_string()).collect();
    brute.sort();
    assert_eq!(decoded, brute);
    for c in enumerate_covers_sat(&f, usize::MAX, UNLIMITED)?.covers {
        println!("  {} {}", c.assignment, c.kind.label());
    }
    Ok(())
}
