use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Formula, Lit};
use crate::error::{Error, Result};

/// The RNG used everywhere in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a master seed and an index
/// (splitmix64 finalizer).
pub fn sub_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform random k-CNF: every clause draws `k` distinct variables without
/// replacement and an independent fair sign for each. Duplicate clauses
/// are allowed; tautologies cannot occur.
pub fn generate_random_ksat(n: usize, m: usize, k: usize, seed: u64) -> Result<Formula> {
    if k == 0 || n < k {
        return Err(Error::InvalidArgument(format!("random {k}-SAT needs at least {k} variables, got {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let clauses = (0..m)
        .map(|_| index::sample(&mut rng, n, k).into_iter().map(|v| Lit::new(v, rng.gen::<bool>())).collect())
        .collect();
    Formula::new(n, clauses)
}

pub fn generate_random_3sat(n: usize, m: usize, seed: u64) -> Result<Formula> {
    generate_random_ksat(n, m, 3, seed)
}

/// A random formula whose factor graph is a tree, with clauses of length 2
/// or 3 and no unit clauses. Each new clause shares exactly one variable with
/// the clauses built so far. Variables and clauses are shuffled afterwards.
pub fn generate_random_tree(num_vars: usize, seed: u64) -> Result<Formula> {
    if num_vars < 2 {
        return Err(Error::InvalidArgument("a tree formula needs at least 2 variables".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut clauses: Vec<Vec<Lit>> = Vec::new();

    let first = if num_vars >= 3 { rng.gen_range(2..=3) } else { 2 };
    clauses.push((0..first).map(|v| Lit::new(v, rng.gen())).collect());
    let mut used = first;
    while used < num_vars {
        let remaining = num_vars - used;
        let fresh = if remaining >= 2 { rng.gen_range(1..=2) } else { 1 };
        let anchor = rng.gen_range(0..used);
        let mut clause = vec![Lit::new(anchor, rng.gen())];
        for v in used..used + fresh {
            clause.push(Lit::new(v, rng.gen()));
        }
        clause.shuffle(&mut rng);
        clauses.push(clause);
        used += fresh;
    }

    let mut perm: Vec<usize> = (0..num_vars).collect();
    perm.shuffle(&mut rng);
    for clause in &mut clauses {
        for lit in clause.iter_mut() {
            *lit = Lit::new(perm[lit.var()], lit.is_positive());
        }
    }
    clauses.shuffle(&mut rng);
    Formula::new(num_vars, clauses)
}
