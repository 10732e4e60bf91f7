//! Random 3-SAT, k-SAT and tree formulas, written and read back as DIMACS.

use sp_covers::formula::{
    generate_random_3sat, generate_random_ksat, generate_random_tree, parse_dimacs, render_dimacs, FactorGraph,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_random_3sat(10, 42, 7)?;
    let text = render_dimacs(&f);
    print!("{text}");
    let back = parse_dimacs(&text)?;
    assert_eq!(back.formula, f);
    println!("round trip ok, ratio {:.2}", f.ratio());

    let k4 = generate_random_ksat(20, 150, 4, 7)?;
    println!("4-SAT: {} clauses, {} literals", k4.num_clauses(), k4.num_literals());

    let tree = generate_random_tree(12, 3)?;
    println!("tree: {} clauses, forest = {}", tree.num_clauses(), FactorGraph::new(&tree).is_forest());
    Ok(())
}
