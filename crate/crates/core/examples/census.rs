//! Symbolic census of the Yang-Baxter components and its match with the relation catalog.

use vlab::c;
use vlab::relations::{catalog, evaluate_relations, match_catalog_to_census, ybe_census, SlotAlgebra};
use vlab::weights::{make_weights, BranchId, BranchParams};

fn main() -> vlab::Result<()> {
    let pt = ybe_census(&SlotAlgebra::pt_invariant());
    println!("nineteen-vertex: {:?} total {} ({} components)", pt.counts, pt.total, pt.components);
    println!("after gauge consolidation: {:?}", pt.consolidated);
    println!("six-vertex: {:?}", ybe_census(&SlotAlgebra::six_vertex()).counts);

    let m = match_catalog_to_census();
    println!(
        "catalog: {} relations, {} matched equations, {} gauge-trivial, {} unmatched",
        catalog().len(),
        m.matched_equations,
        m.trivial.len(),
        m.unmatched_equations
    );

    let p = BranchParams::new(c(0.7, 0.0));
    let (l1, l2) = (c(0.3, 0.1), c(-0.2, 0.25));
    for branch in BranchId::FAMILIES {
        let w0 = make_weights(branch, &p, l1 - l2)?;
        let w1 = make_weights(branch, &p, l1)?;
        let w2 = make_weights(branch, &p, l2)?;
        let worst = evaluate_relations(&w0, &w1, &w2, w1.psi()).into_values().fold(0.0, f64::max);
        println!("{}: largest relation residual {worst:.2e}", branch.label());
    }
    Ok(())
}
