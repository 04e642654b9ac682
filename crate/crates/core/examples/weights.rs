//! Weights of every branch, their invariants and the algebraic constraints.

use vlab::c;
use vlab::weights::{
    check_b_coefficients, check_invariant_constraints, compute_invariants, make_weights, max_residual,
    reference_invariants, BranchId, BranchParams,
};

fn main() -> vlab::Result<()> {
    let params = BranchParams::new(c(0.9, 0.0));
    println!("{:<4} {:>12} {:>12} {:>12} {:>9} {:>9}", "", "invariants", "constraints", "B1-B4", "Re Psi", "Im Psi");
    for branch in BranchId::ALL {
        let reference = reference_invariants(branch, &params);
        let mut worst = 0.0f64;
        for k in 0..10 {
            let lambda = c(-0.8 + 0.17 * k as f64, 0.3 - 0.05 * k as f64);
            let inv = compute_invariants(&make_weights(branch, &params, lambda)?)?;
            worst = worst.max(inv.max_relative_deviation(&reference).0);
        }
        println!(
            "{:<4} {:>12.2e} {:>12.2e} {:>12.2e} {:>9.4} {:>9.4}",
            branch.label(),
            worst,
            max_residual(&check_invariant_constraints(&reference)),
            max_residual(&check_b_coefficients(&reference)),
            reference.psi.re,
            reference.psi.im + 0.0
        );
    }
    Ok(())
}
