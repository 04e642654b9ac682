//! Yang-Baxter residuals of the four families, and what happens off the integrable manifold.

use vlab::c;
use vlab::operators::{ybe_residual, ybe_residual_weights};
use vlab::weights::{make_weights, BranchId, BranchParams, Sign};

fn main() -> vlab::Result<()> {
    let (l1, l2) = (c(0.41, 0.13), c(-0.27, 0.06));
    for branch in BranchId::FAMILIES {
        for e1 in [Sign::Plus, Sign::Minus] {
            let p = BranchParams::new(c(0.9, 0.0)).with_signs(e1, Sign::Plus, Sign::Plus);
            println!("{} eps1={e1}: {:.2e}", branch.label(), ybe_residual(branch, &p, l1, l2)?);
        }
    }
    let p = BranchParams::new(c(0.9, 0.0));
    let q = BranchParams::new(c(0.95, 0.0));
    let w0 = make_weights(BranchId::B1A, &p, l1 - l2)?;
    let w1 = make_weights(BranchId::B1A, &p, l1)?;
    let w2 = make_weights(BranchId::B1A, &q, l2)?;
    println!("1A with mismatched anisotropy: {:.2e}", ybe_residual_weights(&w0, &w1, &w2));
    Ok(())
}
