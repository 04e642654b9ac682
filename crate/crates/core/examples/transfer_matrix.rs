//! Commuting transfer matrices and their charge-sector structure.

use vlab::c;
use vlab::operators::{total_sz, transfer_matrix, trinomial, Representation, SectorBasis};
use vlab::weights::{BranchId, BranchParams};

fn main() -> vlab::Result<()> {
    let p = BranchParams::new(c(0.9, 0.0));
    for branch in BranchId::FAMILIES {
        for l in 2..=5 {
            let t1 = transfer_matrix(branch, &p, c(0.31, 0.17), l, Representation::Sparse)?;
            let t2 = transfer_matrix(branch, &p, c(-0.43, 0.09), l, Representation::Sparse)?;
            let rel = t1.commutator(&t2).max_abs() / (t1.max_abs() * t2.max_abs());
            let charge = t1.commutator(&total_sz(l)).max_abs();
            println!("{} L={l}: [T,T'] {rel:.1e}  [T,Sz] {charge:.1e}  nnz {}", branch.label(), t1.nnz());
        }
    }
    for s in SectorBasis::all(4) {
        println!("L=4 sector {:>2}: {:>2} states (trinomial {})", s.sz_total, s.len(), trinomial(4, s.sz_total));
    }
    Ok(())
}
