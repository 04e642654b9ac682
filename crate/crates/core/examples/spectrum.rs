//! Sector spectra of the branch-2B chain, dense and iterative.

use vlab::operators::{
    chain_sector, eigenspectrum_with, two_site_from_log_derivative, Budget, KrylovOptions, Method, SectorBasis,
};
use vlab::weights::{BranchId, BranchParams};
use vlab::I;

fn main() -> vlab::Result<()> {
    let local = two_site_from_log_derivative(BranchId::B2B, &BranchParams::default())?;
    let (budget, opts) = (Budget::from_env()?, KrylovOptions::default());
    for l in [4, 6, 8] {
        for s in SectorBasis::all(l).iter().filter(|s| s.sz_total.abs() <= 1) {
            let h = chain_sector(&local, -I, s);
            let dense = eigenspectrum_with(&h, None, Method::Dense, 0, &budget, &opts)?;
            let iter = eigenspectrum_with(&h, None, Method::Iterative, 3, &budget, &opts)?;
            println!(
                "L={l} Sz={:>2} dim {:>4}: lowest {:.10} (iterative {:.10}), max |Im| {:.1e}",
                s.sz_total,
                s.len(),
                dense.lowest().re,
                iter.lowest().re,
                dense.max_imag()
            );
        }
    }
    Ok(())
}
