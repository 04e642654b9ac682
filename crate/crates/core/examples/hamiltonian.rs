//! Coupling-table and log-derivative Hamiltonians, compared modulo chemical potentials.

use vlab::c;
use vlab::operators::{chemical_potential_residual, coupling_table, hamiltonian_from_couplings, hamiltonian_from_log_derivative};
use vlab::weights::{BranchId, BranchParams};

fn main() -> vlab::Result<()> {
    let p = BranchParams::new(c(0.9, 0.0));
    for branch in BranchId::FAMILIES {
        let k = coupling_table(branch, &p)?;
        println!("{}: J1={:.4} J3={:.4} h1={:.4} delta1={:.4}", branch.label(), k.j1, k.j3, k.h1, k.delta1);
        for l in [3, 4] {
            let a = hamiltonian_from_couplings(branch, &p, l)?;
            let h = hamiltonian_from_log_derivative(branch, &p, l)?;
            let fit = chemical_potential_residual(&a, &h, l)?;
            println!(
                "  L={l}: identity {:.4}, Sz {:.1e}, Sz^2 {:.1e}, residual {:.1e}, hermiticity {:.1e}",
                fit.identity,
                fit.sz.norm(),
                fit.sz2.norm(),
                fit.residual,
                h.sub(&h.adjoint()).max_abs()
            );
        }
    }
    Ok(())
}
