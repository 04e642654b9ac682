//! Branch-2B ground-state roots, energies against exact diagonalization, and the root CSV.

use vlab::bethe::{energy, solve_ground_state};
use vlab::cli::root_csv;
use vlab::operators::{chain_sector, dense_eigenvalues, two_site_from_log_derivative, SectorBasis};
use vlab::weights::{BranchId, BranchParams, Sign};
use vlab::I;

fn main() -> vlab::Result<()> {
    let local = two_site_from_log_derivative(BranchId::B2B, &BranchParams::default())?;
    for l in [4, 6, 8] {
        let e = energy(&solve_ground_state(l, Sign::Plus)?, Sign::Plus)?;
        let h = chain_sector(&local, -I, &SectorBasis::new(l, 0));
        let ed = dense_eigenvalues(&h.matrix()).iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        println!("L={l}: Bethe {e:.12}  ED {ed:.12}");
    }
    let state = solve_ground_state(40, Sign::Plus)?;
    let (lo, hi) = state.scaled_imag_band();
    println!("L=40: paired residual {:.1e}, 3|Im λ|/π in [{lo:.4}, {hi:.4}]", state.residual);
    print!("{}", root_csv(&state));
    Ok(())
}
