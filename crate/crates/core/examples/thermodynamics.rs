//! Energy per site, root density and the hole dispersion of branch 2B.

use vlab::bethe::{density_limit, density_profile, dispersion_samples, energy, ground_energy_density, hole_excitation, solve_ground_state};
use vlab::weights::Sign;

fn main() -> vlab::Result<()> {
    let (quad, closed) = ground_energy_density();
    println!("e_inf: quadrature {quad:.15}, closed form {closed:.15}");
    for l in [16, 32, 64] {
        let e = energy(&solve_ground_state(l, Sign::Plus)?, Sign::Plus)? / l as f64;
        println!("L={l:>2}: E/L {e:.10} (off by {:.2e})", e - closed);
    }
    let state = solve_ground_state(64, Sign::Plus)?;
    for s in density_profile(&state).iter().step_by(6) {
        println!("mu {:>8.4}: rho {:.6} vs {:.6}", s.mu, s.rho, density_limit(s.mu));
    }
    for mu in dispersion_samples(9) {
        let h = hole_excitation(mu)?;
        println!("hole mu {mu:>6.3}: energy {:.10}, 2 sin p {:.10}", h.energy, 2.0 * h.momentum.sin());
    }
    Ok(())
}
