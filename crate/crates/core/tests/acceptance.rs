//! The ten acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use vlab::bethe::{dispersion_check, dispersion_samples, energy, ground_energy_closed, ground_energy_density, solve_ground_state};
use vlab::cli::root_csv;
use vlab::operators::{
    chain_sector, chemical_potential_residual, dense_eigenvalues, hamiltonian_from_couplings,
    hamiltonian_from_log_derivative, transfer_matrix, two_site_from_log_derivative, Representation, SectorBasis,
};
use vlab::relations::{ybe_census, SlotAlgebra};
use vlab::weights::{
    check_b_coefficients, check_invariant_constraints, compute_invariants, make_weights,
    reference_invariants, BranchId, BranchParams, Sign,
};
use vlab::{c, C64, I};

struct Verdict {
    passed: bool,
    detail: String,
}

fn signs() -> Vec<(Sign, Sign, Sign)> {
    let s = [Sign::Plus, Sign::Minus];
    let mut out = Vec::new();
    for e1 in s {
        for e2 in s {
            for d in s {
                out.push((e1, e2, d));
            }
        }
    }
    out
}

fn params(e: (Sign, Sign, Sign)) -> BranchParams {
    BranchParams::new(c(0.9, 0.0)).with_signs(e.0, e.1, e.2)
}

fn point(rng: &mut SplitMix64) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5))
}

fn census() -> Verdict {
    let r = ybe_census(&SlotAlgebra::pt_invariant());
    let want = [(2, 6), (3, 36), (4, 57), (5, 24)];
    let ok = r.total == 123 && want.iter().all(|&(k, n)| r.counts.get(&k) == Some(&n)) && r.counts.len() == 4;
    Verdict { passed: ok, detail: format!("counts {:?}, total {}", r.counts, r.total) }
}

fn ybe() -> Verdict {
    let mut rng = SplitMix64::seed_from_u64(20);
    let mut worst = 0.0f64;
    let mut count = 0;
    for b in BranchId::FAMILIES {
        for e in signs() {
            let p = params(e);
            let mut done = 0;
            while done < 20 {
                let (l1, l2) = (point(&mut rng), point(&mut rng));
                if let Ok(r) = vlab::operators::ybe_residual(b, &p, l1, l2) {
                    worst = worst.max(r);
                    done += 1;
                    count += 1;
                }
            }
        }
    }
    Verdict { passed: worst <= 1e-10, detail: format!("{count} triples, max residual {worst:.2e}") }
}

fn invariants() -> Verdict {
    let mut rng = SplitMix64::seed_from_u64(21);
    let mut worst = (0.0f64, String::new());
    for b in BranchId::ALL {
        for e in signs() {
            let p = params(e);
            let reference = reference_invariants(b, &p);
            let mut done = 0;
            while done < 10 {
                let Ok(w) = make_weights(b, &p, point(&mut rng)) else { continue };
                let Ok(inv) = compute_invariants(&w) else { continue };
                let (d, name) = inv.max_relative_deviation(&reference);
                if d > worst.0 || d.is_nan() {
                    worst = (d, format!("{} {name}", b.label()));
                }
                done += 1;
            }
        }
    }
    Verdict { passed: worst.0 <= 1e-10, detail: format!("max relative deviation {:.2e} ({})", worst.0, worst.1) }
}

fn constraints() -> Verdict {
    let mut worst = (0.0f64, String::new());
    for b in BranchId::ALL {
        for e in signs() {
            let inv = reference_invariants(b, &params(e));
            let mut rs = check_invariant_constraints(&inv);
            rs.extend(check_b_coefficients(&inv));
            for r in rs {
                if r.value > worst.0 || r.value.is_nan() {
                    worst = (r.value, format!("{} {}", b.label(), r.name));
                }
            }
        }
    }
    Verdict { passed: worst.0 <= 1e-10, detail: format!("max constraint residual {:.2e} ({})", worst.0, worst.1) }
}

fn commute() -> Verdict {
    let (l1, l2) = (c(0.31, 0.17), c(-0.43, 0.09));
    let mut worst = 0.0f64;
    for b in BranchId::FAMILIES {
        for e in signs() {
            let p = params(e);
            for l in 2..=5 {
                let t1 = transfer_matrix(b, &p, l1, l, Representation::Sparse).expect("transfer matrix");
                let t2 = transfer_matrix(b, &p, l2, l, Representation::Sparse).expect("transfer matrix");
                let rel = t1.commutator(&t2).max_abs() / (t1.max_abs() * t2.max_abs());
                worst = worst.max(rel);
            }
        }
    }
    Verdict { passed: worst <= 1e-9, detail: format!("max relative commutator {worst:.2e}") }
}

fn hamiltonian() -> Verdict {
    let mut worst = 0.0f64;
    for b in BranchId::FAMILIES {
        for e in signs() {
            let p = params(e);
            for l in [3, 4] {
                let a = hamiltonian_from_couplings(b, &p, l).expect("table");
                let d = hamiltonian_from_log_derivative(b, &p, l).expect("log-derivative");
                worst = worst.max(chemical_potential_residual(&a, &d, l).expect("fit").residual);
            }
        }
    }
    Verdict { passed: worst <= 1e-7, detail: format!("max residual after projection {worst:.2e}") }
}

fn bethe_vs_ed() -> Verdict {
    let p = BranchParams::new(c(0.0, 0.0));
    let local = two_site_from_log_derivative(BranchId::B2B, &p).expect("two-site term");
    let mut worst = (0.0f64, 0.0f64);
    let mut parts = Vec::new();
    for l in [4, 6, 8] {
        let h = chain_sector(&local, -I, &SectorBasis::new(l, 0));
        let ev = dense_eigenvalues(&h.matrix());
        let im = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let ed = ev.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let e = energy(&solve_ground_state(l, Sign::Plus).expect("Bethe roots"), Sign::Plus).expect("energy");
        worst = (worst.0.max((e - ed).abs()), worst.1.max(im));
        parts.push(format!("L={l} {e:.10}"));
    }
    Verdict {
        passed: worst.0 <= 1e-8 && worst.1 < 1e-7,
        detail: format!("{}; max |E_BA - E_ED| {:.2e}, max |Im| {:.2e}", parts.join(", "), worst.0, worst.1),
    }
}

fn strings() -> Verdict {
    let state = solve_ground_state(40, Sign::Plus).expect("Bethe roots");
    let dev = state.string_deviations().iter().map(|d| d.abs()).fold(0.0, f64::max);
    let csv = root_csv(&state);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = header.iter().position(|h| *h == "scaled_im").expect("scaled_im column");
    let scaled: Vec<f64> = lines.map(|r| r.split(',').nth(col).unwrap().parse::<f64>().unwrap().abs()).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let band = (0.9..=1.0).contains(&lo) && (0.9..=1.0).contains(&hi) && scaled.len() == state.n;
    let paired = state.upper().iter().zip(&state.roots[state.n / 2..]).all(|(u, l)| (u.conj() - l).norm() < 1e-12);
    Verdict {
        passed: dev < 1e-2 && band && paired,
        detail: format!(
            "{} roots, max ||Im λ| - π/3| {dev:.3e} (bound 1e-2), scaled band [{lo:.4}, {hi:.4}] {}",
            state.n,
            if band && paired { "inside [0.9, 1.0]" } else { "outside [0.9, 1.0]" }
        ),
    }
}

fn thermo() -> Verdict {
    let (quad, closed) = ground_energy_density();
    let literal = -2.0 / PI + 3f64.sqrt() / 9.0;
    let e = energy(&solve_ground_state(64, Sign::Plus).expect("Bethe roots"), Sign::Plus).expect("energy") / 64.0;
    let ok = (quad - literal).abs() <= 1e-10 && (closed - ground_energy_closed()).abs() == 0.0 && (e - quad).abs() <= 1e-3;
    Verdict {
        passed: ok,
        detail: format!("e_inf {quad:.14} vs {literal:.14} ({:.1e}), E(64)/64 {e:.8} ({:.2e})", (quad - literal).abs(), (e - quad).abs()),
    }
}

fn dispersion() -> Verdict {
    let d = dispersion_check(&dispersion_samples(20)).expect("hole excitations");
    Verdict { passed: d <= 1e-8, detail: format!("max |ε(p) - 2 sin p| {d:.2e}") }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict, Duration); 10] = [
        ("census", census, Duration::from_secs(5)),
        ("ybe", ybe, Duration::from_secs(10)),
        ("invariant tables", invariants, Duration::from_secs(5)),
        ("constraint suite", constraints, Duration::from_secs(1)),
        ("commuting transfer matrices", commute, Duration::from_secs(60)),
        ("hamiltonian consistency", hamiltonian, Duration::from_secs(30)),
        ("bethe vs exact diagonalization", bethe_vs_ed, Duration::from_secs(120)),
        ("string structure", strings, Duration::from_secs(30)),
        ("thermodynamics", thermo, Duration::from_secs(60)),
        ("dispersion", dispersion, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let t = start.elapsed();
        let ok = v.passed && t <= *budget;
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {} [{:.2}s / {}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            t.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
