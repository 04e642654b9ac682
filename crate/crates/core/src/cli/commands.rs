use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bethe::{
    dispersion_samples, energy, ground_energy_density, hole_excitation, solve_ground_state, BetheState,
};
use crate::operators::{
    chain_sector, chemical_potential_residual, coupling_table, eigenspectrum_with, hamiltonian_from_couplings,
    hamiltonian_from_log_derivative, transfer_matrix, two_site_from_couplings, two_site_from_log_derivative,
    ybe_residual_weights, Budget, KrylovOptions, Method, Representation, SectorBasis,
};
use crate::relations::{catalog, census_entries, evaluate_relations, match_catalog_to_census, ybe_census, SlotAlgebra};
use crate::weights::{
    check_b_coefficients, check_invariant_constraints, compute_invariants, make_weights, max_residual,
    reference_invariants, BranchId, WeightSet,
};
use crate::{c, Error, Result, C64};

use super::{Check, Format, RunConfig};

/// Checks and the optional data artifact of a command.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub data: Option<String>,
}

/// Verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Ybe,
    Invariants,
    Relations,
    Commute,
    Hamiltonian,
}

/// Weight content of the census.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CensusModel {
    /// Fourteen PT-invariant weights with independent `c̃±` and `d̃`.
    Pt,
    /// The six-vertex subalgebra.
    SixVertex,
}

/// `n` points `x + iy` with `x ∈ [−1, 1)`, `y ∈ [−½, ½)`.
pub fn sample_points(rng: &mut SplitMix64, n: usize) -> Vec<C64> {
    (0..n).map(|_| c(2.0 * rng.gen::<f64>() - 1.0, rng.gen::<f64>() - 0.5)).collect()
}

/// Draw `n` admissible pairs, resampling pole hits up to `50n` times.
fn draw_pairs<T>(cfg: &RunConfig, n: usize, mut build: impl FnMut(C64, C64) -> Result<T>) -> Result<Vec<T>> {
    let mut rng = SplitMix64::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(n);
    let mut last = None;
    for _ in 0..50 * n.max(1) {
        if out.len() == n {
            break;
        }
        let p = sample_points(&mut rng, 2);
        match build(p[0], p[1]) {
            Ok(t) => out.push(t),
            Err(e @ (Error::Pole { .. } | Error::DegenerateWeight(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    if out.len() < n {
        return Err(last.unwrap_or(Error::Config("no admissible samples".into())));
    }
    Ok(out)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn require_free_gamma(cfg: &RunConfig) -> Result<()> {
    if cfg.gamma_perturb != 0.0 && !cfg.branch.has_free_gamma() {
        return Err(Error::Config(format!("branch {} has no free gamma to perturb", cfg.branch)));
    }
    Ok(())
}

/// Weight triples `(R(λ1 − λ2), L(λ1), L(λ2))`, `L(λ1)` at the perturbed γ.
fn triples(cfg: &RunConfig) -> Result<Vec<[WeightSet; 3]>> {
    let p = cfg.params();
    let q = cfg.perturbed_params();
    draw_pairs(cfg, cfg.samples, |l1, l2| {
        Ok([make_weights(cfg.branch, &p, l1 - l2)?, make_weights(cfg.branch, &q, l1)?, make_weights(cfg.branch, &p, l2)?])
    })
}

fn verify_ybe(cfg: &RunConfig) -> Result<Check> {
    let t = triples(cfg)?;
    let r = max_of(t.par_iter().map(|[a, b, c]| ybe_residual_weights(a, b, c)).collect::<Vec<_>>());
    Ok(Check::bound("ybe", r, cfg.tolerance(1e-10)).with_detail(format!("{} samples", t.len())))
}

fn verify_invariants(cfg: &RunConfig) -> Result<Vec<Check>> {
    let q = cfg.perturbed_params();
    let reference = reference_invariants(cfg.branch, &cfg.params());
    let sets = draw_pairs(cfg, cfg.samples, |l, _| compute_invariants(&make_weights(cfg.branch, &q, l)?))?;
    let tol = cfg.tolerance(1e-10);
    let (dev, worst) = sets
        .iter()
        .map(|s| s.max_relative_deviation(&reference))
        .fold((0.0, ""), |acc, d| if d.0 > acc.0 { d } else { acc });
    Ok(vec![
        Check::bound("invariants", dev, tol).with_detail(format!("{} samples, worst {}", sets.len(), worst)),
        Check::bound("constraints", max_residual(&check_invariant_constraints(&reference)), tol),
        Check::bound("b_coefficients", max_residual(&check_b_coefficients(&reference)), tol),
    ])
}

fn verify_relations(cfg: &RunConfig) -> Result<Check> {
    let t = triples(cfg)?;
    let per: Vec<(f64, String)> = t
        .par_iter()
        .map(|[a, b, c]| {
            evaluate_relations(a, b, c, b.psi())
                .into_iter()
                .fold((0.0, String::new()), |acc, (id, v)| if v > acc.0 { (v, id) } else { acc })
        })
        .collect();
    let (r, id) = per.into_iter().fold((0.0, String::new()), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(Check::bound("relations", r, cfg.tolerance(1e-10)).with_detail(format!("{} relations, worst {id}", catalog().len())))
}

fn verify_commute(cfg: &RunConfig) -> Result<Check> {
    let l = cfg.chain_length_or(4);
    let p = cfg.params();
    let q = cfg.perturbed_params();
    let pairs = draw_pairs(cfg, cfg.samples, |l1, l2| {
        make_weights(cfg.branch, &q, l1)?;
        make_weights(cfg.branch, &p, l2)?;
        Ok((l1, l2))
    })?;
    let rs: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(l1, l2)| {
            let a = transfer_matrix(cfg.branch, &q, l1, l, Representation::Sparse)?;
            let b = transfer_matrix(cfg.branch, &p, l2, l, Representation::Sparse)?;
            Ok(a.commutator(&b).max_abs() / (a.max_abs() * b.max_abs()))
        })
        .collect();
    let r = max_of(rs.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(Check::bound("commute", r, cfg.tolerance(1e-9)).with_detail(format!("L = {l}")))
}

fn verify_hamiltonian(cfg: &RunConfig) -> Result<Check> {
    let l = cfg.chain_length_or(4);
    let a = hamiltonian_from_couplings(cfg.branch, &cfg.params(), l)?;
    let b = hamiltonian_from_log_derivative(cfg.branch, &cfg.perturbed_params(), l)?;
    let fit = chemical_potential_residual(&a, &b, l)?;
    Ok(Check::bound("hamiltonian", fit.residual, cfg.tolerance(1e-7)).with_detail(format!(
        "L = {l}, fitted shift {:.6e}{:+.6e}i",
        fit.identity.re, fit.identity.im
    )))
}

/// Run the selected verification suites; all that apply to the branch when `scopes` is empty.
pub fn cmd_verify(cfg: &RunConfig, scopes: &[Scope]) -> Result<Outcome> {
    require_free_gamma(cfg)?;
    let mut selected: Vec<Scope> = if scopes.is_empty() {
        Scope::value_variants()
            .iter()
            .copied()
            .filter(|&s| s != Scope::Hamiltonian || cfg.branch != BranchId::S2S)
            .collect()
    } else {
        scopes.to_vec()
    };
    selected.sort();
    selected.dedup();
    let mut checks = Vec::new();
    for s in selected {
        match s {
            Scope::Ybe => checks.push(verify_ybe(cfg)?),
            Scope::Invariants => checks.extend(verify_invariants(cfg)?),
            Scope::Relations => checks.push(verify_relations(cfg)?),
            Scope::Commute => checks.push(verify_commute(cfg)?),
            Scope::Hamiltonian => checks.push(verify_hamiltonian(cfg)?),
        }
    }
    Ok(Outcome { checks, data: None })
}

fn counts_string(m: &BTreeMap<usize, usize>) -> String {
    let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Census of distinct YBE component equations by number of triple products.
pub fn cmd_census(cfg: &RunConfig, model: CensusModel, dump: Option<&Path>) -> Result<Outcome> {
    let alg = match model {
        CensusModel::Pt => SlotAlgebra::pt_invariant(),
        CensusModel::SixVertex => SlotAlgebra::six_vertex(),
    };
    let report = ybe_census(&alg);
    let (expected, counted): (BTreeMap<usize, usize>, BTreeMap<usize, usize>) = match model {
        CensusModel::Pt => ([(2, 6), (3, 36), (4, 57), (5, 24)].into(), report.counts.clone()),
        CensusModel::SixVertex => ([(3, 6)].into(), report.counts.iter().filter(|e| *e.0 == 3).map(|(k, v)| (*k, *v)).collect()),
    };
    let mismatch: usize = expected
        .keys()
        .chain(counted.keys())
        .map(|k| expected.get(k).copied().unwrap_or(0).abs_diff(counted.get(k).copied().unwrap_or(0)))
        .sum();
    let mut checks = vec![Check::exact(
        "census_counts",
        mismatch == 0,
        mismatch as f64,
        format!("{} total {}", counts_string(&report.counts), report.total),
    )];
    if model == CensusModel::Pt {
        let m = match_catalog_to_census();
        let missing = m.unmatched_relations.len() + m.unmatched_equations;
        checks.push(Check::exact(
            "catalog_match",
            missing == 0,
            missing as f64,
            format!("{} consolidated equations matched, {} catalog entries gauge-trivial", m.matched_equations, m.trivial.len()),
        ));
    }
    if let Some(path) = dump {
        std::fs::write(path, serde_json::to_string_pretty(&census_entries(&alg))?)?;
    }
    let _ = cfg;
    Ok(Outcome { checks, data: Some(serde_json::to_string_pretty(&report)? + "\n") })
}

/// One exported eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub branch: BranchId,
    #[serde(rename = "L")]
    pub chain_length: usize,
    pub sz_sector: i32,
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub method: Method,
    pub residual: Option<f64>,
}

/// Construction of the two-site Hamiltonian term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianSource {
    /// `P · dL/dλ(0)`, the normalization of the Bethe energies.
    LogDerivative,
    /// The closed-form coupling table; equal to the above up to `{1, ΣSz, ΣSz²}`.
    Table,
}

fn local_term(cfg: &RunConfig, source: HamiltonianSource) -> Result<faer::Mat<C64>> {
    match source {
        HamiltonianSource::LogDerivative => two_site_from_log_derivative(cfg.branch, &cfg.params()),
        HamiltonianSource::Table => Ok(two_site_from_couplings(&coupling_table(cfg.branch, &cfg.params())?)),
    }
}

/// Hamiltonian eigenvalues of the selected sector (all sectors when `sector` is `None`).
pub fn cmd_spectrum(
    cfg: &RunConfig,
    sector: Option<i32>,
    k: Option<usize>,
    method: Method,
    source: HamiltonianSource,
) -> Result<Outcome> {
    let l = cfg.chain_length_or(4);
    let budget = Budget::from_env()?;
    let sectors: Vec<i32> = match sector {
        Some(s) if s.unsigned_abs() as usize > l => return Err(Error::Config(format!("sector {s} outside [-{l}, {l}]"))),
        Some(s) => vec![s],
        None => (-(l as i32)..=l as i32).collect(),
    };
    for &s in &sectors {
        budget.check_sector(l, s)?;
    }
    let local = local_term(cfg, source)?;
    let j0 = cfg.j0_value();
    let k = k.unwrap_or(if method == Method::Iterative { 6 } else { 0 });
    let opts = KrylovOptions { tol: cfg.tolerance(KrylovOptions::default().tol), seed: cfg.seed, ..Default::default() };
    let spectra: Vec<Result<(i32, crate::operators::Spectrum)>> = sectors
        .par_iter()
        .map(|&s| {
            let basis = SectorBasis::new(l, s);
            let h = chain_sector(&local, j0, &basis);
            Ok((s, eigenspectrum_with(&h, None, method, k, &budget, &opts)?))
        })
        .collect();
    let mut rows = Vec::new();
    for r in spectra {
        let (s, spec) = r?;
        for (i, v) in spec.values.iter().enumerate() {
            rows.push(SpectrumRow {
                branch: cfg.branch,
                chain_length: l,
                sz_sector: s,
                index: i,
                re: v.re,
                im: v.im,
                method: spec.method,
                residual: spec.residuals.as_ref().map(|r| r[i]),
            });
        }
    }
    let finite = rows.iter().all(|r| r.re.is_finite() && r.im.is_finite());
    let checks = vec![Check::exact("finite_eigenvalues", finite, 0.0, format!("{} eigenvalues", rows.len()))];
    let data = match cfg.format_or(Format::Csv) {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut s = String::from("branch,L,sz_sector,index,re,im,method,residual\n");
            for r in &rows {
                let res = r.residual.map(|x| format!("{x:?}")).unwrap_or_default();
                let _ = writeln!(s, "{},{},{},{},{:?},{:?},{},{}", r.branch, r.chain_length, r.sz_sector, r.index, r.re, r.im, r.method, res);
            }
            s
        }
    };
    Ok(Outcome { checks, data: Some(data) })
}

/// Root table: upper members then lower members, one row per rapidity.
pub fn root_csv(state: &BetheState) -> String {
    use std::f64::consts::PI;
    let m = state.mu.len();
    let mut s = String::from("L,j,Q_j,mu_j,re_lambda,im_lambda,scaled_re,scaled_im\n");
    for (i, r) in state.roots.iter().enumerate() {
        let j = i % m;
        let _ = writeln!(
            s,
            "{},{},{:?},{:?},{:?},{:?},{:?},{:?}",
            state.l,
            j + 1,
            state.q_numbers[j],
            state.mu[j],
            r.re,
            r.im,
            3.0 * r.re / PI,
            3.0 * r.im / PI
        );
    }
    s
}

/// Ground-state roots of the 2B chain.
pub fn cmd_bethe_solve(cfg: &RunConfig) -> Result<Outcome> {
    let l = cfg.chain_length_or(40);
    let state = solve_ground_state(l, cfg.epsilon1)?;
    let e = energy(&state, cfg.epsilon1)?;
    let (lo, hi) = state.scaled_imag_band();
    let band = (lo - 1.0).abs().max((hi - 1.0).abs());
    let checks = vec![
        Check::bound("bae_residual", state.residual, cfg.tolerance(1e-10))
            .with_detail(format!("E = {e:.12}, E/L = {:.12}", e / l as f64)),
        Check::bound("string_band", band, 0.1).with_detail(format!("3|Im λ|/π in [{lo:.4}, {hi:.4}]")),
    ];
    let data = match cfg.format_or(Format::Csv) {
        Format::Csv => root_csv(&state),
        Format::Json => serde_json::to_string_pretty(&state)? + "\n",
    };
    Ok(Outcome { checks, data: Some(data) })
}

/// Thermodynamic comparison emitted by `bethe thermo`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoReport {
    pub quadrature: f64,
    pub closed_form: f64,
    pub abs_error: f64,
    pub finite_size: Vec<FiniteSize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSize {
    #[serde(rename = "L")]
    pub chain_length: usize,
    pub energy_per_site: f64,
    pub deviation: f64,
}

/// `e∞` by quadrature against the closed form, and `E(L)/L` up to `L` (default 64).
pub fn cmd_bethe_thermo(cfg: &RunConfig) -> Result<Outcome> {
    let (q, closed) = ground_energy_density();
    let top = cfg.chain_length_or(64);
    let mut sizes: Vec<usize> = [8, 16, 32].into_iter().filter(|&l| l < top).collect();
    sizes.push(top);
    let finite_size = sizes
        .par_iter()
        .map(|&l| {
            let e = energy(&solve_ground_state(l, cfg.epsilon1)?, cfg.epsilon1)? / l as f64;
            Ok(FiniteSize { chain_length: l, energy_per_site: e, deviation: (e - closed).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = finite_size.last().expect("at least one size").deviation;
    let report = ThermoReport { quadrature: q, closed_form: closed, abs_error: (q - closed).abs(), finite_size };
    let checks = vec![
        Check::bound("e_inf_quadrature", report.abs_error, cfg.tolerance(1e-10)),
        Check::bound("finite_size", last, 1e-3).with_detail(format!("L = {top}")),
    ];
    Ok(Outcome { checks, data: Some(serde_json::to_string_pretty(&report)? + "\n") })
}

/// Hole energies and momenta with the `ε = 2 sin p` check.
pub fn cmd_bethe_dispersion(cfg: &RunConfig, samples: usize) -> Result<Outcome> {
    let ex = dispersion_samples(samples).into_iter().map(hole_excitation).collect::<Result<Vec<_>>>()?;
    let dev = max_of(ex.iter().map(|e| (e.energy - 2.0 * e.momentum.sin()).abs()));
    let data = match cfg.format_or(Format::Csv) {
        Format::Json => serde_json::to_string_pretty(&ex)? + "\n",
        Format::Csv => {
            let mut s = String::from("mu,energy,momentum,two_sin_p\n");
            for e in &ex {
                let _ = writeln!(s, "{:?},{:?},{:?},{:?}", e.mu_hole, e.energy, e.momentum, 2.0 * e.momentum.sin());
            }
            s
        }
    };
    let checks = vec![Check::bound("dispersion", dev, cfg.tolerance(1e-8)).with_detail(format!("{samples} holes"))];
    Ok(Outcome { checks, data: Some(data) })
}

/// The relation catalog as JSON, to `dump` or as the data artifact.
pub fn cmd_relations(cfg: &RunConfig, dump: Option<&Path>) -> Result<Outcome> {
    let cat = catalog();
    let json = serde_json::to_string_pretty(cat)? + "\n";
    let checks = vec![Check::exact("catalog_size", cat.len() == 99, cat.len().abs_diff(99) as f64, format!("{} relations", cat.len()))];
    let _ = cfg;
    match dump {
        Some(p) => {
            std::fs::write(p, json)?;
            Ok(Outcome { checks, data: None })
        }
        None => Ok(Outcome { checks, data: Some(json) }),
    }
}
