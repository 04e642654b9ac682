//! Bethe ansatz of the 2B chain: eigenvalue formula, Bethe equations, 2-string ground
//! states, densities, the thermodynamic limit and hole excitations.
//!
//! Energies use the normalization `J0 = −i` of the Hamiltonian built from the logarithmic
//! derivative of the transfer matrix, so `E = −ε1 Σ 2 sin(π/6) / (cos(π/6) − cosh 2λ_j)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use faer::prelude::SpSolver;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::weights::Sign;
use crate::{c, Error, Result, C64, I};

/// Modulus below which a denominator in the eigenvalue formula is a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Largest `|μ|` accepted for a hole.
pub const HOLE_WINDOW: f64 = 6.0;

/// Accepted modulus of the imaginary part of an energy.
pub const ENERGY_IMAG_TOL: f64 = 1e-9;

/// Roots and labels of one Bethe state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    /// Chain length.
    pub l: usize,
    /// Number of roots.
    pub n: usize,
    /// Logarithm branches of the string centres.
    pub q_numbers: Vec<f64>,
    /// Real string centres from the logarithmic system.
    pub mu: Vec<f64>,
    /// Complex rapidities: upper members first, then their conjugates in the same order.
    pub roots: Vec<C64>,
    /// Largest residual of the conjugate-paired Bethe equations after refinement.
    pub residual: f64,
}

impl BetheState {
    /// The reference state without roots.
    pub fn reference(l: usize) -> Self {
        BetheState { l, n: 0, q_numbers: vec![], mu: vec![], roots: vec![], residual: 0.0 }
    }

    /// State with explicit roots and no string data.
    pub fn from_roots(l: usize, roots: Vec<C64>) -> Self {
        BetheState { l, n: roots.len(), q_numbers: vec![], mu: vec![], roots, residual: f64::NAN }
    }

    /// Upper members of the conjugate pairs.
    pub fn upper(&self) -> &[C64] {
        &self.roots[..self.roots.len() / 2]
    }

    /// `|Im λ_j| − π/3` for every root.
    pub fn string_deviations(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.im.abs() - FRAC_PI_3).collect()
    }

    /// Range of `3|Im λ_j|/π` over the roots.
    pub fn scaled_imag_band(&self) -> (f64, f64) {
        self.roots
            .iter()
            .map(|r| 3.0 * r.im.abs() / PI)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

fn pole(quantity: &'static str, z: C64) -> Result<C64> {
    if z.norm() < POLE_TOL {
        Err(Error::Pole { quantity, modulus: z.norm() })
    } else {
        Ok(z)
    }
}

/// Transfer-matrix eigenvalue `Λ_n(λ)` on a Bethe state.
pub fn transfer_eigenvalue(lambda: C64, state: &BetheState, epsilon1: Sign) -> Result<C64> {
    let e = epsilon1.value();
    let ip = I * PI;
    let l = state.l as i32;
    let mut t1 = c(1.0, 0.0);
    let mut t2 = (e * lambda.sinh() / pole("sinh(lambda+i pi e1/6)", (lambda + ip * e / 6.0).sinh())?).powi(l);
    let mut t3 = (-(lambda + ip * e / 3.0).sinh() * lambda.sinh()
        / pole("cosh(lambda-i pi e1/3) cosh(lambda)", (lambda - ip * e / 3.0).cosh() * lambda.cosh())?)
    .powi(l);
    for &r in &state.roots {
        let x = lambda - r;
        t1 *= e * (-x + ip * e / 12.0).sinh() / pole("sinh(lambda_j-lambda-i pi e1/12)", (-x - ip * e / 12.0).sinh())?;
        t2 *= e * (2.0 * x + ip * e / 2.0).sinh() / pole("sinh(2(lambda-lambda_j)-i pi e1/6)", (2.0 * x - ip * e / 6.0).sinh())?
            * (x - ip * e / 12.0).sinh()
            / pole("sinh(lambda-lambda_j+i pi e1/12)", (x + ip * e / 12.0).sinh())?;
        t3 *= e * (x - ip / 2.0 + ip * e / 12.0).sinh()
            / pole("sinh(lambda-lambda_j+5i pi e1/12)", (x + 5.0 * ip * e / 12.0).sinh())?;
    }
    Ok(t1 + t2 + t3)
}

/// `LHS^L − Π_{k≠j}` of the Bethe equations for every root.
pub fn bae_residual(state: &BetheState, epsilon1: Sign) -> Vec<C64> {
    let e = epsilon1.value();
    let a = I * PI * e / 12.0;
    let b = I * PI * e / 3.0;
    let l = state.l as i32;
    state
        .roots
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            let lhs = ((u + a).sinh() / (u - a).sinh()).powi(l);
            let rhs: C64 = state
                .roots
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &v)| (2.0 * (u - v) + b).sinh() / (2.0 * (u - v) - b).sinh())
                .product();
            lhs - rhs
        })
        .collect()
}

/// `φ(x, y) = 2 arctan(tanh x cot y)`, principal branch.
pub fn phi(x: f64, y: f64) -> f64 {
    2.0 * (x.tanh() / y.tan()).atan()
}

/// `∂φ/∂x`.
pub fn phi_dx(x: f64, y: f64) -> f64 {
    let t = x.tanh();
    let k = 1.0 / y.tan();
    2.0 * k * (1.0 - t * t) / (1.0 + t * t * k * k)
}

/// Labelling of the logarithm branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QConvention {
    /// Symmetric consecutive ladder `Q_j = j − (m + 1)/2` over the `m = n/2` strings.
    #[default]
    Ladder,
    /// `Q_j = −[L/2 − n − 1]/2 + j − 1` for `j = 1..L/2 − n`.
    AsPrinted,
}

/// Q-numbers of the `n`-root state of an `L`-site chain.
pub fn q_numbers(l: usize, n: usize, convention: QConvention) -> Result<Vec<f64>> {
    match convention {
        QConvention::Ladder => {
            if n % 2 != 0 || n > l {
                return Err(Error::Seed(format!("{n} roots do not form 2-strings on {l} sites")));
            }
            let m = n / 2;
            Ok((1..=m).map(|j| j as f64 - (m as f64 + 1.0) / 2.0).collect())
        }
        QConvention::AsPrinted => {
            let count = l as i64 / 2 - n as i64;
            if count <= 0 {
                return Err(Error::Seed(format!("printed Q-number range is empty for L = {l}, n = {n}")));
            }
            let lead = -0.5 * (l as f64 / 2.0 - n as f64 - 1.0);
            Ok((1..=count).map(|j| lead + j as f64 - 1.0).collect())
        }
    }
}

/// Newton controls of the Bethe solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the logarithmic system.
    pub log_tol: f64,
    /// Convergence threshold on the conjugate-paired equations.
    pub root_tol: f64,
    /// Lifted roots are accepted below `lift_tol_per_site · L`.
    pub lift_tol_per_site: f64,
    pub q_convention: QConvention,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200,
            log_tol: 1e-12,
            root_tol: 1e-13,
            lift_tol_per_site: 1e-6,
            q_convention: QConvention::Ladder,
        }
    }
}

/// Residuals `L[φ(μ_j, 5π/12) − φ(μ_j, π/4)] + 2πQ_j − Σ_{k≠j} φ(2μ_j − 2μ_k, π/3)`.
pub fn log_residual(l: usize, q: &[f64], mu: &[f64]) -> Vec<f64> {
    let lf = l as f64;
    (0..mu.len())
        .map(|j| {
            let s: f64 = (0..mu.len()).filter(|&k| k != j).map(|k| phi(2.0 * (mu[j] - mu[k]), FRAC_PI_3)).sum();
            lf * (phi(mu[j], 5.0 * PI / 12.0) - phi(mu[j], FRAC_PI_4)) + 2.0 * PI * q[j] - s
        })
        .collect()
}

fn log_jacobian(l: usize, mu: &[f64]) -> Mat<f64> {
    let m = mu.len();
    let lf = l as f64;
    Mat::from_fn(m, m, |j, k| {
        if j == k {
            let s: f64 = (0..m).filter(|&q| q != j).map(|q| 2.0 * phi_dx(2.0 * (mu[j] - mu[q]), FRAC_PI_3)).sum();
            lf * (phi_dx(mu[j], 5.0 * PI / 12.0) - phi_dx(mu[j], FRAC_PI_4)) - s
        } else {
            2.0 * phi_dx(2.0 * (mu[j] - mu[k]), FRAC_PI_3)
        }
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn solve_linear(j: &Mat<f64>, f: &[f64]) -> Vec<f64> {
    let rhs = Mat::from_fn(f.len(), 1, |i, _| -f[i]);
    let x = j.partial_piv_lu().solve(&rhs);
    (0..f.len()).map(|i| x.read(i, 0)).collect()
}

/// Damped Newton: full step, halved while the residual grows.
fn damped_newton(
    mut x: Vec<f64>,
    residual: impl Fn(&[f64]) -> Vec<f64>,
    jacobian: impl Fn(&[f64]) -> Mat<f64>,
    tol: f64,
    max_iterations: usize,
) -> (Vec<f64>, f64, usize) {
    let mut f = residual(&x);
    let mut norm = max_abs(&f);
    for it in 0..max_iterations {
        if norm < tol {
            return (x, norm, it);
        }
        let dx = solve_linear(&jacobian(&x), &f);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + t * d).collect();
            let ft = residual(&trial);
            let nt = if ft.iter().all(|v| v.is_finite()) { max_abs(&ft) } else { f64::INFINITY };
            if nt < norm || t < 1e-3 {
                if nt.is_finite() {
                    x = trial;
                    f = ft;
                    norm = nt;
                }
                break;
            }
            t *= 0.5;
        }
    }
    (x, norm, max_iterations)
}

/// Real string centres from the logarithmic equations.
pub fn solve_string_centers(l: usize, q: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, f64)> {
    let m = q.len();
    if m == 0 {
        return Ok((vec![], 0.0));
    }
    let seed: Vec<f64> = if m == 1 {
        vec![0.0]
    } else {
        (0..m).map(|j| (-1.0 + 2.0 * j as f64 / (m - 1) as f64) * 0.15 * m as f64).collect()
    };
    let (mu, res, it) = damped_newton(seed, |x| log_residual(l, q, x), |x| log_jacobian(l, x), opts.log_tol, opts.max_iterations);
    if res < opts.log_tol {
        Ok((mu, res))
    } else {
        Err(Error::NoConvergence { iterations: it, residual: res })
    }
}

fn paired_residual(l: usize, upper: &[C64], epsilon1: Sign) -> Vec<C64> {
    let e = epsilon1.value();
    let a = I * PI * e / 12.0;
    let b = I * PI * e / 3.0;
    let s = |x: C64| (2.0 * x + b).sinh() / (2.0 * x - b).sinh();
    (0..upper.len())
        .map(|j| {
            let u = upper[j];
            let z = u - u.conj();
            let num = ((u + a).sinh() / (u - a).sinh()).powi(l as i32) * (2.0 * z - b).sinh();
            let den: C64 = (0..upper.len())
                .filter(|&k| k != j)
                .map(|k| s(u - upper[k]) * s(u - upper[k].conj()))
                .product::<C64>()
                * (2.0 * z + b).sinh();
            num / den - 1.0
        })
        .collect()
}

fn split(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect()
}

fn join(x: &[f64]) -> Vec<C64> {
    let m = x.len() / 2;
    (0..m).map(|j| c(x[j], x[m + j])).collect()
}

/// Refine 2-strings `μ_j ± iπ/3` into exact conjugate pairs of the Bethe equations.
pub fn lift_strings(l: usize, mu: &[f64], epsilon1: Sign, opts: &SolverOptions) -> Result<(Vec<C64>, f64)> {
    let m = mu.len();
    if m == 0 {
        return Ok((vec![], 0.0));
    }
    let offset = if m % 2 == 0 { -0.02 } else { 0.02 };
    let seed: Vec<f64> = mu.iter().copied().chain(std::iter::repeat(FRAC_PI_3 + offset).take(m)).collect();
    let residual = |x: &[f64]| split(&paired_residual(l, &join(x), epsilon1));
    let jacobian = |x: &[f64]| {
        let h = 1e-7;
        let n = x.len();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                residual(&xp).iter().zip(residual(&xm)).map(|(p, q)| (p - q) / (2.0 * h)).collect()
            })
            .collect();
        Mat::from_fn(n, n, |i, k| cols[k][i])
    };
    let (x, res, it) = damped_newton(seed, residual, jacobian, opts.root_tol, opts.max_iterations);
    if res <= opts.lift_tol_per_site * l as f64 {
        let upper = join(&x);
        let roots = upper.iter().copied().chain(upper.iter().map(|u| u.conj())).collect();
        Ok((roots, res))
    } else {
        Err(Error::NoConvergence { iterations: it, residual: res })
    }
}

/// String state with the given Q-numbers.
pub fn solve_strings(l: usize, q: Vec<f64>, epsilon1: Sign, opts: &SolverOptions) -> Result<BetheState> {
    let (mu, _) = solve_string_centers(l, &q, opts)?;
    let (roots, residual) = lift_strings(l, &mu, epsilon1, opts)?;
    Ok(BetheState { l, n: roots.len(), q_numbers: q, mu, roots, residual })
}

/// Zero-magnetization ground state `n = L` of an even chain.
pub fn solve_ground_state(l: usize, epsilon1: Sign) -> Result<BetheState> {
    solve_ground_state_with(l, epsilon1, &SolverOptions::default())
}

pub fn solve_ground_state_with(l: usize, epsilon1: Sign, opts: &SolverOptions) -> Result<BetheState> {
    if l < 4 || l % 2 != 0 {
        return Err(Error::Seed(format!("ground state needs an even chain with L >= 4, got {l}")));
    }
    let q = q_numbers(l, l, opts.q_convention)?;
    solve_strings(l, q, epsilon1, opts)
}

/// Energy with `J0 = −i`; fails if the imaginary part is not negligible.
pub fn energy(state: &BetheState, epsilon1: Sign) -> Result<f64> {
    let e = energy_complex(state, epsilon1);
    if e.im.abs() > ENERGY_IMAG_TOL * e.norm().max(1.0) {
        Err(Error::ComplexEnergy { imag: e.im })
    } else {
        Ok(e.re)
    }
}

pub fn energy_complex(state: &BetheState, epsilon1: Sign) -> C64 {
    let s = FRAC_PI_6.sin();
    let cs = FRAC_PI_6.cos();
    -epsilon1.value() * state.roots.iter().map(|r| 2.0 * s / (cs - (2.0 * r).cosh())).sum::<C64>()
}

/// `Z_L(μ)` with the state's string centres.
pub fn counting_function(state: &BetheState) -> impl Fn(f64) -> f64 + '_ {
    let l = state.l as f64;
    move |x: f64| {
        let s: f64 = state.mu.iter().map(|&m| phi(2.0 * (x - m), FRAC_PI_3)).sum();
        (phi(x, FRAC_PI_4) - phi(x, 5.0 * PI / 12.0) + s / l) / (2.0 * PI)
    }
}

/// `dZ_L/dμ`.
pub fn counting_derivative(state: &BetheState, x: f64) -> f64 {
    let l = state.l as f64;
    let s: f64 = state.mu.iter().map(|&m| 2.0 * phi_dx(2.0 * (x - m), FRAC_PI_3)).sum();
    (phi_dx(x, FRAC_PI_4) - phi_dx(x, 5.0 * PI / 12.0) + s / l) / (2.0 * PI)
}

/// A root-density sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub mu: f64,
    pub rho: f64,
}

/// Density at the interior centres from centred differences of `Z_L` across neighbours.
pub fn density_profile(state: &BetheState) -> Vec<DensitySample> {
    let z = counting_function(state);
    let mu = &state.mu;
    (1..mu.len().saturating_sub(1))
        .map(|j| DensitySample { mu: mu[j], rho: (z(mu[j + 1]) - z(mu[j - 1])) / (mu[j + 1] - mu[j - 1]) })
        .collect()
}

/// Thermodynamic root density `1/(π cosh 2μ)`.
pub fn density_limit(mu: f64) -> f64 {
    1.0 / (PI * (2.0 * mu).cosh())
}

/// Integrand of the ground-state energy per site in Fourier space.
pub fn energy_integrand(w: f64) -> f64 {
    if w.abs() < 1e-6 {
        return -1.0 / 3.0 - 7.0 * PI * PI * w * w / 432.0;
    }
    let x = PI * w;
    ((x / 12.0).sinh() - (x / 4.0).sinh()) / ((x / 4.0).cosh() * (x / 2.0).sinh())
}

/// Upper integration limit: the integrand decays like `4 e^{−πω/2}`.
pub const ENERGY_CUTOFF: f64 = 24.0;

/// `(quadrature, −2/π + √3/9)` for the energy per site.
pub fn ground_energy_density() -> (f64, f64) {
    let out = quadrature::double_exponential::integrate(energy_integrand, 0.0, ENERGY_CUTOFF, 1e-14);
    (out.integral, ground_energy_closed())
}

pub fn ground_energy_closed() -> f64 {
    -2.0 / PI + 3f64.sqrt() / 9.0
}

/// A hole in the ground-state Q-ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    pub mu_hole: f64,
    pub energy: f64,
    pub momentum: f64,
}

/// `ε(μ) = 2π ρ(μ) = 2 / cosh 2μ`.
pub fn hole_energy(mu: f64) -> f64 {
    2.0 * PI * density_limit(mu)
}

/// `p(μ) = π/2 − gd(2μ)`, the integral of `ε` from `μ` to infinity.
pub fn hole_momentum_closed(mu: f64) -> f64 {
    FRAC_PI_2 - (2.0 * mu).sinh().atan()
}

/// Width beyond `μ` after which the tail of `ε` is below `1e−16`.
const HOLE_TAIL: f64 = 20.0;

/// Energy and momentum of a hole, the momentum by quadrature of `ε`.
pub fn hole_excitation(mu_hole: f64) -> Result<Excitation> {
    if !mu_hole.is_finite() || mu_hole.abs() > HOLE_WINDOW {
        return Err(Error::Config(format!("hole rapidity {mu_hole} outside [-{HOLE_WINDOW}, {HOLE_WINDOW}]")));
    }
    let out = quadrature::double_exponential::integrate(hole_energy, mu_hole, mu_hole.max(0.0) + HOLE_TAIL, 1e-14);
    Ok(Excitation { mu_hole, energy: hole_energy(mu_hole), momentum: out.integral })
}

/// `n` hole rapidities evenly spaced in `[−2.5, 2.5]`.
pub fn dispersion_samples(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|k| -2.5 + 5.0 * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Largest `|ε − 2 sin p|` over the sampled holes.
pub fn dispersion_check(samples: &[f64]) -> Result<f64> {
    samples.iter().try_fold(0.0f64, |acc, &mu| {
        let ex = hole_excitation(mu)?;
        Ok(acc.max((ex.energy - 2.0 * ex.momentum.sin()).abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_state_eigenvalue() {
        let s = BetheState::reference(6);
        let v = transfer_eigenvalue(c(0.0, 0.0), &s, Sign::Plus).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
        let l = c(0.3, 0.2);
        let e = 1.0;
        let ip = I * PI;
        let expect = 1.0
            + (e * l.sinh() / (l + ip / 6.0).sinh()).powi(6)
            + (-(l + ip / 3.0).sinh() * l.sinh() / ((l - ip / 3.0).cosh() * l.cosh())).powi(6);
        assert!((transfer_eigenvalue(l, &s, Sign::Plus).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn single_root_at_origin() {
        let s = BetheState::from_roots(6, vec![c(0.0, 0.0)]);
        assert!(bae_residual(&s, Sign::Plus)[0].norm() < 1e-15);
    }

    #[test]
    fn empty_state_has_zero_energy() {
        assert_eq!(energy(&BetheState::reference(4), Sign::Plus).unwrap(), 0.0);
    }

    #[test]
    fn string_at_origin_is_real() {
        let s = BetheState::from_roots(4, vec![c(0.0, FRAC_PI_3), c(0.0, -FRAC_PI_3)]);
        let e = energy_complex(&s, Sign::Plus);
        let one = 2.0 * FRAC_PI_6.sin() / (FRAC_PI_6.cos() - (2.0 * I * FRAC_PI_3).cosh());
        assert!(e.im.abs() < 1e-15);
        assert!((e.re + 2.0 * one.re).abs() < 1e-15);
    }

    #[test]
    fn ladder_q_numbers() {
        assert_eq!(q_numbers(8, 8, QConvention::Ladder).unwrap(), vec![-1.5, -0.5, 0.5, 1.5]);
        assert!(matches!(q_numbers(8, 8, QConvention::AsPrinted), Err(Error::Seed(_))));
        assert_eq!(q_numbers(8, 1, QConvention::AsPrinted).unwrap(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn integrand_limit_is_continuous() {
        let a = energy_integrand(0.999e-6);
        let b = energy_integrand(1.001e-6);
        assert!((a - b).abs() < 1e-12);
        assert!((energy_integrand(0.0) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hole_limits() {
        let ex = hole_excitation(0.0).unwrap();
        assert!((ex.energy - 2.0).abs() < 1e-15);
        assert!((ex.momentum - FRAC_PI_2).abs() < 1e-12);
        let far = hole_excitation(HOLE_WINDOW).unwrap();
        assert!(far.energy < 1e-4 && far.momentum < 1e-4);
        assert!(hole_excitation(HOLE_WINDOW + 1.0).is_err());
    }
}
