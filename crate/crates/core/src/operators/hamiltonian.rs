use faer::prelude::SpSolverLstsq;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::weights::{make_weights, BranchId, BranchParams};
use crate::{c, Error, Result, C64, I};

use super::basis::{Budget, SectorBasis, SpinMatrices};
use super::lattice::l_operator;
use super::linear::{kron, LinearOperator};

/// Base step of the central difference for `dL/dλ` at the origin.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// Nearest-neighbour couplings of the spin-1 two-site term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub j1: C64,
    pub j1t: C64,
    pub j2: C64,
    pub j2t: C64,
    pub j3: C64,
    pub j3t: C64,
    pub j4: C64,
    pub j4t: C64,
    pub j5: C64,
    pub j5t: C64,
    pub h1: C64,
    pub h2: C64,
    pub delta1: C64,
    pub delta2: C64,
    pub delta3: C64,
    pub delta4: C64,
}

impl Couplings {
    #[allow(clippy::too_many_arguments)]
    fn symmetric(j1: C64, j2: C64, j3: C64, j4: C64, j5: C64, h1: C64, h2: C64, d: [C64; 4]) -> Self {
        Couplings {
            j1,
            j1t: j1,
            j2,
            j2t: j2,
            j3,
            j3t: j3,
            j4,
            j4t: j4,
            j5,
            j5t: j5,
            h1,
            h2,
            delta1: d[0],
            delta2: d[1],
            delta3: d[2],
            delta4: d[3],
        }
    }
}

/// Closed-form couplings of a branch; the ± of the table is `d_sign`.
pub fn coupling_table(branch: BranchId, params: &BranchParams) -> Result<Couplings> {
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
    let pm = params.d_sign.value();
    let e1 = params.epsilon1.value();
    let e2 = params.epsilon2.value();
    let s3 = 3f64.sqrt();
    let zero = c(0.0, 0.0);
    match branch {
        BranchId::B1A => {
            let g = params.gamma;
            let gb = I * FRAC_PI_4 * (1.0 - e1);
            let j2 = 1.0 / g.sinh() - pm / (g / 2.0 + gb).sinh();
            let d1 = (2.0 * g.cosh() + e1) / (2.0 * g.sinh());
            Ok(Couplings::symmetric(
                pm / (2.0 * (g / 2.0 + gb).sinh()),
                j2,
                -e1 / (4.0 * g.sinh()),
                -j2 / 2.0,
                j2 / 2.0,
                zero,
                g.cosh() / g.sinh(),
                [d1, -d1, zero, zero],
            ))
        }
        BranchId::B1B | BranchId::S1S => {
            let (g, e1) = if branch == BranchId::S1S {
                (params.effective_gamma(branch), -e1)
            } else {
                (params.gamma, e1)
            };
            let g0 = I * FRAC_PI_3 * e1;
            let r = g.sinh() * (g - g0).sinh();
            let sr = r.sqrt();
            Ok(Couplings::symmetric(
                pm / (2.0 * sr),
                s3 * (g - g0 / 2.0).sinh() / (2.0 * r) - pm / sr,
                -I * s3 * e1 / (8.0 * r),
                -1.0 / (2.0 * (g - g0).sinh()) + pm / (2.0 * sr),
                1.0 / (2.0 * g.sinh()) - pm / (2.0 * sr),
                (2.0 * g - g0).sinh() / (2.0 * r),
                -s3 * (g + g0 / 2.0).cosh() / (4.0 * r * (g - g0).sinh()),
                [zero; 4],
            ))
        }
        BranchId::B2A => {
            let g = params.gamma;
            let gb = I * FRAC_PI_4 * (1.0 - e1);
            let cc = (1.5 * g + gb).cosh();
            let j4 = -1.0 / (2.0 * g.sinh()) + pm * (-e2 * g).exp() / (2.0 * cc);
            let den = 2.0 * (-e1 * g.sinh() + (2.0 * g).sinh());
            let d1 = (2.0 * e2 * g).cosh() / den;
            let d2 = (4.0 * e1 * g.cosh() - (2.0 * e2 * g).cosh()) / den;
            let d3 = -(2.0 * e2 * g).tanh() * d1;
            Ok(Couplings::symmetric(
                pm / (2.0 * (e2 * g).exp() * cc),
                1.0 / g.sinh() + pm * (e2 * g).sinh() / cc,
                (g / 2.0 + gb).cosh() / (4.0 * g.sinh() * cc),
                j4,
                -j4,
                zero,
                (-3.0 * e1 + 2.0 * g.cosh()) * g.cosh() / (-e1 * g.sinh() + (2.0 * g).sinh()),
                [d1, d2, d3, -d3],
            ))
        }
        BranchId::B2B => {
            let w2 = (2.0 * I * FRAC_PI_3 * e2).exp();
            let s = pm * e1 * e2;
            let d1 = -I * s3 * e1 / 4.0;
            let d3 = I * e2 * s3 * d1;
            Ok(Couplings::symmetric(
                -s * w2 / 2.0,
                c(-s / 2.0, 0.0),
                -I * s3 * e1 / 4.0,
                -I - s * w2 / 2.0,
                -I + s * w2 / 2.0,
                zero,
                zero,
                [d1, 3.0 * d1, d3, -d3],
            ))
        }
        BranchId::S2S => Err(Error::Config("the 2S point has no closed-form coupling table".into())),
    }
}

/// Two-site term on `C³ ⊗ C³` built from spin-1 matrices.
pub fn two_site_from_couplings(k: &Couplings) -> Mat<C64> {
    let s = SpinMatrices::new();
    let id = SpinMatrices::identity();
    let (sp, sm, sz) = (&s.s_plus, &s.s_minus, &s.s_z);
    let terms: Vec<(C64, Mat<C64>, Mat<C64>)> = vec![
        (k.j1, sp.clone(), sm.clone()),
        (k.j1t, sm.clone(), sp.clone()),
        (k.j2, sp * sz, sm * sz),
        (k.j2t, sz * sm, sz * sp),
        (k.j3, sp * sp, sm * sm),
        (k.j3t, sm * sm, sp * sp),
        (k.j4, sp * sz, sm.clone()),
        (k.j4t, sz * sm, sp.clone()),
        (k.j5, sp.clone(), sm * sz),
        (k.j5t, sm.clone(), sz * sp),
        (k.h1, sz.clone(), id.clone()),
        (k.h1, id.clone(), sz.clone()),
        (k.h2, sz * sz, id.clone()),
        (k.h2, id.clone(), sz * sz),
        (k.delta1, sz.clone(), sz.clone()),
        (k.delta2, sz * sz, sz * sz),
        (k.delta3, sz * sz, sz.clone()),
        (k.delta4, sz.clone(), sz * sz),
    ];
    let mut h = Mat::zeros(9, 9);
    for (coef, a, b) in terms {
        h += faer::scale(coef) * kron(&a, &b);
    }
    h
}

fn permutation9() -> Mat<C64> {
    Mat::from_fn(9, 9, |r, col| {
        if r == (col % 3) * 3 + col / 3 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `P · dL/dλ(0)` by central differences with one Richardson level at base step `step`.
pub fn two_site_from_log_derivative_step(branch: BranchId, params: &BranchParams, step: f64) -> Result<Mat<C64>> {
    let diff = |h: f64| -> Result<Mat<C64>> {
        let up = l_operator(&make_weights(branch, params, c(h, 0.0))?).matrix();
        let dn = l_operator(&make_weights(branch, params, c(-h, 0.0))?).matrix();
        Ok(faer::scale(c(1.0 / (2.0 * h), 0.0)) * (up - dn))
    };
    let d = diff(step)?;
    let d2 = diff(step / 2.0)?;
    let rich = faer::scale(c(4.0 / 3.0, 0.0)) * d2 - faer::scale(c(1.0 / 3.0, 0.0)) * d;
    Ok(&permutation9() * &rich)
}

/// `P · dL/dλ(0)` at the default step.
pub fn two_site_from_log_derivative(branch: BranchId, params: &BranchParams) -> Result<Mat<C64>> {
    two_site_from_log_derivative_step(branch, params, DERIVATIVE_STEP)
}

fn bond_triplets(local: &Mat<C64>, states: &[usize], chain_length: usize, j0: C64, index: impl Fn(usize) -> usize) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for (col, &s) in states.iter().enumerate() {
        let d = SectorBasis::digits(s, chain_length);
        for i in 0..chain_length {
            let k = (i + 1) % chain_length;
            let input = d[i] * 3 + d[k];
            for r in 0..9 {
                let v = local.read(r, input);
                if v == c(0.0, 0.0) {
                    continue;
                }
                let mut e = d.clone();
                e[i] = r / 3;
                e[k] = r % 3;
                out.push((index(SectorBasis::from_digits(&e)), col, j0 * v));
            }
        }
    }
    out
}

/// Periodic chain `J0 Σ_i h_{i,i+1}` on the full space, sparse.
pub fn chain_operator(local: &Mat<C64>, chain_length: usize, j0: C64, budget: &Budget) -> Result<LinearOperator> {
    let dim = budget.check_chain(chain_length, false)?;
    let states: Vec<usize> = (0..dim).collect();
    Ok(LinearOperator::from_triplets(dim, dim, bond_triplets(local, &states, chain_length, j0, |s| s)))
}

/// Periodic chain restricted to one charge sector, sparse.
pub fn chain_sector(local: &Mat<C64>, j0: C64, sector: &SectorBasis) -> LinearOperator {
    let n = sector.len();
    let t = bond_triplets(local, &sector.states, sector.chain_length, j0, |s| {
        sector.index_of(s).expect("two-site term conserves charge")
    });
    LinearOperator::from_triplets(n, n, t)
}

/// Chain Hamiltonian assembled from the coupling table.
pub fn hamiltonian_from_couplings(branch: BranchId, params: &BranchParams, chain_length: usize) -> Result<LinearOperator> {
    let local = two_site_from_couplings(&coupling_table(branch, params)?);
    chain_operator(&local, chain_length, params.j0, &Budget::from_env()?)
}

/// Chain Hamiltonian assembled from the logarithmic derivative of the transfer matrix.
pub fn hamiltonian_from_log_derivative(branch: BranchId, params: &BranchParams, chain_length: usize) -> Result<LinearOperator> {
    let local = two_site_from_log_derivative(branch, params)?;
    chain_operator(&local, chain_length, params.j0, &Budget::from_env()?)
}

/// Least-squares fit of a difference onto `{1, Σ Sz, Σ Sz²}` and what is left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionFit {
    pub identity: C64,
    pub sz: C64,
    pub sz2: C64,
    /// Largest entry of the difference after subtracting the fit.
    pub residual: f64,
}

/// Compare two chain operators modulo the chemical-potential span.
pub fn chemical_potential_residual(a: &LinearOperator, b: &LinearOperator, chain_length: usize) -> Result<ProjectionFit> {
    let diff = a.sub(b).to_sparse();
    let n = diff.dim_row;
    let mut offdiag = 0.0f64;
    let mut diag = vec![c(0.0, 0.0); n];
    for (r, col, v) in diff.triplets() {
        if r == col {
            diag[r] = v;
        } else {
            offdiag = offdiag.max(v.norm());
        }
    }
    let features = |s: usize| {
        let d = SectorBasis::digits(s, chain_length);
        let sz: f64 = d.iter().map(|&x| 1.0 - x as f64).sum();
        let sz2: f64 = d.iter().map(|&x| (1.0 - x as f64).powi(2)).sum();
        [1.0, sz, sz2]
    };
    let design = Mat::from_fn(n, 3, |i, j| c(features(i)[j], 0.0));
    let rhs = Mat::from_fn(n, 1, |i, _| diag[i]);
    let coef = design.qr().solve_lstsq(&rhs);
    let mut resid = offdiag;
    for (i, d) in diag.iter().enumerate() {
        let f = features(i);
        let fit = coef.read(0, 0) * f[0] + coef.read(1, 0) * f[1] + coef.read(2, 0) * f[2];
        resid = resid.max((d - fit).norm());
    }
    Ok(ProjectionFit { identity: coef.read(0, 0), sz: coef.read(1, 0), sz2: coef.read(2, 0), residual: resid })
}

/// Total `Sz` on `L` sites, diagonal sparse.
pub fn total_sz(chain_length: usize) -> LinearOperator {
    let dim = 3usize.pow(chain_length as u32);
    LinearOperator::from_triplets(
        dim,
        dim,
        (0..dim).map(|s| (s, s, c(SectorBasis::sz_of(s, chain_length) as f64, 0.0))).collect(),
    )
}

