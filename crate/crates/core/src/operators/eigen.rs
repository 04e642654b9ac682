use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::{c, Error, Result, C64};

use super::basis::{Budget, SectorBasis};
use super::linear::LinearOperator;

/// Eigenvalue algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Dense => "dense",
            Method::Iterative => "iterative",
        })
    }
}

/// Eigenvalues sorted by ascending real part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<C64>,
    /// `‖Av − μv‖ / ‖v‖` per value; reported by the iterative method.
    pub residuals: Option<Vec<f64>>,
    pub method: Method,
    pub iterations: usize,
}

impl Spectrum {
    pub fn lowest(&self) -> C64 {
        self.values[0]
    }

    /// Largest imaginary part in modulus.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// Options of the restarted Krylov solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    pub subspace: usize,
    pub max_restarts: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions { subspace: 0, max_restarts: 400, tol: 1e-11, seed: 0x5eed }
    }
}

fn sort_by_real(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All eigenvalues of a dense matrix, sorted by real part.
pub fn dense_eigenvalues(m: &Mat<C64>) -> Vec<C64> {
    let mut v: Vec<C64> = m.eigenvalues::<C64>();
    sort_by_real(&mut v);
    v
}

/// Eigenvalues of `op`, optionally restricted to a charge sector.
///
/// The dense method returns all eigenvalues (the first `k` when `k > 0`); the iterative
/// method returns the `k` with smallest real part.
pub fn eigenspectrum(op: &LinearOperator, sector: Option<&SectorBasis>, method: Method, k: usize) -> Result<Spectrum> {
    eigenspectrum_with(op, sector, method, k, &Budget::from_env()?, &KrylovOptions::default())
}

pub fn eigenspectrum_with(
    op: &LinearOperator,
    sector: Option<&SectorBasis>,
    method: Method,
    k: usize,
    budget: &Budget,
    opts: &KrylovOptions,
) -> Result<Spectrum> {
    let block = match sector {
        Some(s) if s.len() != op.dim_row => op.block(s),
        _ => op.clone(),
    };
    match method {
        Method::Dense => {
            budget.check_dense(block.dim_row)?;
            let mut values = dense_eigenvalues(&block.matrix());
            if k > 0 {
                values.truncate(k);
            }
            Ok(Spectrum { values, residuals: None, method, iterations: 0 })
        }
        Method::Iterative => krylov_schur(&block, k.max(1), opts),
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn combine(basis: &[Vec<C64>], coef: impl Fn(usize) -> C64) -> Vec<C64> {
    let n = basis[0].len();
    let mut out = vec![c(0.0, 0.0); n];
    for (j, v) in basis.iter().enumerate() {
        let a = coef(j);
        if a != c(0.0, 0.0) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += a * x;
            }
        }
    }
    out
}

/// Orthogonalize `v` against `basis` twice; returns `None` if nothing is left.
fn orthonormalize(basis: &[Vec<C64>], mut v: Vec<C64>) -> Option<Vec<C64>> {
    let start = norm(&v);
    for _ in 0..2 {
        for b in basis {
            let p = dot(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
    let nv = norm(&v);
    if nv <= 1e-12 * start.max(1e-300) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Some(v)
}

/// Thick-restart Krylov iteration keeping the Ritz vectors with smallest real part.
pub fn krylov_schur(a: &LinearOperator, k: usize, opts: &KrylovOptions) -> Result<Spectrum> {
    let n = a.dim_row;
    let m = if opts.subspace > 0 { opts.subspace } else { (2 * k + 30).max(40) }.min(n);
    if m >= n || n <= 64 {
        let mut values = dense_eigenvalues(&a.matrix());
        values.truncate(k);
        let residuals = Some(vec![0.0; values.len()]);
        return Ok(Spectrum { values, residuals, method: Method::Iterative, iterations: 0 });
    }
    let mut rng = SplitMix64::seed_from_u64(opts.seed);
    let mut random = || -> Vec<C64> { (0..n).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect() };
    let mut v: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let mut w: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let first = orthonormalize(&[], random()).expect("random start vector");
    w.push(a.apply(&first));
    v.push(first);
    let mut best = f64::INFINITY;
    for restart in 0..opts.max_restarts {
        while v.len() < m {
            let cand = w.last().unwrap().clone();
            let next = match orthonormalize(&v, cand) {
                Some(x) => x,
                None => orthonormalize(&v, random()).ok_or(Error::NoConvergence { iterations: restart, residual: best })?,
            };
            w.push(a.apply(&next));
            v.push(next);
        }
        let p = v.len();
        let h = Mat::from_fn(p, p, |i, j| dot(&v[i], &w[j]));
        let evd = h.eigendecomposition::<C64>();
        let s = evd.s().column_vector();
        let u = evd.u();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| s.read(i).re.total_cmp(&s.read(j).re).then(s.read(i).im.total_cmp(&s.read(j).im)));
        let mut values = Vec::with_capacity(k);
        let mut residuals = Vec::with_capacity(k);
        let mut worst_vec = None;
        let mut worst = 0.0f64;
        for &i in order.iter().take(k) {
            let theta = s.read(i);
            let x = combine(&v, |j| u.read(j, i));
            let ax = combine(&w, |j| u.read(j, i));
            let r: Vec<C64> = ax.iter().zip(&x).map(|(p, q)| p - theta * q).collect();
            let rel = norm(&r) / norm(&x);
            values.push(theta);
            residuals.push(rel);
            let scaled = rel / theta.norm().max(1.0);
            if scaled > worst {
                worst = scaled;
                worst_vec = Some(r);
            }
        }
        best = best.min(worst);
        if worst <= opts.tol {
            return Ok(Spectrum { values, residuals: Some(residuals), method: Method::Iterative, iterations: restart + 1 });
        }
        let keep = (k + (m - k) / 2).min(m - 1);
        let mut kept: Vec<Vec<C64>> = Vec::with_capacity(keep);
        for &i in order.iter().take(keep) {
            let y: Vec<C64> = (0..p).map(|j| u.read(j, i)).collect();
            if let Some(q) = orthonormalize(&kept, y) {
                kept.push(q);
            }
        }
        let nv: Vec<Vec<C64>> = kept.iter().map(|q| combine(&v, |j| q[j])).collect();
        let nw: Vec<Vec<C64>> = kept.iter().map(|q| combine(&w, |j| q[j])).collect();
        v = nv;
        w = nw;
        if let Some(next) = worst_vec.and_then(|r| orthonormalize(&v, r)) {
            w.push(a.apply(&next));
            v.push(next);
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_restarts, residual: best })
}
