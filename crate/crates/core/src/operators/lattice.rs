use std::collections::HashMap;

use faer::Mat;

use crate::relations::SlotAlgebra;
use crate::weights::{make_weights, BranchId, BranchParams, WeightName, WeightSet};
use crate::{Result, C64};

use super::basis::{Budget, SectorBasis};
use super::linear::{max_abs, max_diff, LinearOperator};

/// Requested storage of an assembled operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Representation {
    Dense,
    #[default]
    Sparse,
}

/// Positions of the nineteen nonzero entries: weight name, row and column in the
/// auxiliary ⊗ quantum product, auxiliary factor slowest.
pub fn l_operator_pattern() -> Vec<(WeightName, usize, usize)> {
    SlotAlgebra::pt_invariant()
        .entries
        .into_iter()
        .map(|(n, [a, b, c, d])| (n, a * 3 + c, b * 3 + d))
        .collect()
}

/// The 9×9 operator `Σ w · e_ab ⊗ e_cd`.
pub fn l_operator(w: &WeightSet) -> LinearOperator {
    let mut m = Mat::zeros(9, 9);
    for (n, r, c) in l_operator_pattern() {
        m.write(r, c, w.get(n));
    }
    LinearOperator::dense(m)
}

/// The R-matrix has the same form as the L-operator.
pub fn r_matrix(w: &WeightSet) -> LinearOperator {
    l_operator(w)
}

/// Embed a two-leg operator acting on legs `(i, j)` into three legs, leg 0 slowest.
pub fn embed_three(m: &Mat<C64>, i: usize, j: usize) -> Mat<C64> {
    let digits = |x: usize| [x / 9, (x / 3) % 3, x % 3];
    Mat::from_fn(27, 27, |r, c| {
        let (dr, dc) = (digits(r), digits(c));
        let k = 3 - i - j;
        if dr[k] != dc[k] {
            return C64::new(0.0, 0.0);
        }
        m.read(dr[i] * 3 + dr[j], dc[i] * 3 + dc[j])
    })
}

/// `R12 L13 L23 − L23 L13 R12` for explicit weight sets.
pub fn ybe_residual_matrix(w0: &WeightSet, w1: &WeightSet, w2: &WeightSet) -> (Mat<C64>, Mat<C64>) {
    let r12 = embed_three(&l_operator(w0).matrix(), 0, 1);
    let l13 = embed_three(&l_operator(w1).matrix(), 0, 2);
    let l23 = embed_three(&l_operator(w2).matrix(), 1, 2);
    let lhs = &(&r12 * &l13) * &l23;
    let rhs = &(&l23 * &l13) * &r12;
    (lhs, rhs)
}

/// Normalized YBE residual for explicit weight sets.
pub fn ybe_residual_weights(w0: &WeightSet, w1: &WeightSet, w2: &WeightSet) -> f64 {
    let (lhs, rhs) = ybe_residual_matrix(w0, w1, w2);
    let scale = max_abs(&lhs);
    let d = max_diff(&lhs, &rhs);
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Normalized YBE residual with `R(λ1 − λ2)`, `L(λ1)`, `L(λ2)` from one branch.
pub fn ybe_residual(branch: BranchId, params: &BranchParams, lambda1: C64, lambda2: C64) -> Result<f64> {
    let w0 = make_weights(branch, params, lambda1 - lambda2)?;
    let w1 = make_weights(branch, params, lambda1)?;
    let w2 = make_weights(branch, params, lambda2)?;
    Ok(ybe_residual_weights(&w0, &w1, &w2))
}

/// For each `(column auxiliary, row site)` the reachable `(row auxiliary, column site, weight)`.
fn transfer_table(w: &WeightSet) -> Vec<Vec<(usize, usize, C64)>> {
    let mut table = vec![Vec::new(); 9];
    for (n, [a, b, c, d]) in SlotAlgebra::pt_invariant().entries {
        let v = w.get(n);
        if v != C64::new(0.0, 0.0) {
            table[b * 3 + c].push((a, d, v));
        }
    }
    table
}

fn transfer_row(table: &[Vec<(usize, usize, C64)>], row: &[usize], out: &mut HashMap<usize, C64>) {
    for a in 0..3 {
        let mut frontier: HashMap<(usize, usize), C64> = HashMap::from([((a, 0), C64::new(1.0, 0.0))]);
        for &s in row {
            let mut next: HashMap<(usize, usize), C64> = HashMap::new();
            for (&(x, col), &w) in &frontier {
                for &(x2, d, v) in &table[x * 3 + s] {
                    *next.entry((x2, col * 3 + d)).or_default() += w * v;
                }
            }
            frontier = next;
        }
        for ((x, col), w) in frontier {
            if x == a {
                *out.entry(col).or_default() += w;
            }
        }
    }
}

/// Periodic transfer matrix `tr_a L_{aL}(λ) ⋯ L_{a1}(λ)` for explicit weights.
pub fn transfer_matrix_weights(w: &WeightSet, chain_length: usize, repr: Representation, budget: &Budget) -> Result<LinearOperator> {
    let dim = budget.check_chain(chain_length, repr == Representation::Dense)?;
    let table = transfer_table(w);
    let mut triplets = Vec::new();
    let mut acc = HashMap::new();
    for r in 0..dim {
        acc.clear();
        transfer_row(&table, &SectorBasis::digits(r, chain_length), &mut acc);
        triplets.extend(acc.iter().map(|(&c, &v)| (r, c, v)));
    }
    let op = LinearOperator::from_triplets(dim, dim, triplets);
    Ok(match repr {
        Representation::Dense => op.to_dense(),
        Representation::Sparse => op,
    })
}

/// Periodic transfer matrix of a branch at spectral parameter `lambda`.
pub fn transfer_matrix(
    branch: BranchId,
    params: &BranchParams,
    lambda: C64,
    chain_length: usize,
    repr: Representation,
) -> Result<LinearOperator> {
    let w = make_weights(branch, params, lambda)?;
    transfer_matrix_weights(&w, chain_length, repr, &Budget::from_env()?)
}

/// The transfer matrix restricted to one charge sector.
pub fn transfer_sector(w: &WeightSet, sector: &SectorBasis) -> LinearOperator {
    let table = transfer_table(w);
    let n = sector.len();
    let mut triplets = Vec::new();
    let mut acc = HashMap::new();
    for (i, &s) in sector.states.iter().enumerate() {
        acc.clear();
        transfer_row(&table, &SectorBasis::digits(s, sector.chain_length), &mut acc);
        triplets.extend(acc.iter().map(|(&c, &v)| (i, sector.index_of(c).expect("charge is conserved"), v)));
    }
    LinearOperator::from_triplets(n, n, triplets)
}
