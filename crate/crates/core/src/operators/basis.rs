use std::collections::HashMap;

use faer::Mat;

use crate::{Error, Result, C64};

/// Spin-1 matrices in the basis `{+, 0, −}`.
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub s_plus: Mat<C64>,
    pub s_minus: Mat<C64>,
    pub s_z: Mat<C64>,
}

impl Default for SpinMatrices {
    fn default() -> Self {
        Self::new()
    }
}

impl SpinMatrices {
    pub fn new() -> Self {
        let r2 = C64::new(2f64.sqrt(), 0.0);
        let mut s_plus = Mat::zeros(3, 3);
        s_plus.write(0, 1, r2);
        s_plus.write(1, 2, r2);
        let s_minus = Mat::from_fn(3, 3, |i, j| s_plus.read(j, i));
        let s_z = Mat::from_fn(3, 3, |i, j| if i == j { C64::new(1.0 - i as f64, 0.0) } else { C64::new(0.0, 0.0) });
        SpinMatrices { s_plus, s_minus, s_z }
    }

    pub fn identity() -> Mat<C64> {
        Mat::from_fn(3, 3, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }
}

/// Configurations of an `L`-site spin-1 chain with fixed total `Sz`.
///
/// A configuration is the base-3 integer with site 1 as the most significant digit and
/// digit `0, 1, 2` standing for `Sz = +1, 0, −1`.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    pub chain_length: usize,
    pub sz_total: i32,
    pub states: Vec<usize>,
    lookup: HashMap<usize, usize>,
}

impl SectorBasis {
    pub fn new(chain_length: usize, sz_total: i32) -> Self {
        let full = 3usize.pow(chain_length as u32);
        let states: Vec<usize> = (0..full).filter(|&s| Self::sz_of(s, chain_length) == sz_total).collect();
        let lookup = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        SectorBasis { chain_length, sz_total, states, lookup }
    }

    /// All `2L + 1` sectors.
    pub fn all(chain_length: usize) -> Vec<SectorBasis> {
        let l = chain_length as i32;
        (-l..=l).map(|sz| SectorBasis::new(chain_length, sz)).collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: usize) -> Option<usize> {
        self.lookup.get(&state).copied()
    }

    /// Total `Sz` of a configuration.
    pub fn sz_of(mut state: usize, chain_length: usize) -> i32 {
        let mut sz = 0;
        for _ in 0..chain_length {
            sz += 1 - (state % 3) as i32;
            state /= 3;
        }
        sz
    }

    /// Local states of a configuration, site 1 first.
    pub fn digits(mut state: usize, chain_length: usize) -> Vec<usize> {
        let mut d = vec![0; chain_length];
        for k in (0..chain_length).rev() {
            d[k] = state % 3;
            state /= 3;
        }
        d
    }

    pub fn from_digits(d: &[usize]) -> usize {
        d.iter().fold(0, |acc, &x| acc * 3 + x)
    }
}

/// Number of spin-1 configurations with total `Sz` on `L` sites (trinomial coefficient).
pub fn trinomial(chain_length: usize, sz_total: i32) -> u128 {
    let n = chain_length;
    let k = sz_total.unsigned_abs() as usize;
    if k > n {
        return 0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![0u128; row.len() + 2];
        for (i, &v) in row.iter().enumerate() {
            for d in 0..3 {
                next[i + d] += v;
            }
        }
        row = next;
    }
    row[n + k]
}

/// Memory limits for operator construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest sector handled by dense diagonalization.
    pub dense_dim: usize,
    /// Largest full Hilbert space assembled as a dense matrix.
    pub full_dense_dim: usize,
    /// Largest full Hilbert space assembled at all.
    pub sparse_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { dense_dim: 4000, full_dense_dim: 6561, sparse_dim: 59049 }
    }
}

impl Budget {
    /// Defaults, with `VLAB_BUDGET_DIM` overriding the dense cap and raising the sparse cap to match.
    pub fn from_env() -> Result<Self> {
        let mut b = Budget::default();
        if let Ok(v) = std::env::var("VLAB_BUDGET_DIM") {
            b.dense_dim = v.trim().parse().map_err(|_| Error::Config(format!("VLAB_BUDGET_DIM='{v}' is not an integer")))?;
            b.sparse_dim = b.sparse_dim.max(b.dense_dim);
        }
        Ok(b)
    }

    /// Checks a sparse charge-sector block.
    pub fn check_sector(&self, chain_length: usize, sz_total: i32) -> Result<usize> {
        let dim = trinomial(chain_length, sz_total);
        if dim > self.sparse_dim as u128 {
            Err(Error::Budget { requested: usize::try_from(dim).unwrap_or(usize::MAX), cap: self.sparse_dim })
        } else {
            Ok(dim as usize)
        }
    }

    pub fn check_dense(&self, dim: usize) -> Result<()> {
        if dim > self.dense_dim {
            Err(Error::Budget { requested: dim, cap: self.dense_dim })
        } else {
            Ok(())
        }
    }

    /// Checks a full `3^L` space against the dense or sparse cap.
    pub fn check_chain(&self, chain_length: usize, dense: bool) -> Result<usize> {
        let cap = if dense { self.full_dense_dim } else { self.sparse_dim };
        let dim = 3usize.checked_pow(chain_length as u32).unwrap_or(usize::MAX);
        if dim > cap {
            Err(Error::Budget { requested: dim, cap })
        } else {
            Ok(dim)
        }
    }
}
