use std::io::{Read, Write};

use faer::Mat;
use rayon::prelude::*;

use crate::{Error, Result, C64};

use super::basis::SectorBasis;

const MAGIC: &[u8; 8] = b"VLAB-OP1";

/// Dense or sparse complex matrix.
#[derive(Clone, Debug)]
pub enum Storage {
    Dense(Mat<C64>),
    /// Triplets sorted by `(row, col)` with no duplicates.
    Sparse(Vec<(usize, usize, C64)>),
}

/// A complex matrix with explicit dimensions.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    pub dim_row: usize,
    pub dim_col: usize,
    pub storage: Storage,
}

impl LinearOperator {
    pub fn dense(m: Mat<C64>) -> Self {
        LinearOperator { dim_row: m.nrows(), dim_col: m.ncols(), storage: Storage::Dense(m) }
    }

    pub fn zeros(dim_row: usize, dim_col: usize) -> Self {
        Self::dense(Mat::zeros(dim_row, dim_col))
    }

    pub fn identity(n: usize) -> Self {
        Self::dense(Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
    }

    /// Sparse operator from unsorted triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(dim_row: usize, dim_col: usize, mut t: Vec<(usize, usize, C64)>) -> Self {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut out: Vec<(usize, usize, C64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        out.retain(|e| e.2 != C64::new(0.0, 0.0));
        LinearOperator { dim_row, dim_col, storage: Storage::Sparse(out) }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m.read(i, j),
            Storage::Sparse(t) => t
                .binary_search_by_key(&(i, j), |&(r, c, _)| (r, c))
                .map_or(C64::new(0.0, 0.0), |k| t[k].2),
        }
    }

    pub fn to_dense(&self) -> LinearOperator {
        match &self.storage {
            Storage::Dense(_) => self.clone(),
            Storage::Sparse(t) => {
                let mut m = Mat::zeros(self.dim_row, self.dim_col);
                for &(r, c, v) in t {
                    m.write(r, c, v);
                }
                Self::dense(m)
            }
        }
    }

    pub fn to_sparse(&self) -> LinearOperator {
        match &self.storage {
            Storage::Sparse(_) => self.clone(),
            Storage::Dense(m) => {
                let mut t = Vec::new();
                for r in 0..self.dim_row {
                    for c in 0..self.dim_col {
                        let v = m.read(r, c);
                        if v != C64::new(0.0, 0.0) {
                            t.push((r, c, v));
                        }
                    }
                }
                LinearOperator { dim_row: self.dim_row, dim_col: self.dim_col, storage: Storage::Sparse(t) }
            }
        }
    }

    /// The dense matrix, converting if needed.
    pub fn matrix(&self) -> Mat<C64> {
        match self.to_dense().storage {
            Storage::Dense(m) => m,
            Storage::Sparse(_) => unreachable!(),
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match self.to_sparse().storage {
            Storage::Sparse(t) => t,
            Storage::Dense(_) => unreachable!(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Sparse(t) => t.len(),
            Storage::Dense(_) => self.triplets().len(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => {
                let mut best = 0.0f64;
                for j in 0..m.ncols() {
                    for i in 0..m.nrows() {
                        best = best.max(m.read(i, j).norm());
                    }
                }
                best
            }
            Storage::Sparse(t) => t.iter().map(|e| e.2.norm()).fold(0.0, f64::max),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim_row.min(self.dim_col)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: C64) -> LinearOperator {
        match &self.storage {
            Storage::Dense(m) => Self::dense(Mat::from_fn(m.nrows(), m.ncols(), |i, j| s * m.read(i, j))),
            Storage::Sparse(t) => {
                Self::from_triplets(self.dim_row, self.dim_col, t.iter().map(|&(r, c, v)| (r, c, s * v)).collect())
            }
        }
    }

    /// `self − other`, sparse when both are sparse.
    pub fn sub(&self, other: &LinearOperator) -> LinearOperator {
        assert_eq!((self.dim_row, self.dim_col), (other.dim_row, other.dim_col));
        match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                let t = a.iter().copied().chain(b.iter().map(|&(r, c, v)| (r, c, -v))).collect();
                Self::from_triplets(self.dim_row, self.dim_col, t)
            }
            _ => {
                let (a, b) = (self.matrix(), other.matrix());
                Self::dense(Mat::from_fn(self.dim_row, self.dim_col, |i, j| a.read(i, j) - b.read(i, j)))
            }
        }
    }

    /// Dense product.
    pub fn matmul(&self, other: &LinearOperator) -> LinearOperator {
        assert_eq!(self.dim_col, other.dim_row);
        Self::dense(&self.matrix() * &other.matrix())
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &LinearOperator) -> LinearOperator {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn adjoint(&self) -> LinearOperator {
        match &self.storage {
            Storage::Dense(m) => Self::dense(Mat::from_fn(m.ncols(), m.nrows(), |i, j| m.read(j, i).conj())),
            Storage::Sparse(t) => {
                Self::from_triplets(self.dim_col, self.dim_row, t.iter().map(|&(r, c, v)| (c, r, v.conj())).collect())
            }
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim_col);
        match &self.storage {
            Storage::Dense(m) => (0..self.dim_row)
                .into_par_iter()
                .map(|i| (0..self.dim_col).map(|j| m.read(i, j) * x[j]).sum())
                .collect(),
            Storage::Sparse(t) => {
                let mut y = vec![C64::new(0.0, 0.0); self.dim_row];
                for &(r, c, v) in t {
                    y[r] += v * x[c];
                }
                y
            }
        }
    }

    /// The diagonal block on the states of `sector`.
    pub fn block(&self, sector: &SectorBasis) -> LinearOperator {
        let n = sector.len();
        match &self.storage {
            Storage::Dense(m) => {
                let s = &sector.states;
                Self::dense(Mat::from_fn(n, n, |i, j| m.read(s[i], s[j])))
            }
            Storage::Sparse(t) => {
                let mut out = Vec::new();
                for &(r, c, v) in t {
                    if let (Some(i), Some(j)) = (sector.index_of(r), sector.index_of(c)) {
                        out.push((i, j, v));
                    }
                }
                Self::from_triplets(n, n, out)
            }
        }
    }

    /// Largest entry connecting states of different total `Sz`.
    pub fn charge_violation(&self, length: usize) -> f64 {
        self.triplets()
            .iter()
            .filter(|&&(r, c, _)| SectorBasis::sz_of(r, length) != SectorBasis::sz_of(c, length))
            .map(|e| e.2.norm())
            .fold(0.0, f64::max)
    }

    /// Binary triplet dump: `VLAB-OP1`, `u32` rows, `u32` cols, then `(u64, u64, f64, f64)`
    /// records, all little-endian.
    pub fn write_dump(&self, mut w: impl Write) -> Result<()> {
        let dims = |d: usize| u32::try_from(d).map_err(|_| Error::Config(format!("dimension {d} exceeds u32")));
        w.write_all(MAGIC)?;
        w.write_all(&dims(self.dim_row)?.to_le_bytes())?;
        w.write_all(&dims(self.dim_col)?.to_le_bytes())?;
        for (r, c, v) in self.triplets() {
            w.write_all(&(r as u64).to_le_bytes())?;
            w.write_all(&(c as u64).to_le_bytes())?;
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump(mut r: impl Read) -> Result<LinearOperator> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() < 16 || &buf[..8] != MAGIC || (buf.len() - 16) % 32 != 0 {
            return Err(Error::Config("not a VLAB-OP1 dump".into()));
        }
        let u32_at = |k: usize| u32::from_le_bytes(buf[k..k + 4].try_into().unwrap()) as usize;
        let u64_at = |k: usize| u64::from_le_bytes(buf[k..k + 8].try_into().unwrap()) as usize;
        let f64_at = |k: usize| f64::from_le_bytes(buf[k..k + 8].try_into().unwrap());
        let (rows, cols) = (u32_at(8), u32_at(12));
        let t = buf[16..]
            .chunks_exact(32)
            .enumerate()
            .map(|(n, _)| {
                let k = 16 + 32 * n;
                (u64_at(k), u64_at(k + 8), C64::new(f64_at(k + 16), f64_at(k + 24)))
            })
            .collect();
        Ok(Self::from_triplets(rows, cols, t))
    }
}

/// Kronecker product of two dense matrices, first factor slowest.
pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| a.read(i / br, j / bc) * b.read(i % br, j % bc))
}

/// Largest entry of `a − b`.
pub fn max_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            best = best.max((a.read(i, j) - b.read(i, j)).norm());
        }
    }
    best
}

/// Largest entry modulus.
pub fn max_abs(a: &Mat<C64>) -> f64 {
    max_diff(a, &Mat::zeros(a.nrows(), a.ncols()))
}
