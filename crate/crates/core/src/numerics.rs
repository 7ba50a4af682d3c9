//! Small complex linear algebra: dense and sparse matrices, Frobenius norm,
//! and largest singular values by power iteration on the Gram operator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 10_000;
/// Seed of the deterministic perturbation used by [`power_iteration`].
pub const PERTURBATION_SEED: u64 = 0x5EED;
/// Consecutive small Rayleigh-quotient changes required for convergence.
pub const CONVERGENCE_STREAK: usize = 5;

// Rows per rayon task in sparse products; below this the product is serial.
const PAR_ROW_CHUNK: usize = 4096;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.data[r * self.cols + c] = z;
    }

    pub fn conj_transpose(&self) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).conj());
            }
        }
        DenseMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn scale(&self, s: Complex64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Block-diagonal matrix from the given blocks.
    pub fn block_diagonal(blocks: &[DenseMatrix]) -> Result<DenseMatrix> {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = DenseMatrix::zeros(rows, cols)?;
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Compressed-sparse-row complex matrix with a transposed copy for adjoint
/// products.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<Complex64>,
    // CSR of the transpose (values not conjugated).
    t_ptr: Vec<usize>,
    t_idx: Vec<usize>,
    t_vals: Vec<Complex64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("sparse matrix dimensions must be positive"));
        }
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= rows || *c >= cols) {
            return Err(Error::invalid(format!("entry ({r}, {c}) outside {rows}x{cols}")));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2 != Complex64::new(0.0, 0.0));

        let (row_ptr, col_idx, vals) = compress(rows, merged.iter().map(|&(r, c, v)| (r, c, v)));
        let mut transposed: Vec<(usize, usize, Complex64)> =
            merged.iter().map(|&(r, c, v)| (c, r, v)).collect();
        transposed.sort_by_key(|&(r, c, _)| (r, c));
        let (t_ptr, t_idx, t_vals) = compress(cols, transposed.into_iter());
        Ok(SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
            t_ptr,
            t_idx,
            t_vals,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Iterates `(row, col, value)` over stored entries in row order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.vals[k]))
        })
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let mut m = DenseMatrix::zeros(self.rows, self.cols)?;
        for (r, c, v) in self.entries() {
            m.set(r, c, v);
        }
        Ok(m)
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        let mut t = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = m.get(r, c);
                if v != Complex64::new(0.0, 0.0) {
                    t.push((r, c, v));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), t)
    }

    /// Sub-block of the given rows and columns; indices must be sorted.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMatrix> {
        let mut m = DenseMatrix::zeros(rows.len(), cols.len())?;
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        Ok(m)
    }
}

fn compress(
    rows: usize,
    sorted: impl Iterator<Item = (usize, usize, Complex64)>,
) -> (Vec<usize>, Vec<usize>, Vec<Complex64>) {
    let mut ptr = vec![0usize; rows + 1];
    let mut idx = Vec::new();
    let mut vals = Vec::new();
    for (r, c, v) in sorted {
        ptr[r + 1] += 1;
        idx.push(c);
        vals.push(v);
    }
    for r in 0..rows {
        ptr[r + 1] += ptr[r];
    }
    (ptr, idx, vals)
}

fn csr_apply(ptr: &[usize], idx: &[usize], vals: &[Complex64], conj: bool, x: &[Complex64], y: &mut [Complex64]) {
    let row = |r: usize| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in ptr[r]..ptr[r + 1] {
            let v = if conj { vals[k].conj() } else { vals[k] };
            acc += v * x[idx[k]];
        }
        acc
    };
    if y.len() < 2 * PAR_ROW_CHUNK {
        for (r, out) in y.iter_mut().enumerate() {
            *out = row(r);
        }
    } else {
        // Each row is reduced sequentially, so the result does not depend
        // on scheduling.
        y.par_chunks_mut(PAR_ROW_CHUNK)
            .enumerate()
            .for_each(|(chunk, ys)| {
                let base = chunk * PAR_ROW_CHUNK;
                for (i, out) in ys.iter_mut().enumerate() {
                    *out = row(base + i);
                }
            });
    }
}

/// A linear map that can apply itself and its adjoint.
pub trait LinearMap: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl LinearMap for SparseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        csr_apply(&self.row_ptr, &self.col_idx, &self.vals, false, x, y);
    }
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        csr_apply(&self.t_ptr, &self.t_idx, &self.t_vals, true, x, y);
    }
}

impl LinearMap for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *out = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
    fn apply_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        for out in y.iter_mut() {
            *out = Complex64::new(0.0, 0.0);
        }
        for r in 0..self.rows {
            let xr = x[r];
            for c in 0..self.cols {
                y[c] += self.data[r * self.cols + c].conj() * xr;
            }
        }
    }
}

/// Result of a power iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEstimate {
    /// Estimate of the largest singular value.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// splitmix64 stream, used for the deterministic perturbation vector.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Start vector: all ones plus a splitmix perturbation of amplitude 1/8 per
/// entry, normalised. The perturbation keeps the start vector off any
/// symmetry subspace the all-ones vector may lie in.
pub fn start_vector(n: usize) -> Vec<Complex64> {
    let mut rng = SplitMix64::new(PERTURBATION_SEED);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(1.0 + 0.125 * rng.next_signed_unit(), 0.0))
        .collect();
    normalize(&mut v);
    v
}

fn pure_perturbation(n: usize) -> Vec<Complex64> {
    let mut rng = SplitMix64::new(PERTURBATION_SEED ^ 0xFFFF);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.next_signed_unit(), rng.next_signed_unit()))
        .collect();
    normalize(&mut v);
    v
}

/// Largest singular value of `op` by power iteration on `op* op`.
///
/// Converged when the relative change of the Rayleigh quotient stays below
/// `tol` for [`CONVERGENCE_STREAK`] consecutive iterations. If the iterate
/// is annihilated, the iteration restarts once from a pure splitmix vector.
/// The returned value never exceeds the true norm (up to rounding): it is
/// the square root of a Rayleigh quotient of `op* op`.
pub fn power_iteration<M: LinearMap + ?Sized>(op: &M, tol: f64, max_iters: usize) -> Result<SpectralEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let n = op.ncols();
    if n == 0 || op.nrows() == 0 {
        return Err(Error::invalid("power iteration on an empty operator"));
    }
    let mut x = start_vector(n);
    let mut y = vec![Complex64::new(0.0, 0.0); op.nrows()];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut restarted = false;
    let mut best = 0.0f64;
    let mut prev = f64::NAN;
    let mut streak = 0;

    for it in 1..=max_iters {
        op.apply(&x, &mut y);
        // Rayleigh quotient of the Gram operator at the unit vector x.
        let rq = y.iter().map(|v| v.norm_sqr()).sum::<f64>();
        op.apply_adjoint(&y, &mut z);
        let zn = normalize(&mut z);
        best = best.max(rq);
        if zn == 0.0 {
            if restarted {
                return Ok(SpectralEstimate {
                    value: 0.0,
                    converged: true,
                    iterations: it,
                });
            }
            restarted = true;
            x = pure_perturbation(n);
            prev = f64::NAN;
            streak = 0;
            continue;
        }
        std::mem::swap(&mut x, &mut z);
        if (rq - prev).abs() <= tol * rq.abs() {
            streak += 1;
            if streak >= CONVERGENCE_STREAK {
                return Ok(SpectralEstimate {
                    value: best.sqrt(),
                    converged: true,
                    iterations: it,
                });
            }
        } else {
            streak = 0;
        }
        prev = rq;
    }
    Ok(SpectralEstimate {
        value: best.sqrt(),
        converged: false,
        iterations: max_iters,
    })
}

/// Largest singular value of a dense matrix.
///
/// Iterates on the Gram matrix of the smaller side, formed explicitly.
pub fn spectral_norm(m: &DenseMatrix, tol: f64, max_iters: usize) -> Result<SpectralEstimate> {
    let gram = if m.rows() < m.cols() {
        m.matmul(&m.conj_transpose())?
    } else {
        m.conj_transpose().matmul(m)?
    };
    let est = gram_power_iteration(&gram, tol, max_iters)?;
    Ok(SpectralEstimate {
        value: est.value.sqrt(),
        ..est
    })
}

// Top eigenvalue of a Hermitian positive semidefinite matrix; same start
// vector and stopping rule as `power_iteration`.
fn gram_power_iteration(g: &DenseMatrix, tol: f64, max_iters: usize) -> Result<SpectralEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let n = g.rows();
    let mut x = start_vector(n);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    let mut restarted = false;
    let mut best = 0.0f64;
    let mut prev = f64::NAN;
    let mut streak = 0;
    for it in 1..=max_iters {
        g.apply(&x, &mut y);
        let rq = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        best = best.max(rq);
        let yn = normalize(&mut y);
        if yn == 0.0 {
            if restarted {
                return Ok(SpectralEstimate {
                    value: 0.0,
                    converged: true,
                    iterations: it,
                });
            }
            restarted = true;
            x = pure_perturbation(n);
            prev = f64::NAN;
            streak = 0;
            continue;
        }
        std::mem::swap(&mut x, &mut y);
        if (rq - prev).abs() <= tol * rq.abs() {
            streak += 1;
            if streak >= CONVERGENCE_STREAK {
                return Ok(SpectralEstimate {
                    value: best,
                    converged: true,
                    iterations: it,
                });
            }
        } else {
            streak = 0;
        }
        prev = rq;
    }
    Ok(SpectralEstimate {
        value: best,
        converged: false,
        iterations: max_iters,
    })
}

pub fn frobenius(m: &DenseMatrix) -> f64 {
    m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn norm(m: &DenseMatrix) -> f64 {
        spectral_norm(m, 1e-13, 100_000).unwrap().value
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((norm(&DenseMatrix::identity(3).unwrap()) - 1.0).abs() < 1e-12);
        let diag = DenseMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, -2.0]]).unwrap();
        assert!((norm(&diag) - 3.0).abs() < 1e-9);
        let nil = DenseMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((norm(&nil) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_zero_norm() {
        let z = DenseMatrix::zeros(3, 2).unwrap();
        let est = spectral_norm(&z, 1e-10, 100).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn invalid_inputs() {
        assert!(DenseMatrix::new(0, 3, vec![]).is_err());
        assert!(DenseMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(spectral_norm(&DenseMatrix::identity(2).unwrap(), 0.0, 10).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert!((frobenius(&DenseMatrix::identity(4).unwrap()) - 2.0).abs() < 1e-15);
        // rank one u v*: |u| |v|
        let u = [1.0, 2.0];
        let v = [3.0, 0.0, 4.0];
        let rows: Vec<Vec<Complex64>> = u.iter().map(|a| v.iter().map(|b| c(a * b)).collect()).collect();
        let m = DenseMatrix::from_rows(rows).unwrap();
        assert!((frobenius(&m) - 5f64.sqrt() * 5.0).abs() < 1e-12);
        assert!((norm(&m) - 5f64.sqrt() * 5.0).abs() < 1e-9);
    }

    #[test]
    fn sparse_and_dense_agree() {
        let m = DenseMatrix::from_rows(vec![
            vec![c(1.0), Complex64::new(0.0, 2.0), c(0.0)],
            vec![c(0.0), c(0.0), c(-1.5)],
        ])
        .unwrap();
        let s = SparseMatrix::from_dense(&m).unwrap();
        assert_eq!(s.nnz(), 3);
        assert_eq!(s.to_dense().unwrap(), m);
        let a = power_iteration(&s, 1e-13, 10_000).unwrap().value;
        let b = power_iteration(&m, 1e-13, 10_000).unwrap().value;
        assert!((a - b).abs() < 1e-10);
        assert!((a - norm(&m)).abs() < 1e-9);
    }

    #[test]
    fn triplets_are_merged() {
        let s = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0)), (0, 1, c(2.0)), (1, 0, c(1.0)), (1, 0, c(-1.0))]).unwrap();
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(0, 1), c(3.0));
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, c(1.0))]).is_err());
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(PERTURBATION_SEED);
        let mut b = SplitMix64::new(PERTURBATION_SEED);
        for _ in 0..10 {
            let x = a.next_signed_unit();
            assert_eq!(x, b.next_signed_unit());
            assert!((-1.0..1.0).contains(&x));
        }
    }
}
