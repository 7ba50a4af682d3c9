//! Truncated Fock representation.
//!
//! `L^2(x)` has the orthonormal basis `{P_w}`; left multiplication by a
//! polynomial `f` acts on it by the Chebyshev product. Compressing to the
//! words of length at most `D` gives a finite matrix whose norm increases to
//! `||f(x)||` as `D` grows, so power iteration on it yields certified lower
//! estimates of operator norms.
//!
//! The creation-type isometries are `U_I P_K = P_{I K}` and their adjoints
//! `U_J^* P_{J K} = P_K` (zero on words not starting with `J`). In these
//! terms left multiplication by a basis element splits as
//!
//! ```text
//! P_w = sum_{l=0}^{n} U_{w[..n-l]} U_{reverse(w[n-l..])}^*
//! ```

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chebyshev::{mul_basis_words, ChebVector};
use crate::error::{Error, Result};
use crate::numerics::{power_iteration, spectral_norm, SparseMatrix};
use crate::opval::{lex_rank, MatPoly};
use crate::scalar::Scalar;
use crate::word::Word;

/// Default limit on the number of basis words (covers `d = 2, D = 17`).
pub const DEFAULT_BASIS_CAP: usize = 262_144;

/// The words of length at most `D` over `[1, d]` in canonical
/// (length-then-lexicographic) order.
#[derive(Clone, Debug)]
pub struct TruncatedBasis {
    d: usize,
    max_degree: usize,
    // offsets[m] = number of words of length < m.
    offsets: Vec<usize>,
}

impl TruncatedBasis {
    pub fn new(d: usize, max_degree: usize) -> Result<Self> {
        Self::with_cap(d, max_degree, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(d: usize, max_degree: usize, cap: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("number of generators d must be positive"));
        }
        let mut offsets = Vec::with_capacity(max_degree + 2);
        let mut total = 0usize;
        let mut layer = 1usize;
        offsets.push(0);
        for m in 0..=max_degree {
            total = total
                .checked_add(layer)
                .filter(|&t| t <= cap)
                .ok_or_else(|| {
                    Error::resource(format!(
                        "truncated basis for d = {d}, D = {max_degree} exceeds the cap of {cap} words (at length {m})"
                    ))
                })?;
            offsets.push(total);
            layer = layer.saturating_mul(d);
        }
        Ok(TruncatedBasis { d, max_degree, offsets })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn size(&self) -> usize {
        self.offsets[self.max_degree + 1]
    }

    /// Index of a word, or `None` if it is longer than `D`.
    pub fn index_of(&self, letters: &[u32]) -> Option<usize> {
        (letters.len() <= self.max_degree)
            .then(|| self.offsets[letters.len()] + lex_rank(self.d, letters))
    }

    pub fn word_at(&self, index: usize) -> Word {
        let len = self.offsets.partition_point(|&o| o <= index) - 1;
        crate::opval::lex_unrank(self.d, len, index - self.offsets[len])
    }

    /// Indices of the words with length in `[0, m]`.
    pub fn indices_up_to(&self, m: usize) -> std::ops::Range<usize> {
        0..self.offsets[m.min(self.max_degree) + 1]
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.max_degree).flat_map(move |m| Word::all_of_length(self.d, m))
    }
}

/// Compression of left multiplication by a polynomial to a truncated basis.
#[derive(Clone, Debug)]
pub struct LeftMultOperator {
    pub basis: TruncatedBasis,
    pub matrix: SparseMatrix,
}

/// Matrix of `P_K -> f P_K` on words of length at most `D`, dropping output
/// words longer than `D`.
pub fn left_mult_matrix<C: Scalar>(v: &ChebVector<C>, max_degree: usize) -> Result<LeftMultOperator> {
    left_mult_matrix_capped(v, max_degree, DEFAULT_BASIS_CAP)
}

pub fn left_mult_matrix_capped<C: Scalar>(
    v: &ChebVector<C>,
    max_degree: usize,
    cap: usize,
) -> Result<LeftMultOperator> {
    if let Some(deg) = v.degree() {
        if deg > max_degree {
            return Err(Error::invalid(format!(
                "truncation degree {max_degree} is below the polynomial degree {deg}"
            )));
        }
    }
    let basis = TruncatedBasis::with_cap(v.d(), max_degree, cap)?;
    let terms: Vec<(Vec<u32>, Complex64)> = v
        .terms()
        .map(|(w, c)| (w.letters().to_vec(), c.to_c64()))
        .collect();
    let columns: Vec<Vec<(usize, usize, Complex64)>> = (0..basis.size())
        .into_par_iter()
        .map(|col| {
            let k = basis.word_at(col);
            let mut out = Vec::new();
            for (u, c) in &terms {
                mul_basis_words(u, k.letters(), |w| {
                    if let Some(row) = basis.index_of(w.letters()) {
                        out.push((row, col, *c));
                    }
                });
            }
            out
        })
        .collect();
    let n = basis.size();
    let matrix = SparseMatrix::from_triplets(n, n, columns.into_iter().flatten().collect())?;
    Ok(LeftMultOperator { basis, matrix })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    /// Lower estimate of the operator norm.
    pub estimate: f64,
    pub converged: bool,
    pub iterations: usize,
    pub basis_size: usize,
}

pub fn norm_lower_estimate(op: &LeftMultOperator, tol: f64, max_iters: usize) -> Result<NormEstimate> {
    let est = power_iteration(&op.matrix, tol, max_iters)?;
    Ok(NormEstimate {
        estimate: est.value,
        converged: est.converged,
        iterations: est.iterations,
        basis_size: op.basis.size(),
    })
}

/// `left_mult_matrix` followed by `norm_lower_estimate`.
pub fn fock_norm<C: Scalar>(v: &ChebVector<C>, max_degree: usize, tol: f64, max_iters: usize) -> Result<NormEstimate> {
    fock_norm_capped(v, max_degree, tol, max_iters, DEFAULT_BASIS_CAP)
}

pub fn fock_norm_capped<C: Scalar>(
    v: &ChebVector<C>,
    max_degree: usize,
    tol: f64,
    max_iters: usize,
    cap: usize,
) -> Result<NormEstimate> {
    norm_lower_estimate(&left_mult_matrix_capped(v, max_degree, cap)?, tol, max_iters)
}

/// Compression of `U_I U_J^*`: `P_{J K} -> P_{I K}`, zero elsewhere and on
/// outputs longer than `D`.
pub fn truncated_u_product(basis: &TruncatedBasis, i: &Word, j: &Word) -> Result<SparseMatrix> {
    i.validate(basis.d())?;
    j.validate(basis.d())?;
    let n = basis.size();
    let triplets = u_product_triplets(basis, i.letters(), j.letters(), Complex64::new(1.0, 0.0), 0, 0);
    SparseMatrix::from_triplets(n, n, triplets)
}

// Triplets of `coeff * U_I U_J^*`, shifted by (row_off, col_off).
fn u_product_triplets(
    basis: &TruncatedBasis,
    i: &[u32],
    j: &[u32],
    coeff: Complex64,
    row_off: usize,
    col_off: usize,
) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    let top = basis.max_degree();
    if j.len() > top || i.len() > top {
        return out;
    }
    // K ranges over the words with |J K| <= D and |I K| <= D.
    let max_k = top - i.len().max(j.len());
    let mut jk: Vec<u32> = j.to_vec();
    let mut ik: Vec<u32> = i.to_vec();
    for m in 0..=max_k {
        for kw in Word::all_of_length(basis.d(), m) {
            jk.truncate(j.len());
            jk.extend_from_slice(kw.letters());
            ik.truncate(i.len());
            ik.extend_from_slice(kw.letters());
            let col = basis.index_of(&jk).expect("within D");
            let row = basis.index_of(&ik).expect("within D");
            out.push((row + row_off, col + col_off, coeff));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct UDecompositionCheck {
    pub holds: bool,
    /// Columns compared (words of length at most `D - |w|`).
    pub columns: usize,
    pub mismatches: usize,
}

/// Compares left multiplication by `P_w` with
/// `sum_l U_{w[..n-l]} U_{reverse(w[n-l..])}^*` entrywise on the columns
/// whose images stay inside degree `D`.
pub fn check_u_decomposition(d: usize, w: &Word, max_degree: usize) -> Result<UDecompositionCheck> {
    let n = w.len();
    if 2 * n > max_degree {
        return Err(Error::invalid(format!(
            "decomposition check for a word of length {n} needs D >= {}, got {max_degree}",
            2 * n
        )));
    }
    let lhs = left_mult_matrix(&ChebVector::<crate::scalar::Exact>::basis(d, w.clone())?, max_degree)?;
    let basis = &lhs.basis;
    let letters = w.letters();
    let mut triplets = Vec::new();
    for l in 0..=n {
        let i = &letters[..n - l];
        let j: Vec<u32> = letters[n - l..].iter().rev().copied().collect();
        triplets.extend(u_product_triplets(basis, i, &j, Complex64::new(1.0, 0.0), 0, 0));
    }
    let size = basis.size();
    let rhs = SparseMatrix::from_triplets(size, size, triplets)?;
    let cols = basis.indices_up_to(max_degree - n);
    let mut mismatches = 0;
    for c in cols.clone() {
        for r in 0..size {
            if lhs.matrix.get(r, c) != rhs.get(r, c) {
                mismatches += 1;
            }
        }
    }
    Ok(UDecompositionCheck {
        holds: mismatches == 0,
        columns: cols.len(),
        mismatches,
    })
}

/// The operator `sum_w a_w (x) P_w(x)` compressed to `C^k (x) span{P_K : |K| <= D}`.
///
/// Index `(c, K)` is laid out coefficient-major: `c * |basis| + index(K)`.
pub fn matpoly_operator(p: &MatPoly, max_degree: usize) -> Result<SparseMatrix> {
    if p.degree() > max_degree {
        return Err(Error::invalid(format!(
            "truncation degree {max_degree} is below the polynomial degree {}",
            p.degree()
        )));
    }
    let basis = TruncatedBasis::new(p.d(), max_degree)?;
    let n = basis.size();
    let k = p.k();
    let dim = n
        .checked_mul(k)
        .filter(|&s| s <= DEFAULT_BASIS_CAP * 4)
        .ok_or_else(|| Error::resource("matrix-coefficient operator too large"))?;
    let mut triplets = Vec::new();
    for col in 0..n {
        let kw = basis.word_at(col);
        for (w, a) in p.coeffs() {
            mul_basis_words(w.letters(), kw.letters(), |out| {
                if let Some(row) = basis.index_of(out.letters()) {
                    for r in 0..k {
                        for c in 0..k {
                            let z = a.get(r, c);
                            if z != Complex64::new(0.0, 0.0) {
                                triplets.push((r * n + row, c * n + col, z));
                            }
                        }
                    }
                }
            });
        }
    }
    SparseMatrix::from_triplets(dim, dim, triplets)
}

/// Lower estimate of `|| sum_w a_w (x) P_w(x) ||`.
pub fn matpoly_norm_estimate(p: &MatPoly, max_degree: usize, tol: f64, max_iters: usize) -> Result<NormEstimate> {
    let op = matpoly_operator(p, max_degree)?;
    let est = power_iteration(&op, tol, max_iters)?;
    Ok(NormEstimate {
        estimate: est.value,
        converged: est.converged,
        iterations: est.iterations,
        basis_size: op.rows() / p.k(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatteningEquality {
    /// Norm estimate of `sum a_{(I,J)} (x) U_I U_J^*`.
    pub lhs: f64,
    /// Spectral norm of the flattening `M_l`.
    pub rhs: f64,
    pub converged: bool,
}

impl FlatteningEquality {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.lhs - self.rhs).abs() <= tol * self.rhs.max(1.0)
    }
}

/// Both sides of `|| sum a_{(I,J)} (x) U_I U_J^* || = || M_l ||`, with
/// `|I| = n - l` and `|J| = l`, the left side compressed to degree `D`.
pub fn check_flattening_equality(
    p: &MatPoly,
    l: usize,
    max_degree: usize,
    tol: f64,
    max_iters: usize,
) -> Result<FlatteningEquality> {
    let n = p.degree();
    if max_degree < n {
        return Err(Error::invalid(format!(
            "truncation degree {max_degree} is below the polynomial degree {n}"
        )));
    }
    let rhs_est = spectral_norm(&p.flatten(l)?.matrix, tol, max_iters)?;
    let basis = TruncatedBasis::new(p.d(), max_degree)?;
    let size = basis.size();
    let k = p.k();
    let mut triplets = Vec::new();
    for (w, a) in p.coeffs() {
        let (i, j) = w.letters().split_at(n - l);
        for r in 0..k {
            for c in 0..k {
                let z = a.get(r, c);
                if z != Complex64::new(0.0, 0.0) {
                    triplets.extend(u_product_triplets(&basis, i, j, z, r * size, c * size));
                }
            }
        }
    }
    let op = SparseMatrix::from_triplets(k * size, k * size, triplets)?;
    let lhs_est = power_iteration(&op, tol, max_iters)?;
    Ok(FlatteningEquality {
        lhs: lhs_est.value,
        rhs: rhs_est.value,
        converged: lhs_est.converged && rhs_est.converged,
    })
}
