//! Operator-valued homogeneous polynomials `sum_w a_w (x) P_w(x)` with
//! `k x k` matrix coefficients, their flattenings and the flattening bound
//!
//! ```text
//! || sum_{|w| = n} a_w (x) P_w(x) || <= sum_{l=0}^{n} || M_l ||
//! ```
//!
//! where `M_l` is the block matrix `(a_{(I,J)})_{I,J}` with `|I| = n - l`
//! rows-words and `|J| = l` column-words.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chebyshev::{require_homogeneous, ChebVector};
use crate::error::{Error, Result};
use crate::numerics::{frobenius, spectral_norm, DenseMatrix, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use crate::scalar::{Float, Scalar};
use crate::word::Word;

/// Relative slack allowed when comparing a power-iteration norm against a
/// Frobenius norm.
pub const FROBENIUS_SLACK: f64 = 1e-10;

/// A homogeneous polynomial of degree `n` with `k x k` matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly {
    d: usize,
    n: usize,
    k: usize,
    coeffs: BTreeMap<Word, DenseMatrix>,
}

fn is_zero_matrix(m: &DenseMatrix) -> bool {
    m.data().iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

fn add_matrices(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x + y).collect();
    DenseMatrix::new(a.rows(), a.cols(), data).expect("same shape, finite sums")
}

impl MatPoly {
    pub fn zero(d: usize, n: usize, k: usize) -> Result<Self> {
        Self::new(d, n, k, [])
    }

    /// Builds from `(word, matrix)` pairs. Repeated words are summed and
    /// zero matrices dropped.
    pub fn new(
        d: usize,
        n: usize,
        k: usize,
        terms: impl IntoIterator<Item = (Word, DenseMatrix)>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("number of generators d must be positive"));
        }
        if k == 0 {
            return Err(Error::invalid("coefficient dimension k must be positive"));
        }
        let mut coeffs: BTreeMap<Word, DenseMatrix> = BTreeMap::new();
        for (w, m) in terms {
            w.validate(d)?;
            if w.len() != n {
                return Err(Error::invalid(format!(
                    "word {w} has length {}, expected homogeneous degree {n}",
                    w.len()
                )));
            }
            if m.rows() != k || m.cols() != k {
                return Err(Error::invalid(format!(
                    "coefficient of {w} is {}x{}, expected {k}x{k}",
                    m.rows(),
                    m.cols()
                )));
            }
            let sum = match coeffs.remove(&w) {
                Some(prev) => add_matrices(&prev, &m),
                None => m,
            };
            if !is_zero_matrix(&sum) {
                coeffs.insert(w, sum);
            }
        }
        Ok(MatPoly { d, n, k, coeffs })
    }

    /// Scalar polynomial (`k = 1`) from a homogeneous Chebyshev vector.
    /// The zero vector yields degree 0.
    pub fn from_cheb<C: Scalar>(v: &ChebVector<C>) -> Result<Self> {
        let n = require_homogeneous(v, "matrix polynomial source")?;
        let terms = v.terms().map(|(w, c)| {
            let m = DenseMatrix::new(1, 1, vec![c.to_c64()]).expect("1x1");
            (w.clone(), m)
        });
        Self::new(v.d(), n, 1, terms)
    }

    /// The scalar polynomial as a Chebyshev vector; needs `k = 1`.
    pub fn to_cheb(&self) -> Result<ChebVector<Float>> {
        if self.k != 1 {
            return Err(Error::invalid(format!(
                "scalar view needs k = 1, polynomial has k = {}",
                self.k
            )));
        }
        ChebVector::from_terms(self.d, self.coeffs.iter().map(|(w, m)| (w.clone(), m.get(0, 0))))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, DenseMatrix> {
        &self.coeffs
    }

    pub fn coeff(&self, w: &Word) -> Option<&DenseMatrix> {
        self.coeffs.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(sum a_w (x) P_w)^* = sum a_w^* (x) P_{reverse w}`.
    pub fn adjoint(&self) -> MatPoly {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, m)| (w.reversed(), m.conj_transpose()))
            .collect();
        MatPoly { coeffs, ..*self }
    }

    /// Sum of `|a_w|_F^2`, the squared `L^2` norm with the normalised trace
    /// on the coefficients replaced by the plain one.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.values().map(|m| frobenius(m).powi(2)).fold(0.0, |a, b| a + b)
    }

    /// The flattening `M_l`, of shape `k d^{n-l} x k d^l`.
    ///
    /// Row block `I` and column block `J` are the first `n - l` and last `l`
    /// letters of the word in written order; both are enumerated
    /// lexicographically (letter 1 first), so block `(I, J)` sits at rows
    /// `rank(I) k ..` and columns `rank(J) k ..`.
    pub fn flatten(&self, l: usize) -> Result<Flattening> {
        if l > self.n {
            return Err(Error::invalid(format!(
                "split point {l} outside [0, {}]",
                self.n
            )));
        }
        let row_words = checked_pow(self.d, self.n - l)?;
        let col_words = checked_pow(self.d, l)?;
        let k = self.k;
        let mut matrix = DenseMatrix::zeros(k * row_words, k * col_words)?;
        for (w, a) in &self.coeffs {
            let (i, j) = w.letters().split_at(self.n - l);
            let (r0, c0) = (lex_rank(self.d, i) * k, lex_rank(self.d, j) * k);
            for r in 0..k {
                for c in 0..k {
                    matrix.set(r0 + r, c0 + c, a.get(r, c));
                }
            }
        }
        Ok(Flattening { l, matrix })
    }

    /// Flattening bound with default power-iteration settings.
    pub fn op_bound(&self) -> Result<OpBound> {
        self.op_bound_with(DEFAULT_TOL, DEFAULT_MAX_ITERS)
    }

    pub fn op_bound_with(&self, tol: f64, max_iters: usize) -> Result<OpBound> {
        let per_l = (0..=self.n)
            .into_par_iter()
            .map(|l| {
                let f = self.flatten(l)?;
                let est = spectral_norm(&f.matrix, tol, max_iters)?;
                Ok(SplitNorm {
                    l,
                    norm: est.value,
                    converged: est.converged,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let value = per_l.iter().map(|s| s.norm).fold(0.0, |a, b| a + b);
        let max = per_l.iter().map(|s| s.norm).fold(0.0, f64::max);
        Ok(OpBound {
            value,
            per_l,
            comparison: (self.n as f64 + 1.0) * max,
        })
    }

    /// For `k = 1`: each `||M_l||` against `Frobenius(M_l) = ||p||_2`, and the
    /// aggregate `op_bound <= (n+1) ||p||_2`.
    pub fn scalar_comparison(&self) -> Result<ScalarComparison> {
        if self.k != 1 {
            return Err(Error::invalid(format!(
                "scalar comparison needs k = 1, polynomial has k = {}",
                self.k
            )));
        }
        let bound = self.op_bound()?;
        let l2 = self.l2_norm_sq().sqrt();
        let per_l = bound
            .per_l
            .iter()
            .map(|s| {
                let frob = frobenius(&self.flatten(s.l)?.matrix);
                Ok(FrobeniusCheck {
                    l: s.l,
                    spectral: s.norm,
                    frobenius: frob,
                    holds: s.norm <= frob * (1.0 + FROBENIUS_SLACK),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let l2_bound = (self.n as f64 + 1.0) * l2;
        let holds = per_l.iter().all(|c| c.holds) && bound.value <= l2_bound * (1.0 + FROBENIUS_SLACK);
        Ok(ScalarComparison {
            op_bound: bound.value,
            l2_bound,
            per_l,
            holds,
        })
    }
}

fn checked_pow(d: usize, e: usize) -> Result<usize> {
    d.checked_pow(e as u32)
        .ok_or_else(|| Error::resource(format!("{d}^{e} block indices overflow")))
}

/// Lexicographic rank of a word among the words of the same length.
pub fn lex_rank(d: usize, letters: &[u32]) -> usize {
    letters
        .iter()
        .fold(0, |acc, &l| acc * d + (l as usize - 1))
}

/// Inverse of [`lex_rank`].
pub fn lex_unrank(d: usize, len: usize, mut rank: usize) -> Word {
    let mut v = vec![0u32; len];
    for slot in v.iter_mut().rev() {
        *slot = (rank % d) as u32 + 1;
        rank /= d;
    }
    Word::new(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Flattening {
    pub l: usize,
    pub matrix: DenseMatrix,
}

impl Flattening {
    /// The `k x k` block at row word `i` and column word `j`.
    pub fn block(&self, d: usize, k: usize, i: &[u32], j: &[u32]) -> DenseMatrix {
        let (r0, c0) = (lex_rank(d, i) * k, lex_rank(d, j) * k);
        let data = (0..k)
            .flat_map(|r| (0..k).map(move |c| (r, c)))
            .map(|(r, c)| self.matrix.get(r0 + r, c0 + c))
            .collect();
        DenseMatrix::new(k, k, data).expect("k x k block")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitNorm {
    pub l: usize,
    pub norm: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpBound {
    /// `sum_l ||M_l||`.
    pub value: f64,
    pub per_l: Vec<SplitNorm>,
    /// `(n+1) max_l ||M_l||`, printed for comparison only.
    pub comparison: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrobeniusCheck {
    pub l: usize,
    pub spectral: f64,
    pub frobenius: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarComparison {
    pub op_bound: f64,
    /// `(n+1) ||p||_2`.
    pub l2_bound: f64,
    pub per_l: Vec<FrobeniusCheck>,
    pub holds: bool,
}

/// Checks that `flatten(adjoint, n - l)` is the conjugate transpose of
/// `flatten(p, l)` once row and column words are reversed. Returns the
/// largest entry mismatch over all splits.
pub fn adjoint_flattening_mismatch(p: &MatPoly) -> Result<f64> {
    let adj = p.adjoint();
    let (d, n, k) = (p.d, p.n, p.k);
    let mut worst = 0.0f64;
    for l in 0..=n {
        let f = p.flatten(l)?;
        let g = adj.flatten(n - l)?;
        for i in Word::all_of_length(d, n - l) {
            for j in Word::all_of_length(d, l) {
                let b = f.block(d, k, i.letters(), j.letters()).conj_transpose();
                let b_adj = g.block(d, k, j.reversed().letters(), i.reversed().letters());
                worst = worst.max(b.max_abs_diff(&b_adj));
            }
        }
    }
    Ok(worst)
}

/// Scalar `1 x 1` matrix.
pub fn scalar_matrix(z: Complex64) -> DenseMatrix {
    DenseMatrix::new(1, 1, vec![z]).expect("1x1")
}
