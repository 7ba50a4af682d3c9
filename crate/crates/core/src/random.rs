//! Seeded random instances for property checks and the CLI verify suites.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chebyshev::ChebVector;
use crate::ncpoly::NcPoly;
use crate::numerics::DenseMatrix;
use crate::opval::MatPoly;
use crate::scalar::{exact_ratio, Exact, Scalar};
use crate::word::Word;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_word<R: Rng>(rng: &mut R, d: usize, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.gen_range(1..=d as u32)).collect())
}

/// Small Gaussian-integer-over-small-denominator coefficient, never zero.
pub fn random_exact<R: Rng>(rng: &mut R) -> Exact {
    loop {
        let den = rng.gen_range(1..=4);
        let re = exact_ratio(rng.gen_range(-5..=5), den);
        let im = if rng.gen_bool(0.3) {
            exact_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))
        } else {
            Exact::zero()
        };
        let z = Exact::new(re.re, im.re);
        if !Scalar::is_zero(&z) {
            return z;
        }
    }
}

fn random_terms<R: Rng>(rng: &mut R, d: usize, max_len: usize, terms: usize) -> Vec<(Word, Exact)> {
    (0..terms)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            (random_word(rng, d, len), random_exact(rng))
        })
        .collect()
}

/// Up to `terms` monomials of length at most `max_len`.
pub fn random_mono<R: Rng>(rng: &mut R, d: usize, max_len: usize, terms: usize) -> NcPoly<Exact> {
    NcPoly::from_terms(d, random_terms(rng, d, max_len, terms)).expect("valid words")
}

pub fn random_cheb<R: Rng>(rng: &mut R, d: usize, max_len: usize, terms: usize) -> ChebVector<Exact> {
    ChebVector::from_terms(d, random_terms(rng, d, max_len, terms)).expect("valid words")
}

/// Nonzero homogeneous Chebyshev vector of degree `n`.
pub fn random_homogeneous<R: Rng>(rng: &mut R, d: usize, n: usize, terms: usize) -> ChebVector<Exact> {
    loop {
        let v = ChebVector::from_terms(
            d,
            (0..terms.max(1)).map(|_| (random_word(rng, d, n), random_exact(rng))),
        )
        .expect("valid words");
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_dense<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| random_complex(rng)).collect();
    DenseMatrix::new(rows, cols, data).expect("positive dimensions")
}

/// Homogeneous matrix polynomial of degree `n` supported on a random
/// nonempty subset of the `d^n` words.
pub fn random_matpoly<R: Rng>(rng: &mut R, d: usize, n: usize, k: usize) -> MatPoly {
    let mut words = Word::all_of_length(d, n);
    words.shuffle(rng);
    let keep = rng.gen_range(1..=words.len());
    let terms: Vec<(Word, DenseMatrix)> = words
        .into_iter()
        .take(keep)
        .map(|w| (w, random_dense(rng, k, k)))
        .collect();
    MatPoly::new(d, n, k, terms).expect("valid shapes")
}

/// Scalar (`k = 1`) coefficient tensor with every word present.
pub fn random_scalar_tensor<R: Rng>(rng: &mut R, d: usize, n: usize) -> MatPoly {
    let terms: Vec<(Word, DenseMatrix)> = Word::all_of_length(d, n)
        .into_iter()
        .map(|w| (w, random_dense(rng, 1, 1)))
        .collect();
    MatPoly::new(d, n, 1, terms).expect("valid shapes")
}
