//! Coefficient kinds.
//!
//! Every polynomial carries coefficients of a single kind: [`Exact`]
//! (complex numbers with arbitrary-precision rational parts) or [`Float`]
//! (pairs of `f64`). The kinds are distinct types, so they can never be
//! mixed inside one value.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Exact = Complex<BigRational>;
pub type Float = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffKind {
    Exact,
    Float,
}

pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    const KIND: CoeffKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_integer(n: &BigInt) -> Self;
    fn from_i64(n: i64) -> Self {
        Self::from_integer(&BigInt::from(n))
    }
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// `|z|^2`, as a real-valued element of the same kind.
    fn norm_sqr(&self) -> Self;
    fn to_c64(&self) -> Complex<f64>;
    /// `|z|^2` as an exact rational, when the kind is exact.
    fn norm_sqr_exact(&self) -> Option<BigRational>;

    fn add_assign(&mut self, other: &Self) {
        *self = Scalar::add(self, other);
    }
}

impl Scalar for Exact {
    const KIND: CoeffKind = CoeffKind::Exact;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn from_integer(n: &BigInt) -> Self {
        Complex::new(BigRational::from_integer(n.clone()), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        Complex::new(&self.re + &other.re, &self.im + &other.im)
    }
    fn sub(&self, other: &Self) -> Self {
        Complex::new(&self.re - &other.re, &self.im - &other.im)
    }
    fn mul(&self, other: &Self) -> Self {
        // Real coefficients dominate in practice; skip the cross terms.
        if self.im.is_zero() && other.im.is_zero() {
            return Complex::new(&self.re * &other.re, BigRational::zero());
        }
        Complex::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }
    fn neg(&self) -> Self {
        Complex::new(-&self.re, -&self.im)
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }
    fn norm_sqr(&self) -> Self {
        Complex::new(
            &self.re * &self.re + &self.im * &self.im,
            BigRational::zero(),
        )
    }
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn norm_sqr_exact(&self) -> Option<BigRational> {
        Some(&self.re * &self.re + &self.im * &self.im)
    }
    fn add_assign(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }
}

impl Scalar for Float {
    const KIND: CoeffKind = CoeffKind::Float;

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn from_integer(n: &BigInt) -> Self {
        Complex::new(n.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn norm_sqr(&self) -> Self {
        Complex::new(Complex::norm_sqr(self), 0.0)
    }
    fn to_c64(&self) -> Complex<f64> {
        *self
    }
    fn norm_sqr_exact(&self) -> Option<BigRational> {
        None
    }
}

/// Exact complex number from a real rational.
pub fn exact_real(r: BigRational) -> Exact {
    Complex::new(r, BigRational::zero())
}

/// Exact complex number `num/den`.
pub fn exact_ratio(num: i64, den: i64) -> Exact {
    exact_real(BigRational::new(BigInt::from(num), BigInt::from(den)))
}
