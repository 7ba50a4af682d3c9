//! Scalar Haagerup bounds for polynomials in free semicirculars.
//!
//! For `f` with Chebyshev components `Proj_n f`,
//!
//! ```text
//! ||f|| <= sum_n (n+1) ||Proj_n f||_2                        (sum)
//! ||f|| <= sqrt((n+1)(n+2)(2n+3)/6) ||f||_2,  n = deg f      (cubic)
//! ||f|| <= (l+1) ||f||_2,  f homogeneous of degree l       (homogeneous)
//! ```
//!
//! The optimality family is `R_n = P_{1,...,1}` and `Q_{2n} = R_n^2`,
//! `Q_{2n+1} = R_n R_{n+1}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chebyshev::{product_degree_allowed, require_homogeneous, ChebVector};
use crate::error::{Error, Result};
use crate::scalar::{Exact, Scalar};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Sum,
    Cubic,
    Homogeneous,
}

impl std::str::FromStr for BoundMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(BoundMethod::Sum),
            "cubic" => Ok(BoundMethod::Cubic),
            "homogeneous" => Ok(BoundMethod::Homogeneous),
            _ => Err(Error::invalid(format!("unknown bound method {s:?}"))),
        }
    }
}

/// One row of the degree breakdown: `(n, ||Proj_n f||_2, n + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeTerm {
    pub degree: usize,
    pub l2_norm: f64,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub method: BoundMethod,
    pub value: f64,
    pub per_degree: Vec<DegreeTerm>,
    /// `value^2` as an exact rational, when it is one.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub exact_square: Option<BigRational>,
}

impl BoundReport {
    /// Re-derives the bound from `per_degree`.
    pub fn recomputed_value(&self) -> f64 {
        match self.method {
            BoundMethod::Sum | BoundMethod::Homogeneous => self
                .per_degree
                .iter()
                .map(|t| t.weight as f64 * t.l2_norm)
                .fold(0.0, |a, b| a + b),
            BoundMethod::Cubic => {
                let n = self.per_degree.iter().map(|t| t.degree).max().unwrap_or(0);
                let l2: f64 = self.per_degree.iter().map(|t| t.l2_norm * t.l2_norm).sum();
                cubic_constant(n) * l2.sqrt()
            }
        }
    }

    /// True if `value` agrees with the breakdown to float precision.
    pub fn is_consistent(&self) -> bool {
        let r = self.recomputed_value();
        (r - self.value).abs() <= 1e-12 * r.abs().max(1.0)
    }
}

mod opt_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

fn breakdown<C: Scalar>(v: &ChebVector<C>) -> Vec<DegreeTerm> {
    v.degrees()
        .into_iter()
        .map(|n| DegreeTerm {
            degree: n,
            l2_norm: v.proj(n).l2_norm(),
            weight: n as u64 + 1,
        })
        .collect()
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `sum_n (n+1) ||Proj_n v||_2`.
pub fn bound_sum<C: Scalar>(v: &ChebVector<C>) -> BoundReport {
    let per_degree = breakdown(v);
    let value = per_degree.iter().map(|t| t.weight as f64 * t.l2_norm).fold(0.0, |a, b| a + b);
    // Exact only when at most one degree contributes.
    let exact_square = match v.degrees().as_slice() {
        [] => Some(BigRational::zero()),
        [n] => v
            .l2_norm_sq_exact()
            .map(|s| s * rational(*n as i64 + 1).pow(2)),
        _ => None,
    };
    BoundReport {
        method: BoundMethod::Sum,
        value,
        per_degree,
        exact_square,
    }
}

/// `(n+1)(n+2)(2n+3)/6 = sum_{k=0}^n (k+1)^2`.
pub fn cubic_constant_sq(n: usize) -> BigRational {
    let n = BigInt::from(n);
    let num = (&n + 1) * (&n + 2) * (BigInt::from(2) * &n + 3);
    BigRational::new(num, BigInt::from(6))
}

pub fn cubic_constant(n: usize) -> f64 {
    let n = n as f64;
    ((n + 1.0) * (n + 2.0) * (2.0 * n + 3.0) / 6.0).sqrt()
}

/// `sqrt((n+1)(n+2)(2n+3)/6) ||v||_2` with `n = deg v`.
pub fn bound_cubic<C: Scalar>(v: &ChebVector<C>) -> Result<BoundReport> {
    let n = v
        .degree()
        .ok_or_else(|| Error::invalid("cubic bound needs a nonzero polynomial (degree undefined)"))?;
    let per_degree = breakdown(v);
    let value = cubic_constant(n) * v.l2_norm();
    let exact_square = v.l2_norm_sq_exact().map(|s| s * cubic_constant_sq(n));
    Ok(BoundReport {
        method: BoundMethod::Cubic,
        value,
        per_degree,
        exact_square,
    })
}

/// `(l+1) ||v||_2` for `v` homogeneous of degree `l`.
pub fn bound_homogeneous<C: Scalar>(v: &ChebVector<C>) -> Result<BoundReport> {
    let l = require_homogeneous(v, "homogeneous bound input")?;
    let per_degree = breakdown(v);
    let value = (l as f64 + 1.0) * v.l2_norm();
    let exact_square = v
        .l2_norm_sq_exact()
        .map(|s| s * rational(l as i64 + 1).pow(2));
    Ok(BoundReport {
        method: BoundMethod::Homogeneous,
        value,
        per_degree,
        exact_square,
    })
}

pub fn bound<C: Scalar>(v: &ChebVector<C>, method: BoundMethod) -> Result<BoundReport> {
    match method {
        BoundMethod::Sum => Ok(bound_sum(v)),
        BoundMethod::Cubic => bound_cubic(v),
        BoundMethod::Homogeneous => bound_homogeneous(v),
    }
}

/// `R_n = P_{1,...,1}` (n ones) over `d` generators.
pub fn build_r(d: usize, n: usize) -> Result<ChebVector<Exact>> {
    ChebVector::basis(d, Word::repeat(1, n))
}

/// `Q_{2n} = R_n^2` and `Q_{2n+1} = R_n R_{n+1}`, via the Chebyshev product.
pub fn build_q(d: usize, m: usize) -> Result<ChebVector<Exact>> {
    let n = m / 2;
    let left = build_r(d, n)?;
    let right = build_r(d, n + m % 2)?;
    left.mul(&right)
}

/// `sum_{k<=n} R_{2k}` for `m = 2n`, `sum_{k<=n} R_{2k+1}` for `m = 2n+1`.
pub fn q_by_decomposition(d: usize, m: usize) -> Result<ChebVector<Exact>> {
    let terms = (0..=m / 2).map(|k| (Word::repeat(1, 2 * k + m % 2), Exact::one()));
    ChebVector::from_terms(d, terms)
}

/// `R_n` evaluated at the scalar 2 (single variable).
pub fn r_at_two(n: usize) -> Result<BigRational> {
    let p = build_r(1, n)?.to_mono();
    Ok(p.eval_scalar(&[Exact::from_i64(2)])?.re)
}

/// The closed-form lower bound `sqrt(3/8) (n+1) / sqrt((n+1/2)(n+3/4))`,
/// squared and exact.
pub fn optimality_lower_bound_sq(n: usize) -> BigRational {
    let n = BigRational::from_integer(BigInt::from(n));
    let one = rational(1);
    let num = rational(3) * (&n + &one).pow(2);
    let den = rational(8)
        * (&n + BigRational::new(1.into(), 2.into()))
        * (&n + BigRational::new(3.into(), 4.into()));
    num / den
}

pub fn optimality_lower_bound(n: usize) -> f64 {
    let n = n as f64;
    (3.0f64 / 8.0).sqrt() * (n + 1.0) / ((n + 0.5) * (n + 0.75)).sqrt()
}

/// `sqrt(3/8)`, the limit of the lower bound.
pub fn optimality_limit() -> f64 {
    (3.0f64 / 8.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalityRow {
    pub n: usize,
    /// `||Q_{2n}(x)|| / (cubic bound of Q_{2n})`.
    pub ratio: f64,
    pub ratio_sq: BigRational,
    pub lower_bound: f64,
    pub lower_bound_sq: BigRational,
    /// `||Q_{2n}||_2^2`, computed from the Chebyshev product.
    pub q_l2_sq: BigRational,
}

impl OptimalityRow {
    pub fn matches_closed_form(&self) -> bool {
        self.ratio_sq == self.lower_bound_sq
    }
}

/// Optimality ratio for `Q_{2n}`, using `||Q_{2n}(x)|| = ||R_n(x)||^2 = (n+1)^2`.
pub fn optimality_ratio(n: usize) -> Result<OptimalityRow> {
    if n == 0 {
        return Err(Error::invalid("optimality ratio needs n >= 1"));
    }
    let q = build_q(1, 2 * n)?;
    let q_l2_sq = q.l2_norm_sq_exact().expect("exact coefficients");
    let op_norm_sq = rational((n as i64 + 1).pow(4));
    let ratio_sq = op_norm_sq / (cubic_constant_sq(2 * n) * &q_l2_sq);
    let ratio = ratio_sq.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(OptimalityRow {
        n,
        ratio,
        ratio_sq,
        lower_bound: optimality_lower_bound(n),
        lower_bound_sq: optimality_lower_bound_sq(n),
        q_l2_sq,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductProjection {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    /// Whether `l + m - n` is even and `n` lies in `[|l-m|, l+m]`.
    pub allowed: bool,
    /// `||Proj_n (f g)||_2`.
    pub norm: f64,
    /// `||f||_2 ||g||_2`.
    pub bound: f64,
    pub holds: bool,
}

/// Checks the product projection identity for homogeneous `f`, `g`: `Proj_n(fg)` vanishes
/// off the allowed degrees and is bounded by `||f||_2 ||g||_2` on them.
pub fn product_projection_check<C: Scalar>(
    f: &ChebVector<C>,
    g: &ChebVector<C>,
    n: usize,
) -> Result<ProductProjection> {
    let l = require_homogeneous(f, "first factor")?;
    let m = require_homogeneous(g, "second factor")?;
    let p = f.mul(g)?.proj(n);
    let allowed = product_degree_allowed(l, m, n);
    let bound = f.l2_norm() * g.l2_norm();
    let holds = match (allowed, f.l2_norm_sq_exact(), g.l2_norm_sq_exact(), p.l2_norm_sq_exact()) {
        (false, ..) => p.is_zero(),
        (true, Some(a), Some(b), Some(c)) => c <= a * b,
        (true, ..) => p.l2_norm() <= bound * (1.0 + 1e-12) + 1e-300,
    };
    Ok(ProductProjection {
        l,
        m,
        n,
        allowed,
        norm: p.l2_norm(),
        bound,
        holds,
    })
}
