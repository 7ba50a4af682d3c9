//! The free Chebyshev basis `P_{i_n,...,i_1}`.
//!
//! Basis elements are built by the three-term recursion
//!
//! ```text
//! P_{} = 1,   P_{i} = X_i,
//! P_{i_n,...,i_1} = X_{i_n} P_{i_{n-1},...,i_1} - [i_{n-1} = i_n] P_{i_{n-2},...,i_1}
//! ```
//!
//! and are orthonormal in `L^2(x)`, so a [`ChebVector`] satisfies Parseval:
//! its squared `L^2` norm is the sum of squared coefficient moduli.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::moments::MomentOracle;
use crate::ncpoly::{accumulate, check_d, check_index, check_same_d, NcPoly, TensorPoly};
use crate::scalar::Scalar;
use crate::word::Word;

/// Longest basis word whose expansion is kept in the per-thread cache.
pub const DEFAULT_CACHE_DEGREE: usize = 16;

type Expansion = BTreeMap<Word, BigInt>;

thread_local! {
    static EXPANSIONS: RefCell<HashMap<Word, Rc<Expansion>>> = RefCell::new(HashMap::new());
}

/// Monomial expansion of one basis element, with integer coefficients.
///
/// Results for words up to [`DEFAULT_CACHE_DEGREE`] are memoised per thread.
pub fn basis_expansion(w: &Word) -> Rc<Expansion> {
    if let Some(e) = EXPANSIONS.with(|c| c.borrow().get(w).cloned()) {
        return e;
    }
    let letters = w.letters();
    let e = match letters.len() {
        0 | 1 => Rc::new(BTreeMap::from([(w.clone(), BigInt::one())])),
        _ => {
            let head = letters[0];
            let rest = Word::from(&letters[1..]);
            let mut out: Expansion = BTreeMap::new();
            for (u, c) in basis_expansion(&rest).iter() {
                let mut v = Vec::with_capacity(u.len() + 1);
                v.push(head);
                v.extend_from_slice(u.letters());
                out.insert(Word::new(v), c.clone());
            }
            if letters[1] == head {
                for (u, c) in basis_expansion(&Word::from(&letters[2..])).iter() {
                    let entry = out.entry(u.clone()).or_insert_with(BigInt::zero);
                    *entry -= c;
                    if entry.is_zero() {
                        out.remove(u);
                    }
                }
            }
            Rc::new(out)
        }
    };
    if w.len() <= DEFAULT_CACHE_DEGREE {
        EXPANSIONS.with(|c| c.borrow_mut().insert(w.clone(), e.clone()));
    }
    e
}

/// A vector in Chebyshev coordinates: `sum_w c_w P_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebVector<C: Scalar> {
    d: usize,
    terms: BTreeMap<Word, C>,
}

impl<C: Scalar> ChebVector<C> {
    pub fn zero(d: usize) -> Result<Self> {
        check_d(d)?;
        Ok(ChebVector {
            d,
            terms: BTreeMap::new(),
        })
    }

    /// The basis element `P_w`.
    pub fn basis(d: usize, w: Word) -> Result<Self> {
        Self::from_terms(d, [(w, C::one())])
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Word, C)>) -> Result<Self> {
        check_d(d)?;
        let mut map = BTreeMap::new();
        for (w, c) in terms {
            w.validate(d)?;
            accumulate(&mut map, w, c);
        }
        Ok(ChebVector { d, terms: map })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Option<&C> {
        self.terms.get(w)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest support word; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::len)
    }

    /// The single support length, if every word has the same length.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let first = self.terms.keys().next()?.len();
        (self.degree() == Some(first)).then_some(first)
    }

    /// Support lengths present, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(Word::len).collect();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_d(self.d, other.d)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        Ok(ChebVector { d: self.d, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&C::one().neg()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut terms = BTreeMap::new();
        for (w, a) in &self.terms {
            accumulate(&mut terms, w.clone(), a.mul(c));
        }
        ChebVector { d: self.d, terms }
    }

    /// `Proj_n`: the component spanned by words of length exactly `n`.
    pub fn proj(&self, n: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() == n)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        ChebVector { d: self.d, terms }
    }

    /// Keeps words of length at most `n`.
    pub fn truncate(&self, n: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() <= n)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        ChebVector { d: self.d, terms }
    }

    /// Parseval sum `sum |c_w|^2`, in the coefficient kind.
    pub fn l2_norm_sq(&self) -> C {
        let mut total = C::zero();
        for c in self.terms.values() {
            total.add_assign(&c.norm_sqr());
        }
        total
    }

    /// Exact squared norm for exact coefficients.
    pub fn l2_norm_sq_exact(&self) -> Option<BigRational> {
        let mut total = BigRational::zero();
        for c in self.terms.values() {
            total += c.norm_sqr_exact()?;
        }
        Some(total)
    }

    pub fn l2_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Adjoint in Chebyshev coordinates: `P_{i_n,...,i_1}* = P_{i_1,...,i_n}`.
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.reversed(), c.conj()))
            .collect();
        ChebVector { d: self.d, terms }
    }

    /// Product computed directly in Chebyshev coordinates.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same_d(self.d, other.d)?;
        let mut terms = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let ab = a.mul(b);
                mul_basis_words(u.letters(), v.letters(), |w| {
                    accumulate(&mut terms, w, ab.clone())
                });
            }
        }
        Ok(ChebVector { d: self.d, terms })
    }

    pub fn to_mono(&self) -> NcPoly<C> {
        cheb_to_mono(self)
    }

    pub(crate) fn from_map_unchecked(d: usize, terms: BTreeMap<Word, C>) -> Self {
        ChebVector { d, terms }
    }
}

/// Calls `emit` with every word of `P_u P_v`, each with coefficient one.
///
/// Term `s` exists while the last `s` letters of `u`, read backwards,
/// equal the first `s` letters of `v`; it is `u[..n-s] ++ v[s..]`.
pub fn mul_basis_words(u: &[u32], v: &[u32], mut emit: impl FnMut(Word)) {
    let n = u.len();
    let max_s = n.min(v.len());
    for s in 0..=max_s {
        if s > 0 && u[n - s] != v[s - 1] {
            break;
        }
        let mut out = Vec::with_capacity(n + v.len() - 2 * s);
        out.extend_from_slice(&u[..n - s]);
        out.extend_from_slice(&v[s..]);
        emit(Word::new(out));
    }
}

/// Expands a Chebyshev vector in the monomial basis.
pub fn cheb_to_mono<C: Scalar>(v: &ChebVector<C>) -> NcPoly<C> {
    let mut terms = BTreeMap::new();
    for (w, c) in &v.terms {
        for (u, e) in basis_expansion(w).iter() {
            accumulate(&mut terms, u.clone(), c.mul(&C::from_integer(e)));
        }
    }
    NcPoly::from_map_unchecked(v.d, terms)
}

/// `P_w` built from the defining induction
/// `P_{i_n,...} = X_{i_n} P_{...} - (ev (x) id)(partial_{i_n} P_{...})`,
/// using derivatives and traces instead of the three-term recursion.
pub fn cheb_to_mono_via_def<C: Scalar>(d: usize, w: &Word) -> Result<NcPoly<C>> {
    w.validate(d)?;
    let mut p = NcPoly::<C>::one(d)?;
    // Build from the innermost letter outwards.
    for &letter in w.letters().iter().rev() {
        let shifted = NcPoly::x(d, letter)?.mul(&p)?;
        let correction = p
            .derive(letter)?
            .trace_first_leg()?
            .into_poly()
            .expect("order-two tensor contracts to a polynomial");
        p = shifted.sub(&correction)?;
    }
    Ok(p)
}

/// Coordinates in the Chebyshev basis, by exact leading-term elimination.
pub fn mono_to_cheb<C: Scalar>(p: &NcPoly<C>) -> ChebVector<C> {
    let mut rest: BTreeMap<Word, C> = p.term_map().clone();
    let mut out = BTreeMap::new();
    // The last key is always a longest word; P_w has X_w as its only term
    // of that length.
    while let Some((w, c)) = rest.pop_last() {
        for (u, e) in basis_expansion(&w).iter() {
            if u.len() == w.len() {
                continue;
            }
            accumulate(&mut rest, u.clone(), c.mul(&C::from_integer(e)).neg());
        }
        out.insert(w, c);
    }
    ChebVector::from_map_unchecked(p.d(), out)
}

/// A two-leg tensor whose leg words index Chebyshev basis elements.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebTensor<C: Scalar>(pub TensorPoly<C>);

impl<C: Scalar> ChebTensor<C> {
    /// Expands every leg in the monomial basis.
    pub fn to_monomial(&self) -> TensorPoly<C> {
        let mut terms: BTreeMap<Vec<Word>, C> = BTreeMap::new();
        for (legs, c) in self.0.terms() {
            let mut partial: Vec<(Vec<Word>, C)> = vec![(Vec::new(), c.clone())];
            for leg in legs {
                let e = basis_expansion(leg);
                let mut next = Vec::with_capacity(partial.len() * e.len());
                for (ws, coeff) in &partial {
                    for (u, k) in e.iter() {
                        let mut ws = ws.clone();
                        ws.push(u.clone());
                        next.push((ws, coeff.mul(&C::from_integer(k))));
                    }
                }
                partial = next;
            }
            for (ws, coeff) in partial {
                accumulate(&mut terms, ws, coeff);
            }
        }
        TensorPoly::from_map_unchecked(self.0.d(), self.0.order(), terms)
    }
}

/// `partial_k P_w = sum_{j : i_j = k} P_{i_n,...,i_{j+1}} (x) P_{i_{j-1},...,i_1}`.
///
/// In written order this splits `w` at every occurrence of `k`.
pub fn cheb_derive<C: Scalar>(d: usize, k: u32, w: &Word) -> Result<ChebTensor<C>> {
    check_index(d, k)?;
    w.validate(d)?;
    let letters = w.letters();
    let mut terms = BTreeMap::new();
    for (p, &l) in letters.iter().enumerate() {
        if l == k {
            let legs = vec![Word::from(&letters[..p]), Word::from(&letters[p + 1..])];
            accumulate(&mut terms, legs, C::one());
        }
    }
    Ok(ChebTensor(TensorPoly::from_map_unchecked(d, 2, terms)))
}

/// Both sides of `tau(P_{i_n,...,i_1}(x) Q(x)) = tau^{(x) n+1}(partial_{i_1,...,i_n} Q(x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityCheck<C> {
    pub holds: bool,
    pub lhs: C,
    pub rhs: C,
}

pub fn adjoint_duality_check<C: Scalar>(w: &Word, q: &NcPoly<C>) -> Result<DualityCheck<C>> {
    w.validate(q.d())?;
    let mut oracle = MomentOracle::new();
    let pw = cheb_to_mono(&ChebVector::<C>::basis(q.d(), w.clone())?);
    let lhs = pw.mul(q)?.trace_with(&mut oracle);
    let rhs = if w.is_empty() {
        q.trace_with(&mut oracle)
    } else {
        // The derivative runs over the reversed index tuple (i_1, ..., i_n).
        q.derive_higher(w.reversed().letters())?
            .trace_all_with(&mut oracle)
    };
    Ok(DualityCheck {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Parity and range test for `Proj_n (f g)` with `f`, `g` homogeneous of
/// degrees `l`, `m`: nonzero only if `l + m - n` is even and
/// `|l - m| <= n <= l + m`.
pub fn product_degree_allowed(l: usize, m: usize, n: usize) -> bool {
    n >= l.abs_diff(m) && n <= l + m && (l + m - n).is_multiple_of(2)
}

pub(crate) fn require_homogeneous<C: Scalar>(v: &ChebVector<C>, what: &str) -> Result<usize> {
    if v.is_zero() {
        return Ok(0);
    }
    v.homogeneous_degree()
        .ok_or_else(|| Error::invalid(format!("{what} is not homogeneous (degrees {:?})", v.degrees())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    type V = ChebVector<Exact>;
    type P = NcPoly<Exact>;

    fn w(v: &[u32]) -> Word {
        Word::new(v.to_vec())
    }

    fn int(n: i64) -> Exact {
        Exact::from_i64(n)
    }

    fn mono(d: usize, v: &[u32], c: i64) -> P {
        P::monomial(d, w(v), int(c)).unwrap()
    }

    fn basis(d: usize, v: &[u32]) -> V {
        V::basis(d, w(v)).unwrap()
    }

    fn cheb(d: usize, terms: &[(&[u32], i64)]) -> V {
        V::from_terms(d, terms.iter().map(|(v, c)| (w(v), int(*c)))).unwrap()
    }

    #[test]
    fn recursion_examples() {
        let p11 = mono(1, &[1, 1], 1).add(&mono(1, &[], -1)).unwrap();
        assert_eq!(basis(1, &[1, 1]).to_mono(), p11);
        assert_eq!(basis(2, &[2, 1]).to_mono(), mono(2, &[2, 1], 1));
        let p111 = mono(1, &[1, 1, 1], 1).add(&mono(1, &[1], -2)).unwrap();
        assert_eq!(basis(1, &[1, 1, 1]).to_mono(), p111);
    }

    #[test]
    fn definition_examples() {
        let p11 = mono(1, &[1, 1], 1).add(&mono(1, &[], -1)).unwrap();
        assert_eq!(cheb_to_mono_via_def::<Exact>(1, &w(&[1, 1])).unwrap(), p11);
        assert_eq!(
            cheb_to_mono_via_def::<Exact>(2, &w(&[1, 2])).unwrap(),
            mono(2, &[1, 2], 1)
        );
    }

    #[test]
    fn definition_matches_recursion() {
        for d in 1..=3 {
            let max = if d == 3 { 4 } else { 5 };
            for word in Word::all_up_to(d, max) {
                let via_def = cheb_to_mono_via_def::<Exact>(d, &word).unwrap();
                let via_rec = V::basis(d, word.clone()).unwrap().to_mono();
                assert_eq!(via_def, via_rec, "{word}");
            }
        }
    }

    #[test]
    fn single_variable_matches_classical_recursion() {
        // U_{n+1} = X U_n - U_{n-1}
        let x = P::x(1, 1).unwrap();
        let mut prev = P::one(1).unwrap();
        let mut cur = x.clone();
        assert_eq!(basis(1, &[]).to_mono(), prev);
        assert_eq!(basis(1, &[1]).to_mono(), cur);
        for n in 2..=12 {
            let next = x.mul(&cur).unwrap().sub(&prev).unwrap();
            assert_eq!(V::basis(1, Word::repeat(1, n)).unwrap().to_mono(), next, "n={n}");
            prev = cur;
            cur = next;
        }
    }

    #[test]
    fn mono_to_cheb_examples() {
        assert_eq!(mono_to_cheb(&mono(1, &[1, 1], 1)), cheb(1, &[(&[1, 1], 1), (&[], 1)]));
        assert_eq!(mono_to_cheb(&mono(2, &[1, 2], 1)), basis(2, &[1, 2]));
        assert!(mono_to_cheb(&P::zero(2).unwrap()).is_zero());
    }

    #[test]
    fn leading_term_property() {
        for word in Word::all_up_to(2, 6) {
            let v = mono_to_cheb(&P::monomial(2, word.clone(), int(1)).unwrap());
            assert_eq!(v.coeff(&word), Some(&int(1)));
            assert!(v.terms().all(|(u, _)| u.len() <= word.len()));
            assert_eq!(v.to_mono(), P::monomial(2, word, int(1)).unwrap());
        }
    }

    #[test]
    fn orthonormality_through_moments() {
        let words = Word::all_up_to(2, 4);
        let polys: Vec<P> = words.iter().map(|u| basis(2, u.letters()).to_mono()).collect();
        let mut oracle = MomentOracle::new();
        for (i, p) in polys.iter().enumerate() {
            for (j, q) in polys.iter().enumerate() {
                let expected = if i == j { int(1) } else { int(0) };
                assert_eq!(p.inner_l2_with(q, &mut oracle).unwrap(), expected);
            }
        }
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(
            basis(1, &[1]).mul(&basis(1, &[1])).unwrap(),
            cheb(1, &[(&[1, 1], 1), (&[], 1)])
        );
        assert_eq!(
            basis(2, &[2, 1]).mul(&basis(2, &[1, 2])).unwrap(),
            cheb(2, &[(&[2, 1, 1, 2], 1), (&[2, 2], 1), (&[], 1)])
        );
        assert_eq!(
            basis(2, &[1]).mul(&basis(2, &[2, 1, 1])).unwrap(),
            basis(2, &[1, 2, 1, 1])
        );
        assert!(basis(1, &[1]).mul(&basis(2, &[1])).is_err());
    }

    #[test]
    fn multiplication_matches_monomial_route() {
        let words = Word::all_up_to(2, 3);
        for u in &words {
            for v in &words {
                let direct = basis(2, u.letters()).mul(&basis(2, v.letters())).unwrap();
                let routed = mono_to_cheb(
                    &basis(2, u.letters())
                        .to_mono()
                        .mul(&basis(2, v.letters()).to_mono())
                        .unwrap(),
                );
                assert_eq!(direct, routed, "{u} * {v}");
            }
        }
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(basis(2, &[1, 2]).adjoint(), basis(2, &[2, 1]));
        assert_eq!(basis(2, &[1, 2, 1]).adjoint(), basis(2, &[1, 2, 1]));
        for word in Word::all_up_to(2, 4) {
            let v = basis(2, word.letters());
            assert_eq!(v.adjoint().to_mono(), v.to_mono().adjoint());
        }
    }

    #[test]
    fn derivative_examples() {
        let unit = TensorPoly::from_terms(1, 2, [(vec![w(&[]), w(&[])], int(1))]).unwrap();
        assert_eq!(cheb_derive::<Exact>(1, 1, &w(&[1])).unwrap().0, unit);
        assert!(cheb_derive::<Exact>(2, 2, &w(&[1, 1])).unwrap().0.is_zero());
        let expected = TensorPoly::from_terms(
            2,
            2,
            [
                (vec![w(&[]), w(&[2, 1])], int(1)),
                (vec![w(&[1, 2]), w(&[])], int(1)),
            ],
        )
        .unwrap();
        assert_eq!(cheb_derive::<Exact>(2, 1, &w(&[1, 2, 1])).unwrap().0, expected);
        assert!(cheb_derive::<Exact>(2, 3, &w(&[1])).is_err());
    }

    #[test]
    fn derivative_matches_monomial_route() {
        for word in Word::all_up_to(2, 5) {
            for k in 1..=2 {
                let direct = cheb_derive::<Exact>(2, k, &word).unwrap().to_monomial();
                let routed = basis(2, word.letters()).to_mono().derive(k).unwrap();
                assert_eq!(direct, routed, "d_{k} P_{word}");
            }
        }
    }

    #[test]
    fn duality_examples() {
        let r = adjoint_duality_check(&w(&[1]), &P::x(1, 1).unwrap()).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, int(1));
        let r = adjoint_duality_check(&w(&[1, 2]), &mono(2, &[1, 2], 1)).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, int(0));
        let r = adjoint_duality_check(&w(&[1, 2]), &mono(2, &[2, 1], 1)).unwrap();
        assert!(r.holds);
        assert_eq!(r.lhs, int(1));
    }

    #[test]
    fn duality_exhaustive_small() {
        for q in Word::all_up_to(2, 5) {
            let qp = P::monomial(2, q, int(1)).unwrap();
            for word in Word::all_up_to(2, 4) {
                assert!(adjoint_duality_check(&word, &qp).unwrap().holds);
            }
        }
    }

    #[test]
    fn projections() {
        let v = cheb(1, &[(&[], 1), (&[1, 1], 1)]);
        assert_eq!(v.proj(0), basis(1, &[]));
        assert_eq!(mono_to_cheb(&mono(1, &[1, 1], 1)).proj(2), basis(1, &[1, 1]));
        assert!(v.proj(3).is_zero());
        let total = (0..=2)
            .map(|n| v.proj(n))
            .fold(V::zero(1).unwrap(), |a, b| a.add(&b).unwrap());
        assert_eq!(total, v);
        assert_eq!(v.proj(2).proj(2), v.proj(2));
    }

    #[test]
    fn norms() {
        assert_eq!(basis(2, &[1, 2, 1]).l2_norm(), 1.0);
        let v = mono_to_cheb(&mono(1, &[1, 1], 1));
        assert!((v.l2_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(v.l2_norm_sq_exact(), Some(BigRational::from_integer(2.into())));
        let p = v.to_mono();
        assert_eq!(p.inner_l2(&p).unwrap(), v.l2_norm_sq());
    }

    #[test]
    fn homogeneity() {
        assert_eq!(basis(2, &[1, 2]).homogeneous_degree(), Some(2));
        assert_eq!(cheb(1, &[(&[], 1), (&[1, 1], 1)]).homogeneous_degree(), None);
        assert!(product_degree_allowed(1, 1, 2));
        assert!(!product_degree_allowed(1, 1, 1));
        assert!(product_degree_allowed(3, 1, 2));
        assert!(!product_degree_allowed(3, 1, 6));
    }
}
