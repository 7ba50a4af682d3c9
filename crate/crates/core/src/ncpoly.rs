//! Non-commutative polynomials `C<X_1, ..., X_d>` in the monomial basis.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::moments::MomentOracle;
use crate::scalar::Scalar;
use crate::word::Word;

pub(crate) fn accumulate<K: Ord, C: Scalar>(map: &mut BTreeMap<K, C>, key: K, c: C) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            e.get_mut().add_assign(&c);
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub(crate) fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::invalid("number of generators must be positive"))
    } else {
        Ok(())
    }
}

pub(crate) fn check_same_d(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::invalid(format!(
            "generator counts differ: {a} and {b}"
        )))
    } else {
        Ok(())
    }
}

pub(crate) fn check_index(d: usize, i: u32) -> Result<()> {
    if i == 0 || i as usize > d {
        Err(Error::invalid(format!("generator index {i} outside [1, {d}]")))
    } else {
        Ok(())
    }
}

/// Converts a pairing count into a coefficient.
pub(crate) fn count_to_scalar<C: Scalar>(n: num_bigint::BigUint) -> C {
    if n.is_zero() {
        C::zero()
    } else {
        C::from_integer(&BigInt::from(n))
    }
}

/// A polynomial stored as a sparse map from monomial words to coefficients.
///
/// Canonical: no zero coefficients, terms ordered length-then-lex. The
/// empty word is the unit.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPoly<C: Scalar> {
    d: usize,
    terms: BTreeMap<Word, C>,
}

impl<C: Scalar> NcPoly<C> {
    pub fn zero(d: usize) -> Result<Self> {
        check_d(d)?;
        Ok(NcPoly {
            d,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(d: usize) -> Result<Self> {
        Self::monomial(d, Word::empty(), C::one())
    }

    /// The generator `X_i`.
    pub fn x(d: usize, i: u32) -> Result<Self> {
        Self::monomial(d, Word::new(vec![i]), C::one())
    }

    pub fn monomial(d: usize, w: Word, c: C) -> Result<Self> {
        Self::from_terms(d, [(w, c)])
    }

    /// Sums the given terms; repeated words are added together.
    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Word, C)>) -> Result<Self> {
        check_d(d)?;
        let mut map = BTreeMap::new();
        for (w, c) in terms {
            w.validate(d)?;
            accumulate(&mut map, w, c);
        }
        Ok(NcPoly { d, terms: map })
    }

    pub(crate) fn from_map_unchecked(d: usize, terms: BTreeMap<Word, C>) -> Self {
        NcPoly { d, terms }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn term_map(&self) -> &BTreeMap<Word, C> {
        &self.terms
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

    /// Length of the longest word; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::len)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_d(self.d, other.d)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        Ok(NcPoly { d: self.d, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut terms = BTreeMap::new();
        for (w, a) in &self.terms {
            accumulate(&mut terms, w.clone(), a.mul(c));
        }
        NcPoly { d: self.d, terms }
    }

    /// Product by concatenation of words.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same_d(self.d, other.d)?;
        let mut terms = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                accumulate(&mut terms, u.concat(v), a.mul(b));
            }
        }
        Ok(NcPoly { d: self.d, terms })
    }

    /// `p*`: words reversed, coefficients conjugated.
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.reversed(), c.conj()))
            .collect();
        NcPoly { d: self.d, terms }
    }

    /// Evaluates at commuting scalar values `X_i = values[i-1]`.
    pub fn eval_scalar(&self, values: &[C]) -> Result<C> {
        if values.len() != self.d {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                self.d,
                values.len()
            )));
        }
        let mut total = C::zero();
        for (w, c) in &self.terms {
            let mut t = c.clone();
            for &l in w.letters() {
                t = t.mul(&values[l as usize - 1]);
            }
            total.add_assign(&t);
        }
        Ok(total)
    }

    /// `tau(p(x))`.
    pub fn trace(&self) -> C {
        self.trace_with(&mut MomentOracle::new())
    }

    pub fn trace_with(&self, oracle: &mut MomentOracle) -> C {
        let mut total = C::zero();
        for (w, c) in &self.terms {
            let m = oracle.moment(w.letters());
            if !m.is_zero() {
                total.add_assign(&c.mul(&count_to_scalar(m)));
            }
        }
        total
    }

    /// `<p, q> = tau(p q*)`.
    pub fn inner_l2(&self, other: &Self) -> Result<C> {
        self.inner_l2_with(other, &mut MomentOracle::new())
    }

    pub fn inner_l2_with(&self, other: &Self, oracle: &mut MomentOracle) -> Result<C> {
        check_same_d(self.d, other.d)?;
        let mut total = C::zero();
        let mut key: Vec<u32> = Vec::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if (u.len() + v.len()) % 2 == 1 {
                    continue;
                }
                key.clear();
                key.extend_from_slice(u.letters());
                key.extend(v.letters().iter().rev());
                let m = oracle.moment(&key);
                if !m.is_zero() {
                    total.add_assign(&a.mul(&b.conj()).mul(&count_to_scalar(m)));
                }
            }
        }
        Ok(total)
    }

    /// `partial_i p`, the sum of `A (x) B` over factorisations `M = A X_i B`.
    pub fn derive(&self, i: u32) -> Result<TensorPoly<C>> {
        self.derive_higher(&[i])
    }

    /// `partial_{i_1,...,i_n} p`: the sum over factorisations
    /// `M = A_1 X_{i_1} A_2 ... X_{i_n} A_{n+1}` of `A_1 (x) ... (x) A_{n+1}`.
    pub fn derive_higher(&self, indices: &[u32]) -> Result<TensorPoly<C>> {
        if indices.is_empty() {
            return Err(Error::invalid("derivative needs at least one index"));
        }
        for &i in indices {
            check_index(self.d, i)?;
        }
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            for legs in split_at_letters(w.letters(), indices) {
                accumulate(&mut terms, legs, c.clone());
            }
        }
        Ok(TensorPoly {
            d: self.d,
            order: indices.len() + 1,
            terms,
        })
    }

    /// Both sides of `tau(P(x) x_i) = tau (x) tau (partial_i P(x))`.
    pub fn check_schwinger_dyson(&self, i: u32) -> Result<SchwingerDyson<C>> {
        check_index(self.d, i)?;
        let mut oracle = MomentOracle::new();
        let lhs = self
            .mul(&NcPoly::x(self.d, i)?)?
            .trace_with(&mut oracle);
        let rhs = self.derive(i)?.trace_all_with(&mut oracle);
        let residual = lhs.sub(&rhs);
        Ok(SchwingerDyson {
            holds: residual.is_zero(),
            lhs,
            rhs,
            residual,
        })
    }
}

/// Outcome of a Schwinger-Dyson check.
#[derive(Clone, Debug, PartialEq)]
pub struct SchwingerDyson<C> {
    pub holds: bool,
    pub lhs: C,
    pub rhs: C,
    pub residual: C,
}

// Every ordered selection of positions carrying `indices` in order, as the
// list of legs between them.
fn split_at_letters(letters: &[u32], indices: &[u32]) -> Vec<Vec<Word>> {
    fn rec(
        letters: &[u32],
        start: usize,
        indices: &[u32],
        legs: &mut Vec<Word>,
        out: &mut Vec<Vec<Word>>,
    ) {
        match indices.split_first() {
            None => {
                legs.push(Word::from(&letters[start..]));
                out.push(legs.clone());
                legs.pop();
            }
            Some((&first, rest)) => {
                // Leave room for the remaining letters.
                let last = letters.len().saturating_sub(rest.len());
                for p in start..last {
                    if letters[p] == first {
                        legs.push(Word::from(&letters[start..p]));
                        rec(letters, p + 1, rest, legs, out);
                        legs.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(letters, 0, indices, &mut Vec::with_capacity(indices.len() + 1), &mut out);
    out
}

/// An element of the `order`-fold tensor power of the polynomial algebra,
/// sparse over tuples of words.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPoly<C: Scalar> {
    d: usize,
    order: usize,
    terms: BTreeMap<Vec<Word>, C>,
}

impl<C: Scalar> TensorPoly<C> {
    pub fn zero(d: usize, order: usize) -> Result<Self> {
        check_d(d)?;
        if order < 2 {
            return Err(Error::invalid(format!("tensor order must be >= 2, got {order}")));
        }
        Ok(TensorPoly {
            d,
            order,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms(
        d: usize,
        order: usize,
        terms: impl IntoIterator<Item = (Vec<Word>, C)>,
    ) -> Result<Self> {
        let mut t = Self::zero(d, order)?;
        for (legs, c) in terms {
            if legs.len() != order {
                return Err(Error::invalid(format!(
                    "tensor term has {} legs, expected {order}",
                    legs.len()
                )));
            }
            for w in &legs {
                w.validate(d)?;
            }
            accumulate(&mut t.terms, legs, c);
        }
        Ok(t)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Word>, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `tau^{(x) order}`: product of the traces of the legs.
    pub fn trace_all(&self) -> C {
        self.trace_all_with(&mut MomentOracle::new())
    }

    pub fn trace_all_with(&self, oracle: &mut MomentOracle) -> C {
        let mut total = C::zero();
        'terms: for (legs, c) in &self.terms {
            let mut t = c.clone();
            for leg in legs {
                let m = oracle.moment(leg.letters());
                if m.is_zero() {
                    continue 'terms;
                }
                t = t.mul(&count_to_scalar(m));
            }
            total.add_assign(&t);
        }
        total
    }

    /// `ev (x) id`: traces the first leg away. For order 2 the result is a
    /// polynomial; higher orders keep the remaining legs.
    pub fn trace_first_leg(&self) -> Result<Contracted<C>> {
        let mut oracle = MomentOracle::new();
        let mut rest: BTreeMap<Vec<Word>, C> = BTreeMap::new();
        for (legs, c) in &self.terms {
            let m = oracle.moment(legs[0].letters());
            if m.is_zero() {
                continue;
            }
            accumulate(&mut rest, legs[1..].to_vec(), c.mul(&count_to_scalar(m)));
        }
        if self.order == 2 {
            let terms = rest
                .into_iter()
                .map(|(mut legs, c)| (legs.pop().unwrap_or_default(), c))
                .collect();
            Ok(Contracted::Poly(NcPoly::from_map_unchecked(self.d, terms)))
        } else {
            Ok(Contracted::Tensor(TensorPoly {
                d: self.d,
                order: self.order - 1,
                terms: rest,
            }))
        }
    }

    /// Applies `partial_i` to the last leg, raising the order by one.
    pub fn derive_last_leg(&self, i: u32) -> Result<TensorPoly<C>> {
        check_index(self.d, i)?;
        let mut terms = BTreeMap::new();
        for (legs, c) in &self.terms {
            let (last, head) = legs.split_last().expect("tensor legs are non-empty");
            for split in split_at_letters(last.letters(), &[i]) {
                let mut new_legs = head.to_vec();
                new_legs.extend(split);
                accumulate(&mut terms, new_legs, c.clone());
            }
        }
        Ok(TensorPoly {
            d: self.d,
            order: self.order + 1,
            terms,
        })
    }

    pub(crate) fn from_map_unchecked(d: usize, order: usize, terms: BTreeMap<Vec<Word>, C>) -> Self {
        TensorPoly { d, order, terms }
    }
}

/// Result of tracing away one tensor leg.
#[derive(Clone, Debug, PartialEq)]
pub enum Contracted<C: Scalar> {
    Poly(NcPoly<C>),
    Tensor(TensorPoly<C>),
}

impl<C: Scalar> Contracted<C> {
    pub fn into_poly(self) -> Option<NcPoly<C>> {
        match self {
            Contracted::Poly(p) => Some(p),
            Contracted::Tensor(_) => None,
        }
    }
}
