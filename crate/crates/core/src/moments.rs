//! Exact traces of monomials in a free semicircular system.
//!
//! `tau(x_{i_1} ... x_{i_k})` is the number of non-crossing pair partitions
//! of `{1..k}` that only pair equal letters. [`moment_by_freeness`] computes
//! the same quantity a second way, using nothing but single-variable
//! semicircle moments and the vanishing of alternating centered products.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::word::Word;

pub const DEFAULT_PAIRING_CAP: usize = 20;
pub const DEFAULT_FREENESS_CAP: usize = 14;

/// A pair partition of `{1..k}`, stored as 1-based `(first, second)` pairs
/// sorted by first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        Pairing { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_non_crossing(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| {
            self.pairs
                .iter()
                .all(|&(c, d)| !(a < c && c < b && b < d))
        })
    }

    /// True when every pair joins equal letters of `w`.
    pub fn respects(&self, w: &[u32]) -> bool {
        self.pairs.iter().all(|&(a, b)| w[a - 1] == w[b - 1])
    }
}

/// All non-crossing pairings of `{1..k}`.
///
/// Order: by the partner of 1, then recursively inside before outside.
pub fn enumerate_nc_pairings(k: usize) -> Result<Vec<Pairing>> {
    enumerate_nc_pairings_capped(k, DEFAULT_PAIRING_CAP)
}

pub fn enumerate_nc_pairings_capped(k: usize, cap: usize) -> Result<Vec<Pairing>> {
    if k % 2 == 1 {
        return Err(Error::invalid(format!(
            "pairings need an even number of points, got {k}"
        )));
    }
    if k > cap {
        return Err(Error::resource(format!(
            "pairing enumeration of {k} points exceeds cap {cap}"
        )));
    }
    Ok(nc_pairings_of(1, k)
        .into_iter()
        .map(|pairs| Pairing { pairs })
        .collect())
}

// Pairings of the interval `start..=end`, pairs sorted by first element.
fn nc_pairings_of(start: usize, end: usize) -> Vec<Vec<(usize, usize)>> {
    if start > end {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut partner = start + 1;
    while partner <= end {
        let inner = nc_pairings_of(start + 1, partner - 1);
        let outer = nc_pairings_of(partner + 1, end);
        for i in &inner {
            for o in &outer {
                let mut p = Vec::with_capacity(1 + i.len() + o.len());
                p.push((start, partner));
                p.extend_from_slice(i);
                p.extend_from_slice(o);
                out.push(p);
            }
        }
        partner += 2;
    }
    out
}

/// Memoised non-crossing pairing counter.
///
/// Each instance owns its memo table, so concurrent users should hold one
/// oracle each. Results never depend on what was cached before.
#[derive(Default, Debug)]
pub struct MomentOracle {
    memo: HashMap<Vec<u32>, BigUint>,
}

impl MomentOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn moment(&mut self, letters: &[u32]) -> BigUint {
        if letters.len() % 2 == 1 {
            return BigUint::zero();
        }
        if letters.is_empty() {
            return BigUint::one();
        }
        if let Some(v) = self.memo.get(letters) {
            return v.clone();
        }
        let v = if !letters_pair_up(letters) {
            BigUint::zero()
        } else {
            // Position 0 pairs with an odd offset j; the pairing splits into
            // the inside (1..j) and the outside (j+1..).
            let first = letters[0];
            let mut total = BigUint::zero();
            for j in (1..letters.len()).step_by(2) {
                if letters[j] != first {
                    continue;
                }
                let inside = self.moment(&letters[1..j]);
                if inside.is_zero() {
                    continue;
                }
                let outside = self.moment(&letters[j + 1..]);
                total += inside * outside;
            }
            total
        };
        self.memo.insert(letters.to_vec(), v.clone());
        v
    }
}

// Every letter must occur an even number of times for a pairing to exist.
fn letters_pair_up(letters: &[u32]) -> bool {
    let mut parity: u64 = 0;
    let mut big: Vec<u32> = Vec::new();
    for &l in letters {
        if l < 64 {
            parity ^= 1 << l;
        } else if let Some(pos) = big.iter().position(|&b| b == l) {
            big.swap_remove(pos);
        } else {
            big.push(l);
        }
    }
    parity == 0 && big.is_empty()
}

/// `tau(x_w)`: the number of label-respecting non-crossing pairings.
pub fn moment(w: &Word) -> BigUint {
    MomentOracle::new().moment(w.letters())
}

/// Catalan number `C_k = binom(2k, k) / (k + 1)`.
pub fn catalan(k: usize) -> BigUint {
    let mut c = BigUint::one();
    // C_{j+1} = C_j * 2(2j+1) / (j+2)
    for j in 0..k {
        c = c * BigUint::from(2 * (2 * j + 1)) / BigUint::from(j + 2);
    }
    c
}

/// Independent moment oracle through the freeness relation.
///
/// The word is split into maximal blocks `x_a^e` of a single letter. Each
/// block is written as a centered polynomial plus its semicircle mean, the
/// product is expanded, and every term in which all remaining blocks are
/// centered and alternate vanishes. Terms that drop a block may bring equal
/// letters together, which are merged and reduced again.
pub fn moment_by_freeness(w: &Word) -> Result<BigInt> {
    moment_by_freeness_capped(w, DEFAULT_FREENESS_CAP)
}

pub fn moment_by_freeness_capped(w: &Word, cap: usize) -> Result<BigInt> {
    if w.len() > cap {
        return Err(Error::resource(format!(
            "freeness reduction of a length {} word exceeds cap {cap}",
            w.len()
        )));
    }
    let mut blocks: Vec<Block> = Vec::new();
    for &l in w.letters() {
        match blocks.last_mut() {
            Some(b) if b.letter == l => b.poly = univariate_mul(&b.poly, &[BigInt::zero(), BigInt::one()]),
            _ => blocks.push(Block {
                letter: l,
                poly: vec![BigInt::zero(), BigInt::one()],
            }),
        }
    }
    let mut reducer = FreenessReducer {
        memo: HashMap::new(),
        catalan: (0..=w.len() / 2).map(|k| BigInt::from(catalan(k))).collect(),
    };
    Ok(reducer.reduce(blocks))
}

// A single-variable polynomial in `x_letter`, coefficients by power.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Block {
    letter: u32,
    poly: Vec<BigInt>,
}

struct FreenessReducer {
    memo: HashMap<Vec<Block>, BigInt>,
    catalan: Vec<BigInt>,
}

impl FreenessReducer {
    fn tau(&self, p: &[BigInt]) -> BigInt {
        p.iter()
            .enumerate()
            .filter(|(e, c)| e % 2 == 0 && !c.is_zero())
            .map(|(e, c)| c * &self.catalan[e / 2])
            .sum()
    }

    // tau of the ordered product of the blocks.
    fn reduce(&mut self, blocks: Vec<Block>) -> BigInt {
        let (scalar, blocks) = normalize(blocks);
        if scalar.is_zero() {
            return BigInt::zero();
        }
        match blocks.len() {
            0 => return scalar,
            1 => return scalar * self.tau(&blocks[0].poly),
            _ => {}
        }
        if let Some(v) = self.memo.get(&blocks) {
            return scalar * v;
        }

        let means: Vec<BigInt> = blocks.iter().map(|b| self.tau(&b.poly)).collect();
        let centered: Vec<Block> = blocks
            .iter()
            .zip(&means)
            .map(|(b, m)| {
                let mut poly = b.poly.clone();
                poly[0] -= m;
                Block {
                    letter: b.letter,
                    poly,
                }
            })
            .collect();

        // Blocks with zero mean must stay centered; the others may be
        // replaced by their mean. Keeping every block centered gives an
        // alternating centered product, whose trace is zero.
        let droppable: Vec<usize> = (0..blocks.len()).filter(|&j| !means[j].is_zero()).collect();
        let mut total = BigInt::zero();
        for mask in 1u64..(1u64 << droppable.len()) {
            let mut factor = BigInt::one();
            let mut dropped = vec![false; blocks.len()];
            for (bit, &j) in droppable.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    dropped[j] = true;
                    factor *= &means[j];
                }
            }
            let kept: Vec<Block> = centered
                .iter()
                .zip(&dropped)
                .filter(|(_, &d)| !d)
                .map(|(b, _)| b.clone())
                .collect();
            total += factor * self.reduce(kept);
        }
        self.memo.insert(blocks, total.clone());
        scalar * total
    }
}

// Merge adjacent equal letters and pull constant blocks out as a scalar.
fn normalize(blocks: Vec<Block>) -> (BigInt, Vec<Block>) {
    let mut scalar = BigInt::one();
    let mut out: Vec<Block> = Vec::with_capacity(blocks.len());
    for b in blocks {
        let mut b = b;
        trim(&mut b.poly);
        if b.poly.len() <= 1 {
            match b.poly.first() {
                Some(c) => scalar *= c,
                None => return (BigInt::zero(), Vec::new()),
            }
            continue;
        }
        // A block may become adjacent to an equal letter after constants
        // between them were removed.
        loop {
            match out.last_mut() {
                Some(last) if last.letter == b.letter => {
                    let mut poly = univariate_mul(&last.poly, &b.poly);
                    trim(&mut poly);
                    out.pop();
                    if poly.len() <= 1 {
                        match poly.first() {
                            Some(c) => scalar *= c,
                            None => return (BigInt::zero(), Vec::new()),
                        }
                        break;
                    }
                    b = Block {
                        letter: b.letter,
                        poly,
                    };
                }
                _ => {
                    out.push(b);
                    break;
                }
            }
        }
    }
    (scalar, out)
}

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn univariate_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
