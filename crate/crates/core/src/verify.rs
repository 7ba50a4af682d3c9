//! Self-check suites run by `freesemi verify`.
//!
//! `identities` covers the exact algebraic identities (all in rational
//! arithmetic), `bounds` the inequalities; every check reports how many
//! cases it ran and how many failed.

use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::chebyshev::{adjoint_duality_check, cheb_derive, cheb_to_mono, cheb_to_mono_via_def, mono_to_cheb, ChebVector};
use crate::error::{Error, Result};
use crate::haagerup::{
    bound_cubic, bound_homogeneous, bound_sum, build_q, build_r, cubic_constant_sq, optimality_ratio,
    product_projection_check, q_by_decomposition, r_at_two,
};
use crate::moments::{catalan, moment, moment_by_freeness, MomentOracle};
use crate::ncpoly::NcPoly;
use crate::opval::adjoint_flattening_mismatch;
use crate::random::{random_cheb, random_homogeneous, random_matpoly, random_mono, random_scalar_tensor, rng};
use crate::scalar::{Exact, Scalar};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Identities,
    Bounds,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "identities" => Ok(Suite::Identities),
            "bounds" => Ok(Suite::Bounds),
            _ => Err(Error::invalid(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, failures: 0 }
    }

    fn check(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
    }

    // An error inside a check counts as a failed case.
    fn check_result(&mut self, r: Result<bool>) {
        self.check(matches!(r, Ok(true)));
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
        }
    }
}

const SEED: u64 = 20_240_601;

pub fn run(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::All => {
            let mut v = identities();
            v.extend(bounds());
            v
        }
        Suite::Identities => identities(),
        Suite::Bounds => bounds(),
    }
}

pub fn identities() -> Vec<CheckResult> {
    vec![
        catalan_moments(),
        moment_symmetries(),
        oracle_agreement(),
        orthonormality(),
        recursion_matches_definition(),
        conversion_round_trip(),
        mono_ring_axioms(),
        schwinger_dyson(),
        adjoint_duality(),
        multiplication_coherence(),
        derivative_coherence(),
        optimality_family(),
        cubic_constants(),
    ]
}

pub fn bounds() -> Vec<CheckResult> {
    vec![
        sum_below_cubic(),
        homogeneous_equals_sum(),
        product_projection(),
        frobenius_remark(),
        flattening_adjoint_symmetry(),
    ]
}

fn catalan_moments() -> CheckResult {
    let mut t = Tally::new("single-variable moments are Catalan numbers");
    for k in 0..=10 {
        t.check(moment(&Word::repeat(1, 2 * k)) == catalan(k));
        t.check(moment(&Word::repeat(1, 2 * k + 1)) == 0u32.into());
    }
    t.finish()
}

fn moment_symmetries() -> CheckResult {
    let mut t = Tally::new("moments are tracial and reversal invariant");
    let mut oracle = MomentOracle::new();
    for w in Word::all_up_to(2, 8) {
        let m = oracle.moment(w.letters());
        t.check(oracle.moment(w.reversed().letters()) == m);
        if !w.is_empty() {
            let mut rot = w.letters().to_vec();
            rot.rotate_left(1);
            t.check(oracle.moment(&rot) == m);
        }
    }
    t.finish()
}

fn oracle_agreement() -> CheckResult {
    let mut t = Tally::new("pairing oracle agrees with freeness reduction");
    for d in 1..=3 {
        for w in Word::all_up_to(d, if d == 3 { 6 } else { 8 }) {
            t.check_result(moment_by_freeness(&w).map(|f| f == moment(&w).into()));
        }
    }
    t.finish()
}

fn orthonormality() -> CheckResult {
    let mut t = Tally::new("Chebyshev basis is orthonormal");
    let words = Word::all_up_to(2, 3);
    let polys: Vec<NcPoly<Exact>> = words
        .iter()
        .map(|w| cheb_to_mono(&ChebVector::basis(2, w.clone()).expect("valid word")))
        .collect();
    let mut oracle = MomentOracle::new();
    for (i, p) in polys.iter().enumerate() {
        for (j, q) in polys.iter().enumerate() {
            let expected = if i == j { Exact::one() } else { Exact::zero() };
            t.check_result(p.inner_l2_with(q, &mut oracle).map(|v| v == expected));
        }
    }
    t.finish()
}

fn recursion_matches_definition() -> CheckResult {
    let mut t = Tally::new("three-term recursion matches the defining expansion");
    for w in Word::all_up_to(2, 6) {
        let via_rec = cheb_to_mono(&ChebVector::<Exact>::basis(2, w.clone()).expect("valid word"));
        t.check_result(cheb_to_mono_via_def::<Exact>(2, &w).map(|p| p == via_rec));
    }
    t.finish()
}

fn conversion_round_trip() -> CheckResult {
    let mut t = Tally::new("monomial and Chebyshev conversions are inverse");
    let mut r = rng(SEED);
    for _ in 0..100 {
        let p = random_mono(&mut r, 2, 5, 6);
        t.check(cheb_to_mono(&mono_to_cheb(&p)) == p);
        let v = random_cheb(&mut r, 3, 4, 6);
        t.check(mono_to_cheb(&cheb_to_mono(&v)) == v);
    }
    t.finish()
}

fn mono_ring_axioms() -> CheckResult {
    let mut t = Tally::new("associativity, distributivity and adjoint anti-homomorphism");
    let mut r = rng(SEED + 1);
    for _ in 0..50 {
        let (a, b, c) = (random_mono(&mut r, 2, 3, 4), random_mono(&mut r, 2, 3, 4), random_mono(&mut r, 2, 3, 4));
        let ok = (|| -> Result<bool> {
            let assoc = a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?;
            let distr = a.mul(&b.add(&c)?)? == a.mul(&b)?.add(&a.mul(&c)?)?;
            let anti = a.mul(&b)?.adjoint() == b.adjoint().mul(&a.adjoint())?;
            let trace = a.mul(&b)?.trace() == b.mul(&a)?.trace();
            Ok(assoc && distr && anti && trace && a.adjoint().adjoint() == a)
        })();
        t.check_result(ok);
    }
    t.finish()
}

fn schwinger_dyson() -> CheckResult {
    let mut t = Tally::new("Schwinger-Dyson equation");
    for w in Word::all_up_to(2, 6) {
        let p = NcPoly::<Exact>::monomial(2, w, Exact::one()).expect("valid word");
        for i in 1..=2 {
            t.check_result(p.check_schwinger_dyson(i).map(|sd| sd.holds));
        }
    }
    t.finish()
}

fn adjoint_duality() -> CheckResult {
    let mut t = Tally::new("higher derivatives are adjoint to Chebyshev multiplication");
    let qs = Word::all_up_to(2, 5);
    for w in Word::all_up_to(2, 3) {
        for q in &qs {
            let q = NcPoly::<Exact>::monomial(2, q.clone(), Exact::one()).expect("valid word");
            t.check_result(adjoint_duality_check(&w, &q).map(|c| c.holds));
        }
    }
    t.finish()
}

fn multiplication_coherence() -> CheckResult {
    let mut t = Tally::new("Chebyshev product matches the monomial route");
    let words = Word::all_up_to(2, 3);
    let check = |u: &ChebVector<Exact>, v: &ChebVector<Exact>| -> Result<bool> {
        Ok(cheb_to_mono(&u.mul(v)?) == cheb_to_mono(u).mul(&cheb_to_mono(v))?)
    };
    for a in &words {
        for b in &words {
            let u = ChebVector::basis(2, a.clone()).expect("valid word");
            let v = ChebVector::basis(2, b.clone()).expect("valid word");
            t.check_result(check(&u, &v));
        }
    }
    let mut r = rng(SEED + 2);
    for _ in 0..50 {
        let u = random_cheb(&mut r, 2, 4, 4);
        let v = random_cheb(&mut r, 2, 4, 4);
        t.check_result(check(&u, &v));
    }
    t.finish()
}

fn derivative_coherence() -> CheckResult {
    let mut t = Tally::new("Chebyshev derivative matches the monomial route");
    for w in Word::all_up_to(2, 5) {
        let mono = cheb_to_mono(&ChebVector::<Exact>::basis(2, w.clone()).expect("valid word"));
        for k in 1..=2 {
            let ok = (|| -> Result<bool> { Ok(cheb_derive::<Exact>(2, k, &w)?.to_monomial() == mono.derive(k)?) })();
            t.check_result(ok);
        }
    }
    t.finish()
}

fn optimality_family() -> CheckResult {
    let mut t = Tally::new("optimality family identities");
    for n in 0..=10 {
        t.check_result(r_at_two(n).map(|v| v == num_rational::BigRational::from_integer((n as i64 + 1).into())));
    }
    for m in 0..=24 {
        t.check_result(build_q(1, m).and_then(|q| Ok(q == q_by_decomposition(1, m)?)));
    }
    for n in 0..=12 {
        t.check_result(build_q(1, 2 * n).map(|q| {
            q.l2_norm_sq_exact() == Some(num_rational::BigRational::from_integer((n as i64 + 1).into()))
        }));
    }
    for n in 1..=20 {
        t.check_result(optimality_ratio(n).map(|row| row.matches_closed_form()));
    }
    t.finish()
}

fn cubic_constants() -> CheckResult {
    use num_rational::BigRational;
    let mut t = Tally::new("cubic constant closed forms agree");
    for n in 0..=30usize {
        let nn = BigRational::from_integer(n.into());
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        let alt = (&nn + &one) * (&nn + BigRational::new(3.into(), 2.into())) * (&nn + &two)
            / BigRational::from_integer(3.into());
        let c = cubic_constant_sq(n);
        t.check(c == alt);
        let r = build_r(2, n).expect("valid word");
        t.check_result(bound_cubic(&r).map(|b| b.exact_square == Some(c.clone())));
    }
    t.finish()
}

fn sum_below_cubic() -> CheckResult {
    let mut t = Tally::new("sum bound never exceeds cubic bound");
    let mut r = rng(SEED + 3);
    for _ in 0..200 {
        let v = random_cheb(&mut r, 2, 6, 6);
        if v.is_zero() {
            continue;
        }
        let s = bound_sum(&v);
        t.check_result(bound_cubic(&v).map(|c| s.value <= c.value * (1.0 + 1e-12) && c.is_consistent() && s.is_consistent()));
    }
    t.finish()
}

fn homogeneous_equals_sum() -> CheckResult {
    let mut t = Tally::new("homogeneous bound equals sum bound on homogeneous input");
    let mut r = rng(SEED + 4);
    for _ in 0..100 {
        let n = r.gen_range(0..=5);
        let v = random_homogeneous(&mut r, 2, n, 4);
        t.check_result(bound_homogeneous(&v).map(|h| (h.value - bound_sum(&v).value).abs() <= 1e-12 * h.value.max(1.0)));
    }
    t.finish()
}

fn product_projection() -> CheckResult {
    let mut t = Tally::new("homogeneous product projections");
    let mut r = rng(SEED + 5);
    for _ in 0..60 {
        let (l, m) = (r.gen_range(0..=3), r.gen_range(0..=3));
        let f = random_homogeneous(&mut r, 2, l, 3);
        let g = random_homogeneous(&mut r, 2, m, 3);
        for n in 0..=l + m + 1 {
            t.check_result(product_projection_check(&f, &g, n).map(|p| p.holds));
        }
    }
    t.finish()
}

fn frobenius_remark() -> CheckResult {
    let mut t = Tally::new("flattening norms below Frobenius norms");
    let mut r = rng(SEED + 6);
    for _ in 0..60 {
        let d = r.gen_range(1..=3);
        let n = r.gen_range(1..=3);
        let p = random_scalar_tensor(&mut r, d, n);
        t.check_result(p.scalar_comparison().map(|c| c.holds));
    }
    t.finish()
}

fn flattening_adjoint_symmetry() -> CheckResult {
    let mut t = Tally::new("flattening of the adjoint is the adjoint flattening");
    let mut r = rng(SEED + 7);
    for _ in 0..40 {
        let n = r.gen_range(0..=3);
        let p = random_matpoly(&mut r, 2, n, 2);
        t.check_result(adjoint_flattening_mismatch(&p).map(|e| e == 0.0));
    }
    t.finish()
}
