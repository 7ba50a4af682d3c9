//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use freesemi::chebyshev::{adjoint_duality_check, cheb_derive, mono_to_cheb};
use freesemi::fock::{check_flattening_equality, check_u_decomposition, fock_norm, left_mult_matrix, matpoly_norm_estimate};
use freesemi::haagerup::{
    bound_cubic, bound_sum, build_q, build_r, optimality_lower_bound, optimality_limit, optimality_ratio,
    q_by_decomposition, r_at_two,
};
use freesemi::moments::{moment, moment_by_freeness, MomentOracle};
use freesemi::opval::{scalar_matrix, MatPoly};
use freesemi::random::{random_cheb, random_matpoly, random_scalar_tensor, rng};
use freesemi::{cheb_to_mono, ChebVector, Exact, NcPoly, Scalar, TensorPoly, Word};

struct Report {
    pass: bool,
    details: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Report {
            pass: true,
            details: Vec::new(),
        }
    }

    fn sub(&mut self, ok: bool, text: String) {
        self.pass &= ok;
        self.details.push(format!("{}  {text}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn basis(d: usize, w: &Word) -> ChebVector<Exact> {
    ChebVector::basis(d, w.clone()).unwrap()
}

fn orthonormal_on(d: usize, max_len: usize) -> (usize, usize, usize) {
    let words = Word::all_up_to(d, max_len);
    let polys: Vec<NcPoly<Exact>> = words.iter().map(|w| cheb_to_mono(&basis(d, w))).collect();
    let mut oracle = MomentOracle::new();
    let mut bad = 0;
    let mut pairs = 0;
    for (i, p) in polys.iter().enumerate() {
        for (j, r) in polys.iter().enumerate() {
            // Odd total length: every monomial moment vanishes.
            if (words[i].len() + words[j].len()) % 2 == 1 {
                continue;
            }
            pairs += 1;
            let expected = if i == j { Exact::one() } else { Exact::zero() };
            if p.inner_l2_with(r, &mut oracle).unwrap() != expected {
                bad += 1;
            }
        }
    }
    (words.len(), pairs, bad)
}

fn criterion_1() -> Report {
    let mut r = Report::new();
    let (n, pairs, bad) = orthonormal_on(2, 5);
    r.sub(bad == 0, format!("d=2, |w|<=5: {n} basis elements, {pairs} even pairs, {bad} mismatches"));
    let (n, pairs, bad) = orthonormal_on(4, 5);
    r.sub(bad == 0, format!("d=4, |w|<=5: {n} basis elements, {pairs} even pairs, {bad} mismatches"));
    r
}

fn criterion_2() -> Report {
    let mut r = Report::new();
    for d in 1..=3 {
        let words = Word::all_up_to(d, 10);
        let bad = words
            .iter()
            .filter(|w| moment_by_freeness(w).unwrap() != moment(w).into())
            .count();
        r.sub(bad == 0, format!("d={d}: {} words of length <= 10, {bad} disagreements", words.len()));
    }
    r
}

fn criterion_3() -> Report {
    let mut r = Report::new();
    let monomials = Word::all_up_to(2, 6);
    let mut sd_bad = 0;
    for w in &monomials {
        let p = NcPoly::<Exact>::monomial(2, w.clone(), Exact::one()).unwrap();
        for i in 1..=2 {
            if !p.check_schwinger_dyson(i).unwrap().holds {
                sd_bad += 1;
            }
        }
    }
    r.sub(sd_bad == 0, format!("Schwinger-Dyson on {} monomials x 2 generators: {sd_bad} failures", monomials.len()));
    let tuples: Vec<Word> = Word::all_up_to(2, 3).into_iter().filter(|w| !w.is_empty()).collect();
    let mut dual_bad = 0;
    for t in &tuples {
        for w in &monomials {
            let p = NcPoly::<Exact>::monomial(2, w.clone(), Exact::one()).unwrap();
            if !adjoint_duality_check(t, &p).unwrap().holds {
                dual_bad += 1;
            }
        }
    }
    r.sub(
        dual_bad == 0,
        format!("adjoint duality, {} tuples x {} monomials: {dual_bad} failures", tuples.len(), monomials.len()),
    );
    r
}

fn mul_coherent(u: &ChebVector<Exact>, v: &ChebVector<Exact>) -> bool {
    u.mul(v).unwrap() == mono_to_cheb(&cheb_to_mono(u).mul(&cheb_to_mono(v)).unwrap())
}

fn derive_vector(v: &ChebVector<Exact>, k: u32) -> TensorPoly<Exact> {
    let mut terms = Vec::new();
    for (w, c) in v.terms() {
        let t = cheb_derive::<Exact>(v.d(), k, w).unwrap().to_monomial();
        terms.extend(t.terms().map(|(legs, x)| (legs.clone(), x.mul(c))));
    }
    TensorPoly::from_terms(v.d(), 2, terms).unwrap()
}

fn criterion_4() -> Report {
    let mut r = Report::new();
    let words = Word::all_up_to(2, 5);
    let mut bad = 0;
    for a in &words {
        for b in &words {
            if !mul_coherent(&basis(2, a), &basis(2, b)) {
                bad += 1;
            }
        }
    }
    r.sub(bad == 0, format!("product on {} basis pairs (|w|<=5): {bad} mismatches", words.len().pow(2)));
    let mut bad = 0;
    for w in &words {
        let mono = cheb_to_mono(&basis(2, w));
        for k in 1..=2 {
            if cheb_derive::<Exact>(2, k, w).unwrap().to_monomial() != mono.derive(k).unwrap() {
                bad += 1;
            }
        }
    }
    r.sub(bad == 0, format!("derivative on {} basis words x 2 letters: {bad} mismatches", words.len()));
    let mut g = rng(4);
    let (mut mul_bad, mut der_bad) = (0, 0);
    for _ in 0..200 {
        let u = random_cheb(&mut g, 2, 4, 4);
        let v = random_cheb(&mut g, 2, 4, 4);
        if !mul_coherent(&u, &v) {
            mul_bad += 1;
        }
        let k = g.gen_range(1..=2);
        if derive_vector(&u, k) != cheb_to_mono(&u).derive(k).unwrap() {
            der_bad += 1;
        }
    }
    r.sub(mul_bad == 0, format!("product on 200 random exact pairs: {mul_bad} mismatches"));
    r.sub(der_bad == 0, format!("derivative on 200 random exact vectors: {der_bad} mismatches"));
    r
}

fn criterion_5() -> Report {
    let mut r = Report::new();
    let mut g = rng(5);
    let mut bad = 0;
    for n in 0..=30usize {
        // Degree exactly n: the top word plus random lower terms.
        let v = basis(2, &Word::repeat(2, n)).add(&random_cheb(&mut g, 2, n, 3)).unwrap();
        let v = if v.degree() == Some(n) { v } else { basis(2, &Word::repeat(1, n)) };
        let l2 = v.l2_norm_sq_exact().unwrap();
        let rep = bound_cubic(&v).unwrap();
        let nn = q(n as i64);
        let first = (&nn + q(1)) * (&nn + q(2)) * (q(2) * &nn + q(3)) / q(6);
        let second = (&nn + q(1)) * (&nn + frac(3, 2)) * (&nn + q(2)) / q(3);
        let exact = rep.exact_square.clone();
        let ok = exact == Some(&first * &l2) && exact == Some(&second * &l2);
        let float_ok = (rep.value.powi(2) - num_traits::ToPrimitive::to_f64(&(&first * &l2)).unwrap()).abs()
            <= 1e-12 * rep.value.powi(2).max(1.0);
        if !(ok && float_ok) {
            bad += 1;
        }
    }
    r.sub(bad == 0, format!("cubic constant, both closed forms, n = 0..=30: {bad} mismatches"));
    let mut viol = 0;
    let mut cases = 0;
    while cases < 500 {
        let v = random_cheb(&mut g, 2, 6, 6);
        if v.is_zero() {
            continue;
        }
        cases += 1;
        if bound_sum(&v).value > bound_cubic(&v).unwrap().value * (1.0 + 1e-12) {
            viol += 1;
        }
    }
    r.sub(viol == 0, format!("sum bound <= cubic bound on {cases} random polynomials: {viol} violations"));
    r
}

fn criterion_6() -> Report {
    let mut r = Report::new();
    let bad = (0..=10).filter(|&n| r_at_two(n).unwrap() != q(n as i64 + 1)).count();
    r.sub(bad == 0, format!("R_n(2) = n+1 for n <= 10: {bad} mismatches"));
    let bad = (0..=12)
        .filter(|&n| {
            let lhs = build_q(1, 2 * n).unwrap();
            let mut rhs = ChebVector::<Exact>::zero(1).unwrap();
            for k in 0..=n {
                rhs = rhs.add(&build_r(1, 2 * k).unwrap()).unwrap();
            }
            lhs != rhs || lhs != q_by_decomposition(1, 2 * n).unwrap()
        })
        .count();
    r.sub(bad == 0, format!("Q(2n) = sum_k R(2k) for n <= 12: {bad} mismatches"));
    let bad = (0..=12)
        .filter(|&n| build_q(1, 2 * n).unwrap().l2_norm_sq_exact() != Some(q(n as i64 + 1)))
        .count();
    r.sub(bad == 0, format!("||Q(2n)||_2^2 = n+1 for n <= 12: {bad} mismatches"));
    let mut bad = 0;
    for n in 1..=20i64 {
        let row = optimality_ratio(n as usize).unwrap();
        let cubic: BigRational = (0..=2 * n).map(|k| q((k + 1) * (k + 1))).sum();
        let direct = q((n + 1).pow(4)) / (cubic * q(n + 1));
        let closed = frac(3, 8) * q(n + 1) * q(n + 1) / ((q(n) + frac(1, 2)) * (q(n) + frac(3, 4)));
        if row.ratio_sq != direct || direct != closed {
            bad += 1;
        }
    }
    r.sub(bad == 0, format!("optimality ratio^2 = closed form, exactly, n = 1..=20: {bad} mismatches"));
    let row = optimality_ratio(1).unwrap();
    r.sub((row.ratio - 0.7559).abs() < 1e-4, format!("n=1 ratio {:.6}", row.ratio));
    let gap = (optimality_lower_bound(300) - optimality_limit()).abs();
    r.sub(
        gap < 1e-3 && (optimality_limit() - 0.612372).abs() < 1e-6,
        format!("closed form at n=300 is {:.6}, limit sqrt(3/8) = {:.6}, gap {gap:.2e}", optimality_lower_bound(300), optimality_limit()),
    );
    r
}

fn criterion_7() -> Report {
    let mut r = Report::new();
    let x = basis(1, &Word::repeat(1, 1));
    for dd in [4usize, 8, 16, 32] {
        let est = fock_norm(&x, dd, 1e-13, 200_000).unwrap();
        let exact = 2.0 * (std::f64::consts::PI / (dd as f64 + 2.0)).cos();
        let err = (est.estimate - exact).abs();
        r.sub(err < 1e-8, format!("f = x, D = {dd}: estimate {:.12}, 2cos(pi/(D+2)) = {exact:.12}, error {err:.1e}", est.estimate));
    }
    for n in 1..=3usize {
        let qn = build_q(1, 2 * n).unwrap();
        let dd = 2 * n + 16;
        let est = fock_norm(&qn, dd, 1e-13, 200_000).unwrap().estimate;
        let target = ((n + 1) * (n + 1)) as f64;
        let sum = bound_sum(&qn).value;
        let ok = est >= 0.98 * target && est <= target * (1.0 + 1e-12) && est <= sum + 1e-9;
        r.sub(
            ok,
            format!(
                "f = Q({}), D = {dd}: estimate {est:.6} = {:.4} x (n+1)^2 (needs >= 0.98), bound_sum {sum:.3}",
                2 * n,
                est / target
            ),
        );
    }
    r
}

fn criterion_8() -> Report {
    let mut r = Report::new();
    let mut g = rng(8);
    let mut worst = f64::NEG_INFINITY;
    let mut viol = 0;
    for i in 0..50 {
        let n = 1 + i % 3;
        let p = random_matpoly(&mut g, 2, n, 2);
        let bound = p.op_bound().unwrap().value;
        let est = matpoly_norm_estimate(&p, 8, 1e-10, 10_000).unwrap().estimate;
        worst = worst.max(est - bound);
        if est > bound + 1e-6 {
            viol += 1;
        }
    }
    r.sub(viol == 0, format!("50 random k=2, d=2 instances at D=8: {viol} violations, max(estimate - bound) = {worst:.3e}"));
    let s = 0.5f64.sqrt();
    let sharp = MatPoly::new(
        2,
        1,
        1,
        [
            (Word::new(vec![1]), scalar_matrix(s.into())),
            (Word::new(vec![2]), scalar_matrix(s.into())),
        ],
    )
    .unwrap();
    let bound = sharp.op_bound().unwrap().value;
    r.sub((bound - 2.0).abs() < 1e-9, format!("sharp case op_bound = {bound:.12}"));
    let est = matpoly_norm_estimate(&sharp, 17, 1e-12, 100_000).unwrap().estimate;
    r.sub(est >= 1.99, format!("sharp case estimate at D = 17: {est:.6} (needs >= 1.99)"));
    r
}

fn criterion_9() -> Report {
    let mut r = Report::new();
    let words = Word::all_up_to(2, 3);
    let mut bad = 0;
    for w in &words {
        let chk = check_u_decomposition(2, w, 6).unwrap();
        let zero_one = left_mult_matrix(&basis(2, w), 6)
            .unwrap()
            .matrix
            .entries()
            .all(|(_, _, z)| z == num_complex::Complex64::new(1.0, 0.0));
        if !(chk.holds && zero_one) {
            bad += 1;
        }
    }
    r.sub(bad == 0, format!("U decomposition, {} words of length <= 3, d=2, D=6: {bad} mismatches", words.len()));
    let mut g = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = random_matpoly(&mut g, 2, 2, 2);
        let l = g.gen_range(0..=2);
        let eq = check_flattening_equality(&p, l, 3, 1e-14, 200_000).unwrap();
        worst = worst.max((eq.lhs - eq.rhs).abs());
    }
    r.sub(worst <= 1e-8, format!("flattening equality on 50 random instances: max |lhs - rhs| = {worst:.2e}"));
    r
}

fn criterion_10() -> Report {
    let mut r = Report::new();
    let mut g = rng(10);
    let mut bad = 0;
    for _ in 0..200 {
        let d = g.gen_range(1..=3);
        let n = g.gen_range(1..=3);
        let p = random_scalar_tensor(&mut g, d, n);
        let cmp = p.scalar_comparison().unwrap();
        let l2 = p.to_cheb().unwrap().l2_norm();
        if !(cmp.holds && cmp.op_bound <= (n as f64 + 1.0) * l2 * (1.0 + 1e-10)) {
            bad += 1;
        }
    }
    r.sub(bad == 0, format!("200 random scalar tensors: {bad} violations of spectral <= Frobenius"));
    r
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Report); 10] = [
        ("orthonormality of the Chebyshev basis (exact)", criterion_1),
        ("pairing oracle = freeness oracle", criterion_2),
        ("Schwinger-Dyson and higher adjoint duality", criterion_3),
        ("product and derivative coherence", criterion_4),
        ("cubic constant and sum <= cubic", criterion_5),
        ("optimality family", criterion_6),
        ("Fock squeeze", criterion_7),
        ("operator-valued bound", criterion_8),
        ("U decomposition and flattening equality", criterion_9),
        ("flattening spectral <= Frobenius", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let rep = f();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {:>2}: {name} ({secs:.1} s)", if rep.pass { "PASS" } else { "FAIL" }, i + 1);
        for d in &rep.details {
            println!("        {d}");
        }
        if !rep.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
