use arithsupport::exact::{int, rat, CycCtx, DiffVar, QFrac, QRoot, QVar, Rat, RatFunc, Ring, UPoly};
use arithsupport::opalg::NormalOp;
use arithsupport::oplang::{elaborate_diff, elaborate_q, parse, Dialect};
use arithsupport::repmat::{
    check_rnr1, lemma_suite, rho_p_symbolic, verify_det_thm22, verify_q_det, verify_trace_thm21, Mode, Status,
};
use arithsupport::shiftcalc::w_poly;
use arithsupport::solver::split_operator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn theta_pow(j: usize) -> NormalOp<DiffVar> {
    NormalOp::from_func(RatFunc::from_poly(UPoly::monomial(int(1), j)))
}

#[test]
fn monomial_traces_vanish_below_p_minus_1() {
    for p in [3u64, 5, 7] {
        let r = rho_p_symbolic(p).unwrap();
        for i in -2..=2 {
            for j in 0..=(p as usize - 2) {
                let m = r.op(&NormalOp::x_pow(i).mul(&theta_pow(j))).unwrap();
                assert!(m.trace().is_zero(), "p={p} x^{i} theta^{j}");
            }
        }
        // control: theta^(p-1) has nonzero trace
        assert!(!r.op(&theta_pow(p as usize - 1)).unwrap().trace().is_zero(), "p={p}");
    }
}

#[test]
fn theta_determinant_identity() {
    for p in [3u64, 5, 7, 11] {
        let l = lemma_suite(p).unwrap();
        assert!(l.ok(), "{l:?}");
    }
}

#[test]
fn random_and_symbolic_modes_agree() {
    let ops = ["theta + 3*t", "theta^2 + t*(x + x^(-1))", "theta*(theta + 1) - t*x"];
    for src in ops {
        let d = elaborate_diff(&parse(src, Dialect::Diff, 1).unwrap(), 1).unwrap();
        let op = split_operator(&d, 3).unwrap().0;
        let s = verify_det_thm22(&op, &[5, 7], &Mode::Symbolic).unwrap();
        let r = verify_det_thm22(&op, &[5, 7], &Mode::Random { trials: 4, seed: 11 }).unwrap();
        let st = |v: &arithsupport::repmat::VerifyReport| v.cases.iter().map(|c| c.status).collect::<Vec<_>>();
        assert_eq!(st(&s), st(&r), "{src}");
        assert!(s.ok, "{src}");
    }
    let d = elaborate_q(&parse("(y - 1)*(y - q) + t*x", Dialect::QDiff, 1).unwrap(), 1).unwrap();
    let op = split_operator(&d, 3).unwrap().0;
    let s = verify_q_det(&op, &[3, 4], &Mode::Symbolic).unwrap();
    let r = verify_q_det(&op, &[3, 4], &Mode::Random { trials: 3, seed: 5 }).unwrap();
    assert_eq!(s.cases.iter().map(|c| c.status).collect::<Vec<_>>(), r.cases.iter().map(|c| c.status).collect::<Vec<_>>());
}

#[test]
fn trace_formula_with_inverse_factors() {
    let d = |s: &str| elaborate_diff(&parse(s, Dialect::Diff, 1).unwrap(), 1).unwrap().coeff(0);
    let r = verify_trace_thm21(&[int(0), int(-1)], &[d("x + x^(-1) + theta^2")], &[5, 7, 11], &Mode::Symbolic);
    assert!(r.ok, "{r:?}");
    assert!(r.cases.iter().all(|c| c.status == Status::Pass));
}

#[test]
fn root_of_unity_collapse_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut f = RatFunc::<QVar>::constant(QFrac::from_laurent(0, &[rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))]));
        for _ in 0..rng.gen_range(1..=3) {
            // pole exponents differ by less than n, so no denominator vanishes mod Phi_n
            let roots: Vec<QRoot> = (0..rng.gen_range(1..=2)).map(|_| QRoot::Pow(rng.gen_range(0..=1))).collect();
            let c = QFrac::from_i64(rng.gen_range(1..=4)).mul(&QFrac::q_pow(rng.gen_range(-1..=1)));
            f = f.add(&RatFunc::inv_roots(&roots).mul(&RatFunc::constant(c)));
        }
        for n in 2..=6 {
            assert!(check_rnr1(&f, n).unwrap(), "n={n} f={f:?}");
        }
    }
}

/// `sum_i (mu^i z - 1)^(-j)` over the n-th roots of unity equals `n W_j(n, z^n) / (z^n - 1)^j`.
#[test]
fn w_polynomials_match_root_of_unity_sums() {
    for n in 2u64..=4 {
        let ctx = CycCtx::new(n);
        for j in 1..=4u32 {
            let w: UPoly<Rat> = UPoly::new(w_poly(j).coeffs().iter().map(|c| c.eval(&int(n as i64))).collect());
            for z in [int(2), int(-3), rat(1, 2), rat(5, 3)] {
                let zc = ctx.reduce(&UPoly::constant(z.clone()));
                let one = ctx.reduce(&UPoly::constant(int(1)));
                let mut sum = ctx.reduce(&UPoly::constant(int(0)));
                for i in 0..n as i64 {
                    let base = Ring::inv(&ctx.q_pow(i).mul(&zc).sub(&one)).expect("z is not a root of unity");
                    sum = sum.add(&(0..j).fold(one.clone(), |acc, _| acc.mul(&base)));
                }
                let zn = (0..n).fold(int(1), |acc, _| acc * &z);
                let den = (0..j).fold(int(1), |acc, _| acc * (&zn - int(1)));
                let want = int(n as i64) * w.eval(&zn) / den;
                assert_eq!(sum.rep(), UPoly::constant(want), "n={n} j={j} z={z}");
            }
        }
    }
}
