mod common;

use common::*;
use hyperpair::arith::{bit_length, mul_mod, multiplicative_order};
use hyperpair::curve::{count_points, frobenius_charpoly, jacobian_order};
use hyperpair::field::{FieldDescriptor, FieldElement};
use hyperpair::jacobian::{
    all_divisors, compose_reduce, negate, random_divisor, scalar_mul, scalar_mul_u64, ReducedDivisor,
};
use hyperpair::pairings::*;
use hyperpair::pfsearch::{embedding_degree, rho_value, search, SearchConfig};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn pairs(ctx: &PairingContext, n: usize, seed: u64) -> Vec<(ReducedDivisor, ReducedDivisor)> {
    let mut rng = rng(seed);
    (0..n).map(|_| (ctx.sample_g2(&mut rng).unwrap(), ctx.sample_g1(&mut rng).unwrap())).collect()
}

#[test]
fn jacobian_order_matches_enumeration() {
    for p in [5u64, 7, 11] {
        let field = FieldDescriptor::prime(p).unwrap();
        for f in [[1i64, 0, 0, 0, 0, 1], [3, 2, 0, 0, 0, 1], [1, 1, 1, 0, 0, 1]] {
            let Ok(c) = hyperpair::curve::CurveParams::with_f(&field, 2, &f) else { continue };
            let cp = frobenius_charpoly(&c).unwrap();
            assert_eq!(jacobian_order(&cp, 1), BigUint::from(all_divisors(&c).unwrap().len()));
        }
    }
}

#[test]
fn point_counts_match_brute_force() {
    let c = curve(SMALL.0, &SMALL.1);
    let p = SMALL.0;
    let field = c.field().clone();
    let mut n = 1; // the point at infinity
    for x in 0..p {
        n += c.points_above(&FieldElement::from_u64(&field, x)).len() as u64;
    }
    assert_eq!(count_points(&c, 1).unwrap(), n);
}

#[test]
fn group_order_annihilates() {
    for (p, f, _) in [MAIN, K6, SMALL] {
        let c = curve(p, &f);
        let n = BigInt::from(jacobian_order(&frobenius_charpoly(&c).unwrap(), 1));
        let mut rng = rng(p);
        for _ in 0..10 {
            let d = random_divisor(&c, &mut rng).unwrap();
            assert!(scalar_mul(&c, &d, &n).unwrap().is_identity());
        }
    }
}

#[test]
fn embedding_degree_is_multiplicative_order() {
    for (q, r) in [(109u64, 457u64), (127, 1231), (7, 43), (5, 13), (11, 7)] {
        let k = embedding_degree(&BigUint::from(q), r).unwrap();
        let brute = (1..r).find(|&e| hyperpair::arith::pow_mod(q, e, r) == 1).unwrap();
        assert_eq!(k, brute);
        assert_eq!(Some(k), multiplicative_order(q % r, r));
    }
    let rho = rho_value(2, &BigUint::from(109u32), &BigUint::from(457u32));
    assert!((rho - 2.0 * 109f64.ln() / 457f64.ln()).abs() < 1e-12);
}

#[test]
fn search_records_are_consistent() {
    let cfg = SearchConfig { p_min: 5, p_max: 5, ..Default::default() };
    let out = search(&cfg).unwrap();
    assert!(!out.records.is_empty());
    for rec in out.records.iter().step_by(97) {
        let c = rec.curve().unwrap();
        assert_eq!(rec.jac_order, all_divisors(&c).unwrap().len() as u64);
        assert_eq!(rec.jac_order % rec.r, 0);
        assert_eq!(Some(rec.k), multiplicative_order(5 % rec.r, rec.r));
        assert_eq!(rec.n1, count_points(&c, 1).unwrap());
    }
}

/// `ate_i = tate^{T (T^k - 1) / (r k)}` with `T = q^j mod r`.
#[test]
fn ate_i_is_a_power_of_tate() {
    for spec in [MAIN, K6] {
        let ctx = context(spec);
        let (r, k) = (ctx.r, ctx.k);
        let k_inv = hyperpair::arith::inv_mod(k as u64, r).unwrap();
        for (x, y) in pairs(&ctx, 3, 11) {
            let t = ctx.tate(&x, &y).unwrap();
            for j in 1..k {
                let tj = ctx.frobenius_residue(j);
                let e = mul_mod(mul_mod(tj % r, l_over_r(&BigUint::from(tj), k, r), r), k_inv, r);
                assert_eq!(ctx.ate_i(&x, &y, j).unwrap(), t.pow_u64(e), "j = {j}");
            }
        }
    }
}

#[test]
fn vercauteren_matches_hv_at_q() {
    let ctx = context(MAIN);
    let r = ctx.r;
    let mut digits = Vec::new();
    let q = ctx.q.to_u64().unwrap();
    let mut x = r;
    while x > 0 {
        digits.push(BigInt::from(x % q));
        x /= q;
    }
    let short = short_vercauteren_expansion(&ctx.q, r, 1, 2 * r).unwrap();
    for (h, m) in [(digits, BigInt::from(1)), short] {
        let spec = HvSpec { s: BigInt::from(q), h: h.clone() };
        let e = hv_exponent(&spec, ctx.k, r);
        for (x, y) in pairs(&ctx, 3, 12) {
            let v = ctx.vercauteren(&x, &y, &h, &m).unwrap();
            assert_eq!(v, ctx.hv(&x, &y, &spec).unwrap());
            assert_eq!(v, ctx.tate(&x, &y).unwrap().pow_u64(e));
        }
    }
}

#[test]
fn twisted_ate_is_a_power_of_tate() {
    for spec in [MAIN, K6] {
        let ctx = context(spec);
        let (r, k) = (ctx.r, ctx.k);
        let half = (ctx.q.pow(k as u32 / 2) + 1u32) / r;
        let half = (half % r).to_u64().unwrap();
        let full = (&ctx.final_exponent % r).to_u64().unwrap();
        for (q2, p1) in pairs(&ctx, 3, 13) {
            let t = ctx.tate(&p1, &q2).unwrap();
            assert_eq!(ctx.twisted_ate(&p1, &q2, k as u64 / 2).unwrap(), t.pow_u64(half));
            assert_eq!(ctx.twisted_ate(&p1, &q2, k as u64).unwrap(), t.pow_u64(full));
        }
    }
}

#[test]
fn weil_is_alternating() {
    let ctx = context(SMALL);
    let mut rng = rng(14);
    for _ in 0..5 {
        let a = ctx.sample_r_torsion(ctx.k, &mut rng).unwrap();
        let b = ctx.sample_r_torsion(ctx.k, &mut rng).unwrap();
        let w = ctx.weil(&a, &b).unwrap();
        assert!(w.pow_u64(ctx.r).is_one());
        assert!((&w * &ctx.weil(&b, &a).unwrap()).is_one());
        assert!(ctx.weil(&a, &a).unwrap().is_one());
    }
}

#[test]
fn pairings_are_bilinear_at_k6() {
    for spec in [K6, SMALL] {
        let ctx = context(spec);
        let r = ctx.r;
        let (x, y) = pairs(&ctx, 1, 15).remove(0);
        let t = ctx.tate(&x, &y).unwrap();
        let a = ctx.ate(&x, &y).unwrap();
        assert!(!t.is_one() && !a.is_one());
        for n in [2u64, 5, r - 1] {
            let xn = scalar_mul_u64(&ctx.curve_k, &x, n).unwrap();
            let yn = scalar_mul_u64(&ctx.curve_k, &y, n).unwrap();
            assert_eq!(ctx.tate(&xn, &y).unwrap(), t.pow_u64(n));
            assert_eq!(ctx.tate(&x, &yn).unwrap(), t.pow_u64(n));
            assert_eq!(ctx.ate(&xn, &y).unwrap(), a.pow_u64(n));
            assert_eq!(ctx.ate(&x, &yn).unwrap(), a.pow_u64(n));
        }
    }
}

#[test]
fn loop_bits_follow_the_scalars() {
    let ctx = context(MAIN);
    let (x, y) = pairs(&ctx, 1, 16).remove(0);
    let params = PairingParams {
        ate_j: Some(1),
        rate: Some((1, 2)),
        twist_e: Some(2),
        ..Default::default()
    };
    let out = |name: &str, a: &ReducedDivisor, b: &ReducedDivisor| ctx.pairing_dispatch(name, a, b, &params).unwrap();
    assert_eq!(out("tate", &x, &y).loop_bits, bit_length(&BigUint::from(ctx.r)));
    assert_eq!(out("ate", &x, &y).loop_bits, bit_length(&ctx.q));
    assert_eq!(out("ate_i", &x, &y).loop_bits, bit_length(&BigUint::from(ctx.frobenius_residue(1))));
    assert_eq!(out("twisted_ate", &y, &x).loop_bits, bit_length(&ctx.q.pow(2)));
}

fn main_curve() -> hyperpair::curve::CurveParams {
    curve(MAIN.0, &MAIN.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_multiplication_is_a_homomorphism(seed in any::<u64>(), a in -2000i64..2000, b in -2000i64..2000) {
        let c = main_curve();
        let d = random_divisor(&c, &mut rng(seed)).unwrap();
        let lhs = scalar_mul(&c, &d, &BigInt::from(a + b)).unwrap();
        let rhs = compose_reduce(
            &c,
            &scalar_mul(&c, &d, &BigInt::from(a)).unwrap(),
            &scalar_mul(&c, &d, &BigInt::from(b)).unwrap(),
        ).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn addition_is_associative_and_commutative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let c = main_curve();
        let [a, b, d] = [s1, s2, s3].map(|s| random_divisor(&c, &mut rng(s)).unwrap());
        let add = |x: &ReducedDivisor, y: &ReducedDivisor| compose_reduce(&c, x, y).unwrap();
        prop_assert_eq!(add(&a, &b), add(&b, &a));
        prop_assert_eq!(add(&add(&a, &b), &d), add(&a, &add(&b, &d)));
        prop_assert!(add(&a, &negate(&c, &a)).is_identity());
        prop_assert!(mumford_ok(&c, &add(&a, &b)));
    }

    #[test]
    fn frobenius_commutes_with_addition(s1 in any::<u64>(), s2 in any::<u64>()) {
        let ctx = context(SMALL);
        let mut r1 = rng(s1);
        let mut r2 = rng(s2);
        let a = random_divisor(&ctx.curve_k, &mut r1).unwrap();
        let b = random_divisor(&ctx.curve_k, &mut r2).unwrap();
        let sum = compose_reduce(&ctx.curve_k, &a, &b).unwrap();
        prop_assert_eq!(
            ctx.frobenius(&sum),
            compose_reduce(&ctx.curve_k, &ctx.frobenius(&a), &ctx.frobenius(&b)).unwrap()
        );
    }

    #[test]
    fn final_exponentiation_lands_in_mu_r(seed in any::<u64>()) {
        let ctx = context(SMALL);
        let v = FieldElement::random_nonzero(&ctx.pairing_field, &mut rng(seed));
        let w = ctx.final_exponentiation(&v, FinalExpMode::Plain).unwrap();
        prop_assert!(w.pow_u64(ctx.r).is_one());
        prop_assert_eq!(w, ctx.final_exponentiation(&v, FinalExpMode::Split).unwrap());
    }
}
