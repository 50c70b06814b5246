//! Randomized verification suite: bilinearity of every pairing plus the
//! identities relating them, run on a fixed context.
//!
//! Each (check, trial) pair draws from its own ChaCha stream derived from the
//! seed, so results do not depend on how trials are scheduled.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{mul_mod, pow_mod};
use crate::error::Result;
use crate::field::FieldElement;
use crate::jacobian::{scalar_mul_u64, ReducedDivisor};
use crate::pairings::{
    lift_root_of_unity, short_vercauteren_expansion, FinalExpMode, HvSpec, PairingContext, RateSpec,
};

/// Largest `r` for which the Vercauteren check searches a short expansion
/// instead of using the base-`q` digits of `r`.
const SHORT_EXPANSION_LIMIT: u64 = 1 << 16;
const MAX_REPORTED_ERRORS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().map(|c| c.passed).sum()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

type Trial<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> Result<bool> + Sync + 'a>;

struct Suite<'a> {
    ctx: &'a PairingContext,
    checks: Vec<(String, Trial<'a>)>,
}

impl<'a> Suite<'a> {
    fn add(&mut self, name: &str, f: impl Fn(&mut ChaCha8Rng) -> Result<bool> + Sync + 'a) {
        self.checks.push((name.to_string(), Box::new(f)));
    }

    /// `e(aX, bY) = e(X, Y)^{ab}` with `X, Y` drawn by the samplers.
    fn bilinear(
        &mut self,
        name: &str,
        first: fn(&PairingContext, &mut ChaCha8Rng) -> Result<ReducedDivisor>,
        second: fn(&PairingContext, &mut ChaCha8Rng) -> Result<ReducedDivisor>,
        pairing: impl Fn(&ReducedDivisor, &ReducedDivisor) -> Result<FieldElement> + Sync + 'a,
    ) {
        let ctx = self.ctx;
        self.add(&format!("{name} bilinearity"), move |rng| {
            let x = first(ctx, rng)?;
            let y = second(ctx, rng)?;
            let a = rng.gen_range(1..ctx.r);
            let b = rng.gen_range(1..ctx.r);
            let lhs = pairing(&mul(ctx, &x, a)?, &mul(ctx, &y, b)?)?;
            Ok(lhs == pairing(&x, &y)?.pow_u64(mul_mod(a, b, ctx.r)))
        });
    }
}

fn mul(ctx: &PairingContext, d: &ReducedDivisor, n: u64) -> Result<ReducedDivisor> {
    scalar_mul_u64(&ctx.curve_k, d, n)
}

fn torsion(ctx: &PairingContext, rng: &mut ChaCha8Rng) -> Result<ReducedDivisor> {
    ctx.sample_r_torsion(ctx.k, rng)
}

fn g1(ctx: &PairingContext, rng: &mut ChaCha8Rng) -> Result<ReducedDivisor> {
    ctx.sample_g1(rng)
}

fn g2(ctx: &PairingContext, rng: &mut ChaCha8Rng) -> Result<ReducedDivisor> {
    ctx.sample_g2(rng)
}

/// `m r` as base-`q` digits, or a short expansion when `r` is small.
pub fn default_vercauteren_expansion(ctx: &PairingContext) -> (Vec<BigInt>, BigInt) {
    if ctx.r <= SHORT_EXPANSION_LIMIT {
        if let Some(e) = short_vercauteren_expansion(&ctx.q, ctx.r, 1, 2 * ctx.r) {
            return e;
        }
    }
    let q = BigInt::from(ctx.q.clone());
    let mut rest = BigInt::from(ctx.r);
    let mut digits = Vec::new();
    while rest > BigInt::from(0) {
        digits.push(&rest % &q);
        rest /= &q;
    }
    (digits, BigInt::from(1))
}

pub fn run_suite(ctx: &PairingContext, trials: usize, seed: u64) -> VerifyReport {
    let r = ctx.r;
    let k = ctx.k;
    let mut suite = Suite { ctx, checks: Vec::new() };

    suite.bilinear("tate", torsion, torsion, |a, b| ctx.tate(a, b));
    suite.bilinear("weil", torsion, torsion, |a, b| ctx.weil(a, b));
    suite.add("weil alternating", |rng| {
        let x = torsion(ctx, rng)?;
        let y = torsion(ctx, rng)?;
        Ok((&ctx.weil(&x, &y)? * &ctx.weil(&y, &x)?).is_one() && ctx.weil(&x, &x)?.is_one())
    });
    suite.add("final exponentiation modes", |rng| {
        let v = FieldElement::random_nonzero(&ctx.pairing_field, rng);
        Ok(ctx.final_exponentiation(&v, FinalExpMode::Plain)? == ctx.final_exponentiation(&v, FinalExpMode::Split)?)
    });
    if k.is_multiple_of(2) {
        suite.add("denominator elimination", |rng| {
            let q = g2(ctx, rng)?;
            let p = g1(ctx, rng)?;
            let mut full = ctx.clone();
            full.options.denominator_elimination = false;
            let mut short = ctx.clone();
            short.options.denominator_elimination = true;
            Ok(full.tate(&p, &q)? == short.tate(&p, &q)?)
        });
    }

    if k >= 2 {
        let e_twist = if k.is_multiple_of(2) { k as u64 / 2 } else { k as u64 };
        suite.bilinear("ate", g2, g1, |a, b| ctx.ate(a, b));
        suite.bilinear("ate_i", g2, g1, |a, b| ctx.ate_i(a, b, 1));
        let (h, m) = default_vercauteren_expansion(ctx);
        suite.bilinear("vercauteren", g2, g1, move |a, b| ctx.vercauteren(a, b, &h, &m));
        suite.bilinear("twisted_ate", g1, g2, move |a, b| ctx.twisted_ate(a, b, e_twist));
        suite.add("ate in mu_r without final exponentiation", |rng| {
            let v = ctx.ate(&g2(ctx, rng)?, &g1(ctx, rng)?)?;
            Ok(v.pow_u64(r).is_one())
        });
        let e = mul_mod(k as u64 % r, pow_mod(ctx.q_mod_r(), k as u64 - 1, r), r);
        suite.add("tate = ate^(k q^(k-1))", move |rng| {
            let q = g2(ctx, rng)?;
            let p = g1(ctx, rng)?;
            Ok(ctx.tate(&q, &p)? == ctx.ate(&q, &p)?.pow_u64(e))
        });
        if let Ok(s) = lift_root_of_unity(ctx.q_mod_r(), k as u64, r) {
            let spec_for = move |rng: &mut ChaCha8Rng, multiple: BigInt| {
                let h1 = BigInt::from(rng.gen_range(1..=r));
                HvSpec { s: BigInt::from(s), h: vec![multiple - &h1 * BigInt::from(s), h1] }
            };
            suite.bilinear("hv", g2, g1, move |a, b| {
                let spec = HvSpec { s: BigInt::from(s), h: vec![BigInt::from(r) - BigInt::from(s), BigInt::from(1)] };
                ctx.hv(a, b, &spec)
            });
            suite.add("hv = tate^(h(s)/r)", move |rng| {
                let c = rng.gen_range(1..r);
                let spec = spec_for(rng, BigInt::from(c) * BigInt::from(r));
                let q = g2(ctx, rng)?;
                let p = g1(ctx, rng)?;
                Ok(ctx.hv(&q, &p, &spec)? == ctx.tate(&q, &p)?.pow_u64(c))
            });
            suite.add("hv trivial when r^2 | h(s)", move |rng| {
                let spec = spec_for(rng, BigInt::from(r) * BigInt::from(r));
                Ok(ctx.hv(&g2(ctx, rng)?, &g1(ctx, rng)?, &spec)?.is_one())
            });
        }
        if k >= 3 {
            let rate = RateSpec::new(ctx, 1, 2).expect("k >= 3");
            suite.bilinear("rate", g2, g1, move |a, b| ctx.rate(a, b, &rate));
            suite.add("rate product = ratio = hv", move |rng| {
                let q = g2(ctx, rng)?;
                let p = g1(ctx, rng)?;
                let v = ctx.rate(&q, &p, &rate)?;
                Ok(v == ctx.rate_ratio(&q, &p, &rate)? && v == ctx.hv(&q, &p, &rate.to_hv(ctx))?)
            });
        }
    }

    let checks = suite
        .checks
        .par_iter()
        .enumerate()
        .map(|(ci, (name, trial))| {
            let mut outcome = CheckOutcome { name: name.clone(), passed: 0, failed: 0, errors: Vec::new() };
            for t in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((ci as u64) << 32) | t.to_u64().unwrap());
                match trial(&mut rng) {
                    Ok(true) => outcome.passed += 1,
                    Ok(false) => outcome.failed += 1,
                    Err(e) => {
                        outcome.failed += 1;
                        if outcome.errors.len() < MAX_REPORTED_ERRORS {
                            outcome.errors.push(e.to_string());
                        }
                    }
                }
            }
            outcome
        })
        .collect();
    VerifyReport { trials, seed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveParams;
    use crate::field::FieldDescriptor;

    #[test]
    fn reference_curve_passes() {
        let field = FieldDescriptor::prime(7).unwrap();
        let curve = CurveParams::with_f(&field, 2, &[6, 0, 0, 1, 0, 1]).unwrap();
        let ctx = PairingContext::new(&curve, 43).unwrap();
        let report = run_suite(&ctx, 3, 1);
        assert!(report.all_passed(), "{report:#?}");
        assert!(report.checks.len() >= 15);
        let again = run_suite(&ctx, 3, 1);
        assert_eq!(report.passed(), again.passed());
    }
}
