//! Miller functions `f_{s,D}` with divisor `sD - rho(sD)`, evaluated at the
//! effective part of a second divisor and normalized at infinity.
//!
//! Functions are carried as `f1 / f2` with `y = v2(x)` substituted and
//! reduced modulo `u2`, plus the scalar `f3 = lc_inf(f)` for the uniformizer
//! `z = x^g / y`.  Evaluation at `eps(D2)` is a resultant against `u2`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use crate::curve::CurveParams;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldEmbedding};
use crate::jacobian::{cantor_core, negate, scalar_mul, CantorStep, EvalContext, ReducedDivisor};
use crate::poly::Poly;

pub use crate::poly::{eval_at_roots, resultant};

/// Running state of Algorithm 1: numerator and denominator modulo `u2`,
/// and the leading coefficient at infinity.
#[derive(Clone, Debug)]
pub struct MillerAccumulator {
    pub f1: Poly,
    pub f2: Poly,
    pub f3: FieldElement,
}

impl MillerAccumulator {
    fn new(eval: &ReducedDivisor, loop_field: &crate::field::Field) -> Self {
        MillerAccumulator {
            f1: Poly::one(eval.field()),
            f2: Poly::one(eval.field()),
            f3: FieldElement::one(loop_field),
        }
    }

    fn square(&mut self, u2: &Poly, track_den: bool) {
        self.f1 = self.f1.mulmod(&self.f1, u2);
        if track_den {
            self.f2 = self.f2.mulmod(&self.f2, u2);
        }
        self.f3 = self.f3.square();
    }

    fn absorb(&mut self, step: &CantorStep, u2: &Poly, track_den: bool) {
        self.f1 = self.f1.mulmod(&step.f, u2);
        if track_den {
            self.f2 = self.f2.mulmod(&step.g, u2);
        }
        self.f3 = &self.f3 * &step.lc;
    }

    /// `Res(f1, u2) / (f3^{deg u2} Res(f2, u2))`, the normalized value at
    /// `eps(D2)`.
    fn value(&self, eval: &ReducedDivisor, emb: &FieldEmbedding) -> Result<FieldElement> {
        let u2 = &eval.u;
        let num = eval_at_roots(&self.f1, u2);
        let den = eval_at_roots(&self.f2, u2);
        if num.is_zero() || den.is_zero() {
            return Err(Error::ZeroEncountered);
        }
        let lc = emb.embed(&self.f3).pow_u64(eval.weight() as u64);
        Ok(&num * &(&lc * &den).inv()?)
    }
}

/// A normalized function value together with the reduced divisor it
/// produced (`rho(sD)` for a Miller function).
#[derive(Clone, Debug)]
pub struct MillerValue {
    pub value: FieldElement,
    pub multiple: ReducedDivisor,
}

/// Algorithm 1 without the final power: `f^norm_{s,D1}(eps(D2))` for any
/// integer `s`.
///
/// `D1` and the curve live over the loop field; `D2` lives over the
/// evaluation field and `emb` maps the former into the latter.  Negative `s`
/// uses `f_{-m,D} = 1 / (f_{m,D} * u_{rho(mD)})`, whose divisor is exactly
/// `-mD - rho(-mD)`.  When `track_den` is false the denominator `f2` is
/// never formed (denominator elimination).
pub fn miller_function(
    curve: &CurveParams,
    d1: &ReducedDivisor,
    d2: &ReducedDivisor,
    s: &BigInt,
    emb: &FieldEmbedding,
    track_den: bool,
) -> Result<MillerValue> {
    let eval_field = d2.field().clone();
    if s.is_zero() {
        return Ok(MillerValue {
            value: FieldElement::one(&eval_field),
            multiple: ReducedDivisor::identity(curve.field()),
        });
    }
    let m = s.magnitude();
    let positive = miller_positive(curve, d1, d2, m, emb, track_den)?;
    if s.sign() == Sign::Plus {
        return Ok(positive);
    }
    let correction = eval_at_roots(&positive.multiple.u.embed(emb), &d2.u);
    if correction.is_zero() {
        return Err(Error::ZeroEncountered);
    }
    Ok(MillerValue {
        value: (&positive.value * &correction).inv()?,
        multiple: negate(curve, &positive.multiple),
    })
}

fn miller_positive(
    curve: &CurveParams,
    d1: &ReducedDivisor,
    d2: &ReducedDivisor,
    s: &BigUint,
    emb: &FieldEmbedding,
    track_den: bool,
) -> Result<MillerValue> {
    let eval_field = d2.field().clone();
    if d2.is_identity() {
        return Ok(MillerValue {
            value: FieldElement::one(&eval_field),
            multiple: scalar_mul(curve, d1, &BigInt::from(s.clone()))?,
        });
    }
    let ctx = EvalContext { at: d2, emb };
    let mut acc = MillerAccumulator::new(d2, curve.field());
    let mut d = d1.clone();
    let u2 = &d2.u;
    for i in (0..s.bits().saturating_sub(1)).rev() {
        acc.square(u2, track_den);
        let step = cantor_core(curve, &d, &d, Some(&ctx))?;
        acc.absorb(&step, u2, track_den);
        d = step.sum;
        if s.bit(i) {
            let step = cantor_core(curve, &d, d1, Some(&ctx))?;
            acc.absorb(&step, u2, track_den);
            d = step.sum;
        }
    }
    Ok(MillerValue {
        value: acc.value(d2, emb)?,
        multiple: d,
    })
}

/// `f^norm_{s,D1}(eps(D2))^d`, Algorithm 1 as stated.
pub fn miller_eval(
    curve: &CurveParams,
    d1: &ReducedDivisor,
    d2: &ReducedDivisor,
    s: &BigUint,
    d: &BigUint,
    emb: &FieldEmbedding,
) -> Result<FieldElement> {
    let v = miller_function(curve, d1, d2, &BigInt::from(s.clone()), emb, true)?;
    Ok(v.value.pow(d))
}

/// Value at `eps(at)` of the normalized Cantor function `h_{A,B}` with
/// divisor `rho(A) + rho(B) - rho(A + B)`.
pub fn cantor_function_value(
    curve: &CurveParams,
    a: &ReducedDivisor,
    b: &ReducedDivisor,
    at: &ReducedDivisor,
    emb: &FieldEmbedding,
) -> Result<MillerValue> {
    if at.is_identity() {
        return Ok(MillerValue {
            value: FieldElement::one(at.field()),
            multiple: cantor_core(curve, a, b, None)?.sum,
        });
    }
    let step = cantor_core(curve, a, b, Some(&EvalContext { at, emb }))?;
    let acc = MillerAccumulator {
        f1: step.f.clone(),
        f2: step.g.clone(),
        f3: step.lc.clone(),
    };
    Ok(MillerValue {
        value: acc.value(at, emb)?,
        multiple: step.sum,
    })
}

/// `(s, h)` describing `f_{s,h,D}` with divisor `sum h_i rho(s^i D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MillerFunctionSpec {
    pub s: BigInt,
    pub h: Vec<BigInt>,
}

impl MillerFunctionSpec {
    /// `h(s)`.
    pub fn h_at_s(&self) -> BigInt {
        self.h.iter().rev().fold(BigInt::zero(), |acc, c| acc * &self.s + c)
    }

    /// Sum of `log2 |h_i|` over nonzero coefficients, as bit lengths.
    pub fn loop_bits(&self) -> u64 {
        self.h.iter().filter(|c| !c.is_zero()).map(|c| c.magnitude().bits()).sum()
    }
}

/// `f^norm_{s,h,D2}(eps(D1))` for an `r`-torsion `D2`.
///
/// Builds `D_i = rho(s^i D2)`, multiplies the Miller values
/// `f_{h_i, D_i}` and closes the chain with Cantor functions so that the
/// total divisor is `sum h_i rho(s^i D2)`.
pub fn generalized_miller_eval(
    curve: &CurveParams,
    d2: &ReducedDivisor,
    d1: &ReducedDivisor,
    spec: &MillerFunctionSpec,
    r: u64,
    emb: &FieldEmbedding,
) -> Result<FieldElement> {
    let rb = BigInt::from(r);
    if !(spec.h_at_s() % &rb).is_zero() {
        return Err(Error::BadH);
    }
    let s_mod = ((&spec.s % &rb) + &rb) % &rb;
    let mut power = BigInt::one();
    let mut value = FieldElement::one(d1.field());
    let mut pieces = Vec::with_capacity(spec.h.len());
    for h_i in &spec.h {
        let d_i = scalar_mul(curve, d2, &power)?;
        let mv = miller_function(curve, &d_i, d1, h_i, emb, true)?;
        value = &value * &mv.value;
        pieces.push(mv.multiple);
        power = (&power * &s_mod) % &rb;
    }
    value = &value * &combine_chain(curve, &pieces, d1, emb)?;
    Ok(value)
}

/// Value of the function with divisor `sum B_j - rho(sum B_j)` built from
/// Cantor steps, accumulating from the highest index down.
pub fn combine_chain(
    curve: &CurveParams,
    pieces: &[ReducedDivisor],
    at: &ReducedDivisor,
    emb: &FieldEmbedding,
) -> Result<FieldElement> {
    let mut value = FieldElement::one(at.field());
    let Some((last, rest)) = pieces.split_last() else {
        return Ok(value);
    };
    let mut acc = last.clone();
    for b in rest.iter().rev() {
        let step = cantor_function_value(curve, &acc, b, at, emb)?;
        value = &value * &step.value;
        acc = step.multiple;
    }
    Ok(value)
}

/// A function `a(x) + b(x) y` on the curve.
#[derive(Clone, Debug)]
pub struct BivariateFunction {
    pub a: Poly,
    pub b: Poly,
}

impl BivariateFunction {
    /// Pole order at infinity; `None` for the zero function.
    pub fn pole_order(&self, genus: usize) -> Option<i64> {
        let pa = (!self.a.is_zero()).then(|| 2 * self.a.degree());
        let pb = (!self.b.is_zero()).then(|| 2 * self.b.degree() + 2 * genus as i64 + 1);
        pa.max(pb)
    }

    /// Coefficient of the dominant monomial: `lc(x) = lc(y) = 1` for
    /// `z = x^g / y`, and pole orders of `x^i` (even) and `x^i y` (odd)
    /// never tie.
    fn lead(&self, genus: usize) -> Option<FieldElement> {
        let pa = (!self.a.is_zero()).then(|| 2 * self.a.degree());
        let pb = (!self.b.is_zero()).then(|| 2 * self.b.degree() + 2 * genus as i64 + 1);
        match (pa, pb) {
            (None, None) => None,
            (Some(x), Some(y)) if y > x => Some(self.b.lead()),
            (Some(_), _) => Some(self.a.lead()),
            (None, Some(_)) => Some(self.b.lead()),
        }
    }
}

/// `lc_inf(scalar * num / den)` for the uniformizer `z = x^g / y`, checking
/// that the pole order at infinity equals `order`.
pub fn leading_coeff_at_infinity(
    order: i64,
    num: &BivariateFunction,
    den: &BivariateFunction,
    scalar: &FieldElement,
    genus: usize,
) -> Result<FieldElement> {
    let (Some(pn), Some(pd)) = (num.pole_order(genus), den.pole_order(genus)) else {
        return Err(Error::OrderMismatch {
            expected: order,
            found: i64::MIN,
        });
    };
    if scalar.is_zero() {
        return Err(Error::OrderMismatch {
            expected: order,
            found: i64::MIN,
        });
    }
    if pn - pd != order {
        return Err(Error::OrderMismatch {
            expected: order,
            found: pn - pd,
        });
    }
    let ln = num.lead(genus).expect("nonzero");
    let ld = den.lead(genus).expect("nonzero");
    Ok(&(scalar * &ln) * &ld.inv()?)
}

/// Convenience for the common case of a plain polynomial function
/// `a(x) + b(x) y`.
pub fn lc_of(f: &BivariateFunction, genus: usize) -> Result<FieldElement> {
    let field = f.a.field().clone();
    let order = f.pole_order(genus).unwrap_or(0);
    let one = BivariateFunction {
        a: Poly::one(&field),
        b: Poly::zero(&field),
    };
    leading_coeff_at_infinity(order, f, &one, &FieldElement::one(&field), genus)
}

/// `log2 s` as a real number.
pub fn loop_log2(s: &BigInt) -> f64 {
    let m = s.magnitude();
    if m.is_zero() {
        return 0.0;
    }
    m.to_f64().map(f64::log2).unwrap_or_else(|| m.bits() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDescriptor;
    use crate::jacobian::random_divisor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn curve() -> CurveParams {
        CurveParams::with_f(&FieldDescriptor::prime(11).unwrap(), 2, &[3, 1, 0, 2, 0, 1]).unwrap()
    }

    #[test]
    fn trivial_scalars() {
        let c = curve();
        let id = FieldEmbedding::identity(c.field());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_divisor(&c, &mut rng).unwrap();
        let b = random_divisor(&c, &mut rng).unwrap();
        let v = miller_function(&c, &a, &b, &BigInt::one(), &id, true).unwrap();
        assert!(v.value.is_one());
        assert_eq!(v.multiple, a);
        let z = miller_function(&c, &a, &b, &BigInt::zero(), &id, true).unwrap();
        assert!(z.value.is_one() && z.multiple.is_identity());
        let e = miller_function(&c, &a, &ReducedDivisor::identity(c.field()), &BigInt::from(5), &id, true).unwrap();
        assert!(e.value.is_one());
    }

    #[test]
    fn multiple_matches_scalar_mul() {
        let c = curve();
        let id = FieldEmbedding::identity(c.field());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for s in [2i64, 3, 7, 12, 100, -5] {
            let a = random_divisor(&c, &mut rng).unwrap();
            let b = random_divisor(&c, &mut rng).unwrap();
            if let Ok(v) = miller_function(&c, &a, &b, &BigInt::from(s), &id, true) {
                assert_eq!(v.multiple, scalar_mul(&c, &a, &BigInt::from(s)).unwrap());
            }
        }
    }

    #[test]
    fn lc_basics() {
        let f = FieldDescriptor::prime(7).unwrap();
        let c = FieldElement::from_u64(&f, 3);
        let constant = BivariateFunction { a: Poly::constant(c.clone()), b: Poly::zero(&f) };
        assert_eq!(lc_of(&constant, 2).unwrap(), c);
        let y = BivariateFunction { a: Poly::from_i64s(&f, &[1, 2, 3]), b: Poly::from_i64s(&f, &[4]) };
        assert_eq!(y.pole_order(2), Some(5));
        assert_eq!(lc_of(&y, 2).unwrap(), FieldElement::from_u64(&f, 4));
        let big_v = BivariateFunction { a: Poly::from_i64s(&f, &[1, 2, 3, 5]), b: Poly::from_i64s(&f, &[4]) };
        assert_eq!(lc_of(&big_v, 2).unwrap(), FieldElement::from_u64(&f, 5));
        let one = BivariateFunction { a: Poly::one(&f), b: Poly::zero(&f) };
        assert!(matches!(
            leading_coeff_at_infinity(3, &y, &one, &FieldElement::one(&f), 2),
            Err(Error::OrderMismatch { expected: 3, found: 5 })
        ));
        // normalization is idempotent
        let lc = lc_of(&big_v, 2).unwrap();
        let normed = BivariateFunction { a: big_v.a.scale(&lc.inv().unwrap()), b: big_v.b.scale(&lc.inv().unwrap()) };
        assert!(lc_of(&normed, 2).unwrap().is_one());
    }
}
