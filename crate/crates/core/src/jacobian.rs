//! Divisor classes in Mumford representation and Cantor's algorithm.
//!
//! A class is stored as its reduced representative `(u, v)`: `u` monic,
//! `deg v < deg u <= g`, `u | F - vH - v^2`.  The identity is `(1, 0)`.
//! Polynomials live over whatever field the divisor is defined over; the
//! curve passed alongside must have its coefficients in that same field.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use rand::Rng;

use crate::curve::{AffinePoint, CurveParams};
use crate::error::{Error, Result};
use crate::field::{same_field, Field, FieldElement, FieldEmbedding};
use crate::poly::{eval_at_roots, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedDivisor {
    pub u: Poly,
    pub v: Poly,
}

impl ReducedDivisor {
    pub fn identity(field: &Field) -> Self {
        ReducedDivisor {
            u: Poly::one(field),
            v: Poly::zero(field),
        }
    }

    /// `P - P_inf`.
    pub fn from_point(p: &AffinePoint) -> Self {
        ReducedDivisor {
            u: Poly::linear(&p.x),
            v: Poly::constant(p.y.clone()),
        }
    }

    /// The class of `sum P_i - n P_inf`.
    pub fn from_points(curve: &CurveParams, pts: &[AffinePoint]) -> Result<Self> {
        let mut acc = Self::identity(curve.field());
        for p in pts {
            if !curve.is_on_curve(p) {
                return Err(Error::PointNotOnCurve);
            }
            acc = compose_reduce(curve, &acc, &Self::from_point(p))?;
        }
        Ok(acc)
    }

    pub fn field(&self) -> &Field {
        self.u.field()
    }

    pub fn is_identity(&self) -> bool {
        self.u.degree() == 0
    }

    /// `deg u`, the number of affine points in the effective part.
    pub fn weight(&self) -> usize {
        self.u.degree() as usize
    }

    /// Checks Mumford's conditions (1)-(3) and `deg u <= g`.
    pub fn validate(&self, curve: &CurveParams) -> Result<()> {
        check_semi_reduced(curve, &self.u, &self.v)?;
        if self.u.degree() > curve.genus as i64 {
            return Err(Error::InvariantViolation(format!(
                "deg u = {} exceeds g = {}",
                self.u.degree(),
                curve.genus
            )));
        }
        Ok(())
    }

    pub fn embed(&self, emb: &FieldEmbedding) -> Self {
        ReducedDivisor {
            u: self.u.embed(emb),
            v: self.v.embed(emb),
        }
    }

    /// Applies `a -> a^(p^e)` to every coefficient.
    pub fn frobenius_power(&self, e: usize) -> Self {
        ReducedDivisor {
            u: self.u.frobenius_power(e),
            v: self.v.frobenius_power(e),
        }
    }

    /// Whether every coefficient lies in the subfield of degree `l`.
    pub fn is_defined_over(&self, l: usize) -> Result<bool> {
        for c in self.u.coeffs().iter().chain(self.v.coeffs()) {
            if !c.subfield_test(l)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn check_semi_reduced(curve: &CurveParams, u: &Poly, v: &Poly) -> Result<()> {
    if !same_field(u.field(), curve.field()) || !same_field(v.field(), curve.field()) {
        return Err(Error::DescriptorMismatch);
    }
    if !u.is_monic() {
        return Err(Error::InvariantViolation("u is not monic".into()));
    }
    if v.degree() >= u.degree() {
        return Err(Error::InvariantViolation("deg v >= deg u".into()));
    }
    let n = &(&curve.f - &(v * &curve.h)) - &(v * v);
    if !n.rem(u).is_zero() {
        return Err(Error::InvariantViolation("u does not divide F - vH - v^2".into()));
    }
    Ok(())
}

/// `deg u < g` and nonzero: the effective part has fewer than `g` points.
pub fn is_degenerate(d: &ReducedDivisor, genus: usize) -> bool {
    let w = d.weight();
    w > 0 && w < genus
}

/// The inverse class `(u, -v - H mod u)`.
pub fn negate(curve: &CurveParams, d: &ReducedDivisor) -> ReducedDivisor {
    ReducedDivisor {
        u: d.u.clone(),
        v: (&(-&d.v) - &curve.h).rem(&d.u),
    }
}

/// Output of [`cantor_with_functions`]: the reduced sum and the auxiliary
/// function `h = f/g` (with `y -> v(x)`, modulo `u` of the evaluation
/// divisor) together with its leading coefficient at infinity.
#[derive(Clone, Debug)]
pub struct CantorStep {
    pub sum: ReducedDivisor,
    pub f: Poly,
    pub g: Poly,
    pub lc: FieldElement,
}

/// Evaluation context for the function-tracking Cantor: reduce modulo `u`
/// of `at` after substituting `y = v(x)`; `emb` carries the divisor's field
/// into the field of `at`.
pub(crate) struct EvalContext<'a> {
    pub at: &'a ReducedDivisor,
    pub emb: &'a FieldEmbedding,
}

/// Cantor's algorithm with auxiliary-function tracking.  When `eval` is
/// `None` only the sum is computed and `f`, `g`, `lc` are returned as ones.
pub(crate) fn cantor_core(
    curve: &CurveParams,
    d1: &ReducedDivisor,
    d2: &ReducedDivisor,
    eval: Option<&EvalContext<'_>>,
) -> Result<CantorStep> {
    let field = curve.field();
    let genus = curve.genus as i64;
    let (u1, v1, u2, v2) = (&d1.u, &d1.v, &d2.u, &d2.v);

    // Stage 1: composition.
    let (dd1, e1, e2) = u1.xgcd(u2);
    let (d, c1, c2) = dd1.xgcd(&(&(v1 + v2) + &curve.h));
    let (s1, s2, s3) = (&c1 * &e1, &c1 * &e2, c2);
    let mut uu = (u1 * u2).div_exact(&(&d * &d))?;
    let numer = &(&(&(&s1 * u1) * v2) + &(&(&s2 * u2) * v1)) + &(&s3 * &(&(v1 * v2) + &curve.f));
    let mut vv = numer.div_exact(&d)?.rem(&uu);

    let (mut f, mut g, mut lc) = match eval {
        Some(ctx) => (
            d.embed(ctx.emb).rem(&ctx.at.u),
            Poly::one(ctx.at.field()),
            FieldElement::one(field),
        ),
        None => (Poly::zero(field), Poly::zero(field), FieldElement::one(field)),
    };

    // Stage 2: reduction.
    while uu.degree() > genus {
        let before = uu.degree();
        let up = (&(&curve.f - &(&vv * &curve.h)) - &(&vv * &vv)).div_exact(&uu)?.monic();
        let vp = (&(-&vv) - &curve.h).rem(&up);
        if let Some(ctx) = eval {
            let at_u = &ctx.at.u;
            f = f.mulmod(&(&ctx.at.v - &vv.embed(ctx.emb)), at_u);
            g = g.mulmod(&up.embed(ctx.emb), at_u);
            if vv.degree() > genus {
                lc = &(-&vv.lead()) * &lc;
            }
        }
        uu = up;
        vv = vp;
        assert!(uu.degree() < before, "Cantor reduction must shrink deg u");
    }
    let sum = ReducedDivisor { v: vv.rem(&uu), u: uu };
    if eval.is_none() {
        f = Poly::one(field);
        g = Poly::one(field);
    }
    Ok(CantorStep { sum, f, g, lc })
}

/// The reduced representative of `D1 + D2`.
pub fn compose_reduce(curve: &CurveParams, d1: &ReducedDivisor, d2: &ReducedDivisor) -> Result<ReducedDivisor> {
    check_semi_reduced(curve, &d1.u, &d1.v)?;
    check_semi_reduced(curve, &d2.u, &d2.v)?;
    Ok(cantor_core(curve, d1, d2, None)?.sum)
}

/// Cantor's algorithm with the auxiliary function `h_{D1,D2}` of divisor
/// `rho(D1) + rho(D2) - rho(D1 + D2)`, returned as `f/g` evaluated modulo
/// the `u` of `deval` (with `y = v(x)` of `deval`), and `lc_inf(h)`.
///
/// `deval` may live over an extension of the divisors' field; `emb` maps the
/// latter into the former.
pub fn cantor_with_functions(
    curve: &CurveParams,
    d1: &ReducedDivisor,
    d2: &ReducedDivisor,
    deval: &ReducedDivisor,
    emb: &FieldEmbedding,
) -> Result<CantorStep> {
    check_semi_reduced(curve, &d1.u, &d1.v)?;
    check_semi_reduced(curve, &d2.u, &d2.v)?;
    let step = cantor_core(curve, d1, d2, Some(&EvalContext { at: deval, emb }))?;
    if deval.weight() > 0
        && (eval_at_roots(&step.f, &deval.u).is_zero() || eval_at_roots(&step.g, &deval.u).is_zero())
    {
        return Err(Error::ZeroEncountered);
    }
    Ok(step)
}

/// `n * D` by double-and-add; negative `n` goes through the inverse.
pub fn scalar_mul(curve: &CurveParams, d: &ReducedDivisor, n: &BigInt) -> Result<ReducedDivisor> {
    let base = if n.sign() == Sign::Minus { negate(curve, d) } else { d.clone() };
    let m = n.magnitude();
    let mut acc = ReducedDivisor::identity(curve.field());
    for i in (0..m.bits()).rev() {
        acc = cantor_core(curve, &acc, &acc, None)?.sum;
        if m.bit(i) {
            acc = cantor_core(curve, &acc, &base, None)?.sum;
        }
    }
    Ok(acc)
}

pub fn scalar_mul_u64(curve: &CurveParams, d: &ReducedDivisor, n: u64) -> Result<ReducedDivisor> {
    scalar_mul(curve, d, &BigInt::from(n))
}

/// The `q`-power Frobenius on a divisor, `q = p^base_degree`.
pub fn frobenius_on_divisor(d: &ReducedDivisor, base_degree: usize) -> ReducedDivisor {
    d.frobenius_power(base_degree)
}

/// A random class: the sum of `g` random affine points.
pub fn random_divisor<R: Rng + ?Sized>(curve: &CurveParams, rng: &mut R) -> Result<ReducedDivisor> {
    let pts: Vec<AffinePoint> = (0..curve.genus).map(|_| curve.random_point(rng)).collect();
    ReducedDivisor::from_points(curve, &pts)
}

/// Default number of draws before [`sample_torsion`] gives up.
pub const TORSION_RETRIES: usize = 64;

/// A nonzero element of order `r` in a Jacobian of known order.
///
/// Random classes are multiplied by the cofactor `order / r^e`, which lands
/// in the Sylow `r`-subgroup; multiplying by `r` until the next step would
/// give zero then yields an element of order exactly `r`.
pub fn sample_torsion<R: Rng + ?Sized>(
    curve: &CurveParams,
    group_order: &BigUint,
    r: u64,
    rng: &mut R,
) -> Result<ReducedDivisor> {
    let rb = BigUint::from(r);
    if !(group_order % &rb).is_zero() {
        return Err(Error::NoTorsion(r));
    }
    let mut cofactor = group_order.clone();
    while (&cofactor % &rb).is_zero() {
        cofactor /= &rb;
    }
    let cofactor = BigInt::from(cofactor);
    let rr = BigInt::from(r);
    for _ in 0..TORSION_RETRIES {
        let mut x = scalar_mul(curve, &random_divisor(curve, rng)?, &cofactor)?;
        if x.is_identity() {
            continue;
        }
        loop {
            let next = scalar_mul(curve, &x, &rr)?;
            if next.is_identity() {
                return Ok(x);
            }
            x = next;
        }
    }
    Err(Error::RetriesExhausted)
}

/// Evaluates `sum c_i pi^i` at `d`, with `pi` the `q`-power Frobenius.
pub fn apply_frobenius_polynomial(
    curve: &CurveParams,
    d: &ReducedDivisor,
    coeffs: &[u64],
    base_degree: usize,
) -> Result<ReducedDivisor> {
    let mut acc = ReducedDivisor::identity(curve.field());
    for &c in coeffs.iter().rev() {
        acc = frobenius_on_divisor(&acc, base_degree);
        let term = scalar_mul_u64(curve, d, c)?;
        acc = cantor_core(curve, &acc, &term, None)?.sum;
    }
    Ok(acc)
}

/// Coefficients of `P(x) / (x - lambda)` over `Z/r`, low-to-high.  Fails
/// with [`Error::ProjectionDegenerate`] when `lambda` is a multiple root of
/// `P mod r`, and with [`Error::InvariantViolation`] when it is not a root.
pub fn eigen_projector(charpoly: &[BigInt], r: u64, lambda: u64) -> Result<Vec<u64>> {
    let rb = BigInt::from(r);
    let p: Vec<u64> = charpoly
        .iter()
        .map(|c| {
            let m = ((c % &rb) + &rb) % &rb;
            m.iter_u64_digits().next().unwrap_or(0)
        })
        .collect();
    // Synthetic division by (x - lambda).
    let n = p.len() - 1;
    let mut q = vec![0u64; n];
    let mut carry = 0u64;
    for i in (0..n).rev() {
        carry = (p[i + 1] as u128 + carry as u128 * lambda as u128 % r as u128) as u64 % r;
        q[i] = carry;
    }
    let rem = (p[0] as u128 + carry as u128 * lambda as u128) % r as u128;
    if rem != 0 {
        return Err(Error::InvariantViolation(format!("{lambda} is not an eigenvalue mod {r}")));
    }
    let qv: u128 = q
        .iter()
        .rev()
        .fold(0u128, |acc, &c| (acc * lambda as u128 + c as u128) % r as u128);
    if qv == 0 {
        return Err(Error::ProjectionDegenerate(lambda));
    }
    Ok(q)
}

/// Projection onto the `lambda`-eigenspace of Frobenius on `r`-torsion.
pub fn project_eigenspace(
    curve: &CurveParams,
    d: &ReducedDivisor,
    charpoly: &[BigInt],
    r: u64,
    lambda: u64,
    base_degree: usize,
) -> Result<ReducedDivisor> {
    let q = eigen_projector(charpoly, r, lambda)?;
    apply_frobenius_polynomial(curve, d, &q, base_degree)
}

/// Order of `d`, searched among the divisors of a known multiple.
pub fn order_dividing(curve: &CurveParams, d: &ReducedDivisor, multiple: u64) -> Result<u64> {
    let factors = crate::arith::factor(multiple, Default::default())
        .map_err(|e| Error::InvariantViolation(format!("cannot factor {}", e.unfactored)))?;
    let mut order = multiple;
    for (p, _) in factors {
        while order.is_multiple_of(p) && scalar_mul_u64(curve, d, order / p)?.is_identity() {
            order /= p;
        }
    }
    if !scalar_mul_u64(curve, d, order)?.is_identity() {
        return Err(Error::InvariantViolation("order does not divide the given multiple".into()));
    }
    Ok(order)
}

/// Enumerates every reduced divisor of a curve over a small field, in a
/// canonical order.  Intended for brute-force cross-checks.
pub fn all_divisors(curve: &CurveParams) -> Result<Vec<ReducedDivisor>> {
    let field = curve.field();
    let q = field
        .order()
        .iter_u64_digits()
        .next()
        .filter(|_| field.order().bits() <= 16)
        .ok_or_else(|| Error::TooLarge(field.order().to_string()))?;
    let elems: Vec<FieldElement> = (0..q).map(|i| FieldElement::from_index(field, i)).collect();
    let mut out = vec![ReducedDivisor::identity(field)];
    // All monic u of degree 1..=g, then every v of smaller degree satisfying
    // the divisibility condition.
    for deg in 1..=curve.genus {
        let mut idx = vec![0usize; deg];
        loop {
            let mut coeffs: Vec<FieldElement> = idx.iter().map(|&i| elems[i].clone()).collect();
            coeffs.push(FieldElement::one(field));
            let u = Poly::new(field, coeffs);
            let mut vidx = vec![0usize; deg];
            loop {
                let v = Poly::new(field, vidx.iter().map(|&i| elems[i].clone()).collect());
                if check_semi_reduced(curve, &u, &v).is_ok() {
                    out.push(ReducedDivisor { u: u.clone(), v });
                }
                if !odometer(&mut vidx, q as usize) {
                    break;
                }
            }
            if !odometer(&mut idx, q as usize) {
                break;
            }
        }
    }
    Ok(out)
}

fn odometer(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}
