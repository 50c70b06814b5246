//! Hyperelliptic curves `y^2 + H(x) y = F(x)` of genus 1 or 2 in odd
//! characteristic, naive point counting and the Frobenius characteristic
//! polynomial.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{same_field, Field, FieldDescriptor, FieldElement, FieldEmbedding};
use crate::poly::Poly;

/// Largest field that may be enumerated element by element.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// Singularity is checked by scanning `F_{q^2}` up to this size, by a gcd
/// beyond it.
const SINGULARITY_SCAN_LIMIT: u64 = 1 << 16;

/// A curve `y^2 + H(x) y = F(x)` over the coefficient field of `h` and `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveParams {
    pub genus: usize,
    pub h: Poly,
    pub f: Poly,
}

/// An affine point `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffinePoint {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl CurveParams {
    /// Builds and validates a curve.
    pub fn new(genus: usize, h: Poly, f: Poly) -> Result<Self> {
        let c = CurveParams { genus, h, f };
        validate_curve(&c)?;
        Ok(c)
    }

    /// `y^2 = F(x)` with prime-subfield coefficients, low-to-high.
    pub fn with_f(field: &Field, genus: usize, f: &[i64]) -> Result<Self> {
        Self::new(genus, Poly::zero(field), Poly::from_i64s(field, f))
    }

    pub fn field(&self) -> &Field {
        self.f.field()
    }

    /// `q`, the size of the coefficient field.
    pub fn q(&self) -> &BigUint {
        self.field().order()
    }

    /// The same curve over a larger field.
    pub fn base_change(&self, emb: &FieldEmbedding) -> CurveParams {
        debug_assert!(same_field(emb.source(), self.field()));
        CurveParams {
            genus: self.genus,
            h: self.h.embed(emb),
            f: self.f.embed(emb),
        }
    }

    /// `H^2 + 4F`; the curve is `(2y + H)^2 = H^2 + 4F`.
    pub fn discriminant_poly(&self) -> Poly {
        let four = FieldElement::from_u64(self.field(), 4);
        &(&self.h * &self.h) + &self.f.scale(&four)
    }

    pub fn is_on_curve(&self, p: &AffinePoint) -> bool {
        let lhs = &(&p.y * &p.y) + &(&self.h.eval(&p.x) * &p.y);
        lhs == self.f.eval(&p.x)
    }

    /// `(x, y) -> (x, -y - H(x))`.
    pub fn involution(&self, p: &AffinePoint) -> Result<AffinePoint> {
        if !self.is_on_curve(p) {
            return Err(Error::PointNotOnCurve);
        }
        Ok(AffinePoint {
            x: p.x.clone(),
            y: &(-&p.y) - &self.h.eval(&p.x),
        })
    }

    /// The points above `x` (zero, one or two of them).
    pub fn points_above(&self, x: &FieldElement) -> Vec<AffinePoint> {
        let d = self.discriminant_poly().eval(x);
        let Some(s) = d.sqrt() else {
            return Vec::new();
        };
        let two_inv = FieldElement::from_u64(self.field(), 2).inv().expect("odd p");
        let hx = self.h.eval(x);
        let y1 = &(&s - &hx) * &two_inv;
        if s.is_zero() {
            return vec![AffinePoint { x: x.clone(), y: y1 }];
        }
        let y2 = &(&(-&s) - &hx) * &two_inv;
        vec![AffinePoint { x: x.clone(), y: y1 }, AffinePoint { x: x.clone(), y: y2 }]
    }

    /// A uniformly random `x` with a random choice among the points above it;
    /// `x` values without points are resampled.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> AffinePoint {
        loop {
            let x = FieldElement::random(self.field(), rng);
            let mut pts = self.points_above(&x);
            if pts.is_empty() {
                continue;
            }
            let i = rng.gen_range(0..pts.len());
            return pts.swap_remove(i);
        }
    }
}

/// Checks the model invariants: genus in {1, 2}, `F` monic of degree
/// `2g + 1`, `deg H <= g`, and no singular affine point.
pub fn validate_curve(c: &CurveParams) -> Result<()> {
    if !(1..=2).contains(&c.genus) {
        return Err(Error::DegreeOutOfRange(format!("genus {} not in {{1, 2}}", c.genus)));
    }
    if !same_field(c.h.field(), c.f.field()) {
        return Err(Error::DescriptorMismatch);
    }
    let g = c.genus as i64;
    if c.f.degree() != 2 * g + 1 {
        return Err(Error::DegreeOutOfRange(format!(
            "deg F = {} but 2g+1 = {}",
            c.f.degree(),
            2 * g + 1
        )));
    }
    if !c.f.is_monic() {
        return Err(Error::NotMonic);
    }
    if c.h.degree() > g {
        return Err(Error::DegreeOutOfRange(format!("deg H = {} exceeds g = {}", c.h.degree(), g)));
    }
    if let Some(x) = singular_x(c)? {
        return Err(Error::SingularCurve(x));
    }
    Ok(())
}

/// The x-coordinate of a singular point, if any.  In odd characteristic the
/// singular points are the multiple roots of `H^2 + 4F`; a multiple factor of
/// a degree-`2g+1` polynomial has degree at most `g`, at most 2 here, so its
/// roots lie in `F_{q^2}` and a scan of that field is complete.
fn singular_x(c: &CurveParams) -> Result<Option<String>> {
    let base = c.field();
    let q = base.order().to_u64().unwrap_or(u64::MAX);
    let disc = c.discriminant_poly();
    if q.saturating_mul(q) <= SINGULARITY_SCAN_LIMIT {
        let big = FieldDescriptor::build_extension(base.characteristic(), 2 * base.degree(), 0)?;
        let emb = FieldEmbedding::new(base, &big)?;
        let d = disc.map_coeffs(&big, |a| emb.embed(a));
        let dd = d.derivative();
        for i in 0..q * q {
            let x = FieldElement::from_index(&big, i);
            if d.eval(&x).is_zero() && dd.eval(&x).is_zero() {
                return Ok(Some(x.to_string()));
            }
        }
        return Ok(None);
    }
    let g = disc.gcd(&disc.derivative());
    if g.degree() <= 0 {
        return Ok(None);
    }
    Ok(Some(format!("a root of {g:?}")))
}

/// Field `F_{q^i}` for a curve over `F_q`, built deterministically, with the
/// embedding of the base field.
pub fn extension_of(base: &Field, i: usize) -> Result<(Field, FieldEmbedding)> {
    let big = if i == 1 {
        base.clone()
    } else {
        FieldDescriptor::build_extension(base.characteristic(), base.degree() * i, 0)?
    };
    let emb = FieldEmbedding::new(base, &big)?;
    Ok((big, emb))
}

/// `N_i = #C(F_{q^i})`, the affine points plus the point at infinity, by
/// enumerating `x` over `F_{q^i}`.
pub fn count_points(c: &CurveParams, i: usize) -> Result<u64> {
    let q_i = c.q().pow(i as u32);
    let size = q_i
        .to_u64()
        .filter(|&n| n <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::TooLarge(q_i.to_string()))?;
    let (big, emb) = extension_of(c.field(), i)?;
    let disc = c.base_change(&emb).discriminant_poly();
    let affine: u64 = (0..size)
        .into_par_iter()
        .map(|idx| {
            let x = FieldElement::from_index(&big, idx);
            (1 + disc.eval(&x).legendre()) as u64
        })
        .sum();
    Ok(affine + 1)
}

/// Characteristic polynomial of Frobenius, coefficients low-to-high.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly {
    pub genus: usize,
    pub q: BigUint,
    pub coeffs: Vec<BigInt>,
}

impl CharPoly {
    /// `P(x)` from the point counts `N_1, ..., N_g`.
    pub fn from_counts(genus: usize, q: &BigUint, counts: &[u64]) -> Result<Self> {
        if counts.len() < genus {
            return Err(Error::DegreeOutOfRange("need N_1..N_g".into()));
        }
        let qi = BigInt::from(q.clone());
        // Power sums of the Frobenius eigenvalues: s_i = q^i + 1 - N_i.
        let s: Vec<BigInt> = (1..=genus)
            .map(|i| qi.pow(i as u32) + 1 - BigInt::from(counts[i - 1]))
            .collect();
        let coeffs = match genus {
            1 => vec![qi.clone(), -s[0].clone(), BigInt::one()],
            2 => {
                let e1 = s[0].clone();
                let (e2, rem) = (&e1 * &e1 - &s[1]).div_rem(&BigInt::from(2));
                if !rem.is_zero() {
                    return Err(Error::InvariantViolation("odd second symmetric function".into()));
                }
                vec![&qi * &qi, -(&qi * &e1), e2, -e1, BigInt::one()]
            }
            _ => return Err(Error::DegreeOutOfRange(format!("genus {genus}"))),
        };
        let cp = CharPoly {
            genus,
            q: q.clone(),
            coeffs,
        };
        if !cp.satisfies_functional_equation() {
            return Err(Error::InvariantViolation("functional equation".into()));
        }
        Ok(cp)
    }

    /// `a_1 = q + 1 - N_1`, the trace of Frobenius.
    pub fn a1(&self) -> BigInt {
        -self.coeffs[2 * self.genus - 1].clone()
    }

    /// The coefficient of `x^{2g-2}` (genus 2 only).
    pub fn a2(&self) -> BigInt {
        self.coeffs[2 * self.genus - 2].clone()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `c_{2g-i} = q^{g-i} c_i`, equivalently `x^{2g} P(q/x) = q^g P(x)`.
    pub fn satisfies_functional_equation(&self) -> bool {
        let g = self.genus;
        let q = BigInt::from(self.q.clone());
        (0..=g).all(|i| self.coeffs[2 * g - i].clone() * q.pow((g - i) as u32) == self.coeffs[i])
    }

    /// Power sums `S_1, ..., S_n` of the roots, by Newton's identities.
    pub fn power_sums(&self, n: usize) -> Vec<BigInt> {
        let d = 2 * self.genus;
        // monic: x^d + c_{d-1} x^{d-1} + ... ; e_j = (-1)^j c_{d-j}
        let e: Vec<BigInt> = (0..=d)
            .map(|j| {
                let c = self.coeffs[d - j].clone();
                if j % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        let mut s = vec![BigInt::zero(); n + 1];
        for m in 1..=n {
            let mut acc = BigInt::zero();
            for j in 1..m.min(d + 1) {
                let term = &e[j] * &s[m - j];
                if j % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            if m <= d {
                let term = BigInt::from(m) * &e[m];
                if m % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            s[m] = acc;
        }
        s.remove(0);
        s
    }
}

/// Builds `P(x)` from `N_1, ..., N_g`.
pub fn frobenius_charpoly(c: &CurveParams) -> Result<CharPoly> {
    let counts: Vec<u64> = (1..=c.genus).map(|i| count_points(c, i)).collect::<Result<_>>()?;
    CharPoly::from_counts(c.genus, c.q(), &counts)
}

/// `#Jac(F_{q^k}) = prod (1 - alpha_i^k)`.
pub fn jacobian_order(cp: &CharPoly, k: usize) -> BigUint {
    let d = 2 * cp.genus;
    let s = cp.power_sums(d * k);
    // power sums of beta_i = alpha_i^k
    let t: Vec<BigInt> = (1..=d).map(|j| s[j * k - 1].clone()).collect();
    // elementary symmetric functions of the beta_i
    let mut e = vec![BigInt::one()];
    for m in 1..=d {
        let mut acc = BigInt::zero();
        for i in 1..=m {
            let term = &e[m - i] * &t[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / BigInt::from(m));
    }
    let mut total = BigInt::zero();
    for (j, ej) in e.iter().enumerate() {
        if j % 2 == 0 {
            total += ej;
        } else {
            total -= ej;
        }
    }
    debug_assert!(total.is_positive());
    total.to_biguint().expect("Jacobian order is positive")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveClass {
    Ordinary,
    Supersingular,
    Other,
}

impl std::fmt::Display for CurveClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurveClass::Ordinary => "ordinary",
            CurveClass::Supersingular => "supersingular",
            CurveClass::Other => "other",
        })
    }
}

fn valuation(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (quot, rem) = n.div_rem(&p);
        if !rem.is_zero() {
            return Some(v);
        }
        n = quot;
        v += 1;
    }
}

/// Slopes of the `p`-adic Newton polygon of `P(x)`, as root valuations
/// normalized by `v_p(q)`, one entry per root, ascending.  Rationals are
/// returned as `(numerator, denominator)`.
pub fn newton_slopes(cp: &CharPoly, p: u64) -> Vec<(u64, u64)> {
    let d = 2 * cp.genus;
    let m = valuation(&BigInt::from(cp.q.clone()), p).expect("q is a power of p");
    let pts: Vec<(i64, i64)> = (0..=d)
        .filter_map(|i| valuation(&cp.coeffs[i], p).map(|v| (i as i64, v as i64)))
        .collect();
    // Lower convex hull from (0, v(c_0)) to (d, 0).
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::new();
    for w in hull.windows(2).rev() {
        let (len, drop) = (w[1].0 - w[0].0, w[0].1 - w[1].1);
        // each root on this segment has valuation drop/len, normalized by m
        let (num, den) = (drop as u64, len as u64 * m);
        let gcd = num.gcd(&den).max(1);
        for _ in 0..len {
            out.push((num / gcd, den / gcd));
        }
    }
    out
}

/// Ordinary / supersingular / other, read off the Newton polygon.
pub fn classify(cp: &CharPoly, p: u64) -> CurveClass {
    let slopes = newton_slopes(cp, p);
    let g = cp.genus;
    let zeros = slopes.iter().filter(|s| s.0 == 0).count();
    let ones = slopes.iter().filter(|s| s.0 == s.1).count();
    if zeros == g && ones == g {
        CurveClass::Ordinary
    } else if slopes.iter().all(|&(n, d)| 2 * n == d) {
        CurveClass::Supersingular
    } else {
        CurveClass::Other
    }
}
