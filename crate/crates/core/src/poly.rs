//! Dense univariate polynomials over a [`FieldElement`] coefficient field.
//!
//! Coefficients are stored low-to-high with no trailing zeros; the zero
//! polynomial has no coefficients and degree `-1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{same_field, Field, FieldElement, FieldEmbedding};

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Poly {
    pub fn zero(field: &Field) -> Self {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(FieldElement::one(field))
    }

    pub fn constant(c: FieldElement) -> Self {
        let field = c.field().clone();
        Self::new(&field, vec![c])
    }

    /// The monomial `x`.
    pub fn x(field: &Field) -> Self {
        Self::new(field, vec![FieldElement::zero(field), FieldElement::one(field)])
    }

    /// `x - a`.
    pub fn linear(a: &FieldElement) -> Self {
        let field = a.field().clone();
        Self::new(&field, vec![-a, FieldElement::one(&field)])
    }

    pub fn monomial(c: FieldElement, n: usize) -> Self {
        let field = c.field().clone();
        let mut coeffs = vec![FieldElement::zero(&field); n];
        coeffs.push(c);
        Self::new(&field, coeffs)
    }

    pub fn new(field: &Field, mut coeffs: Vec<FieldElement>) -> Self {
        debug_assert!(coeffs.iter().all(|c| same_field(c.field(), field)));
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    /// Coefficients given as prime-subfield integers, low-to-high.
    pub fn from_i64s(field: &Field, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| FieldElement::from_i64(field, c)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn lead(&self) -> FieldElement {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(&self.field))
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divides by the leading coefficient.  The zero polynomial is returned
    /// unchanged.
    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(&self.lead().inv().expect("nonzero leading coefficient"))
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &FieldElement::from_u64(&self.field, i as u64))
                .collect(),
        )
    }

    /// Applies the `p^e`-power Frobenius to every coefficient.
    pub fn frobenius_power(&self, e: usize) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.frobenius_power(e)).collect())
    }

    /// Applies `f` coefficient-wise, landing in `target`.
    pub fn map_coeffs(&self, target: &Field, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::new(target, self.coeffs.iter().map(f).collect())
    }

    /// Image under a field embedding.
    pub fn embed(&self, emb: &FieldEmbedding) -> Self {
        if emb.is_identity() {
            return self.clone();
        }
        self.map_coeffs(emb.target(), |c| emb.embed(c))
    }

    /// `(quotient, remainder)`.
    pub fn divrem(&self, b: &Poly) -> Result<(Poly, Poly)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.degree() < b.degree() {
            return Ok((Poly::zero(&self.field), self.clone()));
        }
        let db = b.coeffs.len() - 1;
        let lead_inv = b.lead().inv()?;
        let mut r = self.coeffs.clone();
        let mut q = vec![FieldElement::zero(&self.field); r.len() - db];
        for i in (0..q.len()).rev() {
            let c = &r[i + db] * &lead_inv;
            if !c.is_zero() {
                for (k, bk) in b.coeffs.iter().enumerate() {
                    r[i + k] = &r[i + k] - &(&c * bk);
                }
            }
            q[i] = c;
        }
        r.truncate(db);
        Ok((Poly::new(&self.field, q), Poly::new(&self.field, r)))
    }

    pub fn rem(&self, b: &Poly) -> Poly {
        self.divrem(b).expect("nonzero modulus").1
    }

    /// Quotient when `b` is known to divide `self`.
    pub fn div_exact(&self, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(b)?;
        if !r.is_zero() {
            return Err(Error::InvariantViolation("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn mulmod(&self, b: &Poly, m: &Poly) -> Poly {
        (self * b).rem(m)
    }

    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        let base = self.rem(m);
        let mut acc = Poly::one(&self.field).rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, b: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `g` monic (or zero) and `s*self + t*b = g`.
    pub fn xgcd(&self, b: &Poly) -> (Poly, Poly, Poly) {
        let field = &self.field;
        let (mut r0, mut r1) = (self.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(field), Poly::zero(field));
        let (mut t0, mut t1) = (Poly::zero(field), Poly::one(field));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero");
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = r0.lead().inv().expect("nonzero");
        (r0.scale(&c), s0.scale(&c), t0.scale(&c))
    }

    /// Roots in the coefficient field, without multiplicity, sorted by
    /// coefficient vector.  Equal-degree splitting uses random shifts drawn
    /// from `rng`.
    pub fn roots<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<FieldElement> {
        if self.degree() <= 0 {
            return Vec::new();
        }
        let f = self.monic();
        let q = self.field.order().clone();
        let x = Poly::x(&self.field);
        // Product of the distinct linear factors.
        let xq = x.powmod(&q, &f);
        let mut g = (&xq - &x).gcd(&f);
        let mut out = Vec::new();
        if g.eval(&FieldElement::zero(&self.field)).is_zero() {
            out.push(FieldElement::zero(&self.field));
            g = g.div_exact(&x).expect("x divides g");
        }
        let half = (&q - BigUint::one()) >> 1;
        let mut stack = vec![g];
        while let Some(h) = stack.pop() {
            match h.degree() {
                d if d <= 0 => continue,
                1 => {
                    out.push(-&h.coeffs[0]);
                    continue;
                }
                _ => {}
            }
            loop {
                let a = FieldElement::random(&self.field, rng);
                let shifted = &x + &Poly::constant(a);
                let w = &shifted.powmod(&half, &h) - &Poly::one(&self.field);
                let d = w.gcd(&h);
                if d.degree() > 0 && d.degree() < h.degree() {
                    let other = h.div_exact(&d).expect("d divides h");
                    stack.push(d);
                    stack.push(other);
                    break;
                }
            }
        }
        out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
        out
    }
}

/// Resultant under the Sylvester-matrix convention:
/// `Res(A, B) = lc(A)^{deg B} * prod_{A(alpha)=0} B(alpha)`.
/// `Res(A, c) = c^{deg A}` for a constant `c`; zero if either input is zero.
pub fn resultant(a: &Poly, b: &Poly) -> FieldElement {
    let field = a.field().clone();
    let zero = FieldElement::zero(&field);
    if a.is_zero() || b.is_zero() {
        return zero;
    }
    let mut acc = FieldElement::one(&field);
    let (mut a, mut b) = (a.clone(), b.clone());
    loop {
        let (da, db) = (a.degree() as u64, b.degree() as u64);
        if db == 0 {
            return &acc * &b.lead().pow_u64(da);
        }
        if da == 0 {
            return &acc * &a.lead().pow_u64(db);
        }
        if da < db {
            std::mem::swap(&mut a, &mut b);
            if da * db % 2 == 1 {
                acc = -acc;
            }
            continue;
        }
        // Res(A, B) = (-1)^{da db} Res(B, A) = (-1)^{da db} lc(B)^{da - dr} Res(B, A mod B)
        let r = a.rem(&b);
        if r.is_zero() {
            return zero;
        }
        let dr = r.degree() as u64;
        acc = &acc * &b.lead().pow_u64(da - dr);
        if da * db % 2 == 1 {
            acc = -acc;
        }
        a = b;
        b = r;
    }
}

/// `prod_{u(beta)=0} f(beta)` over the roots of the monic `u`, with
/// multiplicity.  This is `Res(u, f)`.
pub fn eval_at_roots(f: &Poly, u: &Poly) -> FieldElement {
    debug_assert!(u.is_monic());
    resultant(u, f)
}

fn zip_with(a: &Poly, b: &Poly, op: impl Fn(&FieldElement, &FieldElement) -> FieldElement) -> Poly {
    let n = a.coeffs.len().max(b.coeffs.len());
    let zero = FieldElement::zero(&a.field);
    let coeffs = (0..n)
        .map(|i| op(a.coeffs.get(i).unwrap_or(&zero), b.coeffs.get(i).unwrap_or(&zero)))
        .collect();
    Poly::new(&a.field, coeffs)
}

impl<'b> Add<&'b Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &'b Poly) -> Poly {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl<'b> Sub<&'b Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &'b Poly) -> Poly {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl<'b> Mul<&'b Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &'b Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![FieldElement::zero(&self.field); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(&self.field, out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &'b Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDescriptor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_poly(field: &Field, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
        Poly::new(field, (0..=deg).map(|_| FieldElement::random(field, rng)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let f = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = random_poly(&f, 6, &mut rng);
            let b = random_poly(&f, 3, &mut rng);
            if b.is_zero() {
                continue;
            }
            let (q, r) = a.divrem(&b).unwrap();
            assert!(r.degree() < b.degree());
            assert_eq!(&(&q * &b) + &r, a);
        }
        assert_eq!(Poly::one(&f).divrem(&Poly::zero(&f)).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn xgcd_bezout() {
        let f = FieldDescriptor::build_extension(11, 3, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let c = random_poly(&f, 2, &mut rng);
            let a = &random_poly(&f, 3, &mut rng) * &c;
            let b = &random_poly(&f, 4, &mut rng) * &c;
            let (g, s, t) = a.xgcd(&b);
            assert_eq!(&(&s * &a) + &(&t * &b), g);
            assert!(g.is_monic());
            assert!(a.rem(&g).is_zero() && b.rem(&g).is_zero());
            assert!(c.is_zero() || g.rem(&c).is_zero());
        }
    }

    #[test]
    fn resultant_basics() {
        let f = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_poly(&f, 3, &mut rng);
        assert!(resultant(&u, &Poly::one(&f)).is_one());
        let a = FieldElement::random(&f, &mut rng);
        assert_eq!(resultant(&Poly::linear(&a), &u), u.eval(&a));
        // common factor -> zero
        let c = Poly::linear(&a);
        assert!(resultant(&(&c * &u), &(&c * &Poly::x(&f))).is_zero());
    }

    #[test]
    fn resultant_matches_root_products() {
        // B split into linear factors over F_49 so its roots are known.
        let f = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a = random_poly(&f, 4, &mut rng);
            let roots: Vec<_> = (0..3).map(|_| FieldElement::random(&f, &mut rng)).collect();
            let lc = FieldElement::random_nonzero(&f, &mut rng);
            let b = roots
                .iter()
                .fold(Poly::constant(lc.clone()), |acc, r| &acc * &Poly::linear(r));
            // Res(B, A) = lc(B)^{deg A} prod A(beta)
            let mut prod = lc.pow_u64(a.degree().max(0) as u64);
            for r in &roots {
                prod = &prod * &a.eval(r);
            }
            assert_eq!(resultant(&b, &a), prod);
            // swapping picks up (-1)^{deg A deg B}
            let sign = if a.degree() * b.degree() % 2 == 1 { -&prod } else { prod.clone() };
            assert_eq!(resultant(&a, &b), sign);
        }
    }

    #[test]
    fn roots_of_split_polynomial() {
        for (p, d) in [(7, 1), (13, 1), (7, 2), (11, 3), (7, 4)] {
            let f = FieldDescriptor::build_extension(p, d, 0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..10 {
                let mut roots: Vec<_> = (0..4).map(|_| FieldElement::random(&f, &mut rng)).collect();
                let mut poly = roots.iter().fold(Poly::one(&f), |acc, r| &acc * &Poly::linear(r));
                // an irreducible-ish extra factor with no roots: x^2 - nonresidue
                let nr = (1..).map(|i| FieldElement::from_index(&f, i)).find(|e| !e.is_square()).unwrap();
                poly = &poly * &Poly::new(&f, vec![-&nr, FieldElement::zero(&f), FieldElement::one(&f)]);
                roots.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
                roots.dedup();
                assert_eq!(poly.roots(&mut rng), roots);
            }
        }
    }

    #[test]
    fn powmod_matches_repeated_multiplication() {
        let f = FieldDescriptor::build_extension(13, 2, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_poly(&f, 3, &mut rng);
        let m = random_poly(&f, 4, &mut rng);
        let mut acc = Poly::one(&f);
        for e in 0..20u64 {
            assert_eq!(a.powmod(&BigUint::from(e), &m), acc.rem(&m));
            acc = &acc * &a;
        }
    }
}
