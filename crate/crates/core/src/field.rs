//! Exact arithmetic in `F_p` and its extensions `F_{p^d} = F_p[t]/(m(t))`.
//!
//! Every extension is represented flat over the prime field by a single
//! monic irreducible modulus.  Towers are recovered on demand: the
//! `p^l`-power Frobenius identifies the subfield `F_{p^l}` and, for even
//! degree, the quadratic sub-extension used by the conjugation trick of the
//! final exponentiation.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::arith::{inv_mod, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

type Coeffs = SmallVec<[u64; 8]>;

/// Largest characteristic accepted.  Keeps every coefficient product inside a
/// `u64` and every schoolbook accumulation inside a `u128`.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;

const IRREDUCIBLE_ATTEMPTS: usize = 10_000;

/// A finite field `F_{p^d}`.  Immutable after construction.
pub struct FieldDescriptor {
    p: u64,
    degree: usize,
    /// Monic modulus, low-to-high, length `degree + 1`.  Empty when `degree == 1`.
    modulus: Vec<u64>,
    /// Row `i` holds `(t^i)^p mod m(t)`.
    frobenius: Vec<Vec<u64>>,
    /// `Some(c)` when the modulus is the binomial `t^d - c`.
    binomial: Option<u64>,
    order: BigUint,
    non_residue: OnceLock<Coeffs>,
}

/// Shared handle to a field; elements keep one of these.
pub type Field = Arc<FieldDescriptor>;

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus == other.modulus
    }
}
impl Eq for FieldDescriptor {}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.p, self.degree, self.modulus)
        }
    }
}

fn check_characteristic(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::CompositeCharacteristic(p.to_string()));
    }
    if !(5..MAX_CHARACTERISTIC).contains(&p) {
        return Err(Error::UnsupportedCharacteristic(p.to_string()));
    }
    Ok(())
}

impl FieldDescriptor {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field> {
        check_characteristic(p)?;
        Ok(Arc::new(Self::assemble(p, 1, Vec::new(), None)))
    }

    /// `F_p[t]/(modulus)` for a caller-supplied monic modulus (low-to-high).
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Field> {
        check_characteristic(p)?;
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        let degree = modulus.len().saturating_sub(1);
        if degree == 0 {
            return Err(Error::DegreeOutOfRange("modulus must have degree >= 1".into()));
        }
        if modulus[degree] != 1 {
            return Err(Error::NotMonic);
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::DegreeOutOfRange("modulus is reducible".into()));
        }
        if degree == 1 {
            return Self::prime(p);
        }
        let binomial = binomial_constant(&modulus, p);
        Ok(Arc::new(Self::assemble(p, degree, modulus, binomial)))
    }

    /// Deterministic construction of `F_{p^d}`.
    ///
    /// For even `d` a binomial modulus `t^d - c` is preferred when one is
    /// irreducible; then `t` generates the field over `F_{p^{d/2}} = F_p(t^2)`
    /// and conjugation over that subfield is `t -> -t`.  Otherwise random
    /// monic candidates (seeded) are tested with Rabin's criterion.
    pub fn build_extension(p: u64, d: usize, seed: u64) -> Result<Field> {
        check_characteristic(p)?;
        if d == 0 {
            return Err(Error::DegreeOutOfRange("extension degree must be >= 1".into()));
        }
        if d == 1 {
            return Self::prime(p);
        }
        if d.is_multiple_of(2) {
            // Walk c over F_p^* starting from a seed-dependent offset.
            for i in 0..p - 1 {
                let c = 1 + (seed.wrapping_add(i)) % (p - 1);
                let mut m = vec![0u64; d + 1];
                m[0] = (p - c) % p;
                m[d] = 1;
                if fp_poly::is_irreducible(&m, p) {
                    return Ok(Arc::new(Self::assemble(p, d, m, Some(c))));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((p << 8) | d as u64));
        for _ in 0..IRREDUCIBLE_ATTEMPTS {
            let mut m: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            if fp_poly::is_irreducible(&m, p) {
                let binomial = binomial_constant(&m, p);
                return Ok(Arc::new(Self::assemble(p, d, m, binomial)));
            }
        }
        Err(Error::SearchExhausted { p, degree: d })
    }

    fn assemble(p: u64, degree: usize, modulus: Vec<u64>, binomial: Option<u64>) -> Self {
        let mut field = FieldDescriptor {
            p,
            degree,
            modulus,
            frobenius: Vec::new(),
            binomial,
            order: BigUint::from(p).pow(degree as u32),
            non_residue: OnceLock::new(),
        };
        if degree > 1 {
            // t^p mod m, then its powers.
            let t = {
                let mut v = vec![0u64; degree];
                v[1] = 1;
                v
            };
            let tp = field.pow_raw(&t, &BigUint::from(p));
            let mut rows = Vec::with_capacity(degree);
            let mut acc = {
                let mut v = vec![0u64; degree];
                v[0] = 1;
                v
            };
            for _ in 0..degree {
                rows.push(acc.clone());
                acc = field.mul_raw(&acc, &tp).to_vec();
            }
            field.frobenius = rows;
        }
        field
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic modulus, low-to-high; `None` for a prime field.
    pub fn modulus(&self) -> Option<&[u64]> {
        (self.degree > 1).then_some(self.modulus.as_slice())
    }

    /// `c` when the modulus is `t^d - c`.
    pub fn binomial_constant(&self) -> Option<u64> {
        self.binomial
    }

    /// Number of elements, `p^d`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    fn mul_raw(&self, a: &[u64], b: &[u64]) -> Coeffs {
        let p = self.p;
        let d = self.degree;
        if d == 1 {
            return smallvec::smallvec![mul_mod(a[0], b[0], p)];
        }
        let mut wide = [0u128; 64];
        let wide = &mut wide[..2 * d - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                wide[i + j] += ai as u128 * bj as u128;
            }
        }
        let mut red: SmallVec<[u64; 24]> = wide.iter().map(|&w| (w % p as u128) as u64).collect();
        for i in (d..2 * d - 1).rev() {
            let c = red[i];
            if c == 0 {
                continue;
            }
            red[i] = 0;
            for k in 0..d {
                let mk = self.modulus[k];
                if mk != 0 {
                    red[i - d + k] = (red[i - d + k] + p - mul_mod(c, mk, p)) % p;
                }
            }
        }
        red.truncate(d);
        red.into_iter().collect()
    }

    fn pow_raw(&self, a: &[u64], e: &BigUint) -> Coeffs {
        let mut acc: Coeffs = smallvec::smallvec![0; self.degree];
        acc[0] = 1;
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mul_raw(&acc, &acc);
            if e.bit(i) {
                acc = self.mul_raw(&acc, a);
            }
        }
        acc
    }

    fn frob_raw(&self, a: &[u64]) -> Coeffs {
        if self.degree == 1 {
            return a.iter().copied().collect();
        }
        let p = self.p as u128;
        let mut out = [0u128; 32];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (k, &rk) in self.frobenius[i].iter().enumerate() {
                out[k] += ai as u128 * rk as u128;
            }
        }
        out[..self.degree].iter().map(|&w| (w % p) as u64).collect()
    }

    fn inv_raw(&self, a: &[u64]) -> Option<Coeffs> {
        if self.degree == 1 {
            return inv_mod(a[0], self.p).map(|v| smallvec::smallvec![v]);
        }
        let inv = fp_poly::inverse_mod(a, &self.modulus, self.p)?;
        let mut out: Coeffs = smallvec::smallvec![0; self.degree];
        for (i, c) in inv.into_iter().enumerate() {
            out[i] = c;
        }
        Some(out)
    }
}

fn binomial_constant(m: &[u64], p: u64) -> Option<u64> {
    let d = m.len() - 1;
    if m[1..d].iter().all(|&c| c == 0) {
        Some((p - m[0]) % p)
    } else {
        None
    }
}

/// An element of a [`FieldDescriptor`].
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    coeffs: Coeffs,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_field(&self.field, &other.field)
    }
}
impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "t")?,
                1 => write!(f, "{c}*t")?,
                _ if c == 1 => write!(f, "t^{i}")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[inline]
pub fn same_field(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// The operations accepted by [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
}

/// Checked binary/unary arithmetic.  `Inv` and `Neg` ignore `b` apart from the
/// descriptor check.
pub fn arith(a: &FieldElement, b: &FieldElement, kind: ArithKind) -> Result<FieldElement> {
    if !same_field(&a.field, &b.field) {
        return Err(Error::DescriptorMismatch);
    }
    Ok(match kind {
        ArithKind::Add => a + b,
        ArithKind::Sub => a - b,
        ArithKind::Mul => a * b,
        ArithKind::Div => a.checked_div(b)?,
        ArithKind::Inv => a.inv()?,
        ArithKind::Neg => -a,
    })
}

impl FieldElement {
    pub fn zero(field: &Field) -> Self {
        FieldElement {
            field: field.clone(),
            coeffs: smallvec::smallvec![0; field.degree],
        }
    }

    pub fn one(field: &Field) -> Self {
        Self::from_u64(field, 1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_u64(field: &Field, v: u64) -> Self {
        let mut e = Self::zero(field);
        e.coeffs[0] = v % field.p;
        e
    }

    pub fn from_i64(field: &Field, v: i64) -> Self {
        let p = field.p as i128;
        Self::from_u64(field, (v as i128).rem_euclid(p) as u64)
    }

    pub fn from_biguint(field: &Field, v: &BigUint) -> Self {
        let r = v % BigUint::from(field.p);
        Self::from_u64(field, r.iter_u64_digits().next().unwrap_or(0))
    }

    /// Element with the given coordinates on the basis `1, t, ..., t^{d-1}`.
    /// Coordinates are reduced mod p; missing ones are zero.
    pub fn from_coeffs(field: &Field, coeffs: &[u64]) -> Result<Self> {
        if coeffs.len() > field.degree {
            return Err(Error::DegreeOutOfRange(format!(
                "{} coordinates for a degree-{} field",
                coeffs.len(),
                field.degree
            )));
        }
        let mut e = Self::zero(field);
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *slot = c % field.p;
        }
        Ok(e)
    }

    /// The generator `t` of the flat representation (or 0 for `F_p`... never
    /// asked for there).
    pub fn generator(field: &Field) -> Self {
        let mut e = Self::zero(field);
        if field.degree > 1 {
            e.coeffs[1] = 1;
        } else {
            e.coeffs[0] = 1;
        }
        e
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> Self {
        FieldElement {
            field: field.clone(),
            coeffs: (0..field.degree).map(|_| rng.gen_range(0..field.p)).collect(),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> Self {
        loop {
            let e = Self::random(field, rng);
            if !e.is_zero() {
                return e;
            }
        }
    }

    /// The `index`-th element in base-`p` counting order.  Used to enumerate
    /// small fields.
    pub fn from_index(field: &Field, mut index: u64) -> Self {
        let mut e = Self::zero(field);
        for slot in e.coeffs.iter_mut() {
            *slot = index % field.p;
            index /= field.p;
        }
        e
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Whether the element lies in the prime subfield; returns its value.
    pub fn as_prime_subfield(&self) -> Option<u64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let coeffs = self.field.inv_raw(&self.coeffs).ok_or(Error::DivisionByZero)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if !same_field(&self.field, &other.field) {
            return Err(Error::DescriptorMismatch);
        }
        Ok(self * &other.inv()?)
    }

    /// Square-and-multiply; `0^0 = 1`.
    pub fn pow(&self, e: &BigUint) -> Self {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.field.pow_raw(&self.coeffs, e),
        }
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        self.pow(&BigUint::from(e))
    }

    /// `a^(p^e)`.
    pub fn frobenius_power(&self, e: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        for _ in 0..e % self.field.degree {
            coeffs = self.field.frob_raw(&coeffs);
        }
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    /// True iff `a` lies in the subfield `F_{p^l}`.
    pub fn subfield_test(&self, l: usize) -> Result<bool> {
        let d = self.field.degree;
        if l == 0 || !d.is_multiple_of(l) {
            return Err(Error::NotADivisor(l, d));
        }
        Ok(self.frobenius_power(l) == *self)
    }

    /// Norm down to `F_p`.
    pub fn norm(&self) -> u64 {
        let mut acc = self.clone();
        let mut conj = self.clone();
        for _ in 1..self.field.degree {
            conj = conj.frobenius_power(1);
            acc = &acc * &conj;
        }
        acc.coeffs[0]
    }

    /// Quadratic character: 0, 1 or -1.
    pub fn legendre(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let n = self.norm();
        let p = self.field.p;
        if pow_mod(n, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self) -> bool {
        self.legendre() >= 0
    }

    /// A square root, if one exists (Tonelli-Shanks).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.legendre() != 1 {
            return None;
        }
        let field = &self.field;
        let one = BigUint::one();
        let q_minus_1 = field.order() - &one;
        let s = q_minus_1.trailing_zeros().unwrap_or(0);
        let t = &q_minus_1 >> s;
        let z = FieldElement {
            field: field.clone(),
            coeffs: field
                .non_residue
                .get_or_init(|| {
                    let mut i = 2u64;
                    loop {
                        let c = Self::from_index(field, i);
                        if c.legendre() == -1 {
                            return c.coeffs;
                        }
                        i += 1;
                    }
                })
                .clone(),
        };
        let mut m = s;
        let mut c = z.pow(&t);
        let mut x = self.pow(&((&t + &one) >> 1));
        let mut b = self.pow(&t);
        while !b.is_one() {
            let mut i = 0;
            let mut b2 = b.clone();
            while !b2.is_one() {
                b2 = b2.square();
                i += 1;
            }
            let mut w = c.clone();
            for _ in 0..(m - i - 1) {
                w = w.square();
            }
            x = &x * &w;
            c = w.square();
            b = &b * &c;
            m = i;
        }
        Some(x)
    }

    /// Conjugate over the index-2 subfield `F_{p^{d/2}}` (requires even degree).
    pub fn conjugate(&self) -> Self {
        debug_assert!(self.field.degree.is_multiple_of(2));
        if self.field.binomial.is_some() {
            // t -> -t
            let p = self.field.p;
            let mut out = self.clone();
            for (i, c) in out.coeffs.iter_mut().enumerate() {
                if i % 2 == 1 {
                    *c = (p - *c) % p;
                }
            }
            out
        } else {
            self.frobenius_power(self.field.degree / 2)
        }
    }

    /// Decomposition `a + gamma*b` with `a, b` in `F_{p^{d/2}}`, `gamma` the
    /// quadratic generator (`t` for binomial moduli).  Returns `(a, b, gamma)`.
    pub fn gamma_split(&self) -> (Self, Self, Self) {
        let gamma = if self.field.binomial.is_some() {
            Self::generator(&self.field)
        } else {
            // Any element moved by conjugation works; pick the first.
            let mut i = 1u64;
            loop {
                let g = Self::from_index(&self.field, i);
                if g.conjugate() != g {
                    let g = &g - &g.conjugate();
                    break g;
                }
                i += 1;
            }
        };
        let conj = self.conjugate();
        let two_inv = Self::from_u64(&self.field, 2).inv().expect("p odd");
        let a = &(self + &conj) * &two_inv;
        let b = &(&(self - &conj) * &two_inv) * &gamma.inv().expect("gamma nonzero");
        (a, b, gamma)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl<'a, 'b> $trait<&'b FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                debug_assert!(same_field(&self.field, &rhs.field), "field mismatch");
                $imp(self, rhs)
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

fn add_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let p = a.field.p;
    FieldElement {
        field: a.field.clone(),
        coeffs: a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= p {
                    s - p
                } else {
                    s
                }
            })
            .collect(),
    }
}

fn sub_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let p = a.field.p;
    FieldElement {
        field: a.field.clone(),
        coeffs: a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| if x >= y { x - y } else { x + p - y })
            .collect(),
    }
}

fn mul_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    FieldElement {
        field: a.field.clone(),
        coeffs: a.field.mul_raw(&a.coeffs, &b.coeffs),
    }
}

fn div_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a * &b.inv().expect("division by zero")
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.p;
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&FieldElement> for FieldElement {
    fn mul_assign(&mut self, rhs: &FieldElement) {
        *self = &*self * rhs;
    }
}

/// The inclusion `F_{p^m} -> F_{p^n}` for `m | n`, fixed by sending the
/// generator `t` of the small field to the smallest root of its modulus in the
/// large field.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    small: Field,
    big: Field,
    image_of_t: Option<FieldElement>,
}

impl FieldEmbedding {
    pub fn new(small: &Field, big: &Field) -> Result<Self> {
        if small.p != big.p || !big.degree.is_multiple_of(small.degree) {
            return Err(Error::NotADivisor(small.degree, big.degree));
        }
        let image_of_t = if small.degree == 1 || same_field(small, big) {
            None
        } else {
            let m = crate::poly::Poly::new(
                big,
                small.modulus.iter().map(|&c| FieldElement::from_u64(big, c)).collect(),
            );
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let root = m.roots(&mut rng).into_iter().next().ok_or_else(|| {
                Error::InvariantViolation("modulus has no root in the extension".into())
            })?;
            Some(root)
        };
        Ok(FieldEmbedding {
            small: small.clone(),
            big: big.clone(),
            image_of_t,
        })
    }

    pub fn source(&self) -> &Field {
        &self.small
    }

    pub fn target(&self) -> &Field {
        &self.big
    }

    /// The identity map of `field`.
    pub fn identity(field: &Field) -> Self {
        FieldEmbedding {
            small: field.clone(),
            big: field.clone(),
            image_of_t: None,
        }
    }

    pub fn is_identity(&self) -> bool {
        same_field(&self.small, &self.big)
    }

    pub fn embed(&self, a: &FieldElement) -> FieldElement {
        debug_assert!(same_field(&a.field, &self.small));
        if self.is_identity() {
            return a.clone();
        }
        match &self.image_of_t {
            None => FieldElement::from_u64(&self.big, a.coeffs[0]),
            Some(t) => {
                let mut acc = FieldElement::zero(&self.big);
                for &c in a.coeffs.iter().rev() {
                    acc = &(&acc * t) + &FieldElement::from_u64(&self.big, c);
                }
                acc
            }
        }
    }

    /// The element of the small field mapping to `a`, if any.
    pub fn preimage(&self, a: &FieldElement) -> Option<FieldElement> {
        if !same_field(&a.field, &self.big) {
            return None;
        }
        if self.is_identity() {
            return Some(a.clone());
        }
        let p = self.big.p;
        let Some(t) = &self.image_of_t else {
            return a.as_prime_subfield().map(|c| FieldElement::from_u64(&self.small, c));
        };
        // Solve sum x_i t^i = a over F_p by Gaussian elimination.
        let m = self.small.degree;
        let n = self.big.degree;
        let mut cols = Vec::with_capacity(m);
        let mut pw = FieldElement::one(&self.big);
        for _ in 0..m {
            cols.push(pw.coeffs.clone());
            pw = &pw * t;
        }
        let mut rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut row: Vec<u64> = cols.iter().map(|c| c[i]).collect();
                row.push(a.coeffs[i]);
                row
            })
            .collect();
        let mut pivot_row = 0;
        let mut pivots = Vec::with_capacity(m);
        for col in 0..m {
            let Some(sel) = (pivot_row..n).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(pivot_row, sel);
            let inv = crate::arith::inv_mod(rows[pivot_row][col], p).expect("nonzero pivot");
            for v in rows[pivot_row].iter_mut() {
                *v = *v * inv % p;
            }
            for i in 0..n {
                if i != pivot_row && rows[i][col] != 0 {
                    let f = rows[i][col];
                    for j in 0..=m {
                        rows[i][j] = (rows[i][j] + p * p - f * rows[pivot_row][j] % p) % p;
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        if rows[pivot_row..].iter().any(|r| r[m] != 0) {
            return None;
        }
        let mut x = vec![0u64; m];
        for (i, &col) in pivots.iter().enumerate() {
            x[col] = rows[i][m];
        }
        FieldElement::from_coeffs(&self.small, &x).ok()
    }
}

/// Dense polynomials over `F_p` on raw coefficient vectors; just enough for
/// moduli (Rabin's test, inversion in the residue ring).
pub(crate) mod fp_poly {
    use super::*;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// `(quotient, remainder)`; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r: Vec<u64> = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p).expect("nonzero leading coefficient");
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        for i in (0..q.len()).rev() {
            let c = mul_mod(r[i + db], lead_inv, p);
            q[i] = c;
            if c != 0 {
                for (k, &bk) in b.iter().enumerate() {
                    r[i + k] = (r[i + k] + p - mul_mod(c, bk, p)) % p;
                }
            }
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let (_, r) = divrem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let li = inv_mod(lead, p).unwrap();
            for c in a.iter_mut() {
                *c = mul_mod(*c, li, p);
            }
        }
        a
    }

    pub fn inverse_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        // Extended Euclid tracking only the coefficient of `a`.
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.len() != 1 {
            return None;
        }
        let c = inv_mod(r0[0], p)?;
        let (_, s) = divrem(&s0.iter().map(|&x| mul_mod(x, c, p)).collect::<Vec<_>>(), m, p);
        Some(s)
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        divrem(&mul(a, b, p), m, p).1
    }

    /// `base^(p) mod m` by square-and-multiply.
    pub fn pow_p(base: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = divrem(base, m, p).1;
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    /// Rabin's irreducibility test for a monic `m` of degree `d`:
    /// `x^{p^d} = x mod m` and `gcd(x^{p^{d/l}} - x, m) = 1` for each prime `l | d`.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let d = m.len() - 1;
        if d == 1 {
            return true;
        }
        if m[0] == 0 {
            return false;
        }
        let x = vec![0u64, 1];
        // x^{p^i} for i = 0..=d
        let mut frob = Vec::with_capacity(d + 1);
        frob.push(x.clone());
        for i in 1..=d {
            let next = pow_p(&frob[i - 1], m, p);
            frob.push(next);
        }
        if sub(&frob[d], &x, p).iter().any(|&c| c != 0) {
            return false;
        }
        let mut n = d;
        let mut l = 2;
        let mut primes = Vec::new();
        while l * l <= n {
            if n.is_multiple_of(l) {
                primes.push(l);
                while n.is_multiple_of(l) {
                    n /= l;
                }
            }
            l += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        primes.into_iter().all(|l| {
            let diff = sub(&frob[d / l], &x, p);
            gcd(&diff, m, p).len() == 1
        })
    }
}

/// Exposed for tests and the search module: is the monic polynomial (low to
/// high) irreducible over `F_p`?
pub fn is_irreducible_fp(m: &[u64], p: u64) -> bool {
    fp_poly::is_irreducible(m, p)
}

/// Integer `n mod p` as `u64`, for convenience with big exponents.
pub fn big_mod_u64(n: &BigUint, p: u64) -> u64 {
    let (_, r) = n.div_rem(&BigUint::from(p));
    if r.is_zero() {
        0
    } else {
        r.iter_u64_digits().next().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn prime_field_basics() {
        let f = FieldDescriptor::build_extension(7, 1, 0).unwrap();
        assert!(f.modulus().is_none());
        let a = FieldElement::from_u64(&f, 3);
        let b = FieldElement::from_u64(&f, 5);
        assert!((&a * &b).is_one());
        assert_eq!(a.pow_u64(6), FieldElement::one(&f));
        assert_eq!(a.pow(&BigUint::zero()), FieldElement::one(&f));
        assert_eq!(FieldElement::zero(&f).pow(&BigUint::zero()), FieldElement::one(&f));
    }

    #[test]
    fn composite_characteristic_rejected() {
        assert_eq!(
            FieldDescriptor::build_extension(9, 1, 0).unwrap_err(),
            Error::CompositeCharacteristic("9".into())
        );
        assert!(matches!(
            FieldDescriptor::build_extension(3, 2, 0),
            Err(Error::UnsupportedCharacteristic(_))
        ));
    }

    #[test]
    fn quadratic_extension_has_no_root() {
        let f = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let m = f.modulus().unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[2], 1);
        for x in 0..7u64 {
            let v = (m[0] + m[1] * x + x * x) % 7;
            assert_ne!(v, 0, "modulus has root {x}");
        }
    }

    #[test]
    fn binomial_preferred_for_even_degree() {
        // p = 13 = 1 mod 4, so t^4 - c is irreducible for suitable c
        let f = FieldDescriptor::build_extension(13, 4, 0).unwrap();
        assert!(f.binomial_constant().is_some());
        // p = 7 = 3 mod 4: no binomial quartic exists, fallback is generic
        let g = FieldDescriptor::build_extension(7, 4, 0).unwrap();
        assert!(g.binomial_constant().is_none());
        assert!(is_irreducible_fp(g.modulus().unwrap(), 7));
    }

    #[test]
    fn build_is_deterministic() {
        for d in 1..=7 {
            let a = FieldDescriptor::build_extension(11, d, 3).unwrap();
            let b = FieldDescriptor::build_extension(11, d, 3).unwrap();
            assert_eq!(*a, *b);
        }
    }

    #[test]
    fn descriptor_mismatch_and_division_by_zero() {
        let f = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let g = FieldDescriptor::build_extension(11, 2, 0).unwrap();
        let a = FieldElement::one(&f);
        let b = FieldElement::one(&g);
        assert_eq!(arith(&a, &b, ArithKind::Add).unwrap_err(), Error::DescriptorMismatch);
        let z = FieldElement::zero(&f);
        assert_eq!(arith(&a, &z, ArithKind::Div).unwrap_err(), Error::DivisionByZero);
        assert_eq!(arith(&z, &z, ArithKind::Inv).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn difference_of_squares_in_f49() {
        let f = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let mut rng = rng();
        for _ in 0..100 {
            let a = FieldElement::random(&f, &mut rng);
            let b = FieldElement::random(&f, &mut rng);
            let lhs = &(&a + &b) * &(&a - &b);
            let rhs = &(&a * &a) - &(&b * &b);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn inverse_axiom() {
        for d in [1, 2, 3, 4, 6] {
            let f = FieldDescriptor::build_extension(13, d, 0).unwrap();
            let mut rng = rng();
            for _ in 0..50 {
                let a = FieldElement::random_nonzero(&f, &mut rng);
                assert!((&a * &a.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn lagrange_order() {
        let f = FieldDescriptor::build_extension(7, 4, 0).unwrap();
        let e = f.order() - BigUint::one();
        let mut rng = rng();
        for _ in 0..100 {
            let a = FieldElement::random_nonzero(&f, &mut rng);
            assert!(a.pow(&e).is_one());
        }
    }

    #[test]
    fn frobenius_orbit_and_homomorphism() {
        let f = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let mut rng = rng();
        for _ in 0..50 {
            let a = FieldElement::random(&f, &mut rng);
            let b = FieldElement::random(&f, &mut rng);
            assert_eq!(a.frobenius_power(2), a);
            assert_eq!(a.frobenius_power(1), a.pow_u64(7));
            assert_eq!((&a * &b).frobenius_power(1), &a.frobenius_power(1) * &b.frobenius_power(1));
            assert_eq!((&a + &b).frobenius_power(1), &a.frobenius_power(1) + &b.frobenius_power(1));
        }
        let c = FieldElement::from_u64(&f, 5);
        assert_eq!(c.frobenius_power(1), c);
    }

    #[test]
    fn subfield_membership() {
        let f = FieldDescriptor::build_extension(7, 4, 0).unwrap();
        let mut rng = rng();
        let a = FieldElement::random(&f, &mut rng);
        assert!(a.subfield_test(4).unwrap());
        assert!(FieldElement::from_u64(&f, 3).subfield_test(1).unwrap());
        assert_eq!(a.subfield_test(3).unwrap_err(), Error::NotADivisor(3, 4));
        // A generator of F_{7^4}^* has order 2400 and cannot lie in F_49.
        let order = 7u64.pow(4) - 1;
        let primes = [2u64, 3, 5];
        let gen = (1..)
            .map(|i| FieldElement::from_index(&f, i))
            .find(|g| {
                !g.is_zero() && primes.iter().all(|&l| !g.pow_u64(order / l).is_one())
            })
            .unwrap();
        assert!(!gen.subfield_test(2).unwrap());
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let small = FieldDescriptor::build_extension(7, 2, 0).unwrap();
        let big = FieldDescriptor::build_extension(7, 6, 0).unwrap();
        let emb = FieldEmbedding::new(&small, &big).unwrap();
        let mut rng = rng();
        for _ in 0..30 {
            let a = FieldElement::random(&small, &mut rng);
            let b = FieldElement::random(&small, &mut rng);
            assert_eq!(emb.embed(&(&a * &b)), &emb.embed(&a) * &emb.embed(&b));
            assert_eq!(emb.embed(&(&a + &b)), &emb.embed(&a) + &emb.embed(&b));
            assert!(emb.embed(&a).subfield_test(2).unwrap());
            assert_eq!(emb.preimage(&emb.embed(&a)), Some(a));
        }
        let outside = FieldElement::generator(&big);
        assert_eq!(emb.preimage(&outside), None);
        assert!(FieldEmbedding::new(&big, &small).is_err());
    }

    #[test]
    fn square_roots() {
        for (p, d) in [(7, 1), (13, 1), (7, 2), (7, 4), (11, 3), (17, 6)] {
            let f = FieldDescriptor::build_extension(p, d, 0).unwrap();
            let mut rng = rng();
            for _ in 0..40 {
                let a = FieldElement::random(&f, &mut rng);
                let sq = a.square();
                let r = sq.sqrt().expect("square has a root");
                assert_eq!(r.square(), sq);
                assert!(sq.legendre() >= 0);
            }
        }
    }

    #[test]
    fn conjugation_replaces_inversion() {
        for (p, d) in [(13, 4), (7, 4), (7, 2), (13, 6), (11, 6)] {
            let f = FieldDescriptor::build_extension(p, d, 0).unwrap();
            let l = d / 2;
            let e = BigUint::from(p).pow(l as u32) - BigUint::one();
            let mut rng = rng();
            for _ in 0..100 {
                let x = FieldElement::random_nonzero(&f, &mut rng);
                let (a, b, gamma) = x.gamma_split();
                assert!(a.subfield_test(l).unwrap());
                assert!(b.subfield_test(l).unwrap());
                assert!(!gamma.subfield_test(l).unwrap());
                assert!(gamma.square().subfield_test(l).unwrap());
                assert_eq!(&a + &(&gamma * &b), x);
                let conj = &a - &(&gamma * &b);
                assert_eq!(conj, x.conjugate());
                assert_eq!(x.inv().unwrap().pow(&e), conj.pow(&e));
            }
        }
    }
}
