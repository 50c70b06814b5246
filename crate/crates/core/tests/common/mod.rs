#![allow(dead_code)]

use hyperpair::curve::{extension_of, CurveParams};
use hyperpair::field::{Field, FieldDescriptor, FieldElement, FieldEmbedding};
use hyperpair::jacobian::ReducedDivisor;
use hyperpair::arith::{inv_mod, mul_mod};
use hyperpair::pairings::{HvSpec, PairingContext};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use hyperpair::poly::Poly;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(p, F low-to-high, r)` for the fixed pairing contexts.
pub const MAIN: (u64, [i64; 6], u64) = (109, [53, 1, 16, 91, 18, 1], 457);
pub const K6: (u64, [i64; 6], u64) = (127, [77, 105, 65, 71, 62, 1], 1231);
pub const SMALL: (u64, [i64; 6], u64) = (7, [6, 0, 0, 1, 0, 1], 43);

pub fn curve(p: u64, f: &[i64]) -> CurveParams {
    let field = FieldDescriptor::prime(p).unwrap();
    CurveParams::with_f(&field, 2, f).unwrap()
}

pub fn context((p, f, r): (u64, [i64; 6], u64)) -> PairingContext {
    PairingContext::new(&curve(p, &f), r).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonsingular `y^2 = F(x)` quintics over `F_p`: `x^5 + 1` plus the first
/// two nonsingular entries of a fixed candidate list.
pub fn small_curves(p: u64) -> Vec<CurveParams> {
    let candidates: [[i64; 6]; 5] = [
        [6, 0, 0, 1, 0, 1],
        [3, 2, 0, 0, 0, 1],
        [1, 1, 1, 0, 0, 1],
        [2, 0, 1, 0, 3, 1],
        [5, 4, 0, 2, 0, 1],
    ];
    let field = FieldDescriptor::prime(p).unwrap();
    let mut out = vec![CurveParams::with_f(&field, 2, &[1, 0, 0, 0, 0, 1]).unwrap()];
    out.extend(candidates.iter().filter_map(|f| CurveParams::with_f(&field, 2, f).ok()).take(2));
    assert_eq!(out.len(), 3);
    out
}

/// A support point over `F_{q^2}` with its multiplicity.
#[derive(Clone, Debug)]
struct Place {
    x: FieldElement,
    y: FieldElement,
    mult: usize,
}

/// Group law through explicit points: supports are decomposed over
/// `F_{q^2}`, opposite points cancel, the remaining effective divisor `E` is
/// interpolated by `y = w(x)` (Hermite at repeated points) and the sum is
/// `-(div(y - w) - E)`.  Independent of Cantor's composition step.
pub struct FormalOracle {
    curve: CurveParams,
    big: Field,
    emb: FieldEmbedding,
    f_big: Poly,
}

impl FormalOracle {
    pub fn new(curve: &CurveParams) -> Self {
        let (big, emb) = extension_of(curve.field(), 2).unwrap();
        let f_big = curve.f.embed(&emb);
        FormalOracle { curve: curve.clone(), big, emb, f_big }
    }

    fn places(&self, d: &ReducedDivisor) -> Vec<Place> {
        let u = d.u.embed(&self.emb);
        let v = d.v.embed(&self.emb);
        let mut out = Vec::new();
        for x in u.roots(&mut rng(1)) {
            let lin = Poly::linear(&x);
            let mut rest = u.clone();
            let mut mult = 0;
            while rest.rem(&lin).is_zero() {
                rest = rest.div_exact(&lin).unwrap();
                mult += 1;
            }
            out.push(Place { y: v.eval(&x), x, mult });
        }
        out
    }

    pub fn add(&self, a: &ReducedDivisor, b: &ReducedDivisor) -> ReducedDivisor {
        let mut places = self.places(a);
        for pb in self.places(b) {
            match places.iter_mut().find(|pa| pa.x == pb.x) {
                None => places.push(pb),
                Some(pa) if pa.y == pb.y && pa.y.is_zero() => pa.mult = (pa.mult + pb.mult) % 2,
                Some(pa) if pa.y == pb.y => pa.mult += pb.mult,
                Some(pa) => {
                    assert_eq!(pa.y, -&pb.y);
                    let c = pa.mult.min(pb.mult);
                    pa.mult -= c;
                    if pb.mult > c {
                        pa.mult = pb.mult - c;
                        pa.y = pb.y;
                    }
                }
            }
        }
        places.retain(|p| p.mult > 0);
        let (w, modulus) = self.interpolate(&places);
        let n: usize = places.iter().map(|p| p.mult).sum();
        let (u, v) = if n <= self.curve.genus {
            (modulus, w)
        } else {
            let resid = (&self.f_big - &(&w * &w)).div_exact(&modulus).unwrap().monic();
            let v = (-&w).rem(&resid);
            (resid, v)
        };
        ReducedDivisor { u: self.descend(&u), v: self.descend(&v) }
    }

    fn descend(&self, p: &Poly) -> Poly {
        let coeffs = p.coeffs().iter().map(|c| self.emb.preimage(c).expect("result is rational")).collect();
        Poly::new(self.curve.field(), coeffs)
    }

    /// `w` with `y - w(x)` vanishing to order `mult` at every place, and the
    /// product of `(x - x_P)^mult`.
    fn interpolate(&self, places: &[Place]) -> (Poly, Poly) {
        let mut w = Poly::zero(&self.big);
        let mut modulus = Poly::one(&self.big);
        for pl in places {
            let lin = Poly::linear(&pl.x);
            let mut m = Poly::one(&self.big);
            for _ in 0..pl.mult {
                m = &m * &lin;
            }
            let local = self.local_branch(pl);
            let (g, s, _) = modulus.xgcd(&m);
            assert!(g.is_one());
            let corr = (&(&local - &w) * &s).rem(&m);
            w = &w + &(&modulus * &corr);
            modulus = &modulus * &m;
        }
        (w.rem(&modulus), modulus)
    }

    /// The branch `y(x)` through the place, as a polynomial in `x` exact to
    /// order `mult` at `x_P`.
    fn local_branch(&self, pl: &Place) -> Poly {
        let n = pl.mult;
        if pl.y.is_zero() {
            assert_eq!(n, 1);
            return Poly::zero(&self.big);
        }
        // Taylor coefficients of F at x_P.
        let fc = taylor(&self.f_big, &pl.x);
        let two_y_inv = (&pl.y + &pl.y).inv().unwrap();
        let mut c = vec![pl.y.clone()];
        for j in 1..n {
            let mut acc = fc.get(j).cloned().unwrap_or_else(|| FieldElement::zero(&self.big));
            for i in 1..j {
                acc = &acc - &(&c[i] * &c[j - i]);
            }
            c.push(&acc * &two_y_inv);
        }
        // Σ c_j (x - x_P)^j
        let shift = Poly::linear(&pl.x);
        let mut out = Poly::zero(&self.big);
        for cj in c.iter().rev() {
            out = &(&out * &shift) + &Poly::constant(cj.clone());
        }
        out
    }
}

/// Coefficients of `p(a + t)` in `t`.
fn taylor(p: &Poly, a: &FieldElement) -> Vec<FieldElement> {
    let mut rest = p.clone();
    let lin = Poly::linear(a);
    let mut out = Vec::new();
    while !rest.is_zero() {
        let (q, r) = rest.divrem(&lin).unwrap();
        out.push(r.coeff(0));
        rest = q;
    }
    out
}

/// The three Mumford conditions for `y^2 + h y = F`.
pub fn mumford_ok(curve: &CurveParams, d: &ReducedDivisor) -> bool {
    let u = &d.u;
    let v = &d.v;
    let norm = &(&(v * v) + &(&curve.h * v)) - &curve.f;
    u.is_monic() && v.degree() < u.degree() && u.degree() <= curve.genus as i64 && norm.rem(u).is_zero()
}

/// `(T^k - 1) / r mod r`.
pub fn l_over_r(t: &BigUint, k: usize, r: u64) -> u64 {
    let rb = BigUint::from(r);
    let l = (t.pow(k as u32) - 1u32) / &rb;
    (l % &rb).to_u64().unwrap()
}

pub fn mod_r(n: &BigInt, r: u64) -> u64 {
    let rb = BigInt::from(r);
    (((n % &rb) + &rb) % &rb).to_u64().unwrap()
}

/// Exponent `E` with `hv(s, h) = tate^E` for any `s` that is a power of `q`
/// modulo `r`: `h(s)/r - Σ h_i s^i (s^{ik} - 1) / (r k)`.
pub fn hv_exponent(spec: &HvSpec, k: usize, r: u64) -> u64 {
    let rb = BigInt::from(r);
    let mut e = mod_r(&(spec.h_at_s() / &rb), r);
    let k_inv = inv_mod(k as u64 % r, r).unwrap();
    let s = spec.s.magnitude().clone();
    for (i, hi) in spec.h.iter().enumerate().skip(1) {
        let si = s.pow(i as u32);
        let corr = mul_mod(mul_mod((&si % r).to_u64().unwrap(), l_over_r(&si, k, r), r), k_inv, r);
        e = (e + r - mul_mod(mod_r(hi, r), corr, r)) % r;
    }
    e
}
