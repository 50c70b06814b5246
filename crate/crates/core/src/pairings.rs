//! Pairings on the `r`-torsion of a genus-2 Jacobian: the modified Tate
//! pairing, Weil, Ate, the HV family (Ate_i, Vercauteren, R-ate) and
//! twisted Ate, with final exponentiation and support-collision handling.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime, mul_mod, pow_mod};
use crate::curve::{extension_of, frobenius_charpoly, jacobian_order, CharPoly, CurveParams};
use crate::error::{Error, Result};
use crate::field::{big_mod_u64, same_field, Field, FieldElement, FieldEmbedding};
use crate::jacobian::{
    compose_reduce, project_eigenspace, random_divisor, sample_torsion, scalar_mul, scalar_mul_u64,
    ReducedDivisor, TORSION_RETRIES,
};
use crate::miller::{
    cantor_function_value, combine_chain, generalized_miller_eval, loop_log2, miller_function,
    MillerFunctionSpec,
};
use crate::pfsearch::embedding_degree;

/// `(s, h)` of an HV pairing `f_{s,h,D2}(D1)^{(q^k-1)/r}`.
pub type HvSpec = MillerFunctionSpec;

/// Attempts at refreshing the second argument after a support collision.
pub const REFRESH_RETRIES: usize = 16;

/// Random draws used to rule out elements of order `r^2`.
const SQUARE_TORSION_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinalExpMode {
    #[default]
    Plain,
    /// `v^{q^{k/2}-1}` by conjugation, then `(q^{k/2}+1)/r`.  Falls back to
    /// the plain power for odd `k`.
    Split,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub final_exp: FinalExpMode,
    /// Skip the Miller denominator in the Tate loop when it provably lies in
    /// `F_{q^{k/2}}`.
    pub denominator_elimination: bool,
    /// Evaluate through a random refresh of the second argument even when the
    /// direct evaluation succeeds.
    pub force_refresh: bool,
}

/// Where a second argument lives; refresh samples are drawn from the same set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Domain {
    AnyClass,
    Torsion,
    G1,
    G2,
}

/// Everything fixed by the choice of curve, `r` and `k`.
#[derive(Clone, Debug)]
pub struct PairingContext {
    pub curve: CurveParams,
    /// The curve over `F_{q^k}`.
    pub curve_k: CurveParams,
    pub r: u64,
    pub k: usize,
    pub q: BigUint,
    pub cp: CharPoly,
    /// `(q^k - 1) / r`.
    pub final_exponent: BigUint,
    pub pairing_field: Field,
    /// `F_q -> F_{q^k}`.
    pub emb: FieldEmbedding,
    pub options: EvalOptions,
    id_k: FieldEmbedding,
    /// `[F_q : F_p]`.
    base_degree: usize,
    jac_order_1: BigUint,
    jac_order_k: BigUint,
}

impl PairingContext {
    /// Builds a context, counting points to obtain the characteristic
    /// polynomial.
    pub fn new(curve: &CurveParams, r: u64) -> Result<Self> {
        let cp = frobenius_charpoly(curve)?;
        Self::with_charpoly(curve, r, cp)
    }

    /// Builds a context from a known characteristic polynomial.
    pub fn with_charpoly(curve: &CurveParams, r: u64, cp: CharPoly) -> Result<Self> {
        if curve.genus != 2 {
            return Err(Error::InvalidContext("pairings need a genus-2 curve".into()));
        }
        if cp.q != *curve.q() || cp.genus != 2 {
            return Err(Error::InvalidContext("characteristic polynomial does not match the curve".into()));
        }
        if !is_prime(r) {
            return Err(Error::InvalidContext(format!("r = {r} is not prime")));
        }
        let q = curve.q().clone();
        let k = embedding_degree(&q, r)? as usize;
        let jac_order_1 = jacobian_order(&cp, 1);
        if !(&jac_order_1 % r).is_zero() {
            return Err(Error::NoTorsion(r));
        }
        let (pairing_field, emb) = extension_of(curve.field(), k)?;
        let curve_k = curve.base_change(&emb);
        let qk = q.pow(k as u32);
        let final_exponent = (&qk - 1u32) / r;
        let ctx = PairingContext {
            curve: curve.clone(),
            curve_k,
            r,
            k,
            q,
            jac_order_k: jacobian_order(&cp, k),
            cp,
            final_exponent,
            id_k: FieldEmbedding::identity(&pairing_field),
            pairing_field,
            emb,
            options: EvalOptions::default(),
            base_degree: curve.field().degree(),
            jac_order_1,
        };
        ctx.check_no_square_torsion()?;
        Ok(ctx)
    }

    /// Elements of `r`-power order in `Jac(F_{q^k})` must all be killed by
    /// `r`; checked on random samples.
    fn check_no_square_torsion(&self) -> Result<()> {
        let cofactor = BigInt::from(strip_factor(&self.jac_order_k, self.r).0);
        let mut rng = ChaCha8Rng::seed_from_u64(self.r ^ 0x7a11);
        for _ in 0..SQUARE_TORSION_SAMPLES {
            let x = scalar_mul(&self.curve_k, &random_divisor(&self.curve_k, &mut rng)?, &cofactor)?;
            if !scalar_mul_u64(&self.curve_k, &x, self.r)?.is_identity() {
                return Err(Error::InvalidContext(format!(
                    "Jac(F_q^{}) has elements of order {}^2",
                    self.k, self.r
                )));
            }
        }
        Ok(())
    }

    pub fn q_mod_r(&self) -> u64 {
        big_mod_u64(&self.q, self.r)
    }

    /// `#Jac(F_{q^d})`.
    pub fn jacobian_order(&self, d: usize) -> BigUint {
        match d {
            1 => self.jac_order_1.clone(),
            d if d == self.k => self.jac_order_k.clone(),
            d => jacobian_order(&self.cp, d),
        }
    }

    /// `q`-power Frobenius on a divisor over `F_{q^k}`.
    pub fn frobenius(&self, d: &ReducedDivisor) -> ReducedDivisor {
        d.frobenius_power(self.base_degree)
    }

    /// A divisor over `F_q` seen over `F_{q^k}`.
    pub fn lift(&self, d: &ReducedDivisor) -> ReducedDivisor {
        d.embed(&self.emb)
    }

    /// The `F_q`-model of a divisor over `F_{q^k}`, when it is defined over
    /// `F_q`.
    pub fn descend(&self, d: &ReducedDivisor) -> Option<ReducedDivisor> {
        let down = |p: &crate::poly::Poly| -> Option<crate::poly::Poly> {
            let coeffs = p.coeffs().iter().map(|c| self.emb.preimage(c)).collect::<Option<Vec<_>>>()?;
            Some(crate::poly::Poly::new(self.curve.field(), coeffs))
        };
        Some(ReducedDivisor { u: down(&d.u)?, v: down(&d.v)? })
    }

    pub fn is_r_torsion(&self, d: &ReducedDivisor) -> Result<bool> {
        Ok(scalar_mul_u64(&self.curve_k, d, self.r)?.is_identity())
    }

    /// `d` is `r`-torsion and fixed by Frobenius.
    pub fn in_g1(&self, d: &ReducedDivisor) -> Result<bool> {
        Ok(self.frobenius(d) == *d && self.is_r_torsion(d)?)
    }

    /// `d` is `r`-torsion and Frobenius acts on it as `[q]`.
    pub fn in_g2(&self, d: &ReducedDivisor) -> Result<bool> {
        Ok(self.is_r_torsion(d)? && self.frobenius(d) == scalar_mul_u64(&self.curve_k, d, self.q_mod_r())?)
    }

    /// A nonzero element of `Jac(F_{q^d})[r]`, returned over `F_{q^k}`.
    pub fn sample_r_torsion<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Result<ReducedDivisor> {
        if d == 0 || !self.k.is_multiple_of(d) {
            return Err(Error::NotADivisor(d, self.k));
        }
        let order = self.jacobian_order(d);
        if d == self.k {
            return sample_torsion(&self.curve_k, &order, self.r, rng);
        }
        if d == 1 {
            return Ok(self.lift(&sample_torsion(&self.curve, &order, self.r, rng)?));
        }
        let (field_d, emb_d) = extension_of(self.curve.field(), d)?;
        let curve_d = self.curve.base_change(&emb_d);
        let up = FieldEmbedding::new(&field_d, &self.pairing_field)?;
        Ok(sample_torsion(&curve_d, &order, self.r, rng)?.embed(&up))
    }

    pub fn project_g1(&self, d: &ReducedDivisor) -> Result<ReducedDivisor> {
        project_eigenspace(&self.curve_k, d, &self.cp.coeffs, self.r, 1, self.base_degree)
    }

    pub fn project_g2(&self, d: &ReducedDivisor) -> Result<ReducedDivisor> {
        project_eigenspace(&self.curve_k, d, &self.cp.coeffs, self.r, self.q_mod_r(), self.base_degree)
    }

    /// A nonzero element of `G1 = Jac(F_q)[r]`.
    pub fn sample_g1<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ReducedDivisor> {
        self.sample_r_torsion(1, rng)
    }

    /// A nonzero element of `G2`, the `q`-eigenspace of Frobenius.
    pub fn sample_g2<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ReducedDivisor> {
        for _ in 0..TORSION_RETRIES {
            let y = self.project_g2(&self.sample_r_torsion(self.k, rng)?)?;
            if !y.is_identity() {
                return Ok(y);
            }
        }
        Err(Error::RetriesExhausted)
    }

    fn sample_domain<R: Rng + ?Sized>(&self, domain: Domain, rng: &mut R) -> Result<ReducedDivisor> {
        match domain {
            Domain::AnyClass => random_divisor(&self.curve_k, rng),
            Domain::Torsion => self.sample_r_torsion(self.k, rng),
            Domain::G1 => self.sample_g1(rng),
            Domain::G2 => self.sample_g2(rng),
        }
    }

    /// `v^{(q^k-1)/r}`.
    pub fn final_exponentiation(&self, v: &FieldElement, mode: FinalExpMode) -> Result<FieldElement> {
        if v.is_zero() {
            return Err(Error::ZeroInput);
        }
        match mode {
            FinalExpMode::Split if self.k.is_multiple_of(2) => {
                // v^{q^l - 1} = conj(v) / v, then (q^l + 1) / r.
                let l = self.k / 2;
                let easy = &v.conjugate() * &v.inv()?;
                let hard = (self.q.pow(l as u32) + 1u32) / self.r;
                Ok(easy.pow(&hard))
            }
            _ => Ok(v.pow(&self.final_exponent)),
        }
    }

    fn finish(&self, v: &FieldElement) -> Result<FieldElement> {
        self.final_exponentiation(v, self.options.final_exp)
    }

    /// Evaluates `f` at `y`, or at `y + S` and `S` for random `S` from the
    /// domain of `y` when `y` meets the support of a Miller function.
    fn with_refresh<F>(&self, y: &ReducedDivisor, domain: Domain, f: F) -> Result<FieldElement>
    where
        F: Fn(&ReducedDivisor) -> Result<FieldElement>,
    {
        if !self.options.force_refresh {
            match f(y) {
                Err(Error::ZeroEncountered) => {}
                other => return other,
            }
        }
        let mut rng = refresh_rng(y);
        for _ in 0..REFRESH_RETRIES {
            let s = self.sample_domain(domain, &mut rng)?;
            let ys = compose_reduce(&self.curve_k, y, &s)?;
            match (f(&ys), f(&s)) {
                (Ok(a), Ok(b)) => return Ok(&a * &b.inv()?),
                (Err(Error::ZeroEncountered), _) | (_, Err(Error::ZeroEncountered)) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
        Err(Error::RetriesExhausted)
    }

    /// `f^norm_{s,X}(eps(at))` with the loop over `F_q` when `X` is defined
    /// there.
    fn miller(&self, x: &ReducedDivisor, at: &ReducedDivisor, s: &BigInt, track_den: bool) -> Result<FieldElement> {
        match self.descend(x) {
            Some(xq) => Ok(miller_function(&self.curve, &xq, at, s, &self.emb, track_den)?.value),
            None => Ok(miller_function(&self.curve_k, x, at, s, &self.id_k, track_den)?.value),
        }
    }

    fn require_torsion(&self, d: &ReducedDivisor) -> Result<()> {
        if !self.is_r_torsion(d)? {
            return Err(Error::InvariantViolation("argument is not r-torsion".into()));
        }
        Ok(())
    }

    fn require_eigen(&self, d2: &ReducedDivisor, d1: &ReducedDivisor) -> Result<()> {
        if !self.in_g2(d2)? || !self.in_g1(d1)? {
            return Err(Error::NotInEigenspace);
        }
        Ok(())
    }

    /// Whether the Tate loop for `(d1, d2)` may drop its denominator: `k`
    /// even, `d1` over `F_q` and `u2` over `F_{q^{k/2}}`.
    pub fn denominator_elimination_applies(&self, d1: &ReducedDivisor, d2: &ReducedDivisor) -> bool {
        if !self.k.is_multiple_of(2) || self.descend(d1).is_none() {
            return false;
        }
        let half = self.base_degree * self.k / 2;
        d2.u.coeffs().iter().all(|c| c.subfield_test(half).unwrap_or(false))
    }

    /// The unexponentiated value `f^norm_{r,D1}(eps(D2))`, defined only modulo
    /// `r`-th powers; for debugging.
    pub fn tate_raw(&self, d1: &ReducedDivisor, d2: &ReducedDivisor) -> Result<FieldElement> {
        self.require_torsion(d1)?;
        self.miller(d1, d2, &BigInt::from(self.r), true)
    }

    /// Modified Tate pairing `f_{r,D1}(D2)^{(q^k-1)/r}` for `D1` of order `r`
    /// and any class `D2` over `F_{q^k}`.
    pub fn tate(&self, d1: &ReducedDivisor, d2: &ReducedDivisor) -> Result<FieldElement> {
        self.require_torsion(d1)?;
        let r = BigInt::from(self.r);
        self.with_refresh(d2, Domain::AnyClass, |y| {
            let track_den = !(self.options.denominator_elimination && self.denominator_elimination_applies(d1, y));
            self.finish(&self.miller(d1, y, &r, track_den)?)
        })
    }

    /// Weil pairing `(-1)^{n1 n2} f_{r,D1}(D2) / f_{r,D2}(D1)` with
    /// `n_i = deg u_i`.
    pub fn weil(&self, d1: &ReducedDivisor, d2: &ReducedDivisor) -> Result<FieldElement> {
        self.require_torsion(d1)?;
        self.require_torsion(d2)?;
        let r = BigInt::from(self.r);
        self.with_refresh(d2, Domain::Torsion, |y| {
            let a = self.miller(d1, y, &r, true)?;
            let b = self.miller(y, d1, &r, true)?;
            let mut v = &a * &b.inv()?;
            if (d1.weight() * y.weight()) % 2 == 1 {
                v = -v;
            }
            Ok(v)
        })
    }

    /// Ate pairing `f^norm_{q,D2}(eps(D1))`, no final exponentiation.
    pub fn ate(&self, d2: &ReducedDivisor, d1: &ReducedDivisor) -> Result<FieldElement> {
        self.require_eigen(d2, d1)?;
        let q = BigInt::from(self.q.clone());
        let v = self.with_refresh(d1, Domain::G1, |y| self.miller(d2, y, &q, true))?;
        debug_assert!(v.pow_u64(self.r).is_one());
        Ok(v)
    }

    /// HV pairing `f_{s,h,D2}(D1)^{(q^k-1)/r}`.
    pub fn hv(&self, d2: &ReducedDivisor, d1: &ReducedDivisor, spec: &HvSpec) -> Result<FieldElement> {
        let s_mod = big_mod_u64(&mod_floor_big(&spec.s, self.r), self.r);
        let qr = self.q_mod_r();
        if !(0..self.k as u64).any(|j| pow_mod(qr, j, self.r) == s_mod) {
            return Err(Error::BadSpec(format!("s is not a power of q modulo {}", self.r)));
        }
        if !(spec.h_at_s() % BigInt::from(self.r)).is_zero() {
            return Err(Error::BadH);
        }
        self.require_eigen(d2, d1)?;
        self.with_refresh(d1, Domain::G1, |y| {
            self.finish(&generalized_miller_eval(&self.curve_k, d2, y, spec, self.r, &self.id_k)?)
        })
    }

    /// Ate_i pairing `f_{T,D2}(D1)^{(q^k-1)/r}` with `T = q^j mod r`.
    pub fn ate_i(&self, d2: &ReducedDivisor, d1: &ReducedDivisor, j: usize) -> Result<FieldElement> {
        if j == 0 || j >= self.k {
            return Err(Error::BadSpec(format!("ate_i needs 0 < j < k, got j = {j}")));
        }
        self.require_eigen(d2, d1)?;
        let t = BigInt::from(self.frobenius_residue(j));
        self.with_refresh(d1, Domain::G1, |y| self.finish(&self.miller(d2, y, &t, true)?))
    }

    /// `q^j mod r`.
    pub fn frobenius_residue(&self, j: usize) -> u64 {
        pow_mod(self.q_mod_r(), j as u64, self.r)
    }

    /// Vercauteren's pairing for `m r = sum h_i q^i`:
    /// `(prod f_{h_i,D2}(D1)^{q^i} prod g_j(D1))^{(q^k-1)/r}`.
    pub fn vercauteren(
        &self,
        d2: &ReducedDivisor,
        d1: &ReducedDivisor,
        h: &[BigInt],
        m: &BigInt,
    ) -> Result<FieldElement> {
        let q = BigInt::from(self.q.clone());
        let total = h.iter().rev().fold(BigInt::zero(), |acc, c| acc * &q + c);
        if total != m * BigInt::from(self.r) {
            return Err(Error::BadExpansion);
        }
        if !m.gcd(&BigInt::from(self.r)).is_one() {
            return Err(Error::NotCoprime(m.to_string(), self.r.to_string()));
        }
        self.require_eigen(d2, d1)?;
        self.with_refresh(d1, Domain::G1, |y| {
            let mut value = FieldElement::one(&self.pairing_field);
            let mut pieces = Vec::with_capacity(h.len());
            for (i, h_i) in h.iter().enumerate() {
                let mv = miller_function(&self.curve_k, d2, y, h_i, &self.id_k, true)?;
                // f_{h_i, pi^i D2}(D1) = f_{h_i, D2}(D1)^{q^i} for D1 over F_q.
                let e = self.base_degree * i;
                value = &value * &mv.value.frobenius_power(e);
                pieces.push(mv.multiple.frobenius_power(e));
            }
            value = &value * &combine_chain(&self.curve_k, &pieces, y, &self.id_k)?;
            self.finish(&value)
        })
    }

    /// R-ate pairing, product form
    /// `(f_{a,D2}(D1)^{q^j} f_{b,D2}(D1) g(D1))^{(q^k-1)/r}`.
    pub fn rate(&self, d2: &ReducedDivisor, d1: &ReducedDivisor, spec: &RateSpec) -> Result<FieldElement> {
        spec.validate(self)?;
        self.require_eigen(d2, d1)?;
        let a = BigInt::from(spec.a);
        let b = BigInt::from(spec.b);
        let e = self.base_degree * spec.j;
        self.with_refresh(d1, Domain::G1, |y| {
            let fa = miller_function(&self.curve_k, d2, y, &a, &self.id_k, true)?;
            let fb = miller_function(&self.curve_k, d2, y, &b, &self.id_k, true)?;
            let big_a = fa.multiple.frobenius_power(e);
            let g = cantor_function_value(&self.curve_k, &big_a, &fb.multiple, y, &self.id_k)?;
            let v = &(&fa.value.frobenius_power(e) * &fb.value) * &g.value;
            self.finish(&v)
        })
    }

    /// R-ate pairing, ratio form `(f_{T_i,D2}(D1) / f_{T_j,D2}(D1)^a)^{(q^k-1)/r}`.
    pub fn rate_ratio(&self, d2: &ReducedDivisor, d1: &ReducedDivisor, spec: &RateSpec) -> Result<FieldElement> {
        spec.validate(self)?;
        self.require_eigen(d2, d1)?;
        let ti = BigInt::from(spec.t_i);
        let tj = BigInt::from(spec.t_j);
        self.with_refresh(d1, Domain::G1, |y| {
            let num = self.miller(d2, y, &ti, true)?;
            let den = self.miller(d2, y, &tj, true)?.pow_u64(spec.a);
            self.finish(&(&num * &den.inv()?))
        })
    }

    /// Twisted Ate pairing `f_{q^e,D1}(D2)^{(q^k-1)/r}` on `G1 x G2`, with
    /// the Miller loop over `F_q`.
    pub fn twisted_ate(&self, d1: &ReducedDivisor, d2: &ReducedDivisor, e: u64) -> Result<FieldElement> {
        if e == 0 || !(self.k as u64).is_multiple_of(e) {
            return Err(Error::BadTwistExponent(e, self.k as u64));
        }
        self.require_eigen(d2, d1)?;
        let d1q = self
            .descend(d1)
            .ok_or_else(|| Error::InvariantViolation("G1 element not defined over F_q".into()))?;
        let s = BigInt::from(self.q.pow(e as u32));
        self.with_refresh(d2, Domain::G2, |y| {
            let mv = miller_function(&self.curve, &d1q, y, &s, &self.emb, true)?;
            assert!(same_field(mv.multiple.field(), self.curve.field()));
            self.finish(&mv.value)
        })
    }

    /// Routes a named pairing and reports its loop accounting.
    pub fn pairing_dispatch(
        &self,
        name: &str,
        a: &ReducedDivisor,
        b: &ReducedDivisor,
        params: &PairingParams,
    ) -> Result<PairingOutput> {
        let need = |what: &str| Error::BadSpec(format!("pairing '{name}' needs {what}"));
        let (value, loop_bits, loop_log, final_exp) = match name {
            "tate" => {
                let r = BigInt::from(self.r);
                (self.tate(a, b)?, r.bits(), loop_log2(&r), true)
            }
            "weil" => {
                let r = BigInt::from(self.r);
                (self.weil(a, b)?, 2 * r.bits(), 2.0 * loop_log2(&r), false)
            }
            "ate" => {
                let q = BigInt::from(self.q.clone());
                (self.ate(a, b)?, q.bits(), loop_log2(&q), false)
            }
            "hv" => {
                let spec = params.hv.as_ref().ok_or_else(|| need("an HV spec"))?;
                let log = spec.h.iter().filter(|c| !c.is_zero()).map(loop_log2).sum();
                (self.hv(a, b, spec)?, spec.loop_bits(), log, true)
            }
            "ate_i" => {
                let j = params.ate_j.ok_or_else(|| need("j"))?;
                let t = BigInt::from(self.frobenius_residue(j));
                (self.ate_i(a, b, j)?, t.bits(), loop_log2(&t), true)
            }
            "vercauteren" => {
                let (h, m) = params.vercauteren.as_ref().ok_or_else(|| need("h and m"))?;
                let bits = h.iter().filter(|c| !c.is_zero()).map(|c| c.bits()).sum();
                let log = h.iter().filter(|c| !c.is_zero()).map(loop_log2).sum();
                (self.vercauteren(a, b, h, m)?, bits, log, true)
            }
            "rate" => {
                let (i, j) = params.rate.ok_or_else(|| need("i and j"))?;
                let spec = RateSpec::new(self, i, j)?;
                let (ba, bb) = (BigInt::from(spec.a), BigInt::from(spec.b));
                let bits = ba.bits() + bb.bits();
                (self.rate(a, b, &spec)?, bits, loop_log2(&ba) + loop_log2(&bb), true)
            }
            "twisted_ate" => {
                let e = params.twist_e.ok_or_else(|| need("e"))?;
                let s = BigInt::from(self.q.pow(e as u32));
                (self.twisted_ate(a, b, e)?, s.bits(), loop_log2(&s), true)
            }
            other => return Err(Error::UnknownPairing(other.to_string())),
        };
        Ok(PairingOutput {
            value,
            pairing: name.to_string(),
            loop_bits,
            loop_log2: loop_log,
            final_exp,
        })
    }
}

/// Names accepted by [`PairingContext::pairing_dispatch`].
pub const PAIRING_NAMES: [&str; 8] = ["tate", "weil", "ate", "hv", "ate_i", "vercauteren", "rate", "twisted_ate"];

/// Extra inputs for the parameterized pairings.
#[derive(Clone, Debug, Default)]
pub struct PairingParams {
    pub hv: Option<HvSpec>,
    pub ate_j: Option<usize>,
    pub vercauteren: Option<(Vec<BigInt>, BigInt)>,
    pub rate: Option<(usize, usize)>,
    pub twist_e: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct PairingOutput {
    pub value: FieldElement,
    pub pairing: String,
    /// Sum of the bit lengths of the Miller loop scalars.
    pub loop_bits: u64,
    pub loop_log2: f64,
    pub final_exp: bool,
}

/// R-ate parameters: `T_i = a T_j + b` with `T_l = q^l mod r`,
/// `0 < i < j < k` and `0 <= b < T_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateSpec {
    pub i: usize,
    pub j: usize,
    pub t_i: u64,
    pub t_j: u64,
    pub a: u64,
    pub b: u64,
}

impl RateSpec {
    pub fn new(ctx: &PairingContext, i: usize, j: usize) -> Result<Self> {
        if !(0 < i && i < j && j < ctx.k) {
            return Err(Error::BadSpec(format!("R-ate needs 0 < i < j < k, got i = {i}, j = {j}")));
        }
        let t_i = ctx.frobenius_residue(i);
        let t_j = ctx.frobenius_residue(j);
        Ok(RateSpec {
            i,
            j,
            t_i,
            t_j,
            a: t_i / t_j,
            b: t_i % t_j,
        })
    }

    fn validate(&self, ctx: &PairingContext) -> Result<()> {
        let fresh = RateSpec::new(ctx, self.i, self.j)?;
        if *self != fresh {
            return Err(Error::BadSpec("T_i, T_j, a, b inconsistent with i, j".into()));
        }
        Ok(())
    }

    /// The equivalent HV spec: `s = q`, `h(x) = a x^j - x^i + b`.
    pub fn to_hv(&self, ctx: &PairingContext) -> HvSpec {
        let mut h = vec![BigInt::zero(); self.j + 1];
        h[0] += BigInt::from(self.b);
        h[self.i] -= 1;
        h[self.j] += BigInt::from(self.a);
        HvSpec {
            s: BigInt::from(ctx.q.clone()),
            h,
        }
    }
}

/// Whether an HV pairing with this spec is non-degenerate: `h(s) != 0 mod r^2`.
pub fn hv_nondegenerate(spec: &HvSpec, r: u64) -> bool {
    let r2 = BigInt::from(r) * BigInt::from(r);
    !(spec.h_at_s() % r2).is_zero()
}

/// The lift `s` of `t` with `s = t mod r` and `s^k = 1 mod r^2`, given
/// `t^k = 1 mod r`.
pub fn lift_root_of_unity(t: u64, k: u64, r: u64) -> Result<u64> {
    if pow_mod(t, k, r) != 1 {
        return Err(Error::BadSpec(format!("{t}^{k} != 1 mod {r}")));
    }
    let r2 = r as u128 * r as u128;
    let r2 = u64::try_from(r2).map_err(|_| Error::TooLarge(format!("{r}^2")))?;
    let tk = pow_mod(t, k, r2);
    let c = ((tk + r2 - 1) % r2) / r; // (t^k - 1) / r mod r
    let deriv = mul_mod(k % r, pow_mod(t, k - 1, r), r);
    let inv = inv_mod(deriv, r).ok_or_else(|| Error::NotCoprime(k.to_string(), r.to_string()))?;
    let step = mul_mod(r - c % r, inv, r) % r;
    Ok(t + step * r)
}

/// Short Vercauteren expansion `m r = sum_{i<=n} h_i q^i` with
/// `|h_i| <= bound` for `i >= 1`, minimizing `sum log2 |h_i|`; `h_0` is
/// the centered residue.  Exhaustive over the box.
pub fn short_vercauteren_expansion(q: &BigUint, r: u64, n: usize, bound: u64) -> Option<(Vec<BigInt>, BigInt)> {
    let q_mod = big_mod_u64(q, r);
    let rb = BigInt::from(r);
    let qb = BigInt::from(q.clone());
    let width = 2 * bound + 1;
    let total = (width as u128).checked_pow(n as u32)?;
    let mut best: Option<(f64, Vec<BigInt>, BigInt)> = None;
    for idx in 0..total {
        let mut rest = idx;
        let mut h = vec![BigInt::zero(); n + 1];
        let mut acc: u64 = 0;
        for (i, slot) in h.iter_mut().enumerate().skip(1) {
            let c = (rest % width as u128) as i64 - bound as i64;
            rest /= width as u128;
            *slot = BigInt::from(c);
            let term = mul_mod(c.rem_euclid(r as i64) as u64, pow_mod(q_mod, i as u64, r), r);
            acc = (acc + term) % r;
        }
        if h[n].is_zero() {
            continue;
        }
        let h0 = (r - acc) % r;
        h[0] = if h0 > r / 2 { BigInt::from(h0) - &rb } else { BigInt::from(h0) };
        let sum = h.iter().rev().fold(BigInt::zero(), |a, c| a * &qb + c);
        let m = &sum / &rb;
        if m.is_zero() || !m.gcd(&rb).is_one() {
            continue;
        }
        let cost: f64 = h.iter().filter(|c| !c.is_zero()).map(loop_log2).sum();
        if best.as_ref().is_none_or(|(b, _, _)| cost < *b) {
            best = Some((cost, h, m));
        }
    }
    best.map(|(_, h, m)| (h, m))
}

fn strip_factor(n: &BigUint, r: u64) -> (BigUint, u32) {
    let mut n = n.clone();
    let mut e = 0;
    while (&n % r).is_zero() && !n.is_zero() {
        n /= r;
        e += 1;
    }
    (n, e)
}

fn mod_floor_big(s: &BigInt, r: u64) -> BigUint {
    let rb = BigInt::from(r);
    let m = s.mod_floor(&rb);
    debug_assert!(m.sign() != Sign::Minus);
    m.magnitude().clone()
}

fn refresh_rng(d: &ReducedDivisor) -> ChaCha8Rng {
    let mut h = DefaultHasher::new();
    d.hash(&mut h);
    ChaCha8Rng::seed_from_u64(h.finish())
}

/// `e` with `v = w^e` in a cyclic group of prime order `r`, by exhaustion;
/// for tests at desk scale.
pub fn discrete_log(w: &FieldElement, v: &FieldElement, r: u64) -> Option<u64> {
    let mut acc = FieldElement::one(w.field());
    for e in 0..r {
        if acc == *v {
            return Some(e);
        }
        acc = &acc * w;
    }
    None
}
