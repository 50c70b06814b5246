//! Exhaustive search for pairing-friendly genus-2 curves `y^2 = F(x)` over
//! small prime fields.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_prime, multiplicative_order, multiplicative_order_big, pow_mod, FactorBudget};
use crate::curve::{classify, CharPoly, CurveClass, CurveParams};
use crate::error::{Error, Result};
use crate::field::{is_irreducible_fp, FieldDescriptor};

/// Smallest `k` with `r | q^k - 1`.
pub fn embedding_degree(q: &BigUint, r: u64) -> Result<u64> {
    multiplicative_order_big(q, r).ok_or_else(|| Error::NotCoprime(q.to_string(), r.to_string()))
}

/// `g log q / log r`.
pub fn rho_value(g: u32, q: &BigUint, r: &BigUint) -> f64 {
    g as f64 * log2_big(q) / log2_big(r)
}

fn log2_big(n: &BigUint) -> f64 {
    match n.to_f64() {
        Some(f) if f.is_finite() => f.log2(),
        _ => {
            let shift = n.bits() - 52;
            (n >> shift).to_f64().unwrap().log2() + shift as f64
        }
    }
}

/// Degree over `F_p` of the smallest field containing the `r`-th roots of
/// unity, `ord_r(p)`.  The curve is over `F_{p^m}`; `m` only enters through
/// the divisibility `ord_r(p) | m k`.
pub fn minimal_embedding_field(p: u64, m: u32, r: u64) -> Result<u64> {
    let _ = m;
    multiplicative_order(p, r).ok_or_else(|| Error::NotCoprime(p.to_string(), r.to_string()))
}

/// `(extfield_bits / subgroup_bits) * (g / rho)`, the embedding degree that
/// balances the discrete-log problems in the subgroup and the extension
/// field.
pub fn recommended_k(subgroup_bits: f64, extfield_bits: f64, rho: f64, g: u32) -> f64 {
    (extfield_bits / subgroup_bits) * (g as f64 / rho)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub p_min: u64,
    pub p_max: u64,
    pub max_k: u64,
    pub min_r_bits: u32,
    /// Enumerate every monic quintic; otherwise draw `sample_size` at random.
    pub sample_all: bool,
    pub sample_size: usize,
    /// Keep one curve per orbit under `x -> ax + b` (with `a` a square).
    pub dedup: bool,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            p_min: 5,
            p_max: 13,
            max_k: 12,
            min_r_bits: 0,
            sample_all: true,
            sample_size: 1000,
            dedup: false,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_min < 5 {
            return Err(Error::UnsupportedCharacteristic(self.p_min.to_string()));
        }
        if self.max_k < 1 {
            return Err(Error::BadSpec("max_k must be at least 1".into()));
        }
        if self.p_max >= crate::field::MAX_CHARACTERISTIC {
            return Err(Error::UnsupportedCharacteristic(self.p_max.to_string()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub p: u64,
    /// `F` low-to-high, monic quintic.
    pub f: Vec<u64>,
    pub n1: u64,
    pub n2: u64,
    pub a1: i64,
    pub a2: i64,
    pub jac_order: u64,
    pub r: u64,
    pub k: u64,
    pub rho: f64,
    pub class: CurveClass,
    pub mef_degree: u64,
}

impl CurveRecord {
    pub fn curve(&self) -> Result<CurveParams> {
        let field = FieldDescriptor::prime(self.p)?;
        let f: Vec<i64> = self.f.iter().map(|&c| c as i64).collect();
        CurveParams::with_f(&field, 2, &f)
    }

    pub fn charpoly(&self) -> CharPoly {
        let q = BigInt::from(self.p);
        CharPoly {
            genus: 2,
            q: BigUint::from(self.p),
            coeffs: vec![
                &q * &q,
                -(&q * self.a1),
                BigInt::from(self.a2),
                BigInt::from(-self.a1),
                BigInt::from(1),
            ],
        }
    }
}

/// A curve dropped from the output, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipNotice {
    pub p: u64,
    pub f: Vec<u64>,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutput {
    pub records: Vec<CurveRecord>,
    pub skipped: Vec<SkipNotice>,
}

/// Point counts of `y^2 = F(x)` over `F_p` and `F_{p^2}` through
/// quadratic-character tables.
struct Counter {
    p: u64,
    chi: Vec<i8>,
    /// `F_{p^2} = F_p[t]/(t^2 - c)` with `c` a non-residue.
    c: u64,
}

impl Counter {
    fn new(p: u64) -> Self {
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for x in 1..p {
            chi[(x * x % p) as usize] = 1;
        }
        let c = (2..p).find(|&c| chi[c as usize] == -1).expect("p odd");
        Counter { p, chi, c }
    }

    fn counts(&self, f: &[u64]) -> (u64, u64) {
        let p = self.p;
        let mut s1: i64 = 0;
        for x in 0..p {
            let mut acc = 0u64;
            for &c in f.iter().rev() {
                acc = (acc * x + c) % p;
            }
            s1 += self.chi[acc as usize] as i64;
        }
        // Over F_{p^2}: Horner in (a + b t), t^2 = c; chi(z) = chi_p(N(z)).
        let mut s2: i64 = 0;
        for xa in 0..p {
            for xb in 0..p {
                let (mut a, mut b) = (0u64, 0u64);
                for &co in f.iter().rev() {
                    let na = (a * xa + b * xb % p * self.c + co) % p;
                    let nb = (a * xb + b * xa) % p;
                    a = na;
                    b = nb;
                }
                let norm = (a * a + p * p - b * b % p * self.c % p) % p;
                s2 += self.chi[norm as usize] as i64;
            }
        }
        let n1 = (p as i64 + 1 + s1) as u64;
        let n2 = (p as i64 * p as i64 + 1 + s2) as u64;
        (n1, n2)
    }
}

fn squarefree(f: &[u64], p: u64) -> bool {
    let df: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, &c)| c * i as u64 % p).collect();
    let mut df = df;
    while df.last() == Some(&0) {
        df.pop();
    }
    if df.is_empty() {
        return false;
    }
    crate::field::fp_poly::gcd(f, &df, p).len() == 1
}

/// `F(ax + b) / a^5`.
fn substitute(f: &[u64], a: u64, b: u64, p: u64) -> Vec<u64> {
    let n = f.len();
    let mut out = vec![0u64; n];
    // Horner: out = out * (a x + b) + c
    for &c in f.iter().rev() {
        let mut next = vec![0u64; n];
        for i in 0..n {
            if out[i] == 0 {
                continue;
            }
            next[i] = (next[i] + out[i] * b) % p;
            if i + 1 < n {
                next[i + 1] = (next[i + 1] + out[i] * a) % p;
            }
        }
        next[0] = (next[0] + c) % p;
        out = next;
    }
    let inv = pow_mod(pow_mod(a, 5, p), p - 2, p);
    out.iter().map(|&c| c * inv % p).collect()
}

fn is_canonical(f: &[u64], p: u64) -> bool {
    let squares: Vec<u64> = (1..p).filter(|&a| pow_mod(a, (p - 1) / 2, p) == 1).collect();
    let key = |g: &[u64]| g.iter().rev().copied().collect::<Vec<_>>();
    let mine = key(f);
    for &a in &squares {
        for b in 0..p {
            if (a, b) == (1, 0) {
                continue;
            }
            if key(&substitute(f, a, b, p)) < mine {
                return false;
            }
        }
    }
    true
}

fn decode(index: u64, p: u64) -> Vec<u64> {
    let mut f = Vec::with_capacity(6);
    let mut i = index;
    for _ in 0..5 {
        f.push(i % p);
        i /= p;
    }
    f.push(1);
    f
}

/// Examines one curve; `None` when it is filtered out silently.
fn examine(
    counter: &Counter,
    f: &[u64],
    cfg: &SearchConfig,
) -> Option<std::result::Result<CurveRecord, SkipNotice>> {
    let p = counter.p;
    if !squarefree(f, p) {
        return None;
    }
    if cfg.dedup && !is_canonical(f, p) {
        return None;
    }
    let (n1, n2) = counter.counts(f);
    let a1 = p as i64 + 1 - n1 as i64;
    let s2 = (p * p + 1) as i64 - n2 as i64;
    let a2 = (a1 * a1 - s2) / 2;
    let order = 1 - a1 + a2 - p as i64 * a1 + (p * p) as i64;
    let order = order as u64;
    let factors = match factor(order, FactorBudget::default()) {
        Ok(fs) => fs,
        Err(t) => {
            return Some(Err(SkipNotice {
                p,
                f: f.to_vec(),
                reason: format!("factoring budget exhausted on cofactor {}", t.unfactored),
            }))
        }
    };
    let r = factors
        .iter()
        .rev()
        .map(|&(q, _)| q)
        .find(|&q| 64 - q.leading_zeros() >= cfg.min_r_bits)?;
    if r == p {
        return None;
    }
    let k = multiplicative_order(p, r)?;
    if k > cfg.max_k {
        return None;
    }
    let cp = CharPoly {
        genus: 2,
        q: BigUint::from(p),
        coeffs: vec![
            BigInt::from(p * p),
            BigInt::from(-(p as i64) * a1),
            BigInt::from(a2),
            BigInt::from(-a1),
            BigInt::from(1),
        ],
    };
    Some(Ok(CurveRecord {
        p,
        f: f.to_vec(),
        n1,
        n2,
        a1,
        a2,
        jac_order: order,
        r,
        k,
        rho: rho_value(2, &BigUint::from(p), &BigUint::from(r)),
        class: classify(&cp, p),
        mef_degree: k,
    }))
}

/// Runs the search.  Output order is canonical (by `p`, then by `F` in
/// base-`p` counting order) regardless of the worker count.
pub fn search(cfg: &SearchConfig) -> Result<SearchOutput> {
    cfg.validate()?;
    let mut out = SearchOutput::default();
    for p in cfg.p_min..=cfg.p_max {
        if !is_prime(p) {
            continue;
        }
        let counter = Counter::new(p);
        let total = p.pow(5);
        let indices: Vec<u64> = if cfg.sample_all {
            (0..total).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ p);
            let mut v: Vec<u64> = (0..cfg.sample_size).map(|_| rng.gen_range(0..total)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let results: Vec<_> = indices
            .par_iter()
            .filter_map(|&i| examine(&counter, &decode(i, p), cfg))
            .collect();
        for r in results {
            match r {
                Ok(rec) => out.records.push(rec),
                Err(skip) => out.skipped.push(skip),
            }
        }
    }
    Ok(out)
}

/// Whether the characteristic polynomial `x^4 - a1 x^3 + a2 x^2 - q a1 x + q^2`
/// is irreducible over `Q` or the square `(x^2 - q)^2`; used to separate
/// simple Jacobians from products of elliptic curves in reports.
pub fn charpoly_is_simple(a1: i64, a2: i64, q: i64) -> bool {
    // Rational factorizations of a Weil polynomial into quadratics
    // x^2 - b x + q and x^2 - c x + q: b + c = a1, bc + 2q = a2.
    let disc = a1 * a1 - 4 * (a2 - 2 * q);
    if a1 == 0 && a2 == -2 * q {
        return true; // (x^2 - q)^2 with q not a square
    }
    if disc < 0 {
        return true;
    }
    let s = (disc as f64).sqrt().round() as i64;
    if s * s != disc {
        return true;
    }
    false
}

/// `true` when the prime-field polynomial is irreducible; exposed for the
/// search tests.
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    is_irreducible_fp(f, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{count_points, frobenius_charpoly, jacobian_order};

    #[test]
    fn embedding_degree_examples() {
        assert_eq!(embedding_degree(&BigUint::from(2u32), 7).unwrap(), 3);
        assert_eq!(embedding_degree(&BigUint::from(11u32), 5).unwrap(), 1);
        assert!(matches!(embedding_degree(&BigUint::from(14u32), 7), Err(Error::NotCoprime(_, _))));
        for q in 2u64..40 {
            for r in [3u64, 5, 7, 11, 13, 101] {
                if q % r == 0 {
                    continue;
                }
                let k = embedding_degree(&BigUint::from(q), r).unwrap();
                assert_eq!((r - 1) % k, 0);
                assert_eq!(pow_mod(q, k, r), 1);
                assert!((1..k).all(|i| pow_mod(q, i, r) != 1));
            }
        }
    }

    #[test]
    fn rho_examples() {
        let q = BigUint::from(1009u32);
        assert!((rho_value(2, &q, &(&q * &q)) - 1.0).abs() < 1e-12);
        let r = BigUint::from(2u32).pow(20);
        let q80 = BigUint::from(2u32).pow(80);
        assert!((rho_value(2, &q80, &r) - 8.0).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for r in [3u32, 7, 31, 127, 1021] {
            let v = rho_value(2, &q, &BigUint::from(r));
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn minimal_embedding_field_drop() {
        // q = p^m with m = 2: k = ord_r(p^2) while the field is F_{p^{ord_r p}}.
        let mut found = false;
        for p in [5u64, 7, 11, 13] {
            for r in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                if p == r {
                    continue;
                }
                let mef = minimal_embedding_field(p, 2, r).unwrap();
                let k = embedding_degree(&BigUint::from(p * p), r).unwrap();
                assert_eq!((2 * k) % mef, 0);
                if mef < 2 * k {
                    found = true;
                }
            }
        }
        assert!(found);
        assert_eq!(minimal_embedding_field(7, 1, 43).unwrap(), embedding_degree(&BigUint::from(7u32), 43).unwrap());
    }

    #[test]
    fn recommended_k_examples() {
        assert!((recommended_k(160.0, 1024.0, 1.0, 2) - 12.8).abs() < 1e-12);
        assert!((recommended_k(256.0, 3072.0, 2.0, 2) - 12.0).abs() < 1e-12);
        assert!((recommended_k(256.0, 3072.0, 2.0, 2) - 3072.0 / 256.0).abs() < 1e-12);
    }

    #[test]
    fn fast_counts_match_library_counts() {
        let p = 7;
        let counter = Counter::new(p);
        let field = FieldDescriptor::prime(p).unwrap();
        for idx in (0..p.pow(5)).step_by(97) {
            let f = decode(idx, p);
            if !squarefree(&f, p) {
                continue;
            }
            let fi: Vec<i64> = f.iter().map(|&c| c as i64).collect();
            let c = CurveParams::with_f(&field, 2, &fi).unwrap();
            let (n1, n2) = counter.counts(&f);
            assert_eq!(n1, count_points(&c, 1).unwrap());
            assert_eq!(n2, count_points(&c, 2).unwrap());
            let cp = frobenius_charpoly(&c).unwrap();
            let order = jacobian_order(&cp, 1);
            assert_eq!(order, BigUint::from((n1 * n1 + n2) / 2 - p));
        }
    }

    #[test]
    fn records_satisfy_postconditions() {
        let cfg = SearchConfig { p_min: 7, p_max: 7, max_k: 12, ..Default::default() };
        let out = search(&cfg).unwrap();
        assert!(!out.records.is_empty());
        for rec in &out.records {
            assert_eq!(rec.jac_order % rec.r, 0);
            assert_eq!(pow_mod(rec.p, rec.k, rec.r), 1);
            assert_eq!(rec.k % rec.mef_degree, 0);
        }
        let again = search(&cfg).unwrap();
        assert_eq!(out.records, again.records);
    }

    #[test]
    fn dedup_keeps_one_per_orbit() {
        let p = 7;
        let f = vec![1, 2, 0, 3, 0, 1];
        let g = substitute(&f, 4, 3, p);
        assert_eq!(g[5], 1);
        let counter = Counter::new(p);
        assert_eq!(counter.counts(&f), counter.counts(&g));
        assert!(
            [is_canonical(&f, p), is_canonical(&g, p)].iter().filter(|&&b| b).count() <= 1
        );
    }

    #[test]
    fn simple_charpoly_detection() {
        // (x^2 + 5)^2 over F_5 style product: a1 = 0, a2 = 2q
        assert!(!charpoly_is_simple(0, 10, 5));
        assert!(charpoly_is_simple(0, 0, 5));
        assert!(charpoly_is_simple(0, -10, 5));
        assert!(charpoly_is_simple(1, 3, 7));
    }
}
