//! Machine-word number theory: modular arithmetic, primality, factoring and
//! multiplicative orders.  Everything that the pairing layers need in
//! arbitrary precision lives on `num_bigint` types; this module is the fast
//! path for the desk-scale quantities (`p`, `r`, `#Jac(F_p)`).

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &sp in &SMALL {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_big(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(v) => is_prime(v),
        None => {
            // Probabilistic Miller-Rabin with fixed bases; only used for
            // sanity checks on large cofactors, never on the desk-scale path.
            let one = BigUint::one();
            let two = &one + &one;
            let n_minus_1 = n - &one;
            let mut d = n_minus_1.clone();
            let mut s = 0u32;
            while (&d % &two).is_zero() {
                d /= &two;
                s += 1;
            }
            'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
                let mut x = BigUint::from(a).modpow(&d, n);
                if x == one || x == n_minus_1 {
                    continue;
                }
                for _ in 1..s {
                    x = (&x * &x) % n;
                    if x == n_minus_1 {
                        continue 'witness;
                    }
                }
                return false;
            }
            true
        }
    }
}

/// Work limits for [`factor`].
#[derive(Clone, Copy, Debug)]
pub struct FactorBudget {
    pub trial_divisions: u64,
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_divisions: 1_000_000,
            rho_iterations: 10_000,
        }
    }
}

/// Returned when a composite cofactor survives the factoring budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTimeout {
    pub unfactored: u64,
}

/// Factors `n` as `[(prime, exponent)]` sorted by prime, using trial
/// division followed by Pollard's rho (Brent variant).
pub fn factor(n: u64, budget: FactorBudget) -> Result<Vec<(u64, u32)>, FactorTimeout> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return Ok(out);
    }
    let mut m = n;
    let mut divisions = 0u64;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m && divisions < budget.trial_divisions {
        if m.is_multiple_of(d) {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
        divisions += 1;
    }
    if m > 1 {
        let mut stack = vec![m];
        while let Some(c) = stack.pop() {
            if c == 1 {
                continue;
            }
            if is_prime(c) || d.saturating_mul(d) > c {
                push_factor(&mut out, c);
                continue;
            }
            match pollard_rho(c, budget.rho_iterations) {
                Some(f) => {
                    stack.push(f);
                    stack.push(c / f);
                }
                None => return Err(FactorTimeout { unfactored: c }),
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64) {
    if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += 1;
    } else {
        out.push((p, 1));
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pollard_rho(n: u64, max_iter: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let mut iterations = 0u64;
    for c in 1..n {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = 32.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += steps;
                iterations += steps;
                if iterations > max_iter {
                    return None;
                }
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

/// Multiplicative order of `a` modulo the prime `r`.  Returns `None` when
/// `r` divides `a`.
pub fn multiplicative_order(a: u64, r: u64) -> Option<u64> {
    let a = a % r;
    if a == 0 {
        return None;
    }
    if r == 2 {
        return Some(1);
    }
    let group = r - 1;
    let factors = factor(group, FactorBudget::default()).ok()?;
    let mut order = group;
    for (prime, _) in factors {
        while order.is_multiple_of(prime) && pow_mod(a, order / prime, r) == 1 {
            order /= prime;
        }
    }
    Some(order)
}

/// Multiplicative order of `a` modulo a prime `r`, with `a` arbitrary size.
pub fn multiplicative_order_big(a: &BigUint, r: u64) -> Option<u64> {
    let reduced = (a % BigUint::from(r)).to_u64().unwrap_or(0);
    multiplicative_order(reduced, r)
}

pub fn bit_length(n: &BigUint) -> u64 {
    n.bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(!is_prime(9));
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn factor_roundtrip() {
        for n in [1u64, 2, 12, 97, 1001, 65536, 999_983 * 1_000_003, 600_851_475_143] {
            let f = factor(n, FactorBudget { trial_divisions: 50, rho_iterations: 1_000_000 }).unwrap();
            let prod: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn factor_budget_exhausts() {
        let n = 999_983u64 * 1_000_003;
        let r = factor(n, FactorBudget { trial_divisions: 10, rho_iterations: 2 });
        assert!(r.is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(7, 43), Some(6));
        assert_eq!(multiplicative_order(43, 43), None);
        for r in [5u64, 13, 101, 257] {
            for a in 1..r {
                let k = multiplicative_order(a, r).unwrap();
                let mut brute = 1;
                while pow_mod(a, brute, r) != 1 {
                    brute += 1;
                }
                assert_eq!(k, brute);
            }
        }
    }

    #[test]
    fn inverse() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(6, 9), None);
    }
}
