//! Rational-integer helpers: primality, factorization, quadratic residues.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        sieve
            .iter()
            .enumerate()
            .filter_map(|(k, &p)| p.then_some(k as u32))
            .collect()
    })
}

/// Primes in ascending order up to `limit` (inclusive, at most 10^6).
pub fn primes_up_to(limit: u64) -> impl Iterator<Item = u64> {
    small_primes()
        .iter()
        .map(|&p| p as u64)
        .take_while(move |&p| p <= limit)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

const MR_BASES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES[..12] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // The first twelve prime bases are deterministic for n < 3.3 * 10^24.
    'outer: for &a in &MR_BASES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first twenty prime bases; deterministic below 3.3e24.
pub fn is_prime(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let mut d = n_minus_1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'outer: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt, seed: u64) -> Option<BigInt> {
    let one = BigInt::one();
    let c = BigInt::from(seed);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(2 + seed);
    let m = 128;
    let mut g = one.clone();
    let mut r = 1u64;
    let mut q = one.clone();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if g > one {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

fn split_composite(n: BigInt, out: &mut Vec<BigInt>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(&n) {
        out.push(n);
        return Ok(());
    }
    if n.bits() > 128 {
        return Err(Error::FactorizationTooLarge(n));
    }
    let root = n.sqrt();
    if &root * &root == n {
        split_composite(root.clone(), out)?;
        return split_composite(root, out);
    }
    for seed in 1..64u64 {
        if let Some(d) = pollard_brent(&n, seed) {
            let other = &n / &d;
            split_composite(d, out)?;
            return split_composite(other, out);
        }
    }
    Err(Error::FactorizationTooLarge(n))
}

/// Prime factorization of |n| (n != 0) as ascending `(prime, exponent)` pairs.
///
/// Trial division up to 10^6, then Pollard-rho (Brent) on the cofactor. A
/// composite cofactor above 2^128 is reported as an error instead of looping.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut rest = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if let Some(mut small) = rest.to_u64() {
        for &p in small_primes() {
            let p = p as u64;
            if p * p > small {
                break;
            }
            let mut e = 0;
            while small % p == 0 {
                small /= p;
                e += 1;
            }
            if e > 0 {
                out.push((BigInt::from(p), e));
            }
        }
        if small > 1 {
            if small <= (TRIAL_LIMIT as u64) * (TRIAL_LIMIT as u64) || is_prime_u64(small) {
                out.push((BigInt::from(small), 1));
                return Ok(out);
            }
            rest = BigInt::from(small);
        } else {
            return Ok(out);
        }
    } else {
        for &p in small_primes() {
            let pb = BigInt::from(p);
            if &pb * &pb > rest {
                break;
            }
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.push((pb, e));
            }
        }
        if rest.is_one() {
            return Ok(out);
        }
    }
    let mut primes = Vec::new();
    split_composite(rest, &mut primes)?;
    primes.sort();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort();
    Ok(out)
}

/// Kronecker symbol (D | p) for a prime p.
pub fn kronecker(disc: &BigInt, p: &BigInt) -> i32 {
    let two = BigInt::from(2);
    if *p == two {
        if disc.is_even() {
            return 0;
        }
        let r = disc.mod_floor(&BigInt::from(8)).to_u32().unwrap();
        return if r == 1 || r == 7 { 1 } else { -1 };
    }
    let a = disc.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1u32) / 2u32;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli-Shanks), if one exists.
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(a);
    }
    if *p == BigInt::from(2) {
        return Some(a);
    }
    let one = BigInt::one();
    let pm1 = p - &one;
    if a.modpow(&(&pm1 / 2u32), p) != one {
        return None;
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while z.modpow(&(&pm1 / 2u32), p) == one {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) / 2u32), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b) % p;
        }
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    Some(r)
}

pub fn is_squarefree(n: i64) -> bool {
    if n == 0 {
        return false;
    }
    match factor(&BigInt::from(n)) {
        Ok(f) => f.iter().all(|(_, e)| *e == 1),
        Err(_) => false,
    }
}

/// Floor of the real square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// Smallest integer whose square is at least `n` (n >= 0).
pub fn ceil_sqrt(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &r * &r == *n {
        r
    } else {
        r + 1
    }
}

/// Exact square root if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn shift_right_rounds_toward_negative_infinity() {
        assert_eq!(big(-5) >> 1, big(-3));
        assert_eq!(big(5) >> 1, big(2));
    }

    #[test]
    fn primality_small_and_large() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime(&big(n as i64))).collect();
        assert_eq!(primes.len(), 25);
        assert!(is_prime(&BigInt::from(1_000_000_007u64)));
        assert!(!is_prime(&BigInt::from(3_215_031_751u64)));
        let m127: BigInt = (BigInt::one() << 127) - 1;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m127 * 3)));
    }

    #[test]
    fn factor_recomposes() {
        for n in [1i64, 2, 12, 360, 1001, 9216, 999_983, -84] {
            let f = factor(&big(n)).unwrap();
            let prod = f
                .iter()
                .fold(BigInt::one(), |acc, (p, e)| acc * p.pow(*e));
            assert_eq!(prod, big(n).abs());
        }
        // two primes above the trial-division limit
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(1_000_033u64);
        let r = BigInt::from(998_244_353u64);
        let f = factor(&(&p * &q * &r)).unwrap();
        assert_eq!(f, vec![(p, 1), (q, 1), (r, 1)]);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        // -4 | 5 = 1, -4 | 3 = -1, 8 | 3 = -1, 5 | 2 = -1, -3 | 2 = -1, 13 | 3 = 1
        assert_eq!(kronecker(&big(-4), &big(5)), 1);
        assert_eq!(kronecker(&big(-4), &big(3)), -1);
        assert_eq!(kronecker(&big(8), &big(3)), -1);
        assert_eq!(kronecker(&big(5), &big(2)), -1);
        assert_eq!(kronecker(&big(-7), &big(2)), 1);
        assert_eq!(kronecker(&big(13), &big(3)), 1);
        assert_eq!(kronecker(&big(-20), &big(2)), 0);
    }

    #[test]
    fn tonelli_shanks_roots() {
        for p in [3i64, 5, 7, 13, 17, 41, 97, 193] {
            for a in 0..p {
                let r = sqrt_mod_prime(&big(a), &big(p));
                let is_res = (0..p).any(|x| (x * x) % p == a);
                assert_eq!(r.is_some(), is_res, "a={a} p={p}");
                if let Some(r) = r {
                    assert_eq!((&r * &r).mod_floor(&big(p)), big(a));
                }
            }
        }
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(-163));
        assert!(is_squarefree(30));
        assert!(!is_squarefree(12));
        assert!(!is_squarefree(-4));
    }
}
