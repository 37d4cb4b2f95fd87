//! Elementary arithmetic functions: primes, divisor counts, polynomial root counts.

use serde::Serialize;

use crate::error::{Error, Result};

/// All primes `≤ bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation `n = ∏ pᵉ` by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Number of divisors `τ(n)`.
pub fn divisor_count(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("τ(0) is undefined".into()));
    }
    Ok(factorize(n).iter().map(|&(_, e)| e as u64 + 1).product())
}

/// `ρ_P(e) = #{a mod e : P(a) ≡ 0 (mod e)}` for ascending integer coefficients.
pub fn root_count(coefficients: &[i64], e: u64) -> Result<u64> {
    if e == 0 {
        return Err(Error::InvalidInput("modulus must be at least 1".into()));
    }
    let m = e as i128;
    let reduced: Vec<i128> = coefficients.iter().map(|&c| (c as i128).rem_euclid(m)).collect();
    let mut count = 0;
    for a in 0..e {
        let a = a as i128;
        let v = reduced.iter().rev().fold(0i128, |acc, &c| (acc * a + c) % m);
        if v == 0 {
            count += 1;
        }
    }
    Ok(count)
}

/// Descriptive prime statistics for `⌊n^c⌋`, `n ≤ N`.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeStats {
    pub terms: u64,
    pub primes: u64,
    /// Heuristic count `Σ_{n≤N} 1/(c·ln n)` for comparison only.
    pub heuristic: f64,
}

/// Counts primes among the first `count` terms (all must fit in 64 bits).
pub fn prime_stats(terms: &[u64], exponent: f64) -> PrimeStats {
    let primes = terms.iter().filter(|&&q| is_prime(q)).count() as u64;
    let heuristic = (2..=terms.len())
        .map(|n| 1.0 / (exponent * (n as f64).ln()))
        .sum();
    PrimeStats {
        terms: terms.len() as u64,
        primes,
        heuristic,
    }
}
