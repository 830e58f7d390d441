//! Small integer helpers shared by the field and sieve code.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// `base^exp`, panicking on overflow. Only used where sizes were already validated.
pub fn pow_u64(base: u64, exp: u64) -> u64 {
    checked_pow(base, exp).expect("integer power overflow")
}

pub fn pow_i128(base: i128, exp: u32) -> i128 {
    base.checked_pow(exp).expect("integer power overflow")
}

/// Möbius function, used by the prime-count formula for monic irreducibles.
pub fn mobius(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1i64;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// Exact number of monic irreducibles of degree `d` over a field of size `q`.
pub fn irreducible_count(q: u64, d: u64) -> u64 {
    let mut total: i128 = 0;
    for k in 1..=d {
        if d.is_multiple_of(k) {
            total += mobius(d / k) as i128 * pow_u64(q, k) as i128;
        }
    }
    (total / d as i128) as u64
}

/// Integer `e` with `q = p^e`, if `q` is a power of the prime `p`.
pub fn log_exact(q: u64, p: u64) -> Option<u32> {
    let mut e = 0;
    let mut v = 1u64;
    while v < q {
        v = v.checked_mul(p)?;
        e += 1;
    }
    (v == q).then_some(e)
}

/// Splits a prime power into `(p, e)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = *prime_factors(q).first()?;
    log_exact(q, p).map(|e| (p, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_values() {
        assert_eq!(irreducible_count(3, 1), 3);
        assert_eq!(irreducible_count(3, 2), 3);
        assert_eq!(irreducible_count(3, 8), 810);
        assert_eq!(irreducible_count(2, 4), 3);
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
    }
}
