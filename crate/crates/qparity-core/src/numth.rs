//! Small integer helpers: extended Euclid, divisor and prime-factor
//! enumeration by trial division. Inputs here are identity parameters, never
//! large, so nothing clever is needed.

/// Inverse of `x` modulo `m`, if gcd(x, m) = 1. `m = 1` gives 0.
pub(crate) fn mod_inverse(x: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (x % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Prime factorization as (prime, multiplicity) pairs, ascending.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut mult = 0;
            while n.is_multiple_of(p) {
                n /= p;
                mult += 1;
            }
            out.push((p, mult));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of `n`, ascending.
pub(crate) fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, mult) in factorize(n) {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..mult {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

pub(crate) fn largest_prime_factor(n: u64) -> Option<u64> {
    factorize(n).last().map(|&(p, _)| p)
}

pub(crate) fn smallest_prime_factor(n: u64) -> Option<u64> {
    factorize(n).first().map(|&(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_inverse_small_cases() {
        assert_eq!(mod_inverse(24, 5), Some(4));
        assert_eq!(mod_inverse(24, 7), Some(5));
        assert_eq!(mod_inverse(24, 25), Some(24));
        assert_eq!(mod_inverse(8, 3), Some(2));
        assert_eq!(mod_inverse(3, 9), None);
        assert_eq!(mod_inverse(7, 1), Some(0));
    }

    #[test]
    fn divisors_and_factors() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(25), vec![1, 5, 25]);
        assert_eq!(divisors(35), vec![1, 5, 7, 35]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(largest_prime_factor(35), Some(7));
        assert_eq!(largest_prime_factor(1), None);
        assert_eq!(smallest_prime_factor(35), Some(5));
    }
}
