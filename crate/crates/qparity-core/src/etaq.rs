//! The named series: Euler products, eta-power quotients
//! prod_{i>=1}(1-q^{di})^e reduced mod 2, and multipartition parity series.
//!
//! Everything here is pure and safe to call from concurrent workers. Two
//! independent routes exist to the partition parity series (the pentagonal
//! recurrence, and Newton inversion of the Euler product) and they must agree
//! bit-exactly; tests and the acceptance suite lean on that cross-check.

use crate::gf2series::Gf2Series;

/// One factor prod_{i>=1}(1-q^{di})^e mod 2. Negative `e` means the
/// reciprocal of the |e|-th power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaPowerSpec {
    pub d: u64,
    pub e: i64,
}

/// Generalized pentagonal numbers k(3k-1)/2 for k = 1, -1, 2, -2, ...
/// ascending, up to `limit`. Zero (k = 0) is not included.
pub fn generalized_pentagonals(limit: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 1usize;
    loop {
        let g = k * (3 * k - 1) / 2;
        if g > limit {
            break;
        }
        out.push(g);
        let g = k * (3 * k + 1) / 2;
        if g <= limit {
            out.push(g);
        }
        k += 1;
    }
    out
}

/// The Euler product prod_{i>=1}(1-q^i) mod 2 to degree `n`: supported
/// exactly on the generalized pentagonal numbers.
pub fn euler_series(n: usize) -> Gf2Series {
    Gf2Series::from_exponents(std::iter::once(0).chain(generalized_pentagonals(n)), n)
}

/// prod_{i>=1}(1-q^{di})^e mod 2 to degree `n`.
///
/// For e >= 0 the power is assembled from the binary expansion of e: in
/// characteristic 2, f(q)^(2^j) = f(q^(2^j)), so each set bit j contributes
/// the Euler product dilated by d*2^j. For e < 0 the |e|-th power is built
/// the same way and inverted once.
pub fn eta_power(spec: EtaPowerSpec, n: usize) -> Gf2Series {
    assert!(spec.d >= 1, "dilation factor must be positive");
    if spec.e == 0 {
        return Gf2Series::one(n);
    }
    let magnitude = spec.e.unsigned_abs();
    let euler = euler_series(n);
    let mut acc: Option<Gf2Series> = None;
    for j in 0..64 {
        if magnitude >> j & 1 == 0 {
            continue;
        }
        let scale = match (spec.d as usize).checked_shl(j) {
            Some(s) if s <= n => s,
            // the factor is 1 + O(q^{n+1}); it contributes nothing
            _ => continue,
        };
        let factor = euler.dilate_to(scale, n);
        acc = Some(match acc {
            None => factor,
            Some(r) => r.mul(&factor),
        });
    }
    let power = acc.unwrap_or_else(|| Gf2Series::one(n));
    if spec.e > 0 {
        power
    } else {
        power.invert().expect("eta power has constant term 1")
    }
}

/// Parity of the t-multipartition function p_t(n), the coefficients of
/// 1/prod(1-q^i)^t, for n up to the truncation degree.
///
/// The default route never inverts a series: the odd part of t is assembled
/// as a product of dilated copies of the t = 1 parity series (binary
/// expansion of t), and a trailing power of two becomes one dilation. The
/// inversion route is [`multipartition_series_by_inversion`]; the two must
/// agree bit-exactly.
pub fn multipartition_series(t: u64, n: usize) -> Gf2Series {
    assert!(t >= 1, "t must be positive");
    let two_exp = t.trailing_zeros();
    let odd = t >> two_exp;
    let base = if odd == 1 {
        partition_parity_recurrence(n)
    } else {
        let p1 = partition_parity_recurrence(n);
        let mut acc: Option<Gf2Series> = None;
        for j in 0..64 {
            if odd >> j & 1 == 0 {
                continue;
            }
            let scale = match 1usize.checked_shl(j) {
                Some(s) if s <= n => s,
                _ => continue,
            };
            let factor = p1.dilate_to(scale, n);
            acc = Some(match acc {
                None => factor,
                Some(r) => r.mul(&factor),
            });
        }
        acc.unwrap_or_else(|| Gf2Series::one(n))
    };
    if two_exp == 0 {
        base
    } else {
        match 1usize.checked_shl(two_exp) {
            Some(s) if s <= n => base.dilate_to(s, n),
            // only p_t(0) = 1 survives below the first multiple of 2^c
            _ => Gf2Series::one(n),
        }
    }
}

/// Cross-check route for [`multipartition_series`]: Newton inversion of the
/// t-th Euler power.
pub fn multipartition_series_by_inversion(t: u64, n: usize) -> Gf2Series {
    assert!(t >= 1, "t must be positive");
    assert!(t <= i64::MAX as u64);
    eta_power(
        EtaPowerSpec {
            d: 1,
            e: -(t as i64),
        },
        n,
    )
}

/// Parity of p(n) by Euler's pentagonal recurrence,
/// p(n) = XOR of p(n - g) over generalized pentagonal g <= n,
/// with no series inversion anywhere.
///
/// The recurrence is run a 64-degree block at a time: contributions from
/// finished blocks are gathered with word-window reads, then the
/// intra-block dependencies (pentagonal offsets below 64) are resolved bit
/// by bit. This keeps the O(n^1.5) bit work almost entirely word-parallel.
pub fn partition_parity_recurrence(n: usize) -> Gf2Series {
    let nwords = n / 64 + 1;
    let mut words = vec![0u64; nwords];
    let pents = generalized_pentagonals(n);
    let small: Vec<usize> = pents.iter().copied().take_while(|&g| g < 64).collect();
    for b in 0..nwords {
        let base = (b * 64) as isize;
        let mut w: u64 = 0;
        // contributions whose source lies in already-finished blocks;
        // windows overlapping the current block read zeros there
        for &g in &pents {
            if g as isize > base + 63 {
                break;
            }
            w ^= read_window(&words, base - g as isize);
        }
        let start = if b == 0 {
            w |= 1; // p(0) = 1 seeds the recurrence
            1
        } else {
            0
        };
        for i in start..64 {
            let mut bit = (w >> i) & 1;
            for &g in &small {
                if g > i {
                    break;
                }
                bit ^= (w >> (i - g)) & 1;
            }
            w = (w & !(1u64 << i)) | (bit << i);
        }
        words[b] = w;
    }
    Gf2Series::from_words(words, n)
}

/// The 64-bit window of `words` starting at signed bit offset `o`; bits
/// before position 0 or past the end of `words` read as zero.
#[inline]
fn read_window(words: &[u64], o: isize) -> u64 {
    if o >= 0 {
        let j = (o / 64) as usize;
        let s = (o % 64) as usize;
        let lo = words.get(j).copied().unwrap_or(0) >> s;
        if s == 0 {
            lo
        } else {
            lo | (words.get(j + 1).copied().unwrap_or(0) << (64 - s))
        }
    } else if o > -64 {
        words[0] << (-o) as usize
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Coin-style DP mod 2, one pass per part size per color; fully
    /// independent of both the pentagonal machinery and series inversion.
    fn multipartition_parity_oracle(t: u64, n: usize) -> Vec<bool> {
        let mut dp = vec![false; n + 1];
        dp[0] = true;
        for _color in 0..t {
            for part in 1..=n {
                for total in part..=n {
                    if dp[total - part] {
                        dp[total] ^= true;
                    }
                }
            }
        }
        dp
    }

    fn bits_prefix(s: &Gf2Series, count: usize) -> Vec<bool> {
        (0..count).map(|i| s.coeff(i).unwrap()).collect()
    }

    #[test]
    fn pentagonal_numbers_ascend() {
        assert_eq!(
            generalized_pentagonals(26),
            vec![1, 2, 5, 7, 12, 15, 22, 26]
        );
        assert_eq!(generalized_pentagonals(0), Vec::<usize>::new());
    }

    #[test]
    fn euler_series_exponents_to_15() {
        assert_eq!(euler_series(15).exponents(), vec![0, 1, 2, 5, 7, 12, 15]);
        assert_eq!(euler_series(0), Gf2Series::one(0));
    }

    #[test]
    fn euler_series_matches_product_expansion() {
        // direct expansion of prod (1 - q^i): f <- f + q^i f, i = 1..=40
        let mut f = Gf2Series::one(40);
        for i in 1..=40 {
            f = f.xor_add(&f.shift(i));
        }
        assert_eq!(euler_series(40), f);
    }

    #[test]
    fn euler_plus_one_truncated_at_7() {
        let sum = euler_series(7).xor_add(&Gf2Series::one(7));
        assert_eq!(sum.exponents(), vec![1, 2, 5, 7]);
    }

    #[test]
    fn recurrence_matches_known_parities() {
        let p = partition_parity_recurrence(19);
        let expect = [1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 1, 1, 1, 0];
        let got: Vec<u8> = bits_prefix(&p, 20).iter().map(|&b| b as u8).collect();
        assert_eq!(got, expect);
        assert_eq!(partition_parity_recurrence(0), Gf2Series::one(0));
    }

    #[test]
    fn recurrence_matches_dp_oracle() {
        let n = 2000;
        let p = partition_parity_recurrence(n);
        let oracle = multipartition_parity_oracle(1, n);
        for (i, &expect) in oracle.iter().enumerate() {
            assert_eq!(p.coeff(i).unwrap(), expect, "p({i}) parity");
        }
    }

    #[test]
    fn recurrence_matches_inversion() {
        let n = 5000;
        let by_rec = partition_parity_recurrence(n);
        let by_inv = euler_series(n).invert().unwrap();
        assert_eq!(by_rec, by_inv);
    }

    #[test]
    fn eta_power_reciprocal_is_partition_parity() {
        let s = eta_power(EtaPowerSpec { d: 1, e: -1 }, 9);
        let expect = [
            true, true, false, true, true, true, true, true, false, false,
        ];
        assert_eq!(bits_prefix(&s, 10), expect);
    }

    #[test]
    fn eta_power_zero_exponent_is_one() {
        assert_eq!(
            eta_power(EtaPowerSpec { d: 3, e: 0 }, 50),
            Gf2Series::one(50)
        );
    }

    #[test]
    fn eta_power_square_is_dilated_euler() {
        let sq = eta_power(EtaPowerSpec { d: 1, e: 2 }, 100);
        assert_eq!(sq, euler_series(100).dilate(2));
    }

    #[test]
    fn eta_power_inverse_pairs_cancel() {
        for d in [1u64, 3, 5, 7, 25] {
            for e in -30i64..=30 {
                let n = 512;
                let f = eta_power(EtaPowerSpec { d, e }, n);
                let g = eta_power(EtaPowerSpec { d, e: -e }, n);
                assert_eq!(f.mul(&g), Gf2Series::one(n), "d={d} e={e}");
            }
        }
    }

    #[test]
    fn multipartition_small_t_match_oracle() {
        for t in 1..=6u64 {
            let n = 300;
            let s = multipartition_series(t, n);
            let oracle = multipartition_parity_oracle(t, n);
            for (i, &expect) in oracle.iter().enumerate() {
                assert_eq!(s.coeff(i).unwrap(), expect, "t={t} n={i}");
            }
        }
    }

    #[test]
    fn multipartition_t3_first_five() {
        // p_3 counts 1, 3, 9, 22, 51
        let s = multipartition_series(3, 4);
        let got: Vec<u8> = bits_prefix(&s, 5).iter().map(|&b| b as u8).collect();
        assert_eq!(got, [1, 1, 1, 0, 1]);
    }

    #[test]
    fn multipartition_even_t_lives_on_even_degrees() {
        let n = 400;
        let s2 = multipartition_series(2, n);
        let s1 = multipartition_series(1, n / 2);
        for i in 0..=n {
            if i % 2 == 1 {
                assert!(!s2.coeff(i).unwrap(), "odd degree {i} must vanish for t=2");
            } else {
                assert_eq!(s2.coeff(i).unwrap(), s1.coeff(i / 2).unwrap());
            }
        }
    }

    #[test]
    fn multipartition_paths_agree() {
        for t in [1u64, 3, 5, 9, 15, 21, 99] {
            let n = 2000;
            assert_eq!(
                multipartition_series(t, n),
                multipartition_series_by_inversion(t, n),
                "t={t}"
            );
        }
    }

    #[test]
    #[should_panic(expected = "t must be positive")]
    fn multipartition_rejects_t_zero() {
        multipartition_series(0, 10);
    }
}
