//! Dense truncated formal power series over GF(2).
//!
//! A [`Gf2Series`] holds the coefficients of f(q) = sum c_n q^n (mod 2) for
//! 0 <= n <= trunc_degree, bit-packed into u64 words, degree ascending within
//! each word.
//!
//! Invariants:
//! - `words.len() == trunc_degree / 64 + 1`, exactly.
//! - All bits above `trunc_degree` in the final word are zero.
//! - Operations never report coefficients beyond `trunc_degree`; mixing
//!   truncation degrees takes the minimum, never zero-extends.
//! - All operations are pure: inputs are borrowed, results are new values.

mod mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mul::DEFAULT_MUL_FAST_PATH_THRESHOLD;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2SeriesError {
    /// `invert` requires a unit: the constant term must be 1.
    #[error("constant term is zero; series has no reciprocal")]
    ConstantTermZero,
    /// Requested a coefficient the series does not carry.
    #[error("degree {degree} exceeds truncation degree {trunc_degree}")]
    DegreeOutOfRange { degree: usize, trunc_degree: usize },
    /// A serialized form failed validation.
    #[error("invalid series encoding: {0}")]
    InvalidEncoding(String),
}

/// Truncated power series over GF(2), bit-packed dense.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Series {
    words: Vec<u64>,
    trunc_degree: usize,
}

fn word_count(trunc_degree: usize) -> usize {
    trunc_degree / 64 + 1
}

impl Gf2Series {
    /// The zero series 0 + O(q^{N+1}).
    pub fn zero(trunc_degree: usize) -> Self {
        Gf2Series {
            words: vec![0; word_count(trunc_degree)],
            trunc_degree,
        }
    }

    /// The constant series 1 + O(q^{N+1}).
    pub fn one(trunc_degree: usize) -> Self {
        let mut s = Self::zero(trunc_degree);
        s.words[0] = 1;
        s
    }

    /// The monomial q^degree; zero if `degree` exceeds the truncation.
    pub fn monomial(degree: usize, trunc_degree: usize) -> Self {
        Self::from_exponents(std::iter::once(degree), trunc_degree)
    }

    /// Build from the set of exponents with coefficient 1. Exponents beyond
    /// `trunc_degree` are dropped (they are past the truncation window).
    pub fn from_exponents<I: IntoIterator<Item = usize>>(exps: I, trunc_degree: usize) -> Self {
        let mut s = Self::zero(trunc_degree);
        for e in exps {
            if e <= trunc_degree {
                s.words[e >> 6] |= 1u64 << (e & 63);
            }
        }
        s
    }

    /// Wrap words computed elsewhere in the crate; enforces the top-word
    /// invariant.
    pub(crate) fn from_words(words: Vec<u64>, trunc_degree: usize) -> Self {
        debug_assert_eq!(words.len(), word_count(trunc_degree));
        let mut s = Gf2Series {
            words,
            trunc_degree,
        };
        s.mask_top();
        s
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc_degree
    }

    /// Coefficient of q^n, or `DegreeOutOfRange` past the truncation.
    pub fn coeff(&self, n: usize) -> Result<bool, Gf2SeriesError> {
        if n > self.trunc_degree {
            return Err(Gf2SeriesError::DegreeOutOfRange {
                degree: n,
                trunc_degree: self.trunc_degree,
            });
        }
        Ok(self.bit(n))
    }

    #[inline]
    pub(crate) fn bit(&self, n: usize) -> bool {
        debug_assert!(n <= self.trunc_degree);
        (self.words[n >> 6] >> (n & 63)) & 1 == 1
    }

    /// True if every stored coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of set coefficients at degrees 0..=x. Panics if x exceeds the
    /// truncation degree.
    pub fn popcount_prefix(&self, x: usize) -> u64 {
        assert!(
            x <= self.trunc_degree,
            "prefix bound {} exceeds truncation degree {}",
            x,
            self.trunc_degree
        );
        let full = x / 64;
        let mut count: u64 = self.words[..full]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let rem = x % 64;
        let mask = if rem == 63 {
            u64::MAX
        } else {
            (1u64 << (rem + 1)) - 1
        };
        count += (self.words[full] & mask).count_ones() as u64;
        count
    }

    /// Ascending list of degrees with coefficient 1.
    pub fn exponents(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    /// Smallest degree (at common truncation) where the two series differ.
    pub fn first_difference(&self, other: &Gf2Series) -> Option<usize> {
        let trunc = self.trunc_degree.min(other.trunc_degree);
        let nwords = word_count(trunc);
        for i in 0..nwords {
            let mut d = self.words[i] ^ other.words[i];
            if i == nwords - 1 {
                d &= last_word_mask(trunc);
            }
            if d != 0 {
                return Some(i * 64 + d.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Copy truncated to min(self.trunc_degree, n).
    pub fn truncate(&self, n: usize) -> Gf2Series {
        if n >= self.trunc_degree {
            return self.clone();
        }
        let mut words = self.words[..word_count(n)].to_vec();
        *words.last_mut().unwrap() &= last_word_mask(n);
        Gf2Series {
            words,
            trunc_degree: n,
        }
    }

    /// Coefficient-wise XOR (addition and subtraction mod 2). The result is
    /// truncated to the shorter operand.
    pub fn xor_add(&self, other: &Gf2Series) -> Gf2Series {
        let trunc = self.trunc_degree.min(other.trunc_degree);
        let nwords = word_count(trunc);
        let mut words: Vec<u64> = (0..nwords)
            .map(|i| self.words[i] ^ other.words[i])
            .collect();
        *words.last_mut().unwrap() &= last_word_mask(trunc);
        Gf2Series {
            words,
            trunc_degree: trunc,
        }
    }

    /// Carry-free product mod 2, truncated to the shorter operand.
    ///
    /// Below [`DEFAULT_MUL_FAST_PATH_THRESHOLD`] bits this is word-shifted XOR
    /// accumulation; above it a Karatsuba split is used. The two paths are
    /// bit-identical; see [`Gf2Series::mul_with_threshold`] to pin one.
    pub fn mul(&self, other: &Gf2Series) -> Gf2Series {
        self.mul_with_threshold(other, DEFAULT_MUL_FAST_PATH_THRESHOLD)
    }

    /// `mul` with an explicit fast-path threshold in bits. `usize::MAX`
    /// forces the naive path, `0` forces Karatsuba all the way down to the
    /// word level (useful for cross-path tests).
    pub fn mul_with_threshold(&self, other: &Gf2Series, threshold_bits: usize) -> Gf2Series {
        let trunc = self.trunc_degree.min(other.trunc_degree);
        let a = self.truncate(trunc);
        let b = other.truncate(trunc);
        let words = mul::mul_words(&a.words, &b.words, word_count(trunc), threshold_bits);
        let mut s = Gf2Series {
            words,
            trunc_degree: trunc,
        };
        s.mask_top();
        s
    }

    /// Frobenius square: in characteristic 2, f(q)^2 = f(q^2). Computed by
    /// bit interleaving, never by `mul`; equals `dilate(2)` bit-exactly.
    pub fn square(&self) -> Gf2Series {
        let mut out = Self::zero(self.trunc_degree);
        let half_words = self.trunc_degree / 2 / 64 + 1;
        for i in 0..half_words.min(self.words.len()) {
            let w = self.words[i];
            let lo = spread_bits(w as u32);
            let hi = spread_bits((w >> 32) as u32);
            if 2 * i < out.words.len() {
                out.words[2 * i] = lo;
            }
            if 2 * i + 1 < out.words.len() {
                out.words[2 * i + 1] = hi;
            }
        }
        out.mask_top();
        out
    }

    /// Substitution q -> q^d: coefficient at d*n is the source coefficient at
    /// n, everything else zero. Truncation degree is preserved, so source
    /// degrees beyond trunc_degree/d fall off the end.
    pub fn dilate(&self, d: usize) -> Gf2Series {
        self.dilate_to(d, self.trunc_degree)
    }

    /// `dilate` with an explicit result truncation. Sound for any
    /// `trunc_degree <= d * (self.trunc_degree + 1) - 1`: every coefficient in
    /// that window is either a known source coefficient or structurally zero.
    pub fn dilate_to(&self, d: usize, trunc_degree: usize) -> Gf2Series {
        assert!(d >= 1, "dilation factor must be positive");
        assert!(
            trunc_degree < d * (self.trunc_degree + 1),
            "dilate_to({d}, {trunc_degree}) would fabricate coefficients beyond degree {}",
            d * (self.trunc_degree + 1) - 1
        );
        if d == 1 {
            return self.truncate(trunc_degree);
        }
        let mut out = Self::zero(trunc_degree);
        let max_src = trunc_degree / d;
        for e in self.exponents() {
            if e > max_src {
                break;
            }
            out.words[(e * d) >> 6] |= 1u64 << ((e * d) & 63);
        }
        out
    }

    /// Reciprocal to the truncation degree via Newton degree-doubling:
    /// g -> g + g*(f*g + 1) doubles the number of correct coefficients per
    /// step (characteristic 2 kills the cross term).
    pub fn invert(&self) -> Result<Gf2Series, Gf2SeriesError> {
        if !self.bit(0) {
            return Err(Gf2SeriesError::ConstantTermZero);
        }
        let n = self.trunc_degree;
        let mut g = Gf2Series::one(n);
        // prec = number of known-correct low coefficients of g
        let mut prec: usize = 1;
        while prec <= n {
            let window = (2 * prec - 1).min(n);
            let f_win = self.truncate(window);
            let mut err = f_win.mul(&g.truncate(window));
            err.words[0] ^= 1;
            let corr = g.truncate(window).mul(&err);
            // corr is zero below `prec`, so this only fills new coefficients
            for (i, w) in corr.words.iter().enumerate() {
                g.words[i] ^= w;
            }
            prec = window + 1;
        }
        g.mask_top();
        Ok(g)
    }

    /// Reciprocal by per-coefficient back-substitution: g_n = sum_{k>=1}
    /// f_k g_{n-k}. Quadratic; kept as an independent oracle for `invert`.
    pub fn invert_backsub(&self) -> Result<Gf2Series, Gf2SeriesError> {
        if !self.bit(0) {
            return Err(Gf2SeriesError::ConstantTermZero);
        }
        let n = self.trunc_degree;
        let f_exps: Vec<usize> = self.exponents().into_iter().filter(|&e| e > 0).collect();
        let mut g = Gf2Series::one(n);
        for m in 1..=n {
            let mut acc = false;
            for &k in &f_exps {
                if k > m {
                    break;
                }
                acc ^= g.bit(m - k);
            }
            if acc {
                g.words[m >> 6] |= 1u64 << (m & 63);
            }
        }
        Ok(g)
    }

    /// Multiply by q^k: coefficients move up by k, the truncation degree is
    /// preserved and the top k coefficients fall off.
    pub fn shift(&self, k: usize) -> Gf2Series {
        let n = self.trunc_degree;
        let mut out = Self::zero(n);
        if k > n {
            return out;
        }
        let word_shift = k / 64;
        let bit_shift = k % 64;
        let nwords = out.words.len();
        for i in (0..nwords - word_shift).rev() {
            let mut w = self.words[i] << bit_shift;
            if bit_shift > 0 && i > 0 {
                w |= self.words[i - 1] >> (64 - bit_shift);
            }
            out.words[i + word_shift] = w;
        }
        out.mask_top();
        out
    }

    /// Arithmetic-progression extraction: coefficient n of the result is the
    /// source coefficient at m*n + r. The result is truncated to
    /// (trunc_degree - r) / m. Panics if r exceeds the truncation degree.
    pub fn extract_progression(&self, m: usize, r: usize) -> Gf2Series {
        assert!(m >= 1, "progression stride must be positive");
        assert!(
            r <= self.trunc_degree,
            "progression offset {} exceeds truncation degree {}",
            r,
            self.trunc_degree
        );
        let new_trunc = (self.trunc_degree - r) / m;
        if m == 1 {
            // plain down-shift by r
            let mut out = Self::zero(new_trunc);
            let word_shift = r / 64;
            let bit_shift = r % 64;
            for i in 0..out.words.len() {
                let mut w = self.words[i + word_shift] >> bit_shift;
                if bit_shift > 0 && i + word_shift + 1 < self.words.len() {
                    w |= self.words[i + word_shift + 1] << (64 - bit_shift);
                }
                out.words[i] = w;
            }
            out.mask_top();
            return out;
        }
        let mut out = Self::zero(new_trunc);
        for i in 0..=new_trunc {
            if self.bit(m * i + r) {
                out.words[i >> 6] |= 1u64 << (i & 63);
            }
        }
        out
    }

    fn mask_top(&mut self) {
        *self.words.last_mut().unwrap() &= last_word_mask(self.trunc_degree);
    }
}

fn last_word_mask(trunc_degree: usize) -> u64 {
    let rem = trunc_degree % 64;
    if rem == 63 {
        u64::MAX
    } else {
        (1u64 << (rem + 1)) - 1
    }
}

/// Spread the 32 bits of `x` to the even bit positions of a u64.
fn spread_bits(x: u32) -> u64 {
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_ffff_0000_ffff;
    v = (v | (v << 8)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

impl std::fmt::Debug for Gf2Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let exps = self.exponents();
        if exps.len() > 16 {
            write!(
                f,
                "Gf2Series(trunc={}, {} terms, first {:?}...)",
                self.trunc_degree,
                exps.len(),
                &exps[..16]
            )
        } else {
            write!(
                f,
                "Gf2Series(trunc={}, terms {:?})",
                self.trunc_degree, exps
            )
        }
    }
}

impl std::fmt::Display for Gf2Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let exps = self.exponents();
        if exps.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, e) in exps.iter().take(24).enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                match e {
                    0 => write!(f, "1")?,
                    1 => write!(f, "q")?,
                    _ => write!(f, "q^{e}")?,
                }
            }
            if exps.len() > 24 {
                write!(f, " + ...")?;
            }
        }
        write!(f, " + O(q^{})", self.trunc_degree + 1)
    }
}

/// Sparse exponent-list form: ascending degrees with coefficient 1 plus the
/// truncation degree. Round-trips bit-exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSeries {
    pub trunc_degree: u64,
    pub exponents: Vec<u64>,
}

/// Dense hex form: the packed words dumped little-endian by degree (the first
/// byte pair covers degrees 0..=7), lowercase. Round-trips bit-exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexSeries {
    pub trunc_degree: u64,
    pub hex: String,
}

impl From<&Gf2Series> for SparseSeries {
    fn from(s: &Gf2Series) -> Self {
        SparseSeries {
            trunc_degree: s.trunc_degree as u64,
            exponents: s.exponents().into_iter().map(|e| e as u64).collect(),
        }
    }
}

impl TryFrom<&SparseSeries> for Gf2Series {
    type Error = Gf2SeriesError;

    fn try_from(r: &SparseSeries) -> Result<Self, Self::Error> {
        let trunc = r.trunc_degree as usize;
        let mut prev: Option<u64> = None;
        for &e in &r.exponents {
            if e > r.trunc_degree {
                return Err(Gf2SeriesError::InvalidEncoding(format!(
                    "exponent {e} exceeds trunc_degree {}",
                    r.trunc_degree
                )));
            }
            if prev.is_some_and(|p| p >= e) {
                return Err(Gf2SeriesError::InvalidEncoding(
                    "exponents must be strictly ascending".into(),
                ));
            }
            prev = Some(e);
        }
        Ok(Gf2Series::from_exponents(
            r.exponents.iter().map(|&e| e as usize),
            trunc,
        ))
    }
}

impl From<&Gf2Series> for HexSeries {
    fn from(s: &Gf2Series) -> Self {
        let mut hex = String::with_capacity(s.words.len() * 16);
        for w in &s.words {
            for byte in w.to_le_bytes() {
                hex.push_str(&format!("{byte:02x}"));
            }
        }
        HexSeries {
            trunc_degree: s.trunc_degree as u64,
            hex,
        }
    }
}

impl TryFrom<&HexSeries> for Gf2Series {
    type Error = Gf2SeriesError;

    fn try_from(r: &HexSeries) -> Result<Self, Self::Error> {
        let trunc = r.trunc_degree as usize;
        let nwords = word_count(trunc);
        if r.hex.len() != nwords * 16 {
            return Err(Gf2SeriesError::InvalidEncoding(format!(
                "hex length {} does not match {} words for trunc_degree {}",
                r.hex.len(),
                nwords,
                trunc
            )));
        }
        let mut words = vec![0u64; nwords];
        for (i, w) in words.iter_mut().enumerate() {
            let mut bytes = [0u8; 8];
            for (j, b) in bytes.iter_mut().enumerate() {
                let pos = (i * 8 + j) * 2;
                *b = u8::from_str_radix(&r.hex[pos..pos + 2], 16).map_err(|_| {
                    Gf2SeriesError::InvalidEncoding(format!("bad hex at offset {pos}"))
                })?;
            }
            *w = u64::from_le_bytes(bytes);
        }
        if *words.last().unwrap() & !last_word_mask(trunc) != 0 {
            return Err(Gf2SeriesError::InvalidEncoding(format!(
                "set bits beyond trunc_degree {trunc}"
            )));
        }
        Ok(Gf2Series {
            words,
            trunc_degree: trunc,
        })
    }
}
