//! Carry-free word-level multiplication kernels.
//!
//! Two routes with bit-identical output: a comb (word-shifted XOR
//! accumulation over the set bits of the sparser operand) and a Karatsuba
//! split that bottoms out in the comb. The comb handles truncated output
//! directly; Karatsuba computes the full product and the caller truncates.

/// Bit-length threshold above which `mul` takes the Karatsuba path.
pub const DEFAULT_MUL_FAST_PATH_THRESHOLD: usize = 1 << 14;

/// Operands whose sparser side has at most this many set bits always go
/// through the comb; shifting a handful of windows beats splitting.
const SPARSE_COMB_CUTOFF: u32 = 64;

fn trim(words: &[u64]) -> &[u64] {
    let len = words.len() - words.iter().rev().take_while(|&&w| w == 0).count();
    &words[..len]
}

fn popcount(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

/// Product of `a` and `b` truncated to `out_words` words.
pub(super) fn mul_words(a: &[u64], b: &[u64], out_words: usize, threshold_bits: usize) -> Vec<u64> {
    let mut out = vec![0u64; out_words];
    // word offsets >= out_words cannot reach the result
    let a = trim(&a[..a.len().min(out_words)]);
    let b = trim(&b[..b.len().min(out_words)]);
    if a.is_empty() || b.is_empty() {
        return out;
    }
    let base_words = (threshold_bits / 64).max(1);
    let sparse = popcount(a).min(popcount(b)) <= SPARSE_COMB_CUTOFF;
    if sparse || a.len().min(b.len()) <= base_words {
        comb_into(&mut out, a, b);
    } else {
        let full = kara_full(a, b, base_words);
        out[..out_words.min(full.len())].copy_from_slice(&full[..out_words.min(full.len())]);
    }
    out
}

/// XOR `src << (64*word_off + bit_off)` into `out`, dropping words past the
/// end of `out`.
fn xor_shifted(out: &mut [u64], src: &[u64], word_off: usize, bit_off: usize) {
    let n = out.len();
    if word_off >= n {
        return;
    }
    if bit_off == 0 {
        let m = src.len().min(n - word_off);
        for j in 0..m {
            out[word_off + j] ^= src[j];
        }
    } else {
        let m = src.len().min(n - word_off);
        for j in 0..m {
            out[word_off + j] ^= src[j] << bit_off;
        }
        let m = src.len().min(n - word_off - 1);
        for j in 0..m {
            out[word_off + j + 1] ^= src[j] >> (64 - bit_off);
        }
    }
}

/// XOR-accumulate the product of `a` and `b` into `out` (which may already
/// hold partial sums), dropping anything past the end of `out`.
fn comb_into(out: &mut [u64], a: &[u64], b: &[u64]) {
    let (sel, other) = if popcount(a) <= popcount(b) {
        (a, b)
    } else {
        (b, a)
    };
    for (i, &w) in sel.iter().enumerate() {
        if i >= out.len() {
            break;
        }
        let mut w = w;
        while w != 0 {
            let k = w.trailing_zeros() as usize;
            xor_shifted(out, other, i, k);
            w &= w - 1;
        }
    }
}

/// Full product, `a.len() + b.len()` words.
fn kara_full(a: &[u64], b: &[u64], base_words: usize) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    kara_into(&mut out, a, b, base_words);
    out
}

/// XOR-accumulate the full product into `out`; requires
/// `out.len() >= a.len() + b.len()`.
fn kara_into(out: &mut [u64], a: &[u64], b: &[u64], base_words: usize) {
    let a = trim(a);
    let b = trim(b);
    if a.is_empty() || b.is_empty() {
        return;
    }
    if a.len().min(b.len()) <= base_words {
        comb_into(out, a, b);
        return;
    }
    let h = a.len().max(b.len()).div_ceil(2);
    if a.len() <= h {
        let (b0, b1) = b.split_at(h);
        kara_into(out, a, b0, base_words);
        kara_into(&mut out[h..], a, b1, base_words);
        return;
    }
    if b.len() <= h {
        let (a0, a1) = a.split_at(h);
        kara_into(out, a0, b, base_words);
        kara_into(&mut out[h..], a1, b, base_words);
        return;
    }
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let mut low = vec![0u64; 2 * h];
    kara_into(&mut low, a0, b0, base_words);
    let mut high = vec![0u64; a1.len() + b1.len()];
    kara_into(&mut high, a1, b1, base_words);
    // mid = (a0+a1)(b0+b1) + low + high, placed at word offset h
    let mut mid = vec![0u64; 2 * h];
    let sa = xor_pad(a0, a1);
    let sb = xor_pad(b0, b1);
    kara_into(&mut mid, &sa, &sb, base_words);
    for (i, &w) in low.iter().enumerate() {
        out[i] ^= w;
        mid[i] ^= w;
    }
    for (i, &w) in high.iter().enumerate() {
        out[2 * h + i] ^= w;
        mid[i] ^= w;
    }
    // the top of mid cancels to zero whenever out is exactly-sized
    for (i, &w) in mid.iter().enumerate() {
        if h + i < out.len() {
            out[h + i] ^= w;
        } else {
            debug_assert_eq!(w, 0, "nonzero mid word past the end of the product");
        }
    }
}

fn xor_pad(long: &[u64], short: &[u64]) -> Vec<u64> {
    debug_assert!(long.len() >= short.len());
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o ^= s;
    }
    out
}
