//! Empirical odd-density machinery: exact odd-coefficient counts along
//! prefixes and arithmetic progressions, the power-of-two halving law at the
//! coefficient level, and the sqrt(x)/log log x lower-bound ratio.
//!
//! Counts are exact popcounts; ratios are reported as exact rationals plus a
//! fixed-width decimal. No extrapolation to a limiting density is ever
//! performed here; a finite-x ratio is a proxy, nothing more.

use crate::etaq;
use crate::gf2series::Gf2Series;

/// Which route produced a parity series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesPath {
    /// Pentagonal parity recurrence (t = 1 only).
    Recurrence,
    /// Binary-expansion product of dilated t = 1 series.
    Product,
    /// Newton inversion of the t-th Euler power.
    Inversion,
}

impl SeriesPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesPath::Recurrence => "recurrence",
            SeriesPath::Product => "product",
            SeriesPath::Inversion => "inversion",
        }
    }
}

/// The default route for p_t: the recurrence for t = 1, the product path
/// otherwise. Inversion is reserved for cross-checks (see
/// [`INVERSION_CROSS_CHECK_BOUND`]).
pub fn default_path(t: u64) -> SeriesPath {
    if t == 1 {
        SeriesPath::Recurrence
    } else {
        SeriesPath::Product
    }
}

/// Scan bound up to which the inversion path is run alongside the default
/// path as a cross-check; beyond it only the default path is used.
pub const INVERSION_CROSS_CHECK_BOUND: u64 = 100_000;

/// p_t parity series to degree `n` by the requested route.
pub fn parity_series(t: u64, n: usize, path: SeriesPath) -> Gf2Series {
    match path {
        SeriesPath::Recurrence => {
            assert_eq!(t, 1, "the recurrence route only produces the t = 1 series");
            etaq::partition_parity_recurrence(n)
        }
        SeriesPath::Product => etaq::multipartition_series(t, n),
        SeriesPath::Inversion => etaq::multipartition_series_by_inversion(t, n),
    }
}

/// One point of a density scan: exact odd count among degrees 0..=x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    pub x: u64,
    pub odd_count: u64,
}

/// A finite-x odd-density estimate for p_t, with its checkpoint curve.
/// The ratio is odd_count / (x + 1), exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityEstimate {
    pub t: u64,
    pub x: u64,
    pub odd_count: u64,
    pub checkpoints: Vec<Checkpoint>,
}

impl DensityEstimate {
    /// The exact rational odd_count / (x + 1).
    pub fn ratio(&self) -> (u64, u64) {
        (self.odd_count, self.x + 1)
    }

    pub fn ratio_f64(&self) -> f64 {
        self.odd_count as f64 / (self.x + 1) as f64
    }
}

/// Checkpoint grid: powers of 10 from 100 up to x, plus x itself.
pub fn default_checkpoints(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 100u64;
    while p < x {
        out.push(p);
        match p.checked_mul(10) {
            Some(next) => p = next,
            None => break,
        }
    }
    out.push(x);
    out
}

fn normalize_checkpoints(x: u64, checkpoints: &[u64]) -> Vec<u64> {
    let mut cps: Vec<u64> = checkpoints.iter().copied().filter(|&c| c <= x).collect();
    cps.push(x);
    cps.sort_unstable();
    cps.dedup();
    cps
}

/// Exact odd counts for p_t(n), n <= x, at each checkpoint bound (plus x),
/// using the default route for t.
pub fn odd_density(t: u64, x: u64, checkpoints: &[u64]) -> DensityEstimate {
    odd_density_with_path(t, x, checkpoints, default_path(t))
}

/// Same scan with the route pinned (for cross-checks).
pub fn odd_density_with_path(
    t: u64,
    x: u64,
    checkpoints: &[u64],
    path: SeriesPath,
) -> DensityEstimate {
    let series = parity_series(t, x as usize, path);
    estimate_from_series(t, &series, x, checkpoints)
}

fn estimate_from_series(
    t: u64,
    series: &Gf2Series,
    x: u64,
    checkpoints: &[u64],
) -> DensityEstimate {
    let cps = normalize_checkpoints(x, checkpoints);
    let checkpoints: Vec<Checkpoint> = cps
        .into_iter()
        .map(|c| Checkpoint {
            x: c,
            odd_count: series.popcount_prefix(c as usize),
        })
        .collect();
    let odd_count = checkpoints.last().unwrap().odd_count;
    DensityEstimate {
        t,
        x,
        odd_count,
        checkpoints,
    }
}

/// Odd density of p_t along the progression m*n + r, for m*n + r <= x.
/// The returned estimate is indexed by n, so its `x` is the number of scanned
/// terms minus one.
pub fn progression_odd_density(t: u64, m: u64, r: u64, x: u64) -> DensityEstimate {
    assert!(m >= 1, "progression stride must be positive");
    assert!(r < m, "progression residue must satisfy 0 <= r < m");
    assert!(r <= x, "no progression terms at or below the scan bound");
    let series = etaq::multipartition_series(t, x as usize);
    let extracted = series.extract_progression(m as usize, r as usize);
    let bound = (x - r) / m;
    estimate_from_series(t, &extracted, bound, &default_checkpoints(bound))
}

/// A failed halving comparison: the first offending degree, what the
/// dilated-series law demanded there, and what the series held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalvingCounterexample {
    pub degree: u64,
    pub expected: bool,
    pub actual: bool,
}

/// Outcome of the coefficient-level halving law check for (m, c):
/// p_{2^c * m}(n) is odd exactly when 2^c divides n and p_m(n / 2^c) is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalvingReport {
    pub m: u64,
    pub c: u32,
    pub x: u64,
    pub counterexample: Option<HalvingCounterexample>,
}

impl HalvingReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Check the halving law for all n <= x with the two sides built by
/// independent routes: the 2^c * m series by inversion, the m series by the
/// recurrence/product route.
pub fn halving_check(m: u64, c: u32, x: u64) -> HalvingReport {
    assert!(m >= 1 && m % 2 == 1, "m must be odd");
    assert!(c >= 1, "c must be positive");
    let t_big = m.checked_shl(c).expect("2^c * m overflows");
    let big = etaq::multipartition_series_by_inversion(t_big, x as usize);
    let small = etaq::multipartition_series(m, (x >> c) as usize);
    halving_check_series(&big, &small, m, c)
}

/// The comparison core of [`halving_check`], exposed so tests can feed it
/// corrupted series.
pub fn halving_check_series(big: &Gf2Series, small: &Gf2Series, m: u64, c: u32) -> HalvingReport {
    let x = big.trunc_degree();
    assert!(small.trunc_degree() >= x >> c, "small series too short");
    let expected = small.truncate(x >> c).dilate_to(1usize << c, x);
    let counterexample = big
        .first_difference(&expected)
        .map(|degree| HalvingCounterexample {
            degree: degree as u64,
            expected: expected.coeff(degree).unwrap(),
            actual: big.coeff(degree).unwrap(),
        });
    HalvingReport {
        m,
        c,
        x: x as u64,
        counterexample,
    }
}

/// The lower-bound shadow for p(n): odd_count(x_i) * ln ln x_i / sqrt(x_i)
/// at each checkpoint. Informational; at desk scale the value sits far
/// above 1. Checkpoints below 16 are rejected so ln ln stays positive.
pub fn lower_bound_ratio(x: u64, checkpoints: &[u64]) -> Vec<(u64, f64)> {
    let cps = normalize_checkpoints(x, checkpoints);
    assert!(
        cps.iter().all(|&c| c >= 16),
        "lower-bound checkpoints must be at least 16"
    );
    let series = etaq::partition_parity_recurrence(x as usize);
    cps.into_iter()
        .map(|c| {
            let count = series.popcount_prefix(c as usize) as f64;
            let xf = c as f64;
            (c, count * xf.ln().ln() / xf.sqrt())
        })
        .collect()
}

/// One CSV row of a density scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityRow {
    pub t: u64,
    pub x: u64,
    pub odd_count: u64,
    pub path: SeriesPath,
}

/// Fixed-width decimal of odd_count / (x + 1), ten places.
pub fn ratio_decimal(odd_count: u64, x: u64) -> String {
    format!("{:.10}", odd_count as f64 / (x + 1) as f64)
}

/// Rows for an estimate's checkpoint curve, tagged with the route that
/// produced the series.
pub fn estimate_rows(est: &DensityEstimate, path: SeriesPath) -> Vec<DensityRow> {
    est.checkpoints
        .iter()
        .map(|cp| DensityRow {
            t: est.t,
            x: cp.x,
            odd_count: cp.odd_count,
            path,
        })
        .collect()
}

/// The density CSV: header plus one row per checkpoint.
pub fn to_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from("t,x,odd_count,ratio_decimal,path\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.t,
            row.x,
            row.odd_count,
            ratio_decimal(row.odd_count, row.x),
            row.path.as_str()
        ));
    }
    out
}
