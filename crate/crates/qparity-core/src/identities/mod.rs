//! The progression identity family mod 2: for odd a and t, a candidate
//! identity
//!
//! ```text
//! q^k * sum_n p_t(a*n + b) q^n  ==  sum_{d|a} sum_{j<=k/d} eps_{d,j} q^{dj} / prod_i (1-q^{di})^{at/d-24j}
//! ```
//!
//! with eps bits in {0,1}, eps_{1,0} = 1 forced, and terms with negative
//! exponent omitted. The eps values are not known in closed form; this module
//! treats them as unknowns in an overdetermined GF(2) linear system, fits
//! them on a low-degree window, and verifies the resulting identity on a much
//! larger window. A finite-degree verification is evidence, not proof,
//! outside the parameter ranges where these identities are known to exist
//! (see [`ChenStatus`]).

mod solver;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::etaq::{self, EtaPowerSpec};
use crate::gf2series::Gf2Series;
use crate::numth;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("fit degree {got} too small for {unknowns} unknowns; need at least {needed}")]
    InsufficientDegree {
        unknowns: usize,
        needed: usize,
        got: usize,
    },
}

/// Validated identity parameters (a, t) plus the derived residue b and
/// prefactor exponent k.
///
/// Hypotheses: a and t odd and positive, and t = 3 (mod 6) whenever
/// a = 3 (mod 6). Violations are rejected at construction, before any series
/// work starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityParams {
    a: u64,
    t: u64,
    b: u64,
    k: u64,
}

fn check_hypotheses(a: u64, t: u64) -> Result<(), IdentityError> {
    if a == 0 || a.is_multiple_of(2) {
        return Err(IdentityError::InvalidParams(format!(
            "a = {a} must be an odd positive integer"
        )));
    }
    if t == 0 || t.is_multiple_of(2) {
        return Err(IdentityError::InvalidParams(format!(
            "t = {t} must be an odd positive integer"
        )));
    }
    if a % 6 == 3 && t % 6 != 3 {
        return Err(IdentityError::InvalidParams(format!(
            "a = {a} = 3 (mod 6) requires t = 3 (mod 6), got t = {t}"
        )));
    }
    Ok(())
}

/// The residue b of the progression a*n + b:
/// 0 for a = 1; (t/3) * 8^{-1} (mod a) when t = 3 (mod 6); t * 24^{-1}
/// (mod a) otherwise. The needed inverses exist under the parameter
/// hypotheses (a odd, and coprime to 3 in the 24^{-1} case).
pub fn compute_b(a: u64, t: u64) -> Result<u64, IdentityError> {
    check_hypotheses(a, t)?;
    if a == 1 {
        return Ok(0);
    }
    let b = if t % 6 == 3 {
        let inv8 = numth::mod_inverse(8 % a, a).expect("8 is invertible mod odd a");
        ((t / 3) % a) * inv8 % a
    } else {
        let inv24 = numth::mod_inverse(24 % a, a).expect("24 is invertible mod a coprime to 6");
        (t % a) * inv24 % a
    };
    Ok(b)
}

/// The prefactor exponent k = ceil(t(a^2 - 1) / 24a), in exact integer
/// arithmetic.
pub fn compute_k(a: u64, t: u64) -> Result<u64, IdentityError> {
    check_hypotheses(a, t)?;
    let num = t as u128 * (a as u128 * a as u128 - 1);
    let den = 24 * a as u128;
    Ok(num.div_ceil(den) as u64)
}

impl IdentityParams {
    pub fn new(a: u64, t: u64) -> Result<Self, IdentityError> {
        let b = compute_b(a, t)?;
        let k = compute_k(a, t)?;
        Ok(IdentityParams { a, t, b, k })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn k(&self) -> u64 {
        self.k
    }
}

/// Which proved case of the identity family (if any) covers these
/// parameters. Finite-degree verification is certification only for the
/// proved cases; elsewhere it is evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChenStatus {
    /// a = p^alpha with p >= 5 prime (any odd t).
    ProvedPrimePower,
    /// a = 3 with t >= 3, t = 3 (mod 6).
    ProvedAThree,
    /// Not covered by a proved case.
    Conjectural,
}

pub fn chen_case(params: &IdentityParams) -> ChenStatus {
    let factors = numth::factorize(params.a);
    match factors.as_slice() {
        [(p, _)] if *p >= 5 => ChenStatus::ProvedPrimePower,
        [(3, 1)] if params.t >= 3 && params.t % 6 == 3 => ChenStatus::ProvedAThree,
        _ => ChenStatus::Conjectural,
    }
}

/// One term on the right side: q^{d*j} / prod(1-q^{di})^exponent.
#[derive(Debug, Clone)]
pub struct BasisEntry {
    pub d: u64,
    pub j: u64,
    pub exponent: u64,
    pub series: Gf2Series,
}

/// The (d, j, exponent) index set of the right side, sorted by (d, j):
/// d runs over divisors of a, 0 <= j <= k/d, and entries whose exponent
/// at/d - 24j would be negative are omitted (their eps is forced 0).
pub fn basis_keys(params: &IdentityParams) -> Vec<(u64, u64, u64)> {
    let mut keys = Vec::new();
    let at = params.a as i128 * params.t as i128;
    for d in numth::divisors(params.a) {
        for j in 0..=params.k / d {
            let exponent = at / d as i128 - 24 * j as i128;
            if exponent >= 0 {
                keys.push((d, j, exponent as u64));
            }
        }
    }
    keys
}

/// The right-side basis series to degree `n`, one per key from
/// [`basis_keys`].
pub fn rhs_basis(params: &IdentityParams, n: usize) -> Vec<BasisEntry> {
    basis_keys(params)
        .into_iter()
        .map(|(d, j, exponent)| {
            let series = eta_term(d, j, exponent, n);
            BasisEntry {
                d,
                j,
                exponent,
                series,
            }
        })
        .collect()
}

fn eta_term(d: u64, j: u64, exponent: u64, n: usize) -> Gf2Series {
    let reciprocal = etaq::eta_power(
        EtaPowerSpec {
            d,
            e: -(exponent as i64),
        },
        n,
    );
    reciprocal.shift((d * j) as usize)
}

/// The left side to degree `n`: q^k * sum p_t(a*n + b) q^n, built by
/// progression extraction from the multipartition parity series.
pub fn lhs_series(params: &IdentityParams, n: usize) -> Gf2Series {
    let (a, t, b, k) = (params.a, params.t, params.b, params.k);
    let source_degree = a as usize * n + b as usize + (a * k) as usize;
    let source = etaq::multipartition_series(t, source_degree);
    source
        .extract_progression(a as usize, b as usize)
        .shift(k as usize)
        .truncate(n)
}

/// How the fit went: a pinned-down solution, a solution space with free
/// directions (the reported representative is the lexicographically least,
/// by (d, j), that survives a deeper check), or no solution on the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Unique,
    Ambiguous,
    Inconsistent,
}

/// A fitted assignment of the eps bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonSolution {
    /// (d, j) -> bit, for every key the basis carries. (1, 0) is always 1.
    pub entries: BTreeMap<(u64, u64), bool>,
    pub fit_degree: usize,
    /// Largest degree this assignment is known to hold to.
    pub verify_degree: usize,
    /// Dimension of the solution space on the fit window.
    pub kernel_dim: usize,
    pub status: SolveStatus,
}

impl EpsilonSolution {
    pub fn epsilon(&self, d: u64, j: u64) -> bool {
        self.entries.get(&(d, j)).copied().unwrap_or(false)
    }
}

/// Outcome of recomputing both sides to a given degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyReport {
    Verified {
        degree: usize,
    },
    Mismatch {
        degree: usize,
        first_mismatch: usize,
    },
}

impl VerifyReport {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyReport::Verified { .. })
    }
}

pub use solver::solve_epsilons;

/// Default fit window: unknown count plus a 64-row overdetermination margin.
pub fn default_fit_degree(params: &IdentityParams) -> usize {
    basis_keys(params).len().saturating_sub(1) + 64
}

/// Default verification depth: 50x the fit window or 10^4, whichever is
/// larger.
pub fn default_verify_degree(fit_degree: usize) -> usize {
    (50 * fit_degree).max(10_000)
}

/// Recompute both sides to `verify_degree` under the given eps assignment
/// and report equality or the first mismatching degree. A mismatch is a
/// report, not an error: a missing forced bit or a bit on an
/// omitted-by-fiat term simply fails to verify. Errors are reserved for
/// entries that name no term at all (d not dividing a, degenerate sizes).
pub fn verify_identity(
    params: &IdentityParams,
    sol: &EpsilonSolution,
    verify_degree: usize,
) -> Result<VerifyReport, IdentityError> {
    let at = params.a as i128 * params.t as i128;
    let lhs = lhs_series(params, verify_degree);
    let mut rhs = Gf2Series::zero(verify_degree);
    for (&(d, j), &bit) in &sol.entries {
        if !bit {
            continue;
        }
        if d == 0 || !params.a.is_multiple_of(d) {
            return Err(IdentityError::InvalidParams(format!(
                "eps({d},{j}) names no term: {d} does not divide a = {}",
                params.a
            )));
        }
        let exponent = at / d as i128 - 24 * j as i128;
        if exponent.unsigned_abs() > i64::MAX as u128 {
            return Err(IdentityError::InvalidParams(format!(
                "eps({d},{j}) exponent {exponent} is out of range"
            )));
        }
        let reciprocal = etaq::eta_power(
            EtaPowerSpec {
                d,
                e: -(exponent as i64),
            },
            verify_degree,
        );
        let offset = (d as u128 * j as u128).min(verify_degree as u128 + 1) as usize;
        rhs = rhs.xor_add(&reciprocal.shift(offset));
    }
    Ok(match lhs.first_difference(&rhs) {
        None => VerifyReport::Verified {
            degree: verify_degree,
        },
        Some(first_mismatch) => VerifyReport::Mismatch {
            degree: verify_degree,
            first_mismatch,
        },
    })
}

/// Fit and then verify; on success the solution's `verify_degree` is bumped
/// to the verified depth.
pub fn solve_and_verify(
    params: &IdentityParams,
    fit_degree: usize,
    verify_degree: usize,
) -> Result<(EpsilonSolution, VerifyReport), IdentityError> {
    let mut sol = solve_epsilons(params, fit_degree)?;
    let report = verify_identity(params, &sol, verify_degree)?;
    if let VerifyReport::Verified { degree } = report {
        sol.verify_degree = degree;
    }
    Ok((sol, report))
}

/// One eps bit in the serialized record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonEntry {
    pub d: u64,
    pub j: u64,
    pub value: u8,
}

/// The on-disk identity record. Field order and names are fixed so fixture
/// files diff cleanly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub a: u64,
    pub t: u64,
    pub b: u64,
    pub k: u64,
    pub status: SolveStatus,
    pub chen_case: ChenStatus,
    pub fit_degree: u64,
    pub verify_degree: u64,
    pub epsilons: Vec<EpsilonEntry>,
}

impl IdentityRecord {
    pub fn new(params: &IdentityParams, sol: &EpsilonSolution) -> Self {
        IdentityRecord {
            a: params.a,
            t: params.t,
            b: params.b,
            k: params.k,
            status: sol.status,
            chen_case: chen_case(params),
            fit_degree: sol.fit_degree as u64,
            verify_degree: sol.verify_degree as u64,
            epsilons: sol
                .entries
                .iter()
                .map(|(&(d, j), &v)| EpsilonEntry {
                    d,
                    j,
                    value: v as u8,
                })
                .collect(),
        }
    }

    /// Rebuild validated parameters and an eps assignment from the record,
    /// rejecting records whose b or k disagree with the stated (a, t).
    pub fn to_solution(&self) -> Result<(IdentityParams, EpsilonSolution), IdentityError> {
        let params = IdentityParams::new(self.a, self.t)?;
        if params.b != self.b || params.k != self.k {
            return Err(IdentityError::InvalidParams(format!(
                "record (b, k) = ({}, {}) but (a={}, t={}) gives ({}, {})",
                self.b, self.k, self.a, self.t, params.b, params.k
            )));
        }
        let mut entries = BTreeMap::new();
        for e in &self.epsilons {
            if e.value > 1 {
                return Err(IdentityError::InvalidParams(format!(
                    "eps({},{}) = {} is not a bit",
                    e.d, e.j, e.value
                )));
            }
            entries.insert((e.d, e.j), e.value == 1);
        }
        let sol = EpsilonSolution {
            entries,
            fit_degree: self.fit_degree as usize,
            verify_degree: self.verify_degree as usize,
            kernel_dim: 0,
            status: self.status,
        };
        Ok((params, sol))
    }
}
