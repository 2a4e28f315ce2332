//! The eps fit: Gaussian elimination over GF(2) on the coefficient columns
//! of the right-side basis, targeting the left side XOR the forced (1,0)
//! column, over the degree window 0..=fit_degree.

use std::collections::BTreeMap;

use super::{
    basis_keys, lhs_series, rhs_basis, EpsilonSolution, IdentityError, IdentityParams, SolveStatus,
};

/// Coset enumeration for ambiguous fits stops at this kernel dimension; a
/// window that underdetermined means the fit degree was far too small.
const KERNEL_ENUM_CAP: usize = 16;

#[inline]
fn get_bit(row: &[u64], col: usize) -> bool {
    row[col / 64] >> (col % 64) & 1 == 1
}

#[inline]
fn set_bit(row: &mut [u64], col: usize) {
    row[col / 64] |= 1u64 << (col % 64);
}

fn xor_row(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn build_entries(keys: &[(u64, u64, u64)], unknown_bits: &[bool]) -> BTreeMap<(u64, u64), bool> {
    let mut entries = BTreeMap::new();
    entries.insert((keys[0].0, keys[0].1), true);
    for (i, &(d, j, _)) in keys[1..].iter().enumerate() {
        entries.insert((d, j), unknown_bits[i]);
    }
    entries
}

/// Fit the eps bits on degrees 0..=fit_degree.
///
/// Returns `Unique` when the window pins every unknown, `Ambiguous` when a
/// kernel remains (the representative returned is the lexicographically
/// least assignment, ordered by (d, j), that still holds at four times the
/// fit degree), and `Inconsistent` when the window (or the deeper check)
/// rules every assignment out.
pub fn solve_epsilons(
    params: &IdentityParams,
    fit_degree: usize,
) -> Result<EpsilonSolution, IdentityError> {
    let keys = basis_keys(params);
    debug_assert_eq!((keys[0].0, keys[0].1), (1, 0), "basis must lead with (1,0)");
    let unknowns = keys.len() - 1;
    let needed = unknowns + 16;
    if fit_degree < needed {
        return Err(IdentityError::InsufficientDegree {
            unknowns,
            needed,
            got: fit_degree,
        });
    }

    let basis = rhs_basis(params, fit_degree);
    let lhs = lhs_series(params, fit_degree);
    let target = lhs.xor_add(&basis[0].series);

    // augmented rows: unknown columns then the target bit
    let width_words = (unknowns + 1).div_ceil(64);
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(fit_degree + 1);
    for n in 0..=fit_degree {
        let mut row = vec![0u64; width_words];
        for (i, entry) in basis[1..].iter().enumerate() {
            if entry.series.bit(n) {
                set_bit(&mut row, i);
            }
        }
        if target.bit(n) {
            set_bit(&mut row, unknowns);
        }
        rows.push(row);
    }

    let mut pivot_cols: Vec<usize> = Vec::new();
    for col in 0..unknowns {
        let rank = pivot_cols.len();
        let Some(pivot_row) = (rank..rows.len()).find(|&r| get_bit(&rows[r], col)) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && get_bit(row, col) {
                xor_row(row, &pivot);
            }
        }
        pivot_cols.push(col);
        if pivot_cols.len() == rows.len() {
            break;
        }
    }
    let rank = pivot_cols.len();
    let kernel_dim = unknowns - rank;

    // after full elimination the rows below the rank carry no coefficient
    // bits, so a set target bit there kills the system
    if rows[rank..].iter().any(|row| get_bit(row, unknowns)) {
        return Ok(EpsilonSolution {
            entries: build_entries(&keys, &vec![false; unknowns]),
            fit_degree,
            verify_degree: fit_degree,
            kernel_dim,
            status: SolveStatus::Inconsistent,
        });
    }

    // particular solution with all free columns zero
    let mut particular = vec![false; unknowns];
    for (i, &col) in pivot_cols.iter().enumerate() {
        particular[col] = get_bit(&rows[i], unknowns);
    }

    if kernel_dim == 0 {
        return Ok(EpsilonSolution {
            entries: build_entries(&keys, &particular),
            fit_degree,
            verify_degree: fit_degree,
            kernel_dim,
            status: SolveStatus::Unique,
        });
    }

    if kernel_dim > KERNEL_ENUM_CAP {
        return Err(IdentityError::InsufficientDegree {
            unknowns,
            needed: fit_degree * 4,
            got: fit_degree,
        });
    }

    // enumerate the solution coset and keep assignments that still hold on a
    // 4x window; report the lexicographically least survivor
    let free_cols: Vec<usize> = (0..unknowns).filter(|c| !pivot_cols.contains(c)).collect();
    let check_degree = 4 * fit_degree;
    let lhs_ext = lhs_series(params, check_degree);
    let basis_ext = rhs_basis(params, check_degree);
    let mut best: Option<Vec<bool>> = None;
    for mask in 0u32..(1u32 << kernel_dim) {
        let mut cand = particular.clone();
        for (bit_index, &free_col) in free_cols.iter().enumerate() {
            if mask >> bit_index & 1 == 1 {
                cand[free_col] ^= true;
                for (i, &pivot_col) in pivot_cols.iter().enumerate() {
                    if get_bit(&rows[i], free_col) {
                        cand[pivot_col] ^= true;
                    }
                }
            }
        }
        let mut rhs = basis_ext[0].series.clone();
        for (i, &bit) in cand.iter().enumerate() {
            if bit {
                rhs = rhs.xor_add(&basis_ext[i + 1].series);
            }
        }
        if lhs_ext.first_difference(&rhs).is_none() && best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }

    Ok(match best {
        Some(cand) => EpsilonSolution {
            entries: build_entries(&keys, &cand),
            fit_degree,
            verify_degree: check_degree,
            kernel_dim,
            status: SolveStatus::Ambiguous,
        },
        None => EpsilonSolution {
            entries: build_entries(&keys, &particular),
            fit_degree,
            verify_degree: fit_degree,
            kernel_dim,
            status: SolveStatus::Inconsistent,
        },
    })
}
