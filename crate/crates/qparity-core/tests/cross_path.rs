//! Deep cross-route checks: every parity series here can be produced by at
//! least two algorithmically unrelated routes, and they must agree
//! bit-exactly at scale.

use qparity_core::density::{self, SeriesPath};
use qparity_core::etaq::{self, EtaPowerSpec};
use qparity_core::gf2series::Gf2Series;

#[test]
fn recurrence_and_inversion_agree_to_2e5() {
    let n = 200_000;
    let by_recurrence = etaq::partition_parity_recurrence(n);
    let by_inversion = etaq::euler_series(n).invert().unwrap();
    assert_eq!(by_recurrence, by_inversion);
    assert_eq!(by_recurrence, etaq::multipartition_series(1, n));
}

#[test]
fn density_checkpoints_agree_on_both_routes_to_2e5() {
    let x = 200_000;
    let cps = density::default_checkpoints(x);
    let rec = density::odd_density_with_path(1, x, &cps, SeriesPath::Recurrence);
    let inv = density::odd_density_with_path(1, x, &cps, SeriesPath::Inversion);
    assert_eq!(rec.checkpoints, inv.checkpoints);
}

#[test]
fn product_route_matches_inversion_for_odd_t_to_99() {
    let n = 10_000;
    for t in (1..=99u64).step_by(2) {
        assert_eq!(
            etaq::multipartition_series(t, n),
            etaq::multipartition_series_by_inversion(t, n),
            "t = {t}"
        );
    }
}

#[test]
fn product_route_matches_inversion_for_even_t() {
    let n = 5_000;
    for t in [2u64, 6, 10, 18, 24] {
        assert_eq!(
            etaq::multipartition_series(t, n),
            etaq::multipartition_series_by_inversion(t, n),
            "t = {t}"
        );
    }
}

#[test]
fn partition_product_gives_triple_multipartition() {
    // P(q) * P(q^2) = 1/E(q)^3 mod 2; p_3 counts 1, 3, 9, 22, 51
    let p = etaq::multipartition_series(1, 64);
    let product = p.mul(&p.dilate(2));
    let p3 = etaq::multipartition_series(3, 64);
    assert_eq!(product, p3);
    let first: Vec<u8> = (0..5).map(|i| p3.coeff(i).unwrap() as u8).collect();
    assert_eq!(first, [1, 1, 1, 0, 1]);
}

#[test]
fn euler_reciprocal_is_partition_parity() {
    let inv = etaq::euler_series(9).invert().unwrap();
    let expect = [1u8, 1, 0, 1, 1, 1, 1, 1, 0, 0];
    let got: Vec<u8> = (0..10).map(|i| inv.coeff(i).unwrap() as u8).collect();
    assert_eq!(got, expect);
    // p(12) = 77 is odd
    assert_eq!(etaq::multipartition_series(1, 12).coeff(12), Ok(true));
}

#[test]
fn progression_extraction_from_partition_parity() {
    let p = etaq::multipartition_series(1, 19);
    let prog = p.extract_progression(5, 4);
    let got: Vec<u8> = (0..4).map(|i| prog.coeff(i).unwrap() as u8).collect();
    assert_eq!(got, [1, 0, 1, 0]);
}

#[test]
fn dilated_euler_truncates_pentagonal_support() {
    let dilated = etaq::euler_series(12).dilate(5);
    assert_eq!(dilated.exponents(), vec![0, 5, 10]);
}

#[test]
fn eta_power_binary_expansion_matches_plain_products() {
    // E^e assembled from the binary expansion of e equals E multiplied out
    // e times, across the dilation grid
    let n = 3_000;
    for d in [1usize, 3, 7] {
        let factor = etaq::euler_series(n).dilate(d);
        let mut plain = Gf2Series::one(n);
        for e in 1..=9i64 {
            plain = plain.mul(&factor);
            assert_eq!(
                etaq::eta_power(EtaPowerSpec { d: d as u64, e }, n),
                plain,
                "d = {d}, e = {e}"
            );
        }
    }
}

#[test]
fn lower_bound_ratios_increase_to_1e6() {
    let points = density::lower_bound_ratio(1_000_000, &[10_000, 100_000, 1_000_000]);
    assert!(points.windows(2).all(|w| w[0].1 < w[1].1), "{points:?}");
    assert!(points[0].1 > 1.0);
}
