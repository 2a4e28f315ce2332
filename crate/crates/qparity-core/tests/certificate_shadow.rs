//! The finite-x density bookkeeping behind every certificate step: the
//! progression side and the selected eta-term combination are bit-identical
//! series, so their odd counts agree exactly at any scan bound.

use qparity_core::gf2series::Gf2Series;
use qparity_core::identities::{lhs_series, rhs_basis};
use qparity_core::reduce::{build_certificate, CertificateStatus};

#[test]
fn step_densities_match_at_1e5() {
    let bound = 100_000usize;
    for root in [35u64, 15] {
        let cert = build_certificate(root, 2_000);
        assert_eq!(cert.status, CertificateStatus::Complete);
        for step in &cert.steps {
            let params = &step.identity.params;
            let lhs = lhs_series(params, bound);
            let mut rhs = Gf2Series::zero(bound);
            for entry in rhs_basis(params, bound) {
                if step.identity.solution.epsilon(entry.d, entry.j) {
                    rhs = rhs.xor_add(&entry.series);
                }
            }
            assert_eq!(
                lhs,
                rhs,
                "step at A = {} (a = {}, t = {})",
                step.parent,
                params.a(),
                params.t()
            );
            assert_eq!(
                lhs.popcount_prefix(bound),
                rhs.popcount_prefix(bound),
                "odd counts at the scan bound"
            );
        }
    }
}
