//! Engine for truncated power series over GF(2): partition and
//! multipartition parities, eta-power quotients, progression identities
//! mod 2, odd-density scans, and density-reduction certificates.
//!
//! The layering is strict: [`gf2series`] is the arithmetic kernel,
//! [`etaq`] builds the named series on top of it, [`identities`] solves and
//! verifies the progression identity family, [`density`] runs empirical
//! odd-density scans, and [`reduce`] assembles identity instances into
//! machine-checkable reduction certificates.

pub mod density;
pub mod etaq;
pub mod gf2series;
pub mod identities;
pub(crate) mod numth;
pub mod reduce;

pub use density::{DensityEstimate, HalvingReport, SeriesPath};
pub use etaq::EtaPowerSpec;
pub use gf2series::{Gf2Series, Gf2SeriesError, HexSeries, SparseSeries};
pub use identities::{
    ChenStatus, EpsilonSolution, IdentityError, IdentityParams, IdentityRecord, SolveStatus,
    VerifyReport,
};
pub use reduce::{
    CertificateFile, CertificateStatus, Part, PrimeChoice, ReduceError, ReductionCertificate,
    ReductionNode, ReductionStep,
};
