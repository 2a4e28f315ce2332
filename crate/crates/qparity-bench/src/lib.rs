//! Benchmark-only crate; see `benches/` for the criterion targets.
//!
//! `gf2_ops` times the series kernel (comb vs Karatsuba multiplication,
//! squaring, Newton inversion); `parity_paths` times the routes to the
//! multipartition parity series and an identity solve/verify round.
