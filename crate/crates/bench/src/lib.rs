//! Criterion benchmarks for `maxspec-core`; see `benches/spectral.rs`.
//!
//! Run with `cargo bench -p maxspec-bench`.
