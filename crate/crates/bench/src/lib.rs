//! Criterion benchmarks for `sharpext-core`; see `benches/kernels.rs`.
