//! Criterion benchmarks for the geotan kernels; see `benches/kernels.rs`.
