//! Criterion benchmarks for the sampling and solver hot paths live in `benches/`.
