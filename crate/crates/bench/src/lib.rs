//! Criterion benchmarks for `conic-defense`; see `benches/`.
