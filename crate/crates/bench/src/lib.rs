//! Criterion benchmarks for thabound-core live under `benches/`.
