//! Criterion benchmarks for `dprime-core`; see `benches/`.
