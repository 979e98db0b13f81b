//! Criterion benchmarks for `horocycle-core`; see `benches/`.
