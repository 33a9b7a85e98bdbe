//! Criterion benchmarks for the graph-sum engine; see `benches/`.
