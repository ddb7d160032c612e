//! Criterion benchmarks for the hyperpoincare numerics live in `benches/`.
