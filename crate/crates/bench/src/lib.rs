//! Criterion benchmarks for the bound kernels and the Monte Carlo lab.
