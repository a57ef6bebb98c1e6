//! Criterion benchmarks for comparator construction, product construction
//! and solving live in `benches/pipeline.rs`; run them with
//! `cargo bench -p satisfice-bench`.
