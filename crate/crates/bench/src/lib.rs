//! Benchmarks for qcos-core live in `benches/`; run with `cargo bench -p qcos-bench`.
