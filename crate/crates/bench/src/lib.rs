//! Benchmark-only crate; see `benches/worst_case.rs`.
