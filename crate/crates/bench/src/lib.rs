//! Benchmark-only crate; see benches/tower_ops.rs.
