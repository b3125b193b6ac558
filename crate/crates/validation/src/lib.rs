//! Holds the acceptance suite in `tests/acceptance.rs`; run it with
//! `cargo test -p sigpost-validation`. The suite runs the `sigpost` binary,
//! so build the workspace first.
